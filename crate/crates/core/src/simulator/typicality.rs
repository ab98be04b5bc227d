use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::entropy_bits;
use crate::probability::JointPmf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Typicality {
    /// `|freq(a) - p(a)| <= eps p(a)` for every tuple `a`.
    Robust,
    /// `|-(1/n) log2 p_S(s^n) - H(S)| <= eps` for every nonempty subset `S`
    /// of the components, and no zero-probability tuple in any subset.
    #[default]
    Entropy,
}

/// True iff every tuple's empirical frequency is within `eps * p(a)` of
/// `p(a)`. `seqs[k]` is the sequence for axis `k` of `joint`.
pub fn is_jointly_typical(seqs: &[&[usize]], joint: &JointPmf, eps: f64) -> Result<bool> {
    Ok(Tester::new(joint, Typicality::Robust, eps)?.check_usize(seqs)?)
}

/// True iff every nonempty subset of the components has empirical
/// log-likelihood rate within `eps` bits of its entropy and contains no
/// zero-probability tuple.
pub fn is_entropy_typical(seqs: &[&[usize]], joint: &JointPmf, eps: f64) -> Result<bool> {
    Ok(Tester::new(joint, Typicality::Entropy, eps)?.check_usize(seqs)?)
}

#[derive(Debug, Clone)]
struct Marginal {
    comps: Vec<usize>,
    strides: Vec<usize>,
    log_p: Vec<f64>,
    entropy: f64,
}

/// Precomputed typicality test against a fixed joint.
#[derive(Debug, Clone)]
pub struct Tester {
    kind: Typicality,
    eps: f64,
    shape: Vec<usize>,
    strides: Vec<usize>,
    mass: Vec<f64>,
    marginals: Vec<Marginal>,
}

impl Tester {
    pub fn new(joint: &JointPmf, kind: Typicality, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("typicality slack must be positive, got {eps}")));
        }
        let shape = joint.shape();
        let rank = shape.len();
        let strides = row_major_strides(&shape);
        let mut marginals = Vec::new();
        if kind == Typicality::Entropy {
            for mask in 1usize..(1 << rank) {
                let comps: Vec<usize> = (0..rank).filter(|k| mask >> k & 1 == 1).collect();
                let m = joint.marginalize(&comps)?;
                let sub_shape: Vec<usize> = comps.iter().map(|&k| shape[k]).collect();
                marginals.push(Marginal {
                    strides: row_major_strides(&sub_shape),
                    log_p: m.mass().iter().map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY }).collect(),
                    entropy: entropy_bits(m.mass()),
                    comps,
                });
            }
        }
        Ok(Self { kind, eps, shape, strides, mass: joint.mass().to_vec(), marginals })
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    fn check_lengths<T>(&self, seqs: &[&[T]]) -> Result<usize> {
        if seqs.len() != self.rank() {
            return Err(Error::InvalidArgument(format!(
                "{} sequences for a {}-component joint",
                seqs.len(),
                self.rank()
            )));
        }
        let n = seqs[0].len();
        if seqs.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidArgument("sequences differ in length".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("empty sequences".into()));
        }
        Ok(n)
    }

    pub fn check_usize(&self, seqs: &[&[usize]]) -> Result<bool> {
        let n = self.check_lengths(seqs)?;
        for (s, &size) in seqs.iter().zip(&self.shape) {
            if s.iter().any(|&v| v >= size) {
                return Err(Error::InvalidArgument("symbol outside its alphabet".into()));
            }
        }
        Ok(self.run(n, |k, j| seqs[k][j]))
    }

    /// Caller guarantees equal lengths and in-range symbols.
    pub fn check(&self, seqs: &[&[u8]]) -> bool {
        let n = seqs[0].len();
        debug_assert!(seqs.iter().all(|s| s.len() == n));
        self.run(n, |k, j| seqs[k][j] as usize)
    }

    fn run(&self, n: usize, sym: impl Fn(usize, usize) -> usize) -> bool {
        match self.kind {
            Typicality::Robust => {
                let mut counts = vec![0u32; self.mass.len()];
                for j in 0..n {
                    let idx: usize = (0..self.rank()).map(|k| sym(k, j) * self.strides[k]).sum();
                    if self.mass[idx] <= 0.0 {
                        return false;
                    }
                    counts[idx] += 1;
                }
                let nf = n as f64;
                counts.iter().zip(&self.mass).all(|(&c, &p)| (c as f64 / nf - p).abs() <= self.eps * p)
            }
            Typicality::Entropy => {
                let nf = n as f64;
                self.marginals.iter().all(|m| {
                    let mut total = 0.0;
                    for j in 0..n {
                        let idx: usize = m.comps.iter().zip(&m.strides).map(|(&k, &s)| sym(k, j) * s).sum();
                        let lp = m.log_p[idx];
                        if lp == f64::NEG_INFINITY {
                            return false;
                        }
                        total += lp;
                    }
                    (-total / nf - m.entropy).abs() <= self.eps
                })
            }
        }
    }
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}
