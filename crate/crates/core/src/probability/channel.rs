use super::{Alphabet, JointPmf, Prob};
use crate::error::{Error, Result};

/// Memoryless two-receiver broadcast channel `p(y1, y2 | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<P = f64> {
    input: Alphabet,
    y1: Alphabet,
    y2: Alphabet,
    rows: Vec<JointPmf<P>>,
}

impl<P: Prob> Channel<P> {
    /// `rows[x]` is the joint law of `(Y1, Y2)` given input `x`.
    pub fn new(input: Alphabet, y1: Alphabet, y2: Alphabet, rows: Vec<JointPmf<P>>) -> Result<Self> {
        if rows.len() != input.size() {
            return Err(Error::AlphabetMismatch(format!(
                "{} kernel rows for an input alphabet of size {}",
                rows.len(),
                input.size()
            )));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.shape() != [y1.size(), y2.size()] {
                return Err(Error::AlphabetMismatch(format!(
                    "kernel row {x} has shape {:?}, expected [{}, {}]",
                    row.shape(),
                    y1.size(),
                    y2.size()
                )));
            }
        }
        Ok(Self { input, y1, y2, rows })
    }

    /// Builds from flat row-major `m1 x m2` rows, one per input symbol.
    pub fn from_rows(x_size: usize, y1_size: usize, y2_size: usize, flat_rows: Vec<Vec<P>>) -> Result<Self> {
        let (x, y1, y2) =
            (Alphabet::indexed("X", x_size), Alphabet::indexed("Y1", y1_size), Alphabet::indexed("Y2", y2_size));
        let rows = flat_rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                JointPmf::new(vec![y1.clone(), y2.clone()], r)
                    .map_err(|e| Error::malformed(format!("kernel row {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(x, y1, y2, rows)
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn y1(&self) -> &Alphabet {
        &self.y1
    }

    pub fn y2(&self) -> &Alphabet {
        &self.y2
    }

    pub fn x_size(&self) -> usize {
        self.input.size()
    }

    pub fn y1_size(&self) -> usize {
        self.y1.size()
    }

    pub fn y2_size(&self) -> usize {
        self.y2.size()
    }

    pub fn row(&self, x: usize) -> &JointPmf<P> {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[JointPmf<P>] {
        &self.rows
    }

    pub fn prob(&self, x: usize, y1: usize, y2: usize) -> &P {
        self.rows[x].get(&[y1, y2])
    }

    pub fn to_f64(&self) -> Channel<f64> {
        Channel {
            input: self.input.clone(),
            y1: self.y1.clone(),
            y2: self.y2.clone(),
            rows: self.rows.iter().map(JointPmf::to_f64).collect(),
        }
    }

    /// The same channel with the receivers' roles exchanged.
    pub fn swapped(&self) -> Self {
        let rows = self.rows.iter().map(|r| r.marginalize(&[1, 0]).expect("rank-2 row")).collect();
        Self { input: self.input.clone(), y1: self.y2.renamed("Y1"), y2: self.y1.renamed("Y2"), rows }
    }
}

impl Channel<f64> {
    /// `p(y1 | x)` as `[x][y1]`.
    pub fn y1_kernel(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.marginalize(&[0]).expect("rank-2 row").mass().to_vec()).collect()
    }

    /// `p(y2 | x)` as `[x][y2]`.
    pub fn y2_kernel(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.marginalize(&[1]).expect("rank-2 row").mass().to_vec()).collect()
    }

    /// Outputs conditionally independent given the input:
    /// `p(y1, y2 | x) = k1[x][y1] * k2[x][y2]`.
    pub fn independent(k1: &[Vec<f64>], k2: &[Vec<f64>]) -> Result<Self> {
        if k1.len() != k2.len() || k1.is_empty() {
            return Err(Error::AlphabetMismatch("marginal kernels disagree on the input alphabet".into()));
        }
        let (m1, m2) = (k1[0].len(), k2[0].len());
        let rows = k1
            .iter()
            .zip(k2)
            .map(|(a, b)| {
                if a.len() != m1 || b.len() != m2 {
                    return Err(Error::AlphabetMismatch("ragged marginal kernel".into()));
                }
                Ok(a.iter().flat_map(|p| b.iter().map(move |q| p * q)).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::from_rows(k1.len(), m1, m2, rows)
    }

    /// `Y1 = phi1(X)`, `Y2 = phi2(X)`.
    pub fn deterministic(y1_size: usize, y2_size: usize, phi1: &[usize], phi2: &[usize]) -> Result<Self> {
        if phi1.len() != phi2.len() || phi1.is_empty() {
            return Err(Error::AlphabetMismatch("maps disagree on the input alphabet".into()));
        }
        let rows = phi1
            .iter()
            .zip(phi2)
            .map(|(&a, &b)| {
                if a >= y1_size || b >= y2_size {
                    return Err(Error::InvalidArgument(format!("map value ({a}, {b}) out of range")));
                }
                let mut row = vec![0.0; y1_size * y2_size];
                row[a * y2_size + b] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(phi1.len(), y1_size, y2_size, rows)
    }

    /// `(phi1, phi2)` when every kernel row is a point mass within `tol`.
    pub fn deterministic_maps(&self, tol: f64) -> Option<(Vec<usize>, Vec<usize>)> {
        let m2 = self.y2_size();
        let mut maps = (Vec::new(), Vec::new());
        for row in &self.rows {
            let (k, _) = row.mass().iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
            let rest: f64 = row.mass().iter().enumerate().filter(|&(i, _)| i != k).map(|(_, p)| p).sum();
            if rest > tol {
                return None;
            }
            maps.0.push(k / m2);
            maps.1.push(k % m2);
        }
        Some(maps)
    }

    /// Binary symmetric channel kernel with the given crossover.
    pub fn bsc_kernel(crossover: f64) -> Vec<Vec<f64>> {
        vec![vec![1.0 - crossover, crossover], vec![crossover, 1.0 - crossover]]
    }

    /// Both receivers see the input without noise.
    pub fn noiseless(x_size: usize) -> Self {
        let id: Vec<usize> = (0..x_size).collect();
        Self::deterministic(x_size, x_size, &id, &id).expect("identity maps are valid")
    }

    /// Ternary input, `Y1 = [x == 2]`, `Y2 = [x != 0]`.
    pub fn blackwell() -> Self {
        Self::deterministic(2, 2, &[0, 0, 1], &[0, 1, 1]).expect("valid maps")
    }
}
