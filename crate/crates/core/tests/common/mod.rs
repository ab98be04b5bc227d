#![allow(dead_code)]

use std::collections::BTreeMap;

use bcsi::probability::{Alphabet, AuxScheme, Channel, JointPmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the simplex, with a chance of exact zeros.
pub fn simplex(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..n).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    if n > 1 && r.random::<f64>() < 0.2 {
        let k = r.random_range(0..n);
        e[k] = 0.0;
    }
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

pub fn random_channel(r: &mut ChaCha8Rng, nx: usize, m1: usize, m2: usize) -> Channel {
    let rows = (0..nx).map(|_| simplex(r, m1 * m2)).collect();
    Channel::from_rows(nx, m1, m2, rows).unwrap()
}

pub fn random_deterministic(r: &mut ChaCha8Rng, nx: usize, m1: usize, m2: usize) -> Channel {
    let phi1: Vec<usize> = (0..nx).map(|_| r.random_range(0..m1)).collect();
    let phi2: Vec<usize> = (0..nx).map(|_| r.random_range(0..m2)).collect();
    Channel::deterministic(m1, m2, &phi1, &phi2).unwrap()
}

pub fn random_scheme(r: &mut ChaCha8Rng, sizes: [usize; 3], nx: usize) -> AuxScheme {
    let cells: usize = sizes.iter().product();
    let axes = ["U0", "U1", "U2"].iter().zip(sizes).map(|(n, s)| Alphabet::indexed(*n, s)).collect();
    let joint = JointPmf::new(axes, simplex(r, cells)).unwrap();
    let gamma = (0..cells).map(|_| r.random_range(0..nx)).collect();
    AuxScheme::new(joint, gamma, nx).unwrap()
}

pub fn random_ux(r: &mut ChaCha8Rng, nu: usize, nx: usize) -> JointPmf {
    JointPmf::new(vec![Alphabet::indexed("U", nu), Alphabet::indexed("X", nx)], simplex(r, nu * nx)).unwrap()
}

/// Tuple-keyed joint built by explicit loops, independent of the
/// library's joint machinery.
pub struct Table(pub Vec<(Vec<usize>, f64)>);

impl Table {
    /// `(u0, u1, u2, x, y1, y2)` for a scheme and channel.
    pub fn induced(s: &AuxScheme, ch: &Channel) -> Self {
        let [n0, n1, n2] = s.u_sizes();
        let mut out = Vec::new();
        for a in 0..n0 {
            for b in 0..n1 {
                for c in 0..n2 {
                    let p = *s.aux_joint().get(&[a, b, c]);
                    let x = s.gamma_at(a, b, c);
                    for y1 in 0..ch.y1_size() {
                        for y2 in 0..ch.y2_size() {
                            let q = p * ch.prob(x, y1, y2);
                            if q > 0.0 {
                                out.push((vec![a, b, c, x, y1, y2], q));
                            }
                        }
                    }
                }
            }
        }
        Table(out)
    }

    /// `(u, x, y1, y2)` for `p(u, x)` and a channel.
    pub fn ux(p: &JointPmf, ch: &Channel) -> Self {
        let mut out = Vec::new();
        for u in 0..p.shape()[0] {
            for x in 0..ch.x_size() {
                for y1 in 0..ch.y1_size() {
                    for y2 in 0..ch.y2_size() {
                        let q = p.get(&[u, x]) * ch.prob(x, y1, y2);
                        if q > 0.0 {
                            out.push((vec![u, x, y1, y2], q));
                        }
                    }
                }
            }
        }
        Table(out)
    }

    pub fn h(&self, axes: &[usize]) -> f64 {
        let mut m: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (k, p) in &self.0 {
            *m.entry(axes.iter().map(|&a| k[a]).collect()).or_insert(0.0) += p;
        }
        m.values().filter(|&&p| p > 0.0).map(|p| -p * p.log2()).sum()
    }

    /// `I(A; B | C)` from four joint entropies.
    pub fn cmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let cat = |x: &[usize], y: &[usize]| [x, y].concat();
        self.h(&cat(a, c)) + self.h(&cat(b, c)) - self.h(&cat(&cat(a, b), c)) - self.h(c)
    }
}

pub fn scratch_dir() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

pub fn write(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub const NOISELESS: &str = r#"{"x_size":2,"y1_size":2,"y2_size":2,"kernel":[["1","0","0","0"],["0","0","0","1"]]}"#;
pub const BLACKWELL: &str = r#"{"x_size":3,"y1_size":2,"y2_size":2,"kernel":[[1,0,0,0],[0,1,0,0],[0,0,0,1]]}"#;
pub const UNIFORM_X: &str = r#"{"u_sizes":[2,1,1],"joint":["1/2","1/2"],"gamma":[0,1]}"#;
