//! Lattices on the probability simplex and local refinement by pairwise
//! mass transfer.

use crate::error::{Error, Result};

/// Refuse to enumerate lattices larger than this.
pub const MAX_LATTICE_POINTS: usize = 5_000_000;

const GOLDEN_STEPS: usize = 24;

/// Number of points `k / resolution` on the simplex in `dim` coordinates.
pub fn lattice_size(dim: usize, resolution: usize) -> Option<usize> {
    if dim == 0 {
        return Some(0);
    }
    // C(resolution + dim - 1, dim - 1), built incrementally to stay exact.
    let mut c: u128 = 1;
    for k in 1..dim as u128 {
        c = c.checked_mul(resolution as u128 + k)? / k;
    }
    usize::try_from(c).ok()
}

/// Every distribution on `dim` symbols whose masses are multiples of
/// `1 / resolution`, in a fixed order.
pub fn simplex_lattice(dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if dim == 0 || resolution == 0 {
        return Err(Error::InvalidArgument("lattice needs dim >= 1 and resolution >= 1".into()));
    }
    let size = lattice_size(dim, resolution).filter(|&s| s <= MAX_LATTICE_POINTS).ok_or_else(|| {
        Error::Guard(format!("simplex lattice with {dim} coordinates at resolution {resolution} is too large"))
    })?;
    let mut out = Vec::with_capacity(size);
    let mut counts = vec![0usize; dim];
    fill(&mut counts, 0, resolution, resolution, &mut out);
    Ok(out)
}

fn fill(counts: &mut Vec<usize>, pos: usize, left: usize, resolution: usize, out: &mut Vec<Vec<f64>>) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        out.push(counts.iter().map(|&c| c as f64 / resolution as f64).collect());
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        fill(counts, pos + 1, left - c, resolution, out);
    }
}

fn transfer(p: &[f64], i: usize, j: usize, t: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[i] = (q[i] - t).max(0.0);
    q[j] = (q[j] + t).max(0.0);
    q
}

/// Coordinate ascent over pairwise transfers `p[i] -= t, p[j] += t`, each
/// line searched by golden section with the endpoints also tried. Only
/// strict improvements are accepted, so the value never decreases.
/// Returns the final value.
pub fn refine_pairwise(p: &mut Vec<f64>, f: &mut impl FnMut(&[f64]) -> f64, max_sweeps: usize) -> f64 {
    let mut best = f(p);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..max_sweeps {
        let start = best;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                let (lo, hi) = (-p[j], p[i]);
                if hi - lo <= 1e-12 {
                    continue;
                }
                let mut cands = vec![lo, hi];
                let (mut a, mut b) = (lo, hi);
                let mut c = b - phi * (b - a);
                let mut d = a + phi * (b - a);
                let (mut fc, mut fd) = (f(&transfer(p, i, j, c)), f(&transfer(p, i, j, d)));
                for _ in 0..GOLDEN_STEPS {
                    if fc >= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - phi * (b - a);
                        fc = f(&transfer(p, i, j, c));
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + phi * (b - a);
                        fd = f(&transfer(p, i, j, d));
                    }
                }
                cands.push(if fc >= fd { c } else { d });
                let mut pick: Option<Vec<f64>> = None;
                for t in cands {
                    let q = transfer(p, i, j, t);
                    let v = f(&q);
                    if v > best + 1e-15 {
                        best = v;
                        pick = Some(q);
                    }
                }
                if let Some(q) = pick {
                    *p = q;
                }
            }
        }
        if best - start <= 1e-12 {
            break;
        }
    }
    best
}
