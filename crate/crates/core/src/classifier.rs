//! Channel class membership: deterministic, degraded, more capable, less
//! noisy.
//!
//! The first two are decided exactly. The last two quantify over all input
//! distributions and are checked on a simplex lattice followed by local
//! descent; a `true` there means no counterexample was found at the
//! recorded resolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{channel_mutual_information, mi_of_matrix};
use crate::lattice::{refine_pairwise, simplex_lattice};
use crate::lp::{Cmp, LinearProgram, LpOutcome};
use crate::probability::Channel;
use crate::rate_regions::DETERMINISTIC_TOL;

/// A grid counterexample must beat this margin.
pub const WITNESS_MARGIN: f64 = 1e-9;

/// Residual below which the degradedness LP counts as feasible.
pub const DEGRADED_TOL: f64 = 1e-9;

const DESCENT_STARTS: usize = 5;
const DESCENT_SWEEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Deterministic,
    Degraded,
    MoreCapable,
    LessNoisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    True,
    False,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `Y1 = phi1(X)`, `Y2 = phi2(X)`.
    Maps { phi1: Vec<usize>, phi2: Vec<usize> },
    /// A kernel row that is not a point mass.
    NoisyRow { row: usize },
    /// `W[y1][y2]` with `p(y2|x) = sum_y1 p(y1|x) W[y1][y2]` up to `residual`.
    Kernel { w: Vec<Vec<f64>>, residual: f64 },
    /// Input law with `I(X;Y1) - I(X;Y2) = gap`.
    Input { p_x: Vec<f64>, gap: f64 },
    /// Joint `p[u][x]` with `I(U;Y1) - I(U;Y2) = gap`.
    Joint { p_ux: Vec<Vec<f64>>, gap: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub property: Property,
    pub holds: Holds,
    pub witness: Option<Witness>,
    pub grid_resolution: Option<usize>,
}

/// 32 lattice subdivisions up to three coordinates, 16 for four, coarser
/// beyond so the lattice stays desk-sized.
pub fn default_resolution(coords: usize) -> usize {
    match coords {
        0..=3 => 32,
        4 => 16,
        5..=6 => 8,
        _ => 4,
    }
}

pub fn is_deterministic(ch: &Channel) -> ClassVerdict {
    let (holds, witness) = match ch.deterministic_maps(DETERMINISTIC_TOL) {
        Some((phi1, phi2)) => (Holds::True, Witness::Maps { phi1, phi2 }),
        None => {
            let row =
                (0..ch.x_size()).find(|&x| ch.row(x).mass().iter().all(|&p| p < 1.0 - DETERMINISTIC_TOL)).unwrap_or(0);
            (Holds::False, Witness::NoisyRow { row })
        }
    };
    ClassVerdict { property: Property::Deterministic, holds, witness: Some(witness), grid_resolution: None }
}

/// Solves `min sum |p(y2|x) - sum_y1 p(y1|x) W(y2|y1)|` over stochastic
/// `W`. Returns `(W, residual)`.
pub fn degrading_kernel(ch: &Channel) -> (Vec<Vec<f64>>, f64) {
    let (k1, k2) = (ch.y1_kernel(), ch.y2_kernel());
    let (nx, m1, m2) = (ch.x_size(), ch.y1_size(), ch.y2_size());
    let nw = m1 * m2;
    let nr = nx * m2;
    let mut lp = LinearProgram::new(nw + 2 * nr);
    let mut obj = vec![0.0; nw + 2 * nr];
    for v in &mut obj[nw..] {
        *v = -1.0;
    }
    lp.set_objective(&obj);
    for a in 0..m1 {
        let mut row = vec![0.0; nw + 2 * nr];
        for b in 0..m2 {
            row[a * m2 + b] = 1.0;
        }
        lp.constrain(row, Cmp::Eq, 1.0);
    }
    for x in 0..nx {
        for b in 0..m2 {
            let mut row = vec![0.0; nw + 2 * nr];
            for a in 0..m1 {
                row[a * m2 + b] = k1[x][a];
            }
            let r = x * m2 + b;
            row[nw + r] = 1.0;
            row[nw + nr + r] = -1.0;
            lp.constrain(row, Cmp::Eq, k2[x][b]);
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => {
            let w = (0..m1).map(|a| x[a * m2..(a + 1) * m2].to_vec()).collect();
            (w, (-value).max(0.0))
        }
        // Always feasible (any stochastic W with slack) and bounded below by 0.
        other => unreachable!("degradedness LP returned {other:?}"),
    }
}

pub fn is_degraded(ch: &Channel) -> ClassVerdict {
    let (w, residual) = degrading_kernel(ch);
    let holds = if residual <= DEGRADED_TOL { Holds::True } else { Holds::False };
    ClassVerdict {
        property: Property::Degraded,
        holds,
        witness: Some(Witness::Kernel { w, residual }),
        grid_resolution: None,
    }
}

/// `I(X;Y1) - I(X;Y2)` at input law `p_x`.
pub fn more_capable_gap(ch: &Channel, p_x: &[f64]) -> f64 {
    channel_mutual_information(p_x, &ch.y1_kernel()) - channel_mutual_information(p_x, &ch.y2_kernel())
}

/// `I(U;Y1) - I(U;Y2)` for the joint `p[u][x]`.
pub fn less_noisy_gap(ch: &Channel, p_ux: &[Vec<f64>]) -> f64 {
    let through = |k: &[Vec<f64>]| -> Vec<Vec<f64>> {
        p_ux.iter()
            .map(|row| (0..k[0].len()).map(|y| row.iter().zip(k).map(|(p, kr)| p * kr[y]).sum()).collect())
            .collect()
    };
    mi_of_matrix(&through(&ch.y1_kernel())) - mi_of_matrix(&through(&ch.y2_kernel()))
}

/// Lattice scan then descent from the worst points. Returns the smallest
/// gap found and where.
fn grid_minimum(dim: usize, resolution: usize, gap: impl Fn(&[f64]) -> f64 + Sync) -> Result<(Vec<f64>, f64)> {
    let lattice = simplex_lattice(dim, resolution)?;
    let mut scored: Vec<(f64, usize)> = lattice.par_iter().enumerate().map(|(i, p)| (gap(p), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let starts: Vec<usize> = scored.iter().take(DESCENT_STARTS).map(|s| s.1).collect();
    let refined: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|&i| {
            let mut p = lattice[i].clone();
            let v = -refine_pairwise(&mut p, &mut |q| -gap(q), DESCENT_SWEEPS);
            (p, v)
        })
        .collect();
    let best = refined.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("lattice is nonempty");
    let v = gap(&best.0);
    Ok((best.0, v))
}

pub fn is_more_capable_grid(ch: &Channel, resolution: usize) -> Result<ClassVerdict> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let (p_x, gap) = grid_minimum(ch.x_size(), resolution, |p| more_capable_gap(ch, p))?;
    let (holds, witness) =
        if gap < -WITNESS_MARGIN { (Holds::False, Some(Witness::Input { p_x, gap })) } else { (Holds::True, None) };
    Ok(ClassVerdict { property: Property::MoreCapable, holds, witness, grid_resolution: Some(resolution) })
}

pub fn is_less_noisy_grid(ch: &Channel, u_size: usize, resolution: usize) -> Result<ClassVerdict> {
    if u_size < 2 {
        return Err(Error::InvalidArgument("u_size must be at least 2".into()));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    let nx = ch.x_size();
    let shape = |p: &[f64]| -> Vec<Vec<f64>> { p.chunks(nx).map(<[f64]>::to_vec).collect() };
    let (p, gap) = grid_minimum(u_size * nx, resolution, |p| less_noisy_gap(ch, &shape(p)))?;
    let (holds, witness) = if gap < -WITNESS_MARGIN {
        (Holds::False, Some(Witness::Joint { p_ux: shape(&p), gap }))
    } else {
        (Holds::True, None)
    };
    Ok(ClassVerdict { property: Property::LessNoisy, holds, witness, grid_resolution: Some(resolution) })
}

/// All four verdicts with default resolutions and `|U| = 2` for the
/// less-noisy check.
pub fn classify_all(ch: &Channel) -> Result<Vec<ClassVerdict>> {
    let nx = ch.x_size();
    Ok(vec![
        is_deterministic(ch),
        is_degraded(ch),
        is_more_capable_grid(ch, default_resolution(nx))?,
        is_less_noisy_grid(ch, 2, default_resolution(2 * nx))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> Channel {
        Channel::independent(&Channel::bsc_kernel(a), &Channel::bsc_kernel(b)).unwrap()
    }

    #[test]
    fn deterministic_examples() {
        let v = is_deterministic(&Channel::blackwell());
        assert_eq!(v.holds, Holds::True);
        assert_eq!(v.witness, Some(Witness::Maps { phi1: vec![0, 0, 1], phi2: vec![0, 1, 1] }));
        let v = is_deterministic(&pair(0.1, 0.0));
        assert_eq!(v.holds, Holds::False);
        assert_eq!(v.witness, Some(Witness::NoisyRow { row: 0 }));
    }

    #[test]
    fn degraded_examples() {
        let dup = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.1)).unwrap();
        // Conditionally independent copies still have equal marginals.
        let v = is_degraded(&dup);
        assert_eq!(v.holds, Holds::True);

        let v = is_degraded(&pair(0.1, 0.2));
        assert_eq!(v.holds, Holds::True);
        let Some(Witness::Kernel { w, .. }) = v.witness else { panic!() };
        assert!((w[0][1] - 0.125).abs() < 1e-9 && (w[1][0] - 0.125).abs() < 1e-9);

        assert_eq!(is_degraded(&Channel::blackwell()).holds, Holds::False);
        assert_eq!(is_degraded(&pair(0.2, 0.1)).holds, Holds::False);
    }

    #[test]
    fn more_capable_examples() {
        let noiseless_y1 = Channel::independent(&Channel::bsc_kernel(0.0), &Channel::bsc_kernel(0.3)).unwrap();
        assert_eq!(is_more_capable_grid(&noiseless_y1, 8).unwrap().holds, Holds::True);
        assert_eq!(is_more_capable_grid(&pair(0.1, 0.2), 32).unwrap().holds, Holds::True);
        let v = is_more_capable_grid(&pair(0.2, 0.1), 32).unwrap();
        assert_eq!(v.holds, Holds::False);
        let Some(Witness::Input { p_x, gap }) = v.witness else { panic!() };
        assert!(gap < -WITNESS_MARGIN);
        assert!(more_capable_gap(&pair(0.2, 0.1), &p_x) < -WITNESS_MARGIN);
        assert_eq!(is_more_capable_grid(&pair(0.15, 0.15), 16).unwrap().holds, Holds::True);
    }

    #[test]
    fn less_noisy_examples() {
        assert_eq!(is_less_noisy_grid(&pair(0.1, 0.2), 2, 8).unwrap().holds, Holds::True);
        let constant_y2 = Channel::independent(&Channel::bsc_kernel(0.3), &[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(is_less_noisy_grid(&constant_y2, 2, 8).unwrap().holds, Holds::True);
        let v = is_less_noisy_grid(&pair(0.2, 0.1), 2, 8).unwrap();
        assert_eq!(v.holds, Holds::False);
        let Some(Witness::Joint { p_ux, .. }) = v.witness else { panic!() };
        assert!(less_noisy_gap(&pair(0.2, 0.1), &p_ux) < -WITNESS_MARGIN);
    }
}
