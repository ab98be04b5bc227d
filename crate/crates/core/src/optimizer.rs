//! Search over auxiliary distributions for the support function of the
//! union regions, and 2-D slices of those unions.
//!
//! Candidates come from a ladder of simplex lattices (every resolution
//! from 2 up to the configured one) plus seeded random starts; the best
//! lattice point of each level and each random start is refined locally.
//! Because a finer or longer search only adds candidates, the reported
//! optimum never decreases with resolution or restarts.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::entropy_bits;
use crate::lattice::{lattice_size, refine_pairwise, MAX_LATTICE_POINTS};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polytope::{RateRegion, DEFAULT_RATE_CAP, RATE_VARS};
use crate::probability::{Alphabet, AuxScheme, Channel, JointPmf};
use crate::rate_regions::{
    deterministic_region, more_capable_region, specialize_scheme, theorem1_region, SchemeKind, DETERMINISTIC_TOL,
    THEOREM1_ROWS, THEOREM3_ROWS,
};

/// Exhaustive gamma search when at most this many maps exist on the
/// support of `p(u0, u1, u2)`.
pub const GAMMA_EXHAUSTIVE_LIMIT: usize = 4096;

/// Default number of sweep directions for slices.
pub const DEFAULT_DIRECTIONS: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Inner bound over `p(u0, u1, u2)` and `x = gamma(u0, u1, u2)`.
    T1,
    /// Deterministic channels, over `p(u, x)`.
    T2,
    /// More-capable region, over `p(u, x)`.
    T3,
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" | "theorem1" => Ok(Self::T1),
            "t2" | "theorem2" => Ok(Self::T2),
            "t3" | "theorem3" => Ok(Self::T3),
            other => Err(Error::InvalidArgument(format!("unknown theorem {other}; expected t1, t2 or t3"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Caps on `|U0|, |U1|, |U2|`; only the first entry (`|U|`) is used
    /// for the `p(u, x)` theorems.
    pub aux_sizes: [usize; 3],
    pub grid_resolution: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Refinement sweeps per start.
    pub max_iters: usize,
}

impl SearchConfig {
    /// `|U0|, |U| <= |X| + 1` and `|U1|, |U2| <= |X|`.
    pub fn for_channel(ch: &Channel, theorem: Theorem) -> Self {
        let nx = ch.x_size();
        let (aux_sizes, grid_resolution) = match theorem {
            Theorem::T1 => ([nx + 1, nx, nx], 4),
            Theorem::T2 | Theorem::T3 => ([nx + 1, 1, 1], 6),
        };
        Self { aux_sizes, grid_resolution, restarts: 4, seed: 0, max_iters: 12 }
    }

    fn validate(&self) -> Result<()> {
        if self.aux_sizes.contains(&0) {
            return Err(Error::InvalidArgument("auxiliary sizes must be at least 1".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("restarts and max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Weighted-sum objective with optional pinned rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub weights: [f64; 5],
    pub fixed: [Option<f64>; 5],
}

impl Target {
    pub fn weighted(weights: [f64; 5]) -> Self {
        Self { weights, fixed: [None; 5] }
    }

    fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        if self.weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidArgument("weights are all zero".into()));
        }
        if self.fixed.iter().flatten().any(|v| !(*v >= 0.0 && *v <= DEFAULT_RATE_CAP)) {
            return Err(Error::InvalidArgument("fixed rates must lie in [0, 64]".into()));
        }
        Ok(())
    }
}

/// `max w . R` over the polytope `rows . R <= rhs` in the rate box.
/// `None` when empty.
pub fn support(rows: &[[i64; 5]], rhs: &[f64], target: &Target) -> Option<(f64, [f64; 5])> {
    let mut lp = LinearProgram::new(5).maximize(target.weights.to_vec());
    for k in 0..5 {
        match target.fixed[k] {
            Some(v) => lp.bound(k, v, v),
            None => lp.bound(k, 0.0, DEFAULT_RATE_CAP),
        };
    }
    for (row, &r) in rows.iter().zip(rhs) {
        lp.constrain(row.iter().map(|&c| c as f64).collect(), crate::lp::Cmp::Le, r);
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => Some((value, [x[0], x[1], x[2], x[3], x[4]])),
        _ => None,
    }
}

/// The scheme an optimum was found at.
#[derive(Debug, Clone, PartialEq)]
pub enum FoundScheme {
    Aux(AuxScheme),
    Ux(JointPmf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub theorem: Theorem,
    pub scheme: FoundScheme,
    /// Support value recomputed from the scheme through the region API.
    pub value: f64,
    /// A maximizing rate tuple.
    pub point: [f64; 5],
    pub evaluations: usize,
}

impl Optimum {
    /// Short stable identifier of the scheme.
    pub fn scheme_id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |b: u64| {
            for byte in b.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        };
        match &self.scheme {
            FoundScheme::Aux(s) => {
                s.aux_joint().shape().iter().for_each(|&d| eat(d as u64));
                s.aux_joint().mass().iter().for_each(|p| eat(p.to_bits()));
                s.gamma().iter().for_each(|&g| eat(g as u64));
            }
            FoundScheme::Ux(j) => {
                j.shape().iter().for_each(|&d| eat(d as u64));
                j.mass().iter().for_each(|p| eat(p.to_bits()));
            }
        }
        format!("{h:016x}")
    }

    /// The auxiliary scheme realizing the optimum in the inner bound.
    pub fn aux_scheme(&self, ch: &Channel) -> Result<AuxScheme> {
        match (&self.scheme, self.theorem) {
            (FoundScheme::Aux(s), _) => Ok(s.clone()),
            (FoundScheme::Ux(j), Theorem::T2) => specialize_scheme(SchemeKind::Deterministic, j, ch),
            (FoundScheme::Ux(j), _) => specialize_scheme(SchemeKind::MoreCapable, j, ch),
        }
    }
}

/// Region of `theorem` at a found scheme, built through the public API.
pub fn region_of(theorem: Theorem, scheme: &FoundScheme, ch: &Channel) -> Result<RateRegion> {
    match (theorem, scheme) {
        (Theorem::T1, FoundScheme::Aux(s)) => theorem1_region(s, ch),
        (Theorem::T2, FoundScheme::Ux(j)) => deterministic_region(j, ch),
        (Theorem::T3, FoundScheme::Ux(j)) => more_capable_region(j, ch),
        _ => Err(Error::InvalidArgument("scheme shape does not match the theorem".into())),
    }
}

/// Fast right-hand sides used during search.
struct Evaluator<'a> {
    theorem: Theorem,
    ch: &'a Channel,
    k1: Vec<Vec<f64>>,
    k2: Vec<Vec<f64>>,
    maps: Option<(Vec<usize>, Vec<usize>)>,
    sizes: [usize; 3],
    target: Target,
}

fn h(m: &[f64]) -> f64 {
    entropy_bits(m)
}

impl<'a> Evaluator<'a> {
    fn rows(&self) -> &'static [[i64; 5]] {
        match self.theorem {
            Theorem::T3 => &THEOREM3_ROWS,
            _ => &THEOREM1_ROWS,
        }
    }

    fn dim(&self) -> usize {
        match self.theorem {
            Theorem::T1 => self.sizes.iter().product(),
            _ => self.sizes[0] * self.ch.x_size(),
        }
    }

    fn rhs(&self, p: &[f64], gamma: &[usize]) -> Vec<f64> {
        match self.theorem {
            Theorem::T1 => self.rhs_t1(p, gamma),
            Theorem::T2 => self.rhs_t2(p),
            Theorem::T3 => self.rhs_t3(p),
        }
    }

    fn value(&self, p: &[f64], gamma: &[usize]) -> f64 {
        support(self.rows(), &self.rhs(p, gamma), &self.target).map_or(f64::NEG_INFINITY, |s| s.0)
    }

    fn rhs_t1(&self, p: &[f64], gamma: &[usize]) -> Vec<f64> {
        let [n0, n1, n2] = self.sizes;
        let (m1, m2) = (self.ch.y1_size(), self.ch.y2_size());
        let mut p0 = vec![0.0; n0];
        let mut p01 = vec![0.0; n0 * n1];
        let mut p02 = vec![0.0; n0 * n2];
        let mut p01y = vec![0.0; n0 * n1 * m1];
        let mut p02y = vec![0.0; n0 * n2 * m2];
        for a in 0..n0 {
            for b in 0..n1 {
                for c in 0..n2 {
                    let i = (a * n1 + b) * n2 + c;
                    let q = p[i];
                    if q <= 0.0 {
                        continue;
                    }
                    p0[a] += q;
                    p01[a * n1 + b] += q;
                    p02[a * n2 + c] += q;
                    let x = gamma[i];
                    for (y, w) in self.k1[x].iter().enumerate() {
                        p01y[(a * n1 + b) * m1 + y] += q * w;
                    }
                    for (y, w) in self.k2[x].iter().enumerate() {
                        p02y[(a * n2 + c) * m2 + y] += q * w;
                    }
                }
            }
        }
        let collapse = |src: &[f64], inner: usize, m: usize| -> (Vec<f64>, Vec<f64>) {
            let outer = src.len() / (inner * m);
            let mut p0y = vec![0.0; outer * m];
            let mut py = vec![0.0; m];
            for (i, v) in src.iter().enumerate() {
                let y = i % m;
                let a = i / (inner * m);
                p0y[a * m + y] += v;
                py[y] += v;
            }
            (p0y, py)
        };
        let (p0y1, py1) = collapse(&p01y, n1, m1);
        let (p0y2, py2) = collapse(&p02y, n2, m2);
        let (h0, h01, h02, h012) = (h(&p0), h(&p01), h(&p02), h(p));
        let a = (h(&py1) + h01 - h(&p01y)).max(0.0);
        let b = (h(&py2) + h02 - h(&p02y)).max(0.0);
        let c = ((h(&p0y1) - h0) - (h(&p01y) - h01)).max(0.0);
        let d = ((h(&p0y2) - h0) - (h(&p02y) - h02)).max(0.0);
        let e = (h01 + h02 - h012 - h0).max(0.0);
        vec![a, b, a + d - e, b + c - e, a + b - e]
    }

    fn rhs_t2(&self, p: &[f64]) -> Vec<f64> {
        let (phi1, phi2) = self.maps.as_ref().expect("checked deterministic");
        let (nx, m1, m2) = (self.ch.x_size(), self.ch.y1_size(), self.ch.y2_size());
        let nu = p.len() / nx;
        let mut puy = vec![0.0; nu * m1 * m2];
        for u in 0..nu {
            for x in 0..nx {
                puy[(u * m1 + phi1[x]) * m2 + phi2[x]] += p[u * nx + x];
            }
        }
        let mut pu = vec![0.0; nu];
        let mut pu1 = vec![0.0; nu * m1];
        let mut pu2 = vec![0.0; nu * m2];
        let mut py1 = vec![0.0; m1];
        let mut py2 = vec![0.0; m2];
        for (i, &q) in puy.iter().enumerate() {
            let (u, y1, y2) = (i / (m1 * m2), i / m2 % m1, i % m2);
            pu[u] += q;
            pu1[u * m1 + y1] += q;
            pu2[u * m2 + y2] += q;
            py1[y1] += q;
            py2[y2] += q;
        }
        let (h1, h2, hu, hu1, hu2, huy) = (h(&py1), h(&py2), h(&pu), h(&pu1), h(&pu2), h(&puy));
        let h2_u1 = (huy - hu1).max(0.0);
        let h1_u2 = (huy - hu2).max(0.0);
        let i_u1 = (hu + h1 - hu1).max(0.0);
        vec![h1, h2, h1 + h2_u1, h2 + h1_u2, i_u1 + h2 + h1_u2]
    }

    fn rhs_t3(&self, p: &[f64]) -> Vec<f64> {
        let (nx, m1, m2) = (self.ch.x_size(), self.ch.y1_size(), self.ch.y2_size());
        let nu = p.len() / nx;
        let mut pu = vec![0.0; nu];
        let mut px = vec![0.0; nx];
        let mut pu1 = vec![0.0; nu * m1];
        let mut pu2 = vec![0.0; nu * m2];
        let mut py1 = vec![0.0; m1];
        let mut py2 = vec![0.0; m2];
        for u in 0..nu {
            for x in 0..nx {
                let q = p[u * nx + x];
                if q <= 0.0 {
                    continue;
                }
                pu[u] += q;
                px[x] += q;
                for (y, w) in self.k1[x].iter().enumerate() {
                    pu1[u * m1 + y] += q * w;
                    py1[y] += q * w;
                }
                for (y, w) in self.k2[x].iter().enumerate() {
                    pu2[u * m2 + y] += q * w;
                    py2[y] += q * w;
                }
            }
        }
        let h1_x: f64 = px.iter().zip(&self.k1).map(|(q, row)| q * h(row)).sum();
        let hu = h(&pu);
        let i_u_y2 = (hu + h(&py2) - h(&pu2)).max(0.0);
        let i_x_y1_u = (h(&pu1) - hu - h1_x).max(0.0);
        let i_x_y1 = (h(&py1) - h1_x).max(0.0);
        vec![i_u_y2, i_u_y2 + i_x_y1_u, i_x_y1]
    }
}

/// A candidate during search: masses, gamma (empty for `p(u, x)`), value.
#[derive(Debug, Clone)]
struct Cand {
    p: Vec<f64>,
    gamma: Vec<usize>,
    value: f64,
}

/// Higher value wins; ties go to the lexicographically smaller encoding.
fn better(a: &Cand, b: &Cand) -> bool {
    if a.value != b.value {
        return a.value > b.value;
    }
    let ka = a.p.iter().map(|v| v.to_bits()).chain(a.gamma.iter().map(|&g| g as u64));
    let kb = b.p.iter().map(|v| v.to_bits()).chain(b.gamma.iter().map(|&g| g as u64));
    ka.lt(kb)
}

fn best_of(cands: impl IntoIterator<Item = Cand>) -> Option<Cand> {
    cands.into_iter().fold(None, |acc, c| match acc {
        Some(a) if !better(&c, &a) => Some(a),
        _ => Some(c),
    })
}

/// Lattice points of `p(u, x)` at one resolution with rows in
/// nonincreasing lexicographic order, one per relabeling class of `U`.
pub fn canonical_ux_lattice(nu: usize, nx: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    let full = lattice_size(nu * nx, resolution).unwrap_or(usize::MAX);
    if full / (1..=nu).product::<usize>().max(1) > MAX_LATTICE_POINTS {
        return Err(Error::Guard(format!("p(u,x) lattice at resolution {resolution} is too large")));
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; nu * nx];
    fn rec(c: &mut Vec<usize>, cell: usize, left: usize, tight: bool, nx: usize, r: usize, out: &mut Vec<Vec<f64>>) {
        let (u, x) = (cell / nx, cell % nx);
        let cap = if u > 0 && tight { c[cell - nx].min(left) } else { left };
        if cell + 1 == c.len() {
            if left <= cap {
                c[cell] = left;
                out.push(c.iter().map(|&k| k as f64 / r as f64).collect());
            }
            return;
        }
        for k in (0..=cap).rev() {
            c[cell] = k;
            let still = u > 0 && tight && k == c[cell - nx];
            let next_tight = if x + 1 == nx { true } else { still || u == 0 };
            rec(c, cell + 1, left - k, next_tight, nx, r, out);
        }
    }
    rec(&mut counts, 0, resolution, true, nx, resolution, &mut out);
    Ok(out)
}

/// Plain lattice over `dim` coordinates (no symmetry reduction).
fn plain_lattice(dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    crate::lattice::simplex_lattice(dim, resolution)
}

fn structured_gammas(sizes: [usize; 3], nx: usize) -> Vec<Vec<usize>> {
    let [n0, n1, n2] = sizes;
    let map = |f: &dyn Fn(usize, usize, usize) -> usize| -> Vec<usize> {
        (0..n0)
            .flat_map(|a| (0..n1).flat_map(move |b| (0..n2).map(move |c| (a, b, c))))
            .map(|(a, b, c)| f(a, b, c) % nx)
            .collect()
    };
    let mut out: Vec<Vec<usize>> =
        vec![map(&|a, _, _| a), map(&|_, b, _| b), map(&|_, _, c| c), map(&|_, b, c| b + c), map(&|a, b, c| a + b + c)];
    let mut seen = std::collections::HashSet::new();
    out.retain(|g| seen.insert(g.clone()));
    out
}

fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Improves `gamma` for fixed masses, exhaustively over the support when
/// small and cell by cell otherwise.
fn improve_gamma(ev: &Evaluator, p: &[f64], gamma: &mut Vec<usize>, value: &mut f64) {
    let nx = ev.ch.x_size();
    let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let exhaustive = (nx as f64).powi(support.len() as i32) <= GAMMA_EXHAUSTIVE_LIMIT as f64;
    if exhaustive {
        let total = nx.pow(support.len() as u32);
        let mut g = gamma.clone();
        for code in 0..total {
            let mut c = code;
            for &i in &support {
                g[i] = c % nx;
                c /= nx;
            }
            let v = ev.value(p, &g);
            if v > *value + 1e-15 {
                *value = v;
                *gamma = g.clone();
            }
        }
    } else {
        for &i in &support {
            for x in 0..nx {
                if x == gamma[i] {
                    continue;
                }
                let mut g = gamma.clone();
                g[i] = x;
                let v = ev.value(p, &g);
                if v > *value + 1e-15 {
                    *value = v;
                    *gamma = g;
                }
            }
        }
    }
}

fn refine(ev: &Evaluator, mut c: Cand, iters: usize) -> Cand {
    for _ in 0..iters {
        let before = c.value;
        let g = c.gamma.clone();
        c.value = refine_pairwise(&mut c.p, &mut |q| ev.value(q, &g), 1).max(c.value);
        if ev.theorem == Theorem::T1 {
            improve_gamma(ev, &c.p, &mut c.gamma, &mut c.value);
        }
        if c.value - before <= 1e-12 {
            break;
        }
    }
    c
}

fn evaluator<'a>(ch: &'a Channel, theorem: Theorem, cfg: &SearchConfig, target: Target) -> Result<Evaluator<'a>> {
    let maps = ch.deterministic_maps(DETERMINISTIC_TOL);
    if theorem == Theorem::T2 && maps.is_none() {
        return Err(Error::InvalidArgument("theorem t2 needs a deterministic channel".into()));
    }
    let sizes = match theorem {
        Theorem::T1 => cfg.aux_sizes,
        _ => [cfg.aux_sizes[0], 1, 1],
    };
    Ok(Evaluator { theorem, ch, k1: ch.y1_kernel(), k2: ch.y2_kernel(), maps, sizes, target })
}

fn found_scheme(ev: &Evaluator, c: &Cand) -> Result<FoundScheme> {
    let nx = ev.ch.x_size();
    match ev.theorem {
        Theorem::T1 => {
            let axes = ["U0", "U1", "U2"].iter().zip(ev.sizes).map(|(n, s)| Alphabet::indexed(*n, s)).collect();
            Ok(FoundScheme::Aux(AuxScheme::new(JointPmf::new(axes, c.p.clone())?, c.gamma.clone(), nx)?))
        }
        _ => {
            let axes = vec![Alphabet::indexed("U", ev.sizes[0]), Alphabet::indexed("X", nx)];
            Ok(FoundScheme::Ux(JointPmf::new(axes, c.p.clone())?))
        }
    }
}

/// Best value of `target` over the union region of `theorem`, searched
/// per `cfg`.
pub fn maximize_target(ch: &Channel, target: &Target, theorem: Theorem, cfg: &SearchConfig) -> Result<Optimum> {
    cfg.validate()?;
    target.validate()?;
    let ev = evaluator(ch, theorem, cfg, *target)?;
    let dim = ev.dim();
    let nx = ch.x_size();
    let gammas = if theorem == Theorem::T1 { structured_gammas(ev.sizes, nx) } else { vec![Vec::new()] };

    // One best lattice point per (gamma, level).
    let mut starts: Vec<Cand> = Vec::new();
    let mut evaluations = 0usize;
    for g in &gammas {
        for k in 2..=cfg.grid_resolution {
            let lattice = match theorem {
                Theorem::T1 => plain_lattice(dim, k)?,
                _ => canonical_ux_lattice(ev.sizes[0], nx, k)?,
            };
            evaluations += lattice.len();
            let scored: Vec<Cand> = lattice
                .into_par_iter()
                .map(|p| {
                    let value = ev.value(&p, g);
                    Cand { p, gamma: g.clone(), value }
                })
                .collect();
            if let Some(b) = best_of(scored) {
                starts.push(b);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 1..cfg.restarts {
        let p = random_simplex(&mut rng, dim);
        let gamma =
            if theorem == Theorem::T1 { (0..dim).map(|_| rng.random_range(0..nx)).collect() } else { Vec::new() };
        let value = ev.value(&p, &gamma);
        starts.push(Cand { p, gamma, value });
    }
    let refined: Vec<Cand> = starts.into_par_iter().map(|c| refine(&ev, c, cfg.max_iters)).collect();
    let best = best_of(refined).ok_or_else(|| Error::Internal("no candidates searched".into()))?;
    if best.value == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument("no searched scheme admits the fixed rates".into()));
    }
    let scheme = found_scheme(&ev, &best)?;
    let region = region_of(theorem, &scheme, ch)?;
    let (value, point) = match region.support(&target.weights, &target.fixed)? {
        LpOutcome::Optimal { value, x } => (value, [x[0], x[1], x[2], x[3], x[4]]),
        other => return Err(Error::Internal(format!("best scheme's region LP returned {other:?}"))),
    };
    if (value - best.value).abs() > 1e-7 {
        return Err(Error::Internal(format!("search value {} disagrees with region value {value}", best.value)));
    }
    Ok(Optimum { theorem, scheme, value, point, evaluations })
}

pub fn maximize_weighted_rate(
    ch: &Channel,
    weights: [f64; 5],
    theorem: Theorem,
    cfg: &SearchConfig,
) -> Result<Optimum> {
    maximize_target(ch, &Target::weighted(weights), theorem, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicePoint {
    pub angle: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub scheme_id: String,
}

pub fn rate_index(name: &str) -> Result<usize> {
    RATE_VARS
        .iter()
        .position(|v| v.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown rate {name}; expected R1..R5")))
}

/// Boundary of the union region in the plane of rates `free`, with the
/// other three pinned. One supported point per direction, sorted by
/// angle in `[0, pi/2]`.
pub fn union_slice_2d(
    ch: &Channel,
    free: (usize, usize),
    fixed: [Option<f64>; 5],
    theorem: Theorem,
    cfg: &SearchConfig,
    directions: usize,
) -> Result<(Vec<SlicePoint>, Vec<Optimum>)> {
    let (a, b) = free;
    if a == b || a > 4 || b > 4 {
        return Err(Error::InvalidArgument("free rates must be two distinct rates".into()));
    }
    if fixed[a].is_some() || fixed[b].is_some() {
        return Err(Error::InvalidArgument("a free rate cannot also be fixed".into()));
    }
    let mut pinned = fixed;
    for (k, v) in pinned.iter_mut().enumerate() {
        if k != a && k != b && v.is_none() {
            *v = Some(0.0);
        }
    }
    let directions = directions.max(2);
    let mut points = Vec::with_capacity(directions);
    let mut optima = Vec::with_capacity(directions);
    for i in 0..directions {
        let angle = std::f64::consts::FRAC_PI_2 * i as f64 / (directions - 1) as f64;
        let mut weights = [0.0; 5];
        weights[a] = angle.cos().max(0.0);
        weights[b] = angle.sin().max(0.0);
        let opt = maximize_target(ch, &Target { weights, fixed: pinned }, theorem, cfg)?;
        points.push(SlicePoint {
            angle,
            r_a: opt.point[a].max(0.0),
            r_b: opt.point[b].max(0.0),
            scheme_id: opt.scheme_id(),
        });
        optima.push(opt);
    }
    Ok((points, optima))
}

/// `angle,R_a,R_b,scheme_id` rows with the rate names in the header.
pub fn slice_csv(points: &[SlicePoint], names: (&str, &str)) -> String {
    let mut out = format!("angle,{},{},scheme_id\n", names.0, names.1);
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::io::fmt_float(p.angle),
            crate::io::fmt_float(p.r_a),
            crate::io::fmt_float(p.r_b),
            p.scheme_id
        ));
    }
    out
}
