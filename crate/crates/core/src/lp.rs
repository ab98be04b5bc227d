//! Dense two-phase simplex for the small linear programs used throughout:
//! redundancy checks, region containment, support functions and the
//! degradedness feasibility test. Problems here have tens of variables and
//! rows, so a full tableau with Bland's rule is plenty.

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    /// Optimal value, `-inf` when infeasible and `+inf` when unbounded.
    pub fn value(&self) -> f64 {
        match self {
            LpOutcome::Optimal { value, .. } => *value,
            LpOutcome::Infeasible => f64::NEG_INFINITY,
            LpOutcome::Unbounded => f64::INFINITY,
        }
    }
}

/// `maximize c.x` subject to linear rows and per-variable bounds.
/// Lower bounds must be finite; upper bounds may be infinite.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// `n` variables, each in `[0, inf)`, zero objective.
    pub fn new(n: usize) -> Self {
        Self { objective: vec![0.0; n], rows: Vec::new(), lower: vec![0.0; n], upper: vec![f64::INFINITY; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.num_vars());
        self.objective = objective;
        self
    }

    pub fn set_objective(&mut self, objective: &[f64]) {
        assert_eq!(objective.len(), self.num_vars());
        self.objective.copy_from_slice(objective);
    }

    pub fn bound(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        assert!(lower.is_finite(), "lower bounds must be finite");
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push((coeffs, cmp, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars();
        if self.lower.iter().zip(&self.upper).any(|(l, u)| u < l) {
            return LpOutcome::Infeasible;
        }
        // Shift to y = x - lower >= 0; finite upper bounds become rows.
        let mut rows: Vec<(Vec<f64>, Cmp, f64)> = self
            .rows
            .iter()
            .map(|(a, cmp, b)| {
                let shift: f64 = a.iter().zip(&self.lower).map(|(ai, li)| ai * li).sum();
                (a.clone(), *cmp, b - shift)
            })
            .collect();
        for i in 0..n {
            if self.upper[i].is_finite() {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                rows.push((a, Cmp::Le, self.upper[i] - self.lower[i]));
            }
        }
        let offset: f64 = self.objective.iter().zip(&self.lower).map(|(c, l)| c * l).sum();
        match Tableau::build(n, rows).and_then(|mut t| t.optimize(&self.objective)) {
            Ok((value, y)) => {
                let x = y.iter().zip(&self.lower).map(|(yi, li)| yi + li).collect();
                LpOutcome::Optimal { value: value + offset, x }
            }
            Err(Stop::Infeasible) => LpOutcome::Infeasible,
            Err(Stop::Unbounded) => LpOutcome::Unbounded,
        }
    }
}

#[derive(Debug)]
enum Stop {
    Infeasible,
    Unbounded,
}

struct Tableau {
    n: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    artificial_from: usize,
}

impl Tableau {
    fn build(n: usize, rows: Vec<(Vec<f64>, Cmp, f64)>) -> Result<Self, Stop> {
        let m = rows.len();
        // Normalize to b >= 0.
        let rows: Vec<(Vec<f64>, Cmp, f64)> = rows
            .into_iter()
            .map(|(a, cmp, b)| {
                if b < 0.0 {
                    let flipped = match cmp {
                        Cmp::Le => Cmp::Ge,
                        Cmp::Ge => Cmp::Le,
                        Cmp::Eq => Cmp::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a, cmp, b)
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Cmp::Le).count();
        let width = n + slacks + artificials;
        let artificial_from = n + slacks;

        let mut a = vec![vec![0.0; width]; m];
        let mut b = vec![0.0; m];
        let mut basis = vec![0; m];
        let (mut s, mut art) = (n, artificial_from);
        for (i, (coeffs, cmp, rhs)) in rows.into_iter().enumerate() {
            a[i][..n].copy_from_slice(&coeffs);
            b[i] = rhs;
            match cmp {
                Cmp::Le => {
                    a[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Cmp::Ge => {
                    a[i][s] = -1.0;
                    s += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Cmp::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        let mut t = Tableau { n, a, b, basis, artificial_from };
        if artificials > 0 {
            t.phase_one()?;
        }
        Ok(t)
    }

    fn width(&self) -> usize {
        self.a.first().map_or(self.n, Vec::len)
    }

    fn phase_one(&mut self) -> Result<(), Stop> {
        let width = self.width();
        let cost: Vec<f64> = (0..width).map(|j| if j >= self.artificial_from { -1.0 } else { 0.0 }).collect();
        self.run(&cost, width).map_err(|_| Stop::Infeasible)?;
        let infeasibility: f64 =
            self.basis.iter().zip(&self.b).filter(|(&j, _)| j >= self.artificial_from).map(|(_, &bi)| bi).sum();
        if infeasibility > FEAS_EPS {
            return Err(Stop::Infeasible);
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.artificial_from {
                match (0..self.artificial_from).find(|&j| self.a[i][j].abs() > PIVOT_EPS) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.a.remove(i);
                        self.b.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn optimize(&mut self, objective: &[f64]) -> Result<(f64, Vec<f64>), Stop> {
        let mut cost = vec![0.0; self.width()];
        cost[..self.n].copy_from_slice(objective);
        self.run(&cost, self.artificial_from)?;
        let mut y = vec![0.0; self.n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                y[j] = self.b[i].max(0.0);
            }
        }
        let value = objective.iter().zip(&y).map(|(c, v)| c * v).sum();
        Ok((value, y))
    }

    /// Primal simplex with Bland's rule over columns `< allowed`.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Result<(), Stop> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: f64 = self.basis.iter().enumerate().map(|(i, &bj)| cost[bj] * self.a[i][j]).sum();
                cost[j] - z > COST_EPS
            });
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let aij = self.a[i][j];
                if aij > PIVOT_EPS {
                    let ratio = self.b[i] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((i, _)) = leave else { return Err(Stop::Unbounded) };
            self.pivot(i, j);
        }
        panic!("simplex exceeded {MAX_PIVOTS} pivots");
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        self.b[r] /= p;
        let pivot_row = self.a[r].clone();
        let pivot_b = self.b[r];
        for i in 0..self.a.len() {
            if i == r {
                continue;
            }
            let f = self.a[i][c];
            if f != 0.0 {
                for (v, pv) in self.a[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.b[i] -= f * pivot_b;
                if self.b[i].abs() < 1e-14 {
                    self.b[i] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(2).maximize(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Cmp::Le, 4.0).constrain(vec![0.0, 2.0], Cmp::Le, 12.0).constrain(
            vec![3.0, 2.0],
            Cmp::Le,
            18.0,
        );
        match lp.solve() {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1).maximize(vec![1.0]);
        lp.constrain(vec![1.0], Cmp::Ge, 2.0).constrain(vec![1.0], Cmp::Le, 1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let lp = LinearProgram::new(1).maximize(vec![1.0]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_shifted_bounds() {
        // x + y = 1, x in [0.25, 2], y in [-1, 1]; max x - y at (2, -1)
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, -1.0]);
        lp.bound(0, 0.25, 2.0).bound(1, -1.0, 1.0);
        lp.constrain(vec![1.0, 1.0], Cmp::Eq, 1.0);
        assert!((lp.solve().value() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Cmp::Eq, 1.0).constrain(vec![2.0, 2.0], Cmp::Eq, 2.0);
        assert!((lp.solve().value() - 2.0).abs() < 1e-9);
    }

    /// Brute force over all vertices of a 2-variable box-bounded polygon.
    fn vertex_oracle(c: [f64; 2], rows: &[([f64; 2], f64)], hi: f64) -> f64 {
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.push(([1.0, 0.0], hi));
        lines.push(([0.0, 1.0], hi));
        lines.push(([-1.0, 0.0], 0.0));
        lines.push(([0.0, -1.0], 0.0));
        let mut best = f64::NEG_INFINITY;
        for i in 0..lines.len() {
            for k in i + 1..lines.len() {
                let (a, b) = (lines[i], lines[k]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
                let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
                if lines.iter().all(|(r, rhs)| r[0] * x + r[1] * y <= rhs + 1e-9) {
                    best = best.max(c[0] * x + c[1] * y);
                }
            }
        }
        best
    }

    #[test]
    fn agrees_with_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let c = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let rows: Vec<([f64; 2], f64)> = (0..rng.random_range(1..5))
                .map(|_| {
                    (
                        [rng.random_range(-3i32..=3) as f64, rng.random_range(-3i32..=3) as f64],
                        rng.random_range(-2.0..6.0),
                    )
                })
                .collect();
            let mut lp = LinearProgram::new(2).maximize(c.to_vec());
            lp.bound(0, 0.0, 10.0).bound(1, 0.0, 10.0);
            for (a, b) in &rows {
                lp.constrain(a.to_vec(), Cmp::Le, *b);
            }
            let oracle = vertex_oracle(c, &rows, 10.0);
            let got = lp.solve().value();
            if oracle.is_finite() {
                assert!((got - oracle).abs() < 1e-7, "{got} vs {oracle} for {rows:?}");
            } else {
                assert_eq!(got, f64::NEG_INFINITY, "{rows:?}");
            }
        }
    }
}
