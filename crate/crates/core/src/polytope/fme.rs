use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{LinearInequality, LinearSystem};
use crate::error::{Error, Result};

/// Largest system a single elimination step may produce.
pub const MAX_FME_ROWS: usize = 100_000;

impl LinearSystem {
    /// Fourier-Motzkin elimination of one variable. The result has the
    /// variable removed from its declaration; rows are normalized to
    /// coprime integer coefficients and exact duplicates are dropped.
    /// Dominated rows are left in place.
    pub fn fme_eliminate(&self, var: &str) -> Result<LinearSystem> {
        let k = self.var_index(var).ok_or_else(|| Error::InvalidArgument(format!("variable {var} is not declared")))?;
        let (mut zero, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in self.inequalities() {
            let c = &ineq.coeffs[k];
            if c.is_zero() {
                zero.push(ineq);
            } else if c.is_positive() {
                pos.push(ineq);
            } else {
                neg.push(ineq);
            }
        }
        let produced = zero.len() + pos.len() * neg.len();
        if produced > MAX_FME_ROWS {
            return Err(Error::Guard(format!(
                "eliminating {var} would produce {produced} inequalities (limit {MAX_FME_ROWS})"
            )));
        }

        let drop_k = |coeffs: Vec<BigRational>| -> Vec<BigRational> {
            coeffs.into_iter().enumerate().filter_map(|(i, c)| (i != k).then_some(c)).collect()
        };
        let mut out: Vec<LinearInequality> = Vec::with_capacity(produced);
        let mut seen: HashMap<Vec<BigRational>, Vec<usize>> = HashMap::new();
        let mut emit = |ineq: LinearInequality| {
            let n = ineq.normalized();
            let slot = seen.entry(n.coeffs.clone()).or_default();
            let tol = 1e-12 * n.rhs.abs().max(1.0);
            if slot.iter().any(|&i| (out[i].rhs - n.rhs).abs() <= tol) {
                return;
            }
            slot.push(out.len());
            out.push(n);
        };

        for z in zero {
            emit(LinearInequality { coeffs: drop_k(z.coeffs.clone()), rhs: z.rhs });
        }
        for p in &pos {
            for q in &neg {
                let a = p.coeffs[k].clone();
                let b = -q.coeffs[k].clone();
                let coeffs: Vec<BigRational> = p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x * &b + y * &a).collect();
                let rhs = p.rhs * b.to_f64_lossy() + q.rhs * a.to_f64_lossy();
                emit(LinearInequality { coeffs: drop_k(coeffs), rhs });
            }
        }

        let variables = self.variables().iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v.clone()).collect();
        Ok(LinearSystem::from_parts(variables, out))
    }

    /// Eliminates several variables in order, pruning dominated rows
    /// between steps.
    pub fn fme_eliminate_all(&self, vars: &[&str]) -> Result<LinearSystem> {
        let mut sys = self.clone();
        for v in vars {
            sys = sys.fme_eliminate(v)?.prune_dominated();
        }
        Ok(sys)
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rational, Bounds};
    use super::*;

    fn as_pairs(s: &LinearSystem) -> Vec<(Vec<i64>, f64)> {
        let mut v: Vec<(Vec<i64>, f64)> = s
            .inequalities()
            .iter()
            .map(|i| {
                (i.coeffs.iter().map(|c| num_traits::ToPrimitive::to_i64(&c.to_integer()).unwrap()).collect(), i.rhs)
            })
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn textbook_example() {
        let mut s = LinearSystem::new(["x", "y"]);
        s.add_le(&[("y", 1)], 2.0).unwrap();
        s.add_ge(&[("y", 1)], 0.0).unwrap();
        s.add_le(&[("x", 1), ("y", 1)], 5.0).unwrap();
        s.add_le(&[("x", 1), ("y", -1)], 1.0).unwrap();
        let r = s.fme_eliminate("y").unwrap();
        assert_eq!(r.variables(), ["x"]);
        assert_eq!(as_pairs(&r), vec![(vec![0], 2.0), (vec![1], 3.0), (vec![1], 5.0)]);
    }

    #[test]
    fn absent_variable_only_drops_declaration() {
        let mut s = LinearSystem::new(["x", "y"]);
        s.add_le(&[("x", 2)], 4.0).unwrap();
        let r = s.fme_eliminate("y").unwrap();
        assert_eq!(r.variables(), ["x"]);
        assert_eq!(r.inequalities()[0].coeffs, vec![rational(1)]);
        assert_eq!(r.inequalities()[0].rhs, 2.0);
    }

    #[test]
    fn undeclared_variable_is_an_error() {
        let s = LinearSystem::new(["x"]);
        assert!(matches!(s.fme_eliminate("z"), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn explosion_guard() {
        let mut s = LinearSystem::new(["x", "y"]);
        for i in 0..400 {
            s.add_le(&[("x", 1), ("y", i + 1)], 1.0).unwrap();
            s.add_le(&[("x", i + 2), ("y", -1)], 1.0).unwrap();
        }
        assert!(matches!(s.fme_eliminate("y"), Err(Error::Guard(_))));
    }

    #[test]
    fn projection_matches_existence_on_a_grid() {
        // x feasible after eliminating y iff some y on a fine grid works.
        let mut s = LinearSystem::new(["x", "y"]);
        s.add_le(&[("y", 2), ("x", -1)], 3.0).unwrap();
        s.add_ge(&[("y", 1), ("x", 1)], 1.0).unwrap();
        s.add_le(&[("y", 1)], 2.5).unwrap();
        s.add_ge(&[("y", 3), ("x", -2)], -4.0).unwrap();
        let proj = s.fme_eliminate("y").unwrap();
        let b = Bounds::uniform(2, -10.0, 10.0);
        assert!(s.is_feasible(&b).unwrap());
        for xi in -40..=40 {
            let x = xi as f64 * 0.25;
            let exists = (-4000..=4000).any(|yi| s.satisfies(&[x, yi as f64 * 0.0025], 1e-9));
            let projected = proj.satisfies(&[x], 1e-9);
            assert_eq!(exists, projected, "x = {x}");
        }
    }
}
