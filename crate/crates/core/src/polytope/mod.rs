//! Linear-inequality systems over named variables.
//!
//! Coefficients are exact rationals and right-hand sides are floats: the
//! structure of a rate region comes from integer bookkeeping, its constants
//! are mutual informations. Every inequality is stored in `<=` form; strict
//! inequalities are represented by their closure.

mod fme;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome};

pub use fme::MAX_FME_ROWS;

pub type Rational = BigRational;

/// Slack allowed when deciding that an inequality is implied by others.
pub const REDUNDANCY_TOL: f64 = 1e-7;

/// Slack allowed in point membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Default upper end of the box used for LP checks, in bits.
pub const DEFAULT_RATE_CAP: f64 = 64.0;

/// Rate variables of a region, in message order.
pub const RATE_VARS: [&str; 5] = ["R1", "R2", "R3", "R4", "R5"];

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `coeffs . vars <= rhs`, coefficients aligned with the owning system.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<Rational>,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn lhs_at(&self, point: &[f64]) -> f64 {
        self.coeffs_f64().iter().zip(point).map(|(c, x)| c * x).sum()
    }

    /// Rescales by a positive factor so the coefficients are coprime
    /// integers.
    pub fn normalized(&self) -> Self {
        if self.is_constant() {
            return self.clone();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let scale = Rational::new(lcm, gcd);
        let factor = scale.to_f64().unwrap_or(f64::NAN);
        Self { coeffs: self.coeffs.iter().map(|c| c * &scale).collect(), rhs: self.rhs * factor }
    }
}

/// Box bounds per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds(pub Vec<(f64, f64)>);

impl Bounds {
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Self {
        Bounds(vec![(lo, hi); n])
    }

    /// `[0, 64]` on every variable.
    pub fn rate_box(n: usize) -> Self {
        Self::uniform(n, 0.0, DEFAULT_RATE_CAP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    variables: Vec<String>,
    inequalities: Vec<LinearInequality>,
}

/// The system had no solution inside the box. Carries a canonical empty
/// system over the same variables.
#[derive(Debug, Clone, PartialEq)]
pub struct EmptyRegion(pub LinearSystem);

impl LinearSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        Self { variables: variables.into_iter().map(Into::into).collect(), inequalities: Vec::new() }
    }

    /// The canonical infeasible system `0 <= rhs` with `rhs < 0`.
    pub fn empty_over(variables: Vec<String>, rhs: f64) -> Self {
        let zeros = vec![Rational::zero(); variables.len()];
        Self { variables, inequalities: vec![LinearInequality { coeffs: zeros, rhs: rhs.min(-1.0) }] }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn inequalities(&self) -> &[LinearInequality] {
        &self.inequalities
    }

    pub fn len(&self) -> usize {
        self.inequalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inequalities.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    fn index_of(&self, name: &str) -> Result<usize> {
        self.var_index(name).ok_or_else(|| Error::InvalidArgument(format!("variable {name} is not declared")))
    }

    pub fn push(&mut self, ineq: LinearInequality) -> Result<()> {
        if ineq.coeffs.len() != self.variables.len() {
            return Err(Error::InvalidArgument(format!(
                "inequality has {} coefficients, system has {} variables",
                ineq.coeffs.len(),
                self.variables.len()
            )));
        }
        if !ineq.rhs.is_finite() {
            return Err(Error::InvalidArgument("right-hand side is not finite".into()));
        }
        self.inequalities.push(ineq);
        Ok(())
    }

    fn row(&self, terms: &[(&str, i64)], sign: i64) -> Result<Vec<Rational>> {
        let mut coeffs = vec![Rational::zero(); self.variables.len()];
        for &(name, c) in terms {
            let k = self.index_of(name)?;
            coeffs[k] += rational(sign * c);
        }
        Ok(coeffs)
    }

    /// `sum c * var <= rhs`.
    pub fn add_le(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<()> {
        let coeffs = self.row(terms, 1)?;
        self.push(LinearInequality { coeffs, rhs })
    }

    /// `sum c * var >= rhs`, stored negated.
    pub fn add_ge(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<()> {
        let coeffs = self.row(terms, -1)?;
        self.push(LinearInequality { coeffs, rhs: 0.0 - rhs })
    }

    /// Equality as a pair of opposing inequalities.
    pub fn add_eq(&mut self, terms: &[(&str, i64)], rhs: f64) -> Result<()> {
        self.add_le(terms, rhs)?;
        self.add_ge(terms, rhs)
    }

    pub fn add_nonnegativity(&mut self, names: &[&str]) -> Result<()> {
        for name in names {
            self.add_ge(&[(name, 1)], 0.0)?;
        }
        Ok(())
    }

    /// Declares a new variable with zero coefficients everywhere.
    pub fn with_variable(mut self, name: &str) -> Result<Self> {
        if self.var_index(name).is_some() {
            return Err(Error::InvalidArgument(format!("variable {name} already declared")));
        }
        self.variables.push(name.to_string());
        for ineq in &mut self.inequalities {
            ineq.coeffs.push(Rational::zero());
        }
        Ok(self)
    }

    /// Reorders or restricts the declared variables. Every variable with a
    /// nonzero coefficient must be kept.
    pub fn reindexed(&self, order: &[&str]) -> Result<Self> {
        let map: Vec<usize> = order.iter().map(|n| self.index_of(n)).collect::<Result<_>>()?;
        for (k, v) in self.variables.iter().enumerate() {
            if !map.contains(&k) && self.inequalities.iter().any(|i| !i.coeffs[k].is_zero()) {
                return Err(Error::InvalidArgument(format!("variable {v} still occurs in the system")));
            }
        }
        Ok(Self {
            variables: order.iter().map(|s| s.to_string()).collect(),
            inequalities: self
                .inequalities
                .iter()
                .map(|i| LinearInequality { coeffs: map.iter().map(|&k| i.coeffs[k].clone()).collect(), rhs: i.rhs })
                .collect(),
        })
    }

    pub fn satisfies(&self, point: &[f64], tol: f64) -> bool {
        self.inequalities.iter().all(|i| i.lhs_at(point) <= i.rhs + tol)
    }

    /// Keeps one copy of each coefficient vector (after normalization) with
    /// the smallest right-hand side.
    pub fn prune_dominated(&self) -> Self {
        let mut slot: HashMap<Vec<Rational>, usize> = HashMap::new();
        let mut kept: Vec<LinearInequality> = Vec::new();
        for ineq in &self.inequalities {
            let n = ineq.normalized();
            match slot.get(&n.coeffs) {
                Some(&k) => {
                    if n.rhs < kept[k].rhs {
                        kept[k].rhs = n.rhs;
                    }
                }
                None => {
                    slot.insert(n.coeffs.clone(), kept.len());
                    kept.push(n);
                }
            }
        }
        Self { variables: self.variables.clone(), inequalities: kept }
    }

    fn program(&self, rows: impl Iterator<Item = usize>, bounds: &Bounds) -> Result<LinearProgram> {
        if bounds.0.len() != self.variables.len() {
            return Err(Error::InvalidArgument("bounds do not match the variable count".into()));
        }
        let mut lp = LinearProgram::new(self.variables.len());
        for (k, &(lo, hi)) in bounds.0.iter().enumerate() {
            lp.bound(k, lo, hi);
        }
        for r in rows {
            let ineq = &self.inequalities[r];
            lp.constrain(ineq.coeffs_f64(), Cmp::Le, ineq.rhs);
        }
        Ok(lp)
    }

    /// `max objective . x` over the system intersected with the box.
    pub fn maximize(&self, objective: &[f64], bounds: &Bounds) -> Result<LpOutcome> {
        let lp = self.program(0..self.len(), bounds)?.maximize(objective.to_vec());
        Ok(lp.solve())
    }

    pub fn is_feasible(&self, bounds: &Bounds) -> Result<bool> {
        Ok(!matches!(self.maximize(&vec![0.0; self.variables.len()], bounds)?, LpOutcome::Infeasible))
    }

    /// Drops every inequality whose left side, maximized over the remaining
    /// inequalities and the box, stays within [`REDUNDANCY_TOL`] of its
    /// right-hand side. The solution set inside the box is unchanged.
    pub fn remove_redundant(&self, bounds: &Bounds) -> Result<std::result::Result<Self, EmptyRegion>> {
        let pruned = self.prune_dominated();
        let mut worst_constant = 0.0f64;
        let rows: Vec<LinearInequality> = pruned
            .inequalities
            .into_iter()
            .filter(|i| {
                if i.is_constant() {
                    worst_constant = worst_constant.min(i.rhs);
                    false
                } else {
                    true
                }
            })
            .collect();
        let empty = || EmptyRegion(Self::empty_over(self.variables.clone(), worst_constant));
        if worst_constant < -REDUNDANCY_TOL {
            return Ok(Err(empty()));
        }
        let sys = Self { variables: self.variables.clone(), inequalities: rows };
        if !sys.is_feasible(bounds)? {
            return Ok(Err(empty()));
        }
        let mut alive = vec![true; sys.len()];
        for i in 0..sys.len() {
            let others = (0..sys.len()).filter(|&k| k != i && alive[k]);
            let lp = sys.program(others, bounds)?.maximize(sys.inequalities[i].coeffs_f64());
            match lp.solve() {
                LpOutcome::Optimal { value, .. } if value <= sys.inequalities[i].rhs + REDUNDANCY_TOL => {
                    alive[i] = false
                }
                LpOutcome::Unbounded | LpOutcome::Optimal { .. } => {}
                LpOutcome::Infeasible => return Ok(Err(empty())),
            }
        }
        let inequalities = sys.inequalities.into_iter().zip(alive).filter_map(|(i, a)| a.then_some(i)).collect();
        Ok(Ok(Self { variables: self.variables.clone(), inequalities }))
    }

    /// Whether every point of `self` inside the box satisfies `other`.
    pub fn is_subset_of(&self, other: &Self, bounds: &Bounds) -> Result<bool> {
        if self.variables != other.variables {
            return Err(Error::InvalidArgument(format!(
                "variable sets differ: {:?} vs {:?}",
                self.variables, other.variables
            )));
        }
        for ineq in &other.inequalities {
            match self.maximize(&ineq.coeffs_f64(), bounds)? {
                LpOutcome::Infeasible => return Ok(true),
                LpOutcome::Unbounded => {
                    return Err(Error::InvalidArgument("region is unbounded in a compared direction".into()))
                }
                LpOutcome::Optimal { value, .. } => {
                    if value > ineq.rhs + REDUNDANCY_TOL {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &Self, bounds: &Bounds) -> Result<bool> {
        Ok(self.is_subset_of(other, bounds)? && other.is_subset_of(self, bounds)?)
    }

    pub(crate) fn from_parts(variables: Vec<String>, inequalities: Vec<LinearInequality>) -> Self {
        Self { variables, inequalities }
    }

    pub fn format_inequality(&self, ineq: &LinearInequality) -> String {
        let mut out = String::new();
        for (c, v) in ineq.coeffs.iter().zip(&self.variables) {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag} "));
            }
            out.push_str(v);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} <= {}", ineq.rhs)
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ineq in &self.inequalities {
            writeln!(f, "{}", self.format_inequality(ineq))?;
        }
        Ok(())
    }
}

/// A system over exactly `R1..R5` with implicit nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    system: LinearSystem,
    provenance: Option<String>,
}

impl RateRegion {
    pub fn new(system: LinearSystem) -> Result<Self> {
        if system.variables() != RATE_VARS {
            return Err(Error::InvalidArgument(format!(
                "rate region must be over {:?}, got {:?}",
                RATE_VARS,
                system.variables()
            )));
        }
        Ok(Self { system, provenance: None })
    }

    pub fn empty() -> Self {
        Self { system: LinearSystem::empty_over(rate_vars(), -1.0), provenance: None }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn default_box() -> Bounds {
        Bounds::rate_box(RATE_VARS.len())
    }

    /// Closure semantics: boundary points are inside.
    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == RATE_VARS.len()
            && point.iter().all(|&r| r >= -MEMBERSHIP_TOL)
            && self.system.satisfies(point, MEMBERSHIP_TOL)
    }

    /// Redundancy-free form over the default box; an infeasible region
    /// becomes the canonical empty system.
    pub fn reduced(&self) -> Result<Self> {
        let system = match self.system.remove_redundant(&Self::default_box())? {
            Ok(s) => s,
            Err(EmptyRegion(s)) => s,
        };
        Ok(Self { system, provenance: self.provenance.clone() })
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(!self.system.is_feasible(&Self::default_box())?)
    }

    /// `max w . R` over the region, with some rates optionally pinned.
    pub fn support(&self, weights: &[f64; 5], fixed: &[Option<f64>; 5]) -> Result<LpOutcome> {
        let mut bounds = Self::default_box();
        for (k, f) in fixed.iter().enumerate() {
            if let Some(v) = f {
                bounds.0[k] = (*v, *v);
            }
        }
        self.system.maximize(weights, &bounds)
    }
}

pub fn rate_vars() -> Vec<String> {
    RATE_VARS.iter().map(|s| s.to_string()).collect()
}

/// Mutual containment inside `bounds`, each side checked by LP.
pub fn regions_equal(a: &RateRegion, b: &RateRegion, bounds: &Bounds) -> Result<bool> {
    a.system.equals(&b.system, bounds)
}

/// `a` contained in `b` inside `bounds`.
pub fn region_subset(a: &RateRegion, b: &RateRegion, bounds: &Bounds) -> Result<bool> {
    a.system.is_subset_of(&b.system, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> LinearSystem {
        let mut s = LinearSystem::new(["x", "y"]);
        s.add_le(&[("y", 1)], 2.0).unwrap();
        s.add_ge(&[("y", 1)], 0.0).unwrap();
        s.add_le(&[("x", 1), ("y", 1)], 5.0).unwrap();
        s.add_le(&[("x", 1), ("y", -1)], 1.0).unwrap();
        s
    }

    #[test]
    fn normalization_makes_primitive_integers() {
        let i = LinearInequality { coeffs: vec![rational(2), Rational::new(4.into(), 3.into())], rhs: 6.0 };
        let n = i.normalized();
        assert_eq!(n.coeffs, vec![rational(3), rational(2)]);
        assert!((n.rhs - 9.0).abs() < 1e-12);
    }

    #[test]
    fn remove_redundant_examples() {
        let mut s = LinearSystem::new(["x"]);
        s.add_le(&[("x", 1)], 5.0).unwrap();
        s.add_le(&[("x", 1)], 3.0).unwrap();
        let r = s.remove_redundant(&Bounds::uniform(1, -10.0, 10.0)).unwrap().unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.inequalities()[0].rhs, 3.0);

        let constant = LinearSystem::from_parts(
            vec!["x".into()],
            vec![LinearInequality { coeffs: vec![Rational::zero()], rhs: 2.0 }],
        );
        assert!(constant.remove_redundant(&Bounds::rate_box(1)).unwrap().unwrap().is_empty());

        let infeasible = LinearSystem::from_parts(
            vec!["x".into()],
            vec![LinearInequality { coeffs: vec![Rational::zero()], rhs: -0.5 }],
        );
        assert!(infeasible.remove_redundant(&Bounds::rate_box(1)).unwrap().is_err());
    }

    #[test]
    fn lp_infeasibility_is_empty_region() {
        let mut s = LinearSystem::new(["x"]);
        s.add_ge(&[("x", 1)], 3.0).unwrap();
        s.add_le(&[("x", 1)], 1.0).unwrap();
        let err = s.remove_redundant(&Bounds::rate_box(1)).unwrap().unwrap_err();
        assert!(!err.0.is_feasible(&Bounds::rate_box(1)).unwrap());
    }

    #[test]
    fn equality_and_subset() {
        let s = xy();
        let mut bigger = s.clone();
        bigger.add_le(&[("x", 1)], 100.0).unwrap();
        let b = Bounds::uniform(2, -10.0, 10.0);
        assert!(s.equals(&bigger, &b).unwrap());
        let mut smaller = s.clone();
        smaller.add_le(&[("x", 1)], 0.5).unwrap();
        assert!(smaller.is_subset_of(&s, &b).unwrap());
        assert!(!s.is_subset_of(&smaller, &b).unwrap());
    }

    #[test]
    fn formatting() {
        let s = xy();
        assert_eq!(s.format_inequality(&s.inequalities()[1]), "-y <= 0");
        assert_eq!(s.format_inequality(&s.inequalities()[3]), "x - y <= 1");
    }

    #[test]
    fn region_membership() {
        let mut s = LinearSystem::new(RATE_VARS);
        s.add_le(&[("R1", 1), ("R2", 1)], 1.0).unwrap();
        let r = RateRegion::new(s).unwrap();
        assert!(r.contains(&[0.0; 5]));
        assert!(r.contains(&[0.5, 0.5, 0.0, 0.0, 0.0]));
        assert!(!r.contains(&[0.6, 0.5, 0.0, 0.0, 0.0]));
        assert!(!r.contains(&[-0.1, 0.5, 0.0, 0.0, 0.0]));
        assert!(RateRegion::new(LinearSystem::new(["x"])).is_err());
        assert!(RateRegion::empty().is_empty().unwrap());
    }
}
