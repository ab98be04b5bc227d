//! Finite-alphabet probability objects.
//!
//! Every distribution in the toolkit is a dense [`JointPmf`] over an ordered
//! list of [`Alphabet`]s. Masses are generic over [`Prob`], so exact rationals
//! read from input files survive marginalization, conditioning and the
//! scheme/channel product unchanged; information measures always convert to
//! `f64` first.

mod channel;
mod scheme;

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use channel::Channel;
pub use scheme::{axis, induced_joint, AuxScheme, INDUCED_AXES};

/// Tolerance on the total mass of a float pmf, and on input files before
/// they are renormalized.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Upper bound on the number of cells in any dense joint.
pub const MAX_JOINT_CELLS: usize = 10_000_000;

/// Scalar that can carry probability mass.
pub trait Prob:
    Clone
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn to_f64(&self) -> f64;

    /// Whether a total mass counts as one. Floats use [`MASS_TOLERANCE`],
    /// rationals require equality.
    fn is_unit_total(total: &Self) -> bool;

    fn is_finite_value(&self) -> bool {
        true
    }

    /// Canonical form of a value; maps `-0.0` to `0.0`.
    fn canonical(self) -> Self {
        self
    }
}

impl Prob for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit_total(total: &Self) -> bool {
        (total - 1.0).abs() <= MASS_TOLERANCE
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn canonical(self) -> Self {
        if self == 0.0 {
            0.0
        } else {
            self
        }
    }
}

impl Prob for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_unit_total(total: &Self) -> bool {
        total.is_one()
    }
}

/// Why a mass vector is not a probability mass function.
#[derive(Debug, Clone, PartialEq)]
pub enum PmfViolation {
    Empty,
    NonFinite { index: usize },
    Negative { index: usize, value: f64 },
    SumDeficit { sum: f64 },
}

impl fmt::Display for PmfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PmfViolation::Empty => write!(f, "empty mass vector"),
            PmfViolation::NonFinite { index } => write!(f, "mass[{index}] is not finite"),
            PmfViolation::Negative { index, value } => write!(f, "mass[{index}] = {value} < 0"),
            PmfViolation::SumDeficit { sum } => write!(f, "sum = {sum}"),
        }
    }
}

/// Checks nonnegativity and unit total. Negative zero is accepted.
pub fn validate_pmf<P: Prob>(mass: &[P]) -> Result<(), PmfViolation> {
    if mass.is_empty() {
        return Err(PmfViolation::Empty);
    }
    let mut total = P::zero();
    for (index, m) in mass.iter().enumerate() {
        if !m.is_finite_value() {
            return Err(PmfViolation::NonFinite { index });
        }
        if *m < P::zero() {
            return Err(PmfViolation::Negative { index, value: m.to_f64() });
        }
        total = total + m.clone();
    }
    if !P::is_unit_total(&total) {
        return Err(PmfViolation::SumDeficit { sum: total.to_f64() });
    }
    Ok(())
}

/// Validates within tolerance, then divides by the total once.
fn normalized<P: Prob>(mass: Vec<P>) -> Result<Vec<P>> {
    let mass: Vec<P> = mass.into_iter().map(P::canonical).collect();
    let total = mass.iter().cloned().fold(P::zero(), |acc, m| acc + m);
    if (total.to_f64() - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::malformed(PmfViolation::SumDeficit { sum: total.to_f64() }.to_string()));
    }
    let mass: Vec<P> = mass.into_iter().map(|m| m / total.clone()).collect();
    validate_pmf(&mass).map_err(|v| Error::malformed(v.to_string()))?;
    Ok(mass)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, symbols: Vec<String>) -> Result<Self> {
        let name = name.into();
        if symbols.is_empty() {
            return Err(Error::malformed(format!("alphabet {name} is empty")));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::malformed(format!("alphabet {name} repeats symbol {s}")));
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet `{0, 1, ..., size-1}`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Self {
        let size = size.max(1);
        Self { name: name.into(), symbols: (0..size).map(|i| i.to_string()).collect() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self { name: name.into(), symbols: self.symbols.clone() }
    }
}

/// Distribution over a single alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<P = f64> {
    alphabet: Alphabet,
    mass: Vec<P>,
}

impl<P: Prob> Pmf<P> {
    pub fn new(alphabet: Alphabet, mass: Vec<P>) -> Result<Self> {
        if mass.len() != alphabet.size() {
            return Err(Error::AlphabetMismatch(format!(
                "alphabet {} has {} symbols but {} masses were given",
                alphabet.name(),
                alphabet.size(),
                mass.len()
            )));
        }
        Ok(Self { alphabet, mass: normalized(mass)? })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mass(&self) -> &[P] {
        &self.mass
    }

    pub fn into_joint(self) -> JointPmf<P> {
        JointPmf { strides: vec![1], axes: vec![self.alphabet], mass: self.mass }
    }
}

/// Dense joint distribution, row-major over `axes`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<P = f64> {
    axes: Vec<Alphabet>,
    mass: Vec<P>,
    strides: Vec<usize>,
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

pub(crate) fn checked_cells(shape: &[usize]) -> Result<usize> {
    let mut cells: usize = 1;
    for &s in shape {
        cells = cells
            .checked_mul(s)
            .filter(|&c| c <= MAX_JOINT_CELLS)
            .ok_or_else(|| Error::Guard(format!("joint over shape {shape:?} exceeds {MAX_JOINT_CELLS} cells")))?;
    }
    Ok(cells)
}

impl<P: Prob> JointPmf<P> {
    /// Builds a joint, renormalizing a total within [`MASS_TOLERANCE`] of one.
    pub fn new(axes: Vec<Alphabet>, mass: Vec<P>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::malformed("joint pmf needs at least one axis"));
        }
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let cells = checked_cells(&shape)?;
        if cells != mass.len() {
            return Err(Error::AlphabetMismatch(format!("shape {shape:?} needs {cells} masses, got {}", mass.len())));
        }
        Ok(Self { strides: strides_for(&shape), axes, mass: normalized(mass)? })
    }

    /// Skips validation; callers guarantee a valid pmf.
    pub(crate) fn from_parts(axes: Vec<Alphabet>, mass: Vec<P>) -> Self {
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        debug_assert_eq!(shape.iter().product::<usize>(), mass.len());
        Self { strides: strides_for(&shape), axes, mass }
    }

    pub fn point_mass(axes: Vec<Alphabet>, at: &[usize]) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let cells = checked_cells(&shape)?;
        if at.len() != shape.len() || at.iter().zip(&shape).any(|(a, s)| a >= s) {
            return Err(Error::InvalidArgument(format!("index {at:?} out of range for {shape:?}")));
        }
        let mut mass = vec![P::zero(); cells];
        let strides = strides_for(&shape);
        let flat: usize = at.iter().zip(&strides).map(|(a, s)| a * s).sum();
        mass[flat] = P::one();
        Ok(Self { axes, mass, strides })
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn mass(&self) -> &[P] {
        &self.mass
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }

    pub fn get(&self, index: &[usize]) -> &P {
        &self.mass[self.flat_index(index)]
    }

    pub fn total(&self) -> P {
        self.mass.iter().cloned().fold(P::zero(), |acc, m| acc + m)
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.rank() {
                return Err(Error::InvalidArgument(format!("axis {a} out of range (rank {})", self.rank())));
            }
            if axes[..i].contains(&a) {
                return Err(Error::InvalidArgument(format!("axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Sums out every axis not in `keep`. The result's axes follow the order
    /// of `keep`, so this also permutes.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("marginalize needs at least one kept axis".into()));
        }
        self.check_axes(keep)?;
        let axes: Vec<Alphabet> = keep.iter().map(|&a| self.axes[a].clone()).collect();
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let out_strides = strides_for(&shape);
        // contribution of each source axis to the target flat index
        let mut contrib = vec![0usize; self.rank()];
        for (k, &a) in keep.iter().enumerate() {
            contrib[a] = out_strides[k];
        }
        let mut out = vec![P::zero(); shape.iter().product()];
        self.for_each_cell(|idx, m| {
            let t: usize = idx.iter().zip(&contrib).map(|(i, c)| i * c).sum();
            out[t] = out[t].clone() + m.clone();
        });
        Ok(Self { axes, mass: out, strides: out_strides })
    }

    /// Slice at `given = value`, renormalized, over the remaining axes in
    /// their original order.
    pub fn condition(&self, given: &[usize], value: &[usize]) -> Result<Self> {
        self.check_axes(given)?;
        if given.len() != value.len() {
            return Err(Error::InvalidArgument("conditioning value has wrong length".into()));
        }
        for (&a, &v) in given.iter().zip(value) {
            if v >= self.axes[a].size() {
                return Err(Error::InvalidArgument(format!("symbol {v} out of range on axis {a}")));
            }
        }
        let rest: Vec<usize> = (0..self.rank()).filter(|a| !given.contains(a)).collect();
        if rest.is_empty() {
            return Err(Error::InvalidArgument("conditioning on every axis leaves nothing".into()));
        }
        let axes: Vec<Alphabet> = rest.iter().map(|&a| self.axes[a].clone()).collect();
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let out_strides = strides_for(&shape);
        let mut out = vec![P::zero(); shape.iter().product()];
        let mut total = P::zero();
        self.for_each_cell(|idx, m| {
            if given.iter().zip(value).all(|(&a, &v)| idx[a] == v) {
                let t: usize = rest.iter().zip(&out_strides).map(|(&a, s)| idx[a] * s).sum();
                out[t] = m.clone();
                total = total.clone() + m.clone();
            }
        });
        if total.is_zero() {
            return Err(Error::ZeroMassCondition);
        }
        let mass = out.into_iter().map(|m| m / total.clone()).collect();
        Ok(Self { axes, mass, strides: out_strides })
    }

    pub fn to_f64(&self) -> JointPmf<f64> {
        JointPmf {
            axes: self.axes.clone(),
            mass: self.mass.iter().map(Prob::to_f64).collect(),
            strides: self.strides.clone(),
        }
    }

    /// Visits every cell with its multi-index in row-major order.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[usize], &P)) {
        let shape = self.shape();
        let mut idx = vec![0usize; shape.len()];
        for m in &self.mass {
            f(&idx, m);
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

impl JointPmf<f64> {
    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let cells = checked_cells(&shape)?;
        Ok(Self::from_parts(axes, vec![1.0 / cells as f64; cells]))
    }

    /// Largest absolute cellwise difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        (self.shape() == other.shape())
            .then(|| self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}
