//! Entropy and mutual information in bits.

use std::fmt;

use crate::error::{Error, Result};
use crate::probability::{JointPmf, Pmf};

/// Values in `[-NEGATIVE_SLACK, 0)` are float cancellation and clamp to zero;
/// anything lower is a bug.
pub const NEGATIVE_SLACK: f64 = 1e-9;

/// An information quantity in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InfoValue(f64);

impl InfoValue {
    pub const ZERO: InfoValue = InfoValue(0.0);

    /// Clamps tiny negatives; rejects non-finite and clearly negative values.
    pub fn checked(bits: f64, what: &str) -> Result<Self> {
        if !bits.is_finite() {
            return Err(Error::Internal(format!("{what} is not finite")));
        }
        if bits < -NEGATIVE_SLACK {
            return Err(Error::Internal(format!("{what} = {bits} bits is negative")));
        }
        Ok(InfoValue(bits.max(0.0)))
    }

    pub fn bits(self) -> f64 {
        self.0
    }
}

impl fmt::Display for InfoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn entropy_bits(mass: &[f64]) -> f64 {
    mass.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

pub fn entropy(p: &Pmf) -> Result<InfoValue> {
    InfoValue::checked(entropy_bits(p.mass()), "entropy")
}

/// `H` of the marginal on `axes`; zero for an empty group.
pub fn joint_entropy(j: &JointPmf, axes: &[usize]) -> Result<InfoValue> {
    if axes.is_empty() {
        return Ok(InfoValue::ZERO);
    }
    InfoValue::checked(entropy_bits(j.marginalize(axes)?.mass()), "joint entropy")
}

/// `H(A | B) = H(A, B) - H(B)`.
pub fn conditional_entropy(j: &JointPmf, a: &[usize], b: &[usize]) -> Result<InfoValue> {
    disjoint(&[a, b])?;
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    InfoValue::checked(joint_entropy(j, &ab)?.bits() - joint_entropy(j, b)?.bits(), "conditional entropy")
}

fn disjoint(groups: &[&[usize]]) -> Result<()> {
    let mut seen: Vec<usize> = Vec::new();
    for g in groups {
        for &a in *g {
            if seen.contains(&a) {
                return Err(Error::OverlappingGroups(a));
            }
            seen.push(a);
        }
    }
    Ok(())
}

/// `I(A; B) = H(A) + H(B) - H(A, B)`. Zero when either group is empty.
pub fn mutual_information(j: &JointPmf, a: &[usize], b: &[usize]) -> Result<InfoValue> {
    disjoint(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Ok(InfoValue::ZERO);
    }
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let v = joint_entropy(j, a)?.bits() + joint_entropy(j, b)?.bits() - joint_entropy(j, &ab)?.bits();
    InfoValue::checked(v, "mutual information")
}

/// `I(A; B | C)`, summed cell by cell as
/// `sum p(a,b,c) log2 [p(a,b,c) p(c) / (p(a,c) p(b,c))]`.
pub fn conditional_mutual_information(j: &JointPmf, a: &[usize], b: &[usize], c: &[usize]) -> Result<InfoValue> {
    disjoint(&[a, b, c])?;
    if c.is_empty() {
        return mutual_information(j, a, b);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(InfoValue::ZERO);
    }
    // Order the marginal as (A, B, C) so the three sub-marginals are cheap.
    let order: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let abc = j.marginalize(&order)?;
    let (na, nb) = (a.len(), b.len());
    let ac_axes: Vec<usize> = (0..na).chain(na + nb..order.len()).collect();
    let bc_axes: Vec<usize> = (na..order.len()).collect();
    let c_axes: Vec<usize> = (na + nb..order.len()).collect();
    let ac = abc.marginalize(&ac_axes)?;
    let bc = abc.marginalize(&bc_axes)?;
    let pc = abc.marginalize(&c_axes)?;

    let mut total = 0.0;
    abc.for_each_cell(|idx, &p| {
        if p <= 0.0 {
            return;
        }
        let ia: Vec<usize> = ac_axes.iter().map(|&k| idx[k]).collect();
        let ib: Vec<usize> = bc_axes.iter().map(|&k| idx[k]).collect();
        let ic: Vec<usize> = c_axes.iter().map(|&k| idx[k]).collect();
        let ratio = p * pc.get(&ic) / (ac.get(&ia) * bc.get(&ib));
        total += p * ratio.log2();
    });
    InfoValue::checked(total, "conditional mutual information")
}

/// `I(A; B)` in bits from a joint matrix `p[a][b]` that sums to one.
pub fn mi_of_matrix(p: &[Vec<f64>]) -> f64 {
    let cols = p.first().map_or(0, Vec::len);
    let pb: Vec<f64> = (0..cols).map(|b| p.iter().map(|r| r[b]).sum()).collect();
    let mut total = 0.0;
    for row in p {
        let pa: f64 = row.iter().sum();
        for (b, &v) in row.iter().enumerate() {
            if v > 0.0 {
                total += v * (v / (pa * pb[b])).log2();
            }
        }
    }
    total.max(0.0)
}

/// `I(X; Y)` for input law `px` through kernel `w[x][y]`.
pub fn channel_mutual_information(px: &[f64], w: &[Vec<f64>]) -> f64 {
    let joint: Vec<Vec<f64>> = px.iter().zip(w).map(|(p, row)| row.iter().map(|q| p * q).collect()).collect();
    mi_of_matrix(&joint)
}

/// Axis roles for [`csiszar_sum_check`]: a conditioning group `T` and two
/// sequences `A_1..A_n`, `B_1..B_n` of single axes.
#[derive(Debug, Clone)]
pub struct SequenceRoles {
    pub t: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Both sides of the Csiszar sum identity:
///
/// `lhs = sum_i I(A^{i-1}; B_i | T, B_{i+1}^n)` and
/// `rhs = sum_i I(B_{i+1}^n; A_i | T, A^{i-1})`.
pub fn csiszar_sum_check(j: &JointPmf, roles: &SequenceRoles) -> Result<(InfoValue, InfoValue)> {
    let n = roles.a.len();
    if n == 0 || roles.b.len() != n {
        return Err(Error::InvalidArgument(format!(
            "sequences need equal nonzero length, got {} and {}",
            n,
            roles.b.len()
        )));
    }
    disjoint(&[&roles.t, &roles.a, &roles.b])?;
    if let Some(&bad) = roles.t.iter().chain(&roles.a).chain(&roles.b).find(|&&k| k >= j.rank()) {
        return Err(Error::InvalidArgument(format!("axis {bad} out of range")));
    }
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..n {
        let a_past = &roles.a[..i];
        let b_future = &roles.b[i + 1..];
        let cond_l: Vec<usize> = roles.t.iter().chain(b_future).copied().collect();
        lhs += conditional_mutual_information(j, a_past, &[roles.b[i]], &cond_l)?.bits();
        let cond_r: Vec<usize> = roles.t.iter().chain(a_past).copied().collect();
        rhs += conditional_mutual_information(j, b_future, &[roles.a[i]], &cond_r)?.bits();
    }
    Ok((InfoValue::checked(lhs, "csiszar lhs")?, InfoValue::checked(rhs, "csiszar rhs")?))
}
