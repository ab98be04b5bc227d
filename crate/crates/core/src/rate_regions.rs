//! The inner bound, the deterministic and more-capable capacity regions,
//! and the raw coding conditions they are projected from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{conditional_entropy, conditional_mutual_information, joint_entropy, mutual_information, InfoValue};
use crate::polytope::{EmptyRegion, LinearSystem, RateRegion, RATE_VARS};
use crate::probability::{axis, induced_joint, Alphabet, AuxScheme, Channel, JointPmf};

/// Tolerance for accepting a channel as deterministic.
pub const DETERMINISTIC_TOL: f64 = 1e-9;

/// Variables of the raw system: the split message rates and the two
/// covering rates.
pub const SPLIT_VARS: [&str; 9] = ["R1", "R21", "R22", "R31", "R32", "R4", "R5", "Rp1", "Rp2"];

/// Eliminated, in order, when projecting the raw system.
pub const ELIMINATED: [&str; 6] = ["Rp1", "Rp2", "R21", "R22", "R31", "R32"];

/// A point of the raw system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitRates {
    pub r1: f64,
    pub r21: f64,
    pub r22: f64,
    pub r31: f64,
    pub r32: f64,
    pub r4: f64,
    pub r5: f64,
    pub rp1: f64,
    pub rp2: f64,
}

impl SplitRates {
    pub fn as_vec(&self) -> Vec<f64> {
        vec![self.r1, self.r21, self.r22, self.r31, self.r32, self.r4, self.r5, self.rp1, self.rp2]
    }

    pub fn r2(&self) -> f64 {
        self.r21 + self.r22
    }

    pub fn r3(&self) -> f64 {
        self.r31 + self.r32
    }

    /// `(R1, R2, R3, R4, R5)`.
    pub fn totals(&self) -> [f64; 5] {
        [self.r1, self.r2(), self.r3(), self.r4, self.r5]
    }
}

/// The five information quantities of the inner bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiConstants {
    /// `I(U0, U1; Y1)`
    pub i_u0u1_y1: InfoValue,
    /// `I(U0, U2; Y2)`
    pub i_u0u2_y2: InfoValue,
    /// `I(U1; Y1 | U0)`
    pub i_u1_y1_given_u0: InfoValue,
    /// `I(U2; Y2 | U0)`
    pub i_u2_y2_given_u0: InfoValue,
    /// `I(U1; U2 | U0)`
    pub i_u1_u2_given_u0: InfoValue,
}

impl MiConstants {
    pub fn from_bits(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<Self> {
        Ok(Self {
            i_u0u1_y1: InfoValue::checked(a, "I(U0,U1;Y1)")?,
            i_u0u2_y2: InfoValue::checked(b, "I(U0,U2;Y2)")?,
            i_u1_y1_given_u0: InfoValue::checked(c, "I(U1;Y1|U0)")?,
            i_u2_y2_given_u0: InfoValue::checked(d, "I(U2;Y2|U0)")?,
            i_u1_u2_given_u0: InfoValue::checked(e, "I(U1;U2|U0)")?,
        })
    }

    /// `[a, b, c, d, e]` in field order.
    pub fn bits(&self) -> [f64; 5] {
        [
            self.i_u0u1_y1.bits(),
            self.i_u0u2_y2.bits(),
            self.i_u1_y1_given_u0.bits(),
            self.i_u2_y2_given_u0.bits(),
            self.i_u1_u2_given_u0.bits(),
        ]
    }

    /// Right-hand sides of the five inner-bound inequalities.
    pub fn theorem1_rhs(&self) -> [f64; 5] {
        let [a, b, c, d, e] = self.bits();
        [a, b, a + d - e, b + c - e, a + b - e]
    }
}

pub fn mi_constants(scheme: &AuxScheme, ch: &Channel) -> Result<MiConstants> {
    let j = induced_joint(scheme, ch)?;
    use axis::*;
    Ok(MiConstants {
        i_u0u1_y1: mutual_information(&j, &[U0, U1], &[Y1])?,
        i_u0u2_y2: mutual_information(&j, &[U0, U2], &[Y2])?,
        i_u1_y1_given_u0: conditional_mutual_information(&j, &[U1], &[Y1], &[U0])?,
        i_u2_y2_given_u0: conditional_mutual_information(&j, &[U2], &[Y2], &[U0])?,
        i_u1_u2_given_u0: conditional_mutual_information(&j, &[U1], &[U2], &[U0])?,
    })
}

/// Coefficient rows of the inner bound over `R1..R5`, in inequality order.
pub const THEOREM1_ROWS: [[i64; 5]; 5] =
    [[1, 1, 0, 1, 0], [1, 0, 1, 0, 1], [1, 1, 1, 1, 0], [1, 1, 1, 0, 1], [2, 1, 1, 1, 1]];

fn region_from_rows(rows: &[[i64; 5]], rhs: &[f64]) -> Result<RateRegion> {
    let mut sys = LinearSystem::new(RATE_VARS);
    for (row, &r) in rows.iter().zip(rhs) {
        let terms: Vec<(&str, i64)> =
            RATE_VARS.iter().zip(row).filter(|(_, &c)| c != 0).map(|(v, &c)| (*v, c)).collect();
        sys.add_le(&terms, r)?;
    }
    RateRegion::new(sys)
}

pub fn theorem1_region_from_constants(consts: &MiConstants) -> Result<RateRegion> {
    region_from_rows(&THEOREM1_ROWS, &consts.theorem1_rhs())
}

/// The five inner-bound inequalities for one auxiliary scheme.
pub fn theorem1_region(scheme: &AuxScheme, ch: &Channel) -> Result<RateRegion> {
    Ok(theorem1_region_from_constants(&mi_constants(scheme, ch)?)?.with_provenance("theorem1"))
}

/// The coding conditions over [`SPLIT_VARS`], with all nine variables
/// nonnegative.
pub fn raw_achievability_system(consts: &MiConstants) -> Result<LinearSystem> {
    let [a, b, c, d, e] = consts.bits();
    let mut s = LinearSystem::new(SPLIT_VARS);
    s.add_ge(&[("Rp1", 1), ("Rp2", 1)], e)?;
    s.add_le(&[("R22", 1), ("Rp1", 1)], c)?;
    s.add_le(&[("R1", 1), ("R21", 1), ("R31", 1), ("R4", 1), ("R22", 1), ("Rp1", 1)], a)?;
    s.add_le(&[("R32", 1), ("Rp2", 1)], d)?;
    s.add_le(&[("R1", 1), ("R21", 1), ("R31", 1), ("R5", 1), ("R32", 1), ("Rp2", 1)], b)?;
    s.add_nonnegativity(&SPLIT_VARS)?;
    Ok(s)
}

/// The raw system with `R32 = 0` and `Rp1 = 0`, as used when `U2` is
/// constant and `U1 = X`.
pub fn raw_more_capable_system(consts: &MiConstants) -> Result<LinearSystem> {
    let mut s = raw_achievability_system(consts)?;
    s.add_eq(&[("R32", 1)], 0.0)?;
    s.add_eq(&[("Rp1", 1)], 0.0)?;
    Ok(s)
}

/// Declares `R2`, `R3` with `R2 = R21 + R22` and `R3 = R31 + R32`.
pub fn augment_with_totals(sys: LinearSystem) -> Result<LinearSystem> {
    let mut s = sys.with_variable("R2")?.with_variable("R3")?;
    s.add_eq(&[("R2", 1), ("R21", -1), ("R22", -1)], 0.0)?;
    s.add_eq(&[("R3", 1), ("R31", -1), ("R32", -1)], 0.0)?;
    Ok(s)
}

/// Eliminates the split and covering rates and removes redundancy over
/// the default box.
///
/// The covering condition together with the two bin bounds also implies
/// `I(U1;U2|U0) <= I(U1;Y1|U0) + I(U2;Y2|U0)`. When the constants violate
/// it the projection is empty even though the five inner-bound
/// inequalities alone may not be.
pub fn project_raw_to_theorem1(sys: &LinearSystem) -> Result<RateRegion> {
    if sys.var_index("R2").is_none() || sys.var_index("R3").is_none() {
        return Err(Error::InvalidArgument("raw system lacks R2/R3; see augment_with_totals".into()));
    }
    let projected = sys.fme_eliminate_all(&ELIMINATED)?.reindexed(&RATE_VARS)?;
    let reduced = match projected.remove_redundant(&RateRegion::default_box())? {
        Ok(s) => s,
        Err(EmptyRegion(s)) => s,
    };
    Ok(RateRegion::new(reduced)?.with_provenance("theorem1 via projection"))
}

/// Joint of `(U, X, Y1, Y2)` from `p(u, x)` and the channel.
fn ux_joint(p_ux: &JointPmf, ch: &Channel) -> Result<JointPmf> {
    if p_ux.rank() != 2 {
        return Err(Error::InvalidArgument(format!("p(u,x) must have 2 axes, got {}", p_ux.rank())));
    }
    let [nu, nx] = [p_ux.shape()[0], p_ux.shape()[1]];
    if nx != ch.x_size() {
        return Err(Error::AlphabetMismatch(format!("p(u,x) has {nx} inputs, channel has {}", ch.x_size())));
    }
    let block = ch.y1_size() * ch.y2_size();
    let mut mass = vec![0.0; nu * nx * block];
    for u in 0..nu {
        for x in 0..nx {
            let p = *p_ux.get(&[u, x]);
            for (k, q) in ch.row(x).mass().iter().enumerate() {
                mass[(u * nx + x) * block + k] = p * q;
            }
        }
    }
    let axes =
        vec![p_ux.axes()[0].renamed("U"), p_ux.axes()[1].renamed("X"), ch.y1().renamed("Y1"), ch.y2().renamed("Y2")];
    JointPmf::new(axes, mass)
}

/// The deterministic-channel capacity region evaluated at `p(u, x)`.
pub fn deterministic_region(p_ux: &JointPmf, ch: &Channel) -> Result<RateRegion> {
    let (phi1, _) = ch.deterministic_maps(DETERMINISTIC_TOL).ok_or(Error::NotDeterministic(first_noisy_row(ch)))?;
    debug_assert_eq!(phi1.len(), ch.x_size());
    let j = ux_joint(p_ux, ch)?;
    let (u, y1, y2) = (0, 2, 3);
    let h1 = joint_entropy(&j, &[y1])?.bits();
    let h2 = joint_entropy(&j, &[y2])?.bits();
    let h2_u1 = conditional_entropy(&j, &[y2], &[u, y1])?.bits();
    let h1_u2 = conditional_entropy(&j, &[y1], &[u, y2])?.bits();
    let i_u1 = mutual_information(&j, &[u], &[y1])?.bits();
    let rhs = [h1, h2, h1 + h2_u1, h2 + h1_u2, i_u1 + h2 + h1_u2];
    Ok(region_from_rows(&THEOREM1_ROWS, &rhs)?.with_provenance("theorem2"))
}

fn first_noisy_row(ch: &Channel) -> usize {
    (0..ch.x_size()).find(|&x| ch.row(x).mass().iter().all(|p| (1.0 - p).abs() > DETERMINISTIC_TOL)).unwrap_or(0)
}

/// Coefficient rows of the more-capable region.
pub const THEOREM3_ROWS: [[i64; 5]; 3] = [[1, 0, 1, 0, 1], [1, 1, 1, 0, 1], [1, 1, 1, 1, 0]];

/// The more-capable capacity region evaluated at `p(u, x)`. Valid as an
/// inner bound on any channel.
pub fn more_capable_region(p_ux: &JointPmf, ch: &Channel) -> Result<RateRegion> {
    let j = ux_joint(p_ux, ch)?;
    let (u, x, y1, y2) = (0, 1, 2, 3);
    let i_u_y2 = mutual_information(&j, &[u], &[y2])?.bits();
    let i_x_y1_u = conditional_mutual_information(&j, &[x], &[y1], &[u])?.bits();
    let i_x_y1 = mutual_information(&j, &[x], &[y1])?.bits();
    let rhs = [i_u_y2, i_u_y2 + i_x_y1_u, i_x_y1];
    Ok(region_from_rows(&THEOREM3_ROWS, &rhs)?.with_provenance("theorem3"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Complementary,
    DegradedRx1,
    DegradedRx2,
    Deterministic,
    MoreCapable,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "complementary" => Self::Complementary,
            "degraded_rx1" => Self::DegradedRx1,
            "degraded_rx2" => Self::DegradedRx2,
            "deterministic" => Self::Deterministic,
            "more_capable" => Self::MoreCapable,
            other => return Err(Error::InvalidArgument(format!("unknown scheme kind {other}"))),
        })
    }
}

fn trivial(name: &str) -> Alphabet {
    Alphabet::indexed(name, 1)
}

/// Auxiliary scheme used by the achievability argument of each channel
/// class. `base` is `p(x)` for the complementary kind and `p(u, x)`
/// otherwise.
pub fn specialize_scheme(kind: SchemeKind, base: &JointPmf, ch: &Channel) -> Result<AuxScheme> {
    let nx = ch.x_size();
    let want_rank = if kind == SchemeKind::Complementary { 1 } else { 2 };
    if base.rank() != want_rank {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} needs a base with {want_rank} axes, got {}",
            base.rank()
        )));
    }
    if base.shape()[want_rank - 1] != nx {
        return Err(Error::AlphabetMismatch(format!(
            "base has {} inputs, channel has {nx}",
            base.shape()[want_rank - 1]
        )));
    }
    let x_axis = base.axes()[want_rank - 1].clone();
    match kind {
        SchemeKind::Complementary => {
            let aux = JointPmf::new(vec![x_axis.renamed("U0"), trivial("U1"), trivial("U2")], base.mass().to_vec())?;
            AuxScheme::new(aux, (0..nx).collect(), nx)
        }
        SchemeKind::DegradedRx1 | SchemeKind::MoreCapable => {
            let u = base.axes()[0].renamed("U0");
            let aux = JointPmf::new(vec![u, x_axis.renamed("U1"), trivial("U2")], base.mass().to_vec())?;
            let gamma = (0..aux.len()).map(|i| i % nx).collect();
            AuxScheme::new(aux, gamma, nx)
        }
        SchemeKind::DegradedRx2 => {
            let u = base.axes()[0].renamed("U0");
            let aux = JointPmf::new(vec![u, trivial("U1"), x_axis.renamed("U2")], base.mass().to_vec())?;
            let gamma = (0..aux.len()).map(|i| i % nx).collect();
            AuxScheme::new(aux, gamma, nx)
        }
        SchemeKind::Deterministic => {
            let (phi1, phi2) =
                ch.deterministic_maps(DETERMINISTIC_TOL).ok_or(Error::NotDeterministic(first_noisy_row(ch)))?;
            let (nu, m1, m2) = (base.shape()[0], ch.y1_size(), ch.y2_size());
            let mut mass = vec![0.0; nu * m1 * m2];
            for u in 0..nu {
                for x in 0..nx {
                    mass[(u * m1 + phi1[x]) * m2 + phi2[x]] += *base.get(&[u, x]);
                }
            }
            let mut lowest = vec![0usize; m1 * m2];
            for x in (0..nx).rev() {
                lowest[phi1[x] * m2 + phi2[x]] = x;
            }
            let gamma = (0..mass.len()).map(|i| lowest[i % (m1 * m2)]).collect();
            let axes = vec![base.axes()[0].renamed("U0"), ch.y1().renamed("U1"), ch.y2().renamed("U2")];
            AuxScheme::new(JointPmf::new(axes, mass)?, gamma, nx)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{regions_equal, Bounds};

    fn px(mass: Vec<f64>) -> JointPmf {
        JointPmf::new(vec![Alphabet::indexed("X", mass.len())], mass).unwrap()
    }

    fn rhs(r: &RateRegion) -> Vec<f64> {
        r.system().inequalities().iter().map(|i| i.rhs).collect()
    }

    #[test]
    fn noiseless_complementary_region() {
        let ch = Channel::noiseless(2);
        let s = specialize_scheme(SchemeKind::Complementary, &px(vec![0.5, 0.5]), &ch).unwrap();
        assert_eq!(s.u_sizes(), [2, 1, 1]);
        let c = mi_constants(&s, &ch).unwrap();
        assert!((c.i_u0u1_y1.bits() - 1.0).abs() < 1e-12);
        let r = theorem1_region(&s, &ch).unwrap();
        let got = rhs(&r);
        for (g, w) in got.iter().zip([1.0, 1.0, 1.0, 1.0, 2.0]) {
            assert!((g - w).abs() < 1e-12);
        }
        assert!(r.contains(&[0.0; 5]));
    }

    #[test]
    fn point_mass_scheme_gives_origin() {
        let ch = Channel::noiseless(2);
        let s = specialize_scheme(SchemeKind::Complementary, &px(vec![1.0, 0.0]), &ch).unwrap();
        let r = theorem1_region(&s, &ch).unwrap();
        assert!(rhs(&r).iter().all(|v| *v == 0.0));
        assert!(r.contains(&[0.0; 5]));
        assert!(!r.contains(&[0.01, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn equal_u1_u2_has_no_binning_cost() {
        // U1 = U2 = X with U0 constant: I(U1;U2|U0) = H(X) > 0, but with U1
        // and U2 both degenerate it vanishes.
        let ch = Channel::noiseless(2);
        let aux = JointPmf::new(
            vec![Alphabet::indexed("U0", 2), Alphabet::indexed("U1", 1), Alphabet::indexed("U2", 1)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let s = AuxScheme::new(aux, vec![0, 1], 2).unwrap();
        assert_eq!(mi_constants(&s, &ch).unwrap().i_u1_u2_given_u0.bits(), 0.0);
    }

    #[test]
    fn raw_projection_on_zero_constants_is_origin() {
        let c = MiConstants::from_bits(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let r = project_raw_to_theorem1(&augment_with_totals(raw_achievability_system(&c).unwrap()).unwrap()).unwrap();
        assert!(r.contains(&[0.0; 5]));
        for k in 0..5 {
            let mut p = [0.0; 5];
            p[k] = 1e-3;
            assert!(!r.contains(&p));
        }
    }

    #[test]
    fn raw_projection_matches_when_binning_is_affordable() {
        let c = MiConstants::from_bits(1.3, 0.9, 0.6, 0.4, 0.3).unwrap();
        let raw = augment_with_totals(raw_achievability_system(&c).unwrap()).unwrap();
        let p = project_raw_to_theorem1(&raw).unwrap();
        let t = theorem1_region_from_constants(&c).unwrap();
        assert!(regions_equal(&p, &t, &RateRegion::default_box()).unwrap());
    }

    #[test]
    fn unaffordable_binning_empties_the_projection() {
        let c = MiConstants::from_bits(1.0, 1.0, 0.1, 0.1, 0.5).unwrap();
        let raw = augment_with_totals(raw_achievability_system(&c).unwrap()).unwrap();
        assert!(project_raw_to_theorem1(&raw).unwrap().is_empty().unwrap());
        assert!(!theorem1_region_from_constants(&c).unwrap().is_empty().unwrap());
    }

    #[test]
    fn blackwell_deterministic_rhs() {
        let ch = Channel::blackwell();
        let p_ux =
            JointPmf::new(vec![Alphabet::indexed("U", 1), Alphabet::indexed("X", 3)], vec![1.0 / 3.0; 3]).unwrap();
        let r = deterministic_region(&p_ux, &ch).unwrap();
        let h = -(1.0f64 / 3.0) * (1.0f64 / 3.0).log2() - (2.0f64 / 3.0) * (2.0f64 / 3.0).log2();
        assert!((rhs(&r)[0] - h).abs() < 1e-12);
        assert!((rhs(&r)[0] - 0.918_30).abs() < 1e-5);

        let s = specialize_scheme(SchemeKind::Deterministic, &p_ux, &ch).unwrap();
        let support: Vec<Vec<usize>> = (0..s.aux_joint().len())
            .filter(|&i| s.aux_joint().mass()[i] > 0.0)
            .map(|i| s.aux_joint().unravel(i))
            .collect();
        assert_eq!(support, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        let t1 = theorem1_region(&s, &ch).unwrap();
        assert!(regions_equal(&t1, &r, &RateRegion::default_box()).unwrap());
    }

    #[test]
    fn noiseless_deterministic_region() {
        let ch = Channel::noiseless(2);
        let p_ux = JointPmf::new(vec![Alphabet::indexed("U", 1), Alphabet::indexed("X", 2)], vec![0.5, 0.5]).unwrap();
        let got = rhs(&deterministic_region(&p_ux, &ch).unwrap());
        for (g, w) in got.iter().zip([1.0, 1.0, 1.0, 1.0, 1.0]) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_rejects_noisy_channel() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.2)).unwrap();
        let p_ux = JointPmf::new(vec![Alphabet::indexed("U", 1), Alphabet::indexed("X", 2)], vec![0.5, 0.5]).unwrap();
        assert!(matches!(deterministic_region(&p_ux, &ch), Err(Error::NotDeterministic(_))));
        assert!(specialize_scheme(SchemeKind::Deterministic, &p_ux, &ch).is_err());
    }

    #[test]
    fn more_capable_degenerate_and_copy_u() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.2)).unwrap();
        let degenerate =
            JointPmf::new(vec![Alphabet::indexed("U", 1), Alphabet::indexed("X", 2)], vec![0.5, 0.5]).unwrap();
        let r = rhs(&more_capable_region(&degenerate, &ch).unwrap());
        assert_eq!(r[0], 0.0);
        assert!((r[1] - r[2]).abs() < 1e-12);

        let copy = JointPmf::new(vec![Alphabet::indexed("U", 2), Alphabet::indexed("X", 2)], vec![0.5, 0.0, 0.0, 0.5])
            .unwrap();
        let r = rhs(&more_capable_region(&copy, &ch).unwrap());
        assert!((r[0] - r[1]).abs() < 1e-12);
        assert!(r[2] > r[0]);
    }

    #[test]
    fn complementary_collapse() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.25)).unwrap();
        let s = specialize_scheme(SchemeKind::Complementary, &px(vec![0.4, 0.6]), &ch).unwrap();
        let c = mi_constants(&s, &ch).unwrap();
        let r = theorem1_region(&s, &ch).unwrap();
        let mut b = Bounds::rate_box(5);
        b.0[1] = (0.0, 0.0);
        b.0[2] = (0.0, 0.0);
        let mut expect = LinearSystem::new(RATE_VARS);
        expect.add_le(&[("R1", 1), ("R4", 1)], c.i_u0u1_y1.bits()).unwrap();
        expect.add_le(&[("R1", 1), ("R5", 1)], c.i_u0u2_y2.bits()).unwrap();
        assert!(r.system().equals(&expect, &b).unwrap());
    }

    #[test]
    fn degraded_kinds_mirror() {
        let ch = Channel::independent(&Channel::bsc_kernel(0.1), &Channel::bsc_kernel(0.3)).unwrap();
        let p_ux = JointPmf::new(vec![Alphabet::indexed("U", 2), Alphabet::indexed("X", 2)], vec![0.3, 0.2, 0.1, 0.4])
            .unwrap();
        let a = specialize_scheme(SchemeKind::DegradedRx1, &p_ux, &ch).unwrap();
        let b = specialize_scheme(SchemeKind::DegradedRx2, &p_ux, &ch.swapped()).unwrap();
        let sw = a.swapped();
        assert_eq!((sw.aux_joint().mass(), sw.gamma()), (b.aux_joint().mass(), b.gamma()));
        let ca = mi_constants(&a, &ch).unwrap().bits();
        let cb = mi_constants(&b, &ch.swapped()).unwrap().bits();
        for (x, y) in [ca[0], ca[1], ca[2], ca[3], ca[4]].iter().zip([cb[1], cb[0], cb[3], cb[2], cb[4]]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
