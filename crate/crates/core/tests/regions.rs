mod common;

use bcsi::info::channel_mutual_information;
use bcsi::polytope::{regions_equal, LinearSystem, RateRegion};
use bcsi::rate_regions::{
    augment_with_totals, deterministic_region, mi_constants, more_capable_region, project_raw_to_theorem1,
    raw_achievability_system, specialize_scheme, theorem1_region, SchemeKind,
};
use common::*;
use rand::Rng;

#[test]
fn mi_constants_match_entropy_oracle() {
    let mut r = rng(11);
    for _ in 0..30 {
        let nx = r.random_range(2..=3);
        let ch = {
            let (m1, m2) = (r.random_range(2..=3), r.random_range(2..=3));
            random_channel(&mut r, nx, m1, m2)
        };
        let s = random_scheme(&mut r, [2, 2, 2], nx);
        let t = Table::induced(&s, &ch);
        let want = [
            t.cmi(&[0, 1], &[4], &[]),
            t.cmi(&[0, 2], &[5], &[]),
            t.cmi(&[1], &[4], &[0]),
            t.cmi(&[2], &[5], &[0]),
            t.cmi(&[1], &[2], &[0]),
        ];
        let got = mi_constants(&s, &ch).unwrap().bits();
        for (g, w) in got.iter().zip(want) {
            assert!((g - w.max(0.0)).abs() < 1e-10, "{g} vs {w}");
        }
    }
}

/// The projection always equals the five inequalities intersected with
/// `I(U1;U2|U0) <= I(U1;Y1|U0) + I(U2;Y2|U0)`, which the binning step
/// needs and the elimination makes explicit.
#[test]
fn projection_is_theorem1_when_binning_is_affordable() {
    let mut r = rng(5);
    let (mut affordable, mut unaffordable) = (0, 0);
    for _ in 0..40 {
        let nx = r.random_range(2..=3);
        let ch = {
            let (m1, m2) = (r.random_range(2..=3), r.random_range(2..=3));
            random_channel(&mut r, nx, m1, m2)
        };
        let s = random_scheme(&mut r, [2, 2, 2], nx);
        let consts = mi_constants(&s, &ch).unwrap();
        let [_, _, c, d, e] = consts.bits();
        let proj =
            project_raw_to_theorem1(&augment_with_totals(raw_achievability_system(&consts).unwrap()).unwrap()).unwrap();
        let t1 = theorem1_region(&s, &ch).unwrap();
        if e <= c + d {
            affordable += 1;
            assert!(regions_equal(&proj, &t1, &RateRegion::default_box()).unwrap());
        } else if e > c + d + 1e-7 {
            unaffordable += 1;
            assert!(proj.is_empty().unwrap());
        }
    }
    assert!(affordable > 0 && unaffordable > 0, "{affordable} / {unaffordable}");
}

#[test]
fn more_capable_scheme_reproduces_its_region() {
    let mut r = rng(8);
    for _ in 0..10 {
        let nx = r.random_range(2..=3);
        let ch = {
            let (m1, m2) = (r.random_range(2..=3), r.random_range(2..=3));
            random_channel(&mut r, nx, m1, m2)
        };
        let p = {
            let nu = r.random_range(1..=3);
            random_ux(&mut r, nu, nx)
        };
        let s = specialize_scheme(SchemeKind::MoreCapable, &p, &ch).unwrap();
        let t1 = theorem1_region(&s, &ch).unwrap();
        let t3 = more_capable_region(&p, &ch).unwrap();
        assert!(regions_equal(&t1, &t3, &RateRegion::default_box()).unwrap());
        let t = Table::ux(&p, &ch);
        let want = [t.cmi(&[0], &[3], &[]), t.cmi(&[0], &[3], &[]) + t.cmi(&[1], &[2], &[0]), t.cmi(&[1], &[2], &[])];
        for (i, w) in t3.system().inequalities().iter().zip(want) {
            assert!((i.rhs - w).abs() < 1e-10);
        }
    }
}

#[test]
fn deterministic_scheme_reproduces_its_region() {
    let mut r = rng(9);
    for _ in 0..10 {
        let nx = r.random_range(2..=4);
        let ch = {
            let (m1, m2) = (r.random_range(2..=3), r.random_range(2..=3));
            random_deterministic(&mut r, nx, m1, m2)
        };
        let p = {
            let nu = r.random_range(1..=3);
            random_ux(&mut r, nu, nx)
        };
        let s = specialize_scheme(SchemeKind::Deterministic, &p, &ch).unwrap();
        let t1 = theorem1_region(&s, &ch).unwrap();
        let t2 = deterministic_region(&p, &ch).unwrap();
        assert!(regions_equal(&t1, &t2, &RateRegion::default_box()).unwrap());
    }
}

#[test]
fn complementary_scheme_gives_two_pentagon_faces() {
    let mut r = rng(10);
    for _ in 0..5 {
        let ch = random_channel(&mut r, 3, 2, 3);
        let px = simplex(&mut r, 3);
        let base =
            bcsi::probability::JointPmf::new(vec![bcsi::probability::Alphabet::indexed("X", 3)], px.clone()).unwrap();
        let s = specialize_scheme(SchemeKind::Complementary, &base, &ch).unwrap();
        let t1 = theorem1_region(&s, &ch).unwrap();
        let ix1 = channel_mutual_information(&px, &ch.y1_kernel());
        let ix2 = channel_mutual_information(&px, &ch.y2_kernel());
        let mut want = LinearSystem::new(bcsi::polytope::RATE_VARS);
        want.add_le(&[("R1", 1), ("R4", 1)], ix1).unwrap();
        want.add_le(&[("R1", 1), ("R5", 1)], ix2).unwrap();
        want.add_eq(&[("R2", 1)], 0.0).unwrap();
        want.add_eq(&[("R3", 1)], 0.0).unwrap();
        let mut got = t1.system().clone();
        got.add_eq(&[("R2", 1)], 0.0).unwrap();
        got.add_eq(&[("R3", 1)], 0.0).unwrap();
        assert!(got.equals(&want, &RateRegion::default_box()).unwrap());
    }
}

#[test]
fn swapping_receivers_mirrors_the_region() {
    let mut r = rng(12);
    for _ in 0..10 {
        let ch = random_channel(&mut r, 2, 2, 3);
        let s = random_scheme(&mut r, [2, 2, 2], 2);
        let a = mi_constants(&s, &ch).unwrap().bits();
        let b = mi_constants(&s.swapped(), &ch.swapped()).unwrap().bits();
        let mirrored = [b[1], b[0], b[3], b[2], b[4]];
        for (x, y) in a.iter().zip(mirrored) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
