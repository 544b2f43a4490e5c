use num_bigint::BigInt;
use rand::SeedableRng;

use super::*;
use crate::algebra::{parse_poly, BaseSetup, FqT, Integers};

fn zz(p: u64) -> Integers {
    Integers::new(p, p)
}

fn small(points: usize, k: u32) -> Trials {
    Trials { points, k }
}

#[test]
fn preset_names() {
    assert_eq!(PresetName::parse("GA").unwrap(), PresetName::Ga);
    assert_eq!(PresetName::parse("weierstrass").unwrap(), PresetName::Weierstrass(1, 1));
    assert_eq!(PresetName::parse("weierstrass(2, -3)").unwrap(), PresetName::Weierstrass(2, -3));
    assert!(PresetName::parse("torus").is_err());
    assert!(PresetName::parse("weierstrass(1)").is_err());
}

#[test]
fn presets() {
    let r = zz(5);
    let ga = preset(&r, &PresetName::Ga).unwrap();
    assert!(ga.presentation.relations().is_empty());
    assert_eq!(ga.point, vec![BigInt::from(0)]);
    let gm = preset(&r, &PresetName::Gm).unwrap();
    assert_eq!(gm.presentation.relations()[0], parse_poly(&r, "x*y - 1").unwrap());
    let w = preset(&r, &PresetName::Weierstrass(1, 1)).unwrap();
    assert_eq!(w.presentation.relations()[0], parse_poly(&r, "y^2 - x^3 - x - 1").unwrap());
    assert_eq!(w.point, vec![BigInt::from(0), BigInt::from(1)]);
    assert!(w.law.is_none());
    assert!(preset(&r, &PresetName::Weierstrass(0, 0)).is_err());
}

#[test]
fn kernel_rings() {
    let r = zz(2);
    let ga = preset(&r, &PresetName::Ga).unwrap();
    assert_eq!(kernel_ring(&ga, 2).unwrap().gens(), vec![Var::jet("x", 1), Var::jet("x", 2)]);
    assert!(kernel_ring(&ga, 0).unwrap().gens().is_empty());
    let gm = preset(&r, &PresetName::Gm).unwrap();
    let k = kernel_ring(&gm, 1).unwrap();
    assert_eq!(k.gens(), vec![Var::jet("x", 1), Var::jet("y", 1)]);
    assert_eq!(k.relations.len(), 1);
}

#[test]
fn kernel_is_a_prolongation_sequence() {
    for p in [2u64, 3] {
        let r = zz(p);
        let mut rng = Prng::seed_from_u64(p);
        for name in [PresetName::Ga, PresetName::Gm] {
            let e = preset(&r, &name).unwrap();
            let c = verify_kernel_prolongation(&e, 3, &mut rng, small(50, 6)).unwrap();
            assert!(c.all_passed(), "{name:?} p={p}: {:?}", c.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn correction_point_still_prolongs() {
    let r = zz(2);
    let x = AffinePresentation::affine_space(&r, &["x"]);
    let s = ProlongSeq::constant(&x, vec![BigInt::from(3)], 3).unwrap();
    let mut rng = Prng::seed_from_u64(0);
    let c = verify_prolongation_at(&x, &s, 3, &mut rng, small(10, 6), false).unwrap();
    assert!(c.all_passed());
    let c = verify_prolongation_at(&x, &s, 2, &mut rng, small(10, 6), true).unwrap();
    assert!(!c.all_passed());
}

#[test]
fn group_compatibility() {
    let r = zz(2);
    let mut rng = Prng::seed_from_u64(21);
    for name in [PresetName::Ga, PresetName::Gm] {
        let e = preset(&r, &name).unwrap();
        for n in 2..=3 {
            assert!(group_compat_check(&e, n, &mut rng, small(100, 6)).unwrap().all_passed(), "{name:?} n={n}");
        }
    }
    let e = preset(&zz(3), &PresetName::Gm).unwrap();
    assert!(group_compat_check(&e, 2, &mut rng, small(100, 5)).unwrap().all_passed());
}

#[test]
fn kernel_group_law() {
    let mut rng = Prng::seed_from_u64(4);
    for p in [2u64, 3] {
        for name in [PresetName::Ga, PresetName::Gm] {
            let e = preset(&zz(p), &name).unwrap();
            assert!(kernel_law_check(&e, 2, &mut rng, small(60, 5)).unwrap().all_passed());
        }
    }
}

#[test]
fn kernel_group_law_char_p() {
    let t: FqT = BaseSetup::char_p(2, 1).unwrap().fq_t().unwrap();
    let mut rng = Prng::seed_from_u64(8);
    let e = preset(&t, &PresetName::Gm).unwrap();
    assert!(kernel_law_check(&e, 2, &mut rng, small(40, 6)).unwrap().all_passed());
    assert!(group_compat_check(&e, 2, &mut rng, small(40, 6)).unwrap().all_passed());
}

#[test]
fn short_exact_sequence() {
    let r = zz(2);
    let mut rng = Prng::seed_from_u64(13);
    for name in [PresetName::Ga, PresetName::Gm] {
        let e = preset(&r, &name).unwrap();
        match ses_check(&e, 2, &mut rng, small(100, 6)).unwrap() {
            SesOutcome::Checked(c) => assert!(c.all_passed(), "{:?}", c.failures().collect::<Vec<_>>()),
            SesOutcome::Skipped(_) => panic!("unexpected skip"),
        }
    }
    let w = preset(&zz(5), &PresetName::Weierstrass(1, 1)).unwrap();
    assert!(matches!(ses_check(&w, 1, &mut rng, small(1, 4)).unwrap(), SesOutcome::Skipped(_)));
}
