use std::collections::HashMap;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;

use super::*;
use crate::algebra::{parse_poly, BaseSetup, FqT, Integers, PointRing, ZMod};
use crate::witt::ghost_polys;

fn zz(p: u64) -> Integers {
    Integers::new(p, p)
}

fn ft(p: u64) -> FqT {
    BaseSetup::char_p(p, 1).unwrap().fq_t().unwrap()
}

fn gm(r: &Integers) -> AffinePresentation<Integers> {
    let rel = parse_poly(r, "x*y - 1").unwrap();
    AffinePresentation::new(r, vec![Var::jet("x", 0), Var::jet("y", 0)], vec![rel]).unwrap()
}

fn pp<R: crate::algebra::Ring>(r: &R, s: &str) -> Poly<R> {
    parse_poly(r, s).unwrap()
}

#[test]
fn delta_examples() {
    let r = zz(2);
    assert_eq!(delta_poly(&pp(&r, "x")).unwrap(), pp(&r, "x'"));
    assert_eq!(delta_poly(&pp(&r, "x*y")).unwrap(), pp(&r, "x^2*y' + y^2*x' + 2*x'*y'"));
    assert_eq!(delta_poly(&pp(&r, "x + y")).unwrap(), pp(&r, "x' + y' - x*y"));
    assert_eq!(delta_poly(&pp(&r, "3")).unwrap(), pp(&r, "-3"));
}

#[test]
fn phi_examples() {
    let r = zz(2);
    let x = AffinePresentation::affine_space(&r, &["x"]);
    let phi = phi_map(&x, 1).unwrap();
    assert_eq!(phi.image(Var::jet("x", 0)).unwrap(), &pp(&r, "x^2 + 2*x'"));
    let t = ft(2);
    let x = AffinePresentation::affine_space(&t, &["x"]);
    let phi = phi_map(&x, 1).unwrap();
    assert_eq!(phi.image(Var::jet("x", 0)).unwrap(), &pp(&t, "x^2 + t*x'"));
    assert_eq!(phi_poly(&pp(&r, "5")).unwrap(), pp(&r, "5"));
    let u = u_map(&x, 2).unwrap();
    assert_eq!(u.image(Var::jet("x", 1)).unwrap(), &pp(&t, "x'"));
}

#[test]
fn jet_ring_shapes() {
    let r = zz(2);
    let a1 = AffinePresentation::affine_space(&r, &["x"]);
    let j = jet_ring(&a1, 2).unwrap();
    assert_eq!(j.vars, vec![Var::jet("x", 0), Var::jet("x", 1), Var::jet("x", 2)]);
    assert!(j.relations.is_empty());
    let a2 = AffinePresentation::affine_space(&r, &["x", "y"]);
    assert_eq!(jet_ring(&a2, 3).unwrap().vars.len(), 8);

    let pt = AffinePresentation::new(&r, vec![Var::jet("x", 0)], vec![pp(&r, "x")]).unwrap();
    assert_eq!(jet_ring(&pt, 1).unwrap().relations, vec![pp(&r, "x"), pp(&r, "x'")]);

    // δ(xy − 1) by hand: ((x²+2x')(y²+2y') − 1 − (xy−1)²)/2
    let j = jet_ring(&gm(&r), 1).unwrap();
    assert_eq!(j.relations.len(), 2);
    assert_eq!(j.relations[1], pp(&r, "x^2*y' + x'*y^2 + 2*x'*y' + x*y - 1"));
}

#[test]
fn presentation_rejects_undeclared_vars() {
    let r = zz(2);
    let rel = pp(&r, "x*z");
    assert!(AffinePresentation::new(&r, vec![Var::jet("x", 0)], vec![rel]).is_err());
}

#[test]
fn phi_is_a_frobenius_lift_on_generators() {
    for r in [zz(2), zz(3)] {
        let x = AffinePresentation::affine_space(&r, &["x", "y"]);
        for n in 1..=3 {
            let phi = phi_map(&x, n).unwrap();
            for g in jet_vars(x.vars(), n - 1) {
                let d = phi.image(g).unwrap() - &Poly::var(&r, g).q_pow();
                assert!(d.divisible_by_pi(), "{g} at n={n}");
            }
        }
    }
    let t = ft(3);
    let x = AffinePresentation::affine_space(&t, &["x"]);
    let phi = phi_map(&x, 2).unwrap();
    for g in jet_vars(x.vars(), 1) {
        assert!((phi.image(g).unwrap() - &Poly::var(&t, g).q_pow()).divisible_by_pi());
    }
}

#[test]
fn tower_coherence() {
    let r = zz(2);
    let f = pp(&r, "x*y - 1");
    let d1 = delta_poly(&f).unwrap();
    let d2 = delta_poly(&d1).unwrap();
    assert_eq!(d1, delta_poly_at(&f, 3).unwrap());
    assert_eq!(d2, delta_poly_at(&d1, 3).unwrap());
    assert_eq!(d2, delta_poly_at(&delta_poly_at(&f, 2).unwrap(), 4).unwrap());
}

#[test]
fn ghost_jet_consistency() {
    // Evaluating ghost components after φ^# equals the ghost left shift.
    let r = zz(2);
    let n = 3;
    let zm: ZMod = r.point_ring(6);
    let phi = phi_map(&AffinePresentation::affine_space(&r, &["x"]), n).unwrap();
    let to_jet = |p: &Poly<Integers>| p.rename(|w| Var::jet("x", w.order()));
    let ghosts: Vec<Poly<Integers>> = ghost_polys(&r, n).iter().map(to_jet).collect();
    let mut rng = Prng::seed_from_u64(7);
    for _ in 0..200 {
        let pt: HashMap<Var, u64> = (0..=n as u32).map(|i| (Var::jet("x", i), zm.random(&mut rng))).collect();
        for i in 0..n {
            let lhs = phi.apply(&ghosts[i]).unwrap();
            let a = lhs.eval(&zm, |c| r.reduce(c, &zm), &pt).unwrap();
            let b = ghosts[i + 1].eval(&zm, |c| r.reduce(c, &zm), &pt).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn prolongation_sequences() {
    let r = zz(2);
    let a1 = AffinePresentation::affine_space(&r, &["x"]);
    let s = ProlongSeq::constant(&a1, vec![BigInt::from(0)], 2).unwrap();
    assert_eq!(s.a_at(2).unwrap().image(Var::jet("x", 0)).unwrap(), &Poly::zero(&r));
    let g = gm(&r);
    let s = ProlongSeq::constant(&g, vec![BigInt::from(1), BigInt::from(1)], 2).unwrap();
    assert_eq!(s.label(), "constant(1,1)");
    assert!(ProlongSeq::constant(&g, vec![BigInt::from(2), BigInt::from(1)], 2).is_err());
    let c = ProlongSeq::canonical(&a1, 2).unwrap();
    assert_eq!(c.levels[2].gens, vec![Var::side("x", 0), Var::side("x", 1), Var::side("x", 2)]);
    assert_eq!(c.a_at(1).unwrap().image(Var::jet("x", 0)).unwrap(), &Poly::var(&r, Var::side("x", 0)));
}

#[test]
fn prolong_check_passes_and_detects() {
    let r = zz(2);
    let mut rng = Prng::seed_from_u64(1);
    let a1 = AffinePresentation::affine_space(&r, &["x"]);
    let s = ProlongSeq::constant(&a1, vec![BigInt::from(3)], 2).unwrap();
    assert!(prolong_check(&s, &mut rng, 50, 6).unwrap().all_passed());
    let c = ProlongSeq::canonical(&a1, 2).unwrap();
    assert!(prolong_check(&c, &mut rng, 50, 6).unwrap().all_passed());
    let c = ProlongSeq::canonical(&gm(&r), 2).unwrap();
    assert!(prolong_check(&c, &mut rng, 50, 6).unwrap().all_passed());

    // φ^#(x) = x is not congruent to x^2 mod 2.
    let x0 = Var::side("x", 0);
    let x1 = Var::side("x", 1);
    let levels = vec![
        Level { gens: vec![x0], relations: vec![] },
        Level { gens: vec![x0, x1], relations: vec![] },
    ];
    let mut u = RingMap::identity(&r, &[x0]);
    u.target = vec![x0, x1];
    let phi = u.clone();
    let a = RingMap::new(vec![Var::jet("x", 0)], vec![x0], [(Var::jet("x", 0), Poly::var(&r, x0))].into()).unwrap();
    let seq = ProlongSeq { kind: SeqKind::Custom, base: a1.clone(), levels: levels.clone(), u_maps: vec![u.clone()], phi_maps: vec![phi.clone()], a_map: a.clone() };
    let checks = prolong_check(&seq, &mut rng, 20, 6).unwrap();
    assert!(!checks.0[0].passed);
    let err = ProlongSeq::custom(&a1, levels, vec![u], vec![phi], a, &mut rng, 20, 6).unwrap_err();
    assert!(matches!(err, Error::Verification { .. }));
}

fn axioms_hold<R: SymbolicRing>(sym: &R, seed: u64) -> bool {
    let mut rng = Prng::seed_from_u64(seed);
    let gens = jet_vars(&[Var::jet("x", 0), Var::jet("y", 0)], 1);
    let f = crate::ideal::random_poly(sym, &gens, &mut rng);
    let g = crate::ideal::random_poly(sym, &gens, &mut rng);
    let pi = Poly::constant(sym, sym.pi());
    let (df, dg) = (delta_poly_at(&f, 2).unwrap(), delta_poly_at(&g, 2).unwrap());
    let add = &(&(&delta_poly_at(&(&f + &g), 2).unwrap() - &df) - &dg) - &c_pi(&f, &g).unwrap();
    let dfg = delta_poly_at(&(&f * &g), 2).unwrap();
    let mul = &(&(&dfg - &(&f.q_pow() * &dg)) - &(&g.q_pow() * &df)) - &(&pi * &(&df * &dg));
    add.is_zero() && mul.is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn delta_axioms_char_zero(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        prop_assert!(axioms_hold(&zz(p), seed));
    }

    #[test]
    fn delta_axioms_char_p(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        prop_assert!(axioms_hold(&ft(p), seed));
    }
}

#[test]
fn c_pi_vanishes_in_char_p() {
    let t = ft(3);
    assert!(c_pi(&pp(&t, "x + t"), &pp(&t, "y^2")).unwrap().is_zero());
    let r = zz(2);
    assert_eq!(c_pi(&pp(&r, "x"), &pp(&r, "y")).unwrap(), pp(&r, "-x*y"));
}
