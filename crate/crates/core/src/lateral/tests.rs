use num_bigint::BigInt;
use rand::SeedableRng;

use super::*;
use crate::algebra::{parse_poly, BaseSetup, FqT, Integers};
use crate::jet::side;

fn zz(p: u64) -> Integers {
    Integers::new(p, p)
}

fn pp<R: Ring>(r: &R, s: &str) -> Poly<R> {
    parse_poly(r, s).unwrap()
}

fn a1(r: &Integers) -> AffinePresentation<Integers> {
    AffinePresentation::affine_space(r, &["x"])
}

fn constant(x: &AffinePresentation<Integers>, pt: &[i64], n: usize) -> ProlongSeq<Integers> {
    ProlongSeq::constant(x, pt.iter().map(|&a| BigInt::from(a)).collect(), n).unwrap()
}

fn gm(r: &Integers) -> AffinePresentation<Integers> {
    AffinePresentation::new(r, vec![Var::jet("x", 0), Var::jet("y", 0)], vec![pp(r, "x*y - 1")]).unwrap()
}

fn weierstrass(r: &Integers) -> AffinePresentation<Integers> {
    AffinePresentation::new(r, vec![Var::jet("x", 0), Var::jet("y", 0)], vec![pp(r, "y^2 - x^3 - x - 1")]).unwrap()
}

fn z(i: u32) -> Var {
    Var::jet("z", i)
}

#[test]
fn fiber_ring_shapes() {
    let r = zz(2);
    let f = fiber_ring(&a1(&r), 2, &constant(&a1(&r), &[0], 2), Labels::Source).unwrap();
    assert_eq!(f.gens(), vec![Var::jet("x", 1), Var::jet("x", 2)]);
    assert!(f.relations.is_empty());

    let g = gm(&r);
    let f = fiber_ring(&g, 1, &constant(&g, &[1, 1], 1), Labels::Source).unwrap();
    assert_eq!(f.gens(), vec![Var::jet("x", 1), Var::jet("y", 1)]);
    assert_eq!(f.relations, vec![pp(&r, "x' + y' + 2*x'*y'")]);

    let c = ProlongSeq::canonical(&a1(&r), 1).unwrap();
    let f = fiber_ring(&a1(&r), 1, &c, Labels::Source).unwrap();
    assert_eq!(f.gens(), vec![Var::jet("x", 1), Var::side("x", 0), Var::side("x", 1)]);
    assert_eq!(f.elim[&Var::jet("x", 0)], Poly::var(&r, Var::side("x", 0)));
}

#[test]
fn ghost_shift_examples() {
    let r = zz(2);
    let x = a1(&r);
    let m0 = lateral_map(&x, 2, &constant(&x, &[0], 2)).unwrap();
    assert_eq!(m0.map.image(z(1)).unwrap(), &pp(&r, "x'^2 + 2*x''"));
    let m3 = lateral_map(&x, 2, &constant(&x, &[3], 2)).unwrap();
    assert_eq!(m3.map.image(z(1)).unwrap(), &pp(&r, "x'^2 + 2*x'' + 36"));

    let c = ProlongSeq::canonical(&x, 1).unwrap();
    let m = lateral_map(&x, 1, &c).unwrap();
    assert_eq!(m.map.source, vec![Var::side("x", 0)]);
    assert_eq!(m.map.image(Var::side("x", 0)).unwrap(), &pp(&r, "s.x^2 + 2*s.x'"));
}

#[test]
fn closed_formula_comparison() {
    let r = zz(2);
    let x = a1(&r);
    for (a, expect) in [(0, None), (1, None), (3, Some(36))] {
        let s = constant(&x, &[a], 2);
        let shift = lateral_map(&x, 2, &s).unwrap();
        let formula = witt_frobenius_formula_map(&x, 2, &s).unwrap();
        assert_eq!(formula.map.image(z(1)).unwrap(), &pp(&r, "x'^2 + 2*x''"));
        let d = compare_maps(&shift, &formula).unwrap();
        match expect {
            None => assert!(d.is_empty()),
            Some(c) => assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(z(1), Poly::int(&r, c))]),
        }
    }
    // componentwise on 𝔸^2
    let x2 = AffinePresentation::affine_space(&r, &["x", "y"]);
    let f = witt_frobenius_formula_map(&x2, 2, &constant(&x2, &[0, 0], 2)).unwrap();
    assert_eq!(f.map.image(Var::jet("z_y", 1)).unwrap(), &pp(&r, "y'^2 + 2*y''"));
    let sh = lateral_map(&x2, 2, &constant(&x2, &[0, 0], 2)).unwrap();
    assert!(compare_maps(&sh, &f).unwrap().is_empty());
    assert!(compare_maps(&sh, &lateral_map(&x, 2, &constant(&x, &[0], 2)).unwrap()).is_err());
}

#[test]
fn lift_and_derivation_at_correction_point() {
    let r = zz(2);
    let x = a1(&r);
    let s = constant(&x, &[3], 2);
    let m = lateral_map(&x, 2, &s).unwrap();
    assert!(verify_lift_of_frobenius(&m, &s).unwrap().all_passed());
    assert!(verify_ghost_shift(&m, &s).unwrap().all_passed());
    let mut rng = Prng::seed_from_u64(3);
    let (d, checks) = pi_derivation_of(&m, &s, &mut rng, 40).unwrap();
    assert!(checks.all_passed());
    assert_eq!(d[&z(1)], pp(&r, "x'' + 18"));
    let s0 = constant(&x, &[0], 2);
    let (d0, _) = pi_derivation_of(&lateral_map(&x, 2, &s0).unwrap(), &s0, &mut rng, 1).unwrap();
    assert_eq!(d0[&z(1)], pp(&r, "x''"));
}

#[test]
fn ghost_shift_soundness_across_kinds() {
    for p in [2u64, 3] {
        let r = zz(p);
        for names in [vec!["x"], vec!["x", "y"]] {
            let x = AffinePresentation::affine_space(&r, &names);
            let zero = vec![0i64; names.len()];
            let one = vec![1i64; names.len()];
            for n in 1..=3 {
                for s in [constant(&x, &zero, n), constant(&x, &one, n), ProlongSeq::canonical(&x, n).unwrap()] {
                    let m = lateral_map(&x, n, &s).unwrap();
                    assert!(verify_ghost_shift(&m, &s).unwrap().all_passed());
                    assert!(verify_lift_of_frobenius(&m, &s).unwrap().all_passed());
                }
            }
        }
    }
}

#[test]
fn char_p_lateral_map() {
    let t: FqT = BaseSetup::char_p(3, 1).unwrap().fq_t().unwrap();
    let x = AffinePresentation::affine_space(&t, &["x"]);
    let s = ProlongSeq::constant(&x, vec![pp(&t, "t + 1").constant_term()], 3).unwrap();
    let m = lateral_map(&x, 3, &s).unwrap();
    assert!(verify_ghost_shift(&m, &s).unwrap().all_passed());
    assert!(verify_lift_of_frobenius(&m, &s).unwrap().all_passed());
}

#[test]
fn gm_descends_exactly() {
    let r = zz(2);
    let g = gm(&r);
    let mut rng = Prng::seed_from_u64(5);
    for n in 1..=3 {
        let s = constant(&g, &[1, 1], n);
        let (m, cert) = descend(&g, n, &s, &mut rng, Trials::default()).unwrap();
        assert_eq!(cert.kind(), "exact", "n={n}");
        if n == 1 {
            assert!(m.map.source.is_empty());
        }
    }
}

#[test]
fn weierstrass_descends_randomized() {
    let r = zz(5);
    let w = weierstrass(&r);
    let s = constant(&w, &[0, 1], 1);
    let mut rng = Prng::seed_from_u64(9);
    let (_, cert) = descend(&w, 1, &s, &mut rng, Trials { points: 200, k: 4 }).unwrap();
    assert_eq!(cert, Certificate::Randomized { points: 200, k: 4 });
}

#[test]
fn affine_space_descent_is_vacuous() {
    let r = zz(3);
    let x = a1(&r);
    let mut rng = Prng::seed_from_u64(0);
    let (_, cert) = descend(&x, 2, &constant(&x, &[2], 2), &mut rng, Trials::default()).unwrap();
    assert_eq!(cert, Certificate::Vacuous);
}

#[test]
fn composite_identity() {
    let r = zz(2);
    let x = a1(&r);
    let mut rng = Prng::seed_from_u64(11);
    for n in 2..=3 {
        for s in [constant(&x, &[0], n), constant(&x, &[3], n), ProlongSeq::canonical(&x, n).unwrap()] {
            let m = lateral_map(&x, n, &s).unwrap();
            let c = verify_composite(&m, &s, CompositeMode::Symbolic, &mut rng, Trials::default()).unwrap();
            assert!(c.all_passed(), "{}", s.label());
        }
    }
    let g = gm(&r);
    let s = constant(&g, &[1, 1], 2);
    let m = lateral_map(&g, 2, &s).unwrap();
    let c = verify_composite(&m, &s, CompositeMode::Pointwise, &mut rng, Trials { points: 100, k: 6 }).unwrap();
    assert!(c.all_passed());
}

#[test]
fn composite_identity_detects_a_wrong_map() {
    let r = zz(2);
    let x = a1(&r);
    let s = constant(&x, &[3], 2);
    let m = witt_frobenius_formula_map(&x, 2, &s).unwrap();
    let mut rng = Prng::seed_from_u64(0);
    let c = verify_composite(&m, &s, CompositeMode::Symbolic, &mut rng, Trials::default()).unwrap();
    assert!(!c.all_passed());
}

#[test]
fn functoriality() {
    for p in [2u64, 3] {
        let r = zz(p);
        for n in 1..=3 {
            let c = functoriality_check(&r, n, |x| ProlongSeq::canonical(x, n)).unwrap();
            assert!(c.all_passed());
            let c = functoriality_check(&r, n, |x| {
                ProlongSeq::constant(x, vec![BigInt::from(3); x.vars().len()], n)
            })
            .unwrap();
            assert!(c.all_passed());
        }
    }
}

#[test]
fn side_vars_are_distinct_from_jet_vars() {
    assert_ne!(side(Var::jet("x", 1)), Var::jet("x", 1));
}

#[test]
fn elimination_pivots_are_units_mod_pi() {
    let r = zz(2);
    let g = gm(&r);
    let m = lateral_map(&g, 2, &constant(&g, &[1, 1], 2)).unwrap();
    let rels = m.upper.all_relations();
    let plan = crate::ideal::triangular_plan(&rels, true).unwrap();
    let pivots: Vec<String> = plan.iter().map(|st| rels[st.rel].coeff_of(st.var, 1).to_string()).collect();
    assert_eq!(pivots, ["2*x'^2 + 4*x'' + 1", "2*x' + 1"]);
    assert!(plan.iter().all(|st| pivot_is_unit_mod_pi(&rels[st.rel].coeff_of(st.var, 1))));
    assert!(!pivot_is_unit_mod_pi(&pp(&r, "2*x + 2")));
    assert!(!pivot_is_unit_mod_pi(&pp(&r, "x + 1")));
}
