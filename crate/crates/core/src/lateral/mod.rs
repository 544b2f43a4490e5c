//! Fiber products J^nX ×_X S^n and the lateral Frobenius between them.
//!
//! The map is built from the ghost left shift: with x^(0) identified with
//! a^#(x) on the source and z^(0) with φ_S(a^#(x)) on the target, the images of
//! z^(1), …, z^(n−1) are solved from w_i(z) = w_{i+1}(x) by exact division by
//! π. When δ(a) ≠ 0 this differs from the Witt Frobenius applied to
//! (x^(1), …, x^(n)) by a correction term; both maps are available.

use std::collections::BTreeMap;

use crate::algebra::{PiRing, Poly, Ring, SymbolicRing, Var, VarKind};
use crate::error::{Error, Result};
use crate::ideal::{exact_certificate, random_poly, triangular_plan, PointSampler};
use crate::jet::{c_pi, frobenius_images, jet_ring, jet_vars, AffinePresentation, Level, ProlongSeq, RingMap};
use crate::report::Checks;
use crate::witt::{frobenius_polys, ghost_of, unghost_polys};
use crate::Prng;

/// Which copy of the jet variables a fiber ring uses: the source of 𝔣 keeps
/// the scheme's names, the target is relabeled z (or z_<name>).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Labels {
    Source,
    Target,
}

/// O(J^nX ×_X S^n): jet variables of orders 1..n over O(S^n), with the
/// order-0 variables eliminated through a^#.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberRing<R: PiRing> {
    pub n: usize,
    pub base: AffinePresentation<R>,
    pub labels: Labels,
    pub jet_gens: Vec<Var>,
    pub s_level: Level<R>,
    /// x ↦ a^#(x) ∈ O(S^n), keyed by base variable.
    pub elim: BTreeMap<Var, Poly<R>>,
    pub relations: Vec<Poly<R>>,
}

/// Renames a base jet variable for the given labeling.
pub fn label_var(base: &[Var], labels: Labels, v: Var) -> Var {
    if labels == Labels::Source || v.kind() != VarKind::Jet {
        return v;
    }
    if base.len() == 1 {
        v.with_name("z")
    } else {
        v.with_name(&format!("z_{}", v.name()))
    }
}

pub fn fiber_ring<R: PiRing>(x: &AffinePresentation<R>, n: usize, s: &ProlongSeq<R>, labels: Labels) -> Result<FiberRing<R>> {
    if n > s.n_max() {
        return Err(Error::Shape(format!("S has levels up to {}, need {n}", s.n_max())));
    }
    let ring = x.ring();
    let a = s.a_at(n)?;
    let elim: BTreeMap<Var, Poly<R>> = x.vars().iter().map(|&v| Ok((v, a.image(v)?.clone()))).collect::<Result<_>>()?;
    let jets = jet_ring(x, n)?;
    let mut relations = Vec::new();
    for r in &jets.relations {
        let r = r.subst_partial(&elim).rename(|v| label_var(x.vars(), labels, v));
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Err(Error::Construction(format!(
                "a^# does not land on X: a relation becomes {}",
                ring.format_elem(&r.constant_term())
            )));
        }
        relations.push(r);
    }
    let jet_gens = (1..=n as u32)
        .flat_map(|i| x.vars().iter().map(move |v| v.with_order(i)))
        .map(|v| label_var(x.vars(), labels, v))
        .collect();
    Ok(FiberRing { n, base: x.clone(), labels, jet_gens, s_level: s.levels[n].clone(), elim, relations })
}

impl<R: PiRing> FiberRing<R> {
    pub fn gens(&self) -> Vec<Var> {
        let mut g = self.jet_gens.clone();
        g.extend(self.s_level.gens.iter().copied());
        g
    }

    pub fn all_relations(&self) -> Vec<Poly<R>> {
        let mut r = self.relations.clone();
        r.extend(self.s_level.relations.iter().cloned());
        r
    }

    pub fn label(&self, v: Var) -> Var {
        label_var(self.base.vars(), self.labels, v)
    }

    /// l^# : O(J^nX ⊗ S^n) → O(J^nX ×_X S^n), re-imposing x^(0) = a^#(x).
    pub fn l_map(&self) -> RingMap<R> {
        let ring = self.base.ring();
        let mut images = BTreeMap::new();
        for &v in self.base.vars() {
            images.insert(v, self.elim[&v].clone());
            for i in 1..=self.n as u32 {
                images.insert(v.with_order(i), Poly::var(ring, self.label(v.with_order(i))));
            }
        }
        for &g in &self.s_level.gens {
            images.insert(g, Poly::var(ring, g));
        }
        let mut source = jet_vars(self.base.vars(), self.n);
        source.extend(self.s_level.gens.iter().copied());
        RingMap { source, target: self.gens(), images }
    }

    /// The Witt vector (a^#(x), x^(1), …, x^(n)) for base variable `v`.
    pub fn witt_point(&self, v: Var) -> Vec<Poly<R>> {
        let ring = self.base.ring();
        let mut coords = vec![self.elim[&v].clone()];
        coords.extend((1..=self.n as u32).map(|i| Poly::var(ring, self.label(v.with_order(i)))));
        coords
    }
}

/// 𝔣^# : O(J^{n−1}X ×_X S^{n−1}) → O(J^nX ×_X S^n).
#[derive(Clone, Debug, PartialEq)]
pub struct LateralMap<R: PiRing> {
    pub n: usize,
    /// Level n−1, target labels.
    pub lower: FiberRing<R>,
    /// Level n, source labels.
    pub upper: FiberRing<R>,
    pub map: RingMap<R>,
    /// The ghost identities solved during construction, as text.
    pub ghost_certificate: Vec<String>,
}

fn fiber_pair<R: PiRing>(x: &AffinePresentation<R>, n: usize, s: &ProlongSeq<R>) -> Result<(FiberRing<R>, FiberRing<R>)> {
    if n == 0 {
        return Err(Error::Shape("the lateral Frobenius needs n >= 1".into()));
    }
    Ok((fiber_ring(x, n - 1, s, Labels::Target)?, fiber_ring(x, n, s, Labels::Source)?))
}

/// The ghost-shift construction on the ambient affine space of `x` (its
/// relations are ignored here; see [`descend`]).
pub fn lateral_map<R: PiRing>(x: &AffinePresentation<R>, n: usize, s: &ProlongSeq<R>) -> Result<LateralMap<R>> {
    let (lower, upper) = fiber_pair(x, n, s)?;
    let ring = x.ring();
    let phi_s = s.phi(n);
    let mut images = BTreeMap::new();
    let mut cert = Vec::new();
    for &v in x.vars() {
        let ghosts = ghost_of(ring, &upper.witt_point(v));
        let z0 = phi_s.apply(&lower.elim[&v])?;
        let mut targets = vec![z0];
        targets.extend(ghosts[2..].iter().cloned());
        let coords = unghost_polys(ring, &targets, &format!("lateral map for {v} at n={n}"))?;
        for (i, c) in coords.into_iter().enumerate().skip(1) {
            let z = lower.label(v.with_order(i as u32));
            cert.push(format!("w_{i}(z) = w_{}(x) = {} solves {z} ↦ {c}", i + 1, ghosts[i + 1]));
            images.insert(z, c);
        }
    }
    for &g in &lower.s_level.gens {
        images.insert(g, phi_s.image(g)?.clone());
    }
    let map = RingMap::new(lower.gens(), upper.gens(), images)?;
    Ok(LateralMap { n, lower, upper, map, ghost_certificate: cert })
}

/// The Witt Frobenius applied to (x^(1), …, x^(n)), with φ_S on S.
pub fn witt_frobenius_formula_map<R: PiRing>(x: &AffinePresentation<R>, n: usize, s: &ProlongSeq<R>) -> Result<LateralMap<R>> {
    let (lower, upper) = fiber_pair(x, n, s)?;
    let ring = x.ring();
    let mut images = BTreeMap::new();
    if n >= 2 {
        let table = frobenius_polys(ring, n - 1)?;
        for &v in x.vars() {
            for (i, f) in table.iter().enumerate() {
                let z = lower.label(v.with_order(i as u32 + 1));
                images.insert(z, f.rename(|w| upper.label(v.with_order(w.order() + 1))));
            }
        }
    }
    for &g in &lower.s_level.gens {
        images.insert(g, s.phi(n).image(g)?.clone());
    }
    let map = RingMap::new(lower.gens(), upper.gens(), images)?;
    Ok(LateralMap { n, lower, upper, map, ghost_certificate: Vec::new() })
}

/// Nonzero per-generator differences m1 − m2.
pub fn compare_maps<R: PiRing>(m1: &LateralMap<R>, m2: &LateralMap<R>) -> Result<BTreeMap<Var, Poly<R>>> {
    if m1.map.source != m2.map.source || m1.map.target != m2.map.target {
        return Err(Error::Shape("maps have different source or target presentations".into()));
    }
    let mut out = BTreeMap::new();
    for &g in &m1.map.source {
        let d = m1.map.image(g)? - m2.map.image(g)?;
        if !d.is_zero() {
            out.insert(g, d);
        }
    }
    Ok(out)
}

/// Evidence that the ambient map sends the target relations into the source
/// relation ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// No relations on either side.
    Vacuous,
    /// Triangular elimination reduced every image relation to zero.
    Exact { steps: Vec<String> },
    /// Every image relation vanished at `points` sampled points over R/π^k.
    Randomized { points: usize, k: u32 },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Vacuous => "vacuous",
            Certificate::Exact { .. } => "exact",
            Certificate::Randomized { .. } => "randomized",
        }
    }

    pub fn detail(&self) -> String {
        match self {
            Certificate::Vacuous => "no relations".into(),
            Certificate::Exact { steps } => format!("triangular elimination: {}", steps.join("; ")),
            Certificate::Randomized { points, k } => format!("{points} points over R/π^{k}, 0 failures"),
        }
    }
}

/// Randomized-check parameters.
#[derive(Clone, Copy, Debug)]
pub struct Trials {
    pub points: usize,
    pub k: u32,
}

impl Default for Trials {
    fn default() -> Self {
        Trials { points: 1000, k: crate::algebra::setup::DEFAULT_TRUNC_K }
    }
}

fn format_point<P: Ring>(ring: &P, pt: &crate::ideal::Point<P>) -> String {
    let mut coords: Vec<(Var, String)> = pt.iter().map(|(v, c)| (*v, ring.format_elem(c))).collect();
    coords.sort_by(|a, b| a.0.structural_cmp(&b.0));
    let text: Vec<String> = coords.iter().map(|(v, c)| format!("{v}={c}")).collect();
    format!("{{{}}}", text.join(", "))
}

/// Restricts the ambient lateral map to the quotient presentations, with a
/// certificate of well-definedness.
pub fn descend<S: SymbolicRing>(
    x: &AffinePresentation<S>,
    n: usize,
    s: &ProlongSeq<S>,
    rng: &mut Prng,
    trials: Trials,
) -> Result<(LateralMap<S>, Certificate)> {
    let m = lateral_map(x, n, s)?;
    let cert = certify(&m, rng, trials)?;
    Ok((m, cert))
}

/// Elimination clears denominators by the pivot coefficients, so an exact
/// certificate is only sound where they are invertible. A pivot ≡ unit
/// constant mod π is a unit π-adically and on every R/π^k.
fn pivot_is_unit_mod_pi<S: PiRing>(c: &Poly<S>) -> bool {
    let c0 = c.constant_term();
    let rest = c - &Poly::constant(c.ring(), c0.clone());
    !c.ring().divisible_by_pi(&c0) && rest.divisible_by_pi()
}

pub fn certify<S: SymbolicRing>(m: &LateralMap<S>, rng: &mut Prng, trials: Trials) -> Result<Certificate> {
    let sym = m.upper.base.ring();
    let upper_rels = m.upper.all_relations();
    let images = m.lower.all_relations().iter().map(|r| m.map.apply(r)).collect::<Result<Vec<_>>>()?;
    if upper_rels.is_empty() {
        if let Some(h) = images.iter().find(|h| !h.is_zero()) {
            return Err(Error::Verification { check: "descent".into(), witness: format!("nonzero image relation {h}") });
        }
        return Ok(Certificate::Vacuous);
    }
    let plan = triangular_plan(&upper_rels, true).filter(|plan| {
        plan.iter().all(|st| pivot_is_unit_mod_pi(&upper_rels[st.rel].coeff_of(st.var, 1)))
    });
    if let Some(plan) = plan {
        return match exact_certificate(&images, &upper_rels, &plan) {
            Ok(()) => Ok(Certificate::Exact {
                steps: plan.iter().map(|st| format!("solve relation {} for {}", st.rel, st.var)).collect(),
            }),
            Err((i, rem)) => Err(Error::Verification {
                check: "descent".into(),
                witness: format!("image of relation {i} leaves remainder {rem}"),
            }),
        };
    }
    let target = sym.point_ring(trials.k);
    let sampler = PointSampler::new(sym, &target, &m.upper.gens(), &upper_rels)?;
    for _ in 0..trials.points {
        let pt = sampler.sample(rng)?;
        for h in &images {
            if !target.is_zero(&sampler.eval(h, &pt)?) {
                return Err(Error::Verification {
                    check: "descent".into(),
                    witness: format!("{h} ≠ 0 at {}", format_point(&target, &pt)),
                });
            }
        }
    }
    Ok(Certificate::Randomized { points: trials.points, k: trials.k })
}

/// u^# : lower fiber ring → upper fiber ring.
pub fn u_fiber<R: PiRing>(m: &LateralMap<R>, s: &ProlongSeq<R>) -> Result<RingMap<R>> {
    let ring = m.upper.base.ring();
    let mut images = BTreeMap::new();
    for &v in m.upper.base.vars() {
        for i in 1..m.n as u32 {
            images.insert(m.lower.label(v.with_order(i)), Poly::var(ring, v.with_order(i)));
        }
    }
    for &g in &m.lower.s_level.gens {
        images.insert(g, s.u(m.n).image(g)?.clone());
    }
    RingMap::new(m.lower.gens(), m.upper.gens(), images)
}

/// 𝔣^#(g) ≡ u^#(g)^q mod π for every generator g of the lower ring.
pub fn verify_lift_of_frobenius<R: PiRing>(m: &LateralMap<R>, s: &ProlongSeq<R>) -> Result<Checks> {
    let u = u_fiber(m, s)?;
    let mut witness = None;
    for &g in &m.map.source {
        let d = m.map.image(g)? - &u.image(g)?.q_pow();
        if !d.divisible_by_pi() {
            witness = Some(format!("{g}: 𝔣^#(g) − u^#(g)^q = {d}"));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record("lift congruence", m.map.source.len() as u64, witness);
    Ok(checks)
}

/// Pushing the ghost components of the lower Witt point through 𝔣^# gives
/// the shifted ghost components of the upper one; S maps through φ_S.
pub fn verify_ghost_shift<R: PiRing>(m: &LateralMap<R>, s: &ProlongSeq<R>) -> Result<Checks> {
    let ring = m.upper.base.ring();
    let mut witness = None;
    let mut cases = 0;
    'outer: for &v in m.upper.base.vars() {
        let lower = ghost_of(ring, &m.lower.witt_point(v));
        let upper = ghost_of(ring, &m.upper.witt_point(v));
        for i in 1..m.n {
            cases += 1;
            let lhs = m.map.apply(&lower[i])?;
            if lhs != upper[i + 1] {
                witness = Some(format!("{v}: 𝔣^#(w_{i}) − w_{} = {}", i + 1, &lhs - &upper[i + 1]));
                break 'outer;
            }
        }
    }
    for &g in &m.lower.s_level.gens {
        cases += 1;
        if witness.is_none() && m.map.image(g)? != s.phi(m.n).image(g)? {
            witness = Some(format!("S-side generator {g} does not map through φ_S"));
        }
    }
    let mut checks = Checks::new();
    checks.record("ghost shift", cases, witness);
    Ok(checks)
}

/// (φ × φ)^# : O(J^{k−1}X ⊗ S^{k−1}) → O(J^kX ⊗ S^k).
fn phi_phi<R: PiRing>(x: &AffinePresentation<R>, k: usize, s: &ProlongSeq<R>) -> Result<RingMap<R>> {
    let mut images = frobenius_images(x.ring(), x.vars(), k)?;
    for (g, p) in &s.phi(k).images {
        images.insert(*g, p.clone());
    }
    let mut source = jet_vars(x.vars(), k - 1);
    source.extend(s.levels[k - 1].gens.iter().copied());
    let mut target = jet_vars(x.vars(), k);
    target.extend(s.levels[k].gens.iter().copied());
    RingMap::new(source, target, images)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositeMode {
    Symbolic,
    Pointwise,
}

/// The two composites O(J^{n−2}X ⊗ S^{n−2}) → O(J^nX ×_X S^n),
/// 𝔣^# ∘ l^# ∘ (φ×φ)^# and l^# ∘ (φ×φ)^# ∘ (φ×φ)^#, agree on generators.
pub fn verify_composite<S: SymbolicRing>(
    m: &LateralMap<S>,
    s: &ProlongSeq<S>,
    mode: CompositeMode,
    rng: &mut Prng,
    trials: Trials,
) -> Result<Checks> {
    let n = m.n;
    if n < 2 {
        return Err(Error::Shape("the composite identity needs n >= 2".into()));
    }
    let x = &m.upper.base;
    let pp1 = phi_phi(x, n - 1, s)?;
    let pp2 = phi_phi(x, n, s)?;
    let lhs_map = pp1.then(&m.lower.l_map())?.then(&m.map)?;
    let rhs_map = pp1.then(&pp2)?.then(&m.upper.l_map())?;
    let diffs: Vec<(Var, Poly<S>)> = pp1
        .source
        .iter()
        .map(|&g| Ok((g, lhs_map.image(g)? - rhs_map.image(g)?)))
        .collect::<Result<_>>()?;
    let mut checks = Checks::new();
    match mode {
        CompositeMode::Symbolic => {
            let w = diffs.iter().find(|(_, d)| !d.is_zero()).map(|(g, d)| format!("{g}: difference {d}"));
            checks.record("composite identity (symbolic)", diffs.len() as u64, w);
        }
        CompositeMode::Pointwise => {
            let sym = x.ring();
            let target = sym.point_ring(trials.k);
            let sampler = PointSampler::new(sym, &target, &m.upper.gens(), &m.upper.all_relations())?;
            let mut w = None;
            'pts: for _ in 0..trials.points {
                let pt = sampler.sample(rng)?;
                for (g, d) in &diffs {
                    if !target.is_zero(&sampler.eval(d, &pt)?) {
                        w = Some(format!("{g} at {}", format_point(&target, &pt)));
                        break 'pts;
                    }
                }
            }
            checks.record("composite identity (pointwise)", trials.points as u64, w);
        }
    }
    Ok(checks)
}

/// δ_𝔣(g) = (𝔣^#(g) − u^#(g)^q)/π on generators, plus both π-derivation axioms
/// on random pairs of lower-ring polynomials.
pub fn pi_derivation_of<S: SymbolicRing>(
    m: &LateralMap<S>,
    s: &ProlongSeq<S>,
    rng: &mut Prng,
    pairs: usize,
) -> Result<(BTreeMap<Var, Poly<S>>, Checks)> {
    let sym = m.upper.base.ring();
    let u = u_fiber(m, s)?;
    let delta = |f: &Poly<S>| -> Result<Poly<S>> {
        (&m.map.apply(f)? - &u.apply(f)?.q_pow()).div_pi().map_err(|e| match e {
            Error::Integrity { term, .. } => Error::Integrity {
                context: format!("δ_𝔣({f}) after a passing lift congruence"),
                term,
            },
            other => other,
        })
    };
    let images = m.map.source.iter().map(|&g| Ok((g, delta(&Poly::var(sym, g))?))).collect::<Result<_>>()?;
    let pi = Poly::constant(sym, sym.pi());
    let mut witness = None;
    for _ in 0..pairs {
        let f = random_poly(sym, &m.map.source, rng);
        let g = random_poly(sym, &m.map.source, rng);
        let (df, dg) = (delta(&f)?, delta(&g)?);
        let (uf, ug) = (u.apply(&f)?, u.apply(&g)?);
        let add = &(&(&delta(&(&f + &g))? - &df) - &dg) - &c_pi(&uf, &ug)?;
        let dfg = delta(&(&f * &g))?;
        let mul = &(&(&dfg - &(&uf.q_pow() * &dg)) - &(&ug.q_pow() * &df)) - &(&pi * &(&df * &dg));
        if !add.is_zero() || !mul.is_zero() {
            witness = Some(format!("f = {f}, g = {g}"));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record("δ_𝔣 axioms", pairs as u64, witness);
    Ok((images, checks))
}

/// Naturality for the projection 𝔸^2 → 𝔸^1, (x, y) ↦ x, with S built from
/// `make_s` on each space: 𝔣_{𝔸^2} ∘ pr = pr ∘ 𝔣_{𝔸^1} on generators.
pub fn functoriality_check<R: PiRing>(
    ring: &R,
    n: usize,
    make_s: impl Fn(&AffinePresentation<R>) -> Result<ProlongSeq<R>>,
) -> Result<Checks> {
    let a1 = AffinePresentation::affine_space(ring, &["x"]);
    let a2 = AffinePresentation::affine_space(ring, &["x", "y"]);
    let (s1, s2) = (make_s(&a1)?, make_s(&a2)?);
    let f1 = lateral_map(&a1, n, &s1)?;
    let f2 = lateral_map(&a2, n, &s2)?;
    // pr^# on a fiber ring: jet and S-side generators of x go to the same
    // names in the 𝔸^2 copy.
    let pr = |fr1: &FiberRing<R>, fr2: &FiberRing<R>| -> Result<RingMap<R>> {
        let mut images = BTreeMap::new();
        for &v in a1.vars() {
            for i in 1..=fr1.n as u32 {
                images.insert(fr1.label(v.with_order(i)), Poly::var(ring, fr2.label(v.with_order(i))));
            }
        }
        for &g in &fr1.s_level.gens {
            images.insert(g, Poly::var(ring, g));
        }
        RingMap::new(fr1.gens(), fr2.gens(), images)
    };
    let lhs = pr(&f1.lower, &f2.lower)?.then(&f2.map)?;
    let rhs = f1.map.then(&pr(&f1.upper, &f2.upper)?)?;
    let mut witness = None;
    for &g in &f1.map.source {
        if lhs.image(g)? != rhs.image(g)? {
            witness = Some(format!("{g}: {} vs {}", lhs.image(g)?, rhs.image(g)?));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record("functoriality along 𝔸^2 → 𝔸^1", f1.map.source.len() as u64, witness);
    Ok(checks)
}

#[cfg(test)]
mod tests;
