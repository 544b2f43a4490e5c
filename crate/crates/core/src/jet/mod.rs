//! π-derivations, Frobenius lifts and jet rings of affine schemes.
//!
//! Jet coordinates are Witt coordinates: x^(i) is the i-th Witt coordinate of
//! the universal point, so φ^#(x^(i)) = F_i(x^(0), …, x^(i+1)) with F the Witt
//! Frobenius table, and δf = (φ^#f − f^q)/π. On R itself φ is the identity.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{PiRing, Poly, Ring, SymbolicRing, Var, VarKind};
use crate::error::{Error, Result};
use crate::ideal::{exact_certificate, random_poly, triangular_plan, PointSampler};
use crate::report::Checks;
use crate::witt::frobenius_polys;
use crate::Prng;

/// An affine scheme as a quotient of a polynomial ring over R.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePresentation<R: PiRing> {
    ring: R,
    vars: Vec<Var>,
    relations: Vec<Poly<R>>,
}

impl<R: PiRing> AffinePresentation<R> {
    pub fn new(ring: &R, vars: Vec<Var>, relations: Vec<Poly<R>>) -> Result<Self> {
        for v in &vars {
            if v.kind() != VarKind::Jet || v.order() != 0 {
                return Err(Error::Shape(format!("base variable {v} must be an order-0 jet variable")));
            }
        }
        for r in &relations {
            if let Some(v) = r.vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(Error::Shape(format!("relation {r} uses undeclared variable {v}")));
            }
        }
        Ok(AffinePresentation { ring: ring.clone(), vars, relations })
    }

    pub fn affine_space(ring: &R, names: &[&str]) -> Self {
        let vars = names.iter().map(|n| Var::jet(n, 0)).collect();
        AffinePresentation { ring: ring.clone(), vars, relations: Vec::new() }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn relations(&self) -> &[Poly<R>] {
        &self.relations
    }
}

/// `v^(i)` for 0 ≤ i ≤ n, order-major.
pub fn jet_vars(base: &[Var], n: usize) -> Vec<Var> {
    (0..=n as u32).flat_map(|i| base.iter().map(move |v| v.with_order(i))).collect()
}

/// A ring map given by generator images (the pullback of a morphism).
#[derive(Clone, Debug, PartialEq)]
pub struct RingMap<R: Ring> {
    pub source: Vec<Var>,
    pub target: Vec<Var>,
    pub images: BTreeMap<Var, Poly<R>>,
}

impl<R: Ring> RingMap<R> {
    pub fn new(source: Vec<Var>, target: Vec<Var>, images: BTreeMap<Var, Poly<R>>) -> Result<Self> {
        for g in &source {
            let img = images.get(g).ok_or_else(|| Error::MissingImage(g.to_string()))?;
            if let Some(v) = img.vars().into_iter().find(|v| !target.contains(v)) {
                return Err(Error::Shape(format!("image of {g} uses {v}, not a target generator")));
            }
        }
        Ok(RingMap { source, target, images })
    }

    pub fn identity(ring: &R, gens: &[Var]) -> Self {
        let images = gens.iter().map(|&g| (g, Poly::var(ring, g))).collect();
        RingMap { source: gens.to_vec(), target: gens.to_vec(), images }
    }

    pub fn image(&self, g: Var) -> Result<&Poly<R>> {
        self.images.get(&g).ok_or_else(|| Error::MissingImage(g.to_string()))
    }

    pub fn apply(&self, f: &Poly<R>) -> Result<Poly<R>> {
        f.subst(&self.images)
    }

    /// `self` followed by `next` on rings: g ↦ next(self(g)).
    pub fn then(&self, next: &RingMap<R>) -> Result<RingMap<R>> {
        let images = self
            .images
            .iter()
            .map(|(g, p)| Ok((*g, next.apply(p)?)))
            .collect::<Result<_>>()?;
        Ok(RingMap { source: self.source.clone(), target: next.target.clone(), images })
    }
}

fn max_order<R: Ring>(f: &Poly<R>) -> Option<u32> {
    f.vars().iter().map(|v| v.order()).max()
}

/// φ^# on jet variables of orders < n over the given base variables (of any
/// kind), with images in orders ≤ n.
pub fn frobenius_images<R: PiRing>(ring: &R, base: &[Var], n: usize) -> Result<BTreeMap<Var, Poly<R>>> {
    let mut images = BTreeMap::new();
    if n == 0 {
        return Ok(images);
    }
    let table = frobenius_polys(ring, n)?;
    for v in base {
        for (i, f) in table.iter().enumerate() {
            images.insert(v.with_order(i as u32), f.rename(|w| v.with_order(w.order())));
        }
    }
    Ok(images)
}

fn base_of<R: Ring>(f: &Poly<R>) -> Vec<Var> {
    let set: BTreeSet<Var> = f.vars().into_iter().map(|v| v.with_order(0)).collect();
    set.into_iter().collect()
}

/// φ^#(f) computed with the Frobenius table at order `n`, which must exceed
/// every jet order in `f`.
pub fn phi_poly_at<R: PiRing>(f: &Poly<R>, n: usize) -> Result<Poly<R>> {
    if let Some(m) = max_order(f) {
        if m as usize >= n {
            return Err(Error::Shape(format!("φ at order {n} cannot act on order-{m} variables")));
        }
    }
    let images = frobenius_images(f.ring(), &base_of(f), n)?;
    f.subst(&images)
}

pub fn phi_poly<R: PiRing>(f: &Poly<R>) -> Result<Poly<R>> {
    phi_poly_at(f, max_order(f).map_or(1, |m| m as usize + 1))
}

/// δf = (φ^#f − f^q)/π at Frobenius-table order `n`.
pub fn delta_poly_at<R: PiRing>(f: &Poly<R>, n: usize) -> Result<Poly<R>> {
    let phi = phi_poly_at(f, n)?;
    (&phi - &f.q_pow()).div_pi().map_err(|e| match e {
        Error::Integrity { term, .. } => Error::Integrity { context: format!("δ({f})"), term },
        other => other,
    })
}

pub fn delta_poly<R: PiRing>(f: &Poly<R>) -> Result<Poly<R>> {
    delta_poly_at(f, max_order(f).map_or(1, |m| m as usize + 1))
}

/// C_π(f, g) = (f^q + g^q − (f+g)^q)/π; identically zero in characteristic p.
pub fn c_pi<R: PiRing>(f: &Poly<R>, g: &Poly<R>) -> Result<Poly<R>> {
    (&(&f.q_pow() + &g.q_pow()) - &(f + g).q_pow()).div_pi()
}

/// O(J^nX) = R[x^(i)] / (δ^k f : 0 ≤ k ≤ n), relations listed k-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JetRing<R: PiRing> {
    pub base: AffinePresentation<R>,
    pub n: usize,
    pub vars: Vec<Var>,
    pub relations: Vec<Poly<R>>,
}

pub fn jet_ring<R: PiRing>(x: &AffinePresentation<R>, n: usize) -> Result<JetRing<R>> {
    let mut relations = x.relations.clone();
    let mut layer = x.relations.clone();
    for _ in 0..n {
        layer = layer.iter().map(delta_poly).collect::<Result<_>>()?;
        relations.extend(layer.iter().cloned());
    }
    Ok(JetRing { base: x.clone(), n, vars: jet_vars(&x.vars, n), relations })
}

/// φ^# : O(J^{n−1}X) → O(J^nX).
pub fn phi_map<R: PiRing>(x: &AffinePresentation<R>, n: usize) -> Result<RingMap<R>> {
    if n == 0 {
        return Err(Error::Shape("φ needs n >= 1".into()));
    }
    let images = frobenius_images(&x.ring, &x.vars, n)?;
    RingMap::new(jet_vars(&x.vars, n - 1), jet_vars(&x.vars, n), images)
}

/// u^# : O(J^{n−1}X) → O(J^nX), the inclusion.
pub fn u_map<R: PiRing>(x: &AffinePresentation<R>, n: usize) -> Result<RingMap<R>> {
    if n == 0 {
        return Err(Error::Shape("u needs n >= 1".into()));
    }
    let mut m = RingMap::identity(&x.ring, &jet_vars(&x.vars, n - 1));
    m.target = jet_vars(&x.vars, n);
    Ok(m)
}

/// One level S^n of a prolongation sequence, as a presentation.
#[derive(Clone, Debug, PartialEq)]
pub struct Level<R: Ring> {
    pub gens: Vec<Var>,
    pub relations: Vec<Poly<R>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeqKind<R: Ring> {
    /// S^n = Spec R at a point of X, one coordinate per base variable.
    Constant(Vec<R::Elem>),
    /// S^n = J^nX.
    Canonical,
    Custom,
}

/// A prolongation sequence S^0 ← S^1 ← … ← S^{n_max} together with the
/// structure map a : S^0 → X.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlongSeq<R: PiRing> {
    pub kind: SeqKind<R>,
    pub base: AffinePresentation<R>,
    pub levels: Vec<Level<R>>,
    /// `u_maps[i]` : O(S^i) → O(S^{i+1}).
    pub u_maps: Vec<RingMap<R>>,
    /// `phi_maps[i]` : O(S^i) → O(S^{i+1}).
    pub phi_maps: Vec<RingMap<R>>,
    /// a^# : O(X) → O(S^0).
    pub a_map: RingMap<R>,
}

/// Side-variable copy of a jet variable.
pub fn side(v: Var) -> Var {
    v.with_kind(VarKind::Side)
}

impl<R: PiRing> ProlongSeq<R> {
    pub fn constant(x: &AffinePresentation<R>, point: Vec<R::Elem>, n_max: usize) -> Result<Self> {
        let ring = &x.ring;
        if point.len() != x.vars.len() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, scheme has {} variables",
                point.len(),
                x.vars.len()
            )));
        }
        let values = x.vars.iter().copied().zip(point.iter().cloned()).collect();
        for r in &x.relations {
            let val = r.eval(ring, |c| c.clone(), &values)?;
            if !ring.is_zero(&val) {
                return Err(Error::Construction(format!(
                    "point is not on X: {r} evaluates to {}",
                    ring.format_elem(&val)
                )));
            }
        }
        let empty = Level { gens: Vec::new(), relations: Vec::new() };
        let id = RingMap::identity(ring, &[]);
        let images = x.vars.iter().zip(&point).map(|(&v, c)| (v, Poly::constant(ring, c.clone()))).collect();
        Ok(ProlongSeq {
            kind: SeqKind::Constant(point),
            base: x.clone(),
            levels: vec![empty; n_max + 1],
            u_maps: vec![id.clone(); n_max],
            phi_maps: vec![id; n_max],
            a_map: RingMap::new(x.vars.clone(), Vec::new(), images)?,
        })
    }

    pub fn canonical(x: &AffinePresentation<R>, n_max: usize) -> Result<Self> {
        let ring = &x.ring;
        let jets = jet_ring(x, n_max)?;
        let side_base: Vec<Var> = x.vars.iter().map(|&v| side(v)).collect();
        let levels = (0..=n_max)
            .map(|n| Level {
                gens: jet_vars(&side_base, n),
                relations: jets.relations[..x.relations.len() * (n + 1)]
                    .iter()
                    .map(|r| r.rename(side))
                    .collect(),
            })
            .collect();
        let mut u_maps = Vec::new();
        let mut phi_maps = Vec::new();
        for n in 1..=n_max {
            let mut u = RingMap::identity(ring, &jet_vars(&side_base, n - 1));
            u.target = jet_vars(&side_base, n);
            u_maps.push(u);
            let images = frobenius_images(ring, &side_base, n)?;
            phi_maps.push(RingMap::new(jet_vars(&side_base, n - 1), jet_vars(&side_base, n), images)?);
        }
        let images = x.vars.iter().map(|&v| (v, Poly::var(ring, side(v)))).collect();
        Ok(ProlongSeq {
            kind: SeqKind::Canonical,
            base: x.clone(),
            levels,
            u_maps,
            phi_maps,
            a_map: RingMap::new(x.vars.clone(), side_base, images)?,
        })
    }

    /// A user-supplied sequence; rejected unless every prolongation check
    /// passes.
    pub fn custom(
        x: &AffinePresentation<R>,
        levels: Vec<Level<R>>,
        u_maps: Vec<RingMap<R>>,
        phi_maps: Vec<RingMap<R>>,
        a_map: RingMap<R>,
        rng: &mut Prng,
        trials: usize,
        k: u32,
    ) -> Result<Self>
    where
        R: SymbolicRing,
    {
        if levels.is_empty() || u_maps.len() + 1 != levels.len() || phi_maps.len() + 1 != levels.len() {
            return Err(Error::Shape("custom sequence needs n+1 levels and n maps of each kind".into()));
        }
        let seq = ProlongSeq { kind: SeqKind::Custom, base: x.clone(), levels, u_maps, phi_maps, a_map };
        let checks = prolong_check(&seq, rng, trials, k)?;
        if let Some(f) = checks.failures().next() {
            return Err(Error::Verification {
                check: f.name.clone(),
                witness: f.witness.clone().unwrap_or_default(),
            });
        }
        Ok(seq)
    }

    pub fn n_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn ring(&self) -> &R {
        &self.base.ring
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SeqKind::Constant(pt) => {
                let parts: Vec<String> = pt.iter().map(|c| self.ring().format_elem(c)).collect();
                format!("constant({})", parts.join(","))
            }
            SeqKind::Canonical => "canonical".into(),
            SeqKind::Custom => "custom".into(),
        }
    }

    /// a^# composed into level n: O(X) → O(S^n).
    pub fn a_at(&self, n: usize) -> Result<RingMap<R>> {
        let mut m = self.a_map.clone();
        for u in &self.u_maps[..n] {
            m = m.then(u)?;
        }
        Ok(m)
    }

    /// φ^#_S : O(S^{n−1}) → O(S^n).
    pub fn phi(&self, n: usize) -> &RingMap<R> {
        &self.phi_maps[n - 1]
    }

    pub fn u(&self, n: usize) -> &RingMap<R> {
        &self.u_maps[n - 1]
    }
}

/// Images in the ideal of `relations`: exact elimination when the system is
/// triangular in linear variables, else evaluation at `trials` sampled points
/// over R/π^k. Returns a witness on failure.
pub fn ideal_contains<S: SymbolicRing>(
    sym: &S,
    gens: &[Var],
    relations: &[Poly<S>],
    images: &[Poly<S>],
    rng: &mut Prng,
    trials: usize,
    k: u32,
) -> Result<Option<String>> {
    if relations.iter().all(|r| r.is_zero()) {
        return Ok(images.iter().find(|h| !h.is_zero()).map(|h| format!("nonzero image {h}")));
    }
    if let Some(plan) = triangular_plan(relations, true) {
        return Ok(exact_certificate(images, relations, &plan)
            .err()
            .map(|(i, rem)| format!("image {i} leaves remainder {rem}")));
    }
    let target = sym.point_ring(k);
    let sampler = PointSampler::new(sym, &target, gens, relations)?;
    for _ in 0..trials {
        let pt = sampler.sample(rng)?;
        for h in images {
            let v = sampler.eval(h, &pt)?;
            if !target.is_zero(&v) {
                let mut coords: Vec<(Var, String)> = pt.iter().map(|(v, c)| (*v, target.format_elem(c))).collect();
                coords.sort_by(|a, b| a.0.structural_cmp(&b.0));
                let text: Vec<String> = coords.iter().map(|(v, c)| format!("{v}={c}")).collect();
                return Ok(Some(format!("{h} ≠ 0 at {}", text.join(", "))));
            }
        }
    }
    Ok(None)
}

/// Per level: φ^# lifts Frobenius relative to u^#, φ^# respects the
/// relations, and the π-derivation (φ^#f − u^#(f)^q)/π obeys both axioms on
/// random pairs.
pub fn prolong_check<S: SymbolicRing>(seq: &ProlongSeq<S>, rng: &mut Prng, trials: usize, k: u32) -> Result<Checks> {
    let sym = seq.ring();
    let mut checks = Checks::new();
    for n in 1..=seq.n_max() {
        let (phi, u) = (seq.phi(n), seq.u(n));
        let src = &seq.levels[n - 1];
        let dst = &seq.levels[n];

        let mut witness = None;
        for &g in &src.gens {
            let diff = phi.image(g)? - &u.image(g)?.q_pow();
            if !diff.divisible_by_pi() {
                witness = Some(format!("{g}: φ^#(g) − u^#(g)^q = {diff}"));
                break;
            }
        }
        checks.record(format!("level {n}: lift congruence"), src.gens.len() as u64, witness);

        let images = src.relations.iter().map(|r| phi.apply(r)).collect::<Result<Vec<_>>>()?;
        let witness = ideal_contains(sym, &dst.gens, &dst.relations, &images, rng, trials, k)?;
        checks.record(format!("level {n}: φ^# respects relations"), images.len() as u64, witness);

        let delta = |f: &Poly<S>| -> Result<Poly<S>> { (&phi.apply(f)? - &u.apply(f)?.q_pow()).div_pi() };
        let pairs = trials.min(100);
        let mut witness = None;
        for _ in 0..pairs {
            let f = random_poly(sym, &src.gens, rng);
            let g = random_poly(sym, &src.gens, rng);
            let (df, dg) = match (delta(&f), delta(&g)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    witness = Some(format!("δ not defined: {e}"));
                    break;
                }
            };
            let (uf, ug) = (u.apply(&f)?, u.apply(&g)?);
            let add = &(&(&delta(&(&f + &g))? - &df) - &dg) - &c_pi(&uf, &ug)?;
            let pi = Poly::constant(sym, sym.pi());
            let mul = &(&(&delta(&(&f * &g))? - &(&uf.q_pow() * &dg)) - &(&ug.q_pow() * &df)) - &(&pi * &(&df * &dg));
            if !add.is_zero() || !mul.is_zero() {
                witness = Some(format!("f = {f}, g = {g}"));
                break;
            }
        }
        checks.record(format!("level {n}: δ axioms"), pairs as u64, witness);
    }
    Ok(checks)
}

#[cfg(test)]
mod tests;
