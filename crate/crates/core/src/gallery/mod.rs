//! Test schemes, kernels N^n of J^nE → E at the identity, and the checks that
//! N^* with the lateral Frobenius is a prolongation sequence compatible with
//! the group law.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::Rng as _;

use crate::algebra::{CoeffMap, PiRing, Poly, PointRing, Ring, SymbolicRing, Var};
use crate::error::{Error, Result};
use crate::ideal::{Point, PointSampler};
use crate::jet::{jet_ring, jet_vars, AffinePresentation, ProlongSeq, RingMap};
use crate::lateral::{
    certify, compare_maps, fiber_ring, lateral_map, pi_derivation_of, verify_lift_of_frobenius,
    witt_frobenius_formula_map, FiberRing, Labels, LateralMap, Trials,
};
use crate::report::Checks;
use crate::witt::{self, WittVec};
use crate::Prng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PresetName {
    Ga,
    Gm,
    Weierstrass(i64, i64),
}

impl PresetName {
    /// `ga`, `gm`, `weierstrass` (a = b = 1) or `weierstrass(a,b)`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "ga" => return Ok(PresetName::Ga),
            "gm" => return Ok(PresetName::Gm),
            "weierstrass" => return Ok(PresetName::Weierstrass(1, 1)),
            _ => {}
        }
        let inner = t
            .strip_prefix("weierstrass(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown scheme '{s}'")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => {
                let a = a.parse().map_err(|_| Error::Parse(format!("bad coefficient '{a}'")))?;
                let b = b.parse().map_err(|_| Error::Parse(format!("bad coefficient '{b}'")))?;
                Ok(PresetName::Weierstrass(a, b))
            }
            _ => Err(Error::Parse(format!("weierstrass takes two coefficients, got '{inner}'"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            PresetName::Ga => "ga".into(),
            PresetName::Gm => "gm".into(),
            PresetName::Weierstrass(a, b) => format!("weierstrass({a},{b})"),
        }
    }
}

/// Group law as polynomial maps: `mul[j]` in the variables and their second
/// copies ([`second`]), `inv[j]` in the variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupLaw<R: PiRing> {
    pub mul: Vec<Poly<R>>,
    pub inv: Vec<Poly<R>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSchemePreset<R: PiRing> {
    pub name: PresetName,
    pub presentation: AffinePresentation<R>,
    pub law: Option<GroupLaw<R>>,
    /// The identity for group presets; a chosen rational point otherwise.
    pub point: Vec<R::Elem>,
}

/// The second copy of a variable, used for the right operand of a law.
pub fn second(v: Var) -> Var {
    v.with_name(&format!("{}@2", v.name()))
}

pub fn preset<R: PiRing>(ring: &R, name: &PresetName) -> Result<GroupSchemePreset<R>> {
    let x = Var::jet("x", 0);
    let y = Var::jet("y", 0);
    let v = |w| Poly::var(ring, w);
    let c = |k: i64| Poly::int(ring, k);
    match name {
        PresetName::Ga => Ok(GroupSchemePreset {
            name: name.clone(),
            presentation: AffinePresentation::affine_space(ring, &["x"]),
            law: Some(GroupLaw { mul: vec![&v(x) + &v(second(x))], inv: vec![v(x).neg()] }),
            point: vec![ring.zero()],
        }),
        PresetName::Gm => Ok(GroupSchemePreset {
            name: name.clone(),
            presentation: AffinePresentation::new(ring, vec![x, y], vec![&(&v(x) * &v(y)) - &c(1)])?,
            law: Some(GroupLaw { mul: vec![&v(x) * &v(second(x)), &v(y) * &v(second(y))], inv: vec![v(y), v(x)] }),
            point: vec![ring.one(), ring.one()],
        }),
        PresetName::Weierstrass(a, b) => {
            let disc = 4 * a.pow(3) + 27 * b.pow(2);
            if ring.divisible_by_pi(&ring.from_i64(disc)) {
                return Err(Error::Construction(format!(
                    "4a^3 + 27b^2 = {disc} is not a unit for p = {}",
                    ring.p()
                )));
            }
            let rel = &(&(&v(y).pow(2) - &v(x).pow(3)) - &(&c(*a) * &v(x))) - &c(*b);
            let (px, py) = weierstrass_point(*a, *b)
                .ok_or_else(|| Error::Construction("no small integral point on the curve".into()))?;
            Ok(GroupSchemePreset {
                name: name.clone(),
                presentation: AffinePresentation::new(ring, vec![x, y], vec![rel])?,
                law: None,
                point: vec![ring.from_i64(px), ring.from_i64(py)],
            })
        }
    }
}

/// Smallest |x| ≤ 20 with x^3 + ax + b a perfect square, taking y ≥ 0.
fn weierstrass_point(a: i64, b: i64) -> Option<(i64, i64)> {
    (0..=20i64).flat_map(|k| [k, -k]).find_map(|x| {
        let r = x.pow(3) + a * x + b;
        if r < 0 {
            return None;
        }
        let s = BigInt::from(r).sqrt();
        (&s * &s == BigInt::from(r)).then(|| (x, i64::try_from(s).unwrap()))
    })
}

impl<R: PiRing> GroupSchemePreset<R> {
    pub fn section(&self, n: usize) -> Result<ProlongSeq<R>> {
        ProlongSeq::constant(&self.presentation, self.point.clone(), n)
    }

    fn law(&self) -> Result<&GroupLaw<R>> {
        self.law
            .as_ref()
            .ok_or_else(|| Error::Construction(format!("{} has no group law", self.name.label())))
    }
}

/// N^n = J^nE ×_E V at the identity section.
pub fn kernel_ring<R: PiRing>(e: &GroupSchemePreset<R>, n: usize) -> Result<FiberRing<R>> {
    fiber_ring(&e.presentation, n, &e.section(n)?, Labels::Source)
}

/// A polynomial evaluated at Witt vectors: coefficients enter through
/// exp_δ and arithmetic is Witt arithmetic at order `n`.
pub fn eval_witt<S: SymbolicRing>(
    sym: &S,
    f: &Poly<S>,
    point: &HashMap<Var, WittVec<S::Point>>,
    target: &S::Point,
    n: usize,
) -> Result<WittVec<S::Point>>
where
    S::Point: CoeffMap<S>,
{
    let mut acc = WittVec::zero(target, n);
    for (m, c) in f.terms() {
        let cw = witt::exp_delta(sym, c, n)?;
        let mut t = WittVec::new(target, cw.coords.iter().map(|x| target.map_coeff(sym, x)).collect())?;
        for &(v, e) in m.iter() {
            let w = point.get(&v).ok_or_else(|| Error::MissingImage(v.to_string()))?;
            for _ in 0..e {
                t = witt::mul(sym, &t, w)?;
            }
        }
        acc = witt::add(sym, &acc, &t)?;
    }
    Ok(acc)
}

/// Kernel points of N^n, stored as values of x^(i), 1 ≤ i ≤ n.
pub struct KernelGroup<S: SymbolicRing> {
    pub preset: GroupSchemePreset<S>,
    pub target: S::Point,
    identity: Vec<<S::Point as Ring>::Elem>,
}

impl<S: SymbolicRing> KernelGroup<S>
where
    S::Point: CoeffMap<S>,
{
    pub fn new(e: &GroupSchemePreset<S>, k: u32) -> Result<Self> {
        e.law()?;
        let sym = e.presentation.ring();
        let target = sym.point_ring(k);
        let identity = e.point.iter().map(|c| sym.reduce(c, &target)).collect();
        Ok(KernelGroup { preset: e.clone(), target, identity })
    }

    fn witt_of(&self, p: &Point<S::Point>, n: usize) -> Result<HashMap<Var, WittVec<S::Point>>> {
        let vars = self.preset.presentation.vars();
        let mut out = HashMap::new();
        for (j, &v) in vars.iter().enumerate() {
            let mut coords = vec![self.identity[j].clone()];
            for i in 1..=n as u32 {
                let c = p.get(&v.with_order(i)).ok_or_else(|| Error::MissingImage(v.with_order(i).to_string()))?;
                coords.push(c.clone());
            }
            out.insert(v, WittVec::new(&self.target, coords)?);
        }
        Ok(out)
    }

    fn from_witt(&self, w: &[WittVec<S::Point>]) -> Result<Point<S::Point>> {
        let mut out = HashMap::new();
        for (j, &v) in self.preset.presentation.vars().iter().enumerate() {
            if w[j].coords[0] != self.identity[j] {
                return Err(Error::Integrity {
                    context: "kernel law left the identity fiber".into(),
                    term: w[j].format(),
                });
            }
            for (i, c) in w[j].coords.iter().enumerate().skip(1) {
                out.insert(v.with_order(i as u32), c.clone());
            }
        }
        Ok(out)
    }

    pub fn identity_point(&self, n: usize) -> Point<S::Point> {
        jet_vars(self.preset.presentation.vars(), n)
            .into_iter()
            .filter(|v| v.order() > 0)
            .map(|v| (v, self.target.zero()))
            .collect()
    }

    /// P ⋆ Q on N^n points.
    pub fn star(&self, p: &Point<S::Point>, q: &Point<S::Point>, n: usize) -> Result<Point<S::Point>> {
        let sym = self.preset.presentation.ring();
        let (wp, wq) = (self.witt_of(p, n)?, self.witt_of(q, n)?);
        let mut env = wp;
        for (v, w) in wq {
            env.insert(second(v), w);
        }
        let law = self.preset.law()?;
        let out = law.mul.iter().map(|f| eval_witt(sym, f, &env, &self.target, n)).collect::<Result<Vec<_>>>()?;
        self.from_witt(&out)
    }

    pub fn inverse(&self, p: &Point<S::Point>, n: usize) -> Result<Point<S::Point>> {
        let sym = self.preset.presentation.ring();
        let env = self.witt_of(p, n)?;
        let law = self.preset.law()?;
        let out = law.inv.iter().map(|f| eval_witt(sym, f, &env, &self.target, n)).collect::<Result<Vec<_>>>()?;
        self.from_witt(&out)
    }

    /// 𝔣 on points: N^n → N^{n−1}, relabeled back to the scheme's names.
    pub fn apply_lateral(&self, m: &LateralMap<S>, p: &Point<S::Point>) -> Result<Point<S::Point>> {
        let sym = self.preset.presentation.ring();
        let mut out = HashMap::new();
        for &v in self.preset.presentation.vars() {
            for i in 1..m.n as u32 {
                let img = m.map.image(m.lower.label(v.with_order(i)))?;
                out.insert(v.with_order(i), img.eval(&self.target, |c| sym.reduce(c, &self.target), p)?);
            }
        }
        Ok(out)
    }
}

fn points_equal<T: PartialEq>(a: &HashMap<Var, T>, b: &HashMap<Var, T>) -> bool {
    a.len() == b.len() && a.iter().all(|(v, x)| b.get(v) == Some(x))
}

fn format_point<P: Ring>(ring: &P, pt: &Point<P>) -> String {
    let mut coords: Vec<(Var, String)> = pt.iter().map(|(v, c)| (*v, ring.format_elem(c))).collect();
    coords.sort_by(|a, b| a.0.structural_cmp(&b.0));
    let text: Vec<String> = coords.iter().map(|(v, c)| format!("{v}={c}")).collect();
    format!("{{{}}}", text.join(", "))
}

/// u^# between two fiber rings at consecutive levels with the same labels.
fn u_between<R: PiRing>(lo: &FiberRing<R>, hi: &FiberRing<R>, s: &ProlongSeq<R>) -> Result<RingMap<R>> {
    let ring = lo.base.ring();
    let mut images = BTreeMap::new();
    for &v in lo.base.vars() {
        for i in 1..=lo.n as u32 {
            images.insert(lo.label(v.with_order(i)), Poly::var(ring, hi.label(v.with_order(i))));
        }
    }
    for &g in &lo.s_level.gens {
        images.insert(g, s.u(hi.n).image(g)?.clone());
    }
    RingMap::new(lo.gens(), hi.gens(), images)
}

/// For 1 ≤ n ≤ n_max at the identity section: well-definedness certificate,
/// lift congruence, δ_𝔣 with both axioms, and u ∘ 𝔣_n = 𝔣_{n−1} ∘ u. For
/// ga the restricted map is also compared with the closed Witt formula.
pub fn verify_kernel_prolongation<S: SymbolicRing>(
    e: &GroupSchemePreset<S>,
    n_max: usize,
    rng: &mut Prng,
    trials: Trials,
) -> Result<Checks> {
    let x = &e.presentation;
    let s = e.section(n_max)?;
    verify_prolongation_at(x, &s, n_max, rng, trials, e.name == PresetName::Ga)
}

/// The same checks for an arbitrary base sequence.
pub fn verify_prolongation_at<S: SymbolicRing>(
    x: &AffinePresentation<S>,
    s: &ProlongSeq<S>,
    n_max: usize,
    rng: &mut Prng,
    trials: Trials,
    compare_closed_formula: bool,
) -> Result<Checks> {
    let mut checks = Checks::new();
    let mut prev: Option<LateralMap<S>> = None;
    for n in 1..=n_max {
        let m = lateral_map(x, n, s)?;
        let tag = format!("n={n}: ");
        match certify(&m, rng, trials) {
            Ok(c) => checks.pass(format!("{tag}descent ({})", c.kind()), m.lower.all_relations().len() as u64),
            Err(Error::Verification { witness, .. }) => checks.fail(format!("{tag}descent"), 1, witness),
            Err(other) => return Err(other),
        }
        checks.extend(&tag, verify_lift_of_frobenius(&m, s)?);
        match pi_derivation_of(&m, s, rng, 30) {
            Ok((_, c)) => checks.extend(&tag, c),
            Err(Error::Integrity { context, term }) => checks.fail(format!("{tag}δ_𝔣 exists"), 1, format!("{context}: {term}")),
            Err(other) => return Err(other),
        }
        if let Some(p) = &prev {
            // p : fiber_{n−2} → fiber_{n−1}; m : fiber_{n−1} → fiber_n.
            let lhs = u_between(&p.lower, &m.lower, s)?.then(&m.map)?;
            let rhs = p.map.then(&u_between(&p.upper, &m.upper, s)?)?;
            let w = p
                .map
                .source
                .iter()
                .find(|&&g| lhs.images[&g] != rhs.images[&g])
                .map(|g| format!("{g}: {} vs {}", lhs.images[g], rhs.images[g]));
            checks.record(format!("{tag}tower compatibility"), p.map.source.len() as u64, w);
        }
        if compare_closed_formula && n >= 2 {
            let d = compare_maps(&m, &witt_frobenius_formula_map(x, n, s)?)?;
            let w = d.iter().next().map(|(g, p)| format!("{g}: {p}"));
            checks.record(format!("{tag}equals closed Witt formula"), m.map.source.len() as u64, w);
        }
        prev = Some(m);
    }
    Ok(checks)
}

/// 𝔣(P ⋆ Q) = 𝔣(P) ⋆ 𝔣(Q) on sampled kernel points.
pub fn group_compat_check<S: SymbolicRing>(
    e: &GroupSchemePreset<S>,
    n: usize,
    rng: &mut Prng,
    trials: Trials,
) -> Result<Checks>
where
    S::Point: CoeffMap<S>,
{
    if n < 2 {
        return Err(Error::Shape("group compatibility needs n >= 2".into()));
    }
    let g = KernelGroup::new(e, trials.k)?;
    let s = e.section(n)?;
    let m = lateral_map(&e.presentation, n, &s)?;
    let sampler = PointSampler::new(e.presentation.ring(), &g.target, &m.upper.gens(), &m.upper.all_relations())?;
    let mut witness = None;
    for _ in 0..trials.points {
        let (p, q) = (sampler.sample(rng)?, sampler.sample(rng)?);
        let lhs = g.apply_lateral(&m, &g.star(&p, &q, n)?)?;
        let rhs = g.star(&g.apply_lateral(&m, &p)?, &g.apply_lateral(&m, &q)?, n - 1)?;
        if !points_equal(&lhs, &rhs) {
            witness = Some(format!("P = {}, Q = {}", format_point(&g.target, &p), format_point(&g.target, &q)));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record(format!("n={n}: 𝔣(P⋆Q) = 𝔣(P)⋆𝔣(Q)"), trials.points as u64, witness);
    Ok(checks)
}

/// Associativity, unit and inverse of the prolonged law on sampled kernel
/// points of N^n; results stay on N^n.
pub fn kernel_law_check<S: SymbolicRing>(
    e: &GroupSchemePreset<S>,
    n: usize,
    rng: &mut Prng,
    trials: Trials,
) -> Result<Checks>
where
    S::Point: CoeffMap<S>,
{
    let g = KernelGroup::new(e, trials.k)?;
    let kr = kernel_ring(e, n)?;
    let sym = e.presentation.ring();
    let rels = kr.all_relations();
    let sampler = PointSampler::new(sym, &g.target, &kr.gens(), &rels)?;
    let on_kernel = |p: &Point<S::Point>| -> Result<bool> {
        for r in &rels {
            if !g.target.is_zero(&sampler.eval(r, p)?) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let id = g.identity_point(n);
    let mut witness = None;
    for _ in 0..trials.points {
        let (a, b, c) = (sampler.sample(rng)?, sampler.sample(rng)?, sampler.sample(rng)?);
        let ab_c = g.star(&g.star(&a, &b, n)?, &c, n)?;
        let a_bc = g.star(&a, &g.star(&b, &c, n)?, n)?;
        let unit = g.star(&a, &id, n)?;
        let inv = g.star(&a, &g.inverse(&a, n)?, n)?;
        let ok = points_equal(&ab_c, &a_bc)
            && points_equal(&unit, &a)
            && points_equal(&inv, &id)
            && on_kernel(&ab_c)?
            && on_kernel(&g.inverse(&a, n)?)?;
        if !ok {
            witness = Some(format!("a = {}", format_point(&g.target, &a)));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record(format!("n={n}: kernel group law"), trials.points as u64, witness);
    Ok(checks)
}

pub enum SesOutcome {
    Checked(Checks),
    Skipped(String),
}

/// Point-level exactness of 0 → N^n → J^nE → E → 0 over R/π^k: sampled
/// E-points lift to J^nE, and the fiber over the identity is N^n.
pub fn ses_check<S: SymbolicRing>(e: &GroupSchemePreset<S>, n: usize, rng: &mut Prng, trials: Trials) -> Result<SesOutcome>
where
    S::Point: CoeffMap<S>,
{
    if e.law.is_none() {
        return Ok(SesOutcome::Skipped(format!("{}: no group law in this chart", e.name.label())));
    }
    let sym = e.presentation.ring();
    let target = sym.point_ring(trials.k);
    let x = &e.presentation;
    let j = jet_ring(x, n)?;
    let base = x.vars().to_vec();
    let lifter = PointSampler::with_fixed(sym, &target, &j.vars, &j.relations, &base)?;
    let mut checks = Checks::new();

    let mut witness = None;
    for _ in 0..trials.points {
        let pt = sample_e_point(e, &target, rng)?;
        if let Err(err) = lifter.sample_with(rng, &pt) {
            witness = Some(format!("{} does not lift: {err}", format_point(&target, &pt)));
            break;
        }
    }
    checks.record(format!("n={n}: u surjective on sampled points"), trials.points as u64, witness);

    let kr = kernel_ring(e, n)?;
    let krels = kr.all_relations();
    let e_pt: Point<S::Point> = base.iter().zip(&e.point).map(|(&v, c)| (v, sym.reduce(c, &target))).collect();
    let ksampler = PointSampler::new(sym, &target, &kr.gens(), &krels)?;
    let mut witness = None;
    for _ in 0..trials.points {
        let lift = lifter.sample_with(rng, &e_pt)?;
        for r in &krels {
            if !target.is_zero(&lifter.eval(r, &lift)?) {
                witness = Some(format!("fiber point {} is not on N^n", format_point(&target, &lift)));
            }
        }
        let mut kp = ksampler.sample(rng)?;
        kp.extend(e_pt.iter().map(|(v, c)| (*v, c.clone())));
        for r in &j.relations {
            if !target.is_zero(&lifter.eval(r, &kp)?) {
                witness = Some(format!("kernel point {} is not in the fiber", format_point(&target, &kp)));
            }
        }
        if witness.is_some() {
            break;
        }
    }
    checks.record(format!("n={n}: fiber over e equals N^n"), trials.points as u64, witness);
    Ok(SesOutcome::Checked(checks))
}

fn sample_e_point<S: SymbolicRing>(e: &GroupSchemePreset<S>, target: &S::Point, rng: &mut Prng) -> Result<Point<S::Point>> {
    let vars = e.presentation.vars();
    match e.name {
        PresetName::Ga => Ok([(vars[0], target.random(rng))].into_iter().collect()),
        PresetName::Gm => loop {
            let a = target.random(rng);
            if let Some(b) = target.inverse(&a) {
                return Ok([(vars[0], a), (vars[1], b)].into_iter().collect());
            }
            // keep the stream moving even if the ring has many non-units
            let _: u8 = rng.gen();
        },
        PresetName::Weierstrass(..) => Err(Error::Construction("no group law".into())),
    }
}

#[cfg(test)]
mod tests;
