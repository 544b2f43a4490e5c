//! Ideal membership by triangular elimination, and sampling of points on
//! relation systems over truncated rings by Hensel lifting.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::algebra::{Poly, PointRing, Ring, SymbolicRing, Var};
use crate::error::{Error, Result};
use crate::Prng;

/// One elimination step: relation `rel` is solved for `var`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rel: usize,
    pub var: Var,
}

/// Greedy triangular order. Each step picks a remaining relation and a
/// variable of it that occurs in no other remaining relation; with
/// `linear`, the variable must also occur with degree exactly 1. Zero
/// relations are dropped. Returns `None` when no order exists.
pub fn triangular_plan<R: Ring>(relations: &[Poly<R>], linear: bool) -> Option<Vec<Step>> {
    triangular_plan_excluding(relations, linear, &[])
}

/// As [`triangular_plan`], never solving for a variable in `exclude`.
pub fn triangular_plan_excluding<R: Ring>(relations: &[Poly<R>], linear: bool, exclude: &[Var]) -> Option<Vec<Step>> {
    let mut remaining: Vec<usize> = (0..relations.len()).filter(|&i| !relations[i].is_zero()).collect();
    let mut steps = Vec::new();
    while !remaining.is_empty() {
        let mut found = None;
        'outer: for (pos, &i) in remaining.iter().enumerate() {
            let r = &relations[i];
            for v in r.vars().into_iter().rev() {
                if exclude.contains(&v) || (linear && r.degree_in(v) != 1) {
                    continue;
                }
                if remaining.iter().any(|&j| j != i && relations[j].contains_var(v)) {
                    continue;
                }
                found = Some((pos, Step { rel: i, var: v }));
                break 'outer;
            }
        }
        let (pos, step) = found?;
        remaining.remove(pos);
        steps.push(step);
    }
    Some(steps)
}

/// Reduces `h` by substituting each step's variable through its (linear)
/// relation C·v + D, clearing the denominator C. The result is zero iff `h`
/// lies in the ideal after localizing at the leading coefficients.
pub fn eliminate<R: Ring>(h: &Poly<R>, relations: &[Poly<R>], plan: &[Step]) -> Poly<R> {
    let mut h = h.clone();
    for step in plan {
        let r = &relations[step.rel];
        let d = h.degree_in(step.var);
        if d == 0 {
            continue;
        }
        let c = r.coeff_of(step.var, 1);
        let minus_d = r.coeff_of(step.var, 0).neg();
        let mut acc = Poly::zero(h.ring());
        let mut num_pow = Poly::one(h.ring());
        let c_pows: Vec<Poly<R>> = {
            let mut v = vec![Poly::one(h.ring())];
            for _ in 0..d {
                let next = v.last().unwrap() * &c;
                v.push(next);
            }
            v
        };
        for k in 0..=d {
            let hk = h.coeff_of(step.var, k);
            if !hk.is_zero() {
                acc = &acc + &(&(&hk * &num_pow) * &c_pows[(d - k) as usize]);
            }
            num_pow = &num_pow * &minus_d;
        }
        h = acc;
    }
    h
}

/// Exact certificate that every polynomial in `images` lies in the ideal of
/// `relations`. Returns the first image with nonzero remainder as witness.
pub fn exact_certificate<R: Ring>(
    images: &[Poly<R>],
    relations: &[Poly<R>],
    plan: &[Step],
) -> std::result::Result<(), (usize, Poly<R>)> {
    for (i, h) in images.iter().enumerate() {
        let rem = eliminate(h, relations, plan);
        if !rem.is_zero() {
            return Err((i, rem));
        }
    }
    Ok(())
}

/// A point of a relation system with coordinates in a truncated ring.
pub type Point<P> = HashMap<Var, <P as Ring>::Elem>;

/// Samples points on {relations = 0} over `S::Point` by assigning the free
/// variables at random and Hensel-lifting each solved variable from a simple
/// root mod π.
pub struct PointSampler<S: SymbolicRing> {
    sym: S,
    target: S::Point,
    vars: Vec<Var>,
    free: Vec<Var>,
    /// Per solve step (in solving order): variable and its coefficient
    /// polynomials in that variable, lowest degree first.
    solves: Vec<(Var, Vec<Poly<S>>)>,
    relations: Vec<Poly<S>>,
    pub max_attempts: usize,
}

impl<S: SymbolicRing> PointSampler<S> {
    pub fn new(sym: &S, target: &S::Point, vars: &[Var], relations: &[Poly<S>]) -> Result<Self> {
        Self::with_fixed(sym, target, vars, relations, &[])
    }

    /// A sampler whose `fixed` variables are supplied by the caller of
    /// [`PointSampler::sample_with`]. Relations in fixed variables only are
    /// checked, not solved.
    pub fn with_fixed(sym: &S, target: &S::Point, vars: &[Var], relations: &[Poly<S>], fixed: &[Var]) -> Result<Self> {
        let open: Vec<Poly<S>> = relations
            .iter()
            .filter(|r| r.vars().iter().any(|v| !fixed.contains(v)))
            .cloned()
            .collect();
        let plan = triangular_plan_excluding(&open, false, fixed).ok_or_else(|| {
            Error::Construction("relation system has no triangular solving order".into())
        })?;
        let solved: Vec<Var> = plan.iter().map(|s| s.var).collect();
        let free = vars.iter().copied().filter(|v| !solved.contains(v) && !fixed.contains(v)).collect();
        let relations_all = relations;
        let relations = &open;
        let solves = plan
            .iter()
            .rev()
            .map(|s| {
                let r = &relations[s.rel];
                let coeffs = (0..=r.degree_in(s.var)).map(|k| r.coeff_of(s.var, k)).collect();
                (s.var, coeffs)
            })
            .collect();
        Ok(PointSampler {
            sym: sym.clone(),
            target: target.clone(),
            vars: vars.to_vec(),
            free,
            solves,
            relations: relations_all.to_vec(),
            max_attempts: 200,
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn eval(&self, f: &Poly<S>, point: &Point<S::Point>) -> Result<<S::Point as Ring>::Elem> {
        f.eval(&self.target, |c| self.sym.reduce(c, &self.target), point)
    }

    pub fn sample(&self, rng: &mut Prng) -> Result<Point<S::Point>> {
        self.sample_with(rng, &HashMap::new())
    }

    /// Samples with the fixed variables taken from `fixed`.
    pub fn sample_with(&self, rng: &mut Prng, fixed: &Point<S::Point>) -> Result<Point<S::Point>> {
        for _ in 0..self.max_attempts {
            if let Some(p) = self.try_sample(rng, fixed)? {
                return Ok(p);
            }
        }
        Err(Error::Construction(format!(
            "no point found after {} attempts",
            self.max_attempts
        )))
    }

    fn try_sample(&self, rng: &mut Prng, fixed: &Point<S::Point>) -> Result<Option<Point<S::Point>>> {
        let t = &self.target;
        let mut point: Point<S::Point> = fixed.clone();
        for &v in &self.free {
            point.insert(v, t.random(rng));
        }
        for (v, coeffs) in &self.solves {
            let cs: Vec<_> = coeffs.iter().map(|c| self.eval(c, &point)).collect::<Result<_>>()?;
            match hensel_root(t, &cs, rng) {
                Some(root) => {
                    point.insert(*v, root);
                }
                None => return Ok(None),
            }
        }
        for r in &self.relations {
            if !t.is_zero(&self.eval(r, &point)?) {
                if r.vars().iter().all(|v| fixed.contains_key(v)) {
                    return Err(Error::Construction(format!("fixed coordinates violate {r}")));
                }
                return Err(Error::Integrity {
                    context: "sampled point does not satisfy relations".into(),
                    term: r.to_string(),
                });
            }
        }
        Ok(Some(point))
    }
}

fn horner<P: Ring>(ring: &P, cs: &[P::Elem], x: &P::Elem) -> P::Elem {
    cs.iter().rev().fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), c))
}

/// A root of Σ cs[k]·v^k lifted from a random simple root mod π.
pub fn hensel_root<P: PointRing>(ring: &P, cs: &[P::Elem], rng: &mut Prng) -> Option<P::Elem> {
    let deriv: Vec<P::Elem> = cs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| ring.mul(&ring.from_i64(k as i64), c))
        .collect();
    let mut residues = ring.residues();
    residues.shuffle(rng);
    let start = residues.into_iter().find(|r| {
        ring.divisible_by_pi(&horner(ring, cs, r)) && !ring.divisible_by_pi(&horner(ring, &deriv, r))
    })?;
    // Newton's iteration doubles π-adic precision; 64 rounds is far beyond any
    // supported truncation.
    let mut x = start;
    for _ in 0..64 {
        let fx = horner(ring, cs, &x);
        if ring.is_zero(&fx) {
            return Some(x);
        }
        let inv = ring.inverse(&horner(ring, &deriv, &x))?;
        x = ring.sub(&x, &ring.mul(&fx, &inv));
    }
    None
}

/// A random polynomial with at most three terms of degree at most 3 in at
/// most three of `gens`, with small coefficients.
pub fn random_poly<S: SymbolicRing>(sym: &S, gens: &[Var], rng: &mut Prng) -> Poly<S> {
    let mut pick: Vec<Var> = gens.to_vec();
    pick.shuffle(rng);
    pick.truncate(3);
    let mut f = Poly::constant(sym, sym.random_small(rng));
    for _ in 0..rng.gen_range(1..=3) {
        let mut m = Poly::constant(sym, sym.random_small(rng));
        let deg = rng.gen_range(0..=3);
        for _ in 0..deg {
            if pick.is_empty() {
                break;
            }
            let v = pick[rng.gen_range(0..pick.len())];
            m = &m * &Poly::var(sym, v);
        }
        f = &f + &m;
    }
    f
}
