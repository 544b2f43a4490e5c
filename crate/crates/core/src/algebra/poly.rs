//! Sparse multivariate polynomials over a [`Ring`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use smallvec::SmallVec;

use super::ring::{PiRing, Ring};
use super::var::Var;
use crate::error::{Error, Result};

/// Exponent vector: `(variable, exponent)` pairs sorted by variable, no zero
/// exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(smallvec::smallvec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_default() += e;
        }
        Monomial(acc.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Var, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes `v` and returns its former exponent.
    pub fn without(&self, v: Var) -> (Monomial, u32) {
        let e = self.exponent(v);
        (Monomial(self.0.iter().copied().filter(|(w, _)| *w != v).collect()), e)
    }

    fn structural(&self) -> Vec<(Var, u32)> {
        let mut v = self.0.to_vec();
        v.sort_by(|a, b| a.0.structural_cmp(&b.0));
        v
    }

    /// Graded lexicographic order with the structural variable order:
    /// `Greater` means printed first.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (self.structural(), other.structural());
            let (mut i, mut j) = (0, 0);
            loop {
                match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(x), Some(y)) => match x.0.structural_cmp(&y.0) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {
                            if x.1 != y.1 {
                                return x.1.cmp(&y.1);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .structural()
            .into_iter()
            .map(|(v, e)| if e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sparse polynomial; no stored zero coefficients.
#[derive(Clone)]
pub struct Poly<R: Ring> {
    ring: R,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl<R: Ring> Eq for Poly<R> {}

/// Divisors accepted by [`Poly::exact_div`].
pub enum Divisor<'a, R: Ring> {
    Pi,
    Scalar(R::Elem),
    /// Monic in its single variable.
    MonicUnivariate(&'a Poly<R>),
}

impl<R: Ring> Poly<R> {
    pub fn zero(ring: &R) -> Self {
        Poly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &R) -> Self {
        Self::constant(ring, ring.one())
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        let mut p = Self::zero(ring);
        if !ring.is_zero(&c) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn int(ring: &R, n: i64) -> Self {
        Self::constant(ring, ring.from_i64(n))
    }

    pub fn var(ring: &R, v: Var) -> Self {
        Self::term(ring, ring.one(), Monomial::var(v))
    }

    pub fn term(ring: &R, c: R::Elem, m: Monomial) -> Self {
        let mut p = Self::zero(ring);
        if !ring.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(ring: &R, terms: impl IntoIterator<Item = (Monomial, R::Elem)>) -> Self {
        let mut acc: HashMap<Monomial, R::Elem> = HashMap::new();
        for (m, c) in terms {
            accumulate(ring, &mut acc, m, c);
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: &R, acc: HashMap<Monomial, R::Elem>) -> Self {
        Poly {
            ring: ring.clone(),
            terms: acc.into_iter().filter(|(_, c)| !ring.is_zero(c)).collect(),
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Variables that occur, in structural order.
    pub fn vars(&self) -> Vec<Var> {
        let set: BTreeSet<Var> = self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| *v)).collect();
        let mut v: Vec<Var> = set.into_iter().collect();
        super::var::sort_structural(&mut v);
        v
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, k: u32) -> Poly<R> {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter_map(|(m, c)| {
                    let (rest, e) = m.without(v);
                    (e == k).then(|| (rest, c.clone()))
                })
                .collect(),
        }
    }

    fn check_ring(&self, other: &Poly<R>) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring.descriptor(), other.ring.descriptor()))
        }
    }

    pub fn try_add(&self, other: &Poly<R>) -> Result<Poly<R>> {
        self.check_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            match terms.get_mut(m) {
                Some(e) => {
                    *e = self.ring.add(e, c);
                    if self.ring.is_zero(e) {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(m.clone(), c.clone());
                }
            }
        }
        Ok(Poly { ring: self.ring.clone(), terms })
    }

    pub fn try_sub(&self, other: &Poly<R>) -> Result<Poly<R>> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Poly<R>) -> Result<Poly<R>> {
        self.check_ring(other)?;
        let ring = &self.ring;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(ring));
        }
        let mut acc: HashMap<Monomial, R::Elem> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(ring, &mut acc, m1.mul(m2), ring.mul(c1, c2));
            }
        }
        Ok(Self::from_map(ring, acc))
    }

    pub fn neg(&self) -> Poly<R> {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), self.ring.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Poly<R> {
        let ring = &self.ring;
        Poly {
            ring: ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), ring.mul(x, c)))
                .filter(|(_, x)| !ring.is_zero(x))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Poly<R> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Simultaneous substitution; every variable of `self` needs an image.
    pub fn subst(&self, images: &BTreeMap<Var, Poly<R>>) -> Result<Poly<R>> {
        for v in self.vars() {
            if !images.contains_key(&v) {
                return Err(Error::MissingImage(v.to_string()));
            }
        }
        Ok(self.subst_partial(images))
    }

    /// Substitution that leaves variables without an image fixed.
    pub fn subst_partial(&self, images: &BTreeMap<Var, Poly<R>>) -> Poly<R> {
        let ring = &self.ring;
        let mut powers: HashMap<(Var, u32), Poly<R>> = HashMap::new();
        let mut result: HashMap<Monomial, R::Elem> = HashMap::new();
        for (m, c) in &self.terms {
            let mut fixed = Vec::new();
            let mut factor = Poly::constant(ring, c.clone());
            for &(v, e) in m.iter() {
                match images.get(&v) {
                    Some(img) => {
                        let pw = powers.entry((v, e)).or_insert_with(|| img.pow(e as u64));
                        factor = &factor * pw;
                    }
                    None => fixed.push((v, e)),
                }
            }
            let fm = Monomial::from_pairs(fixed);
            for (m2, c2) in factor.terms {
                accumulate(ring, &mut result, m2.mul(&fm), c2);
            }
        }
        Self::from_map(ring, result)
    }

    /// Renames variables by a one-to-one map (unlisted variables are kept).
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Poly<R> {
        Self::from_terms(
            &self.ring,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_pairs(m.iter().map(|(v, e)| (f(*v), *e))), c.clone())),
        )
    }

    pub fn map_coeffs<T: Ring>(&self, target: &T, f: impl Fn(&R::Elem) -> T::Elem) -> Poly<T> {
        Poly::from_terms(target, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Evaluates in `target` through the coefficient map `f`.
    pub fn eval<T: Ring>(
        &self,
        target: &T,
        f: impl Fn(&R::Elem) -> T::Elem,
        point: &HashMap<Var, T::Elem>,
    ) -> Result<T::Elem> {
        let mut powers: HashMap<(Var, u32), T::Elem> = HashMap::new();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = f(c);
            for &(v, e) in m.iter() {
                let x = point.get(&v).ok_or_else(|| Error::MissingImage(v.to_string()))?;
                let pw = powers.entry((v, e)).or_insert_with(|| target.pow(x, e as u64));
                t = target.mul(&t, pw);
            }
            acc = target.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Division with a hard exactness contract: the quotient is re-multiplied
    /// and compared before it is returned.
    pub fn exact_div(&self, d: &Divisor<'_, R>) -> Result<Poly<R>>
    where
        R: PiRing,
    {
        let q = match d {
            Divisor::Pi => return self.div_pi(),
            Divisor::Scalar(c) => self.div_scalar(c)?,
            Divisor::MonicUnivariate(g) => self.div_monic(g)?,
        };
        let back = match d {
            Divisor::Pi => unreachable!(),
            Divisor::Scalar(c) => q.scale(c),
            Divisor::MonicUnivariate(g) => &q * *g,
        };
        if back != *self {
            return Err(Error::Integrity {
                context: "exact division re-multiplication".into(),
                term: (&back - self).to_string(),
            });
        }
        Ok(q)
    }

    pub fn div_scalar(&self, c: &R::Elem) -> Result<Poly<R>> {
        let ring = &self.ring;
        let mut terms = BTreeMap::new();
        for (m, x) in &self.terms {
            match ring.div_exact(x, c) {
                Some(y) => {
                    terms.insert(m.clone(), y);
                }
                None => {
                    return Err(Error::Integrity {
                        context: format!("division by {}", ring.format_elem(c)),
                        term: Poly::term(ring, x.clone(), m.clone()).to_string(),
                    })
                }
            }
        }
        Ok(Poly { ring: ring.clone(), terms })
    }

    fn div_monic(&self, g: &Poly<R>) -> Result<Poly<R>> {
        let ring = &self.ring;
        let vars = g.vars();
        if vars.len() != 1 {
            return Err(Error::Construction("divisor must be univariate".into()));
        }
        let v = vars[0];
        let dg = g.degree_in(v);
        if !ring.is_one(&g.coeff(&Monomial::from_pairs([(v, dg)]))) {
            return Err(Error::Construction("divisor must be monic".into()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero(ring);
        loop {
            let dr = rem.degree_in(v);
            if rem.is_zero() || dr < dg {
                break;
            }
            let lead = rem.coeff_of(v, dr);
            let shift = Poly::term(ring, ring.one(), Monomial::from_pairs([(v, dr - dg)]));
            let t = &lead * &shift;
            rem = &rem - &(&t * g);
            quot = &quot + &t;
        }
        if !rem.is_zero() {
            return Err(Error::Integrity { context: format!("division by {g}"), term: rem.to_string() });
        }
        Ok(quot)
    }
}

impl<R: PiRing> Poly<R> {
    /// Exact division by π; the error carries the first non-divisible term.
    pub fn div_pi(&self) -> Result<Poly<R>> {
        let ring = &self.ring;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            match ring.div_pi(c) {
                Some(y) => {
                    terms.insert(m.clone(), y);
                }
                None => {
                    return Err(Error::Integrity {
                        context: "division by pi".into(),
                        term: Poly::term(ring, c.clone(), m.clone()).to_string(),
                    })
                }
            }
        }
        Ok(Poly { ring: ring.clone(), terms })
    }

    pub fn div_pi_pow(&self, k: u32) -> Result<Poly<R>> {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.div_pi()?;
        }
        Ok(p)
    }

    pub fn divisible_by_pi(&self) -> bool {
        self.terms.values().all(|c| self.ring.divisible_by_pi(c))
    }

    /// The q-th power of the polynomial (not of its coefficients only).
    pub fn q_pow(&self) -> Poly<R> {
        self.pow(self.ring.q())
    }
}

fn accumulate<R: Ring>(ring: &R, acc: &mut HashMap<Monomial, R::Elem>, m: Monomial, c: R::Elem) {
    use std::collections::hash_map::Entry;
    match acc.entry(m) {
        Entry::Occupied(mut o) => {
            let s = ring.add(o.get(), &c);
            *o.get_mut() = s;
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl<'a, R: Ring> std::ops::$tr<&'a Poly<R>> for &'a Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: &'a Poly<R>) -> Poly<R> {
                self.$inner(rhs).expect("polynomials over different coefficient rings")
            }
        }
        impl<R: Ring> std::ops::$tr<Poly<R>> for Poly<R> {
            type Output = Poly<R>;
            fn $method(self, rhs: Poly<R>) -> Poly<R> {
                (&self).$inner(&rhs).expect("polynomials over different coefficient rings")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl<R: Ring> std::ops::Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        Poly::neg(self)
    }
}

impl<R: Ring> Poly<R> {
    /// Terms in canonical print order (graded lex, largest first).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &R::Elem)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|a, b| b.0.grlex_cmp(a.0));
        t
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = &self.ring;
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = ring.is_negative(c);
            let abs = if negative { ring.neg(c) } else { c.clone() };
            let body = if m.is_one() {
                ring.format_elem(&abs)
            } else if ring.is_one(&abs) {
                m.to_string()
            } else if ring.needs_parens(&abs) {
                format!("({})*{m}", ring.format_elem(&abs))
            } else {
                format!("{}*{m}", ring.format_elem(&abs))
            };
            match (i, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({self})", self.ring.descriptor())
    }
}

/// Arithmetic selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    Neg,
    Pow(u64),
}

/// Checked arithmetic entry point: mixing coefficient rings is an error.
pub fn poly_arith<R: Ring>(op: PolyOp, f: &Poly<R>, g: Option<&Poly<R>>) -> Result<Poly<R>> {
    let need = || g.ok_or_else(|| Error::Shape("binary operation needs two operands".into()));
    match op {
        PolyOp::Add => f.try_add(need()?),
        PolyOp::Mul => f.try_mul(need()?),
        PolyOp::Neg => Ok(f.neg()),
        PolyOp::Pow(e) => Ok(f.pow(e)),
    }
}
