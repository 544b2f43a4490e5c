//! F_q = F_p[u]/(m(u)), the polynomial ring F_q[t] and its truncations
//! F_q[t]/(t^K).

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng as _;

use super::ring::{PiRing, PointRing, Ring, SymbolicRing};
use crate::error::{Error, Result};
use crate::Prng;

/// Element of F_q: coefficients in u, low degree first, always length e.
pub type FqElem = Vec<u64>;

#[derive(Debug, PartialEq, Eq)]
struct FqData {
    p: u64,
    e: u32,
    /// Monic modulus, low degree first, length e + 1.
    modulus: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fq {
    data: Arc<FqData>,
}

/// Conway-style default moduli for the small extension fields we support
/// without an explicit modulus.
pub fn default_modulus(p: u64, e: u32) -> Option<Vec<u64>> {
    match (p, e) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        _ => None,
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo `b` over F_p (`b` nonzero, trimmed).
fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db], p - 2, p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, bi) in b.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - c * bi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Trial factoring: no monic factor of degree 1..=deg/2.
pub fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let deg = modulus.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut x = idx;
            for _ in 0..d {
                cand.push(x % p);
                x /= p;
            }
            cand.push(1);
            if fp_poly_rem(modulus, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Fq {
    pub fn new(p: u64, e: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        let modulus = match modulus {
            Some(m) => m,
            None => default_modulus(p, e).ok_or_else(|| {
                Error::Construction(format!("F_{p}^{e} needs an explicit irreducible modulus"))
            })?,
        };
        let modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
            return Err(Error::Construction(format!(
                "modulus must be monic of degree {e} over F_{p}"
            )));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::Construction(format!(
                "modulus {} is reducible over F_{p}",
                format_fp_poly(&modulus, "u")
            )));
        }
        Ok(Fq { data: Arc::new(FqData { p, e, modulus }) })
    }

    pub fn p(&self) -> u64 {
        self.data.p
    }

    pub fn e(&self) -> u32 {
        self.data.e
    }

    pub fn size(&self) -> u64 {
        self.data.p.pow(self.data.e)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.data.modulus
    }

    fn elem_zero(&self) -> FqElem {
        vec![0; self.data.e as usize]
    }

    pub fn elements(&self) -> Vec<FqElem> {
        (0..self.size()).map(|i| self.from_index(i)).collect()
    }

    fn from_index(&self, mut i: u64) -> FqElem {
        let p = self.data.p;
        (0..self.data.e)
            .map(|_| {
                let c = i % p;
                i /= p;
                c
            })
            .collect()
    }

    pub fn random_elem(&self, rng: &mut Prng) -> FqElem {
        self.from_index(rng.gen_range(0..self.size()))
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(Ring::pow(self, a, self.size() - 2))
        }
    }
}

fn format_fp_poly(c: &[u64], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &ci) in c.iter().enumerate().rev() {
        if ci == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (ci, mono.is_empty()) {
            (_, true) => ci.to_string(),
            (1, false) => mono,
            (_, false) => format!("{ci}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl Ring for Fq {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        self.elem_zero()
    }
    fn one(&self) -> FqElem {
        let mut v = self.elem_zero();
        v[0] = 1;
        v
    }
    fn from_int(&self, n: &BigInt) -> FqElem {
        let mut v = self.elem_zero();
        v[0] = n.mod_floor(&BigInt::from(self.data.p)).to_u64().unwrap();
        v
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.data.p;
        a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        let p = self.data.p;
        a.iter().map(|x| (p - x) % p).collect()
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.data.p;
        let e = self.data.e as usize;
        if e == 1 {
            return vec![(a[0] as u128 * b[0] as u128 % p as u128) as u64];
        }
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let mut r = fp_poly_rem(&prod, &self.data.modulus, p);
        r.resize(e, 0);
        r
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|c| *c == 0)
    }
    fn q_power(&self, a: &FqElem) -> FqElem {
        Ring::pow(self, a, self.size())
    }
    fn div_exact(&self, a: &FqElem, b: &FqElem) -> Option<FqElem> {
        self.inv(b).map(|i| self.mul(a, &i))
    }
    fn format_elem(&self, a: &FqElem) -> String {
        format_fp_poly(a, "u")
    }
    fn needs_parens(&self, a: &FqElem) -> bool {
        a.iter().filter(|c| **c != 0).count() > 1
    }
    fn atom(&self, name: &str) -> Option<FqElem> {
        (name == "u" && self.data.e > 1).then(|| {
            let mut v = self.elem_zero();
            v[1] = 1;
            v
        })
    }
    fn descriptor(&self) -> String {
        if self.data.e == 1 {
            format!("F_{}", self.data.p)
        } else {
            format!("F_{}[u]/({})", self.data.p, format_fp_poly(&self.data.modulus, "u"))
        }
    }
}

/// Polynomials over F_q with optional truncation, shared by [`FqT`] and
/// [`FqTTrunc`]. Elements are dense in t, low degree first, trimmed.
fn poly_trim(fq: &Fq, v: &mut Vec<FqElem>) {
    while v.last().is_some_and(|c| fq.is_zero(c)) {
        v.pop();
    }
}

fn poly_add(fq: &Fq, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
    let n = a.len().max(b.len());
    let zero = fq.zero();
    let mut out: Vec<FqElem> = (0..n)
        .map(|i| fq.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    poly_trim(fq, &mut out);
    out
}

fn poly_mul(fq: &Fq, a: &[FqElem], b: &[FqElem], trunc: Option<usize>) -> Vec<FqElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut n = a.len() + b.len() - 1;
    if let Some(k) = trunc {
        n = n.min(k);
    }
    let mut out = vec![fq.zero(); n];
    for (i, x) in a.iter().enumerate() {
        if i >= n || fq.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] = fq.add(&out[i + j], &fq.mul(x, y));
        }
    }
    poly_trim(fq, &mut out);
    out
}

fn poly_format(fq: &Fq, a: &[FqElem]) -> String {
    let mut parts = Vec::new();
    for (i, c) in a.iter().enumerate().rev() {
        if fq.is_zero(c) {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        let cs = fq.format_elem(c);
        parts.push(if mono.is_empty() {
            cs
        } else if fq.is_one(c) {
            mono
        } else if fq.needs_parens(c) {
            format!("({cs})*{mono}")
        } else {
            format!("{cs}*{mono}")
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn nonzero_terms(fq: &Fq, a: &[FqElem]) -> usize {
    a.iter().filter(|c| !fq.is_zero(c)).count()
}

/// F_q[t] with uniformizer π = t (char-p mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqT {
    fq: Fq,
}

impl FqT {
    pub fn new(fq: Fq) -> Self {
        FqT { fq }
    }

    pub fn base_field(&self) -> &Fq {
        &self.fq
    }

    pub fn constant(&self, c: FqElem) -> Vec<FqElem> {
        let mut v = vec![c];
        poly_trim(&self.fq, &mut v);
        v
    }
}

impl Ring for FqT {
    type Elem = Vec<FqElem>;

    fn zero(&self) -> Vec<FqElem> {
        Vec::new()
    }
    fn one(&self) -> Vec<FqElem> {
        vec![self.fq.one()]
    }
    fn from_int(&self, n: &BigInt) -> Vec<FqElem> {
        self.constant(self.fq.from_int(n))
    }
    fn add(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        poly_add(&self.fq, a, b)
    }
    fn neg(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        a.iter().map(|c| self.fq.neg(c)).collect()
    }
    fn mul(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        poly_mul(&self.fq, a, b, None)
    }
    fn is_zero(&self, a: &Vec<FqElem>) -> bool {
        a.is_empty()
    }
    fn q_power(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        self.pow(a, self.fq.size())
    }
    fn div_exact(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Option<Vec<FqElem>> {
        let fq = &self.fq;
        let lead_inv = fq.inv(b.last()?)?;
        let db = b.len() - 1;
        let mut r = a.clone();
        if r.len() < b.len() {
            return r.is_empty().then(Vec::new);
        }
        let mut quot = vec![fq.zero(); r.len() - db];
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = fq.mul(r.last().unwrap(), &lead_inv);
            for (i, bi) in b.iter().enumerate() {
                r[shift + i] = fq.sub(&r[shift + i], &fq.mul(&c, bi));
            }
            quot[shift] = c;
            poly_trim(fq, &mut r);
        }
        poly_trim(fq, &mut quot);
        r.is_empty().then_some(quot)
    }
    fn format_elem(&self, a: &Vec<FqElem>) -> String {
        poly_format(&self.fq, a)
    }
    fn needs_parens(&self, a: &Vec<FqElem>) -> bool {
        nonzero_terms(&self.fq, a) > 1
            || a.iter().any(|c| !self.fq.is_zero(c) && self.fq.needs_parens(c))
    }
    fn atom(&self, name: &str) -> Option<Vec<FqElem>> {
        match name {
            "t" => Some(vec![self.fq.zero(), self.fq.one()]),
            _ => self.fq.atom(name).map(|c| vec![c]),
        }
    }
    fn descriptor(&self) -> String {
        format!("{}[t]", self.fq.descriptor())
    }
}

impl PiRing for FqT {
    fn pi(&self) -> Vec<FqElem> {
        vec![self.fq.zero(), self.fq.one()]
    }
    fn q(&self) -> u64 {
        self.fq.size()
    }
    fn p(&self) -> u64 {
        self.fq.p()
    }
    fn div_pi(&self, a: &Vec<FqElem>) -> Option<Vec<FqElem>> {
        match a.first() {
            None => Some(Vec::new()),
            Some(c) if self.fq.is_zero(c) => Some(a[1..].to_vec()),
            _ => None,
        }
    }
    fn char_zero(&self) -> bool {
        false
    }
}

impl SymbolicRing for FqT {
    type Point = FqTTrunc;

    fn point_ring(&self, k: u32) -> FqTTrunc {
        FqTTrunc { fq: self.fq.clone(), k: k as usize }
    }
    fn reduce(&self, a: &Vec<FqElem>, target: &FqTTrunc) -> Vec<FqElem> {
        let mut v: Vec<FqElem> = a.iter().take(target.k).cloned().collect();
        poly_trim(&self.fq, &mut v);
        v
    }
    fn random_small(&self, rng: &mut Prng) -> Vec<FqElem> {
        let mut v: Vec<FqElem> = (0..rng.gen_range(0..3)).map(|_| self.fq.random_elem(rng)).collect();
        poly_trim(&self.fq, &mut v);
        v
    }
}

/// F_q[t]/(t^K).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqTTrunc {
    fq: Fq,
    k: usize,
}

impl FqTTrunc {
    pub fn new(fq: Fq, k: usize) -> Self {
        FqTTrunc { fq, k }
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Ring for FqTTrunc {
    type Elem = Vec<FqElem>;

    fn zero(&self) -> Vec<FqElem> {
        Vec::new()
    }
    fn one(&self) -> Vec<FqElem> {
        vec![self.fq.one()]
    }
    fn from_int(&self, n: &BigInt) -> Vec<FqElem> {
        let mut v = vec![self.fq.from_int(n)];
        poly_trim(&self.fq, &mut v);
        v
    }
    fn add(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        poly_add(&self.fq, a, b)
    }
    fn neg(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        a.iter().map(|c| self.fq.neg(c)).collect()
    }
    fn mul(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Vec<FqElem> {
        poly_mul(&self.fq, a, b, Some(self.k))
    }
    fn is_zero(&self, a: &Vec<FqElem>) -> bool {
        a.is_empty()
    }
    fn q_power(&self, a: &Vec<FqElem>) -> Vec<FqElem> {
        self.pow(a, self.fq.size())
    }
    fn div_exact(&self, a: &Vec<FqElem>, b: &Vec<FqElem>) -> Option<Vec<FqElem>> {
        self.inverse(b).map(|i| self.mul(a, &i))
    }
    fn format_elem(&self, a: &Vec<FqElem>) -> String {
        poly_format(&self.fq, a)
    }
    fn needs_parens(&self, a: &Vec<FqElem>) -> bool {
        nonzero_terms(&self.fq, a) > 1
    }
    fn atom(&self, name: &str) -> Option<Vec<FqElem>> {
        match name {
            "t" => {
                let mut v = vec![self.fq.zero(), self.fq.one()];
                v.truncate(self.k);
                poly_trim(&self.fq, &mut v);
                Some(v)
            }
            _ => self.fq.atom(name).map(|c| vec![c]),
        }
    }
    fn descriptor(&self) -> String {
        format!("{}[t]/(t^{})", self.fq.descriptor(), self.k)
    }
}

impl PointRing for FqTTrunc {
    fn pi(&self) -> Vec<FqElem> {
        self.atom("t").unwrap()
    }
    fn q(&self) -> u64 {
        self.fq.size()
    }
    fn random(&self, rng: &mut Prng) -> Vec<FqElem> {
        let mut v: Vec<FqElem> = (0..self.k).map(|_| self.fq.random_elem(rng)).collect();
        poly_trim(&self.fq, &mut v);
        v
    }
    fn residues(&self) -> Vec<Vec<FqElem>> {
        self.fq
            .elements()
            .into_iter()
            .map(|c| {
                let mut v = vec![c];
                poly_trim(&self.fq, &mut v);
                v
            })
            .collect()
    }
    fn inverse(&self, a: &Vec<FqElem>) -> Option<Vec<FqElem>> {
        let fq = &self.fq;
        let c0inv = fq.inv(a.first()?)?;
        // Power-series inversion, coefficient by coefficient.
        let mut inv: Vec<FqElem> = vec![c0inv.clone()];
        for i in 1..self.k {
            let mut s = fq.zero();
            for j in 1..=i {
                if let Some(aj) = a.get(j) {
                    s = fq.add(&s, &fq.mul(aj, &inv[i - j]));
                }
            }
            inv.push(fq.neg(&fq.mul(&s, &c0inv)));
        }
        poly_trim(fq, &mut inv);
        Some(inv)
    }
    fn divisible_by_pi(&self, a: &Vec<FqElem>) -> bool {
        a.first().is_none_or(|c| self.fq.is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_modulus_validation() {
        // u^2 + u + 1 is the only irreducible quadratic over F_2.
        assert!(Fq::new(2, 2, Some(vec![1, 1, 1])).is_ok());
        // u^2 + 1 = (u + 1)^2
        assert!(Fq::new(2, 2, Some(vec![1, 0, 1])).is_err());
        assert!(Fq::new(2, 2, Some(vec![0, 1, 1])).is_err());
        assert!(Fq::new(2, 2, Some(vec![0, 0, 1])).is_err());
    }

    #[test]
    fn builtin_table() {
        for (p, e) in [(2, 2), (2, 3), (3, 2)] {
            assert!(Fq::new(p, e, None).is_ok(), "F_{p}^{e}");
        }
        assert!(Fq::new(5, 2, None).is_err());
    }

    #[test]
    fn frobenius_is_identity_on_fq_and_additive() {
        let f = Fq::new(3, 2, None).unwrap();
        let els = f.elements();
        for a in &els {
            assert_eq!(&f.q_power(a), a);
            let frob_p = f.pow(a, 3);
            for b in &els {
                assert_eq!(f.pow(&f.add(a, b), 3), f.add(&frob_p, &f.pow(b, 3)));
            }
        }
    }

    #[test]
    fn fqt_division() {
        let r = FqT::new(Fq::new(2, 1, None).unwrap());
        let t = r.atom("t").unwrap();
        let t1 = r.add(&t, &r.one());
        let prod = r.mul(&t1, &t1);
        assert_eq!(r.div_exact(&prod, &t1), Some(t1.clone()));
        assert_eq!(r.div_exact(&t1, &t), None);
        assert_eq!(r.div_pi(&r.mul(&t, &t1)), Some(t1));
    }

    #[test]
    fn truncated_inverse() {
        let r = FqTTrunc::new(Fq::new(3, 1, None).unwrap(), 6);
        let a = vec![vec![2], vec![1], vec![0], vec![2]];
        let inv = r.inverse(&a).unwrap();
        assert_eq!(r.mul(&a, &inv), r.one());
        assert!(r.inverse(&vec![vec![0], vec![1]]).is_none());
    }
}
