use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;

use super::ring::{PiRing, PointRing, Ring, SymbolicRing};
use crate::error::{Error, Result};
use crate::Prng;

/// ℤ with uniformizer π = p and q = p (char-zero mode).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integers {
    p: u64,
    q: u64,
}

impl Integers {
    pub fn new(p: u64, q: u64) -> Self {
        Integers { p, q }
    }
}

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigInt) -> bool {
        a.is_one()
    }
    fn pow(&self, a: &BigInt, e: u64) -> BigInt {
        num_traits::pow(a.clone(), e as usize)
    }
    fn q_power(&self, a: &BigInt) -> BigInt {
        self.pow(a, self.q)
    }
    fn div_exact(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        if b.is_zero() {
            return None;
        }
        let (d, r) = a.div_rem(b);
        r.is_zero().then_some(d)
    }
    fn format_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
    fn is_negative(&self, a: &BigInt) -> bool {
        a.is_negative()
    }
    fn descriptor(&self) -> String {
        format!("ZZ[pi={}]", self.p)
    }
}

impl PiRing for Integers {
    fn pi(&self) -> BigInt {
        BigInt::from(self.p)
    }
    fn q(&self) -> u64 {
        self.q
    }
    fn p(&self) -> u64 {
        self.p
    }
    fn div_pi(&self, a: &BigInt) -> Option<BigInt> {
        self.div_exact(a, &BigInt::from(self.p))
    }
    fn char_zero(&self) -> bool {
        true
    }
}

impl SymbolicRing for Integers {
    type Point = ZMod;

    fn point_ring(&self, k: u32) -> ZMod {
        ZMod::new(self.p, k, self.q).expect("p^K must fit in 62 bits")
    }
    fn reduce(&self, a: &BigInt, target: &ZMod) -> u64 {
        target.reduce_big(a)
    }
    fn random_small(&self, rng: &mut Prng) -> BigInt {
        BigInt::from(rng.gen_range(-4i64..=4))
    }
}

/// ℚ, kept as a coefficient ring for completeness; nothing in the jet or
/// Witt machinery divides outside ℤ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rationals {
    q: u64,
}

impl Rationals {
    pub fn new(q: u64) -> Self {
        Rationals { q }
    }
}

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn q_power(&self, a: &BigRational) -> BigRational {
        self.pow(a, self.q)
    }
    fn div_exact(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        (!b.is_zero()).then(|| a / b)
    }
    fn format_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn needs_parens(&self, a: &BigRational) -> bool {
        !a.is_integer()
    }
    fn is_negative(&self, a: &BigRational) -> bool {
        a.is_negative()
    }
    fn descriptor(&self) -> String {
        "QQ".to_string()
    }
}

/// ℤ/p^K with canonical representatives in `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMod {
    m: u64,
    p: u64,
    k: u32,
    q: u64,
}

impl ZMod {
    pub fn new(p: u64, k: u32, q: u64) -> Result<Self> {
        let m = (p as u128).checked_pow(k).filter(|m| *m < (1u128 << 62));
        match m {
            Some(m) if k >= 1 => Ok(ZMod { m: m as u64, p, k, q }),
            _ => Err(Error::Construction(format!("modulus {p}^{k} out of range"))),
        }
    }

    /// Builds ℤ/m, insisting that m is a power of the prime `p`.
    pub fn with_modulus(p: u64, m: u64, q: u64) -> Result<Self> {
        let mut k = 0;
        let mut r = m;
        while r > 1 && r % p == 0 {
            r /= p;
            k += 1;
        }
        if r != 1 || k == 0 {
            return Err(Error::Construction(format!("{m} is not a power of {p}")));
        }
        ZMod::new(p, k, q)
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn reduce_big(&self, a: &BigInt) -> u64 {
        a.mod_floor(&BigInt::from(self.m)).to_u64().unwrap()
    }
}

impl Ring for ZMod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.m
    }
    fn from_int(&self, n: &BigInt) -> u64 {
        self.reduce_big(n)
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.m as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.m as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.m - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn q_power(&self, a: &u64) -> u64 {
        self.pow(a, self.q)
    }
    fn div_exact(&self, a: &u64, b: &u64) -> Option<u64> {
        self.inverse(b).map(|inv| self.mul(a, &inv))
    }
    fn format_elem(&self, a: &u64) -> String {
        a.to_string()
    }
    fn descriptor(&self) -> String {
        format!("ZZ/{}", self.m)
    }
}

impl PointRing for ZMod {
    fn pi(&self) -> u64 {
        self.p % self.m
    }
    fn q(&self) -> u64 {
        self.q
    }
    fn random(&self, rng: &mut Prng) -> u64 {
        rng.gen_range(0..self.m)
    }
    fn residues(&self) -> Vec<u64> {
        (0..self.p).collect()
    }
    fn inverse(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        // Units of ℤ/p^K have order dividing p^(K-1)(p-1).
        let order = self.m / self.p * (self.p - 1);
        Some(self.pow(a, order - 1))
    }
    fn divisible_by_pi(&self, a: &u64) -> bool {
        a % self.p == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_requires_prime_power() {
        assert_eq!(ZMod::with_modulus(2, 64, 2).unwrap().k(), 6);
        assert!(ZMod::with_modulus(2, 48, 2).is_err());
        assert!(ZMod::with_modulus(3, 1, 3).is_err());
    }

    #[test]
    fn zmod_inverse() {
        let r = ZMod::new(2, 6, 2).unwrap();
        for a in (1..64).step_by(2) {
            let inv = r.inverse(&a).unwrap();
            assert_eq!(r.mul(&a, &inv), 1);
        }
        assert_eq!(r.inverse(&6), None);
    }

    #[test]
    fn integers_div_pi() {
        let z = Integers::new(2, 2);
        assert_eq!(z.div_pi(&BigInt::from(-6)), Some(BigInt::from(-3)));
        assert_eq!(z.div_pi(&BigInt::from(3)), None);
        assert_eq!(z.q_power(&BigInt::from(3)), BigInt::from(9));
    }
}
