use std::fmt;

use num_bigint::BigInt;

use crate::Prng;

/// A commutative ring handle. Elements are plain values; every operation goes
/// through the handle so that runtime parameters (moduli, truncation depth)
/// live in one place.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// The q-power map x ↦ x^q of the base setup.
    fn q_power(&self, a: &Self::Elem) -> Self::Elem;

    /// Exact division `a / b`, `None` when `b` does not divide `a`.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    fn format_elem(&self, a: &Self::Elem) -> String;

    /// Human-readable ring name, also used to detect mixed-ring operations.
    fn descriptor(&self) -> String;

    /// Named constants the polynomial parser should recognize (`t`, `u`).
    fn atom(&self, _name: &str) -> Option<Self::Elem> {
        None
    }

    /// Whether `format_elem` output must be parenthesized as a factor.
    fn needs_parens(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn is_negative(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_int(&BigInt::from(n))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// A π-torsion-free ring with a distinguished uniformizer: the symbolic
/// coefficient rings ℤ (π = p) and F_q[t] (π = t).
pub trait PiRing: Ring {
    fn pi(&self) -> Self::Elem;
    fn q(&self) -> u64;
    fn p(&self) -> u64;
    /// `Some(y)` with `π·y = a`, or `None` when π does not divide `a`.
    fn div_pi(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn char_zero(&self) -> bool;

    fn divisible_by_pi(&self, a: &Self::Elem) -> bool {
        self.div_pi(a).is_some()
    }
}

/// Finite truncations of R used for randomized point checks
/// (ℤ/p^K and F_q[t]/(t^K)).
pub trait PointRing: Ring {
    fn pi(&self) -> Self::Elem;
    fn q(&self) -> u64;
    fn random(&self, rng: &mut Prng) -> Self::Elem;
    /// Representatives of the residue field R/π.
    fn residues(&self) -> Vec<Self::Elem>;
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn divisible_by_pi(&self, a: &Self::Elem) -> bool;
}

/// Symbolic coefficient ring together with its family of point rings.
pub trait SymbolicRing: PiRing {
    type Point: PointRing;

    fn point_ring(&self, k: u32) -> Self::Point;
    fn reduce(&self, a: &Self::Elem, target: &Self::Point) -> <Self::Point as Ring>::Elem;
    /// A small random coefficient, used to build random test polynomials.
    fn random_small(&self, rng: &mut Prng) -> Self::Elem;
}

/// Coefficient homomorphism from a symbolic ring `S` into `Self`
/// (identity, ℤ → ℤ/p^K, F_q[t] → F_q[t]/(t^K)).
pub trait CoeffMap<S: Ring>: Ring {
    fn map_coeff(&self, src: &S, c: &S::Elem) -> Self::Elem;
}

impl CoeffMap<super::Integers> for super::Integers {
    fn map_coeff(&self, _: &super::Integers, c: &BigInt) -> BigInt {
        c.clone()
    }
}

impl CoeffMap<super::Integers> for super::ZMod {
    fn map_coeff(&self, _: &super::Integers, c: &BigInt) -> u64 {
        self.reduce_big(c)
    }
}

impl CoeffMap<super::FqT> for super::FqT {
    fn map_coeff(&self, _: &super::FqT, c: &Self::Elem) -> Self::Elem {
        c.clone()
    }
}

impl CoeffMap<super::FqT> for super::FqTTrunc {
    fn map_coeff(&self, src: &super::FqT, c: &Self::Elem) -> Self::Elem {
        src.reduce(c, self)
    }
}
