use serde::{Deserialize, Serialize};

use super::finite_field::{default_modulus, Fq, FqT, FqTTrunc};
use super::integers::{Integers, Rationals, ZMod};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// R realized by ℤ with π = p.
    CharZero,
    /// R realized by F_q[t] with π = t.
    CharP,
}

/// The arithmetic context: prime p, q = p^e, the uniformizer and the
/// truncation depth K of the point rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseSetup {
    pub mode: Mode,
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// Irreducible modulus for F_q (low degree first), char-p mode only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modulus: Option<Vec<u64>>,
    pub trunc_k: u32,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub const DEFAULT_TRUNC_K: u32 = 6;

impl BaseSetup {
    pub fn new(mode: Mode, p: u64, e: u32, modulus: Option<Vec<u64>>, trunc_k: u32) -> Result<Self> {
        if !is_prime(p) || p > (1 << 31) {
            return Err(Error::Construction(format!("p = {p} is not a supported prime")));
        }
        if e == 0 {
            return Err(Error::Construction("e must be positive".into()));
        }
        if trunc_k == 0 {
            return Err(Error::Construction("truncation depth K must be positive".into()));
        }
        let q = p
            .checked_pow(e)
            .ok_or_else(|| Error::Construction(format!("q = {p}^{e} overflows")))?;
        let modulus = match mode {
            Mode::CharZero => {
                if e != 1 {
                    return Err(Error::Construction(
                        "char-zero mode realizes R = ZZ and needs e = 1".into(),
                    ));
                }
                None
            }
            Mode::CharP => {
                let m = modulus.or_else(|| default_modulus(p, e)).ok_or_else(|| {
                    Error::Construction(format!("F_{q} needs an explicit irreducible modulus"))
                })?;
                // Validates irreducibility.
                Fq::new(p, e, Some(m.clone()))?;
                Some(m)
            }
        };
        Ok(BaseSetup { mode, p, e, q, modulus, trunc_k })
    }

    pub fn char_zero(p: u64) -> Result<Self> {
        Self::new(Mode::CharZero, p, 1, None, DEFAULT_TRUNC_K)
    }

    pub fn char_p(p: u64, e: u32) -> Result<Self> {
        Self::new(Mode::CharP, p, e, None, DEFAULT_TRUNC_K)
    }

    pub fn with_trunc(mut self, k: u32) -> Self {
        self.trunc_k = k;
        self
    }

    pub fn integers(&self) -> Result<Integers> {
        match self.mode {
            Mode::CharZero => Ok(Integers::new(self.p, self.q)),
            Mode::CharP => Err(Error::Construction("integers require char-zero mode".into())),
        }
    }

    pub fn fq(&self) -> Result<Fq> {
        Fq::new(self.p, self.e, self.modulus.clone().or_else(|| default_modulus(self.p, self.e)))
    }

    pub fn fq_t(&self) -> Result<FqT> {
        match self.mode {
            Mode::CharP => Ok(FqT::new(self.fq()?)),
            Mode::CharZero => Err(Error::Construction("F_q[t] requires char-p mode".into())),
        }
    }

    /// Compact identifier used in cache file names.
    pub fn key(&self) -> String {
        let mode = match self.mode {
            Mode::CharZero => "zero",
            Mode::CharP => "charp",
        };
        match &self.modulus {
            Some(m) if self.e > 1 => {
                let ms: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                format!("{mode}-p{}-e{}-m{}", self.p, self.e, ms.join("_"))
            }
            _ => format!("{mode}-p{}-e{}", self.p, self.e),
        }
    }
}

/// Descriptors accepted by [`coeff_ring_make`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffDescriptor {
    Integers,
    Rationals,
    IntegersMod(u64),
    /// F_q = F_p[u]/(m(u)); `None` uses the built-in table.
    Fq(Option<Vec<u64>>),
    FqT,
    FqTTrunc(u32),
}

/// A coefficient ring chosen at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyRing {
    Integers(Integers),
    Rationals(Rationals),
    IntegersMod(ZMod),
    Fq(Fq),
    FqT(FqT),
    FqTTrunc(FqTTrunc),
}

pub fn coeff_ring_make(setup: &BaseSetup, descriptor: CoeffDescriptor) -> Result<AnyRing> {
    let (p, e, q) = (setup.p, setup.e, setup.q);
    Ok(match descriptor {
        CoeffDescriptor::Integers => AnyRing::Integers(Integers::new(p, q)),
        CoeffDescriptor::Rationals => AnyRing::Rationals(Rationals::new(q)),
        CoeffDescriptor::IntegersMod(m) => AnyRing::IntegersMod(ZMod::with_modulus(p, m, q)?),
        CoeffDescriptor::Fq(m) => AnyRing::Fq(Fq::new(p, e, m.or_else(|| setup.modulus.clone()))?),
        CoeffDescriptor::FqT => AnyRing::FqT(FqT::new(setup.fq()?)),
        CoeffDescriptor::FqTTrunc(k) => AnyRing::FqTTrunc(FqTTrunc::new(setup.fq()?, k as usize)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::Ring;
    use num_bigint::BigInt;

    #[test]
    fn integers_with_square_map() {
        let s = BaseSetup::char_zero(2).unwrap();
        let AnyRing::Integers(z) = coeff_ring_make(&s, CoeffDescriptor::Integers).unwrap() else {
            panic!()
        };
        assert_eq!(z.q_power(&BigInt::from(5)), BigInt::from(25));
    }

    #[test]
    fn integers_mod_64() {
        let s = BaseSetup::char_zero(2).unwrap();
        let AnyRing::IntegersMod(r) = coeff_ring_make(&s, CoeffDescriptor::IntegersMod(64)).unwrap()
        else {
            panic!()
        };
        assert_eq!(r.modulus(), 64);
        assert!(coeff_ring_make(&s, CoeffDescriptor::IntegersMod(96)).is_err());
    }

    #[test]
    fn f4_moduli() {
        let s = BaseSetup::char_p(2, 2).unwrap();
        assert!(coeff_ring_make(&s, CoeffDescriptor::Fq(Some(vec![1, 1, 1]))).is_ok());
        assert!(coeff_ring_make(&s, CoeffDescriptor::Fq(Some(vec![1, 0, 1]))).is_err());
    }

    #[test]
    fn setup_validation() {
        assert!(BaseSetup::char_zero(4).is_err());
        assert!(BaseSetup::new(Mode::CharZero, 2, 2, None, 6).is_err());
        assert!(BaseSetup::new(Mode::CharP, 5, 2, None, 6).is_err());
        assert!(BaseSetup::new(Mode::CharP, 5, 2, Some(vec![2, 0, 1]), 6).is_ok());
        assert_eq!(BaseSetup::char_p(3, 2).unwrap().q, 9);
    }
}
