//! Exact coefficient rings and sparse multivariate polynomials.

pub mod finite_field;
pub mod integers;
pub mod parse;
pub mod poly;
pub mod ring;
pub mod setup;
pub mod var;

pub use finite_field::{Fq, FqElem, FqT, FqTTrunc};
pub use integers::{Integers, Rationals, ZMod};
pub use parse::parse_poly;
pub use poly::{poly_arith, Divisor, Monomial, Poly, PolyOp};
pub use ring::{CoeffMap, PiRing, PointRing, Ring, SymbolicRing};
pub use setup::{coeff_ring_make, AnyRing, BaseSetup, CoeffDescriptor, Mode};
pub use var::{Var, VarKind};
