//! Truncated π-typical Witt vectors.
//!
//! Ghost components are w_i = Σ_{j≤i} π^j x_j^{q^{i-j}}. Structure
//! polynomials are solved from componentwise ghost identities by
//! back-substitution with exact division by π, so every table build doubles
//! as an integrality check at that (setup, n).

pub mod cache;

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::{Lazy, OnceCell};
use serde::{Deserialize, Serialize};

use crate::algebra::{CoeffMap, PiRing, Poly, Ring, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WittOp {
    Add,
    Mul,
    Neg,
    Frobenius,
}

impl WittOp {
    pub fn name(self) -> &'static str {
        match self {
            WittOp::Add => "add",
            WittOp::Mul => "mul",
            WittOp::Neg => "neg",
            WittOp::Frobenius => "frobenius",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            WittOp::Add | WittOp::Mul => 2,
            WittOp::Neg | WittOp::Frobenius => 1,
        }
    }
}

/// Desk-scale ceiling on symbolic tables.
#[derive(Clone, Copy, Debug)]
pub struct TableLimits {
    pub max_n: usize,
    pub max_p: u64,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits { max_n: 4, max_p: 5 }
    }
}

pub fn x_var(i: usize) -> Var {
    Var::witt("x", i as u32)
}

pub fn y_var(i: usize) -> Var {
    Var::witt("y", i as u32)
}

/// Ghost components of the Witt vector with coordinates `coords`.
pub fn ghost_of<R: PiRing>(ring: &R, coords: &[Poly<R>]) -> Vec<Poly<R>> {
    let q = ring.q();
    let pi = Poly::constant(ring, ring.pi());
    // powers[j][k] = coords[j]^(q^k)
    let n = coords.len();
    let mut powers: Vec<Vec<Poly<R>>> = coords.iter().map(|c| vec![c.clone()]).collect();
    for (j, row) in powers.iter_mut().enumerate() {
        for _ in 1..(n - j) {
            let next = row.last().unwrap().pow(q);
            row.push(next);
        }
    }
    (0..n)
        .map(|i| {
            let mut acc = Poly::zero(ring);
            let mut pij = Poly::one(ring);
            for j in 0..=i {
                acc = &acc + &(&pij * &powers[j][i - j]);
                pij = &pij * &pi;
            }
            acc
        })
        .collect()
}

/// `[w_0, …, w_n]` in the variables `x_0 … x_n`.
pub fn ghost_polys<R: PiRing>(ring: &R, n: usize) -> Vec<Poly<R>> {
    let coords: Vec<Poly<R>> = (0..=n).map(|i| Poly::var(ring, x_var(i))).collect();
    ghost_of(ring, &coords)
}

/// Solves Witt coordinates from ghost components by back-substitution.
/// A non-exact division is reported as an integrity error naming `context`.
pub fn unghost_polys<R: PiRing>(ring: &R, ghosts: &[Poly<R>], context: &str) -> Result<Vec<Poly<R>>> {
    let q = ring.q();
    let pi = Poly::constant(ring, ring.pi());
    let mut coords: Vec<Poly<R>> = Vec::with_capacity(ghosts.len());
    // powers[j] = current coords[j]^(q^k) for the step being solved
    let mut powers: Vec<Poly<R>> = Vec::new();
    for (i, g) in ghosts.iter().enumerate() {
        for pw in powers.iter_mut() {
            *pw = pw.pow(q);
        }
        let mut rest = g.clone();
        let mut pij = Poly::one(ring);
        for pw in &powers {
            rest = &rest - &(&pij * pw);
            pij = &pij * &pi;
        }
        let xi = rest.div_pi_pow(i as u32).map_err(|e| match e {
            Error::Integrity { term, .. } => Error::Integrity {
                context: format!("{context}, coordinate {i}"),
                term,
            },
            other => other,
        })?;
        powers.push(xi.clone());
        coords.push(xi);
    }
    Ok(coords)
}

/// Witt structure polynomials for one operation at one truncation order.
#[derive(Clone, Debug)]
pub struct WittPolyTable<R: PiRing> {
    pub ring: R,
    pub n: usize,
    pub op: WittOp,
    pub polys: Vec<Poly<R>>,
}

impl<R: PiRing> WittPolyTable<R> {
    pub fn build(ring: &R, n: usize, op: WittOp) -> Result<Self> {
        Self::build_with_limits(ring, n, op, TableLimits::default())
    }

    pub fn build_with_limits(ring: &R, n: usize, op: WittOp, limits: TableLimits) -> Result<Self> {
        if n > limits.max_n || ring.p() > limits.max_p {
            return Err(Error::Construction(format!(
                "symbolic table (p={}, n={n}) exceeds the configured ceiling (p<={}, n<={})",
                ring.p(),
                limits.max_p,
                limits.max_n
            )));
        }
        if op == WittOp::Frobenius && n == 0 {
            return Err(Error::Construction("Frobenius table needs n >= 1".into()));
        }
        let targets = Self::target_ghosts(ring, n, op);
        let polys = unghost_polys(ring, &targets, &format!("witt {} table n={n}", op.name()))?;
        let table = WittPolyTable { ring: ring.clone(), n, op, polys };
        table.verify()?;
        Ok(table)
    }

    /// The ghost components the table must reproduce.
    fn target_ghosts(ring: &R, n: usize, op: WittOp) -> Vec<Poly<R>> {
        let wx = ghost_polys(ring, n);
        let wy = || {
            let ys: Vec<Poly<R>> = (0..=n).map(|i| Poly::var(ring, y_var(i))).collect();
            ghost_of(ring, &ys)
        };
        match op {
            WittOp::Add => wx.iter().zip(wy()).map(|(a, b)| a + &b).collect(),
            WittOp::Mul => wx.iter().zip(wy()).map(|(a, b)| a * &b).collect(),
            WittOp::Neg => wx.iter().map(|a| a.neg()).collect(),
            WittOp::Frobenius => wx[1..].to_vec(),
        }
    }

    /// Re-ghosts the table and compares against the defining identities; for
    /// Frobenius also checks F_i ≡ x_i^q mod π.
    pub fn verify(&self) -> Result<()> {
        let expected = Self::target_ghosts(&self.ring, self.n, self.op);
        let got = ghost_of(&self.ring, &self.polys);
        for (i, (g, e)) in got.iter().zip(&expected).enumerate() {
            if g != e {
                return Err(Error::Integrity {
                    context: format!("witt {} table ghost identity {i}", self.op.name()),
                    term: (g - e).to_string(),
                });
            }
        }
        if self.op == WittOp::Frobenius {
            for (i, f) in self.polys.iter().enumerate() {
                let diff = f - &Poly::var(&self.ring, x_var(i)).q_pow();
                if !diff.divisible_by_pi() {
                    return Err(Error::Integrity {
                        context: format!("Frobenius congruence F_{i}"),
                        term: diff.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

type Slot = Arc<OnceCell<Arc<dyn Any + Send + Sync>>>;

static MEMO: Lazy<Mutex<HashMap<String, Slot>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Memoized table lookup; concurrent callers for the same key build once.
pub fn table<R: PiRing>(ring: &R, n: usize, op: WittOp) -> Result<Arc<WittPolyTable<R>>> {
    let key = format!("{}|{n}|{}|{}", ring.descriptor(), ring.q(), op.name());
    let slot = MEMO.lock().unwrap().entry(key).or_default().clone();
    let value = slot.get_or_try_init(|| {
        WittPolyTable::build(ring, n, op).map(|t| Arc::new(t) as Arc<dyn Any + Send + Sync>)
    })?;
    Ok(value.clone().downcast::<WittPolyTable<R>>().expect("memo key collision"))
}

/// Installs an externally loaded (and verified) table in the memo.
pub fn install_table<R: PiRing>(table: WittPolyTable<R>) {
    let key = format!("{}|{}|{}|{}", table.ring.descriptor(), table.n, table.ring.q(), table.op.name());
    let slot = MEMO.lock().unwrap().entry(key).or_default().clone();
    let _ = slot.set(Arc::new(table));
}

/// `[F_0, …, F_{n-1}]` in `x_0 … x_n`.
pub fn frobenius_polys<R: PiRing>(ring: &R, n: usize) -> Result<Vec<Poly<R>>> {
    Ok(table(ring, n, WittOp::Frobenius)?.polys.clone())
}

/// A length-(n+1) Witt vector over `ring`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVec<T: Ring> {
    pub ring: T,
    pub coords: Vec<T::Elem>,
}

impl<T: Ring> WittVec<T> {
    pub fn new(ring: &T, coords: Vec<T::Elem>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Shape("Witt vectors have length >= 1".into()));
        }
        Ok(WittVec { ring: ring.clone(), coords })
    }

    pub fn zero(ring: &T, n: usize) -> Self {
        WittVec { ring: ring.clone(), coords: vec![ring.zero(); n + 1] }
    }

    pub fn one(ring: &T, n: usize) -> Self {
        let mut v = Self::zero(ring, n);
        v.coords[0] = ring.one();
        v
    }

    /// Truncation order n (length n + 1).
    pub fn order(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn format(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| self.ring.format_elem(c)).collect();
        format!("({})", parts.join(", "))
    }

    fn point(&self, name: &str) -> impl Iterator<Item = (Var, T::Elem)> + '_ {
        let name = name.to_string();
        self.coords.iter().enumerate().map(move |(i, c)| (Var::witt(&name, i as u32), c.clone()))
    }
}

/// Evaluates table polynomials at Witt vectors over a ring receiving the
/// symbolic coefficients.
fn eval_table<S: PiRing, T: CoeffMap<S>>(
    sym: &S,
    polys: &[Poly<S>],
    u: &WittVec<T>,
    v: Option<&WittVec<T>>,
) -> Result<Vec<T::Elem>> {
    let mut point: HashMap<Var, T::Elem> = u.point("x").collect();
    if let Some(v) = v {
        point.extend(v.point("y"));
    }
    polys.iter().map(|p| p.eval(&u.ring, |c| u.ring.map_coeff(sym, c), &point)).collect()
}

/// Coordinatewise evaluation of the op's structure table.
pub fn witt_arith<S: PiRing, T: CoeffMap<S>>(
    sym: &S,
    op: WittOp,
    u: &WittVec<T>,
    v: Option<&WittVec<T>>,
) -> Result<WittVec<T>> {
    if op.arity() == 2 {
        let v = v.ok_or_else(|| Error::Shape(format!("{} needs two operands", op.name())))?;
        if v.coords.len() != u.coords.len() {
            return Err(Error::Shape(format!(
                "length mismatch: {} vs {}",
                u.coords.len(),
                v.coords.len()
            )));
        }
        if v.ring != u.ring {
            return Err(Error::RingMismatch(u.ring.descriptor(), v.ring.descriptor()));
        }
    }
    let n = u.order();
    if op == WittOp::Frobenius && n == 0 {
        return Err(Error::Shape("Frobenius needs length >= 2".into()));
    }
    let t = table(sym, n, op)?;
    let coords = eval_table(sym, &t.polys, u, v)?;
    WittVec::new(&u.ring, coords)
}

pub fn add<S: PiRing, T: CoeffMap<S>>(sym: &S, u: &WittVec<T>, v: &WittVec<T>) -> Result<WittVec<T>> {
    witt_arith(sym, WittOp::Add, u, Some(v))
}

pub fn mul<S: PiRing, T: CoeffMap<S>>(sym: &S, u: &WittVec<T>, v: &WittVec<T>) -> Result<WittVec<T>> {
    witt_arith(sym, WittOp::Mul, u, Some(v))
}

pub fn neg<S: PiRing, T: CoeffMap<S>>(sym: &S, u: &WittVec<T>) -> Result<WittVec<T>> {
    witt_arith(sym, WittOp::Neg, u, None)
}

/// Witt Frobenius: length n+1 to length n.
pub fn frobenius<S: PiRing, T: CoeffMap<S>>(sym: &S, u: &WittVec<T>) -> Result<WittVec<T>> {
    witt_arith(sym, WittOp::Frobenius, u, None)
}

/// Ghost components of a concrete Witt vector.
pub fn ghost<S: PiRing, T: CoeffMap<S>>(sym: &S, u: &WittVec<T>) -> Result<Vec<T::Elem>> {
    eval_table(sym, &ghost_polys(sym, u.order()), u, None)
}

/// Inverse of the ghost map over a π-torsion-free ring.
pub fn unghost<R: PiRing>(ring: &R, w: &[R::Elem]) -> Result<WittVec<R>> {
    let q = ring.q();
    let mut coords: Vec<R::Elem> = Vec::with_capacity(w.len());
    for (i, wi) in w.iter().enumerate() {
        let mut rest = wi.clone();
        let mut pij = ring.one();
        for (j, xj) in coords.iter().enumerate() {
            let pw = ring.pow(xj, q.pow((i - j) as u32));
            rest = ring.sub(&rest, &ring.mul(&pij, &pw));
            pij = ring.mul(&pij, &ring.pi());
        }
        for _ in 0..i {
            rest = ring.div_pi(&rest).ok_or(Error::NotInImage { index: i })?;
        }
        coords.push(rest);
    }
    WittVec::new(ring, coords)
}

/// `(a, 0, …, 0)`; its ghost vector is `(a, a^q, a^{q^2}, …)`.
pub fn teichmuller<T: Ring>(ring: &T, a: T::Elem, n: usize) -> WittVec<T> {
    let mut v = WittVec::zero(ring, n);
    v.coords[0] = a;
    v
}

/// `(0, x_0, …, x_n)`: one longer than the input.
pub fn verschiebung<T: Ring>(u: &WittVec<T>) -> WittVec<T> {
    let mut coords = vec![u.ring.zero()];
    coords.extend(u.coords.iter().cloned());
    WittVec { ring: u.ring.clone(), coords }
}

/// The universal map R → W_n(R): the Witt vector with ghost components
/// (r, φ_R(r), …, φ_R^n(r)). The designated Frobenius lift φ_R is the identity
/// on both ℤ and F_q[t].
pub fn exp_delta<R: PiRing>(ring: &R, r: &R::Elem, n: usize) -> Result<WittVec<R>> {
    let ghosts = vec![r.clone(); n + 1];
    unghost(ring, &ghosts).map_err(|e| match e {
        Error::NotInImage { index } => Error::Integrity {
            context: format!("exp_delta coordinate {index}"),
            term: ring.format_elem(r),
        },
        other => other,
    })
}
