//! Structured polynomial variables.
//!
//! A variable is a base symbol plus an order: the jet order for jet and
//! S-side generators, the coordinate index for Witt variables. Packed into a
//! `u64` so monomials stay cheap to hash and compare.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use once_cell::sync::Lazy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// `x_0, x_1, ...`: coordinates of Witt structure polynomials.
    Witt = 0,
    /// `x, x', x'', x^(3)`: jet-space generators.
    Jet = 1,
    /// `s.x, s.x'`: generators of the S-side of a fiber product.
    Side = 2,
}

struct Symbols {
    names: Vec<&'static str>,
    index: HashMap<&'static str, u32>,
}

static SYMBOLS: Lazy<RwLock<Symbols>> =
    Lazy::new(|| RwLock::new(Symbols { names: Vec::new(), index: HashMap::new() }));

fn intern(name: &str) -> u32 {
    if let Some(i) = SYMBOLS.read().unwrap().index.get(name) {
        return *i;
    }
    let mut s = SYMBOLS.write().unwrap();
    if let Some(i) = s.index.get(name) {
        return *i;
    }
    let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
    let id = s.names.len() as u32;
    s.names.push(leaked);
    s.index.insert(leaked, id);
    id
}

fn symbol_name(id: u32) -> &'static str {
    SYMBOLS.read().unwrap().names[id as usize]
}

/// The derived `Ord` follows interning order and is only meant for map keys;
/// use [`Var::structural_cmp`] whenever an order must be reproducible.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u64);

impl Var {
    pub fn new(kind: VarKind, name: &str, order: u32) -> Var {
        let sym = intern(name) as u64;
        assert!(sym < (1 << 24), "symbol table overflow");
        Var(((kind as u64) << 56) | (sym << 32) | order as u64)
    }

    pub fn jet(name: &str, order: u32) -> Var {
        Var::new(VarKind::Jet, name, order)
    }

    pub fn side(name: &str, order: u32) -> Var {
        Var::new(VarKind::Side, name, order)
    }

    pub fn witt(name: &str, index: u32) -> Var {
        Var::new(VarKind::Witt, name, index)
    }

    pub fn kind(self) -> VarKind {
        match self.0 >> 56 {
            0 => VarKind::Witt,
            1 => VarKind::Jet,
            _ => VarKind::Side,
        }
    }

    pub fn name(self) -> &'static str {
        symbol_name(((self.0 >> 32) & 0xff_ffff) as u32)
    }

    pub fn order(self) -> u32 {
        self.0 as u32
    }

    pub fn with_order(self, order: u32) -> Var {
        Var((self.0 & !0xffff_ffff) | order as u64)
    }

    pub fn with_kind(self, kind: VarKind) -> Var {
        Var((self.0 & !(0xff << 56)) | ((kind as u64) << 56))
    }

    pub fn with_name(self, name: &str) -> Var {
        Var::new(self.kind(), name, self.order())
    }

    /// Kind, then base name, then order.
    pub fn structural_cmp(&self, other: &Var) -> Ordering {
        self.kind()
            .cmp(&other.kind())
            .then_with(|| self.name().cmp(other.name()))
            .then_with(|| self.order().cmp(&other.order()))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        let order = self.order();
        match self.kind() {
            VarKind::Witt => write!(f, "{name}_{order}"),
            kind => {
                if kind == VarKind::Side {
                    write!(f, "s.")?;
                }
                match order {
                    0 => write!(f, "{name}"),
                    1 => write!(f, "{name}'"),
                    2 => write!(f, "{name}''"),
                    k => write!(f, "{name}^({k})"),
                }
            }
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sorts variables into the reproducible structural order.
pub fn sort_structural(vars: &mut [Var]) {
    vars.sort_by(|a, b| a.structural_cmp(b));
}
