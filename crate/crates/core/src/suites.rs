//! Verification suites over a fully specified run configuration. Every suite
//! draws from its own seeded stream, so a suite's report is the same whether
//! it runs alone or as part of `all`.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use serde::Serialize;

use crate::algebra::{parse_poly, BaseSetup, CoeffMap, FqT, Mode, PiRing, Poly, Ring, SymbolicRing, Var};
use crate::error::{Error, Result};
use crate::gallery::{self, preset, GroupSchemePreset, PresetName, SesOutcome};
use crate::jet::{delta_poly_at, frobenius_images, jet_vars, AffinePresentation, ProlongSeq};
use crate::lateral::{self, CompositeMode, Trials};
use crate::report::{Checks, VerificationReport};
use crate::witt::{self, WittVec};
use crate::{ideal, Prng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    WittLaws,
    DeltaAxioms,
    Shift,
    Lift,
    Composite,
    Descent,
    Kernel,
    Group,
    Ses,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::WittLaws,
        Suite::DeltaAxioms,
        Suite::Shift,
        Suite::Lift,
        Suite::Composite,
        Suite::Descent,
        Suite::Kernel,
        Suite::Group,
        Suite::Ses,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::WittLaws => "witt-laws",
            Suite::DeltaAxioms => "delta-axioms",
            Suite::Shift => "shift",
            Suite::Lift => "lift",
            Suite::Composite => "composite",
            Suite::Descent => "descent",
            Suite::Kernel => "kernel",
            Suite::Group => "group",
            Suite::Ses => "ses",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        let s = if s == "prop31" { "composite" } else { s };
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&x| x == self).unwrap() as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SKind {
    Constant,
    Canonical,
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub setup: BaseSetup,
    pub n: usize,
    /// Gallery name or inline `vars a,b; rel <poly>; …`.
    pub scheme: String,
    /// Coordinates of the constant section, as ring-element text.
    pub point: Option<Vec<String>>,
    pub s_kind: SKind,
    pub trials: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(setup: BaseSetup, scheme: &str, n: usize) -> Self {
        RunConfig {
            setup,
            n,
            scheme: scheme.to_string(),
            point: None,
            s_kind: SKind::Constant,
            trials: 1000,
            seed: 0,
        }
    }

    pub fn trials(&self) -> Trials {
        Trials { points: self.trials, k: self.setup.trunc_k }
    }

    pub fn rng(&self, suite: Suite) -> Prng {
        let mut rng = Prng::seed_from_u64(self.seed);
        rng.set_stream(suite.stream());
        rng
    }

    pub fn instance(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("mode".into(), format!("{:?}", self.setup.mode).to_lowercase());
        m.insert("p".into(), self.setup.p.to_string());
        m.insert("q".into(), self.setup.q.to_string());
        m.insert("k".into(), self.setup.trunc_k.to_string());
        m.insert("n".into(), self.n.to_string());
        m.insert("scheme".into(), self.scheme.clone());
        m.insert("s_kind".into(), format!("{:?}", self.s_kind).to_lowercase());
        if let Some(pt) = &self.point {
            m.insert("point".into(), pt.join(","));
        }
        m
    }
}

/// A resolved scheme: its presentation, the gallery preset if any, and the
/// default point for constant sections.
pub struct Scheme<R: PiRing> {
    pub x: AffinePresentation<R>,
    pub preset: Option<GroupSchemePreset<R>>,
    pub default_point: Vec<R::Elem>,
}

pub fn parse_elem<R: Ring>(ring: &R, text: &str) -> Result<R::Elem> {
    let p = parse_poly(ring, text)?;
    if !p.is_constant() {
        return Err(Error::Parse(format!("'{text}' is not a ring element")));
    }
    Ok(p.constant_term())
}

pub fn resolve_scheme<R: PiRing>(ring: &R, text: &str) -> Result<Scheme<R>> {
    let text = text.trim();
    if text.starts_with("vars") {
        let mut vars = Vec::new();
        let mut rels = Vec::new();
        for part in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = part.strip_prefix("vars") {
                for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if !name.chars().all(|c| c.is_ascii_alphabetic()) {
                        return Err(Error::Parse(format!("bad variable name '{name}'")));
                    }
                    vars.push(Var::jet(name, 0));
                }
            } else if let Some(rest) = part.strip_prefix("rel") {
                rels.push(parse_poly(ring, rest)?);
            } else {
                return Err(Error::Parse(format!("expected 'vars' or 'rel', got '{part}'")));
            }
        }
        if vars.is_empty() {
            return Err(Error::Parse("inline scheme declares no variables".into()));
        }
        let zero = vec![ring.zero(); vars.len()];
        let x = AffinePresentation::new(ring, vars, rels)?;
        return Ok(Scheme { x, preset: None, default_point: zero });
    }
    let e = preset(ring, &PresetName::parse(text)?)?;
    Ok(Scheme { x: e.presentation.clone(), default_point: e.point.clone(), preset: Some(e) })
}

pub fn make_sequence<R: PiRing>(ring: &R, scheme: &Scheme<R>, cfg: &RunConfig, n: usize) -> Result<ProlongSeq<R>> {
    match cfg.s_kind {
        SKind::Canonical => ProlongSeq::canonical(&scheme.x, n),
        SKind::Constant => {
            let pt = match &cfg.point {
                Some(p) => p.iter().map(|t| parse_elem(ring, t)).collect::<Result<Vec<_>>>()?,
                None => scheme.default_point.clone(),
            };
            ProlongSeq::constant(&scheme.x, pt, n)
        }
    }
}

/// Ring laws of W_n over R/π^k and the ghost homomorphism, on random triples.
pub fn witt_laws<S: SymbolicRing>(sym: &S, n: usize, trials: Trials, rng: &mut Prng) -> Result<Checks>
where
    S::Point: CoeffMap<S>,
{
    use crate::algebra::PointRing;
    let t = sym.point_ring(trials.k);
    let rand_vec = |rng: &mut Prng| WittVec::new(&t, (0..=n).map(|_| t.random(rng)).collect()).unwrap();
    let (zero, one) = (WittVec::zero(&t, n), WittVec::one(&t, n));
    let mut witness = None;
    for _ in 0..trials.points {
        let (a, b, c) = (rand_vec(rng), rand_vec(rng), rand_vec(rng));
        let add = |u: &WittVec<S::Point>, v: &WittVec<S::Point>| witt::add(sym, u, v);
        let mul = |u: &WittVec<S::Point>, v: &WittVec<S::Point>| witt::mul(sym, u, v);
        let laws = [
            ("additive associativity", add(&add(&a, &b)?, &c)? == add(&a, &add(&b, &c)?)?),
            ("multiplicative associativity", mul(&mul(&a, &b)?, &c)? == mul(&a, &mul(&b, &c)?)?),
            ("additive commutativity", add(&a, &b)? == add(&b, &a)?),
            ("multiplicative commutativity", mul(&a, &b)? == mul(&b, &a)?),
            ("distributivity", mul(&a, &add(&b, &c)?)? == add(&mul(&a, &b)?, &mul(&a, &c)?)?),
            ("zero", add(&a, &zero)? == a),
            ("one", mul(&a, &one)? == a),
            ("negation", add(&a, &witt::neg(sym, &a)?)? == zero),
        ];
        if let Some((name, _)) = laws.iter().find(|(_, ok)| !ok) {
            witness = Some(format!("{name} fails at a = {}, b = {}, c = {}", a.format(), b.format(), c.format()));
            break;
        }
        let (ga, gb) = (witt::ghost(sym, &a)?, witt::ghost(sym, &b)?);
        let gs = witt::ghost(sym, &add(&a, &b)?)?;
        let gm = witt::ghost(sym, &mul(&a, &b)?)?;
        let hom = (0..=n).all(|i| gs[i] == t.add(&ga[i], &gb[i]) && gm[i] == t.mul(&ga[i], &gb[i]));
        if !hom {
            witness = Some(format!("ghost is not additive/multiplicative at a = {}, b = {}", a.format(), b.format()));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record(format!("W_{n} ring laws and ghost homomorphism"), trials.points as u64, witness);
    Ok(checks)
}

/// Both π-derivation axioms as polynomial identities on random pairs in the
/// jet variables of orders < n, and φ^# ≡ q-power mod π on generators.
pub fn delta_axioms<S: SymbolicRing>(x: &AffinePresentation<S>, n: usize, pairs: usize, rng: &mut Prng) -> Result<Checks> {
    let sym = x.ring();
    let n = n.max(1);
    let gens = jet_vars(x.vars(), n - 1);
    let pi = Poly::constant(sym, sym.pi());
    let mut witness = None;
    for _ in 0..pairs {
        let f = ideal::random_poly(sym, &gens, rng);
        let g = ideal::random_poly(sym, &gens, rng);
        let (df, dg) = (delta_poly_at(&f, n)?, delta_poly_at(&g, n)?);
        let add = &(&(&delta_poly_at(&(&f + &g), n)? - &df) - &dg) - &crate::jet::c_pi(&f, &g)?;
        let dfg = delta_poly_at(&(&f * &g), n)?;
        let mul = &(&(&dfg - &(&f.q_pow() * &dg)) - &(&g.q_pow() * &df)) - &(&pi * &(&df * &dg));
        if !add.is_zero() || !mul.is_zero() {
            witness = Some(format!("f = {f}, g = {g}"));
            break;
        }
    }
    let mut checks = Checks::new();
    checks.record("δ axioms", pairs as u64, witness);
    let images = frobenius_images(sym, x.vars(), n)?;
    let w = gens.iter().find_map(|&g| {
        let d = &images[&g] - &Poly::var(sym, g).q_pow();
        (!d.divisible_by_pi()).then(|| format!("{g}: {d}"))
    });
    checks.record("φ^# ≡ q-power mod π on generators", gens.len() as u64, w);
    Ok(checks)
}

enum Outcome {
    Checks(Checks),
    Skipped(String),
}

fn run_generic<S: SymbolicRing>(sym: &S, cfg: &RunConfig, suite: Suite) -> Result<Outcome>
where
    S::Point: CoeffMap<S>,
{
    let mut rng = cfg.rng(suite);
    let rng = &mut rng;
    let scheme = resolve_scheme(sym, &cfg.scheme)?;
    let n = cfg.n;
    let trials = cfg.trials();
    let group = |what: &str| -> std::result::Result<&GroupSchemePreset<S>, Outcome> {
        match &scheme.preset {
            Some(e) if e.law.is_some() => Ok(e),
            _ => Err(Outcome::Skipped(format!("{what}: scheme '{}' has no group law", cfg.scheme))),
        }
    };
    let out = match suite {
        Suite::WittLaws => Outcome::Checks(witt_laws(sym, n, trials, rng)?),
        Suite::DeltaAxioms => Outcome::Checks(delta_axioms(&scheme.x, n, cfg.trials, rng)?),
        Suite::Shift | Suite::Lift | Suite::Descent | Suite::Composite => {
            if n == 0 {
                return Err(Error::Shape("the lateral Frobenius needs n >= 1".into()));
            }
            let s = make_sequence(sym, &scheme, cfg, n)?;
            let m = lateral::lateral_map(&scheme.x, n, &s)?;
            Outcome::Checks(match suite {
                Suite::Shift => lateral::verify_ghost_shift(&m, &s)?,
                Suite::Lift => lateral::verify_lift_of_frobenius(&m, &s)?,
                Suite::Descent => {
                    let mut c = Checks::new();
                    match lateral::certify(&m, rng, trials) {
                        Ok(cert) => c.pass(format!("descent: {}", cert.detail()), m.lower.all_relations().len() as u64),
                        Err(Error::Verification { witness, .. }) => c.fail("descent", 1, witness),
                        Err(e) => return Err(e),
                    }
                    c
                }
                _ => {
                    if n < 2 {
                        return Ok(Outcome::Skipped("composite identity needs n >= 2".into()));
                    }
                    let mode = if m.upper.all_relations().is_empty() { CompositeMode::Symbolic } else { CompositeMode::Pointwise };
                    lateral::verify_composite(&m, &s, mode, rng, trials)?
                }
            })
        }
        Suite::Kernel => match group("kernel") {
            Ok(e) => Outcome::Checks(gallery::verify_kernel_prolongation(e, n.max(1), rng, trials)?),
            Err(o) => o,
        },
        Suite::Group => match group("group") {
            Ok(_) if n < 2 => Outcome::Skipped("group compatibility needs n >= 2".into()),
            Ok(e) => {
                let mut c = gallery::group_compat_check(e, n, rng, trials)?;
                c.extend("", gallery::kernel_law_check(e, n, rng, Trials { points: trials.points.min(300), ..trials })?);
                Outcome::Checks(c)
            }
            Err(o) => o,
        },
        Suite::Ses => match &scheme.preset {
            Some(e) => match gallery::ses_check(e, n, rng, trials)? {
                SesOutcome::Checked(c) => Outcome::Checks(c),
                SesOutcome::Skipped(s) => Outcome::Skipped(s),
            },
            None => Outcome::Skipped(format!("ses: scheme '{}' has no group law", cfg.scheme)),
        },
    };
    Ok(out)
}

/// Runs one suite. Library errors that indicate a failed verification
/// (integrity, image, certificate) become failing reports; usage errors are
/// returned.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<VerificationReport> {
    let out = match cfg.setup.mode {
        Mode::CharZero => run_generic(&cfg.setup.integers()?, cfg, suite),
        Mode::CharP => run_generic::<FqT>(&cfg.setup.fq_t()?, cfg, suite),
    };
    let out = match out {
        Ok(o) => o,
        Err(e @ (Error::Integrity { .. } | Error::NotInImage { .. } | Error::Verification { .. })) => {
            let mut c = Checks::new();
            c.fail(suite.name(), 1, e.to_string());
            Outcome::Checks(c)
        }
        Err(e) => return Err(e),
    };
    let trials = cfg.trials as u64;
    Ok(match out {
        Outcome::Checks(c) => VerificationReport::from_checks(suite.name(), cfg.instance(), c, trials, cfg.seed),
        Outcome::Skipped(note) => VerificationReport::skipped(suite.name(), cfg.instance(), &note, trials, cfg.seed),
    })
}
