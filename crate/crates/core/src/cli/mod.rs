//! Command-line front end.
//!
//! Exit codes: 0 when everything passes, 1 on integrity or verification
//! failures, 2 on usage and parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{BaseSetup, CoeffMap, FqT, Mode, PiRing, Ring, SymbolicRing, Var};
use crate::error::{Error, Result};
use crate::lateral;
use crate::report::Status;
use crate::suites::{self, make_sequence, parse_elem, resolve_scheme, RunConfig, SKind, Suite};
use crate::witt::{self, cache, WittOp, WittVec};

#[derive(Parser, Debug)]
#[command(name = "wittjet", version, about = "Witt vectors, arithmetic jets and the lateral Frobenius")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Witt vector tables and arithmetic.
    Witt {
        #[command(subcommand)]
        op: WittCmd,
    },
    /// Print the jet ring presentation J^nX.
    Jet(Common),
    /// Print the lateral Frobenius, its closed-formula comparison and descent certificate.
    Lateral(Common),
    /// Run verification suites and emit reports.
    Verify {
        /// witt-laws, delta-axioms, shift, lift, composite (alias prop31), descent, kernel, group, ses or all
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
pub enum WittCmd {
    /// Structure polynomials for an operation.
    Polys {
        #[arg(long)]
        op: String,
        #[command(flatten)]
        common: Common,
    },
    /// Ghost components of a vector.
    Ghost {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// Witt vector with the given ghost components.
    Unghost {
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[command(flatten)]
        common: Common,
    },
    /// add, mul or neg of vectors.
    Arith {
        #[arg(long)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Witt Frobenius (drops one coordinate).
    Frobenius {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        common: Common,
    },
    /// Teichmüller representative (a, 0, …, 0).
    Teichmuller {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        common: Common,
    },
    /// The vector with ghost components (r, r, …, r).
    Expdelta {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Flags shared by all commands. Every flag can also come from `--config`;
/// flags win.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// char-zero (R = Z, π = p) or char-p (R = F_q[t], π = t)
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Degree of F_q over F_p (char-p mode).
    #[arg(long)]
    pub e: Option<u32>,
    /// Monic modulus for F_q, coefficients low degree first, comma separated.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Truncation exponent for point rings R/π^k.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Gallery name (ga, gm, weierstrass, weierstrass(a,b)) or "vars a,b; rel <poly>".
    #[arg(long)]
    pub scheme: Option<String>,
    /// Coordinates of the constant section, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// constant or canonical
    #[arg(long)]
    pub s_kind: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for persisted Witt tables (also WITTJET_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// key=value lines or a JSON object with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 13] = [
    "mode", "p", "e", "modulus", "k", "n", "scheme", "point", "s-kind", "trials", "seed", "cache-dir", "json",
];

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("bad JSON config: {e}")))?;
        let obj = v.as_object().ok_or_else(|| usage("JSON config must be an object"))?;
        for (k, v) in obj {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.insert(k.replace('_', "-"), s);
        }
    } else {
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line '{line}' is not key=value")))?;
            out.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
    }
    if let Some(k) = out.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(usage(format!("unknown config key '{k}'")));
    }
    Ok(out)
}

/// Flags merged over the config file.
struct Settings {
    flags: Common,
    file: BTreeMap<String, String>,
}

impl Settings {
    fn new(flags: &Common) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        Ok(Settings { flags: flags.clone(), file })
    }

    fn get<T: std::str::FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| usage(format!("bad value '{s}' for {key}"))),
        }
    }

    fn string(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }

    fn json(&self) -> bool {
        self.flags.json || self.file.get("json").is_some_and(|v| v == "true")
    }

    fn cache_dir(&self) -> Option<PathBuf> {
        self.flags
            .cache_dir
            .clone()
            .or_else(|| self.file.get("cache-dir").map(PathBuf::from))
            .or_else(|| std::env::var_os(cache::CACHE_DIR_ENV).map(PathBuf::from))
    }

    fn setup(&self) -> Result<BaseSetup> {
        let mode = match self.string("mode", &self.flags.mode).as_deref() {
            None | Some("char-zero") => Mode::CharZero,
            Some("char-p") => Mode::CharP,
            Some(other) => return Err(usage(format!("unknown mode '{other}' (char-zero or char-p)"))),
        };
        let p = self.get("p", self.flags.p)?.unwrap_or(2);
        let e = self.get("e", self.flags.e)?.unwrap_or(1);
        let modulus = match self.string("modulus", &self.flags.modulus) {
            None => None,
            Some(s) => Some(
                s.split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| usage(format!("bad modulus coefficient '{c}'"))))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let k = self.get("k", self.flags.k)?.unwrap_or(crate::algebra::setup::DEFAULT_TRUNC_K);
        BaseSetup::new(mode, p, e, modulus, k)
    }

    fn run_config(&self) -> Result<RunConfig> {
        let setup = self.setup()?;
        let n = self.get("n", self.flags.n)?.unwrap_or(2);
        let scheme = self.string("scheme", &self.flags.scheme).unwrap_or_else(|| "ga".into());
        let mut cfg = RunConfig::new(setup, &scheme, n);
        cfg.point = self
            .string("point", &self.flags.point)
            .map(|s| s.split(',').map(|c| c.trim().to_string()).collect());
        cfg.s_kind = match self.string("s-kind", &self.flags.s_kind).as_deref() {
            None | Some("constant") => SKind::Constant,
            Some("canonical") => SKind::Canonical,
            Some(other) => return Err(usage(format!("unknown s-kind '{other}' (constant or canonical)"))),
        };
        if cfg.s_kind == SKind::Canonical && cfg.point.is_some() {
            return Err(usage("--point applies to constant sections only"));
        }
        cfg.trials = self.get("trials", self.flags.trials)?.unwrap_or(1000);
        cfg.seed = self.get("seed", self.flags.seed)?.unwrap_or(0);
        Ok(cfg)
    }
}

/// Loads (or builds and stores) the tables a run of order `n` will use.
fn warm_cache<R: PiRing>(sym: &R, settings: &Settings, setup: &BaseSetup, n: usize) -> Result<()> {
    let Some(dir) = settings.cache_dir() else { return Ok(()) };
    let limits = witt::TableLimits::default();
    if setup.p > limits.max_p {
        return Ok(());
    }
    for m in 1..=n.min(limits.max_n) {
        for op in [WittOp::Add, WittOp::Mul, WittOp::Neg, WittOp::Frobenius] {
            cache::load_or_build(&dir, sym, &setup.key(), m, op)?;
        }
    }
    Ok(())
}

/// Human-readable jet primes.
pub fn pretty(s: &str) -> String {
    s.replace("''", "″").replace('\'', "′")
}

pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Integrity { .. } | Error::NotInImage { .. } | Error::Verification { .. } | Error::Io(_) => 1,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Integrity { .. } => "IntegrityError",
        Error::NotInImage { .. } => "NotInImage",
        Error::Verification { .. } => "VerificationFailure",
        Error::Io(_) => "IoError",
        Error::Parse(_) => "ParseError",
        _ => "UsageError",
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { stdout: text, stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let json = match &cli.command {
        Command::Witt { op } => witt_common(op).json,
        Command::Jet(c) | Command::Lateral(c) | Command::Verify { common: c, .. } => c.json,
    };
    match dispatch(&cli) {
        Ok((stdout, code)) => Output { stdout, stderr: String::new(), code },
        Err(e) => {
            let code = exit_code(&e);
            if json {
                let v = json!({"error": error_kind(&e), "message": e.to_string()});
                Output { stdout: format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), stderr: String::new(), code }
            } else {
                Output { stdout: String::new(), stderr: format!("error: {e}\n"), code }
            }
        }
    }
}

fn witt_common(op: &WittCmd) -> &Common {
    match op {
        WittCmd::Polys { common, .. }
        | WittCmd::Ghost { common, .. }
        | WittCmd::Unghost { common, .. }
        | WittCmd::Arith { common, .. }
        | WittCmd::Frobenius { common, .. }
        | WittCmd::Teichmuller { common, .. }
        | WittCmd::Expdelta { common, .. } => common,
    }
}

fn dispatch(cli: &Cli) -> Result<(String, i32)> {
    let common = match &cli.command {
        Command::Witt { op } => witt_common(op),
        Command::Jet(c) | Command::Lateral(c) | Command::Verify { common: c, .. } => c,
    };
    let settings = Settings::new(common)?;
    let cfg = settings.run_config()?;
    match cfg.setup.mode {
        Mode::CharZero => dispatch_ring(&cfg.setup.integers()?, cli, &settings, &cfg),
        Mode::CharP => dispatch_ring::<FqT>(&cfg.setup.fq_t()?, cli, &settings, &cfg),
    }
}

fn dispatch_ring<S>(sym: &S, cli: &Cli, settings: &Settings, cfg: &RunConfig) -> Result<(String, i32)>
where
    S: SymbolicRing + CoeffMap<S>,
    S::Point: CoeffMap<S>,
{
    warm_cache(sym, settings, &cfg.setup, cfg.n)?;
    let json = settings.json();
    match &cli.command {
        Command::Witt { op } => cmd_witt(sym, op, settings, cfg, json),
        Command::Jet(_) => cmd_jet(sym, cfg, json),
        Command::Lateral(_) => cmd_lateral(sym, cfg, json),
        Command::Verify { suite, .. } => cmd_verify(cfg, suite, json),
    }
}

fn to_json(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).unwrap())
}

fn parse_vec<S: Ring>(ring: &S, text: &str) -> Result<WittVec<S>> {
    let coords = text.split(',').map(|c| parse_elem(ring, c.trim())).collect::<Result<Vec<_>>>()?;
    WittVec::new(ring, coords)
}

fn op_letter(op: WittOp) -> &'static str {
    match op {
        WittOp::Add => "S",
        WittOp::Mul => "P",
        WittOp::Neg => "N",
        WittOp::Frobenius => "F",
    }
}

fn cmd_witt<S>(sym: &S, op: &WittCmd, settings: &Settings, cfg: &RunConfig, json: bool) -> Result<(String, i32)>
where
    S: SymbolicRing + CoeffMap<S>,
{
    let n = cfg.n;
    let vec_out = |v: &WittVec<S>| -> String {
        if json {
            let coords: Vec<String> = v.coords.iter().map(|c| sym.format_elem(c)).collect();
            to_json(&json!({"coords": coords}))
        } else {
            format!("{}\n", v.format())
        }
    };
    let out = match op {
        WittCmd::Polys { op, .. } => {
            let op = match op.as_str() {
                "add" => WittOp::Add,
                "mul" => WittOp::Mul,
                "neg" => WittOp::Neg,
                "frobenius" => WittOp::Frobenius,
                other => return Err(usage(format!("unknown op '{other}'"))),
            };
            let table = match settings.cache_dir() {
                Some(dir) => cache::load_or_build(&dir, sym, &cfg.setup.key(), n, op)?.0,
                None => (*witt::table(sym, n, op)?).clone(),
            };
            if json {
                to_json(&serde_json::to_value(cache::TableDocument::new(&cfg.setup.key(), &table))?)
            } else {
                table
                    .polys
                    .iter()
                    .enumerate()
                    .map(|(i, p)| format!("{}_{i} = {p}\n", op_letter(op)))
                    .collect()
            }
        }
        WittCmd::Ghost { x, .. } => {
            let v = parse_vec(sym, x)?;
            let g = witt::ghost(sym, &v)?;
            vec_out(&WittVec::new(sym, g)?)
        }
        WittCmd::Unghost { w, .. } => {
            let g = parse_vec(sym, w)?;
            vec_out(&witt::unghost(sym, &g.coords)?)
        }
        WittCmd::Arith { op, x, y, .. } => {
            let u = parse_vec(sym, x)?;
            let v = y.as_deref().map(|y| parse_vec(sym, y)).transpose()?;
            let op = match op.as_str() {
                "add" => WittOp::Add,
                "mul" => WittOp::Mul,
                "neg" => WittOp::Neg,
                other => return Err(usage(format!("unknown op '{other}' (add, mul or neg)"))),
            };
            vec_out(&witt::witt_arith(sym, op, &u, v.as_ref())?)
        }
        WittCmd::Frobenius { x, .. } => vec_out(&witt::frobenius(sym, &parse_vec(sym, x)?)?),
        WittCmd::Teichmuller { a, .. } => vec_out(&witt::teichmuller(sym, parse_elem(sym, a)?, n)),
        WittCmd::Expdelta { r, .. } => vec_out(&witt::exp_delta(sym, &parse_elem(sym, r)?, n)?),
    };
    Ok((out, 0))
}

fn cmd_jet<S: SymbolicRing>(sym: &S, cfg: &RunConfig, json: bool) -> Result<(String, i32)> {
    let scheme = resolve_scheme(sym, &cfg.scheme)?;
    let j = crate::jet::jet_ring(&scheme.x, cfg.n)?;
    let vars: Vec<String> = j.vars.iter().map(Var::to_string).collect();
    let rels: Vec<String> = j.relations.iter().map(|r| r.to_string()).collect();
    if json {
        let base: Vec<String> = scheme.x.vars().iter().map(Var::to_string).collect();
        return Ok((
            to_json(&json!({"schema_version": 1, "base_vars": base, "n": cfg.n, "vars": vars, "relations": rels})),
            0,
        ));
    }
    let mut out = format!("J^{} of {} ({})\n", cfg.n, cfg.scheme, setup_label(&cfg.setup));
    out += &format!("vars: {}\n", pretty(&vars.join(", ")));
    out += &format!("relations ({}):\n", rels.len());
    for r in rels {
        out += &format!("  {}\n", pretty(&r));
    }
    Ok((out, 0))
}

fn setup_label(s: &BaseSetup) -> String {
    match s.mode {
        Mode::CharZero => format!("char-zero, p={}", s.p),
        Mode::CharP => format!("char-p, q={}", s.q),
    }
}

fn poly_map_text<R: PiRing>(images: &BTreeMap<Var, crate::algebra::Poly<R>>, order: &[Var]) -> Vec<(String, String)> {
    order.iter().filter_map(|g| images.get(g).map(|p| (g.to_string(), p.to_string()))).collect()
}

fn cmd_lateral<S: SymbolicRing>(sym: &S, cfg: &RunConfig, json: bool) -> Result<(String, i32)> {
    let scheme = resolve_scheme(sym, &cfg.scheme)?;
    let n = cfg.n;
    let s = make_sequence(sym, &scheme, cfg, n)?;
    let mut rng = cfg.rng(Suite::Descent);
    let m = lateral::lateral_map(&scheme.x, n, &s)?;
    let cert = lateral::certify(&m, &mut rng, cfg.trials());
    let lift = lateral::verify_lift_of_frobenius(&m, &s)?;
    let closed = if n >= 2 { Some(lateral::witt_frobenius_formula_map(&scheme.x, n, &s)?) } else { None };
    let disc = match &closed {
        Some(c) => Some(lateral::compare_maps(&m, c)?),
        None => None,
    };
    let order = m.map.source.clone();
    let images = poly_map_text(&m.map.images, &order);
    let lift_ok = lift.all_passed();
    let (cert_kind, cert_detail, cert_ok) = match &cert {
        Ok(c) => (c.kind().to_string(), c.detail(), true),
        Err(Error::Verification { witness, .. }) => ("failed".to_string(), witness.clone(), false),
        Err(e) => return Err(e.clone()),
    };
    let code = if lift_ok && cert_ok { 0 } else { 1 };
    if json {
        let obj = |pairs: &[(String, String)]| -> Value {
            Value::Object(pairs.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
        };
        let mut v = json!({
            "schema_version": 1,
            "X": cfg.scheme,
            "n": n,
            "s_kind": s.label(),
            "setup": setup_label(&cfg.setup),
            "images": obj(&images),
            "certificate": {"kind": cert_kind, "detail": cert_detail},
            "lift_congruence": if lift_ok { "pass" } else { "fail" },
        });
        if let (Some(c), Some(d)) = (&closed, &disc) {
            v["closed_formula"] = obj(&poly_map_text(&c.map.images, &order));
            v["discrepancy"] = obj(&poly_map_text(d, &order));
        }
        if !lift_ok {
            v["witnesses"] = json!(lift.failures().map(|f| f.witness.clone().unwrap_or_default()).collect::<Vec<_>>());
        }
        return Ok((to_json(&v), code));
    }
    let mut out = format!("lateral Frobenius on {} at n={n} ({}), S = {}\n", cfg.scheme, setup_label(&cfg.setup), s.label());
    if images.is_empty() {
        out += "no generators\n";
    }
    for (g, p) in &images {
        out += &format!("{} ↦ {}\n", pretty(g), pretty(p));
    }
    if let (Some(c), Some(d)) = (&closed, &disc) {
        out += "closed Witt formula:\n";
        for (g, p) in poly_map_text(&c.map.images, &order) {
            if !g.starts_with("s.") {
                out += &format!("  {} ↦ {}\n", pretty(&g), pretty(&p));
            }
        }
        if d.is_empty() {
            out += "discrepancy: none\n";
        } else {
            let parts: Vec<String> = poly_map_text(d, &order).iter().map(|(g, p)| format!("{g}: {p}")).collect();
            out += &format!("discrepancy: {{{}}}\n", pretty(&parts.join(", ")));
        }
    }
    out += &format!("certificate: {cert_kind} ({cert_detail})\n");
    out += &format!("lift congruence: {}\n", if lift_ok { "pass" } else { "FAIL" });
    for f in lift.failures() {
        out += &format!("  witness: {}\n", f.witness.as_deref().unwrap_or(""));
    }
    Ok((out, code))
}

fn cmd_verify(cfg: &RunConfig, suite: &str, json: bool) -> Result<(String, i32)> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite).ok_or_else(|| usage(format!("unknown suite '{suite}'")))?]
    };
    let reports = suites.iter().map(|&s| suites::run_suite(cfg, s)).collect::<Result<Vec<_>>>()?;
    let all_ok = reports.iter().all(|r| r.status != Status::Fail);
    let code = if all_ok { 0 } else { 1 };
    if json {
        let v = if reports.len() == 1 {
            serde_json::to_value(&reports[0])?
        } else {
            json!({"schema_version": 1, "status": if all_ok { "pass" } else { "fail" }, "reports": reports})
        };
        return Ok((to_json(&v), code));
    }
    let mut out = String::new();
    for r in &reports {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        out += &format!("{}: {status}\n", r.suite);
        for c in &r.checks.0 {
            out += &format!("  [{}] {} ({} cases)\n", if c.passed { "ok" } else { "FAIL" }, c.name, c.cases);
            if let Some(w) = &c.witness {
                out += &format!("    witness: {w}\n");
            }
        }
        for note in &r.notes {
            out += &format!("  note: {note}\n");
        }
    }
    Ok((out, code))
}
