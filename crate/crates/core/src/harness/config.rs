//! TOML run configuration.
//!
//! ```toml
//! command = "simulate"          # simulate | lyapunov | bounds | verify
//! seed = 7
//! output_dir = "out"
//! formats = ["csv", "json"]
//!
//! [simulate]
//! nu = 1.0
//! alpha = 1.0
//! resolution = 64
//! dt = 1e-3
//! t_end = 1.0
//! sample_every = 10
//! forcing = { kind = "shear", amplitude = 1.0, wavenumber = 1 }
//! initial = { kind = "random", norm = 1.0 }
//! ```
//!
//! `[lyapunov]` takes every `[simulate]` key plus `n`, `burn_in`,
//! `reorth_every` and `frame`. `[bounds]` takes `d`, `nu`, `alpha`,
//! `gnorm`, `lambda1`, `measure`, `geometry`. `[verify]` takes `target`
//! and the sweep sizes listed in [`VerifyParams`].

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use toml::{Table, Value};

use crate::bounds::{BoundsInput, Geometry};
use crate::dynamics::{Formulation, ForcingMode, ForcingSpec, InitialCondition, Scheme, SimConfig};
use crate::error::{Error, Result};
use crate::spectral::{SpectralGrid, WaveVector};
use crate::tangent::FrameInit;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "NSVLAB_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyTarget {
    Spectrum,
    Liyau,
    Lt,
    RhoL2,
    RhoLinf,
}

impl VerifyTarget {
    pub const ALL: [VerifyTarget; 5] = [
        VerifyTarget::Spectrum,
        VerifyTarget::Liyau,
        VerifyTarget::Lt,
        VerifyTarget::RhoL2,
        VerifyTarget::RhoLinf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerifyTarget::Spectrum => "spectrum",
            VerifyTarget::Liyau => "liyau",
            VerifyTarget::Lt => "lt",
            VerifyTarget::RhoL2 => "rho-l2",
            VerifyTarget::RhoLinf => "rho-linf",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub target: VerifyTarget,
    /// Eigenvalue bounds are checked for `j ≤ j_max`.
    pub j_max: u64,
    /// Counting bounds are checked for integer `E ≤ e_max`.
    pub e_max: u64,
    pub m_max: u64,
    pub families: u64,
    pub n_max: usize,
    pub alphas: Vec<f64>,
    pub resolution: usize,
    /// `Λ` range `1..=lambda_max` for the `L∞` bound.
    pub lambda_max: u64,
    /// Spectral-sum lemmas are checked for `Λ ≤ sums_lambda_max`,
    /// enumerating up to `sums_e_max`.
    pub sums_lambda_max: u64,
    pub sums_e_max: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovParams {
    pub sim: SimConfig,
    pub n: usize,
    pub burn_in: f64,
    pub reorth_every: usize,
    pub frame: FrameInit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Simulate(SimConfig),
    Lyapunov(LyapunovParams),
    Bounds(BoundsInput),
    Verify(VerifyParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Lyapunov(_) => "lyapunov",
            Command::Bounds(_) => "bounds",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub formats: Formats,
}

/// Values that take precedence over the file. `section` entries go into
/// the table of the selected command.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub section: Table,
}

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn unknown(&mut self, t: &Table, scope: &str, allowed: &[&str]) {
        let allowed: BTreeSet<_> = allowed.iter().copied().collect();
        for k in t.keys() {
            if !allowed.contains(k.as_str()) {
                self.errors.push(format!("{scope}: unknown key `{k}`"));
            }
        }
    }

    fn f64(&mut self, t: &Table, scope: &str, key: &str, default: f64) -> f64 {
        match t.get(key) {
            None => default,
            Some(Value::Float(x)) => *x,
            Some(Value::Integer(i)) => *i as f64,
            Some(v) => {
                self.errors
                    .push(format!("{scope}.{key}: expected a number, found {}", v.type_str()));
                default
            }
        }
    }

    fn u64(&mut self, t: &Table, scope: &str, key: &str, default: u64) -> u64 {
        match t.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(Value::Integer(i)) => {
                self.errors.push(format!("{scope}.{key}: must be >= 0, got {i}"));
                default
            }
            Some(v) => {
                self.errors
                    .push(format!("{scope}.{key}: expected an integer, found {}", v.type_str()));
                default
            }
        }
    }

    fn opt_u64(&mut self, t: &Table, scope: &str, key: &str) -> Option<u64> {
        t.get(key).map(|_| self.u64(t, scope, key, 0))
    }

    fn string(&mut self, t: &Table, scope: &str, key: &str, default: &str) -> String {
        match t.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => {
                self.errors
                    .push(format!("{scope}.{key}: expected a string, found {}", v.type_str()));
                default.to_string()
            }
        }
    }

    fn table<'a>(&mut self, t: &'a Table, scope: &str, key: &str) -> Option<&'a Table> {
        match t.get(key) {
            None => None,
            Some(Value::Table(x)) => Some(x),
            Some(v) => {
                self.errors
                    .push(format!("{scope}.{key}: expected a table, found {}", v.type_str()));
                None
            }
        }
    }

    fn positive(&mut self, scope: &str, key: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.errors.push(format!("{scope}.{key}: must be > 0, got {v}"));
        }
    }

    fn nonnegative(&mut self, scope: &str, key: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.errors.push(format!("{scope}.{key}: must be >= 0, got {v}"));
        }
    }
}

const SIM_KEYS: &[&str] = &[
    "nu",
    "alpha",
    "resolution",
    "cutoff",
    "dt",
    "t_end",
    "sample_every",
    "snapshot_every",
    "scheme",
    "formulation",
    "forcing",
    "initial",
];

fn read_forcing(r: &mut Reader, t: Option<&Table>, scope: &str) -> ForcingSpec {
    let Some(t) = t else {
        return ForcingSpec::None;
    };
    let scope = format!("{scope}.forcing");
    let kind = r.string(t, &scope, "kind", "none");
    match kind.as_str() {
        "none" => {
            r.unknown(t, &scope, &["kind"]);
            ForcingSpec::None
        }
        "shear" => {
            r.unknown(t, &scope, &["kind", "amplitude", "wavenumber"]);
            let amplitude = r.f64(t, &scope, "amplitude", 1.0);
            let wavenumber = r.u64(t, &scope, "wavenumber", 1) as i64;
            if wavenumber == 0 {
                r.errors.push(format!("{scope}.wavenumber: must be >= 1"));
            }
            ForcingSpec::Shear { amplitude, wavenumber }
        }
        "modes" => {
            r.unknown(t, &scope, &["kind", "modes"]);
            let mut out = Vec::new();
            match t.get("modes") {
                Some(Value::Array(items)) => {
                    for (i, item) in items.iter().enumerate() {
                        match parse_mode(item) {
                            Some(m) => out.push(m),
                            None => r.errors.push(format!(
                                "{scope}.modes[{i}]: expected {{ k = [k1, k2], amplitude = [[re, im], [re, im]] }}"
                            )),
                        }
                    }
                }
                _ => r.errors.push(format!("{scope}.modes: expected an array")),
            }
            ForcingSpec::Modes(out)
        }
        other => {
            r.errors
                .push(format!("{scope}.kind: expected none | shear | modes, got `{other}`"));
            ForcingSpec::None
        }
    }
}

fn parse_mode(v: &Value) -> Option<ForcingMode> {
    let t = v.as_table()?;
    let k = t.get("k")?.as_array()?;
    let a = t.get("amplitude")?.as_array()?;
    if k.len() != 2 || a.len() != 2 || t.len() != 2 {
        return None;
    }
    let num = |v: &Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
    let pair = |v: &Value| -> Option<Complex64> {
        let p = v.as_array()?;
        (p.len() == 2).then(|| Some(Complex64::new(num(&p[0])?, num(&p[1])?)))?
    };
    Some(ForcingMode {
        k: WaveVector::new(k[0].as_integer()?, k[1].as_integer()?),
        amplitude: [pair(&a[0])?, pair(&a[1])?],
    })
}

fn read_initial(r: &mut Reader, t: Option<&Table>, scope: &str, seed: u64) -> InitialCondition {
    let Some(t) = t else {
        return InitialCondition::Zero;
    };
    let scope = format!("{scope}.initial");
    let kind = r.string(t, &scope, "kind", "zero");
    match kind.as_str() {
        "zero" => {
            r.unknown(t, &scope, &["kind"]);
            InitialCondition::Zero
        }
        "shear" => {
            r.unknown(t, &scope, &["kind", "amplitude", "wavenumber"]);
            InitialCondition::Shear {
                amplitude: r.f64(t, &scope, "amplitude", 1.0),
                wavenumber: r.u64(t, &scope, "wavenumber", 1).max(1) as i64,
            }
        }
        "random" => {
            r.unknown(t, &scope, &["kind", "norm"]);
            let norm = r.f64(t, &scope, "norm", 1.0);
            r.nonnegative(&scope, "norm", norm);
            InitialCondition::Random { seed, norm }
        }
        "file" => {
            r.unknown(t, &scope, &["kind", "path"]);
            InitialCondition::File(PathBuf::from(r.string(t, &scope, "path", "")))
        }
        other => {
            r.errors
                .push(format!("{scope}.kind: expected zero | shear | random | file, got `{other}`"));
            InitialCondition::Zero
        }
    }
}

fn read_sim(r: &mut Reader, t: &Table, scope: &str, seed: u64, t_end_default: f64) -> SimConfig {
    let d = SimConfig::default();
    let nu = r.f64(t, scope, "nu", d.nu);
    r.positive(scope, "nu", nu);
    let alpha = r.f64(t, scope, "alpha", d.alpha);
    r.nonnegative(scope, "alpha", alpha);
    let dt = r.f64(t, scope, "dt", d.dt);
    r.positive(scope, "dt", dt);
    let t_end = r.f64(t, scope, "t_end", t_end_default);
    r.nonnegative(scope, "t_end", t_end);
    let resolution = r.u64(t, scope, "resolution", 64) as usize;
    let cutoff = r.opt_u64(t, scope, "cutoff");
    let grid = match cutoff {
        Some(c) => SpectralGrid::new(resolution, c as usize),
        None => SpectralGrid::with_resolution(resolution),
    }
    .unwrap_or_else(|e| {
        r.errors.push(format!("{scope}.resolution: {e}"));
        d.grid
    });
    let sample_every = r.u64(t, scope, "sample_every", d.sample_every as u64) as usize;
    if sample_every == 0 {
        r.errors.push(format!("{scope}.sample_every: must be >= 1"));
    }
    let snapshot_every = r.opt_u64(t, scope, "snapshot_every").map(|v| v as usize);
    if snapshot_every == Some(0) {
        r.errors.push(format!("{scope}.snapshot_every: must be >= 1"));
    }
    let scheme_s = r.string(t, scope, "scheme", "auto");
    let scheme = Scheme::parse(&scheme_s).unwrap_or_else(|| {
        r.errors
            .push(format!("{scope}.scheme: expected auto | rk4 | if-rk4, got `{scheme_s}`"));
        Scheme::Auto
    });
    let form_s = r.string(t, scope, "formulation", "velocity");
    let formulation = match form_s.as_str() {
        "velocity" => Formulation::Velocity,
        "vorticity" => Formulation::Vorticity,
        other => {
            r.errors
                .push(format!("{scope}.formulation: expected velocity | vorticity, got `{other}`"));
            Formulation::Velocity
        }
    };
    let forcing_t = r.table(t, scope, "forcing");
    let forcing = read_forcing(r, forcing_t, scope);
    let initial_t = r.table(t, scope, "initial");
    let initial = read_initial(r, initial_t, scope, seed);
    SimConfig {
        nu,
        alpha,
        grid,
        dt,
        t_end,
        forcing,
        initial,
        sample_every: sample_every.max(1),
        snapshot_every: snapshot_every.filter(|&s| s > 0),
        scheme,
        formulation,
    }
}

fn read_bounds(r: &mut Reader, t: &Table) -> BoundsInput {
    let s = "bounds";
    r.unknown(t, s, &["d", "nu", "alpha", "gnorm", "lambda1", "measure", "geometry"]);
    let d = r.u64(t, s, "d", 2);
    if !(d == 2 || d == 3) {
        r.errors.push(format!("bounds.d: must be 2 or 3, got {d}"));
    }
    let nu = r.f64(t, s, "nu", 1.0);
    r.positive(s, "nu", nu);
    let alpha = r.f64(t, s, "alpha", 0.0);
    r.nonnegative(s, "alpha", alpha);
    let g_norm = r.f64(t, s, "gnorm", 1.0);
    r.positive(s, "gnorm", g_norm);
    let lambda1 = r.f64(t, s, "lambda1", 1.0);
    r.positive(s, "lambda1", lambda1);
    let default_measure = if d == 3 { 8.0 * PI.powi(3) } else { 4.0 * PI * PI };
    let domain_measure = r.f64(t, s, "measure", default_measure);
    r.positive(s, "measure", domain_measure);
    let g = r.string(t, s, "geometry", "torus");
    let geometry = Geometry::parse(&g).unwrap_or_else(|| {
        r.errors
            .push(format!("bounds.geometry: expected torus | bounded-domain, got `{g}`"));
        Geometry::Torus
    });
    let input = BoundsInput {
        d: d as u8,
        nu,
        alpha,
        g_norm,
        lambda1,
        domain_measure,
        geometry,
    };
    if r.errors.is_empty() {
        if let Err(Error::Config(p)) = input.validate() {
            r.errors.extend(p.into_iter().map(|m| format!("bounds.{m}")));
        }
    }
    input
}

fn read_verify(r: &mut Reader, t: &Table) -> VerifyParams {
    let s = "verify";
    r.unknown(
        t,
        s,
        &[
            "target",
            "j_max",
            "e_max",
            "m_max",
            "families",
            "n_max",
            "alphas",
            "resolution",
            "lambda_max",
            "sums_lambda_max",
            "sums_e_max",
        ],
    );
    let target_s = r.string(t, s, "target", "");
    let target = VerifyTarget::parse(&target_s).unwrap_or_else(|| {
        r.errors.push(format!(
            "verify.target: expected spectrum | liyau | lt | rho-l2 | rho-linf, got `{target_s}`"
        ));
        VerifyTarget::Spectrum
    });
    let alphas = match t.get("alphas") {
        None => vec![0.01, 0.1, 1.0],
        Some(Value::Array(a)) => a
            .iter()
            .filter_map(|v| {
                let x = v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
                if !matches!(x, Some(x) if x > 0.0 && x.is_finite()) {
                    r.errors.push(format!("verify.alphas: entries must be numbers > 0, got {v}"));
                }
                x
            })
            .collect(),
        Some(v) => {
            r.errors
                .push(format!("verify.alphas: expected an array, found {}", v.type_str()));
            vec![]
        }
    };
    if alphas.is_empty() {
        r.errors.push("verify.alphas: must not be empty".into());
    }
    let p = VerifyParams {
        target,
        j_max: r.u64(t, s, "j_max", 100_000),
        e_max: r.u64(t, s, "e_max", 10_000),
        m_max: r.u64(t, s, "m_max", 10_000),
        families: r.u64(t, s, "families", 100),
        n_max: r.u64(t, s, "n_max", 16) as usize,
        alphas,
        resolution: r.u64(t, s, "resolution", 64) as usize,
        lambda_max: r.u64(t, s, "lambda_max", 64),
        sums_lambda_max: r.u64(t, s, "sums_lambda_max", 10_000),
        sums_e_max: r.u64(t, s, "sums_e_max", 1_000_000),
    };
    for (k, v) in [
        ("j_max", p.j_max.saturating_sub(1)),
        ("e_max", p.e_max),
        ("m_max", p.m_max),
        ("families", p.families),
        ("n_max", p.n_max as u64),
        ("lambda_max", p.lambda_max),
        ("sums_lambda_max", p.sums_lambda_max),
    ] {
        if v == 0 {
            r.errors.push(format!("verify.{k}: too small"));
        }
    }
    if p.sums_e_max <= p.sums_lambda_max {
        r.errors.push("verify.sums_e_max: must exceed sums_lambda_max".into());
    }
    if let Err(e) = SpectralGrid::with_resolution(p.resolution) {
        r.errors.push(format!("verify.resolution: {e}"));
    }
    p
}

/// Merges `overrides` into the parsed file (if any), then validates
/// everything, reporting all problems at once as [`Error::Config`].
pub fn parse_config(file: Option<&str>, overrides: &Overrides) -> Result<RunConfig> {
    let mut root: Table = match file {
        Some(text) => text
            .parse::<Table>()
            .map_err(|e| Error::Config(vec![format!("malformed TOML: {e}")]))?,
        None => Table::new(),
    };
    if let Some(c) = &overrides.command {
        root.insert("command".into(), Value::String(c.clone()));
    }
    if let Some(s) = overrides.seed {
        root.insert("seed".into(), Value::Integer(s as i64));
    }
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        if !dir.is_empty() {
            root.insert("output_dir".into(), Value::String(dir));
        }
    }
    if let Some(d) = &overrides.output_dir {
        root.insert("output_dir".into(), Value::String(d.to_string_lossy().into_owned()));
    }

    let mut r = Reader { errors: Vec::new() };
    r.unknown(
        &root,
        "config",
        &["command", "seed", "output_dir", "formats", "simulate", "lyapunov", "bounds", "verify"],
    );
    let command = r.string(&root, "config", "command", "");
    let seed = r.u64(&root, "config", "seed", 0);
    let output_dir = PathBuf::from(r.string(&root, "config", "output_dir", "nsvlab-out"));
    let formats = match root.get("formats") {
        None => Formats { csv: true, json: true },
        Some(Value::Array(a)) => {
            let mut f = Formats { csv: false, json: false };
            for v in a {
                match v.as_str() {
                    Some("csv") => f.csv = true,
                    Some("json") => f.json = true,
                    _ => r.errors.push(format!("config.formats: expected \"csv\" or \"json\", got {v}")),
                }
            }
            f
        }
        Some(v) => {
            r.errors
                .push(format!("config.formats: expected an array, found {}", v.type_str()));
            Formats { csv: true, json: true }
        }
    };

    let section = |name: &str, r: &mut Reader| -> Table {
        let mut t = r.table(&root, "config", name).cloned().unwrap_or_default();
        for (k, v) in &overrides.section {
            t.insert(k.clone(), v.clone());
        }
        t
    };

    let cmd = match command.as_str() {
        "simulate" => {
            let t = section("simulate", &mut r);
            r.unknown(&t, "simulate", SIM_KEYS);
            Some(Command::Simulate(read_sim(&mut r, &t, "simulate", seed, 1.0)))
        }
        "lyapunov" => {
            let t = section("lyapunov", &mut r);
            let mut allowed = SIM_KEYS.to_vec();
            allowed.extend(["n", "burn_in", "reorth_every", "frame"]);
            r.unknown(&t, "lyapunov", &allowed);
            let sim = read_sim(&mut r, &t, "lyapunov", seed, 10.0);
            let n = r.u64(&t, "lyapunov", "n", 8) as usize;
            if n == 0 {
                r.errors.push("lyapunov.n: must be >= 1".into());
            }
            let burn_in = r.f64(&t, "lyapunov", "burn_in", 0.5 * sim.t_end);
            if !(burn_in >= 0.0 && burn_in < sim.t_end) {
                r.errors
                    .push(format!("lyapunov.burn_in: must lie in [0, t_end), got {burn_in}"));
            }
            let reorth_every = r.u64(&t, "lyapunov", "reorth_every", 10) as usize;
            if reorth_every == 0 {
                r.errors.push("lyapunov.reorth_every: must be >= 1".into());
            }
            let f = r.string(&t, "lyapunov", "frame", "random");
            let frame = match f.as_str() {
                "random" => FrameInit::Random { seed },
                "eigenmodes" => FrameInit::Eigenmodes,
                other => {
                    r.errors
                        .push(format!("lyapunov.frame: expected random | eigenmodes, got `{other}`"));
                    FrameInit::Eigenmodes
                }
            };
            Some(Command::Lyapunov(LyapunovParams {
                sim,
                n,
                burn_in,
                reorth_every,
                frame,
            }))
        }
        "bounds" => {
            let t = section("bounds", &mut r);
            Some(Command::Bounds(read_bounds(&mut r, &t)))
        }
        "verify" => {
            let t = section("verify", &mut r);
            Some(Command::Verify(read_verify(&mut r, &t)))
        }
        "" => {
            r.errors
                .push("config.command: missing (simulate | lyapunov | bounds | verify)".into());
            None
        }
        other => {
            r.errors.push(format!(
                "config.command: expected simulate | lyapunov | bounds | verify, got `{other}`"
            ));
            None
        }
    };

    match cmd {
        Some(command) if r.errors.is_empty() => Ok(RunConfig {
            command,
            seed,
            output_dir,
            formats,
        }),
        _ => Err(Error::Config(r.errors)),
    }
}

fn num(x: f64) -> Value {
    Value::Float(x)
}

fn int(x: u64) -> Value {
    Value::Integer(x as i64)
}

fn sim_table(s: &SimConfig) -> Table {
    let mut t = Table::new();
    t.insert("nu".into(), num(s.nu));
    t.insert("alpha".into(), num(s.alpha));
    t.insert("resolution".into(), int(s.grid.resolution() as u64));
    t.insert("cutoff".into(), int(s.grid.cutoff() as u64));
    t.insert("dt".into(), num(s.dt));
    t.insert("t_end".into(), num(s.t_end));
    t.insert("sample_every".into(), int(s.sample_every as u64));
    if let Some(e) = s.snapshot_every {
        t.insert("snapshot_every".into(), int(e as u64));
    }
    t.insert("scheme".into(), Value::String(s.scheme.as_str().into()));
    let form = match s.formulation {
        Formulation::Velocity => "velocity",
        Formulation::Vorticity => "vorticity",
    };
    t.insert("formulation".into(), Value::String(form.into()));
    let mut f = Table::new();
    match &s.forcing {
        ForcingSpec::None => {
            f.insert("kind".into(), Value::String("none".into()));
        }
        ForcingSpec::Shear { amplitude, wavenumber } => {
            f.insert("kind".into(), Value::String("shear".into()));
            f.insert("amplitude".into(), num(*amplitude));
            f.insert("wavenumber".into(), Value::Integer(*wavenumber));
        }
        ForcingSpec::Modes(modes) => {
            f.insert("kind".into(), Value::String("modes".into()));
            let arr = modes
                .iter()
                .map(|m| {
                    let mut mt = Table::new();
                    mt.insert(
                        "k".into(),
                        Value::Array(vec![Value::Integer(m.k.k1), Value::Integer(m.k.k2)]),
                    );
                    mt.insert(
                        "amplitude".into(),
                        Value::Array(
                            m.amplitude
                                .iter()
                                .map(|z| Value::Array(vec![num(z.re), num(z.im)]))
                                .collect(),
                        ),
                    );
                    Value::Table(mt)
                })
                .collect();
            f.insert("modes".into(), Value::Array(arr));
        }
    }
    t.insert("forcing".into(), Value::Table(f));
    let mut i = Table::new();
    match &s.initial {
        InitialCondition::Zero | InitialCondition::Field(_) => {
            i.insert("kind".into(), Value::String("zero".into()));
        }
        InitialCondition::Shear { amplitude, wavenumber } => {
            i.insert("kind".into(), Value::String("shear".into()));
            i.insert("amplitude".into(), num(*amplitude));
            i.insert("wavenumber".into(), Value::Integer(*wavenumber));
        }
        InitialCondition::Random { norm, .. } => {
            i.insert("kind".into(), Value::String("random".into()));
            i.insert("norm".into(), num(*norm));
        }
        InitialCondition::File(p) => {
            i.insert("kind".into(), Value::String("file".into()));
            i.insert("path".into(), Value::String(p.to_string_lossy().into_owned()));
        }
    }
    t.insert("initial".into(), Value::Table(i));
    t
}

impl RunConfig {
    /// Canonical TOML form; [`parse_config`] reads it back to an equal
    /// config (an in-memory `Field` initial condition is written as zero).
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("command".into(), Value::String(self.command.name().into()));
        root.insert("seed".into(), int(self.seed));
        root.insert(
            "output_dir".into(),
            Value::String(self.output_dir.to_string_lossy().into_owned()),
        );
        let mut formats = Vec::new();
        if self.formats.csv {
            formats.push(Value::String("csv".into()));
        }
        if self.formats.json {
            formats.push(Value::String("json".into()));
        }
        root.insert("formats".into(), Value::Array(formats));
        let (name, section) = match &self.command {
            Command::Simulate(s) => ("simulate", sim_table(s)),
            Command::Lyapunov(l) => {
                let mut t = sim_table(&l.sim);
                t.insert("n".into(), int(l.n as u64));
                t.insert("burn_in".into(), num(l.burn_in));
                t.insert("reorth_every".into(), int(l.reorth_every as u64));
                let frame = match l.frame {
                    FrameInit::Random { .. } => "random",
                    FrameInit::Eigenmodes => "eigenmodes",
                };
                t.insert("frame".into(), Value::String(frame.into()));
                ("lyapunov", t)
            }
            Command::Bounds(b) => {
                let mut t = Table::new();
                t.insert("d".into(), int(b.d as u64));
                t.insert("nu".into(), num(b.nu));
                t.insert("alpha".into(), num(b.alpha));
                t.insert("gnorm".into(), num(b.g_norm));
                t.insert("lambda1".into(), num(b.lambda1));
                t.insert("measure".into(), num(b.domain_measure));
                let g = match b.geometry {
                    Geometry::Torus => "torus",
                    Geometry::BoundedDomain => "bounded-domain",
                };
                t.insert("geometry".into(), Value::String(g.into()));
                ("bounds", t)
            }
            Command::Verify(v) => {
                let mut t = Table::new();
                t.insert("target".into(), Value::String(v.target.as_str().into()));
                t.insert("j_max".into(), int(v.j_max));
                t.insert("e_max".into(), int(v.e_max));
                t.insert("m_max".into(), int(v.m_max));
                t.insert("families".into(), int(v.families));
                t.insert("n_max".into(), int(v.n_max as u64));
                t.insert("alphas".into(), Value::Array(v.alphas.iter().map(|&a| num(a)).collect()));
                t.insert("resolution".into(), int(v.resolution as u64));
                t.insert("lambda_max".into(), int(v.lambda_max));
                t.insert("sums_lambda_max".into(), int(v.sums_lambda_max));
                t.insert("sums_e_max".into(), int(v.sums_e_max));
                ("verify", t)
            }
        };
        root.insert(name.into(), Value::Table(section));
        toml::to_string(&root).expect("table serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn no_env() {
        // tests below rely on the file / override values only
        assert!(std::env::var(OUTPUT_DIR_ENV).is_err(), "unset {OUTPUT_DIR_ENV} to run these tests");
    }

    #[test]
    fn minimal_bounds_config() {
        no_env();
        let text = "command = \"bounds\"\n[bounds]\nd = 2\nnu = 1\nalpha = 0\ngnorm = 1\ngeometry = \"torus\"\n";
        let c = parse_config(Some(text), &Overrides::default()).unwrap();
        assert_eq!(c.command, Command::Bounds(BoundsInput::torus2(1.0, 0.0, 1.0)));
    }

    #[test]
    fn errors_are_aggregated_and_named() {
        let text = "command = \"bounds\"\ncolour = 3\n[bounds]\nalpha = -1\nnu = \"x\"\n";
        match parse_config(Some(text), &Overrides::default()) {
            Err(Error::Config(errs)) => {
                assert!(errs.iter().any(|e| e.contains("bounds.alpha")), "{errs:?}");
                assert!(errs.iter().any(|e| e.contains("bounds.nu")), "{errs:?}");
                assert!(errs.iter().any(|e| e.contains("colour")), "{errs:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        no_env();
        let text = "command = \"simulate\"\nseed = 1\n[simulate]\ndt = 0.01\nresolution = 16\n";
        let mut o = Overrides::default();
        o.section.insert("dt".into(), Value::Float(1e-3));
        o.seed = Some(9);
        let c = parse_config(Some(text), &o).unwrap();
        match c.command {
            Command::Simulate(s) => assert_eq!((s.dt, s.grid.resolution()), (1e-3, 16)),
            other => panic!("{other:?}"),
        }
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn unknown_target_and_command() {
        assert!(parse_config(Some("command = \"verify\"\n[verify]\ntarget = \"nope\"\n"), &Overrides::default()).is_err());
        assert!(parse_config(Some("command = \"fly\"\n"), &Overrides::default()).is_err());
        assert!(parse_config(None, &Overrides::default()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(nu in 0.01f64..10.0, alpha in 0.0f64..5.0, dt in 1e-4f64..0.1, seed in 0u64..1000,
                      amp in -3.0f64..3.0, m in 1i64..5, which in 0usize..4) {
            let sim = SimConfig {
                nu, alpha, dt,
                grid: SpectralGrid::with_resolution(32).unwrap(),
                forcing: ForcingSpec::Shear { amplitude: amp, wavenumber: m },
                initial: InitialCondition::Random { seed, norm: amp.abs() },
                ..SimConfig::default()
            };
            let command = match which {
                0 => Command::Simulate(sim),
                1 => Command::Lyapunov(LyapunovParams { sim, n: 3, burn_in: 0.25, reorth_every: 7, frame: FrameInit::Random { seed } }),
                2 => Command::Bounds(BoundsInput::torus2(nu, alpha, amp.abs() + 0.1)),
                _ => Command::Verify(VerifyParams {
                    target: VerifyTarget::RhoLinf, j_max: 100, e_max: 50, m_max: 30, families: 4,
                    n_max: 3, alphas: vec![alpha + 0.01], resolution: 32, lambda_max: 8,
                    sums_lambda_max: 10, sums_e_max: 100,
                }),
            };
            let cfg = RunConfig { command, seed, output_dir: "out".into(), formats: Formats { csv: true, json: false } };
            let text = cfg.to_toml();
            let mut o = Overrides::default();
            o.output_dir = Some("out".into());
            let back = parse_config(Some(&text), &o).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
