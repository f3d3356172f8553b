//! Configuration, dispatch and persistence for the `nsvlab` binary.
//!
//! Every run writes its artifacts plus `manifest.json` into the output
//! directory. Artifacts are first written as `<name>.partial` and renamed
//! once complete; the manifest goes through a temp file and a rename.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::{
    parse_config, Command, Formats, LyapunovParams, Overrides, RunConfig, VerifyParams, VerifyTarget,
    OUTPUT_DIR_ENV,
};

use crate::bounds::dim_bound_report;
use crate::dynamics::{check_dissipative_bound, check_time_averages, integrate, SimConfig};
use crate::error::{Error, Result};
use crate::lab::{
    sweep_lieb_thirring, sweep_rho_l2, sweep_rho_linf, verify_eigenvalue_bounds, verify_liyau,
    verify_spectral_sums, InequalityReport, SweepConfig,
};
use crate::spectral::{io, SpectralGrid};
use crate::tangent::{q_n_estimate, LyapunovConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const DIAGNOSTICS_CSV_SCHEMA: &str =
    "t,energy_l2,enstrophy,energy_alpha,avg_enstrophy,avg_grad_l1,grashof_G,grashof_calG";
pub const TRACE_CSV_SCHEMA: &str = "t,trace_inst,trace_avg";
pub const FAMILY_CSV_SCHEMA: &str = "seed,n,alpha,lhs,rhs,ratio,refinement_change,resolution_ok,holds";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Passed,
    VerificationFailed,
    RuntimeFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Passed => 0,
            RunStatus::VerificationFailed => 1,
            RunStatus::RuntimeFailure => 3,
        }
    }
}

/// Process status for an error raised before or outside [`run`].
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter { .. } => 2,
        _ => 3,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifact {
    /// File name relative to the output directory.
    pub path: String,
    pub format: &'static str,
    pub schema: String,
    pub bytes: u64,
    /// False when the write failed and only `<path>.partial` exists.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub command: &'static str,
    pub target: Option<&'static str>,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<Artifact>,
    pub complete: bool,
    pub status: RunStatus,
    pub pass: bool,
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

/// Hex SHA-256 of the canonical TOML form.
pub fn config_hash(cfg: &RunConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_toml().as_bytes()))
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

struct Sink {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
    io_error: Option<String>,
}

impl Sink {
    fn write(&mut self, name: &str, format: &'static str, schema: &str, content: &[u8]) {
        let final_path = self.dir.join(name);
        let partial = self.dir.join(format!("{name}.partial"));
        let result = (|| -> std::io::Result<()> {
            let mut f = fs::File::create(&partial)?;
            f.write_all(content)?;
            f.sync_all()?;
            fs::rename(&partial, &final_path)
        })();
        let complete = match result {
            Ok(()) => true,
            Err(e) => {
                warn!("writing {}: {e}", final_path.display());
                self.io_error.get_or_insert_with(|| format!("{name}: {e}"));
                false
            }
        };
        self.artifacts.push(Artifact {
            path: name.to_string(),
            format,
            schema: schema.to_string(),
            bytes: content.len() as u64,
            complete,
        });
    }

    fn json(&mut self, name: &str, schema: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, "json", schema, text.as_bytes());
        Ok(())
    }
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let tmp = dir.join("manifest.json.tmp");
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(&tmp, text)?;
    fs::rename(&tmp, dir.join("manifest.json"))?;
    Ok(())
}

/// Dispatches `cfg`, writes its artifacts and `manifest.json`, and returns
/// the manifest. Numerical errors and I/O failures are recorded in the
/// manifest rather than returned; `Err` means the manifest itself could
/// not be written.
pub fn run(cfg: &RunConfig) -> Result<RunManifest> {
    let started_unix = unix_now();
    let clock = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let mut sink = Sink {
        dir: cfg.output_dir.clone(),
        artifacts: Vec::new(),
        io_error: None,
    };
    sink.write("config.toml", "toml", "run-config/1", cfg.to_toml().as_bytes());

    let mut warnings = Vec::new();
    let outcome = dispatch(cfg, &mut sink, &mut warnings);
    let (status, error) = match outcome {
        Ok(true) => (RunStatus::Passed, None),
        Ok(false) => (RunStatus::VerificationFailed, None),
        Err(e) => (RunStatus::RuntimeFailure, Some(e.to_string())),
    };
    let (status, error) = match (&sink.io_error, status) {
        (Some(e), _) => (RunStatus::RuntimeFailure, error.or_else(|| Some(format!("I/O failure: {e}")))),
        (None, s) => (s, error),
    };
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(cfg),
        command: cfg.command.name(),
        target: match &cfg.command {
            Command::Verify(v) => Some(v.target.as_str()),
            _ => None,
        },
        seed: cfg.seed,
        started_unix,
        finished_unix: unix_now(),
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        complete: sink.io_error.is_none() && status != RunStatus::RuntimeFailure,
        pass: status == RunStatus::Passed,
        artifacts: sink.artifacts,
        status,
        error,
        warnings,
    };
    write_manifest(&cfg.output_dir, &manifest)?;
    info!(
        "{} finished: {:?} in {:.2}s",
        manifest.command, manifest.status, manifest.wall_clock_seconds
    );
    Ok(manifest)
}

/// Returns whether every check of the run passed.
fn dispatch(cfg: &RunConfig, sink: &mut Sink, warnings: &mut Vec<String>) -> Result<bool> {
    match &cfg.command {
        Command::Simulate(sim) => run_simulate(sim, cfg.formats, sink, warnings),
        Command::Lyapunov(l) => run_lyapunov(l, cfg.formats, sink, warnings),
        Command::Bounds(b) => {
            let report = dim_bound_report(b)?;
            if cfg.formats.json {
                sink.json("bounds.json", "dim-bound-report/1", &report)?;
            }
            sink.write("bounds.txt", "text", "dim-bound-table/1", report.to_table().as_bytes());
            Ok(true)
        }
        Command::Verify(v) => run_verify(v, cfg.seed, cfg.formats, sink),
    }
}

fn run_simulate(sim: &SimConfig, formats: Formats, sink: &mut Sink, warnings: &mut Vec<String>) -> Result<bool> {
    let traj = integrate(sim)?;
    warnings.extend(traj.warnings.iter().cloned());
    let dissipative = check_dissipative_bound(&traj.series, sim);
    let averages = check_time_averages(&traj.series);
    warnings.extend(averages.warnings.iter().cloned());
    if formats.csv {
        sink.write("diagnostics.csv", "csv", DIAGNOSTICS_CSV_SCHEMA, traj.series.to_csv().as_bytes());
    }
    if formats.json {
        let last = traj.series.samples.last();
        sink.json(
            "simulate_report.json",
            "simulate-report/1",
            &json!({
                "steps": traj.steps,
                "t_end": sim.t_end,
                "grashof_G": traj.series.grashof(),
                "grashof_calG": traj.series.grashof_area(),
                "final": last,
                "dissipative_bound": dissipative,
                "time_averages": averages,
                "warnings": traj.warnings,
            }),
        )?;
    }
    sink.write(
        "final_state.nsv",
        "nsv-snapshot",
        "nsv-snapshot/1",
        io::snapshot_to_string(&traj.final_state, sim.alpha).as_bytes(),
    );
    for (i, (_, f)) in traj.snapshots.iter().enumerate() {
        sink.write(
            &format!("snapshot_{i:05}.nsv"),
            "nsv-snapshot",
            "nsv-snapshot/1",
            io::snapshot_to_string(f, sim.alpha).as_bytes(),
        );
    }
    Ok(dissipative.holds)
}

fn run_lyapunov(p: &LyapunovParams, formats: Formats, sink: &mut Sink, warnings: &mut Vec<String>) -> Result<bool> {
    let cfg = LyapunovConfig {
        sim: p.sim.clone(),
        n: p.n,
        burn_in: p.burn_in,
        reorth_every: p.reorth_every,
        frame: p.frame,
    };
    let report = q_n_estimate(&cfg)?;
    warnings.extend(report.warnings.iter().cloned());
    if formats.csv {
        sink.write("trace.csv", "csv", TRACE_CSV_SCHEMA, report.series.to_csv().as_bytes());
    }
    if formats.json {
        let mut summary = report.summary_json();
        summary["decreasing_after_n_star"] = json!(report.decreasing_after_n_star);
        summary["enstrophy_bound_violations"] = json!(report.enstrophy_bound_violations);
        summary["base"] = json!(report.series.base);
        summary["warnings"] = json!(report.warnings);
        sink.json("lyapunov.json", "lyapunov-summary/1", &summary)?;
    }
    Ok(report.enstrophy_bound_violations == 0)
}

fn family_csv(report: &InequalityReport) -> String {
    let mut out = format!("{FAMILY_CSV_SCHEMA}\n");
    for c in &report.checks {
        out.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?},{:?},{},{}\n",
            c.seed, c.n, c.alpha, c.lhs, c.rhs, c.ratio, c.refinement_change, c.resolution_ok, c.holds
        ));
    }
    out
}

fn run_verify(v: &VerifyParams, seed: u64, formats: Formats, sink: &mut Sink) -> Result<bool> {
    let name = format!("verify_{}.json", v.target.as_str().replace('-', "_"));
    let schema = "verify-report/1";
    let (summary, family) = match v.target {
        VerifyTarget::Spectrum => {
            let eig = verify_eigenvalue_bounds(v.j_max, v.e_max)?;
            let sums = verify_spectral_sums(v.sums_lambda_max, v.sums_e_max)?;
            let worst = [
                1.0 / eig.lower_ratio_min,
                eig.upper_ratio_max,
                eig.count_ratio_max,
                sums.inverse_ratio_max,
                sums.inverse_square_ratio_max,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            let pass = eig.pass && sums.pass;
            (
                json!({
                    "target": "spectrum",
                    "range": format!(
                        "j <= {}, E <= {}, Lambda <= {} (tail enumerated to {})",
                        v.j_max, v.e_max, v.sums_lambda_max, v.sums_e_max
                    ),
                    "worst_ratio": worst,
                    "witness_seed": null,
                    "pass": pass,
                    "eigenvalues": eig,
                    "spectral_sums": sums,
                }),
                None,
            )
        }
        VerifyTarget::Liyau => {
            let r = verify_liyau(v.m_max)?;
            (
                json!({
                    "target": "liyau",
                    "range": format!("m <= {}", v.m_max),
                    "worst_ratio": 1.0 / r.min_ratio,
                    "witness_seed": null,
                    "pass": r.pass,
                    "details": r,
                }),
                None,
            )
        }
        VerifyTarget::Lt | VerifyTarget::RhoL2 | VerifyTarget::RhoLinf => {
            let sweep = SweepConfig {
                grid: SpectralGrid::with_resolution(v.resolution)?,
                families: v.families,
                n_max: v.n_max,
                seed0: seed,
                alphas: v.alphas.clone(),
            };
            let r = match v.target {
                VerifyTarget::Lt => sweep_lieb_thirring(&sweep)?,
                VerifyTarget::RhoL2 => sweep_rho_l2(&sweep)?,
                _ => sweep_rho_linf(&sweep, 1..=v.lambda_max)?,
            };
            (
                json!({
                    "target": r.target,
                    "range": r.range,
                    "worst_ratio": r.worst_ratio,
                    "witness_seed": r.witness_seed,
                    "pass": r.pass,
                    "families": r.families,
                    "unresolved": r.unresolved,
                    "near_saturation": r.near_saturation,
                }),
                Some(r),
            )
        }
    };
    let pass = summary["pass"].as_bool().unwrap_or(false);
    if formats.json {
        sink.json(&name, schema, &summary)?;
    }
    if let (true, Some(r)) = (formats.csv, family) {
        let csv_name = format!("verify_{}.csv", v.target.as_str().replace('-', "_"));
        sink.write(&csv_name, "csv", FAMILY_CSV_SCHEMA, family_csv(&r).as_bytes());
    }
    Ok(pass)
}
