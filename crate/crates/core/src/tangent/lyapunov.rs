use std::fmt::Write as _;

use log::warn;
use serde::Serialize;

use super::{
    check_enstrophy_lower_bound, orthonormalize, tangent_nonlinear_velocity, tangent_nonlinear_vorticity,
    trace_terms, TangentFrame,
};
use crate::dynamics::{Formulation, NsvModel, SimConfig, Stepper};
use crate::error::{Error, Result};
use crate::spectral::{ops, FieldRole, PhysicalVelocity, SpectralField};

/// Initial tangent frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameInit {
    Random { seed: u64 },
    /// Lowest Fourier modes, see [`TangentFrame::eigenmodes`].
    Eigenmodes,
}

/// A co-evolved base trajectory and tangent frame.
///
/// `sim.t_end` is the total time; averages use `t ≥ burn_in` only. The
/// base state follows `sim.initial` and `sim.formulation`.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovConfig {
    pub sim: SimConfig,
    /// Frame size. Frames are nested, so one run yields `q̂(m)` for every
    /// `m ≤ n`.
    pub n: usize,
    pub burn_in: f64,
    /// Steps between re-orthonormalisations.
    pub reorth_every: usize,
    pub frame: FrameInit,
}

impl LyapunovConfig {
    pub fn new(sim: SimConfig, n: usize, burn_in: f64) -> Self {
        Self {
            sim,
            n,
            burn_in,
            reorth_every: 10,
            frame: FrameInit::Random { seed: 0 },
        }
    }

    fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.n == 0 {
            return Err(Error::invalid("n", "must be >= 1"));
        }
        if self.reorth_every == 0 {
            return Err(Error::invalid("reorth_every", "must be >= 1"));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.sim.t_end) {
            return Err(Error::invalid(
                "burn_in",
                format!("must lie in [0, t_end), got {} with t_end {}", self.burn_in, self.sim.t_end),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: f64,
    /// `Σ_{j≤n} (L θ_j, θ_j)_α` just after orthonormalisation.
    pub trace_inst: f64,
    /// Cesàro mean of `trace_inst` over samples with `t ≥ burn_in`; NaN
    /// before that.
    pub trace_avg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSeries {
    pub n: usize,
    pub burn_in: f64,
    pub window: f64,
    /// Short description of the base trajectory.
    pub base: String,
    pub samples: Vec<TraceSample>,
}

impl TraceSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,trace_inst,trace_avg\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:?},{:?},{:?}", s.t, s.trace_inst, s.trace_avg);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub series: TraceSeries,
    /// `q̂(m)` for `m = 1..=n`.
    pub q_hat: Vec<f64>,
    /// Mean of `ln r_jj` per unit time over the window, `j = 1..=n`.
    pub exponents: Vec<f64>,
    /// Smallest `m` with `q̂(m) < 0`.
    pub n_star: Option<usize>,
    /// Whether every per-vector contribution after `n*` is nonpositive.
    pub decreasing_after_n_star: bool,
    /// Samples where `Σ‖∇θ_j‖² < n/(α+1)` failed (should be zero).
    pub enstrophy_bound_violations: usize,
    pub window: f64,
    pub warnings: Vec<String>,
}

impl LyapunovReport {
    /// `{n, q_hat, n_star, window}` with `q_hat = q̂(n)`.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.series.n,
            "q_hat": self.q_hat.last().copied(),
            "q_hat_by_n": self.q_hat,
            "n_star": self.n_star,
            "window": self.window,
            "burn_in": self.series.burn_in,
            "exponents": self.exponents,
        })
    }
}

/// Co-evolves the base flow and an `n`-frame with one fixed-step scheme,
/// re-orthonormalising every `reorth_every` steps and sampling the trace
/// just afterwards.
///
/// The supremum over trajectories and frames in the definition of `q(n)`
/// is replaced by one long trajectory with an evolved frame.
pub fn q_n_estimate(cfg: &LyapunovConfig) -> Result<LyapunovReport> {
    cfg.validate()?;
    let sim = &cfg.sim;
    let model = NsvModel::new(sim)?;
    let metric = model.metric();
    let u0 = sim.initial.build(sim.grid)?;
    let (role, base0) = match sim.formulation {
        Formulation::Velocity => (FieldRole::Velocity, u0),
        Formulation::Vorticity => (FieldRole::Vorticity, ops::rot(&u0)?),
    };
    let frame = match cfg.frame {
        FrameInit::Random { seed } => TangentFrame::random(sim.grid, role, cfg.n, seed, metric)?,
        FrameInit::Eigenmodes => TangentFrame::eigenmodes(sim.grid, role, cfg.n, metric)?,
    };

    let mut state = Vec::with_capacity(cfg.n + 1);
    state.push(base0);
    state.extend(frame.into_vectors());

    let stepper = Stepper::new(sim.scheme, sim.alpha, sim.dt);
    let linear = |ksq: f64| model.linear_symbol(ksq);
    let nonlinear = |x: &[SpectralField]| -> Result<Vec<SpectralField>> {
        let mut out = Vec::with_capacity(x.len());
        match role {
            FieldRole::Velocity => {
                let pu = PhysicalVelocity::new(model.fft(), &x[0]);
                out.push(model.nonlinear_velocity_phys(&pu));
                out.extend(x[1..].iter().map(|t| tangent_nonlinear_velocity(&model, &pu, t)));
            }
            FieldRole::Vorticity => {
                let u = ops::curl_and_stream(&x[0])?;
                let pu = [model.fft().physical(&u, 0), model.fft().physical(&u, 1)];
                out.push(model.nonlinear_vorticity(&x[0])?);
                for p in &x[1..] {
                    out.push(tangent_nonlinear_vorticity(&model, &pu, &x[0], p)?);
                }
            }
        }
        Ok(out)
    };

    let steps = sim.steps();
    let mut samples = Vec::new();
    let mut contrib_sum = vec![0.0; cfg.n];
    let mut log_growth = vec![0.0; cfg.n];
    let mut counted = 0usize;
    let mut window_start: Option<f64> = None;
    let mut window_end = 0.0;
    let mut violations = 0usize;
    let mut warnings = Vec::new();

    for step in 1..=steps {
        stepper.step(&mut state, &linear, nonlinear)?;
        let t = step as f64 * sim.dt;
        if !state.iter().all(SpectralField::is_finite) {
            return Err(Error::Diverged { step, time: t });
        }
        if step % cfg.reorth_every != 0 && step != steps {
            continue;
        }
        let diag = orthonormalize(&mut state[1..], metric)?;
        if window_start.is_some() {
            for (g, r) in log_growth.iter_mut().zip(&diag) {
                *g += r.ln();
            }
            window_end = t;
        } else if t >= cfg.burn_in {
            window_start = Some(t);
            window_end = t;
        }

        let frame = TangentFrame::new(state[1..].to_vec(), metric)?;
        if !check_enstrophy_lower_bound(&frame).holds {
            violations += 1;
        }
        let terms = trace_terms(&model, &frame, &state[0])?;
        let inst: f64 = terms.iter().sum();
        let avg = if t >= cfg.burn_in {
            counted += 1;
            for (s, v) in contrib_sum.iter_mut().zip(&terms) {
                *s += v;
            }
            contrib_sum.iter().sum::<f64>() / counted as f64
        } else {
            f64::NAN
        };
        samples.push(TraceSample {
            t,
            trace_inst: inst,
            trace_avg: avg,
        });
    }

    let window = window_start.map_or(0.0, |s| window_end - s);
    if counted == 0 {
        return Err(Error::invalid("burn_in", "no samples after burn-in"));
    }
    let mut q_hat = Vec::with_capacity(cfg.n);
    let mut acc = 0.0;
    for s in &contrib_sum {
        acc += s / counted as f64;
        q_hat.push(acc);
    }
    let exponents = log_growth
        .iter()
        .map(|g| if window > 0.0 { g / window } else { f64::NAN })
        .collect();
    let n_star = q_hat.iter().position(|&q| q < 0.0).map(|i| i + 1);
    let decreasing_after_n_star = match n_star {
        Some(m) => contrib_sum[m..].iter().all(|&c| c <= 0.0),
        None => false,
    };
    if n_star.is_none() {
        let msg = format!("q_hat(m) >= 0 for all m <= {}; n* not found", cfg.n);
        warn!("{msg}");
        warnings.push(msg);
    }
    warnings.push(format!(
        "sup over trajectories and frames replaced by one evolved frame averaged over t in [{}, {}]",
        window_start.unwrap_or(cfg.burn_in),
        window_end
    ));

    Ok(LyapunovReport {
        series: TraceSeries {
            n: cfg.n,
            burn_in: cfg.burn_in,
            window,
            base: format!(
                "{} form, nu={}, alpha={}, grid {}, dt={}, |g|={}",
                match sim.formulation {
                    Formulation::Velocity => "velocity",
                    Formulation::Vorticity => "vorticity",
                },
                sim.nu,
                sim.alpha,
                sim.grid,
                sim.dt,
                model.forcing_norm()
            ),
            samples,
        },
        q_hat,
        exponents,
        n_star,
        decreasing_after_n_star,
        enstrophy_bound_violations: violations,
        window,
        warnings,
    })
}
