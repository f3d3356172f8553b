use std::fmt::Write as _;

use serde::Serialize;

use super::{dissipation_rate, SimConfig};
use crate::spectral::{ops, AlphaMetric, SpectralField, TORUS_AREA};

/// Energy quantities of one sampled state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagnosticSample {
    pub t: f64,
    /// `‖u‖²`
    pub energy_l2: f64,
    /// `‖∇u‖²`
    pub enstrophy: f64,
    /// `‖u‖_α² = ‖u‖² + α‖∇u‖²`
    pub energy_alpha: f64,
    /// `(g, u)`
    pub forcing_work: f64,
    /// Cesàro mean of `‖∇u‖²` over the samples so far.
    pub avg_enstrophy: f64,
    /// Cesàro mean of `‖∇u‖` over the samples so far.
    pub avg_grad_l1: f64,
}

/// Sampled diagnostics of one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub nu: f64,
    pub alpha: f64,
    pub forcing_norm: f64,
    pub samples: Vec<DiagnosticSample>,
}

impl DiagnosticsSeries {
    pub fn new(nu: f64, alpha: f64, forcing_norm: f64) -> Self {
        Self {
            nu,
            alpha,
            forcing_norm,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, u: &SpectralField, g: &SpectralField, metric: AlphaMetric) {
        let energy_l2 = u.l2_norm_sq();
        let enstrophy = u.grad_norm_sq();
        let n = self.samples.len() as f64;
        let (prev_sq, prev_l1) = self
            .samples
            .last()
            .map_or((0.0, 0.0), |s| (s.avg_enstrophy, s.avg_grad_l1));
        self.samples.push(DiagnosticSample {
            t,
            energy_l2,
            enstrophy,
            energy_alpha: u.alpha_norm_sq(metric),
            forcing_work: ops::alpha_inner(g, u, AlphaMetric::l2()).unwrap_or(f64::NAN),
            avg_enstrophy: (prev_sq * n + enstrophy) / (n + 1.0),
            avg_grad_l1: (prev_l1 * n + enstrophy.sqrt()) / (n + 1.0),
        });
    }

    /// `G = ‖g‖/(λ₁ν²)`.
    pub fn grashof(&self) -> f64 {
        self.forcing_norm / (self.nu * self.nu)
    }

    /// `𝒢 = ‖g‖|𝕋²|/ν²`.
    pub fn grashof_area(&self) -> f64 {
        self.forcing_norm * TORUS_AREA / (self.nu * self.nu)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t,energy_l2,enstrophy,energy_alpha,avg_enstrophy,avg_grad_l1,grashof_G,grashof_calG\n");
        let (g, cg) = (self.grashof(), self.grashof_area());
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                s.t, s.energy_l2, s.enstrophy, s.energy_alpha, s.avg_enstrophy, s.avg_grad_l1, g, cg
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DissipativeReport {
    pub gamma: f64,
    /// `(α+1)‖g‖²/ν²`, the large-time level of the bound.
    pub absorbing_level: f64,
    /// `max (lhs − rhs)` over samples; nonpositive when the bound holds.
    pub max_violation: f64,
    /// `max (lhs − rhs)/rhs`.
    pub max_relative_violation: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `‖u(t)‖_α² ≤ ‖u(0)‖_α² e^{−γt} + (α+1)‖g‖²ν⁻²(1 − e^{−γt})` at
/// every sample, with relative slack `tolerance`.
pub fn check_dissipative_bound(series: &DiagnosticsSeries, cfg: &SimConfig) -> DissipativeReport {
    let tolerance = 1e-9;
    let gamma = dissipation_rate(cfg.nu, cfg.alpha);
    let level = (cfg.alpha + 1.0) * series.forcing_norm.powi(2) / (cfg.nu * cfg.nu);
    let e0 = series.samples.first().map_or(0.0, |s| s.energy_alpha);
    let mut report = DissipativeReport {
        gamma,
        absorbing_level: level,
        max_violation: f64::NEG_INFINITY,
        max_relative_violation: f64::NEG_INFINITY,
        worst_time: 0.0,
        tolerance,
        holds: true,
    };
    for s in &series.samples {
        let decay = (-gamma * s.t).exp();
        let rhs = e0 * decay + level * (1.0 - decay);
        let v = s.energy_alpha - rhs;
        let rel = if rhs > 0.0 { v / rhs } else if v > 0.0 { f64::INFINITY } else { 0.0 };
        if v > report.max_violation {
            report.max_violation = v;
            report.worst_time = s.t;
        }
        report.max_relative_violation = report.max_relative_violation.max(rel);
        if v > tolerance * rhs.max(f64::MIN_POSITIVE) && v > 1e-300 {
            report.holds = false;
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeAverageReport {
    pub burn_in: f64,
    /// Length of the averaging window after burn-in.
    pub window: f64,
    pub samples_used: usize,
    /// Mean of `‖∇u‖²` over the window.
    pub avg_enstrophy: f64,
    /// `‖g‖²/ν²`
    pub enstrophy_bound: f64,
    /// Mean of `‖∇u‖` over the window.
    pub avg_grad: f64,
    /// `‖g‖/ν`
    pub grad_bound: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Finite-window means stand in for the limsup.
    pub warnings: Vec<String>,
}

/// [`check_time_averages_with`] using burn-in `5/γ` and relative slack `1e-6`.
pub fn check_time_averages(series: &DiagnosticsSeries) -> TimeAverageReport {
    let gamma = dissipation_rate(series.nu, series.alpha);
    check_time_averages_with(series, 5.0 / gamma, 1e-6)
}

/// Compares the Cesàro means of `‖∇u‖²` and `‖∇u‖` over samples with
/// `t ≥ burn_in` against `‖g‖²/ν²` and `‖g‖/ν`.
pub fn check_time_averages_with(
    series: &DiagnosticsSeries,
    burn_in: f64,
    tolerance: f64,
) -> TimeAverageReport {
    let gamma = dissipation_rate(series.nu, series.alpha);
    let used: Vec<_> = series.samples.iter().filter(|s| s.t >= burn_in).collect();
    let n = used.len();
    let mean = |f: &dyn Fn(&DiagnosticSample) -> f64| {
        if n == 0 {
            f64::NAN
        } else {
            used.iter().map(|s| f(s)).sum::<f64>() / n as f64
        }
    };
    let avg_enstrophy = mean(&|s| s.enstrophy);
    let avg_grad = mean(&|s| s.enstrophy.sqrt());
    let (first, last) = match (used.first(), used.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => (burn_in, burn_in),
    };
    let window = last - first;
    let enstrophy_bound = (series.forcing_norm / series.nu).powi(2);
    let grad_bound = series.forcing_norm / series.nu;

    let mut warnings = vec![format!(
        "limsup approximated by a finite mean over t in [{first}, {last}]"
    )];
    if window < 10.0 / gamma {
        warnings.push(format!(
            "averaging window {window} is shorter than 10/gamma = {}",
            10.0 / gamma
        ));
    }
    let holds = n > 0
        && avg_enstrophy <= enstrophy_bound * (1.0 + tolerance) + 1e-300
        && avg_grad <= grad_bound * (1.0 + tolerance) + 1e-300;
    TimeAverageReport {
        burn_in,
        window,
        samples_used: n,
        avg_enstrophy,
        enstrophy_bound,
        avg_grad,
        grad_bound,
        tolerance,
        holds,
        warnings,
    }
}
