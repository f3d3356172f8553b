//! Brute-force and sampling checks of the spectral and functional
//! inequalities used by the dimension estimates.

mod families;
mod spectrum;

use serde::Serialize;

use crate::error::Result;
use crate::spectral::{AlphaMetric, FieldRole, SpectralGrid};

pub use families::{
    l2_gram_max_eigenvalue, rho_linf_rhs, sample_suborthonormal, verify_lieb_thirring, verify_rho_l2,
    verify_rho_linf, FamilyCheck, FamilyKind, RhoLinfCheck, RhoProfile, SuborthonormalFamily,
    QUADRATURE_TOLERANCE,
};
pub use spectrum::{
    inverse_square_tail_bound, lattice_count, sum_inverse_below, verify_eigenvalue_bounds, verify_liyau,
    verify_spectral_sums, LatticeSpectrum, LiYauReport, SpectralSumsReport, SpectrumReport, SpectrumViolation,
};

/// Ratios above `1 − NEAR_SATURATION` are flagged.
pub const NEAR_SATURATION: f64 = 1e-3;

/// Summary of a sweep over seeded families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub target: String,
    pub range: String,
    pub worst_ratio: f64,
    pub witness_seed: Option<u64>,
    pub families: usize,
    pub unresolved: usize,
    pub near_saturation: Vec<u64>,
    pub pass: bool,
    pub checks: Vec<FamilyCheck>,
}

impl InequalityReport {
    fn from_checks(target: &str, range: String, checks: Vec<FamilyCheck>) -> Self {
        let worst = checks
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .map(|c| (c.ratio, c.seed));
        Self {
            target: target.to_string(),
            range,
            worst_ratio: worst.map_or(0.0, |w| w.0),
            witness_seed: worst.map(|w| w.1),
            families: checks.len(),
            unresolved: checks.iter().filter(|c| !c.resolution_ok).count(),
            near_saturation: checks
                .iter()
                .filter(|c| c.ratio > 1.0 - NEAR_SATURATION)
                .map(|c| c.seed)
                .collect(),
            pass: !checks.is_empty() && checks.iter().all(|c| c.holds),
            checks,
        }
    }
}

/// Sweep parameters shared by the family-based checks. Family `i` uses
/// seed `seed0 + i`, size `1 + i mod n_max` and `alphas[i mod len]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub grid: SpectralGrid,
    pub families: u64,
    pub n_max: usize,
    pub seed0: u64,
    pub alphas: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: SpectralGrid::with_resolution(64).expect("valid"),
            families: 100,
            n_max: 16,
            seed0: 0,
            alphas: vec![0.01, 0.1, 1.0],
        }
    }
}

impl SweepConfig {
    fn family(&self, i: u64) -> (u64, usize, AlphaMetric) {
        let alpha = self.alphas[(i as usize) % self.alphas.len()];
        (
            self.seed0 + i,
            1 + (i as usize) % self.n_max,
            AlphaMetric::new(alpha).expect("validated alphas"),
        )
    }

    fn range(&self) -> String {
        format!(
            "{} families, n <= {}, alpha in {:?}, grid {}",
            self.families, self.n_max, self.alphas, self.grid
        )
    }
}

/// Lieb–Thirring over the sweep; even families are α-orthonormal, odd
/// ones Gram-scaled.
pub fn sweep_lieb_thirring(cfg: &SweepConfig) -> Result<InequalityReport> {
    let mut checks = Vec::new();
    for i in 0..cfg.families {
        let (seed, n, metric) = cfg.family(i);
        let kind = if i % 2 == 0 {
            FamilyKind::AlphaOrthonormal
        } else {
            FamilyKind::GramScaled
        };
        let fam = sample_suborthonormal(cfg.grid, FieldRole::Velocity, n, kind, metric, seed)?;
        checks.push(verify_lieb_thirring(&fam)?);
    }
    Ok(InequalityReport::from_checks("lt", cfg.range(), checks))
}

/// `ρ` L₂ bound over the sweep (α-orthonormal velocity families).
pub fn sweep_rho_l2(cfg: &SweepConfig) -> Result<InequalityReport> {
    let mut checks = Vec::new();
    for i in 0..cfg.families {
        let (seed, n, metric) = cfg.family(i);
        let fam = sample_suborthonormal(cfg.grid, FieldRole::Velocity, n, FamilyKind::AlphaOrthonormal, metric, seed)?;
        checks.push(verify_rho_l2(&fam)?);
    }
    Ok(InequalityReport::from_checks("rho-l2", cfg.range(), checks))
}

/// `ρ` L∞ bound over the sweep (α-orthonormal scalar families), each at
/// every `Λ ∈ lambdas`; the stored ratio is the worst over `Λ`.
pub fn sweep_rho_linf(cfg: &SweepConfig, lambdas: std::ops::RangeInclusive<u64>) -> Result<InequalityReport> {
    let mut checks = Vec::new();
    for i in 0..cfg.families {
        let (seed, n, metric) = cfg.family(i);
        let fam = sample_suborthonormal(cfg.grid, FieldRole::Vorticity, n, FamilyKind::AlphaOrthonormal, metric, seed)?;
        let r = verify_rho_linf(&fam, lambdas.clone())?;
        let mut c = r.check;
        c.ratio = r.ratios.iter().copied().fold(0.0, f64::max);
        c.holds = c.ratio <= 1.0;
        checks.push(c);
    }
    let range = format!("{}, Lambda in {}..={}", cfg.range(), lambdas.start(), lambdas.end());
    Ok(InequalityReport::from_checks("rho-linf", range, checks))
}
