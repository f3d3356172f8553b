//! Time integration of the Navier–Stokes–Voight system on `𝕋²`,
//!
//! ```text
//! ∂ₜu + νA(1+αA)⁻¹u + (1+αA)⁻¹B(u,u) = (1+αA)⁻¹g,
//! ```
//!
//! and of its vorticity form
//!
//! ```text
//! ∂ₜω + (1−αΔ)⁻¹(u·∇ω) − νΔ(1−αΔ)⁻¹ω = (1−αΔ)⁻¹ rot g,   u = ∇^⊥Δ⁻¹ω.
//! ```

mod diagnostics;
mod integrate;

use std::path::PathBuf;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    io, ops, AlphaMetric, Fft2, FieldRole, PhysicalVelocity, SpectralField, SpectralGrid,
    WaveVector,
};

pub use diagnostics::{
    check_dissipative_bound, check_time_averages, check_time_averages_with, DiagnosticSample,
    DiagnosticsSeries, DissipativeReport, TimeAverageReport,
};
pub use integrate::{energy_balance_residual, integrate, Scheme, Stepper, Trajectory};

/// Right-hand side `g` of the momentum equation.
#[derive(Clone, Debug, PartialEq)]
pub enum ForcingSpec {
    None,
    /// `g = amplitude·(sin(m x₂), 0)`.
    Shear { amplitude: f64, wavenumber: i64 },
    /// Explicit coefficients; `-k` is filled in by conjugation and the
    /// result is Leray-projected.
    Modes(Vec<ForcingMode>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForcingMode {
    pub k: WaveVector,
    pub amplitude: [Complex64; 2],
}

impl ForcingSpec {
    pub fn build(&self, grid: SpectralGrid) -> Result<SpectralField> {
        match self {
            ForcingSpec::None => Ok(SpectralField::zeros(grid, FieldRole::Velocity)),
            ForcingSpec::Shear {
                amplitude,
                wavenumber,
            } => SpectralField::shear(grid, FieldRole::Velocity, *wavenumber, *amplitude),
            ForcingSpec::Modes(modes) => {
                let mut g = SpectralField::zeros(grid, FieldRole::Velocity);
                let mut seen = std::collections::HashSet::new();
                for m in modes {
                    if !seen.insert(m.k) || !seen.insert(m.k.neg()) {
                        return Err(Error::invalid(
                            "forcing",
                            format!("mode {} listed twice (possibly as -k)", m.k),
                        ));
                    }
                    for (c, a) in m.amplitude.iter().enumerate() {
                        g.set_mode(c, m.k, *a)?;
                    }
                }
                ops::leray_project(&g)
            }
        }
    }
}

/// Source of the initial state.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `amplitude·(sin(m x₂), 0)`.
    Shear { amplitude: f64, wavenumber: i64 },
    /// Gaussian coefficients decaying like `|k|^{-3}`, projected and scaled
    /// to `‖u₀‖ = norm`.
    Random { seed: u64, norm: f64 },
    /// A snapshot file (velocity or vorticity role).
    File(PathBuf),
    Field(SpectralField),
}

impl InitialCondition {
    pub fn build(&self, grid: SpectralGrid) -> Result<SpectralField> {
        let u = match self {
            InitialCondition::Zero => SpectralField::zeros(grid, FieldRole::Velocity),
            InitialCondition::Shear {
                amplitude,
                wavenumber,
            } => SpectralField::shear(grid, FieldRole::Velocity, *wavenumber, *amplitude)?,
            InitialCondition::Random { seed, norm } => {
                let mut u = SpectralField::random(grid, FieldRole::Velocity, *seed, 3.0);
                let cur = u.l2_norm_sq().sqrt();
                if cur > 0.0 {
                    u.scale(norm / cur);
                }
                u
            }
            InitialCondition::File(path) => {
                let file = std::fs::File::open(path)?;
                let (f, _) = io::read_snapshot(std::io::BufReader::new(file))?;
                match f.role() {
                    FieldRole::Velocity => ops::leray_project(&f)?,
                    FieldRole::Vorticity => ops::curl_and_stream(&f)?,
                }
            }
            InitialCondition::Field(f) => match f.role() {
                FieldRole::Velocity => f.clone(),
                FieldRole::Vorticity => ops::curl_and_stream(f)?,
            },
        };
        if u.grid() != grid {
            return Err(Error::GridMismatch {
                left: u.grid().to_string(),
                right: grid.to_string(),
            });
        }
        Ok(u)
    }
}

/// Which unknown is advanced in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Formulation {
    #[default]
    Velocity,
    Vorticity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub nu: f64,
    pub alpha: f64,
    pub grid: SpectralGrid,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: ForcingSpec,
    pub initial: InitialCondition,
    pub sample_every: usize,
    /// Keep a copy of the state every this many steps.
    pub snapshot_every: Option<usize>,
    pub scheme: Scheme,
    pub formulation: Formulation,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            alpha: 1.0,
            grid: SpectralGrid::with_resolution(64).expect("64 is a valid resolution"),
            dt: 1e-3,
            t_end: 1.0,
            forcing: ForcingSpec::None,
            initial: InitialCondition::Zero,
            sample_every: 10,
            snapshot_every: None,
            scheme: Scheme::Auto,
            formulation: Formulation::Velocity,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::invalid("nu", format!("must be > 0, got {}", self.nu)));
        }
        AlphaMetric::new(self.alpha)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::invalid("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be >= 1"));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::invalid("snapshot_every", "must be >= 1"));
        }
        Ok(())
    }

    pub fn metric(&self) -> AlphaMetric {
        AlphaMetric::new(self.alpha).expect("validated")
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// The NSV vector field with its forcing and transform workspace.
#[derive(Clone, Debug)]
pub struct NsvModel {
    nu: f64,
    metric: AlphaMetric,
    grid: SpectralGrid,
    forcing: SpectralField,
    filtered_forcing: SpectralField,
    filtered_rot_forcing: SpectralField,
    fft: Fft2,
}

impl NsvModel {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let g = cfg.forcing.build(cfg.grid)?;
        Self::with_forcing(cfg.nu, cfg.metric(), g)
    }

    pub fn with_forcing(nu: f64, metric: AlphaMetric, forcing: SpectralField) -> Result<Self> {
        forcing.expect_role(FieldRole::Velocity)?;
        let grid = forcing.grid();
        let filtered_forcing = ops::helmholtz_solve(&forcing, metric);
        let filtered_rot_forcing = ops::helmholtz_solve(&ops::rot(&forcing)?, metric);
        Ok(Self {
            nu,
            metric,
            grid,
            forcing,
            filtered_forcing,
            filtered_rot_forcing,
            fft: Fft2::for_grid(grid),
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn metric(&self) -> AlphaMetric {
        self.metric
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// Symbol of the linear part, `−ν|k|²/(1+α|k|²)`.
    pub fn linear_symbol(&self, ksq: f64) -> f64 {
        -self.nu * ksq / self.metric.weight(ksq)
    }

    /// `(1+αA)⁻¹(g − B(u,u))`.
    pub fn nonlinear_velocity(&self, u: &SpectralField) -> Result<SpectralField> {
        let mut out = ops::bilinear_with(&self.fft, u, u)?;
        out.scale(-1.0);
        out.apply_multiplier(|ksq| 1.0 / self.metric.weight(ksq));
        out.axpy(1.0, &self.filtered_forcing);
        Ok(out)
    }

    /// Same as [`Self::nonlinear_velocity`] given a pre-sampled `u`.
    pub(crate) fn nonlinear_velocity_phys(&self, pu: &PhysicalVelocity) -> SpectralField {
        let mut out = ops::bilinear_sum(&self.fft, self.grid, &[(pu, pu)]);
        out.scale(-1.0);
        out.apply_multiplier(|ksq| 1.0 / self.metric.weight(ksq));
        out.axpy(1.0, &self.filtered_forcing);
        out
    }

    /// `−νA(1+αA)⁻¹u − (1+αA)⁻¹B(u,u) + (1+αA)⁻¹g`.
    pub fn rhs_velocity(&self, u: &SpectralField) -> Result<SpectralField> {
        self.check_grid(u)?;
        u.expect_role(FieldRole::Velocity)?;
        let mut out = self.nonlinear_velocity(u)?;
        out.axpy(1.0, &u.with_multiplier(|ksq| self.linear_symbol(ksq)));
        Ok(out)
    }

    /// `(1−αΔ)⁻¹(rot g − u·∇ω)` with `u = ∇^⊥Δ⁻¹ω`.
    pub fn nonlinear_vorticity(&self, omega: &SpectralField) -> Result<SpectralField> {
        let u = ops::curl_and_stream(omega)?;
        let pu = [self.fft.physical(&u, 0), self.fft.physical(&u, 1)];
        let mut out = ops::advect_scalar(&self.fft, &pu, omega);
        out.scale(-1.0);
        out.apply_multiplier(|ksq| 1.0 / self.metric.weight(ksq));
        out.axpy(1.0, &self.filtered_rot_forcing);
        Ok(out)
    }

    pub fn rhs_vorticity(&self, omega: &SpectralField) -> Result<SpectralField> {
        self.check_grid(omega)?;
        omega.expect_role(FieldRole::Vorticity)?;
        let mut out = self.nonlinear_vorticity(omega)?;
        out.axpy(1.0, &omega.with_multiplier(|ksq| self.linear_symbol(ksq)));
        Ok(out)
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: f.grid().to_string(),
            });
        }
        Ok(())
    }

    /// `‖g‖` in `L₂(𝕋²)`.
    pub fn forcing_norm(&self) -> f64 {
        self.forcing.l2_norm_sq().sqrt()
    }

    /// Largest pointwise speed on the physical grid.
    pub fn max_speed(&self, u: &SpectralField) -> f64 {
        let (a, b) = (self.fft.physical(u, 0), self.fft.physical(u, 1));
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x * x + y * y).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Velocity right-hand side for a configuration (builds the model).
pub fn rhs_velocity(u: &SpectralField, cfg: &SimConfig) -> Result<SpectralField> {
    NsvModel::new(cfg)?.rhs_velocity(u)
}

/// Vorticity right-hand side for a configuration (builds the model).
pub fn rhs_vorticity(omega: &SpectralField, cfg: &SimConfig) -> Result<SpectralField> {
    NsvModel::new(cfg)?.rhs_vorticity(omega)
}

/// `γ = νλ₁/(αλ₁+1)` with `λ₁ = 1`.
pub fn dissipation_rate(nu: f64, alpha: f64) -> f64 {
    nu / (alpha + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::rot;

    fn cfg(alpha: f64, forcing: ForcingSpec) -> SimConfig {
        SimConfig {
            alpha,
            grid: SpectralGrid::with_resolution(16).unwrap(),
            forcing,
            ..SimConfig::default()
        }
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        let mut d = a.clone();
        d.axpy(-1.0, b);
        d.max_abs_coeff()
    }

    #[test]
    fn single_mode_rhs() {
        for (nu, alpha) in [(1.0, 1.0), (0.3, 0.0), (2.0, 0.25)] {
            let mut c = cfg(alpha, ForcingSpec::None);
            c.nu = nu;
            let u = SpectralField::shear(c.grid, FieldRole::Velocity, 1, 0.7).unwrap();
            let r = rhs_velocity(&u, &c).unwrap();
            assert!(max_diff(&r, &u.scaled(-nu / (1.0 + alpha))) < 1e-15);
        }
    }

    #[test]
    fn zero_state_rhs_is_filtered_forcing() {
        let c = cfg(0.5, ForcingSpec::Shear { amplitude: 2.0, wavenumber: 2 });
        let u = SpectralField::zeros(c.grid, FieldRole::Velocity);
        let r = rhs_velocity(&u, &c).unwrap();
        let g = c.forcing.build(c.grid).unwrap();
        assert!(max_diff(&r, &g.scaled(1.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn alpha_zero_is_navier_stokes() {
        let c = cfg(0.0, ForcingSpec::Shear { amplitude: 1.0, wavenumber: 1 });
        let u = SpectralField::random(c.grid, FieldRole::Velocity, 4, 2.0);
        let r = rhs_velocity(&u, &c).unwrap();
        let mut expect = ops::stokes_apply(&u, 2.0).scaled(-c.nu);
        expect.axpy(-1.0, &ops::bilinear(&u, &u).unwrap());
        expect.axpy(1.0, &c.forcing.build(c.grid).unwrap());
        assert!(max_diff(&r, &expect) < 1e-13);
    }

    #[test]
    fn vorticity_single_mode_and_intertwining() {
        let c = cfg(1.5, ForcingSpec::Shear { amplitude: 0.4, wavenumber: 3 });
        let mut w = SpectralField::zeros(c.grid, FieldRole::Vorticity);
        w.set_mode(0, WaveVector::new(1, 2), Complex64::new(0.3, -0.1)).unwrap();
        let model = NsvModel::new(&cfg(1.5, ForcingSpec::None)).unwrap();
        let r = model.rhs_vorticity(&w).unwrap();
        assert!(max_diff(&r, &w.scaled(-5.0 / (1.0 + 1.5 * 5.0))) < 1e-15);

        for seed in 0..4 {
            let u = SpectralField::random(c.grid, FieldRole::Velocity, seed, 2.0);
            let lhs = rot(&rhs_velocity(&u, &c).unwrap()).unwrap();
            let rhs = rhs_vorticity(&rot(&u).unwrap(), &c).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn shear_vorticity_decays_at_voight_rate() {
        let c = cfg(1.0, ForcingSpec::None);
        let u = SpectralField::shear(c.grid, FieldRole::Velocity, 1, 1.0).unwrap();
        let w = rot(&u).unwrap();
        let r = rhs_vorticity(&w, &c).unwrap();
        assert!(max_diff(&r, &w.scaled(-0.5)) < 1e-15);
    }

    #[test]
    fn forcing_modes_validated() {
        let g = SpectralGrid::with_resolution(16).unwrap();
        let m = |k1, k2| ForcingMode {
            k: WaveVector::new(k1, k2),
            amplitude: [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let f = ForcingSpec::Modes(vec![m(1, 0)]).build(g).unwrap();
        assert!(f.divergence_defect() < 1e-15);
        assert_eq!(f.coeff(0, WaveVector::new(1, 0)), Complex64::new(0.0, 0.0));
        assert!(ForcingSpec::Modes(vec![m(1, 0), m(-1, 0)]).build(g).is_err());
        assert!(ForcingSpec::Modes(vec![m(0, 0)]).build(g).is_err());
    }
}
