//! Fourier representation of zero-mean fields on the torus `[0, 2π]²`.
//!
//! A field is stored as its complex Fourier coefficients on the integer
//! lattice, `u(x) = Σ_k û(k) e^{i k·x}`, laid out in an `n × n` array with
//! FFT ordering. Only modes with `|k1|, |k2| ≤ cutoff` are ever populated;
//! with `3·cutoff < n` every quadratic product evaluated on the `n × n`
//! physical grid is free of aliasing in the retained band.

mod fft;
pub mod io;
pub mod ops;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fft::{Fft2, PhysicalVelocity};
pub use ops::{
    alpha_inner, bilinear, curl_and_stream, helmholtz_solve, leray_project, rot, stokes_apply,
};

/// Area of the torus `[0, 2π]²`.
pub const TORUS_AREA: f64 = 4.0 * PI * PI;

/// A wave vector on `ℤ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveVector {
    pub k1: i64,
    pub k2: i64,
}

impl WaveVector {
    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    /// `|k|²`, the torus Laplacian eigenvalue of this mode.
    pub fn norm_sq(self) -> i64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    pub fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    pub fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }

    /// `k^⊥ = (-k2, k1)`.
    pub fn perp(self) -> Self {
        Self::new(-self.k2, self.k1)
    }

    /// True for one representative of each `±k` pair.
    pub fn in_upper_half(self) -> bool {
        self.k1 > 0 || (self.k1 == 0 && self.k2 > 0)
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// Resolution and dealiasing band of a spectral discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralGrid {
    resolution: usize,
    cutoff: usize,
}

impl SpectralGrid {
    /// `resolution` must be even and at least 8; `cutoff` must satisfy
    /// `3·cutoff < resolution` (the 2/3 rule, strict so that no product
    /// aliases back onto a retained mode).
    pub fn new(resolution: usize, cutoff: usize) -> Result<Self> {
        if resolution < 8 || resolution % 2 != 0 {
            return Err(Error::invalid(
                "resolution_n",
                format!("must be even and >= 8, got {resolution}"),
            ));
        }
        if cutoff == 0 || 3 * cutoff >= resolution {
            return Err(Error::invalid(
                "dealias_cutoff",
                format!(
                    "must satisfy 1 <= cutoff and 3*cutoff < resolution_n = {resolution}, got {cutoff}"
                ),
            ));
        }
        Ok(Self { resolution, cutoff })
    }

    /// Grid with the largest admissible cutoff, `(n - 1) / 3`.
    pub fn with_resolution(resolution: usize) -> Result<Self> {
        Self::new(resolution, resolution.saturating_sub(1) / 3)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Whether `k` is a nonzero mode inside the dealiasing band.
    pub fn retains(&self, k: WaveVector) -> bool {
        let c = self.cutoff as i64;
        !k.is_zero() && k.k1.abs() <= c && k.k2.abs() <= c
    }

    /// Flat array index of `k` (FFT ordering), for `|k_i| < n/2`.
    pub(crate) fn index(&self, k: WaveVector) -> usize {
        let n = self.resolution as i64;
        let i = k.k1.rem_euclid(n) as usize;
        let j = k.k2.rem_euclid(n) as usize;
        i * self.resolution + j
    }

    /// All retained modes, in a fixed deterministic order.
    pub fn modes(&self) -> impl Iterator<Item = WaveVector> + '_ {
        let c = self.cutoff as i64;
        (-c..=c)
            .flat_map(move |k1| (-c..=c).map(move |k2| WaveVector::new(k1, k2)))
            .filter(|k| !k.is_zero())
    }

    /// Retained modes with `k` in the upper half-plane.
    pub fn half_modes(&self) -> impl Iterator<Item = WaveVector> + '_ {
        self.modes().filter(|k| k.in_upper_half())
    }

    /// Largest retained `|k|` (along a diagonal).
    pub fn k_max(&self) -> f64 {
        (2.0 * (self.cutoff * self.cutoff) as f64).sqrt()
    }

    pub(crate) fn len(&self) -> usize {
        self.resolution * self.resolution
    }
}

impl fmt::Display for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{0}x{0} (cutoff {1})", self.resolution, self.cutoff)
    }
}

/// Whether a field is a 2-component velocity or a scalar vorticity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldRole {
    #[serde(rename = "velocity2d")]
    Velocity,
    #[serde(rename = "vorticity2d")]
    Vorticity,
}

impl FieldRole {
    pub fn components(self) -> usize {
        match self {
            FieldRole::Velocity => 2,
            FieldRole::Vorticity => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldRole::Velocity => "velocity2d",
            FieldRole::Vorticity => "vorticity2d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "velocity2d" => Some(FieldRole::Velocity),
            "vorticity2d" => Some(FieldRole::Vorticity),
            _ => None,
        }
    }
}

/// The weighted product `(u, v)_α = (u, v) + α (∇u, ∇v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaMetric {
    alpha: f64,
}

impl AlphaMetric {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and >= 0, got {alpha}"),
            ));
        }
        Ok(Self { alpha })
    }

    /// Plain `L₂` product.
    pub const fn l2() -> Self {
        Self { alpha: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Symbol of `1 + αA` on a mode with `|k|² = ksq`.
    pub fn weight(&self, ksq: f64) -> f64 {
        1.0 + self.alpha * ksq
    }
}

/// Fourier coefficients of a real, zero-mean field on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: SpectralGrid,
    role: FieldRole,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: SpectralGrid, role: FieldRole) -> Self {
        Self {
            grid,
            role,
            data: vec![Complex64::new(0.0, 0.0); role.components() * grid.len()],
        }
    }

    pub fn grid(&self) -> SpectralGrid {
        self.grid
    }

    pub fn role(&self) -> FieldRole {
        self.role
    }

    pub fn components(&self) -> usize {
        self.role.components()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.data[c * len..(c + 1) * len]
    }

    /// Coefficient of component `c` at `k`; zero outside the band.
    pub fn coeff(&self, c: usize, k: WaveVector) -> Complex64 {
        if self.grid.retains(k) {
            self.component(c)[self.grid.index(k)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Sets `û_c(k) = value` and `û_c(-k) = conj(value)`.
    pub fn set_mode(&mut self, c: usize, k: WaveVector, value: Complex64) -> Result<()> {
        if !self.grid.retains(k) {
            return Err(Error::invalid(
                "wave_vector",
                format!("{k} is zero or outside the band of {}", self.grid),
            ));
        }
        let (ip, im) = (self.grid.index(k), self.grid.index(k.neg()));
        let comp = self.component_mut(c);
        comp[ip] = value;
        comp[im] = value.conj();
        Ok(())
    }

    /// `(sin(m x₂), 0)·amplitude` for velocity, `sin(m x₂)·amplitude` for
    /// vorticity.
    pub fn shear(grid: SpectralGrid, role: FieldRole, wavenumber: i64, amplitude: f64) -> Result<Self> {
        let mut f = Self::zeros(grid, role);
        // sin(m x) = (e^{imx} - e^{-imx}) / 2i
        f.set_mode(0, WaveVector::new(0, wavenumber), Complex64::new(0.0, -0.5 * amplitude))?;
        Ok(f)
    }

    /// Gaussian coefficients with amplitude `|k|^{-decay}`, Leray-projected
    /// for velocity fields. Deterministic in `seed`.
    pub fn random(grid: SpectralGrid, role: FieldRole, seed: u64, decay: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = Self::zeros(grid, role);
        let modes: Vec<_> = grid.half_modes().collect();
        for k in modes {
            let amp = (k.norm_sq() as f64).powf(-0.5 * decay);
            for c in 0..role.components() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                f.set_mode(c, k, Complex64::new(re, im) * amp)
                    .expect("half_modes yields retained modes");
            }
        }
        if role == FieldRole::Velocity {
            ops::project_in_place(&mut f);
        }
        f
    }

    /// Applies a real Fourier multiplier `m(|k|²)` to every retained mode.
    pub fn apply_multiplier(&mut self, m: impl Fn(f64) -> f64) {
        let grid = self.grid;
        let modes: Vec<_> = grid.modes().collect();
        for c in 0..self.components() {
            let comp = self.component_mut(c);
            for &k in &modes {
                comp[grid.index(k)] *= m(k.norm_sq() as f64);
            }
        }
    }

    pub fn with_multiplier(&self, m: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.apply_multiplier(m);
        out
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|z| *z *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        debug_assert!(self.grid == x.grid && self.role == x.role);
        for (y, xv) in self.data.iter_mut().zip(&x.data) {
            *y += xv * a;
        }
    }

    pub fn set_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Σ_k w(|k|²) Re(û(k)·conj(v̂(k)))` over components, times `|𝕋²|`.
    pub(crate) fn weighted_dot(&self, other: &SpectralField, w: impl Fn(f64) -> f64) -> f64 {
        let grid = self.grid;
        let mut acc = 0.0;
        for k in grid.modes() {
            let idx = grid.index(k);
            let wk = w(k.norm_sq() as f64);
            for c in 0..self.components() {
                let (a, b) = (self.component(c)[idx], other.component(c)[idx]);
                acc += wk * (a.re * b.re + a.im * b.im);
            }
        }
        TORUS_AREA * acc
    }

    /// `‖u‖²` in `L₂(𝕋²)`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_dot(self, |_| 1.0)
    }

    /// `‖∇u‖²`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.weighted_dot(self, |ksq| ksq)
    }

    /// `‖u‖_α²`.
    pub fn alpha_norm_sq(&self, metric: AlphaMetric) -> f64 {
        self.weighted_dot(self, |ksq| metric.weight(ksq))
    }

    /// Largest `|û(-k) - conj(û(k))|` over retained modes.
    pub fn reality_defect(&self) -> f64 {
        let grid = self.grid;
        let mut worst: f64 = 0.0;
        for c in 0..self.components() {
            let comp = self.component(c);
            for k in grid.half_modes() {
                let d = comp[grid.index(k.neg())] - comp[grid.index(k)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `max_k |k·û(k)| / |k|` relative to the largest coefficient; zero for
    /// scalar fields.
    pub fn divergence_defect(&self) -> f64 {
        if self.role != FieldRole::Velocity {
            return 0.0;
        }
        let grid = self.grid;
        let (u1, u2) = (self.component(0), self.component(1));
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for k in grid.modes() {
            let idx = grid.index(k);
            let div = u1[idx] * k.k1 as f64 + u2[idx] * k.k2 as f64;
            worst = worst.max(div.norm() / (k.norm_sq() as f64).sqrt());
            scale = scale.max(u1[idx].norm().max(u2[idx].norm()));
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Largest coefficient magnitude anywhere in the array (including
    /// modes outside the band, which must stay zero).
    pub fn max_abs_coeff(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        if self.role != other.role {
            return Err(Error::RoleMismatch {
                expected: self.role,
                found: other.role,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_role(&self, role: FieldRole) -> Result<()> {
        if self.role != role {
            return Err(Error::RoleMismatch {
                expected: role,
                found: self.role,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_enforces_two_thirds_rule() {
        assert!(SpectralGrid::new(64, 21).is_ok());
        assert!(SpectralGrid::new(48, 16).is_err());
        assert!(SpectralGrid::new(7, 2).is_err());
        assert!(SpectralGrid::new(6, 1).is_err());
        assert_eq!(SpectralGrid::with_resolution(64).unwrap().cutoff(), 21);
        assert_eq!(SpectralGrid::with_resolution(8).unwrap().cutoff(), 2);
    }

    #[test]
    fn mode_count() {
        let g = SpectralGrid::new(16, 5).unwrap();
        assert_eq!(g.modes().count(), 11 * 11 - 1);
        assert_eq!(g.half_modes().count(), (11 * 11 - 1) / 2);
    }

    #[test]
    fn shear_norm() {
        let g = SpectralGrid::with_resolution(16).unwrap();
        let u = SpectralField::shear(g, FieldRole::Velocity, 1, 1.0).unwrap();
        // ∫ sin² over [0,2π]² = 2π²
        assert!((u.l2_norm_sq() - 2.0 * PI * PI).abs() < 1e-12);
        assert!((u.grad_norm_sq() - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn random_field_is_real_and_solenoidal() {
        let g = SpectralGrid::with_resolution(32).unwrap();
        let u = SpectralField::random(g, FieldRole::Velocity, 7, 3.0);
        assert!(u.reality_defect() < 1e-15);
        assert!(u.divergence_defect() < 1e-14);
        assert_eq!(u, SpectralField::random(g, FieldRole::Velocity, 7, 3.0));
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(AlphaMetric::new(-1.0).is_err());
        assert!(AlphaMetric::new(f64::NAN).is_err());
    }
}
