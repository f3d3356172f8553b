//! Linearised NSV flow, α-orthonormal tangent frames and the trace
//! functionals `Σ_j (L θ_j, θ_j)_α` that control volume contraction.

mod lyapunov;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{NsvModel, SimConfig};
use crate::error::{Error, Result};
use crate::spectral::{ops, AlphaMetric, FieldRole, PhysicalVelocity, SpectralField, SpectralGrid, WaveVector};

pub use lyapunov::{q_n_estimate, FrameInit, LyapunovConfig, LyapunovReport, TraceSample, TraceSeries};

/// Largest Gram deviation accepted by [`trace_n`].
pub const STALE_FRAME_TOLERANCE: f64 = 1e-6;

/// Pointwise constant in `|Σ_j θ_j·∇u·θ_j| ≤ c₂ ρ |∇u|` for 2D
/// divergence-free `u`.
pub const C2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `n` fields of one role, intended to be orthonormal in `(·,·)_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    vectors: Vec<SpectralField>,
    metric: AlphaMetric,
}

impl TangentFrame {
    /// Wraps `vectors` as given; nothing is orthonormalised.
    pub fn new(vectors: Vec<SpectralField>, metric: AlphaMetric) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::invalid("n", "a frame needs at least one vector"));
        };
        for v in &vectors[1..] {
            first.check_same(v)?;
        }
        Ok(Self { vectors, metric })
    }

    /// The first `n` real Fourier modes ordered by `|k|²`, α-normalised.
    /// For each `k` in the upper half plane the pair `cos(k·x)`, `sin(k·x)`
    /// is used (times `k^⊥/|k|` for velocity).
    pub fn eigenmodes(grid: SpectralGrid, role: FieldRole, n: usize, metric: AlphaMetric) -> Result<Self> {
        let mut modes: Vec<WaveVector> = grid.half_modes().collect();
        modes.sort_by_key(|k| (k.norm_sq(), k.k1, k.k2));
        let mut vectors = Vec::with_capacity(n);
        'outer: for k in modes {
            for phase in [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.5)] {
                if vectors.len() == n {
                    break 'outer;
                }
                vectors.push(real_mode(grid, role, k, phase));
            }
        }
        if vectors.len() < n {
            return Err(Error::invalid(
                "n",
                format!("grid {grid} has only {} real modes", vectors.len()),
            ));
        }
        let mut frame = Self::new(vectors, metric)?;
        for v in &mut frame.vectors {
            let norm = v.alpha_norm_sq(metric).sqrt();
            v.scale(1.0 / norm);
        }
        Ok(frame)
    }

    /// Random fields (Gaussian coefficients decaying like `|k|^{-1}`), then
    /// α-orthonormalised.
    pub fn random(grid: SpectralGrid, role: FieldRole, n: usize, seed: u64, metric: AlphaMetric) -> Result<Self> {
        let vectors = (0..n as u64)
            .map(|j| SpectralField::random(grid, role, seed.wrapping_mul(1_000_003).wrapping_add(j), 1.0))
            .collect();
        alpha_gram_schmidt(&Self::new(vectors, metric)?)
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SpectralField] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<SpectralField> {
        self.vectors
    }

    pub fn metric(&self) -> AlphaMetric {
        self.metric
    }

    pub fn role(&self) -> FieldRole {
        self.vectors[0].role()
    }

    pub fn grid(&self) -> SpectralGrid {
        self.vectors[0].grid()
    }

    /// Gram matrix in `(·,·)_α`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = ops::alpha_inner(&self.vectors[i], &self.vectors[j], self.metric)
                    .expect("frame vectors share grid and role");
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// `max |G − I|` entrywise.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.gram();
        let n = self.n();
        (g - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// `Σ_j ‖∇θ_j‖²`.
    pub fn enstrophy_sum(&self) -> f64 {
        self.vectors.iter().map(SpectralField::grad_norm_sq).sum()
    }

    /// Pointwise `ρ(x) = Σ_j |θ_j(x)|²` on the `m × m` grid of `fft`.
    pub fn density(&self, fft: &crate::spectral::Fft2) -> Vec<f64> {
        let mut rho = vec![0.0; fft.size() * fft.size()];
        for v in &self.vectors {
            for c in 0..v.components() {
                for (r, x) in rho.iter_mut().zip(fft.physical(v, c)) {
                    *r += x * x;
                }
            }
        }
        rho
    }
}

fn real_mode(grid: SpectralGrid, role: FieldRole, k: WaveVector, phase: Complex64) -> SpectralField {
    let mut f = SpectralField::zeros(grid, role);
    match role {
        FieldRole::Vorticity => f.set_mode(0, k, phase).expect("retained mode"),
        FieldRole::Velocity => {
            let p = k.perp();
            let norm = (k.norm_sq() as f64).sqrt();
            f.set_mode(0, k, phase * (p.k1 as f64 / norm)).expect("retained mode");
            f.set_mode(1, k, phase * (p.k2 as f64 / norm)).expect("retained mode");
        }
    }
    f
}

/// Modified Gram–Schmidt in `(·,·)_α`. Span and order are preserved.
///
/// Fails with [`Error::DegenerateFrame`] (0-based index) when a vector
/// loses all but a `1e-7` fraction of its α-norm to its predecessors.
pub fn alpha_gram_schmidt(frame: &TangentFrame) -> Result<TangentFrame> {
    let mut out = frame.clone();
    orthonormalize(&mut out.vectors, out.metric)?;
    Ok(out)
}

/// In-place modified Gram–Schmidt; returns the diagonal `r_jj` of the
/// triangular factor (the α-norm of each vector after projection).
pub(crate) fn orthonormalize(vectors: &mut [SpectralField], metric: AlphaMetric) -> Result<Vec<f64>> {
    let mut diag = Vec::with_capacity(vectors.len());
    for j in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(j);
        let v = &mut rest[0];
        let before = v.alpha_norm_sq(metric).sqrt();
        for q in done.iter() {
            let r = ops::alpha_inner(q, v, metric)?;
            v.axpy(-r, q);
        }
        let r = v.alpha_norm_sq(metric).sqrt();
        if !(r > 1e-7 * before) || !r.is_finite() {
            return Err(Error::DegenerateFrame { index: j });
        }
        v.scale(1.0 / r);
        diag.push(r);
    }
    Ok(diag)
}

/// `−(1+αA)⁻¹[B(θ,u) + B(u,θ)]` given `u` sampled on the model grid.
pub(crate) fn tangent_nonlinear_velocity(
    model: &NsvModel,
    pu: &PhysicalVelocity,
    theta: &SpectralField,
) -> SpectralField {
    let pt = PhysicalVelocity::new(model.fft(), theta);
    let mut out = ops::bilinear_sum(model.fft(), model.grid(), &[(&pt, pu), (pu, &pt)]);
    let metric = model.metric();
    out.apply_multiplier(|ksq| -1.0 / metric.weight(ksq));
    out
}

/// `−(1−αΔ)⁻¹[u·∇φ + (∇^⊥Δ⁻¹φ)·∇ω]` given `u = ∇^⊥Δ⁻¹ω` sampled on the
/// model grid.
pub(crate) fn tangent_nonlinear_vorticity(
    model: &NsvModel,
    pu: &[Vec<f64>; 2],
    omega: &SpectralField,
    phi: &SpectralField,
) -> Result<SpectralField> {
    let fft = model.fft();
    let v = ops::curl_and_stream(phi)?;
    let pv = [fft.physical(&v, 0), fft.physical(&v, 1)];
    let mut out = ops::advect_scalar(fft, pu, phi);
    out.axpy(1.0, &ops::advect_scalar(fft, &pv, omega));
    let metric = model.metric();
    out.apply_multiplier(|ksq| -1.0 / metric.weight(ksq));
    Ok(out)
}

fn check_pair(theta: &SpectralField, base: &SpectralField, role: FieldRole) -> Result<()> {
    theta.expect_role(role)?;
    base.expect_role(role)?;
    if theta.grid() != base.grid() {
        return Err(Error::GridMismatch {
            left: theta.grid().to_string(),
            right: base.grid().to_string(),
        });
    }
    Ok(())
}

/// `L_u θ = −νA(1+αA)⁻¹θ − (1+αA)⁻¹[B(θ,u) + B(u,θ)]`.
pub fn linearized_apply_velocity(theta: &SpectralField, u: &SpectralField, cfg: &SimConfig) -> Result<SpectralField> {
    check_pair(theta, u, FieldRole::Velocity)?;
    let model = model_for(cfg, u.grid())?;
    Ok(linearized_velocity_with(&model, &PhysicalVelocity::new(model.fft(), u), theta))
}

fn linearized_velocity_with(model: &NsvModel, pu: &PhysicalVelocity, theta: &SpectralField) -> SpectralField {
    let mut out = tangent_nonlinear_velocity(model, pu, theta);
    out.axpy(1.0, &theta.with_multiplier(|ksq| model.linear_symbol(ksq)));
    out
}

/// `L_ω φ = −(1−αΔ)⁻¹[u·∇φ + (∇^⊥Δ⁻¹φ)·∇ω − νΔφ]`, `u = ∇^⊥Δ⁻¹ω`.
pub fn linearized_apply_vorticity(phi: &SpectralField, omega: &SpectralField, cfg: &SimConfig) -> Result<SpectralField> {
    check_pair(phi, omega, FieldRole::Vorticity)?;
    let model = model_for(cfg, omega.grid())?;
    let pu = vorticity_velocity(&model, omega)?;
    linearized_vorticity_with(&model, &pu, omega, phi)
}

fn vorticity_velocity(model: &NsvModel, omega: &SpectralField) -> Result<[Vec<f64>; 2]> {
    let u = ops::curl_and_stream(omega)?;
    Ok([model.fft().physical(&u, 0), model.fft().physical(&u, 1)])
}

fn linearized_vorticity_with(
    model: &NsvModel,
    pu: &[Vec<f64>; 2],
    omega: &SpectralField,
    phi: &SpectralField,
) -> Result<SpectralField> {
    let mut out = tangent_nonlinear_vorticity(model, pu, omega, phi)?;
    out.axpy(1.0, &phi.with_multiplier(|ksq| model.linear_symbol(ksq)));
    Ok(out)
}

fn model_for(cfg: &SimConfig, grid: SpectralGrid) -> Result<NsvModel> {
    let cfg = SimConfig { grid, ..cfg.clone() };
    NsvModel::new(&cfg)
}

/// Per-vector contributions `(L θ_j, θ_j)_α` for a frame of either role.
pub(crate) fn trace_terms(model: &NsvModel, frame: &TangentFrame, base: &SpectralField) -> Result<Vec<f64>> {
    let metric = model.metric();
    match frame.role() {
        FieldRole::Velocity => {
            base.expect_role(FieldRole::Velocity)?;
            let pu = PhysicalVelocity::new(model.fft(), base);
            frame
                .vectors
                .iter()
                .map(|t| ops::alpha_inner(&linearized_velocity_with(model, &pu, t), t, metric))
                .collect()
        }
        FieldRole::Vorticity => {
            base.expect_role(FieldRole::Vorticity)?;
            let pu = vorticity_velocity(model, base)?;
            frame
                .vectors
                .iter()
                .map(|p| ops::alpha_inner(&linearized_vorticity_with(model, &pu, base, p)?, p, metric))
                .collect()
        }
    }
}

/// `Σ_j (L θ_j, θ_j)_α` on an α-orthonormal frame; `base` is `u` for a
/// velocity frame and `ω` for a vorticity frame.
pub fn trace_n(frame: &TangentFrame, base: &SpectralField, cfg: &SimConfig) -> Result<f64> {
    let deviation = frame.gram_deviation();
    if deviation > STALE_FRAME_TOLERANCE {
        return Err(Error::StaleFrame { deviation });
    }
    if (frame.metric().alpha() - cfg.alpha).abs() > 0.0 {
        return Err(Error::invalid(
            "alpha",
            format!("frame metric alpha {} differs from config alpha {}", frame.metric().alpha(), cfg.alpha),
        ));
    }
    let model = model_for(cfg, base.grid())?;
    Ok(trace_terms(&model, frame, base)?.iter().sum())
}

/// `−νΣ‖∇θ_j‖² − Σ((θ_j·∇)u, θ_j)` with the cubic term integrated on the
/// native grid (exact for band-limited data under the 2/3 rule).
pub fn reduced_trace_velocity(frame: &TangentFrame, u: &SpectralField, nu: f64) -> Result<f64> {
    u.expect_role(FieldRole::Velocity)?;
    let fft = crate::spectral::Fft2::for_grid(u.grid());
    let pu = PhysicalVelocity::new(&fft, u);
    let mut stretch = 0.0;
    for t in frame.vectors() {
        t.expect_role(FieldRole::Velocity)?;
        let pt = [fft.physical(t, 0), fft.physical(t, 1)];
        for i in 0..pt[0].len() {
            for l in 0..2 {
                for c in 0..2 {
                    stretch += pt[l][i] * pu.grad[l][c][i] * pt[c][i];
                }
            }
        }
    }
    Ok(-nu * frame.enstrophy_sum() - stretch * fft.cell_area())
}

/// The chain `trace ≤ −νΣ‖∇θ_j‖² + c₂∫ρ|∇u|` evaluated on one frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateChain {
    pub trace: f64,
    pub dissipation: f64,
    /// `c₂ ∫ρ|∇u|` (grid quadrature).
    pub stretching_bound: f64,
    /// `max_x |Σ_j θ_j·∇u·θ_j| / (c₂ ρ|∇u|)` over nodes where the
    /// denominator is nonzero.
    pub worst_pointwise_ratio: f64,
    pub holds: bool,
}

pub fn estimate_chain(frame: &TangentFrame, u: &SpectralField, cfg: &SimConfig) -> Result<EstimateChain> {
    u.expect_role(FieldRole::Velocity)?;
    let trace = trace_n(frame, u, cfg)?;
    let fft = crate::spectral::Fft2::for_grid(u.grid());
    let pu = PhysicalVelocity::new(&fft, u);
    let grad = pu.grad_magnitude();
    let npts = grad.len();
    let mut rho = vec![0.0; npts];
    let mut stretch = vec![0.0; npts];
    for t in frame.vectors() {
        let pt = [fft.physical(t, 0), fft.physical(t, 1)];
        for i in 0..npts {
            rho[i] += pt[0][i] * pt[0][i] + pt[1][i] * pt[1][i];
            for l in 0..2 {
                for c in 0..2 {
                    stretch[i] += pt[l][i] * pu.grad[l][c][i] * pt[c][i];
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut integral = 0.0;
    for i in 0..npts {
        let b = C2 * rho[i] * grad[i];
        integral += b;
        if b > 0.0 {
            worst = worst.max(stretch[i].abs() / b);
        } else if stretch[i].abs() > 1e-12 {
            worst = f64::INFINITY;
        }
    }
    let dissipation = -cfg.nu * frame.enstrophy_sum();
    let stretching_bound = integral * fft.cell_area();
    let slack = 1e-10 * (dissipation.abs() + stretching_bound.abs() + 1.0);
    Ok(EstimateChain {
        trace,
        dissipation,
        stretching_bound,
        worst_pointwise_ratio: worst,
        holds: trace <= dissipation + stretching_bound + slack && worst <= 1.0 + 1e-12,
    })
}

/// `Σ_j ‖∇θ_j‖² ≥ n/(α+1)` for an α-orthonormal frame (`λ₁ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnstrophyLowerBound {
    pub sum: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn check_enstrophy_lower_bound(frame: &TangentFrame) -> EnstrophyLowerBound {
    let sum = frame.enstrophy_sum();
    let bound = frame.n() as f64 / (frame.metric().alpha() + 1.0);
    EnstrophyLowerBound {
        sum,
        bound,
        holds: sum >= bound * (1.0 - 1e-12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{rhs_velocity, rhs_vorticity, ForcingSpec};

    fn cfg(alpha: f64) -> SimConfig {
        SimConfig {
            alpha,
            nu: 0.7,
            grid: SpectralGrid::with_resolution(16).unwrap(),
            forcing: ForcingSpec::Shear {
                amplitude: 1.3,
                wavenumber: 2,
            },
            ..SimConfig::default()
        }
    }

    fn diff(a: &SpectralField, b: &SpectralField) -> f64 {
        let mut d = a.clone();
        d.axpy(-1.0, b);
        d.max_abs_coeff()
    }

    #[test]
    fn zero_base_is_diagonal() {
        let c = cfg(0.5);
        for role in [FieldRole::Velocity, FieldRole::Vorticity] {
            let frame = TangentFrame::eigenmodes(c.grid, role, 6, c.metric()).unwrap();
            let zero = SpectralField::zeros(c.grid, role);
            for t in frame.vectors() {
                let l = match role {
                    FieldRole::Velocity => linearized_apply_velocity(t, &zero, &c).unwrap(),
                    FieldRole::Vorticity => linearized_apply_vorticity(t, &zero, &c).unwrap(),
                };
                let ksq = t.grad_norm_sq() / t.l2_norm_sq();
                assert!(diff(&l, &t.scaled(-0.7 * ksq / (1.0 + 0.5 * ksq))) < 1e-14);
            }
        }
    }

    #[test]
    fn finite_difference_oracle_velocity() {
        let c = cfg(0.3);
        let u = SpectralField::random(c.grid, FieldRole::Velocity, 11, 2.0);
        let th = SpectralField::random(c.grid, FieldRole::Velocity, 12, 2.0);
        let l = linearized_apply_velocity(&th, &u, &c).unwrap();
        let f0 = rhs_velocity(&u, &c).unwrap();
        let mut errs = Vec::new();
        for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
            let mut up = u.clone();
            up.axpy(eps, &th);
            let mut fd = rhs_velocity(&up, &c).unwrap();
            fd.axpy(-1.0, &f0);
            fd.scale(1.0 / eps);
            errs.push(diff(&fd, &l));
        }
        // first-order in eps until roundoff takes over
        assert!(errs[1] < 0.2 * errs[0] && errs[2] < 0.2 * errs[1], "{errs:?}");
        assert!(errs[3] < 1e-5);
    }

    #[test]
    fn finite_difference_oracle_vorticity_and_intertwining() {
        let c = cfg(0.8);
        let w = SpectralField::random(c.grid, FieldRole::Vorticity, 21, 2.0);
        let p = SpectralField::random(c.grid, FieldRole::Vorticity, 22, 2.0);
        let l = linearized_apply_vorticity(&p, &w, &c).unwrap();
        let f0 = rhs_vorticity(&w, &c).unwrap();
        let eps = 1e-6;
        let mut wp = w.clone();
        wp.axpy(eps, &p);
        let mut fd = rhs_vorticity(&wp, &c).unwrap();
        fd.axpy(-1.0, &f0);
        fd.scale(1.0 / eps);
        assert!(diff(&fd, &l) < 1e-4 * l.max_abs_coeff());

        let u = ops::curl_and_stream(&w).unwrap();
        let th = ops::curl_and_stream(&p).unwrap();
        let lv = ops::rot(&linearized_apply_velocity(&th, &u, &c).unwrap()).unwrap();
        assert!(diff(&lv, &l) < 1e-8);
    }

    #[test]
    fn linearity() {
        let c = cfg(0.2);
        let u = SpectralField::random(c.grid, FieldRole::Velocity, 1, 2.0);
        let a = SpectralField::random(c.grid, FieldRole::Velocity, 2, 2.0);
        let b = SpectralField::random(c.grid, FieldRole::Velocity, 3, 2.0);
        let mut comb = a.scaled(2.5);
        comb.axpy(-0.75, &b);
        let lhs = linearized_apply_velocity(&comb, &u, &c).unwrap();
        let mut rhs = linearized_apply_velocity(&a, &u, &c).unwrap().scaled(2.5);
        rhs.axpy(-0.75, &linearized_apply_velocity(&b, &u, &c).unwrap());
        assert!(diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn gram_schmidt_properties() {
        let m = AlphaMetric::new(0.4).unwrap();
        let g = SpectralGrid::with_resolution(16).unwrap();
        let raw: Vec<_> = (0..5).map(|s| SpectralField::random(g, FieldRole::Velocity, s, 1.0)).collect();
        let f = alpha_gram_schmidt(&TangentFrame::new(raw.clone(), m).unwrap()).unwrap();
        assert!(f.gram_deviation() < 1e-10);
        // span preserved: each raw vector lies in the new span
        for v in &raw {
            let mut r = v.clone();
            for q in f.vectors() {
                r.axpy(-ops::alpha_inner(q, v, m).unwrap(), q);
            }
            assert!(r.alpha_norm_sq(m).sqrt() <= 1e-8 * v.alpha_norm_sq(m).sqrt());
        }
        // orthonormal input is left alone
        let again = alpha_gram_schmidt(&f).unwrap();
        for (a, b) in again.vectors().iter().zip(f.vectors()) {
            assert!(diff(a, b) < 1e-12);
        }
        let dup = TangentFrame::new(vec![raw[0].clone(), raw[1].clone(), raw[0].scaled(3.0)], m).unwrap();
        assert!(matches!(alpha_gram_schmidt(&dup), Err(Error::DegenerateFrame { index: 2 })));
    }

    #[test]
    fn eigenmode_normalisation() {
        let m = AlphaMetric::new(2.0).unwrap();
        let g = SpectralGrid::with_resolution(16).unwrap();
        let modes = [WaveVector::new(1, 0), WaveVector::new(1, 2), WaveVector::new(0, 3)];
        let raw: Vec<_> = modes
            .iter()
            .map(|&k| real_mode(g, FieldRole::Velocity, k, Complex64::new(0.5, 0.0)))
            .collect();
        let f = alpha_gram_schmidt(&TangentFrame::new(raw.clone(), m).unwrap()).unwrap();
        for ((v, q), k) in raw.iter().zip(f.vectors()).zip(modes) {
            let ksq = k.norm_sq() as f64;
            let factor = 1.0 / ((1.0 + 2.0 * ksq) * v.l2_norm_sq()).sqrt();
            assert!(diff(&v.scaled(factor), q) < 1e-14);
        }
    }

    #[test]
    fn trace_of_ground_modes() {
        let c = SimConfig {
            nu: 1.0,
            alpha: 1.0,
            grid: SpectralGrid::with_resolution(16).unwrap(),
            ..SimConfig::default()
        };
        let frame = TangentFrame::eigenmodes(c.grid, FieldRole::Velocity, 4, c.metric()).unwrap();
        let zero = SpectralField::zeros(c.grid, FieldRole::Velocity);
        assert!((trace_n(&frame, &zero, &c).unwrap() + 2.0).abs() < 1e-14);
        let stale = TangentFrame::new(frame.vectors().iter().map(|v| v.scaled(1.1)).collect(), c.metric()).unwrap();
        assert!(matches!(trace_n(&stale, &zero, &c), Err(Error::StaleFrame { .. })));
    }

    #[test]
    fn reduced_trace_and_estimate_chain() {
        for (alpha, seed) in [(0.0, 1), (0.3, 2), (2.0, 3)] {
            let c = cfg(alpha);
            let u = SpectralField::random(c.grid, FieldRole::Velocity, seed, 1.5).scaled(5.0);
            let frame = TangentFrame::random(c.grid, FieldRole::Velocity, 5, seed + 10, c.metric()).unwrap();
            let t = trace_n(&frame, &u, &c).unwrap();
            let r = reduced_trace_velocity(&frame, &u, c.nu).unwrap();
            assert!((t - r).abs() < 1e-10 * t.abs().max(1.0), "{t} vs {r}");
            let chain = estimate_chain(&frame, &u, &c).unwrap();
            assert!(chain.holds, "{chain:?}");
            assert!(check_enstrophy_lower_bound(&frame).holds);
        }
    }
}
