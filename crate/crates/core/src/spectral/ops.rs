//! Operators on spectral fields: Leray projection, powers of the Stokes
//! operator, the Helmholtz solve `(1 + αA)^{-1}`, the dealiased bilinear
//! term, the α-weighted inner product and the curl/stream-function maps.

use num_complex::Complex64;

use super::{AlphaMetric, Fft2, FieldRole, PhysicalVelocity, SpectralField, SpectralGrid};
use crate::error::Result;

/// `û(k) ↦ û(k) − k (k·û(k)) / |k|²`.
pub fn leray_project(f: &SpectralField) -> Result<SpectralField> {
    f.expect_role(FieldRole::Velocity)?;
    let mut out = f.clone();
    project_in_place(&mut out);
    Ok(out)
}

pub(crate) fn project_in_place(f: &mut SpectralField) {
    debug_assert_eq!(f.role(), FieldRole::Velocity);
    let grid = f.grid();
    let len = grid.len();
    let (c0, c1) = f.data.split_at_mut(len);
    for k in grid.modes() {
        let idx = grid.index(k);
        let (k1, k2) = (k.k1 as f64, k.k2 as f64);
        let ksq = k1 * k1 + k2 * k2;
        let dot = (c0[idx] * k1 + c1[idx] * k2) / ksq;
        c0[idx] -= dot * k1;
        c1[idx] -= dot * k2;
    }
}

/// `A^{s/2}`: multiplies every mode by `|k|^s`.
pub fn stokes_apply(u: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return u.clone();
    }
    u.with_multiplier(|ksq| ksq.powf(0.5 * s))
}

/// `(1 + αA)^{-1} f`.
pub fn helmholtz_solve(f: &SpectralField, metric: AlphaMetric) -> SpectralField {
    if metric.alpha() == 0.0 {
        return f.clone();
    }
    f.with_multiplier(|ksq| 1.0 / metric.weight(ksq))
}

/// `B(u, v) = Π((u·∇)v)`, evaluated pseudo-spectrally with 2/3-rule
/// truncation.
pub fn bilinear(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    bilinear_with(&Fft2::for_grid(u.grid()), u, v)
}

pub fn bilinear_with(fft: &Fft2, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.check_same(v)?;
    u.expect_role(FieldRole::Velocity)?;
    let pu = PhysicalVelocity::new(fft, u);
    let pv = if std::ptr::eq(u, v) {
        pu.clone()
    } else {
        PhysicalVelocity::new(fft, v)
    };
    Ok(bilinear_sum(fft, u.grid(), &[(&pu, &pv)]))
}

/// `Σ_terms Π((a·∇)b)` with a single forward transform per component.
pub fn bilinear_sum(
    fft: &Fft2,
    grid: SpectralGrid,
    terms: &[(&PhysicalVelocity, &PhysicalVelocity)],
) -> SpectralField {
    let npts = fft.size() * fft.size();
    let mut w = [vec![0.0; npts], vec![0.0; npts]];
    for (a, b) in terms {
        for (c, wc) in w.iter_mut().enumerate() {
            let (g0, g1) = (&b.grad[0][c], &b.grad[1][c]);
            for i in 0..npts {
                wc[i] += a.u[0][i] * g0[i] + a.u[1][i] * g1[i];
            }
        }
    }
    let mut out = fft.spectral(grid, FieldRole::Velocity, &[&w[0], &w[1]]);
    project_in_place(&mut out);
    out
}

/// Truncated advection `u·∇ω` of a scalar by a physical velocity.
pub fn advect_scalar(fft: &Fft2, velocity: &[Vec<f64>; 2], omega: &SpectralField) -> SpectralField {
    let d1 = fft.derivative(omega, 0, 0);
    let d2 = fft.derivative(omega, 0, 1);
    let w: Vec<f64> = (0..d1.len())
        .map(|i| velocity[0][i] * d1[i] + velocity[1][i] * d2[i])
        .collect();
    fft.spectral(omega.grid(), FieldRole::Vorticity, &[&w])
}

/// `(u, v)_α = |𝕋²| Σ_k (1 + α|k|²) Re(û(k)·conj(v̂(k)))`.
pub fn alpha_inner(u: &SpectralField, v: &SpectralField, metric: AlphaMetric) -> Result<f64> {
    u.check_same(v)?;
    Ok(u.weighted_dot(v, |ksq| metric.weight(ksq)))
}

/// Velocity `u = ∇^⊥Δ^{-1}ω` with `∇^⊥ = (−∂₂, ∂₁)`, so that
/// `rot u = ω`. Per mode `û = i (k₂, −k₁) ω̂ / |k|²`.
pub fn curl_and_stream(omega: &SpectralField) -> Result<SpectralField> {
    omega.expect_role(FieldRole::Vorticity)?;
    let grid = omega.grid();
    let mut u = SpectralField::zeros(grid, FieldRole::Velocity);
    let w = omega.component(0);
    let len = grid.len();
    let (c0, c1) = u.data.split_at_mut(len);
    for k in grid.modes() {
        let idx = grid.index(k);
        let s = Complex64::new(0.0, 1.0) * w[idx] / k.norm_sq() as f64;
        c0[idx] = s * k.k2 as f64;
        c1[idx] = -s * k.k1 as f64;
    }
    Ok(u)
}

/// `rot u = ∂₁u₂ − ∂₂u₁`.
pub fn rot(u: &SpectralField) -> Result<SpectralField> {
    u.expect_role(FieldRole::Velocity)?;
    let grid = u.grid();
    let mut w = SpectralField::zeros(grid, FieldRole::Vorticity);
    let (u1, u2) = (u.component(0), u.component(1));
    let out = w.component_mut(0);
    for k in grid.modes() {
        let idx = grid.index(k);
        out[idx] = Complex64::new(0.0, 1.0) * (u2[idx] * k.k1 as f64 - u1[idx] * k.k2 as f64);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::spectral::WaveVector;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid() -> SpectralGrid {
        SpectralGrid::with_resolution(16).unwrap()
    }

    #[test]
    fn gradient_mode_is_annihilated() {
        let mut f = SpectralField::zeros(grid(), FieldRole::Velocity);
        let k = WaveVector::new(2, -1);
        f.set_mode(0, k, c(2.0, 0.0)).unwrap();
        f.set_mode(1, k, c(-1.0, 0.0)).unwrap();
        let p = leray_project(&f).unwrap();
        assert!(p.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn projection_by_hand() {
        // û(1,0) = (1,1) -> (0,1)
        let mut f = SpectralField::zeros(grid(), FieldRole::Velocity);
        let k = WaveVector::new(1, 0);
        f.set_mode(0, k, c(1.0, 0.0)).unwrap();
        f.set_mode(1, k, c(1.0, 0.0)).unwrap();
        let p = leray_project(&f).unwrap();
        assert_eq!(p.coeff(0, k), c(0.0, 0.0));
        assert_eq!(p.coeff(1, k), c(1.0, 0.0));
        assert_eq!(p.coeff(1, k.neg()), c(1.0, 0.0));
    }

    #[test]
    fn projection_is_idempotent_and_rejects_scalars() {
        let f = SpectralField::random(grid(), FieldRole::Velocity, 3, 1.0);
        let p = leray_project(&f).unwrap();
        let mut d = leray_project(&p).unwrap();
        d.axpy(-1.0, &p);
        assert!(d.max_abs_coeff() <= 1e-14 * p.max_abs_coeff());
        let w = SpectralField::random(grid(), FieldRole::Vorticity, 3, 1.0);
        assert!(matches!(leray_project(&w), Err(Error::RoleMismatch { .. })));
    }

    #[test]
    fn stokes_powers() {
        let mut u = SpectralField::zeros(grid(), FieldRole::Velocity);
        u.set_mode(0, WaveVector::new(0, 1), c(0.3, 0.1)).unwrap();
        u.set_mode(1, WaveVector::new(1, 2), c(0.2, -0.4)).unwrap();
        u.set_mode(0, WaveVector::new(1, 2), c(-0.4, 0.8)).unwrap();
        assert_eq!(stokes_apply(&u, 0.0), u);
        let a = stokes_apply(&u, 2.0);
        assert_eq!(a.coeff(0, WaveVector::new(0, 1)), c(0.3, 0.1));
        assert!((a.coeff(1, WaveVector::new(1, 2)) - c(1.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn helmholtz_multipliers() {
        let mut f = SpectralField::zeros(grid(), FieldRole::Vorticity);
        f.set_mode(0, WaveVector::new(1, 0), c(1.0, 0.0)).unwrap();
        f.set_mode(0, WaveVector::new(0, 2), c(3.0, 0.0)).unwrap();
        assert_eq!(helmholtz_solve(&f, AlphaMetric::l2()), f);
        let h = helmholtz_solve(&f, AlphaMetric::new(1.0).unwrap());
        assert_eq!(h.coeff(0, WaveVector::new(1, 0)), c(0.5, 0.0));
        let h = helmholtz_solve(&f, AlphaMetric::new(0.5).unwrap());
        assert!((h.coeff(0, WaveVector::new(0, 2)) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn shear_self_interaction_vanishes() {
        let u = SpectralField::shear(grid(), FieldRole::Velocity, 1, 1.0).unwrap();
        let b = bilinear(&u, &u).unwrap();
        assert!(b.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn four_mode_convolution() {
        // u = (a sin x2, b sin x1): (u·∇)u = (a b sin x1 cos x2, a b sin x2 cos x1)
        //   = ab/2 [(1,1) sin(x1+x2) + (1,-1) sin(x1-x2)]
        // Both terms are parallel to their wave vector, so B(u,u) = 0.
        let (a, b) = (0.7, -1.3);
        let g = grid();
        let mut u = SpectralField::shear(g, FieldRole::Velocity, 1, a).unwrap();
        u.set_mode(1, WaveVector::new(1, 0), c(0.0, -0.5 * b)).unwrap();
        let raw = {
            // unprojected product, via the physical grid
            let fft = Fft2::for_grid(g);
            let p = PhysicalVelocity::new(&fft, &u);
            let w0: Vec<f64> = (0..256).map(|i| p.u[0][i] * p.grad[0][0][i] + p.u[1][i] * p.grad[1][0][i]).collect();
            let w1: Vec<f64> = (0..256).map(|i| p.u[0][i] * p.grad[0][1][i] + p.u[1][i] * p.grad[1][1][i]).collect();
            fft.spectral(g, FieldRole::Velocity, &[&w0, &w1])
        };
        // sin(x1+x2) has coefficient -i/2 at (1,1)
        let s = a * b / 2.0;
        let k11 = WaveVector::new(1, 1);
        let k1m = WaveVector::new(1, -1);
        assert!((raw.coeff(0, k11) - c(0.0, -0.5 * s)).norm() < 1e-14);
        assert!((raw.coeff(1, k11) - c(0.0, -0.5 * s)).norm() < 1e-14);
        assert!((raw.coeff(0, k1m) - c(0.0, -0.5 * s)).norm() < 1e-14);
        assert!((raw.coeff(1, k1m) - c(0.0, 0.5 * s)).norm() < 1e-14);
        for k in g.modes() {
            if k.norm_sq() != 2 {
                assert!(raw.coeff(0, k).norm() < 1e-14 && raw.coeff(1, k).norm() < 1e-14, "{k}");
            }
        }
        let bu = bilinear(&u, &u).unwrap();
        assert!(bu.max_abs_coeff() < 1e-14);
    }

    #[test]
    fn skew_symmetry_on_random_fields() {
        let g = SpectralGrid::with_resolution(32).unwrap();
        for seed in 0..5 {
            let u = SpectralField::random(g, FieldRole::Velocity, seed, 2.0);
            let b = bilinear(&u, &u).unwrap();
            let lhs = alpha_inner(&b, &u, AlphaMetric::l2()).unwrap().abs();
            let scale = u.l2_norm_sq().sqrt() * u.grad_norm_sq();
            assert!(lhs <= 1e-10 * scale, "{lhs} vs {scale}");
            assert!(b.divergence_defect() < 1e-12);
            assert!(b.reality_defect() < 1e-14 * b.max_abs_coeff().max(1.0));
        }
    }

    #[test]
    fn alpha_inner_single_mode() {
        let u = SpectralField::shear(grid(), FieldRole::Velocity, 1, 1.0 / (2f64.sqrt() * PI)).unwrap();
        for alpha in [0.0, 0.5, 2.0] {
            let m = AlphaMetric::new(alpha).unwrap();
            assert!((alpha_inner(&u, &u, m).unwrap() - (1.0 + alpha)).abs() < 1e-14);
        }
        let mut v = SpectralField::zeros(grid(), FieldRole::Velocity);
        v.set_mode(0, WaveVector::new(0, 2), c(1.0, 0.0)).unwrap();
        assert_eq!(alpha_inner(&u, &v, AlphaMetric::new(1.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn curl_stream_pair() {
        let u = SpectralField::shear(grid(), FieldRole::Velocity, 1, 1.0).unwrap();
        let w = rot(&u).unwrap();
        // rot (sin x2, 0) = -cos x2: coefficient -1/2 at (0, ±1)
        assert!((w.coeff(0, WaveVector::new(0, 1)) - c(-0.5, 0.0)).norm() < 1e-15);
        let back = curl_and_stream(&w).unwrap();
        let mut d = back.clone();
        d.axpy(-1.0, &u);
        assert!(d.max_abs_coeff() < 1e-15);

        let mut w = SpectralField::zeros(grid(), FieldRole::Vorticity);
        let k = WaveVector::new(1, 1);
        w.set_mode(0, k, c(0.6, -0.8)).unwrap();
        let u = curl_and_stream(&w).unwrap();
        let mag = (u.coeff(0, k).norm_sqr() + u.coeff(1, k).norm_sqr()).sqrt();
        assert!((mag - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(curl_and_stream(&u).is_err());
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = SpectralField::random(grid(), FieldRole::Velocity, 1, 2.0);
        let b = SpectralField::random(SpectralGrid::with_resolution(32).unwrap(), FieldRole::Velocity, 1, 2.0);
        assert!(matches!(bilinear(&a, &b), Err(Error::GridMismatch { .. })));
    }
}
