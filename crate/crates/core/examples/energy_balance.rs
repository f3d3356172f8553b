//! Order check of the time stepper through the energy identity
//! `d/dt ‖u‖_α² = −2ν‖∇u‖² + 2(g, u)`.
//!
//! The one-step defect of a fourth-order scheme is `O(h⁵)`, so halving
//! the step should shrink it by about 32.
//!
//! ```bash
//! cargo run --release --example energy_balance
//! ```

use nsvlab::dynamics::{energy_balance_residual, ForcingSpec, Scheme, SimConfig};
use nsvlab::spectral::{ops, FieldRole, SpectralField, SpectralGrid};

fn main() -> nsvlab::Result<()> {
    let grid = SpectralGrid::with_resolution(32)?;
    let (nu, m, a) = (1.0, 2, 1.0);
    let cfg = SimConfig {
        nu,
        alpha: 0.5,
        grid,
        scheme: Scheme::Rk4,
        // steady Kolmogorov flow: νAu* = g
        forcing: ForcingSpec::Shear {
            amplitude: nu * (m * m) as f64 * a,
            wavenumber: m,
        },
        ..SimConfig::default()
    };
    let mut u0 = SpectralField::shear(grid, FieldRole::Velocity, m, a)?;
    let pert = ops::leray_project(&SpectralField::random(grid, FieldRole::Velocity, 7, 3.0))?;
    u0.axpy(0.3 / pert.l2_norm_sq().sqrt(), &pert);

    let mut prev: Option<f64> = None;
    for h in [0.2, 0.1, 0.05, 0.025] {
        let r = energy_balance_residual(&cfg, &u0, h, 256)?.abs();
        match prev {
            Some(p) => println!("h = {h:<6} residual = {r:.3e}  ratio = {:.2}", p / r),
            None => println!("h = {h:<6} residual = {r:.3e}"),
        }
        prev = Some(r);
    }
    Ok(())
}
