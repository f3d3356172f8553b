//! Single Fourier mode decaying under the Voight regularisation.
//!
//! `u = a e^{-νt/(1+α)} (sin x₂, 0)` is an exact solution; the example
//! integrates it with RK4 and prints the relative error at a few times.
//!
//! ```bash
//! cargo run --release --example free_decay
//! ```

use nsvlab::dynamics::{integrate, InitialCondition, Scheme, SimConfig};
use nsvlab::spectral::{SpectralGrid, WaveVector};

fn main() -> nsvlab::Result<()> {
    let (nu, alpha) = (1.0, 1.0);
    println!("{:>6} {:>18} {:>18} {:>10}", "t", "computed", "exact", "rel err");
    for t_end in [0.25, 0.5, 1.0, 2.0] {
        let cfg = SimConfig {
            nu,
            alpha,
            grid: SpectralGrid::with_resolution(32)?,
            dt: 1e-3,
            t_end,
            scheme: Scheme::Rk4,
            initial: InitialCondition::Shear {
                amplitude: 1.0,
                wavenumber: 1,
            },
            ..SimConfig::default()
        };
        let tr = integrate(&cfg)?;
        let got = 2.0 * tr.final_velocity.coeff(0, WaveVector::new(0, 1)).norm();
        let exact = (-nu * t_end / (1.0 + alpha)).exp();
        println!("{t_end:>6} {got:>18.14} {exact:>18.14} {:>10.2e}", (got - exact).abs() / exact);
    }
    Ok(())
}
