//! Random suborthonormal families tested against the Lieb–Thirring bound
//! and the two bounds on `ρ = Σ|u_j|²`.
//!
//! ```bash
//! cargo run --release --example inequality_sampling
//! ```

use nsvlab::lab::{sweep_lieb_thirring, sweep_rho_l2, sweep_rho_linf, SweepConfig};
use nsvlab::spectral::SpectralGrid;

fn main() -> nsvlab::Result<()> {
    let cfg = SweepConfig {
        grid: SpectralGrid::with_resolution(32)?,
        families: 24,
        n_max: 8,
        ..SweepConfig::default()
    };
    for r in [sweep_lieb_thirring(&cfg)?, sweep_rho_l2(&cfg)?, sweep_rho_linf(&cfg, 1..=32)?] {
        println!(
            "{:<9} pass = {:<5} worst ratio {:.4} (seed {:?}), near saturation {:?}",
            r.target, r.pass, r.worst_ratio, r.witness_seed, r.near_saturation
        );
        println!("          {}", r.range);
    }
    Ok(())
}
