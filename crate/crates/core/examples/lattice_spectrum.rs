//! Eigenvalues of the Laplacian on `[0, 2π]²` by lattice enumeration, and
//! the counting and partial-sum inequalities checked over large ranges.
//!
//! ```bash
//! cargo run --release --example lattice_spectrum
//! ```

use nsvlab::lab::{lattice_count, verify_eigenvalue_bounds, verify_liyau, verify_spectral_sums, LatticeSpectrum};

fn main() -> nsvlab::Result<()> {
    let spec = LatticeSpectrum::up_to(10);
    let first: Vec<u64> = spec.eigenvalues().take(20).collect();
    println!("first eigenvalues: {first:?}");
    for e in [1.0, 2.0, 5.0, 10.0, 100.0] {
        println!("N({e}) = {}", lattice_count(e));
    }

    let eig = verify_eigenvalue_bounds(100_000, 10_000)?;
    println!(
        "lambda_j/(j/4) >= {:.4} (j = {}), lambda_j/(j/2) <= {:.4} (j = {}), N(E)/(4E) <= {:.4}",
        eig.lower_ratio_min, eig.lower_ratio_argmin, eig.upper_ratio_max, eig.upper_ratio_argmax, eig.count_ratio_max
    );
    if let Some((e, n)) = eig.count_half_counterexample {
        println!("N(E) < 2E fails at E = {e}: N = {n}");
    }
    let ly = verify_liyau(10_000)?;
    println!("partial sums / (m^2/2pi) >= {:.4} (m = {})", ly.min_ratio, ly.argmin);
    let sums = verify_spectral_sums(1_000, 100_000)?;
    println!(
        "inverse sums: max ratio {:.4}; inverse-square tails: max ratio {:.4}",
        sums.inverse_ratio_max, sums.inverse_square_ratio_max
    );
    Ok(())
}
