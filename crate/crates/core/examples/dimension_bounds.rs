//! Dimension bounds on the 2D torus across a range of Grashof numbers,
//! with `α` at half the admissible threshold, plus the crossover points.
//!
//! ```bash
//! cargo run --release --example dimension_bounds
//! ```

use std::f64::consts::PI;

use nsvlab::bounds::{dim_bound_report, BoundsInput};

fn main() -> nsvlab::Result<()> {
    for cal_g in [1e2, 1e3, 1e4, 1e6, 1e9] {
        let base = BoundsInput::torus2(1.0, 0.0, cal_g / (4.0 * PI * PI));
        let input = BoundsInput {
            alpha: 0.5 * base.alpha0(),
            ..base
        };
        println!("{}", dim_bound_report(&input)?.to_table());
    }

    let d3 = BoundsInput {
        d: 3,
        domain_measure: 8.0 * PI.powi(3),
        ..BoundsInput::torus2(1.0, 0.1, 50.0)
    };
    println!("{}", dim_bound_report(&d3)?.to_table());
    Ok(())
}
