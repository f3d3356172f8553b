use proptest::prelude::*;

use nsvlab::bounds::{bound_2d_linear, bound_2d_log, bound_2d_quadratic, BoundsInput};
use nsvlab::dynamics::{integrate, ForcingSpec, InitialCondition, SimConfig};
use nsvlab::spectral::{ops, AlphaMetric, FieldRole, SpectralField, SpectralGrid};
use nsvlab::tangent::{alpha_gram_schmidt, check_enstrophy_lower_bound, TangentFrame};

fn grid() -> SpectralGrid {
    SpectralGrid::with_resolution(16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unforced_alpha_energy_never_grows(seed in 0u64..10_000, nu in 0.05f64..2.0, alpha in 0.0f64..2.0) {
        let cfg = SimConfig {
            nu,
            alpha,
            grid: grid(),
            dt: 0.01,
            t_end: 0.5,
            sample_every: 5,
            initial: InitialCondition::Random { seed, norm: 2.0 },
            ..SimConfig::default()
        };
        let tr = integrate(&cfg).unwrap();
        for w in tr.series.samples.windows(2) {
            prop_assert!(w[1].energy_alpha <= w[0].energy_alpha * (1.0 + 1e-12));
        }
        prop_assert!(tr.final_velocity.divergence_defect() < 1e-12);
        prop_assert!(tr.final_velocity.reality_defect() < 1e-12);
    }

    #[test]
    fn runs_are_deterministic(seed in 0u64..10_000, amp in 0.1f64..3.0) {
        let cfg = SimConfig {
            grid: grid(),
            dt: 0.01,
            t_end: 0.2,
            alpha: 0.3,
            forcing: ForcingSpec::Shear { amplitude: amp, wavenumber: 2 },
            initial: InitialCondition::Random { seed, norm: 1.0 },
            ..SimConfig::default()
        };
        let a = integrate(&cfg).unwrap();
        let b = integrate(&cfg).unwrap();
        prop_assert_eq!(a.final_state, b.final_state);
        prop_assert_eq!(a.series, b.series);
    }

    #[test]
    fn reorthonormalisation_preserves_span(seed in 0u64..10_000, n in 1usize..7, alpha in 0.0f64..2.0) {
        let metric = AlphaMetric::new(alpha).unwrap();
        let raw: Vec<SpectralField> = (0..n)
            .map(|j| SpectralField::random(grid(), FieldRole::Velocity, seed * 31 + j as u64, 1.5))
            .collect();
        let old = TangentFrame::new(raw.clone(), metric).unwrap();
        let new = alpha_gram_schmidt(&old).unwrap();
        prop_assert!(new.gram_deviation() < 1e-10);
        prop_assert!(check_enstrophy_lower_bound(&new).holds);
        for v in &raw {
            let mut r = v.clone();
            for q in new.vectors() {
                let c = ops::alpha_inner(v, q, metric).unwrap();
                r.axpy(-c, q);
            }
            let rel = (r.alpha_norm_sq(metric) / v.alpha_norm_sq(metric)).sqrt();
            prop_assert!(rel <= 1e-8, "residual {rel}");
        }
    }

    #[test]
    fn log_bound_never_exceeds_linear(g in 1e-3f64..1e6, frac in 0.0f64..1.0) {
        let base = BoundsInput::torus2(1.0, 0.0, g);
        let input = BoundsInput { alpha: frac * base.alpha0(), ..base };
        let lin = bound_2d_linear(&input).unwrap().value;
        let log = bound_2d_log(&input).unwrap().value;
        prop_assert!(log <= lin);
        prop_assert!(bound_2d_quadratic(&input).unwrap().value > 0.0);
    }
}
