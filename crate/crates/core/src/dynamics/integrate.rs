use log::warn;

use super::{DiagnosticsSeries, Formulation, NsvModel, SimConfig};
use crate::error::{Error, Result};
use crate::spectral::{ops, FieldRole, SpectralField};

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Classical RK4 for `α > 0`, integrating-factor RK4 for `α = 0`.
    #[default]
    Auto,
    Rk4,
    /// Lawson RK4 with the diagonal viscous term treated exactly.
    IntegratingFactorRk4,
}

impl Scheme {
    pub fn resolve(self, alpha: f64) -> Scheme {
        match self {
            Scheme::Auto if alpha == 0.0 => Scheme::IntegratingFactorRk4,
            Scheme::Auto => Scheme::Rk4,
            s => s,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Auto => "auto",
            Scheme::Rk4 => "rk4",
            Scheme::IntegratingFactorRk4 => "if-rk4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "auto" => Some(Scheme::Auto),
            "rk4" => Some(Scheme::Rk4),
            "if-rk4" => Some(Scheme::IntegratingFactorRk4),
            _ => None,
        }
    }
}

/// Fixed-step integrator for `x' = Lx + N(x)` on a list of fields, with
/// `L` a real diagonal Fourier multiplier shared by all of them.
#[derive(Clone, Copy, Debug)]
pub struct Stepper {
    scheme: Scheme,
    dt: f64,
}

fn combine(base: &[SpectralField], terms: &[(f64, &[SpectralField])]) -> Vec<SpectralField> {
    base.iter()
        .enumerate()
        .map(|(i, b)| {
            let mut out = b.clone();
            for (a, t) in terms {
                out.axpy(*a, &t[i]);
            }
            out
        })
        .collect()
}

fn apply_linear(x: &[SpectralField], m: &dyn Fn(f64) -> f64) -> Vec<SpectralField> {
    x.iter().map(|f| f.with_multiplier(m)).collect()
}

impl Stepper {
    pub fn new(scheme: Scheme, alpha: f64, dt: f64) -> Self {
        Self {
            scheme: scheme.resolve(alpha),
            dt,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step<F>(
        &self,
        state: &mut Vec<SpectralField>,
        linear: &dyn Fn(f64) -> f64,
        mut nonlinear: F,
    ) -> Result<()>
    where
        F: FnMut(&[SpectralField]) -> Result<Vec<SpectralField>>,
    {
        let dt = self.dt;
        let next = match self.scheme {
            Scheme::Rk4 | Scheme::Auto => {
                let mut full = |x: &[SpectralField]| -> Result<Vec<SpectralField>> {
                    let mut n = nonlinear(x)?;
                    for (ni, xi) in n.iter_mut().zip(x) {
                        ni.axpy(1.0, &xi.with_multiplier(linear));
                    }
                    Ok(n)
                };
                let k1 = full(state)?;
                let k2 = full(&combine(state, &[(0.5 * dt, &k1)]))?;
                let k3 = full(&combine(state, &[(0.5 * dt, &k2)]))?;
                let k4 = full(&combine(state, &[(dt, &k3)]))?;
                combine(
                    state,
                    &[
                        (dt / 6.0, &k1),
                        (dt / 3.0, &k2),
                        (dt / 3.0, &k3),
                        (dt / 6.0, &k4),
                    ],
                )
            }
            Scheme::IntegratingFactorRk4 => {
                let half = |ksq: f64| (0.5 * dt * linear(ksq)).exp();
                let full = |ksq: f64| (dt * linear(ksq)).exp();
                let a = nonlinear(state)?;
                let x2 = apply_linear(&combine(state, &[(0.5 * dt, &a)]), &half);
                let b = nonlinear(&x2)?;
                let ex_half = apply_linear(state, &half);
                let x3 = combine(&ex_half, &[(0.5 * dt, &b)]);
                let c = nonlinear(&x3)?;
                let ex_full = apply_linear(state, &full);
                let x4 = combine(&ex_full, &[(dt, &apply_linear(&c, &half))]);
                let d = nonlinear(&x4)?;
                let bc = combine(&b, &[(1.0, &c)]);
                combine(
                    &ex_full,
                    &[
                        (dt / 6.0, &apply_linear(&a, &full)),
                        (dt / 3.0, &apply_linear(&bc, &half)),
                        (dt / 6.0, &d),
                    ],
                )
            }
        };
        *state = next;
        Ok(())
    }
}

/// Output of [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Final velocity (converted from vorticity when that form is advanced).
    pub final_velocity: SpectralField,
    /// Final state in the advanced formulation.
    pub final_state: SpectralField,
    /// `(t, state)` pairs in the advanced formulation.
    pub snapshots: Vec<(f64, SpectralField)>,
    pub series: DiagnosticsSeries,
    pub steps: usize,
    pub warnings: Vec<String>,
}

/// Advances the NSV system from `cfg.initial` to `cfg.t_end` with a fixed
/// step, sampling diagnostics every `cfg.sample_every` steps.
pub fn integrate(cfg: &SimConfig) -> Result<Trajectory> {
    let model = NsvModel::new(cfg)?;
    let u0 = cfg.initial.build(cfg.grid)?;
    let stepper = Stepper::new(cfg.scheme, cfg.alpha, cfg.dt);
    let steps = cfg.steps();
    let linear = |ksq: f64| model.linear_symbol(ksq);

    let mut state = vec![match cfg.formulation {
        Formulation::Velocity => u0,
        Formulation::Vorticity => ops::rot(&u0)?,
    }];
    let velocity_of = |s: &SpectralField| -> Result<SpectralField> {
        match s.role() {
            FieldRole::Velocity => Ok(s.clone()),
            FieldRole::Vorticity => ops::curl_and_stream(s),
        }
    };

    let mut series = DiagnosticsSeries::new(cfg.nu, cfg.alpha, model.forcing_norm());
    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    let mut cfl_warned = false;

    let mut sample = |step: usize,
                      state: &SpectralField,
                      series: &mut DiagnosticsSeries,
                      warnings: &mut Vec<String>|
     -> Result<()> {
        let t = step as f64 * cfg.dt;
        let u = velocity_of(state)?;
        series.push(t, &u, model.forcing(), model.metric());
        let courant = cfg.dt * model.max_speed(&u) * cfg.grid.k_max();
        if courant > 1.0 && !cfl_warned {
            cfl_warned = true;
            let msg = format!("CFL number {courant:.3} > 1 at t = {t} (dt = {})", cfg.dt);
            warn!("{msg}");
            warnings.push(msg);
        }
        Ok(())
    };

    sample(0, &state[0], &mut series, &mut warnings)?;
    if cfg.snapshot_every.is_some() {
        snapshots.push((0.0, state[0].clone()));
    }

    for step in 1..=steps {
        match cfg.formulation {
            Formulation::Velocity => stepper.step(&mut state, &linear, |x| {
                Ok(vec![model.nonlinear_velocity(&x[0])?])
            })?,
            Formulation::Vorticity => stepper.step(&mut state, &linear, |x| {
                Ok(vec![model.nonlinear_vorticity(&x[0])?])
            })?,
        }
        let s = &state[0];
        if !s.is_finite() || s.l2_norm_sq() > 1e200 {
            return Err(Error::Diverged {
                step,
                time: step as f64 * cfg.dt,
            });
        }
        if step % cfg.sample_every == 0 || step == steps {
            sample(step, s, &mut series, &mut warnings)?;
        }
        if let Some(every) = cfg.snapshot_every {
            if step % every == 0 {
                snapshots.push((step as f64 * cfg.dt, s.clone()));
            }
        }
    }

    let final_state = state.pop().expect("one field");
    Ok(Trajectory {
        final_velocity: velocity_of(&final_state)?,
        final_state,
        snapshots,
        series,
        steps,
        warnings,
    })
}

/// One-step defect of the energy identity
/// `d/dt ‖u‖_α² = −2ν‖∇u‖² + 2(g, u)`:
///
/// `‖u₁‖_α² − ‖u₀‖_α² − ∫₀ʰ (−2ν‖∇u‖² + 2(g,u)) dt`,
///
/// where `u₁` is one step of size `h` and the integral is taken by
/// composite Simpson on a reference trajectory with `substeps` steps.
pub fn energy_balance_residual(
    cfg: &SimConfig,
    u0: &SpectralField,
    h: f64,
    substeps: usize,
) -> Result<f64> {
    let model = NsvModel::new(cfg)?;
    let metric = model.metric();
    let linear = |ksq: f64| model.linear_symbol(ksq);
    let rate = |u: &SpectralField| -> f64 {
        -2.0 * model.nu() * u.grad_norm_sq()
            + 2.0 * ops::alpha_inner(model.forcing(), u, crate::spectral::AlphaMetric::l2())
                .expect("same grid")
    };
    let nl = |x: &[SpectralField]| Ok(vec![model.nonlinear_velocity(&x[0])?]);

    let mut coarse = vec![u0.clone()];
    Stepper::new(cfg.scheme, cfg.alpha, h).step(&mut coarse, &linear, nl)?;

    let substeps = substeps + substeps % 2;
    let fine = Stepper::new(cfg.scheme, cfg.alpha, h / substeps as f64);
    let mut state = vec![u0.clone()];
    let mut integral = rate(u0);
    for i in 1..=substeps {
        fine.step(&mut state, &linear, nl)?;
        let w = if i == substeps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += w * rate(&state[0]);
    }
    integral *= h / substeps as f64 / 3.0;

    Ok(coarse[0].alpha_norm_sq(metric) - u0.alpha_norm_sq(metric) - integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ForcingSpec, InitialCondition};
    use crate::spectral::SpectralGrid;

    fn base(n: usize) -> SimConfig {
        SimConfig {
            grid: SpectralGrid::with_resolution(n).unwrap(),
            ..SimConfig::default()
        }
    }

    #[test]
    fn zero_stays_zero() {
        let cfg = SimConfig {
            t_end: 0.1,
            ..base(16)
        };
        let tr = integrate(&cfg).unwrap();
        assert!(tr.final_velocity.is_zero());
        assert!(tr.series.samples.iter().all(|s| s.energy_l2 == 0.0));
    }

    #[test]
    fn schemes_agree_on_linear_decay() {
        for scheme in [Scheme::Rk4, Scheme::IntegratingFactorRk4] {
            let cfg = SimConfig {
                alpha: 0.0,
                nu: 0.5,
                t_end: 0.5,
                dt: 1e-2,
                scheme,
                initial: InitialCondition::Shear {
                    amplitude: 1.0,
                    wavenumber: 2,
                },
                ..base(16)
            };
            let tr = integrate(&cfg).unwrap();
            let expect = (-0.5f64 * 4.0 * 0.5).exp();
            let got = tr.final_velocity.l2_norm_sq().sqrt() / (2.0f64.sqrt() * std::f64::consts::PI);
            assert!((got - expect).abs() < 1e-8, "{scheme:?}: {got} vs {expect}");
        }
    }

    #[test]
    fn blow_up_is_reported() {
        let cfg = SimConfig {
            alpha: 0.0,
            scheme: Scheme::Rk4,
            dt: 1.0,
            t_end: 200.0,
            initial: InitialCondition::Random { seed: 1, norm: 1.0 },
            ..base(16)
        };
        match integrate(&cfg) {
            Err(Error::Diverged { step, .. }) => assert!(step > 0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn vorticity_and_velocity_trajectories_agree() {
        let mk = |formulation| SimConfig {
            alpha: 0.2,
            t_end: 0.2,
            dt: 2e-3,
            formulation,
            forcing: ForcingSpec::Shear {
                amplitude: 1.0,
                wavenumber: 2,
            },
            initial: InitialCondition::Random { seed: 5, norm: 3.0 },
            ..base(16)
        };
        let a = integrate(&mk(Formulation::Velocity)).unwrap();
        let b = integrate(&mk(Formulation::Vorticity)).unwrap();
        let mut d = ops::rot(&a.final_velocity).unwrap();
        d.axpy(-1.0, &b.final_state);
        assert!(d.max_abs_coeff() < 1e-10);
    }
}
