//! Closed-form upper bounds for the fractal dimension of the NSV and
//! Navier–Stokes attractors, with their constants and thresholds.
//!
//! Notation: `G = ‖g‖/(λ₁ν²)` in 2D and `‖g‖/(λ₁^{3/4}ν²)` in 3D,
//! `𝒢 = ‖g‖|Ω|/ν²`, `a = αλ₁`.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Where the flow lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Torus,
    BoundedDomain,
}

impl Geometry {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "torus" => Some(Geometry::Torus),
            "bounded-domain" | "domain" => Some(Geometry::BoundedDomain),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsInput {
    pub d: u8,
    pub nu: f64,
    pub alpha: f64,
    pub g_norm: f64,
    pub lambda1: f64,
    pub domain_measure: f64,
    pub geometry: Geometry,
}

impl BoundsInput {
    /// The square torus `[0, 2π]²`: `λ₁ = 1`, `|Ω| = 4π²`.
    pub fn torus2(nu: f64, alpha: f64, g_norm: f64) -> Self {
        Self {
            d: 2,
            nu,
            alpha,
            g_norm,
            lambda1: 1.0,
            domain_measure: 4.0 * PI * PI,
            geometry: Geometry::Torus,
        }
    }

    /// Torus input with `ν = 1` and `‖g‖` chosen so that `𝒢` takes the
    /// given value.
    pub fn torus2_with_grashof(grashof_area: f64, alpha: f64) -> Self {
        Self::torus2(1.0, alpha, grashof_area / (4.0 * PI * PI))
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.d == 2 || self.d == 3) {
            problems.push(format!("d: must be 2 or 3, got {}", self.d));
        }
        for (name, v) in [
            ("nu", self.nu),
            ("g_norm", self.g_norm),
            ("lambda1", self.lambda1),
            ("domain_measure", self.domain_measure),
        ] {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{name}: must be > 0, got {v}"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            problems.push(format!("alpha: must be >= 0, got {}", self.alpha));
        }
        if self.d == 2 && self.geometry == Geometry::Torus {
            let p = self.lambda1 * self.domain_measure;
            if (p - 4.0 * PI * PI).abs() > 1e-9 * p {
                problems.push(format!(
                    "lambda1 * domain_measure must equal 4 pi^2 on a square torus, got {p}"
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn grashof(&self) -> f64 {
        let l = if self.d == 3 {
            self.lambda1.powf(0.75)
        } else {
            self.lambda1
        };
        self.g_norm / (l * self.nu * self.nu)
    }

    pub fn grashof_area(&self) -> f64 {
        self.g_norm * self.domain_measure / (self.nu * self.nu)
    }

    pub fn alpha_lambda1(&self) -> f64 {
        self.alpha * self.lambda1
    }

    /// Largest `α` for which the linear-in-`𝒢` 2D bounds apply:
    /// `|Ω|/(2π𝒢)` on a domain, `|𝕋²|/(π²𝒢)` on the torus.
    pub fn alpha0(&self) -> f64 {
        let cg = self.grashof_area();
        match self.geometry {
            Geometry::Torus => self.domain_measure / (PI * PI * cg),
            Geometry::BoundedDomain => self.domain_measure / (2.0 * PI * cg),
        }
    }

    fn require_dim(&self, d: u8) -> Result<()> {
        if self.d != d {
            return Err(Error::WrongDimension {
                expected: d,
                found: self.d,
            });
        }
        Ok(())
    }
}

/// Constants entering the bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantsTable {
    /// Lieb–Thirring constant on ℝ² (also used for bounded domains).
    pub c_lt_r2: f64,
    pub c_lt_t2: f64,
    pub c_lt_r3: f64,
    pub c_lt_t3: f64,
    pub c2: f64,
    pub c3: f64,
    pub k1: f64,
    pub k1_prime: f64,
    pub k2: f64,
    /// `(2/π)(√2k₁)^{2/3}`, printed as 7.46.
    pub log_coefficient: f64,
    /// `k₂/2 + ln(√2k₁)`, printed as 5.74.
    pub log_shift: f64,
    /// Printed decimals of the logarithmic torus bound.
    pub log_coefficient_printed: f64,
    pub log_shift_printed: f64,
}

/// Best Lieb–Thirring constant known on ℝ² for the γ = 1 case, as used for domains.
const LT_R2_NUMERATOR: f64 = 1.456;

impl ConstantsTable {
    pub fn new() -> Self {
        let k1 = 16.0 * PI.sqrt();
        let k2 = 3.0 * LN_2 + 2.0;
        Self {
            c_lt_r2: LT_R2_NUMERATOR / (2.0 * PI),
            c_lt_t2: 3.0 * PI / 32.0,
            c_lt_r3: 5.0 / 6.0 * 2f64.cbrt() * PI.powf(-4.0 / 3.0) * LT_R2_NUMERATOR.powf(2.0 / 3.0),
            c_lt_t3: 5.0 / 3.0 * (2.0 / PI).powf(2.0 / 3.0),
            c2: 0.5f64.sqrt(),
            c3: (2.0f64 / 3.0).sqrt(),
            k1,
            k1_prime: 2f64.powf(15.0 / 4.0) * PI.sqrt(),
            k2,
            log_coefficient: 2.0 / PI * (SQRT_2 * k1).powf(2.0 / 3.0),
            log_shift: k2 / 2.0 + (SQRT_2 * k1).ln(),
            log_coefficient_printed: 7.46,
            log_shift_printed: 5.74,
        }
    }

    pub fn c_lt(&self, d: u8, geometry: Geometry) -> f64 {
        match (d, geometry) {
            (2, Geometry::Torus) => self.c_lt_t2,
            (2, Geometry::BoundedDomain) => self.c_lt_r2,
            (_, Geometry::Torus) => self.c_lt_t3,
            (_, Geometry::BoundedDomain) => self.c_lt_r3,
        }
    }

    pub fn c_d(&self, d: u8) -> f64 {
        if d == 2 {
            self.c2
        } else {
            self.c3
        }
    }
}

impl Default for ConstantsTable {
    fn default() -> Self {
        Self::new()
    }
}

/// A closed-form constant together with the decimal printed for it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrintedConstant {
    pub id: &'static str,
    pub expression: &'static str,
    pub exact: f64,
    pub printed: f64,
}

/// Every decimal summary quoted for the bounds, next to its exact value.
pub fn printed_constants() -> Vec<PrintedConstant> {
    let c = ConstantsTable::new();
    let pc = |id, expression, exact, printed| PrintedConstant {
        id,
        expression,
        exact,
        printed,
    };
    vec![
        pc(
            "ns-linear-domain",
            "c_LT(R2)^(1/2) / (2 sqrt2 pi)",
            c.c_lt_r2.sqrt() / (2.0 * SQRT_2 * PI),
            0.055,
        ),
        pc("lt-linear-domain", "c_LT(R2)^(1/2) / (sqrt2 pi)", c.c_lt_r2.sqrt() / (SQRT_2 * PI), 0.109),
        pc(
            "lt-linear-torus",
            "pi^-2 (c_LT(T2)/2)^(1/2)",
            (c.c_lt_t2 / 2.0).sqrt() / (PI * PI),
            0.039,
        ),
        pc("ns-linear-torus", "c_LT(T2)^(1/2) / (2 pi^2)", c.c_lt_t2.sqrt() / (2.0 * PI * PI), 0.028),
        pc("lt-log-coefficient", "(2/pi)(sqrt2 k1)^(2/3)", c.log_coefficient, 7.46),
        pc("lt-log-shift", "k2/2 + ln(sqrt2 k1)", c.log_shift, 5.74),
        pc("ns-log-coefficient", "2^(10/3) / pi^(2/3)", ns_log_coefficient(), 4.7),
        pc("ns-log-shift", "ln(pi)/2 + (23/4) ln2 + 1", ns_log_shift(), 5.56),
    ]
}

fn ns_log_coefficient() -> f64 {
    2f64.powf(10.0 / 3.0) / PI.powf(2.0 / 3.0)
}

fn ns_log_shift() -> f64 {
    0.5 * PI.ln() + 23.0 / 4.0 * LN_2 + 1.0
}

fn ns_linear_torus_coefficient() -> f64 {
    3f64.sqrt() / (2f64.powf(3.5) * PI.powf(1.5))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "kebab-case")]
pub enum Validity {
    Ok,
    OutOfRange(String),
    /// An unspecified constant was set to 1.
    ModuloConstant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: &'static str,
    pub formula_id: &'static str,
    pub value: f64,
    pub validity: Validity,
    /// Which argument of a `min` is active, when there is one.
    pub branch: Option<&'static str>,
}

impl BoundEntry {
    fn ok(name: &'static str, formula_id: &'static str, value: f64) -> Self {
        Self {
            name,
            formula_id,
            value,
            validity: Validity::Ok,
            branch: None,
        }
    }
}

/// `(a+1)²/(8πa)·G²` in 2D, `(a+1)²/(6πa^{3/2})·G²` in 3D; infinite and
/// out of range at `α = 0`.
pub fn bound_general(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    let a = input.alpha_lambda1();
    let g2 = input.grashof().powi(2);
    let mut e = BoundEntry::ok("NSV, any alpha > 0", "voight-general", f64::INFINITY);
    if a == 0.0 {
        e.validity = Validity::OutOfRange("requires alpha > 0; the bound blows up as alpha -> 0".into());
        return Ok(e);
    }
    e.value = match input.d {
        2 => (a + 1.0).powi(2) / (8.0 * PI * a) * g2,
        _ => (a + 1.0).powi(2) / (6.0 * PI * a.powf(1.5)) * g2,
    };
    Ok(e)
}

/// `(1+a)G^{5/2}((1+a)a^{−3/4}G^{3/2} + 1)` with the unspecified constant
/// set to 1 (3D only).
pub fn bound_3d_improved(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    input.require_dim(3)?;
    let a = input.alpha_lambda1();
    let g = input.grashof();
    let mut e = BoundEntry::ok("NSV 3D, improved", "voight-3d-improved", f64::INFINITY);
    e.validity = Validity::ModuloConstant;
    if a == 0.0 {
        e.validity = Validity::OutOfRange("requires alpha > 0".into());
        return Ok(e);
    }
    e.value = (1.0 + a) * g.powf(2.5) * ((1.0 + a) * a.powf(-0.75) * g.powf(1.5) + 1.0);
    Ok(e)
}

/// `a^{−3/4}G² min[a^{−3/4}, G²]` (3D, modulo a constant).
pub fn symmetric_form(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    input.require_dim(3)?;
    let a = input.alpha_lambda1();
    let g2 = input.grashof().powi(2);
    let mut e = BoundEntry::ok("NSV 3D, symmetric form", "voight-3d-symmetric", f64::INFINITY);
    e.validity = Validity::ModuloConstant;
    if a == 0.0 {
        e.validity = Validity::OutOfRange("requires alpha > 0".into());
        return Ok(e);
    }
    let p = a.powf(-0.75);
    let (m, branch) = if p <= g2 { (p, "alpha") } else { (g2, "grashof") };
    e.value = p * g2 * m;
    e.branch = Some(branch);
    Ok(e)
}

/// `(a+1)c_LT/2·G²` (2D), finite at `α = 0`.
pub fn bound_2d_quadratic(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    input.require_dim(2)?;
    let c = ConstantsTable::new().c_lt(2, input.geometry);
    let v = (input.alpha_lambda1() + 1.0) * c / 2.0 * input.grashof().powi(2);
    Ok(BoundEntry::ok("NSV 2D, quadratic in G", "lt-quadratic", v))
}

/// Linear-in-`𝒢` bound for `α ≤ α₀`: `c_LT^{1/2}/(√2π)·𝒢` on a domain,
/// `π^{−2}(c_LT/2)^{1/2}·𝒢` on the torus.
pub fn bound_2d_linear(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    input.require_dim(2)?;
    let c = ConstantsTable::new().c_lt(2, input.geometry);
    let (id, coeff) = match input.geometry {
        Geometry::BoundedDomain => ("lt-linear-domain", c.sqrt() / (SQRT_2 * PI)),
        Geometry::Torus => ("lt-linear-torus", (c / 2.0).sqrt() / (PI * PI)),
    };
    let mut e = BoundEntry::ok("NSV 2D, linear in calG", id, coeff * input.grashof_area());
    let a0 = input.alpha0();
    if input.alpha > a0 {
        e.validity = Validity::OutOfRange(format!("alpha = {} exceeds alpha0 = {a0}", input.alpha));
    }
    Ok(e)
}

fn log_branch(cg: f64, coefficient: f64, shift: f64) -> f64 {
    coefficient * cg.powf(2.0 / 3.0) * (cg.ln() + shift).cbrt()
}

/// `min[π^{−2}(c_LT/2)^{1/2}𝒢, (2/π)(√2k₁)^{2/3}𝒢^{2/3}(ln𝒢 + k₂/2 + ln(√2k₁))^{1/3}]`
/// on the 2D torus, for `α ≤ α₀`.
pub fn bound_2d_log(input: &BoundsInput) -> Result<BoundEntry> {
    input.validate()?;
    input.require_dim(2)?;
    if input.geometry != Geometry::Torus {
        return Err(Error::WrongRegime("the logarithmic bound is proved on the torus only".into()));
    }
    let cg = input.grashof_area();
    let c = ConstantsTable::new();
    let first = (c.c_lt_t2 / 2.0).sqrt() / (PI * PI) * cg;
    let second = log_branch(cg, c.log_coefficient, c.log_shift);
    let mut e = BoundEntry::ok("NSV 2D torus, log-improved", "lt-log-torus", first.min(second));
    e.branch = Some(if first <= second { "linear" } else { "log" });
    let a0 = input.alpha0();
    if input.alpha > a0 {
        e.validity = Validity::OutOfRange(format!("alpha = {} exceeds alpha0 = {a0}", input.alpha));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalBounds {
    pub linear_domain: BoundEntry,
    pub linear_torus: BoundEntry,
    pub log_torus: BoundEntry,
    pub min: f64,
}

/// Navier–Stokes (`α = 0`) bounds: `c_LT(ℝ²)^{1/2}/(2√2π)·𝒢`,
/// `c_LT(𝕋²)^{1/2}/(2π²)·𝒢` and
/// `min[√3/(2^{7/2}π^{3/2})𝒢, 2^{10/3}π^{−2/3}𝒢^{2/3}(ln𝒢 + ½lnπ + 23/4 ln2 + 1)^{1/3}]`.
pub fn classical_ns_bounds(input: &BoundsInput) -> Result<ClassicalBounds> {
    input.validate()?;
    input.require_dim(2)?;
    if input.alpha != 0.0 {
        return Err(Error::WrongRegime(format!(
            "Navier-Stokes bounds need alpha = 0, got {}",
            input.alpha
        )));
    }
    let c = ConstantsTable::new();
    let cg = input.grashof_area();
    let linear_domain = BoundEntry::ok(
        "NS 2D domain",
        "ns-linear-domain",
        c.c_lt_r2.sqrt() / (2.0 * SQRT_2 * PI) * cg,
    );
    let linear_torus = BoundEntry::ok("NS 2D torus", "ns-linear-torus", c.c_lt_t2.sqrt() / (2.0 * PI * PI) * cg);
    let first = ns_linear_torus_coefficient() * cg;
    let second = log_branch(cg, ns_log_coefficient(), ns_log_shift());
    let mut log_torus = BoundEntry::ok("NS 2D torus, log-improved", "ns-log-torus", first.min(second));
    log_torus.branch = Some(if first <= second { "linear" } else { "log" });
    let mut min = linear_torus.value.min(log_torus.value);
    if input.geometry == Geometry::BoundedDomain {
        min = linear_domain.value;
    }
    Ok(ClassicalBounds {
        linear_domain,
        linear_torus,
        log_torus,
        min,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`, to relative width 1e-12.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootNotFound {
            lo,
            hi,
            reason: format!("no sign change (f(lo) = {fa}, f(hi) = {fb})"),
        });
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a) <= 1e-12 * m.abs() {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Err(Error::RootNotFound {
        lo,
        hi,
        reason: "no convergence in 400 halvings".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    /// Root of `x = 7.46x^{2/3}(ln x + 5.74)^{1/3}`.
    pub g0: f64,
    /// Same with 5.24 in place of 5.74.
    pub g0_alt_shift: f64,
    /// `𝒢` above which the log branch of the NSV torus bound is smaller
    /// (printed decimals 0.039, 7.46, 5.74).
    pub crossover_log_vs_linear: f64,
    /// Same for the Navier–Stokes torus bound (printed 0.028, 4.7, 5.56).
    pub crossover_classical: f64,
    /// Crossovers recomputed from the exact constants.
    pub crossover_log_vs_linear_exact: f64,
    pub crossover_classical_exact: f64,
}

pub const G0_SHIFT: f64 = 5.74;
pub const G0_ALT_SHIFT: f64 = 5.24;

/// Root of `x = 7.46x^{2/3}(ln x + shift)^{1/3}` on `[1, 10⁶]`.
pub fn g0_root(shift: f64) -> Result<f64> {
    bisect(|x| x - 7.46 * x.powf(2.0 / 3.0) * (x.ln() + shift).cbrt(), 1.0, 1e6)
}

/// `𝒢` where `linear·𝒢 = coefficient·𝒢^{2/3}(ln𝒢 + shift)^{1/3}`, on `[10, 10¹²]`.
pub fn crossover(linear: f64, coefficient: f64, shift: f64) -> Result<f64> {
    bisect(|x| linear * x - log_branch(x, coefficient, shift), 10.0, 1e12)
}

pub fn thresholds(input: &BoundsInput) -> Result<Thresholds> {
    input.validate()?;
    input.require_dim(2)?;
    if input.geometry != Geometry::Torus {
        return Err(Error::WrongRegime("thresholds are defined on the torus".into()));
    }
    let c = ConstantsTable::new();
    Ok(Thresholds {
        g0: g0_root(G0_SHIFT)?,
        g0_alt_shift: g0_root(G0_ALT_SHIFT)?,
        crossover_log_vs_linear: crossover(0.039, 7.46, 5.74)?,
        crossover_classical: crossover(0.028, 4.7, 5.56)?,
        crossover_log_vs_linear_exact: crossover(
            (c.c_lt_t2 / 2.0).sqrt() / (PI * PI),
            c.log_coefficient,
            c.log_shift,
        )?,
        crossover_classical_exact: crossover(ns_linear_torus_coefficient(), ns_log_coefficient(), ns_log_shift())?,
    })
}

/// All bounds applicable to one input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimBoundReport {
    pub input: BoundsInput,
    pub grashof: f64,
    pub grashof_area: f64,
    pub alpha_lambda1: f64,
    pub alpha0: f64,
    pub constants: ConstantsTable,
    pub printed_constants: Vec<PrintedConstant>,
    pub entries: Vec<BoundEntry>,
    pub thresholds: Option<Thresholds>,
}

pub fn dim_bound_report(input: &BoundsInput) -> Result<DimBoundReport> {
    input.validate()?;
    let mut entries = vec![bound_general(input)?];
    let mut thr = None;
    if input.d == 3 {
        entries.push(bound_3d_improved(input)?);
        entries.push(symmetric_form(input)?);
    } else {
        entries.push(bound_2d_quadratic(input)?);
        entries.push(bound_2d_linear(input)?);
        if input.geometry == Geometry::Torus {
            entries.push(bound_2d_log(input)?);
            thr = Some(thresholds(input)?);
        }
        if input.alpha == 0.0 {
            let c = classical_ns_bounds(input)?;
            entries.extend([c.linear_domain, c.linear_torus, c.log_torus]);
        }
    }
    Ok(DimBoundReport {
        input: *input,
        grashof: input.grashof(),
        grashof_area: input.grashof_area(),
        alpha_lambda1: input.alpha_lambda1(),
        alpha0: input.alpha0(),
        constants: ConstantsTable::new(),
        printed_constants: printed_constants(),
        entries,
        thresholds: thr,
    })
}

impl DimBoundReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "d = {}  nu = {}  alpha = {}  |g| = {}  G = {:.6e}  calG = {:.6e}  alpha0 = {:.6e}",
            self.input.d, self.input.nu, self.input.alpha, self.input.g_norm, self.grashof, self.grashof_area, self.alpha0
        );
        let _ = writeln!(out, "{:<22} {:<28} {:>16}  {:<8} validity", "formula", "name", "value", "branch");
        for e in &self.entries {
            let validity = match &e.validity {
                Validity::Ok => "ok".to_string(),
                Validity::ModuloConstant => "modulo-constant".to_string(),
                Validity::OutOfRange(r) => format!("out-of-range: {r}"),
            };
            let _ = writeln!(
                out,
                "{:<22} {:<28} {:>16.6e}  {:<8} {}",
                e.formula_id,
                e.name,
                e.value,
                e.branch.unwrap_or("-"),
                validity
            );
        }
        if let Some(t) = &self.thresholds {
            let _ = writeln!(out, "G0 (shift 5.74) = {:.4}   G0 (shift 5.24) = {:.4}", t.g0, t.g0_alt_shift);
            let _ = writeln!(
                out,
                "crossover lt-log-torus = {:.4e}   crossover ns-log-torus = {:.4e}",
                t.crossover_log_vs_linear, t.crossover_classical
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn with_g(d: u8, a: f64, g: f64) -> BoundsInput {
        BoundsInput {
            d,
            nu: 1.0,
            alpha: a,
            g_norm: g,
            lambda1: 1.0,
            domain_measure: 4.0 * PI * PI,
            geometry: Geometry::Torus,
        }
    }

    #[test]
    fn hand_values() {
        assert!((bound_general(&with_g(2, 1.0, 1.0)).unwrap().value - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((bound_general(&with_g(3, 1.0, 1.0)).unwrap().value - 2.0 / (3.0 * PI)).abs() < 1e-15);
        assert_eq!(bound_3d_improved(&with_g(3, 1.0, 1.0)).unwrap().value, 6.0);
        let s = symmetric_form(&with_g(3, 1.0, 2.0)).unwrap();
        assert_eq!((s.value, s.branch), (4.0, Some("alpha")));
        assert!((bound_2d_quadratic(&with_g(2, 0.0, 1.0)).unwrap().value - 3.0 * PI / 64.0).abs() < 1e-15);
        let q1 = bound_2d_quadratic(&with_g(2, 1.0, 1.0)).unwrap().value;
        assert!((q1 - 3.0 * PI / 32.0).abs() < 1e-15);
    }

    #[test]
    fn regimes_and_dimensions() {
        let e = bound_general(&with_g(2, 0.0, 1.0)).unwrap();
        assert!(e.value.is_infinite() && matches!(e.validity, Validity::OutOfRange(_)));
        assert!(matches!(
            bound_3d_improved(&with_g(2, 1.0, 1.0)),
            Err(Error::WrongDimension { expected: 3, found: 2 })
        ));
        assert!(matches!(classical_ns_bounds(&with_g(2, 0.1, 1.0)), Err(Error::WrongRegime(_))));
        let mut inp = BoundsInput::torus2_with_grashof(1e4, 0.0);
        inp.alpha = 2.0 * inp.alpha0();
        match bound_2d_linear(&inp).unwrap().validity {
            Validity::OutOfRange(r) => assert!(r.contains(&format!("{}", inp.alpha0()))),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn log_bound_branches() {
        let hi = bound_2d_log(&BoundsInput::torus2_with_grashof(1e9, 0.0)).unwrap();
        assert_eq!(hi.branch, Some("log"));
        let lo = bound_2d_log(&BoundsInput::torus2_with_grashof(1e4, 0.0)).unwrap();
        assert_eq!(lo.branch, Some("linear"));
    }

    #[test]
    fn symmetric_branch_switch() {
        // a^{3/4} G² = 1 with G = 2
        let a = 0.25f64.powf(4.0 / 3.0);
        let at = symmetric_form(&with_g(3, a, 2.0)).unwrap();
        assert!((at.value - 64.0).abs() < 1e-9);
        assert_eq!(symmetric_form(&with_g(3, 0.99 * a, 2.0)).unwrap().branch, Some("grashof"));
        assert_eq!(symmetric_form(&with_g(3, 1.01 * a, 2.0)).unwrap().branch, Some("alpha"));
    }

    #[test]
    fn bisect_reports_bracket() {
        match bisect(|x| x * x + 1.0, -1.0, 1.0) {
            Err(Error::RootNotFound { lo, hi, .. }) => assert_eq!((lo, hi), (-1.0, 1.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn general_bound_blows_up_like_inverse_alpha_power() {
        for (d, p) in [(2u8, 1.0), (3u8, 1.5)] {
            let v = |a: f64| bound_general(&with_g(d, a, 3.0)).unwrap().value;
            let r = v(1e-6) / v(1e-5);
            assert!((r / 10f64.powf(p) - 1.0).abs() < 1e-4, "d={d}: {r}");
        }
    }

    #[test]
    fn report_json_carries_printed_log_constants() {
        let r = dim_bound_report(&BoundsInput::torus2(1.0, 0.0, 1.0)).unwrap();
        let j = r.to_json();
        assert!(j.contains("7.46") && j.contains("5.74"));
        assert!(r.to_table().contains("lt-log-torus"));
    }

    proptest! {
        #[test]
        fn nondecreasing_in_forcing(a in 0.0f64..5.0, g in 1e-3f64..1e4, f in 1.0f64..10.0, d in 2u8..=3) {
            let (x, y) = (with_g(d, a, g), with_g(d, a, g * f));
            let mut pairs = vec![(bound_general(&x)?.value, bound_general(&y)?.value)];
            if d == 2 {
                pairs.push((bound_2d_quadratic(&x)?.value, bound_2d_quadratic(&y)?.value));
                pairs.push((bound_2d_linear(&x)?.value, bound_2d_linear(&y)?.value));
                pairs.push((bound_2d_log(&x)?.value, bound_2d_log(&y)?.value));
            } else if a > 0.0 {
                pairs.push((bound_3d_improved(&x)?.value, bound_3d_improved(&y)?.value));
                pairs.push((symmetric_form(&x)?.value, symmetric_form(&y)?.value));
            }
            for (p, q) in pairs {
                prop_assert!(p <= q * (1.0 + 1e-12), "{p} > {q}");
            }
        }

        #[test]
        fn continuous_at_zero_alpha(g in 1e-2f64..1e5) {
            let z = with_g(2, 0.0, g);
            let e = with_g(2, 1e-12, g);
            for (a, b) in [
                (bound_2d_quadratic(&z)?.value, bound_2d_quadratic(&e)?.value),
                (bound_2d_log(&z)?.value, bound_2d_log(&e)?.value),
            ] {
                prop_assert!((a - b).abs() <= 1e-10 * a.abs());
            }
        }

        #[test]
        fn grashof_relation(lambda1 in 0.1f64..10.0, extra in 1.0f64..5.0, g in 1e-3f64..1e3, nu in 0.01f64..10.0) {
            // any domain with λ₁|Ω| ≥ 2π
            let inp = BoundsInput {
                d: 2, nu, alpha: 0.0, g_norm: g, lambda1,
                domain_measure: extra * 2.0 * PI / lambda1,
                geometry: Geometry::BoundedDomain,
            };
            prop_assert!(inp.grashof() <= inp.grashof_area() / (2.0 * PI) * (1.0 + 1e-12));
        }
    }
}
