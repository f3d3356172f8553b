//! Suborthonormal families and the density `ρ(x) = Σ_j |u_j(x)|²`.

use std::f64::consts::{E, PI, SQRT_2};

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::bounds::ConstantsTable;
use crate::error::{Error, Result};
use crate::spectral::{ops, AlphaMetric, Fft2, FieldRole, SpectralField, SpectralGrid, TORUS_AREA};
use crate::tangent::orthonormalize;

/// Relative change allowed between the two quadrature grids.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// How a random family is made suborthonormal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Modified Gram–Schmidt in `(·,·)_α`.
    AlphaOrthonormal,
    /// All vectors divided by `√λ_max` of the `L₂` Gram matrix.
    GramScaled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuborthonormalFamily {
    pub vectors: Vec<SpectralField>,
    pub metric: AlphaMetric,
    pub kind: FamilyKind,
    pub seed: u64,
    /// Largest eigenvalue of the `L₂` Gram matrix.
    pub certificate: f64,
}

/// Largest eigenvalue of the `L₂` Gram matrix of `vectors` (0 if empty).
pub fn l2_gram_max_eigenvalue(vectors: &[SpectralField]) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 0.0;
    }
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = ops::alpha_inner(&vectors[i], &vectors[j], AlphaMetric::l2()).expect("same grid");
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    SymmetricEigen::new(g).eigenvalues.max()
}

impl SuborthonormalFamily {
    pub fn from_vectors(vectors: Vec<SpectralField>, metric: AlphaMetric, kind: FamilyKind, seed: u64) -> Self {
        let certificate = l2_gram_max_eigenvalue(&vectors);
        Self {
            vectors,
            metric,
            kind,
            seed,
            certificate,
        }
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn enstrophy_sum(&self) -> f64 {
        self.vectors.iter().map(SpectralField::grad_norm_sq).sum()
    }
}

const MAX_RETRIES: u64 = 8;

/// `n` random fields with Gaussian coefficients decaying like `|k|^{−2}`,
/// made suborthonormal according to `kind`. A degenerate draw is redrawn
/// with the next sub-seed, at most 8 times.
pub fn sample_suborthonormal(
    grid: SpectralGrid,
    role: FieldRole,
    n: usize,
    kind: FamilyKind,
    metric: AlphaMetric,
    seed: u64,
) -> Result<SuborthonormalFamily> {
    // one real degree of freedom per retained mode in either role
    let budget = grid.half_modes().count() * 2;
    if n == 0 || n > budget {
        return Err(Error::invalid("n", format!("must lie in 1..={budget}")));
    }
    let mut last = None;
    for attempt in 0..MAX_RETRIES {
        let base = seed.wrapping_mul(0x9E37_79B9).wrapping_add(attempt << 32);
        let mut vectors: Vec<_> = (0..n as u64)
            .map(|j| SpectralField::random(grid, role, base.wrapping_add(j), 2.0))
            .collect();
        match kind {
            FamilyKind::AlphaOrthonormal => match orthonormalize(&mut vectors, metric) {
                Ok(_) => {}
                Err(e @ Error::DegenerateFrame { .. }) => {
                    last = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            },
            FamilyKind::GramScaled => {
                let top = l2_gram_max_eigenvalue(&vectors);
                if !(top > 0.0) {
                    last = Some(Error::DegenerateFrame { index: 0 });
                    continue;
                }
                let s = 1.0 / top.sqrt();
                vectors.iter_mut().for_each(|v| v.scale(s));
            }
        }
        return Ok(SuborthonormalFamily::from_vectors(vectors, metric, kind, seed));
    }
    Err(last.expect("at least one attempt"))
}

/// `ρ(x) = Σ_j |u_j(x)|²` sampled on an `m × m` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoProfile {
    pub m: usize,
    pub values: Vec<f64>,
}

impl RhoProfile {
    pub fn new(vectors: &[SpectralField], m: usize) -> Self {
        let fft = Fft2::new(m);
        let mut values = vec![0.0; m * m];
        for v in vectors {
            for c in 0..v.components() {
                for (r, x) in values.iter_mut().zip(fft.physical(v, c)) {
                    *r += x * x;
                }
            }
        }
        Self { m, values }
    }

    fn cell(&self) -> f64 {
        TORUS_AREA / (self.m * self.m) as f64
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell()
    }

    /// `∫ρ^p`.
    pub fn integral_pow(&self, p: f64) -> f64 {
        self.values.iter().map(|r| r.powf(p)).sum::<f64>() * self.cell()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|r| r * r).sum::<f64>() * self.cell()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.integral_pow(p).powf(1.0 / p)
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// One inequality evaluated on one family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyCheck {
    pub seed: u64,
    pub n: usize,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Relative change of `lhs` between the `2N` and `4N` grids.
    pub refinement_change: f64,
    pub resolution_ok: bool,
    pub holds: bool,
}

fn check(fam: &SuborthonormalFamily, lhs2: f64, lhs4: f64, rhs: f64) -> FamilyCheck {
    let change = if lhs4 == 0.0 { 0.0 } else { (lhs4 - lhs2).abs() / lhs4.abs() };
    let resolution_ok = change <= QUADRATURE_TOLERANCE;
    if !resolution_ok {
        warn!("quadrature not grid-stable for seed {}: relative change {change:e}", fam.seed);
    }
    let ratio = if rhs == 0.0 && lhs4 == 0.0 { 0.0 } else { lhs4 / rhs };
    FamilyCheck {
        seed: fam.seed,
        n: fam.n(),
        alpha: fam.metric.alpha(),
        lhs: lhs4,
        rhs,
        ratio,
        refinement_change: change,
        resolution_ok,
        holds: ratio <= 1.0 && resolution_ok,
    }
}

fn quadrature_sizes(fam: &SuborthonormalFamily) -> (usize, usize) {
    let n = fam.vectors.first().map_or(16, |v| v.grid().resolution());
    (2 * n, 4 * n)
}

/// `∫ρ² ≤ c_LT Σ‖∇u_j‖²` with `c_LT = 3π/32` on `𝕋²`.
pub fn verify_lieb_thirring(fam: &SuborthonormalFamily) -> Result<FamilyCheck> {
    for v in &fam.vectors {
        v.expect_role(FieldRole::Velocity)?;
    }
    let (a, b) = quadrature_sizes(fam);
    let lhs2 = RhoProfile::new(&fam.vectors, a).integral_pow(2.0);
    let lhs4 = RhoProfile::new(&fam.vectors, b).integral_pow(2.0);
    Ok(check(fam, lhs2, lhs4, ConstantsTable::new().c_lt_t2 * fam.enstrophy_sum()))
}

/// `‖ρ‖ ≤ n^{1/2}/(2√π α^{1/2})` for an α-orthonormal velocity family.
pub fn verify_rho_l2(fam: &SuborthonormalFamily) -> Result<FamilyCheck> {
    let alpha = fam.metric.alpha();
    if !(alpha > 0.0) {
        return Err(Error::invalid("alpha", "must be > 0"));
    }
    let (a, b) = quadrature_sizes(fam);
    let lhs2 = RhoProfile::new(&fam.vectors, a).l2_norm();
    let lhs4 = RhoProfile::new(&fam.vectors, b).l2_norm();
    let rhs = (fam.n() as f64).sqrt() / (2.0 * PI.sqrt() * alpha.sqrt());
    Ok(check(fam, lhs2, lhs4, rhs))
}

/// Right side of the `L∞` bound at integer `Λ ≥ 1`:
/// `4√2π(ln 4eΛ)^{1/2} + 4Λ^{−1/2}(|𝕋²| Σ‖∇φ_j‖²)^{1/2}`.
pub fn rho_linf_rhs(lambda: f64, enstrophy_sum: f64) -> Result<f64> {
    if !(lambda >= 1.0 && lambda.fract() == 0.0) {
        return Err(Error::invalid("Lambda", format!("must be a positive integer, got {lambda}")));
    }
    Ok(4.0 * SQRT_2 * PI * (4.0 * E * lambda).ln().sqrt()
        + 4.0 / lambda.sqrt() * (TORUS_AREA * enstrophy_sum).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoLinfCheck {
    pub check: FamilyCheck,
    /// `Λ` minimising the right side over the scanned range.
    pub best_lambda: u64,
    /// Ratio at every scanned `Λ`.
    pub ratios: Vec<f64>,
}

/// `‖ρ‖_∞^{1/2}` against [`rho_linf_rhs`] for `Λ ∈ lambdas`, where
/// `ρ = Σ|∇^⊥Δ⁻¹φ_j|²` for an α-orthonormal scalar family.
pub fn verify_rho_linf(fam: &SuborthonormalFamily, lambdas: std::ops::RangeInclusive<u64>) -> Result<RhoLinfCheck> {
    let velocities = fam
        .vectors
        .iter()
        .map(ops::curl_and_stream)
        .collect::<Result<Vec<_>>>()?;
    let (a, b) = quadrature_sizes(fam);
    let lhs2 = RhoProfile::new(&velocities, a).linf().sqrt();
    let lhs4 = RhoProfile::new(&velocities, b).linf().sqrt();
    let ens = fam.enstrophy_sum();
    let mut ratios = Vec::new();
    let (mut best, mut best_rhs) = (0, f64::INFINITY);
    for l in lambdas {
        let rhs = rho_linf_rhs(l as f64, ens)?;
        ratios.push(lhs4 / rhs);
        if rhs < best_rhs {
            best_rhs = rhs;
            best = l;
        }
    }
    if ratios.is_empty() {
        return Err(Error::invalid("Lambda", "empty range"));
    }
    // sup over the grid is sampled, not integrated: record the change but
    // judge against the finer grid only
    let mut c = check(fam, lhs2, lhs4, best_rhs);
    c.resolution_ok = true;
    c.holds = c.ratio <= 1.0;
    Ok(RhoLinfCheck {
        check: c,
        best_lambda: best,
        ratios,
    })
}
