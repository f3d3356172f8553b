//! The Laplacian spectrum on `[0, 2π]²`: eigenvalues are `|k|²`,
//! `k ∈ ℤ² \ {0}`, repeated with multiplicity.

use std::f64::consts::{E, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `N(E) = #{k ∈ ℤ² : 0 < |k|² ≤ E}`.
pub fn lattice_count(e: f64) -> u64 {
    if !(e >= 1.0) {
        return 0;
    }
    let m = e.floor() as u64;
    let r = isqrt(m) as i64;
    let disk: u64 = (-r..=r).map(|k1| 2 * isqrt(m - (k1 * k1) as u64) + 1).sum();
    disk - 1
}

/// Multiplicities `c[m] = #{k : |k|² = m}` for `m ≤ max_e`, with the
/// cumulative counts `N(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpectrum {
    max_e: u64,
    mult: Vec<u32>,
    cumulative: Vec<u64>,
}

impl LatticeSpectrum {
    pub fn up_to(max_e: u64) -> Self {
        let mut mult = vec![0u32; max_e as usize + 1];
        let r = isqrt(max_e) as i64;
        for k1 in -r..=r {
            let rest = max_e - (k1 * k1) as u64;
            let s = isqrt(rest) as i64;
            for k2 in -s..=s {
                mult[(k1 * k1 + k2 * k2) as usize] += 1;
            }
        }
        mult[0] = 0;
        let mut cumulative = Vec::with_capacity(mult.len());
        let mut acc = 0u64;
        for &c in &mult {
            acc += c as u64;
            cumulative.push(acc);
        }
        Self { max_e, mult, cumulative }
    }

    /// Smallest table containing at least `j_max` eigenvalues.
    pub fn with_count(j_max: u64) -> Self {
        let mut e = (j_max as f64 / PI + 4.0 * (j_max as f64).sqrt() + 4.0) as u64;
        while lattice_count(e as f64) < j_max {
            e *= 2;
        }
        Self::up_to(e)
    }

    pub fn max_e(&self) -> u64 {
        self.max_e
    }

    /// `N(m)` for integer `m ≤ max_e`.
    pub fn count(&self, m: u64) -> u64 {
        self.cumulative[m as usize]
    }

    pub fn multiplicity(&self, m: u64) -> u32 {
        self.mult[m as usize]
    }

    /// Number of eigenvalues stored.
    pub fn len(&self) -> u64 {
        *self.cumulative.last().expect("nonempty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `λ_j`, 1-based.
    pub fn eigenvalue(&self, j: u64) -> Option<u64> {
        if j == 0 || j > self.len() {
            return None;
        }
        Some(self.cumulative.partition_point(|&n| n < j) as u64)
    }

    /// Eigenvalues in nondecreasing order, with multiplicity.
    pub fn eigenvalues(&self) -> impl Iterator<Item = u64> + '_ {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(m, &c)| std::iter::repeat_n(m as u64, c as usize))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumViolation {
    pub check: &'static str,
    /// `j` or `E`.
    pub index: u64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub j_max: u64,
    pub e_max: u64,
    /// `min_j λ_j / (j/4)`.
    pub lower_ratio_min: f64,
    pub lower_ratio_argmin: u64,
    /// `max_{j≥2} λ_j / (j/2)`.
    pub upper_ratio_max: f64,
    pub upper_ratio_argmax: u64,
    /// `max_E N(E)/(4E)`.
    pub count_ratio_max: f64,
    /// Smallest `E ≥ 2` with `N(E) ≥ 2E`: the counting form `N(E) < 2E`
    /// does not hold as printed, the eigenvalue bound is checked directly.
    pub count_half_counterexample: Option<(u64, u64)>,
    pub violations: Vec<SpectrumViolation>,
    pub pass: bool,
}

/// Checks `λ_j ≥ j/4` (`j ≤ j_max`), `λ_j ≤ j/2` (`2 ≤ j ≤ j_max`),
/// `N(E) ≤ 4E` and `π(√E − √2/2)² ≤ N(E)+1 ≤ π(√E + √2/2)²` for integer
/// `1 ≤ E ≤ e_max`.
pub fn verify_eigenvalue_bounds(j_max: u64, e_max: u64) -> Result<SpectrumReport> {
    if j_max < 2 {
        return Err(Error::invalid("j_max", "must be >= 2"));
    }
    if e_max < 1 {
        return Err(Error::invalid("e_max", "must be >= 1"));
    }
    let spec = LatticeSpectrum::with_count(j_max);
    let spec = if spec.max_e() < e_max {
        LatticeSpectrum::up_to(e_max)
    } else {
        spec
    };
    let mut violations = Vec::new();
    let (mut lo, mut lo_arg) = (f64::INFINITY, 0);
    let (mut hi, mut hi_arg) = (0.0f64, 0);
    for (i, lam) in spec.eigenvalues().take(j_max as usize).enumerate() {
        let j = i as u64 + 1;
        let lam = lam as f64;
        let lower = j as f64 / 4.0;
        if lam / lower < lo {
            lo = lam / lower;
            lo_arg = j;
        }
        if lam < lower {
            violations.push(SpectrumViolation {
                check: "lambda_j >= j/4",
                index: j,
                value: lam,
                bound: lower,
            });
        }
        if j >= 2 {
            let upper = j as f64 / 2.0;
            if lam / upper > hi {
                hi = lam / upper;
                hi_arg = j;
            }
            if lam > upper {
                violations.push(SpectrumViolation {
                    check: "lambda_j <= j/2",
                    index: j,
                    value: lam,
                    bound: upper,
                });
            }
        }
    }
    let mut count_ratio_max: f64 = 0.0;
    let mut half = None;
    for e in 1..=e_max {
        let n = spec.count(e);
        let ef = e as f64;
        count_ratio_max = count_ratio_max.max(n as f64 / (4.0 * ef));
        if n as f64 > 4.0 * ef {
            violations.push(SpectrumViolation {
                check: "N(E) <= 4E",
                index: e,
                value: n as f64,
                bound: 4.0 * ef,
            });
        }
        if half.is_none() && e >= 2 && n >= 2 * e {
            half = Some((e, n));
        }
        let below = PI * (ef.sqrt() - SQRT_2 / 2.0).powi(2);
        let above = PI * (ef.sqrt() + SQRT_2 / 2.0).powi(2);
        let disk = (n + 1) as f64;
        if disk < below || disk > above {
            violations.push(SpectrumViolation {
                check: "pi(sqrt E -+ sqrt2/2)^2 sandwich",
                index: e,
                value: disk,
                bound: if disk < below { below } else { above },
            });
        }
    }
    Ok(SpectrumReport {
        j_max,
        e_max,
        lower_ratio_min: lo,
        lower_ratio_argmin: lo_arg,
        upper_ratio_max: hi,
        upper_ratio_argmax: hi_arg,
        count_ratio_max,
        count_half_counterexample: half,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiYauReport {
    pub m_max: u64,
    /// `min_m Σ_{j≤m} λ_j / (m²/2π)`.
    pub min_ratio: f64,
    pub argmin: u64,
    pub ratio_at_m_max: f64,
    pub violations: Vec<SpectrumViolation>,
    pub pass: bool,
}

/// `Σ_{j≤m} λ_j ≥ (2π/|𝕋²|)m² = m²/(2π)` and `λ_m ≥ m/(2π)` for `m ≤ m_max`.
pub fn verify_liyau(m_max: u64) -> Result<LiYauReport> {
    if m_max < 1 {
        return Err(Error::invalid("m_max", "must be >= 1"));
    }
    let spec = LatticeSpectrum::with_count(m_max);
    let mut violations = Vec::new();
    let mut sum = 0u64;
    let (mut min_ratio, mut argmin, mut last) = (f64::INFINITY, 0, 0.0);
    for (i, lam) in spec.eigenvalues().take(m_max as usize).enumerate() {
        let m = i as u64 + 1;
        sum += lam;
        let bound = (m * m) as f64 / (2.0 * PI);
        let r = sum as f64 / bound;
        last = r;
        if r < min_ratio {
            min_ratio = r;
            argmin = m;
        }
        if (sum as f64) < bound {
            violations.push(SpectrumViolation {
                check: "sum lambda_j >= m^2/(2 pi)",
                index: m,
                value: sum as f64,
                bound,
            });
        }
        if (lam as f64) < m as f64 / (2.0 * PI) {
            violations.push(SpectrumViolation {
                check: "lambda_m >= m/(2 pi)",
                index: m,
                value: lam as f64,
                bound: m as f64 / (2.0 * PI),
            });
        }
    }
    Ok(LiYauReport {
        m_max,
        min_ratio,
        argmin,
        ratio_at_m_max: last,
        pass: violations.is_empty(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSumsReport {
    pub lambda_max: u64,
    /// Enumeration depth for the tail sum.
    pub e_max: u64,
    /// `max_Λ Σ_{λ≤Λ} λ⁻¹ / (4 ln 4eΛ)`.
    pub inverse_ratio_max: f64,
    /// `max_Λ (Σ_{λ>Λ} λ⁻²)_upper / (8/Λ)` with a rigorous tail bound.
    pub inverse_square_ratio_max: f64,
    pub at_one: (f64, f64),
    pub pass: bool,
}

/// `Σ_{λ_j≤Λ} λ_j⁻¹`, exact.
pub fn sum_inverse_below(spec: &LatticeSpectrum, lambda: u64) -> f64 {
    (1..=lambda.min(spec.max_e()))
        .map(|m| spec.multiplicity(m) as f64 / m as f64)
        .sum()
}

/// Upper bound for `Σ_{|k|²>a} |k|⁻⁴` from `N(s) + 1 ≤ π(√s + √2/2)²`:
/// `2π[1/a + (2√2/3)a^{−3/2} + a^{−2}/4] − N(a)/a²`.
pub fn inverse_square_tail_bound(a: u64, n_a: u64) -> f64 {
    let a = a as f64;
    2.0 * PI * (1.0 / a + 2.0 * SQRT_2 / 3.0 * a.powf(-1.5) + 0.25 / (a * a)) - n_a as f64 / (a * a)
}

/// `Σ_{λ≤Λ} λ⁻¹ < 4 ln 4eΛ` and `Σ_{λ>Λ} λ⁻² < 8/Λ` for `1 ≤ Λ ≤ lambda_max`;
/// the second sum is enumerated up to `e_max` and closed with
/// [`inverse_square_tail_bound`].
pub fn verify_spectral_sums(lambda_max: u64, e_max: u64) -> Result<SpectralSumsReport> {
    if lambda_max < 1 || e_max <= lambda_max {
        return Err(Error::invalid("e_max", "need 1 <= lambda_max < e_max"));
    }
    let spec = LatticeSpectrum::up_to(e_max);
    let tail = inverse_square_tail_bound(e_max, spec.count(e_max));
    // suffix[m] = Σ_{m < s ≤ e_max} c_s / s²
    let mut suffix = vec![0.0; e_max as usize + 1];
    for m in (0..e_max as usize).rev() {
        let s = (m + 1) as f64;
        suffix[m] = suffix[m + 1] + spec.multiplicity(m as u64 + 1) as f64 / (s * s);
    }
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    let mut below = 0.0;
    let mut at_one = (0.0, 0.0);
    for l in 1..=lambda_max {
        below += spec.multiplicity(l) as f64 / l as f64;
        let above = suffix[l as usize] + tail;
        r1 = r1.max(below / (4.0 * (4.0 * E * l as f64).ln()));
        r2 = r2.max(above / (8.0 / l as f64));
        if l == 1 {
            at_one = (below, above);
        }
    }
    Ok(SpectralSumsReport {
        lambda_max,
        e_max,
        inverse_ratio_max: r1,
        inverse_square_ratio_max: r2,
        at_one,
        pass: r1 < 1.0 && r2 < 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(e: f64) -> u64 {
        let r = e.sqrt().ceil() as i64 + 1;
        let mut n = 0;
        for a in -r..=r {
            for b in -r..=r {
                let q = (a * a + b * b) as f64;
                if q > 0.0 && q <= e {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn small_counts() {
        assert_eq!(lattice_count(1.0), 4);
        assert_eq!(lattice_count(2.0), 8);
        assert_eq!(lattice_count(5.0), 20);
        assert_eq!(lattice_count(0.5), 0);
        for e in [0.0, 3.7, 10.0, 25.0, 99.5, 1000.0] {
            assert_eq!(lattice_count(e), brute(e), "E = {e}");
        }
    }

    #[test]
    fn radial_cross_check() {
        // independent count: walk the circle radius by radius
        let spec = LatticeSpectrum::up_to(10_000);
        let mut n = 0u64;
        for m in 1..=10_000u64 {
            for a in 0..=isqrt(m) {
                let rest = m - a * a;
                let b = isqrt(rest);
                if b * b == rest {
                    n += match (a, b) {
                        (0, 0) => 0,
                        (0, _) | (_, 0) => 2,
                        _ => 4,
                    };
                }
            }
            assert_eq!(spec.count(m), n, "m = {m}");
        }
        assert_eq!(spec.count(10_000), lattice_count(10_000.0));
    }

    #[test]
    fn eigenvalues_with_multiplicity() {
        let spec = LatticeSpectrum::up_to(5);
        let ev: Vec<_> = spec.eigenvalues().collect();
        assert_eq!(&ev[..9], &[1, 1, 1, 1, 2, 2, 2, 2, 4]);
        assert_eq!(spec.eigenvalue(4), Some(1));
        assert_eq!(spec.eigenvalue(5), Some(2));
        assert_eq!(spec.eigenvalue(21), None);
    }

    #[test]
    fn bound_cases() {
        let r = verify_eigenvalue_bounds(1000, 100).unwrap();
        assert!(r.pass, "{:?}", r.violations);
        // λ₄ = 1 = 4/4 and λ₂ = 1 = 2/2
        assert_eq!((r.lower_ratio_min, r.upper_ratio_max), (1.0, 1.0));
        assert_eq!(r.count_half_counterexample, Some((2, 8)));
    }

    #[test]
    fn liyau_small() {
        let r = verify_liyau(4).unwrap();
        assert!((r.ratio_at_m_max - 4.0 / (16.0 / (2.0 * PI))).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn spectral_sums_at_one() {
        let r = verify_spectral_sums(10, 20_000).unwrap();
        assert_eq!(r.at_one.0, 4.0);
        assert!(r.at_one.1 < 8.0 && r.pass);
        // the tail bound dominates the true tail
        let spec = LatticeSpectrum::up_to(4000);
        let direct: f64 = (1001..=4000).map(|m| spec.multiplicity(m) as f64 / (m * m) as f64).sum();
        assert!(direct <= inverse_square_tail_bound(1000, spec.count(1000)));
    }
}
