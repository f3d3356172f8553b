use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{FieldRole, SpectralField, SpectralGrid, WaveVector};

/// 2D complex FFT on an `m × m` physical grid with nodes `x = 2π·(a, b)/m`.
///
/// Plans are immutable and may be shared between threads; scratch buffers
/// are allocated per call.
#[derive(Clone)]
pub struct Fft2 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("m", &self.m).finish()
    }
}

impl Fft2 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft(m, FftDirection::Forward),
            inverse: planner.plan_fft(m, FftDirection::Inverse),
        }
    }

    /// Transform sized for the field grid itself (exact for quadratic
    /// products under the 2/3 rule).
    pub fn for_grid(grid: SpectralGrid) -> Self {
        Self::new(grid.resolution())
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn transform(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, m);
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, m);
    }

    /// Physical values of component `c` after applying a per-mode complex
    /// multiplier (e.g. `i k_l` for a derivative).
    pub fn physical_with(
        &self,
        field: &SpectralField,
        c: usize,
        mult: impl Fn(WaveVector) -> Complex64,
    ) -> Vec<f64> {
        let grid = field.grid();
        let m = self.m as i64;
        assert!(
            2 * grid.cutoff() < self.m,
            "physical grid {} too coarse for band {}",
            self.m,
            grid.cutoff()
        );
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m * self.m];
        let comp = field.component(c);
        for k in grid.modes() {
            let v = comp[grid.index(k)];
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let idx = k.k1.rem_euclid(m) as usize * self.m + k.k2.rem_euclid(m) as usize;
            buf[idx] = v * mult(k);
        }
        self.transform(&mut buf, &self.inverse);
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn physical(&self, field: &SpectralField, c: usize) -> Vec<f64> {
        self.physical_with(field, c, |_| Complex64::new(1.0, 0.0))
    }

    /// `∂_l` of component `c` on the physical grid.
    pub fn derivative(&self, field: &SpectralField, c: usize, l: usize) -> Vec<f64> {
        self.physical_with(field, c, |k| {
            let kl = if l == 0 { k.k1 } else { k.k2 };
            Complex64::new(0.0, kl as f64)
        })
    }

    /// Forward transform of real physical values; the retained band is
    /// written into `out` (a component slice of `grid`), everything else
    /// (including the mean) is zeroed.
    pub(crate) fn spectral_into(&self, values: &[f64], grid: SpectralGrid, out: &mut [Complex64]) {
        let m = self.m as i64;
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        let norm = 1.0 / (self.m * self.m) as f64;
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for k in grid.modes() {
            let idx = k.k1.rem_euclid(m) as usize * self.m + k.k2.rem_euclid(m) as usize;
            out[grid.index(k)] = buf[idx] * norm;
        }
    }

    /// Builds a field from physical values, one slice per component.
    pub fn spectral(&self, grid: SpectralGrid, role: FieldRole, values: &[&[f64]]) -> SpectralField {
        assert_eq!(values.len(), role.components());
        let mut f = SpectralField::zeros(grid, role);
        for (c, v) in values.iter().enumerate() {
            self.spectral_into(v, grid, f.component_mut(c));
        }
        f
    }

    /// Quadrature weight per node: `|𝕋²| / m²`.
    pub fn cell_area(&self) -> f64 {
        super::TORUS_AREA / (self.m * self.m) as f64
    }
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// A velocity field and its gradient sampled on a physical grid;
/// `grad[l][c] = ∂_l u_c`.
#[derive(Clone, Debug)]
pub struct PhysicalVelocity {
    pub u: [Vec<f64>; 2],
    pub grad: [[Vec<f64>; 2]; 2],
}

impl PhysicalVelocity {
    pub fn new(fft: &Fft2, field: &SpectralField) -> Self {
        debug_assert_eq!(field.role(), FieldRole::Velocity);
        Self {
            u: [fft.physical(field, 0), fft.physical(field, 1)],
            grad: [
                [fft.derivative(field, 0, 0), fft.derivative(field, 1, 0)],
                [fft.derivative(field, 0, 1), fft.derivative(field, 1, 1)],
            ],
        }
    }

    /// Pointwise Frobenius norm `|∇u(x)|`.
    pub fn grad_magnitude(&self) -> Vec<f64> {
        let g = &self.grad;
        (0..self.u[0].len())
            .map(|i| {
                (g[0][0][i].powi(2) + g[0][1][i].powi(2) + g[1][0][i].powi(2) + g[1][1][i].powi(2))
                    .sqrt()
            })
            .collect()
    }
}
