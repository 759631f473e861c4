//! Vector and scalar fields in spectral and physical representation.
//!
//! Spectral storage is the full complex coefficient cube in FFT order; real
//! fields are kept exactly Hermitian (`û(-k) = conj(û(k))`) and the Nyquist
//! plane is always zero. All L² norms and inner products are true integrals
//! over the `(2π)³` box: in spectral form `‖f‖₂² = (2π)³ Σ_k |û(k)|²`, which
//! matches the collocation quadrature `(2π/N)³ Σ_j |f(x_j)|²` by Parseval.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

/// A real scalar field stored as complex Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScalar {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

/// A real 3-component vector field stored as complex Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub components: [Vec<Complex64>; 3],
}

/// A real scalar field sampled on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalScalar {
    pub grid: Grid,
    pub data: Vec<f64>,
}

/// A real 3-component vector field sampled on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Grid,
    pub components: [Vec<f64>; 3],
}

impl SpectralScalar {
    pub fn zeros(grid: Grid) -> Self {
        SpectralScalar {
            grid,
            data: vec![Complex64::default(); grid.len()],
        }
    }

    /// Forward transform of a physical scalar.
    pub fn from_physical(phys: &PhysicalScalar) -> Result<Self> {
        if phys.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("non-finite physical values".into()));
        }
        let mut data: Vec<Complex64> = phys.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&phys.grid, &mut data);
        zero_nyquist_scalar(&phys.grid, &mut data);
        Ok(SpectralScalar {
            grid: phys.grid,
            data,
        })
    }

    /// Inverse transform to collocation values (imaginary parts discarded;
    /// they are roundoff for Hermitian input).
    pub fn to_physical(&self) -> PhysicalScalar {
        let mut data = self.data.clone();
        fft::inverse(&self.grid, &mut data);
        PhysicalScalar {
            grid: self.grid,
            data: data.iter().map(|c| c.re).collect(),
        }
    }

    /// `‖f‖₂` as an integral over the box.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * sum).sqrt()
    }
}

impl PhysicalScalar {
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        PhysicalScalar {
            grid,
            data: (0..grid.len()).map(|i| f(grid.point(i))).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.data.iter().map(|v| v * v).sum();
        (self.grid.quad_weight() * sum).sqrt()
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            components: [
                vec![Complex64::default(); grid.len()],
                vec![Complex64::default(); grid.len()],
                vec![Complex64::default(); grid.len()],
            ],
        }
    }

    /// Forward transform of a physical vector field.
    ///
    /// Fails with `InvalidField` if any sample is NaN or infinite.
    pub fn from_physical(phys: &PhysicalField) -> Result<Self> {
        let mut components: [Vec<Complex64>; 3] = Default::default();
        for (c, comp) in phys.components.iter().enumerate() {
            if comp.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "non-finite values in component {c}"
                )));
            }
            let mut data: Vec<Complex64> = comp.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::forward(&phys.grid, &mut data);
            zero_nyquist_scalar(&phys.grid, &mut data);
            components[c] = data;
        }
        Ok(SpectralField {
            grid: phys.grid,
            components,
        })
    }

    /// Inverse transform to collocation values.
    pub fn to_physical(&self) -> PhysicalField {
        let mut components: [Vec<f64>; 3] = Default::default();
        for c in 0..3 {
            let mut data = self.components[c].clone();
            fft::inverse(&self.grid, &mut data);
            components[c] = data.iter().map(|v| v.re).collect();
        }
        PhysicalField {
            grid: self.grid,
            components,
        }
    }

    /// Builds a field by sampling closed-form component functions.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let mut phys = PhysicalField::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for c in 0..3 {
                phys.components[c][idx] = v[c];
            }
        }
        SpectralField::from_physical(&phys)
    }

    /// A field with exactly one Hermitian mode pair: `amplitude` at
    /// wavevector `k` in component `component`, the conjugate at `-k`, exact
    /// zeros elsewhere. `sin(k·x) e_c` is `single_mode(grid, k, -i/2, c)`.
    pub fn single_mode(grid: Grid, k: [i64; 3], amplitude: Complex64, component: usize) -> Self {
        assert!(component < 3);
        assert!(
            k != [0, 0, 0],
            "single_mode needs a nonzero wavevector (use a constant field for k = 0)"
        );
        let mut out = SpectralField::zeros(grid);
        let idx = grid.idx(
            grid.index_of_wavenumber(k[0]),
            grid.index_of_wavenumber(k[1]),
            grid.index_of_wavenumber(k[2]),
        );
        let conj_idx = grid.idx(
            grid.index_of_wavenumber(-k[0]),
            grid.index_of_wavenumber(-k[1]),
            grid.index_of_wavenumber(-k[2]),
        );
        out.components[component][idx] = amplitude;
        out.components[component][conj_idx] = amplitude.conj();
        out
    }

    /// Random real field with independent Gaussian coefficients supported on
    /// `k_min <= |k| <= k_max`, built Hermitian so physical values are real.
    ///
    /// The same seed always produces the same field, bit for bit.
    pub fn random_band(grid: Grid, k_min: f64, k_max: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = SpectralField::zeros(grid);
        // Draw on a canonical half-lattice in fixed order, mirror the rest.
        // The zero mode is never drawn, so the field has zero mean.
        for idx in 0..grid.len() {
            if grid.is_nyquist(idx) {
                continue;
            }
            let k = grid.wavevector(idx);
            let mag = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
            if mag < k_min || mag > k_max {
                continue;
            }
            if !is_canonical_half(k) {
                continue;
            }
            let conj_idx = grid.idx(
                grid.index_of_wavenumber(-k[0]),
                grid.index_of_wavenumber(-k[1]),
                grid.index_of_wavenumber(-k[2]),
            );
            for c in 0..3 {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let z = Complex64::new(re, im);
                out.components[c][idx] = z;
                out.components[c][conj_idx] = z.conj();
            }
        }
        out
    }

    /// Max modulus over all coefficients of `Σ_j k_j ĉ_j(k)` scaled by the
    /// largest coefficient magnitude; ~0 for divergence-free fields.
    pub fn divergence_l2(&self) -> f64 {
        let mut sum = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let d = Complex64::new(k[0] as f64, 0.0) * self.components[0][idx]
                + Complex64::new(k[1] as f64, 0.0) * self.components[1][idx]
                + Complex64::new(k[2] as f64, 0.0) * self.components[2][idx];
            sum += d.norm_sqr();
        }
        (self.grid.volume() * sum).sqrt()
    }

    /// Relative divergence: `‖∇·f‖₂ / ‖∇f‖₂`-like scale using `|k||f̂|`.
    pub fn relative_divergence(&self) -> f64 {
        let mut scale = 0.0;
        for idx in 0..self.grid.len() {
            let kmag = self.grid.k_sq(idx).sqrt();
            let fm = (self.components[0][idx].norm_sqr()
                + self.components[1][idx].norm_sqr()
                + self.components[2][idx].norm_sqr())
            .sqrt();
            scale += (kmag * fm).powi(2);
        }
        let scale = (self.grid.volume() * scale).sqrt();
        if scale == 0.0 {
            0.0
        } else {
            self.divergence_l2() / scale
        }
    }

    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.relative_divergence() <= tol
    }

    /// Largest deviation from Hermitian symmetry relative to the largest
    /// coefficient magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let mut max_defect: f64 = 0.0;
        let mut max_mag: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let k = self.grid.wavevector(idx);
            let conj_idx = self.grid.idx(
                self.grid
                    .index_of_wavenumber(if k[0] == -(self.grid.n() as i64) / 2 {
                        k[0]
                    } else {
                        -k[0]
                    }),
                self.grid
                    .index_of_wavenumber(if k[1] == -(self.grid.n() as i64) / 2 {
                        k[1]
                    } else {
                        -k[1]
                    }),
                self.grid
                    .index_of_wavenumber(if k[2] == -(self.grid.n() as i64) / 2 {
                        k[2]
                    } else {
                        -k[2]
                    }),
            );
            for c in 0..3 {
                let a = self.components[c][idx];
                let b = self.components[c][conj_idx];
                max_defect = max_defect.max((a - b.conj()).norm());
                max_mag = max_mag.max(a.norm());
            }
        }
        if max_mag == 0.0 {
            0.0
        } else {
            max_defect / max_mag
        }
    }

    pub fn has_finite_values(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// `‖f‖₂` as an integral over the box (Parseval form).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coeff_energy()).sqrt()
    }

    /// `Σ_k |f̂(k)|²` over all components (no volume factor).
    pub fn coeff_energy(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// L² inner product `∫ f·g dx` evaluated spectrally.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut sum = 0.0;
        for c in 0..3 {
            for (a, b) in self.components[c].iter().zip(&other.components[c]) {
                sum += (a * b.conj()).re;
            }
        }
        self.grid.volume() * sum
    }

    /// Applies a real multiplier `m(k)` to every coefficient in place.
    pub fn scale_by_multiplier(&mut self, m: impl Fn([i64; 3]) -> f64 + Sync) {
        let grid = self.grid;
        for comp in self.components.iter_mut() {
            comp.par_iter_mut().enumerate().for_each(|(idx, z)| {
                *z *= m(grid.wavevector(idx));
            });
        }
    }

    /// Returns a copy with a real multiplier applied.
    pub fn with_multiplier(&self, m: impl Fn([i64; 3]) -> f64 + Sync + Copy) -> SpectralField {
        let mut out = self.clone();
        out.scale_by_multiplier(m);
        out
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        for comp in out.components.iter_mut() {
            for z in comp.iter_mut() {
                *z *= factor;
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &SpectralField) {
        debug_assert_eq!(self.grid, other.grid);
        for c in 0..3 {
            for (a, b) in self.components[c].iter_mut().zip(&other.components[c]) {
                *a += b;
            }
        }
    }

    pub fn sub_assign(&mut self, other: &SpectralField) {
        debug_assert_eq!(self.grid, other.grid);
        for c in 0..3 {
            for (a, b) in self.components[c].iter_mut().zip(&other.components[c]) {
                *a -= b;
            }
        }
    }

    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) {
        debug_assert_eq!(self.grid, other.grid);
        for c in 0..3 {
            for (a, b) in self.components[c].iter_mut().zip(&other.components[c]) {
                *a += alpha * b;
            }
        }
    }

    pub fn difference(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        PhysicalField {
            grid,
            components: [
                vec![0.0; grid.len()],
                vec![0.0; grid.len()],
                vec![0.0; grid.len()],
            ],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = PhysicalField::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for c in 0..3 {
                out.components[c][idx] = v[c];
            }
        }
        out
    }

    /// Pointwise Euclidean magnitude maximum, `‖f‖_∞` on the grid.
    pub fn linf_norm(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                (self.components[0][i].powi(2)
                    + self.components[1][i].powi(2)
                    + self.components[2][i].powi(2))
                .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Collocation `L^p` norm of the pointwise Euclidean magnitude
    /// (`p = ∞` handled by `linf_norm`).
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0 && p.is_finite());
        let sum: f64 = (0..self.grid.len())
            .map(|i| {
                let m = (self.components[0][i].powi(2)
                    + self.components[1][i].powi(2)
                    + self.components[2][i].powi(2))
                .sqrt();
                m.powf(p)
            })
            .sum();
        (self.grid.quad_weight() * sum).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self
            .components
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum();
        (self.grid.quad_weight() * sum).sqrt()
    }

    /// Collocation quadrature of `∫ f·g dx`.
    pub fn inner(&self, other: &PhysicalField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let mut sum = 0.0;
        for c in 0..3 {
            for (a, b) in self.components[c].iter().zip(&other.components[c]) {
                sum += a * b;
            }
        }
        self.grid.quad_weight() * sum
    }
}

/// Zeroes the Nyquist plane of one coefficient cube.
pub(crate) fn zero_nyquist_scalar(grid: &Grid, data: &mut [Complex64]) {
    let half = grid.n() / 2;
    let n = grid.n();
    for i in 0..n {
        for j in 0..n {
            data[grid.idx(half, i, j)] = Complex64::default();
            data[grid.idx(i, half, j)] = Complex64::default();
            data[grid.idx(i, j, half)] = Complex64::default();
        }
    }
}

/// Canonical representative of each `{k, -k}` pair: the first nonzero
/// component (in axis order) is positive.
fn is_canonical_half(k: [i64; 3]) -> bool {
    if k[0] != 0 {
        return k[0] > 0;
    }
    if k[1] != 0 {
        return k[1] > 0;
    }
    k[2] > 0
}
