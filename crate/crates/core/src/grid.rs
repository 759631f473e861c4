//! The periodic collocation grid and its integer wavevector lattice.
//!
//! The domain is the torus `[0, 2π)³` sampled at `N` points per axis, so the
//! wavevectors are integer triples `k ∈ {-N/2, …, N/2-1}³` with unit spacing.
//! The Nyquist plane (any component equal to `-N/2`) carries no conjugate
//! partner on the lattice and is zeroed everywhere in this crate so that real
//! fields stay exactly Hermitian under differentiation.

use crate::error::{Error, Result};

/// Cubic collocation grid on `[0, 2π)³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// Creates a grid with `n` points per axis; `n` must be even and `>= 8`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        Ok(Grid { n })
    }

    /// Points per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of collocation points / spectral coefficients.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial dimension (fixed).
    #[inline]
    pub fn dim(&self) -> usize {
        3
    }

    /// Side length of the periodic box.
    #[inline]
    pub fn box_length(&self) -> f64 {
        std::f64::consts::TAU
    }

    /// Volume of the periodic box, `(2π)³`.
    #[inline]
    pub fn volume(&self) -> f64 {
        self.box_length().powi(3)
    }

    /// Grid spacing `2π / N`.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.box_length() / self.n as f64
    }

    /// Quadrature weight of one collocation point, `(2π/N)³`.
    #[inline]
    pub fn quad_weight(&self) -> f64 {
        self.dx().powi(3)
    }

    /// Flat index of the coefficient/point at axis indices `(i, j, l)`.
    #[inline]
    pub fn idx(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    /// Signed integer wavenumber for axis index `m`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Axis index storing wavenumber `k` (must satisfy `-N/2 <= k < N/2`).
    #[inline]
    pub fn index_of_wavenumber(&self, k: i64) -> usize {
        debug_assert!(k >= -(self.n as i64) / 2 && k < self.n as i64 / 2);
        k.rem_euclid(self.n as i64) as usize
    }

    /// The wavevector at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let l = idx % self.n;
        let j = (idx / self.n) % self.n;
        let i = idx / (self.n * self.n);
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(l)]
    }

    /// `|k|²` at flat index `idx`.
    #[inline]
    pub fn k_sq(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// True if any component of the wavevector lies on the Nyquist plane.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = -(self.n as i64) / 2;
        let k = self.wavevector(idx);
        k[0] == half || k[1] == half || k[2] == half
    }

    /// Largest retained wavenumber component under the 2/3 rule.
    ///
    /// Modes with any `|k_j| > N/3` are zeroed after quadratic products, so
    /// the retained cube is `|k_j| <= floor(N/3)`.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// True if the mode at `idx` survives the 2/3-rule truncation.
    #[inline]
    pub fn is_resolved(&self, idx: usize) -> bool {
        let kc = self.dealias_cutoff();
        let k = self.wavevector(idx);
        k[0].abs() <= kc && k[1].abs() <= kc && k[2].abs() <= kc
    }

    /// Collocation point coordinates at flat index `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let l = idx % self.n;
        let j = (idx / self.n) % self.n;
        let i = idx / (self.n * self.n);
        let h = self.dx();
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    /// Checks that `other` is the same grid.
    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_sizes() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(6).is_err());
        assert!(Grid::new(9).is_err());
        assert!(Grid::new(8).is_ok());
    }

    #[test]
    fn wavenumber_layout_matches_fft_order() {
        let g = Grid::new(8).unwrap();
        let ks: Vec<i64> = (0..8).map(|m| g.wavenumber(m)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for k in -4..4 {
            assert_eq!(g.wavenumber(g.index_of_wavenumber(k)), k);
        }
    }

    #[test]
    fn nyquist_detection() {
        let g = Grid::new(8).unwrap();
        let idx = g.idx(4, 0, 0); // k = (-4, 0, 0)
        assert!(g.is_nyquist(idx));
        assert!(!g.is_nyquist(g.idx(3, 2, 1)));
    }

    #[test]
    fn dealias_cube() {
        let g = Grid::new(32).unwrap();
        assert_eq!(g.dealias_cutoff(), 10);
        assert!(g.is_resolved(g.idx(10, 0, 0)));
        assert!(!g.is_resolved(g.idx(11, 0, 0)));
    }
}
