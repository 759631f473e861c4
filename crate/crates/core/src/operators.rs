//! Exact spectral calculus: derivatives, Leray projection, fractional
//! dissipation, and dealiased nonlinear products.
//!
//! Every differential operator is a Fourier multiplier, exact on the lattice.
//! Quadratic terms are evaluated pointwise in physical space and truncated by
//! the 2/3 rule (any `|k_j| > N/3` zeroed), so on the retained modes they
//! equal the exact convolution: pairings of a truncated product against a
//! retained field are alias-free, which is what makes the discrete energy
//! identities in this crate hold to roundoff.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField, SpectralScalar};

/// Spatial axis selector for single partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1 = 0,
    X2 = 1,
    X3 = 2,
}

/// `∂_axis` applied componentwise to a vector field (multiplier `i k_axis`).
pub fn partial(field: &SpectralField, axis: Axis) -> SpectralField {
    let a = axis as usize;
    let grid = field.grid;
    let mut out = field.clone();
    for comp in out.components.iter_mut() {
        for (idx, z) in comp.iter_mut().enumerate() {
            let k = grid.wavevector(idx)[a] as f64;
            *z *= Complex64::new(0.0, k);
        }
    }
    out
}

/// `∂_axis` of a scalar.
pub fn partial_scalar(scalar: &SpectralScalar, axis: Axis) -> SpectralScalar {
    let a = axis as usize;
    let grid = scalar.grid;
    let mut out = scalar.clone();
    for (idx, z) in out.data.iter_mut().enumerate() {
        let k = grid.wavevector(idx)[a] as f64;
        *z *= Complex64::new(0.0, k);
    }
    out
}

/// Gradient of a scalar, `(∂₁φ, ∂₂φ, ∂₃φ)`.
pub fn gradient(scalar: &SpectralScalar) -> SpectralField {
    let grid = scalar.grid;
    let mut out = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let v = scalar.data[idx];
        for c in 0..3 {
            out.components[c][idx] = v * Complex64::new(0.0, k[c] as f64);
        }
    }
    out
}

/// Divergence of a vector field, `Σ_j ∂_j f_j`.
pub fn divergence(field: &SpectralField) -> SpectralScalar {
    let grid = field.grid;
    let mut out = SpectralScalar::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let mut d = Complex64::default();
        for c in 0..3 {
            d += field.components[c][idx] * Complex64::new(0.0, k[c] as f64);
        }
        out.data[idx] = d;
    }
    out
}

/// Curl of a vector field, `(∇×f)_m = ε_{mjl} ∂_j f_l`.
pub fn curl(field: &SpectralField) -> SpectralField {
    let grid = field.grid;
    let mut out = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let ik = [
            Complex64::new(0.0, k[0] as f64),
            Complex64::new(0.0, k[1] as f64),
            Complex64::new(0.0, k[2] as f64),
        ];
        let f = [
            field.components[0][idx],
            field.components[1][idx],
            field.components[2][idx],
        ];
        out.components[0][idx] = ik[1] * f[2] - ik[2] * f[1];
        out.components[1][idx] = ik[2] * f[0] - ik[0] * f[2];
        out.components[2][idx] = ik[0] * f[1] - ik[1] * f[0];
    }
    out
}

/// Orthogonal projection onto divergence-free fields,
/// `(P f)̂(k) = f̂(k) - k (k·f̂(k)) / |k|²`, identity at `k = 0`.
pub fn leray_project(field: &SpectralField) -> SpectralField {
    let grid = field.grid;
    let mut out = field.clone();
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        if ksq == 0.0 {
            continue;
        }
        let f = [
            out.components[0][idx],
            out.components[1][idx],
            out.components[2][idx],
        ];
        let kdotf = k[0] as f64 * f[0] + k[1] as f64 * f[1] + k[2] as f64 * f[2];
        let scale = kdotf / ksq;
        for c in 0..3 {
            out.components[c][idx] = f[c] - scale * k[c] as f64;
        }
    }
    out
}

/// Fractional Laplacian `(-Δ)^α`: multiplier `|k|^{2α}` (zero at `k = 0`).
pub fn fractional_laplacian(field: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "fractional exponent must be positive and finite, got {alpha}"
        )));
    }
    Ok(field.with_multiplier(move |k| {
        let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        ksq.powf(alpha)
    }))
}

/// Zeroes every mode with any `|k_j| > N/3` (the 2/3 rule), in place.
pub fn dealias(field: &mut SpectralField) {
    let grid = field.grid;
    let kc = grid.dealias_cutoff();
    for comp in field.components.iter_mut() {
        for (idx, z) in comp.iter_mut().enumerate() {
            let k = grid.wavevector(idx);
            if k[0].abs() > kc || k[1].abs() > kc || k[2].abs() > kc {
                *z = Complex64::default();
            }
        }
    }
}

/// The product kind for [`dealiased_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// Pointwise cross product `F × G`.
    Cross,
    /// Componentwise advection `(F·∇) G`.
    Advect,
}

/// Pointwise quadratic product evaluated on the collocation grid and
/// truncated by the 2/3 rule.
///
/// `Cross` is bilinear and antisymmetric; `Advect` computes `(F·∇)G` using
/// exact spectral derivatives of `G`.
pub fn dealiased_product(
    f: &SpectralField,
    g: &SpectralField,
    kind: ProductKind,
) -> Result<SpectralField> {
    f.grid.check_same(&g.grid)?;
    let f_phys = f.to_physical();
    let product = match kind {
        ProductKind::Cross => {
            let g_phys = g.to_physical();
            cross_physical(&f_phys, &g_phys)
        }
        ProductKind::Advect => {
            let grads = [
                partial(g, Axis::X1).to_physical(),
                partial(g, Axis::X2).to_physical(),
                partial(g, Axis::X3).to_physical(),
            ];
            let grid = f.grid;
            let mut out = PhysicalField::zeros(grid);
            for m in 0..3 {
                for idx in 0..grid.len() {
                    out.components[m][idx] = f_phys.components[0][idx]
                        * grads[0].components[m][idx]
                        + f_phys.components[1][idx] * grads[1].components[m][idx]
                        + f_phys.components[2][idx] * grads[2].components[m][idx];
                }
            }
            out
        }
    };
    let mut spec = SpectralField::from_physical(&product)
        .map_err(|_| Error::NumericalFault("NaN produced in nonlinear product".into()))?;
    dealias(&mut spec);
    Ok(spec)
}

/// Pointwise cross product of two physical fields.
pub fn cross_physical(f: &PhysicalField, g: &PhysicalField) -> PhysicalField {
    let grid = f.grid;
    let mut out = PhysicalField::zeros(grid);
    for idx in 0..grid.len() {
        let a = [
            f.components[0][idx],
            f.components[1][idx],
            f.components[2][idx],
        ];
        let b = [
            g.components[0][idx],
            g.components[1][idx],
            g.components[2][idx],
        ];
        out.components[0][idx] = a[1] * b[2] - a[2] * b[1];
        out.components[1][idx] = a[2] * b[0] - a[0] * b[2];
        out.components[2][idx] = a[0] * b[1] - a[1] * b[0];
    }
    out
}

/// The Hall nonlinearity `η ∇×((∇×b) × b)` with dealiasing.
///
/// The result is a curl, hence divergence-free; `η = 0` short-circuits to the
/// zero field so that an η-run and a reference run share bitwise-identical
/// arithmetic for the remaining terms.
pub fn hall_term(b: &SpectralField, eta: f64) -> Result<SpectralField> {
    if eta == 0.0 {
        return Ok(SpectralField::zeros(b.grid));
    }
    let j = curl(b);
    let jxb = dealiased_product(&j, b, ProductKind::Cross)?;
    Ok(curl(&jxb).scaled(eta))
}

/// Dyadic dilation `f(x) → f(2^d x)` on the torus: moves the coefficient at
/// `k` to `2^d k`. Exact on the lattice (integer wavevectors stay integer)
/// and commutes with the shell calculus shifted by `d`; modes pushed past
/// the lattice are an error.
pub fn dyadic_dilate(field: &SpectralField, d: u32) -> Result<SpectralField> {
    let grid = field.grid;
    let factor = 1i64 << d;
    let half = grid.n() as i64 / 2;
    let mut out = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        let zero = field.components[0][idx] == Complex64::default()
            && field.components[1][idx] == Complex64::default()
            && field.components[2][idx] == Complex64::default();
        if zero {
            continue;
        }
        let kd = [k[0] * factor, k[1] * factor, k[2] * factor];
        if kd.iter().any(|&c| c <= -half || c >= half) {
            return Err(Error::InvalidParameter(format!(
                "dilation by 2^{d} pushes mode {k:?} off the lattice"
            )));
        }
        let target = grid.idx(
            grid.index_of_wavenumber(kd[0]),
            grid.index_of_wavenumber(kd[1]),
            grid.index_of_wavenumber(kd[2]),
        );
        for c in 0..3 {
            out.components[c][target] = field.components[c][idx];
        }
    }
    Ok(out)
}

/// Negative Laplacian inverse on zero-mean scalars (`k = 0` mode set to 0);
/// diagnostic helper for recovering the pressure from the projected momentum
/// balance.
pub fn poisson_solve(rhs: &SpectralScalar) -> SpectralScalar {
    let grid = rhs.grid;
    let mut out = rhs.clone();
    for (idx, z) in out.data.iter_mut().enumerate() {
        let ksq = grid.k_sq(idx);
        if ksq == 0.0 {
            *z = Complex64::default();
        } else {
            *z /= Complex64::new(-ksq, 0.0);
        }
    }
    out
}

/// Pressure field implied by the Leray projection of the momentum equation:
/// solves `Δp = ∇·(b·∇b - u·∇u)` with zero mean.
pub fn diagnostic_pressure(u: &SpectralField, b: &SpectralField) -> Result<SpectralScalar> {
    let adv_u = dealiased_product(u, u, ProductKind::Advect)?;
    let adv_b = dealiased_product(b, b, ProductKind::Advect)?;
    let mut forcing = adv_b;
    forcing.sub_assign(&adv_u);
    Ok(poisson_solve(&divergence(&forcing)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalScalar;
    use crate::grid::Grid;

    fn grid() -> Grid {
        Grid::new(16).unwrap()
    }

    #[test]
    fn partial_of_single_harmonic() {
        // ∂₁ sin(x₁) e₁ = cos(x₁) e₁
        let f = SpectralField::from_fn(grid(), |x| [x[0].sin(), 0.0, 0.0]).unwrap();
        let df = partial(&f, Axis::X1);
        let expect = SpectralField::from_fn(grid(), |x| [x[0].cos(), 0.0, 0.0]).unwrap();
        let err = df.difference(&expect).l2_norm();
        assert!(err < 1e-13, "err {err}");
    }

    #[test]
    fn curl_grad_and_div_curl_vanish() {
        let phi = PhysicalScalar::from_fn(grid(), |x| (x[0] + x[1]).sin() * (2.0 * x[2]).cos());
        let phi = SpectralScalar::from_physical(&phi).unwrap();
        let cg = curl(&gradient(&phi));
        assert!(cg.l2_norm() < 1e-12);

        let f = SpectralField::random_band(grid(), 1.0, 4.0, 11);
        let dc = divergence(&curl(&f));
        assert!(dc.l2_norm() / f.l2_norm() < 1e-12);
    }

    #[test]
    fn curl_of_beltrami_field_is_itself() {
        // ABC field with A=B=C=1 is a curl eigenfield with eigenvalue 1.
        let f = SpectralField::from_fn(grid(), |x| {
            [
                x[2].sin() + x[1].cos(),
                x[0].sin() + x[2].cos(),
                x[1].sin() + x[0].cos(),
            ]
        })
        .unwrap();
        let c = curl(&f);
        let err = c.difference(&f).l2_norm() / f.l2_norm();
        assert!(err < 1e-13, "err {err}");
    }

    #[test]
    fn leray_annihilates_gradients_and_fixes_solenoidal_fields() {
        let phi = PhysicalScalar::from_fn(grid(), |x| x[0].sin() + (x[1] - x[2]).cos());
        let gphi = gradient(&SpectralScalar::from_physical(&phi).unwrap());
        let p = leray_project(&gphi);
        assert!(p.l2_norm() < 1e-13);

        let f = leray_project(&SpectralField::random_band(grid(), 1.0, 4.0, 5));
        let again = leray_project(&f);
        assert!(again.difference(&f).l2_norm() / f.l2_norm() < 1e-12);
        assert!(f.is_divergence_free(1e-12));
    }

    #[test]
    fn leray_per_mode_oracle() {
        // Compare against the explicit per-mode formula (I - kkᵀ/|k|²) f̂.
        let f = SpectralField::random_band(grid(), 1.0, 5.0, 17);
        let p = leray_project(&f);
        let g = f.grid;
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            let ksq = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let fv = [
                f.components[0][idx],
                f.components[1][idx],
                f.components[2][idx],
            ];
            let expect = if ksq == 0.0 {
                fv
            } else {
                let kd = k[0] as f64 * fv[0] + k[1] as f64 * fv[1] + k[2] as f64 * fv[2];
                [
                    fv[0] - kd * k[0] as f64 / ksq,
                    fv[1] - kd * k[1] as f64 / ksq,
                    fv[2] - kd * k[2] as f64 / ksq,
                ]
            };
            for c in 0..3 {
                assert!((p.components[c][idx] - expect[c]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn leray_is_self_adjoint() {
        let f = SpectralField::random_band(grid(), 1.0, 4.0, 2);
        let g = SpectralField::random_band(grid(), 1.0, 4.0, 3);
        let lhs = leray_project(&f).inner(&g);
        let rhs = f.inner(&leray_project(&g));
        assert!((lhs - rhs).abs() / lhs.abs().max(1e-300) < 1e-12);
    }

    #[test]
    fn fractional_laplacian_matches_brute_force_multiplier() {
        let f = SpectralField::random_band(grid(), 1.0, 5.0, 23);
        let alpha = 0.75;
        let out = fractional_laplacian(&f, alpha).unwrap();
        let g = f.grid;
        for idx in 0..g.len() {
            let mult = g.k_sq(idx).powf(alpha);
            for c in 0..3 {
                let expect = f.components[c][idx] * mult;
                assert!((out.components[c][idx] - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            }
        }
        assert!(fractional_laplacian(&f, 0.0).is_err());
        assert!(fractional_laplacian(&f, -1.0).is_err());
    }

    #[test]
    fn fractional_laplacian_alpha_one_is_minus_laplacian() {
        let f = SpectralField::random_band(grid(), 1.0, 5.0, 29);
        let a = fractional_laplacian(&f, 1.0).unwrap();
        let b = f.with_multiplier(|k| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64);
        assert!(a.difference(&b).l2_norm() / b.l2_norm().max(1e-300) < 1e-12);
        // α = 1/2 on |k| = 2 gives multiplier 2.
        let g = SpectralField::from_fn(grid(), |x| [0.0, (2.0 * x[0]).sin(), 0.0]).unwrap();
        let h = fractional_laplacian(&g, 0.5).unwrap();
        assert!(h.difference(&g.scaled(2.0)).l2_norm() < 1e-12);
    }

    #[test]
    fn cross_product_cases() {
        let f = SpectralField::random_band(grid(), 1.0, 4.0, 31);
        let self_cross = dealiased_product(&f, &f, ProductKind::Cross).unwrap();
        assert!(self_cross.l2_norm() < 1e-13);

        let e1 = SpectralField::from_fn(grid(), |_| [1.0, 0.0, 0.0]).unwrap();
        let e2 = SpectralField::from_fn(grid(), |_| [0.0, 1.0, 0.0]).unwrap();
        let e3 = SpectralField::from_fn(grid(), |_| [0.0, 0.0, 1.0]).unwrap();
        let c = dealiased_product(&e1, &e2, ProductKind::Cross).unwrap();
        assert!(c.difference(&e3).l2_norm() < 1e-13);
    }

    #[test]
    fn advect_constant_is_zero() {
        let u = SpectralField::random_band(grid(), 1.0, 4.0, 37);
        let c = SpectralField::from_fn(grid(), |_| [0.3, -0.7, 1.1]).unwrap();
        let a = dealiased_product(&u, &c, ProductKind::Advect).unwrap();
        assert!(a.l2_norm() < 1e-13);
    }

    #[test]
    fn recovered_pressure_closes_the_projection() {
        // The gradient of the recovered pressure is exactly the part of the
        // momentum forcing that the projection removes.
        let u = leray_project(&SpectralField::random_band(grid(), 1.0, 4.0, 51));
        let b = leray_project(&SpectralField::random_band(grid(), 1.0, 4.0, 52));
        let mut forcing = dealiased_product(&b, &b, ProductKind::Advect).unwrap();
        forcing.sub_assign(&dealiased_product(&u, &u, ProductKind::Advect).unwrap());
        let removed = forcing.difference(&leray_project(&forcing));
        let grad_p = gradient(&diagnostic_pressure(&u, &b).unwrap());
        let rel = removed.difference(&grad_p).l2_norm() / removed.l2_norm();
        assert!(rel < 1e-12, "pressure closure {rel}");
    }

    #[test]
    fn dilation_moves_modes_exactly() {
        let f = SpectralField::random_band(grid(), 1.0, 2.0, 53);
        let d = dyadic_dilate(&f, 1).unwrap();
        assert_eq!(f.l2_norm(), d.l2_norm());
        let g = f.grid;
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            let nonzero = k.iter().any(|&c| c != 0);
            let within = k.iter().all(|&c| (2 * c).abs() < g.n() as i64 / 2);
            if nonzero && within {
                let doubled = g.idx(
                    g.index_of_wavenumber(2 * k[0]),
                    g.index_of_wavenumber(2 * k[1]),
                    g.index_of_wavenumber(2 * k[2]),
                );
                for c in 0..3 {
                    assert_eq!(d.components[c][doubled], f.components[c][idx]);
                }
            }
        }
        // pushing content off the lattice is an error
        let wide = SpectralField::random_band(grid(), 1.0, 5.0, 54);
        assert!(dyadic_dilate(&wide, 3).is_err());
    }

    #[test]
    fn hall_term_degenerate_cases() {
        let c = SpectralField::from_fn(grid(), |_| [0.5, 0.25, -1.0]).unwrap();
        assert!(hall_term(&c, 1.0).unwrap().l2_norm() < 1e-13);

        let beltrami = SpectralField::from_fn(grid(), |x| {
            [
                x[2].sin() + x[1].cos(),
                x[0].sin() + x[2].cos(),
                x[1].sin() + x[0].cos(),
            ]
        })
        .unwrap();
        assert!(hall_term(&beltrami, 1.0).unwrap().l2_norm() < 1e-12);

        let b = SpectralField::random_band(grid(), 1.0, 4.0, 41);
        assert!(hall_term(&b, 0.0).unwrap().l2_norm() == 0.0);
        let h = hall_term(&leray_project(&b), 1.0).unwrap();
        assert!(h.is_divergence_free(1e-12));
    }
}
