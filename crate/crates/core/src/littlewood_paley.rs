//! Dyadic frequency decomposition, paraproduct splitting, and the
//! frequency-localized commutators used by the shell energy estimates.
//!
//! The radial cutoff is `χ(r) = 1` for `r ≤ 3/4`, `0` for `r ≥ 1`, with a
//! fixed exponential smoothstep in between so every run is reproducible. The
//! annular profiles are `φ_q(ξ) = χ(ξ/2^{q+1}) - χ(ξ/2^q)` for `q ≥ 0` and
//! `φ_{-1} = χ`, giving the telescoping partition `Σ_{q=-1}^{Q} φ_q(ξ) =
//! χ(ξ/2^{Q+1})`. With this profile `φ_q` is supported on the open annulus
//! `(3·2^{q-2}, 2^{q+1})`, so blocks two or more shells apart have disjoint
//! support and the paraproduct interaction band below is exactly
//! [`INTERACTION_BAND`].

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::operators::{self, Axis, ProductKind};

/// Half-width of the paraproduct interaction band: `Δ_q(u_{≤p-2}·∇v_p)` and
/// `Δ_q(u_p·∇v_{≤p-2})` vanish identically for `|p-q| >` this value, and the
/// diagonal part vanishes for `p < q -` this value. Frozen after a one-time
/// numerical support check (`band_is_exact` below) confirming the value
/// implied by the cutoff supports.
pub const INTERACTION_BAND: i32 = 2;

/// λ_q = 2^q, the nominal frequency of shell `q` (q = -1 gives 1/2).
#[inline]
pub fn lambda(q: i32) -> f64 {
    (2.0f64).powi(q)
}

/// The smooth radial cutoff profile and its derived shell data for one grid.
#[derive(Debug, Clone)]
pub struct DyadicProfile {
    grid: Grid,
    q_max: i32,
}

impl DyadicProfile {
    /// Builds the profile for `grid`; `q_max` is the largest shell whose
    /// annulus `(3·2^{q-2}, 2^{q+1})` lies inside the dealiased ball
    /// (`2^{q_max+1} ≤ N/3`).
    pub fn new(grid: Grid) -> Self {
        let limit = grid.n() as f64 / 3.0;
        let mut q_max = 0;
        while lambda(q_max + 2) <= limit {
            q_max += 1;
        }
        DyadicProfile { grid, q_max }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Largest fully resolvable shell index.
    #[inline]
    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Radius below which the partition of unity is complete:
    /// `Σ_{q=-1}^{q_max} φ_q(r) = 1` exactly for `r ≤ (3/4)·2^{q_max+1}`.
    #[inline]
    pub fn coverage_radius(&self) -> f64 {
        0.75 * lambda(self.q_max + 1)
    }

    /// The radial cutoff χ: 1 on `[0, 3/4]`, 0 on `[1, ∞)`, smooth monotone
    /// transition `ψ(4(1-r)) / (ψ(4(1-r)) + ψ(4(r-3/4)))`, ψ(t) = e^{-1/t}.
    pub fn chi(r: f64) -> f64 {
        if r <= 0.75 {
            1.0
        } else if r >= 1.0 {
            0.0
        } else {
            let up = smooth_bump(4.0 * (1.0 - r));
            let down = smooth_bump(4.0 * (r - 0.75));
            up / (up + down)
        }
    }

    /// Annular profile `φ_q` (χ itself for q = -1).
    pub fn phi(q: i32, r: f64) -> f64 {
        if q == -1 {
            Self::chi(r)
        } else {
            Self::chi(r / lambda(q + 1)) - Self::chi(r / lambda(q))
        }
    }

    fn check_shell(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.q_max {
            return Err(Error::ShellOutOfRange {
                q,
                q_max: self.q_max,
            });
        }
        Ok(())
    }
}

fn smooth_bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// The full set of dyadic blocks of a field, `u_q = Δ_q u`.
#[derive(Debug, Clone)]
pub struct ShellDecomposition {
    pub blocks: Vec<SpectralField>,
    /// `lambda[i]` is λ_q for `q = i as i32 - 1`.
    pub lambda: Vec<f64>,
}

impl ShellDecomposition {
    pub fn new(profile: &DyadicProfile, u: &SpectralField) -> Self {
        let blocks: Vec<SpectralField> = (-1..=profile.q_max())
            .map(|q| dyadic_block_unchecked(u, q))
            .collect();
        let lambda = (-1..=profile.q_max()).map(lambda).collect();
        ShellDecomposition { blocks, lambda }
    }

    /// Sum of all blocks (reconstructs the field on covered modes).
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            out.add_assign(b);
        }
        out
    }
}

fn dyadic_block_unchecked(u: &SpectralField, q: i32) -> SpectralField {
    u.with_multiplier(move |k| {
        let r = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        DyadicProfile::phi(q, r)
    })
}

/// `Δ_q u`: scales each coefficient by `φ_q(|k|)`.
pub fn dyadic_block(profile: &DyadicProfile, u: &SpectralField, q: i32) -> Result<SpectralField> {
    profile.check_shell(q)?;
    Ok(dyadic_block_unchecked(u, q))
}

/// Low-pass partial sum `u_{≤Q} = Σ_{q=-1}^{Q} u_q`, realized directly as the
/// multiplier `χ(|k|/2^{Q+1})`. `Q < -1` gives the zero field (empty sum).
pub fn low_pass(profile: &DyadicProfile, u: &SpectralField, q_top: i32) -> Result<SpectralField> {
    if q_top < -1 {
        return Ok(SpectralField::zeros(u.grid));
    }
    profile.check_shell(q_top)?;
    Ok(low_pass_unchecked(u, q_top))
}

fn low_pass_unchecked(u: &SpectralField, q_top: i32) -> SpectralField {
    if q_top < -1 {
        return SpectralField::zeros(u.grid);
    }
    let cutoff = lambda(q_top + 1);
    u.with_multiplier(move |k| {
        let r = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        DyadicProfile::chi(r / cutoff)
    })
}

/// Shell Sobolev norm `(Σ_q λ_q^{2s} ‖u_q‖₂²)^{1/2}` over the resolvable
/// shells. Equivalent (not equal) to the direct norm
/// `(Σ_k |k|^{2s}|û(k)|²)^{1/2}` on zero-mean band-limited fields.
pub fn shell_sobolev_norm(profile: &DyadicProfile, u: &SpectralField, s: f64) -> f64 {
    let mut total = 0.0;
    for q in -1..=profile.q_max() {
        let block = dyadic_block_unchecked(u, q);
        total += lambda(q).powf(2.0 * s) * block.l2_norm().powi(2);
    }
    total.sqrt()
}

/// Direct lattice Sobolev norm `(Σ_{k≠0} |k|^{2s}|û(k)|²)^{1/2}` (the `k = 0`
/// mode is excluded, matching the homogeneous norm on zero-mean fields).
pub fn direct_sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let grid = u.grid;
    let mut total = 0.0;
    for idx in 0..grid.len() {
        let ksq = grid.k_sq(idx);
        if ksq == 0.0 {
            continue;
        }
        let mag = u.components[0][idx].norm_sqr()
            + u.components[1][idx].norm_sqr()
            + u.components[2][idx].norm_sqr();
        total += ksq.powf(s) * mag;
    }
    (grid.volume() * total).sqrt()
}

/// Result of one empirical-constant probe of a commutator bound.
#[derive(Debug, Clone, Copy)]
pub struct CommutatorProbeResult {
    pub q: i32,
    pub p: i32,
    /// Measured norm (or pairing magnitude) on the left of the bound.
    pub norm_lhs: f64,
    /// The bounding product of norms on the right.
    pub bound_rhs: f64,
    /// `norm_lhs / bound_rhs` (0 when the bound side vanishes).
    pub ratio: f64,
}

impl CommutatorProbeResult {
    fn new(q: i32, p: i32, norm_lhs: f64, bound_rhs: f64) -> Self {
        let ratio = if bound_rhs > 0.0 {
            norm_lhs / bound_rhs
        } else {
            0.0
        };
        CommutatorProbeResult {
            q,
            p,
            norm_lhs,
            bound_rhs,
            ratio,
        }
    }
}

/// The three paraproduct parts of `Δ_q(u·∇v)` and the relative residual of
/// their sum against the directly computed block.
pub struct BonyParts {
    pub low_high: SpectralField,
    pub high_low: SpectralField,
    pub high_high: SpectralField,
    pub residual: f64,
}

/// Splits `Δ_q(u·∇v)` into low-high, high-low, and high-high interactions
/// with the frozen band [`INTERACTION_BAND`]:
///
/// - low-high: `Σ_{|p-q|≤B} Δ_q(u_{≤p-2}·∇v_p)`
/// - high-low: `Σ_{|p-q|≤B} Δ_q(u_p·∇v_{≤p-2})`
/// - high-high: `Σ_{p≥q-B} Δ_q(ũ_p·∇v_p)`, `ũ_p = Σ_{|r-p|≤1} u_r`
pub fn bony_decompose(
    profile: &DyadicProfile,
    u: &SpectralField,
    v: &SpectralField,
    q: i32,
) -> Result<BonyParts> {
    profile.check_shell(q)?;
    u.grid.check_same(&v.grid)?;
    let band = INTERACTION_BAND;
    let q_max = profile.q_max();

    let mut low_high = SpectralField::zeros(u.grid);
    let mut high_low = SpectralField::zeros(u.grid);
    let mut high_high = SpectralField::zeros(u.grid);

    for p in (q - band).max(-1)..=(q + band).min(q_max) {
        let v_p = dyadic_block_unchecked(v, p);
        let u_low = low_pass_unchecked(u, p - 2);
        let term = operators::dealiased_product(&u_low, &v_p, ProductKind::Advect)?;
        low_high.add_assign(&dyadic_block_unchecked(&term, q));

        let u_p = dyadic_block_unchecked(u, p);
        let v_low = low_pass_unchecked(v, p - 2);
        let term = operators::dealiased_product(&u_p, &v_low, ProductKind::Advect)?;
        high_low.add_assign(&dyadic_block_unchecked(&term, q));
    }

    for p in (q - band).max(-1)..=q_max {
        let mut u_tilde = SpectralField::zeros(u.grid);
        for r in (p - 1).max(-1)..=(p + 1).min(q_max) {
            u_tilde.add_assign(&dyadic_block_unchecked(u, r));
        }
        let v_p = dyadic_block_unchecked(v, p);
        let term = operators::dealiased_product(&u_tilde, &v_p, ProductKind::Advect)?;
        high_high.add_assign(&dyadic_block_unchecked(&term, q));
    }

    let full = operators::dealiased_product(u, v, ProductKind::Advect)?;
    let direct = dyadic_block_unchecked(&full, q);
    let mut sum = low_high.clone();
    sum.add_assign(&high_low);
    sum.add_assign(&high_high);
    // A shell can hold only roundoff content (e.g. q = -1, where the block is
    // the mean of u·∇v, zero for divergence-free u); measure such shells
    // relative to the full product instead of dividing roundoff by roundoff.
    let block_norm = direct.l2_norm();
    let full_norm = full.l2_norm();
    let denom = if block_norm > 1e-10 * full_norm {
        block_norm
    } else {
        full_norm
    };
    let residual = if denom > 0.0 {
        sum.difference(&direct).l2_norm() / denom
    } else {
        sum.l2_norm()
    };

    Ok(BonyParts {
        low_high,
        high_low,
        high_high,
        residual,
    })
}

/// Transport commutator `[Δ_q, u_{≤p-2}·∇] v_p
/// = Δ_q(u_{≤p-2}·∇v_p) - u_{≤p-2}·∇(Δ_q v_p)`,
/// both products dealiased identically.
pub fn commutator_transport(
    profile: &DyadicProfile,
    u: &SpectralField,
    v: &SpectralField,
    p: i32,
    q: i32,
) -> Result<SpectralField> {
    profile.check_shell(q)?;
    profile.check_shell(p)?;
    u.grid.check_same(&v.grid)?;
    let u_low = low_pass_unchecked(u, p - 2);
    let v_p = dyadic_block_unchecked(v, p);
    let mut first = dyadic_block_unchecked(
        &operators::dealiased_product(&u_low, &v_p, ProductKind::Advect)?,
        q,
    );
    let second = operators::dealiased_product(
        &u_low,
        &dyadic_block_unchecked(&v_p, q),
        ProductKind::Advect,
    )?;
    first.sub_assign(&second);
    Ok(first)
}

/// Which cross-product commutator to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossCommutatorMode {
    /// `[Δ_q, F×∇×]G = Δ_q(F×(∇×G)) - F×(∇×G_q)`; requires `∇·F = 0`.
    CrossCurl,
    /// `[Δ_q, (∇×F)×]G = Δ_q((∇×F)×G) - (∇×F)×G_q`.
    CurlCross,
}

/// Cross-product commutators entering the Hall-term estimates.
pub fn commutator_cross(
    profile: &DyadicProfile,
    f: &SpectralField,
    g: &SpectralField,
    q: i32,
    mode: CrossCommutatorMode,
) -> Result<SpectralField> {
    profile.check_shell(q)?;
    f.grid.check_same(&g.grid)?;
    if mode == CrossCommutatorMode::CrossCurl && !f.is_divergence_free(1e-10) {
        return Err(Error::PreconditionViolated(
            "cross-curl commutator requires a divergence-free first operand".into(),
        ));
    }
    let g_q = dyadic_block_unchecked(g, q);
    match mode {
        CrossCommutatorMode::CrossCurl => {
            let curl_g = operators::curl(g);
            let mut first = dyadic_block_unchecked(
                &operators::dealiased_product(f, &curl_g, ProductKind::Cross)?,
                q,
            );
            let second =
                operators::dealiased_product(f, &operators::curl(&g_q), ProductKind::Cross)?;
            first.sub_assign(&second);
            Ok(first)
        }
        CrossCommutatorMode::CurlCross => {
            let curl_f = operators::curl(f);
            let mut first = dyadic_block_unchecked(
                &operators::dealiased_product(&curl_f, g, ProductKind::Cross)?,
                q,
            );
            let second = operators::dealiased_product(&curl_f, &g_q, ProductKind::Cross)?;
            first.sub_assign(&second);
            Ok(first)
        }
    }
}

/// Pairing probe `|∫ [Δ_q,(∇×F)×]G · (∇×H) dx|` against the second-derivative
/// bound `‖∇²F‖_∞ ‖G‖₂ ‖H‖₂`.
pub fn trilinear_commutator_pairing(
    profile: &DyadicProfile,
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
    q: i32,
) -> Result<CommutatorProbeResult> {
    profile.check_shell(q)?;
    f.grid.check_same(&g.grid)?;
    f.grid.check_same(&h.grid)?;
    let comm = commutator_cross(profile, f, g, q, CrossCommutatorMode::CurlCross)?;
    let pairing = comm.inner(&operators::curl(h)).abs();
    let bound = hessian_linf(f) * g.l2_norm() * h.l2_norm();
    Ok(CommutatorProbeResult::new(q, q, pairing, bound))
}

/// `‖∇u‖_∞` on the collocation grid: max Frobenius norm of the Jacobian.
pub fn gradient_linf(u: &SpectralField) -> f64 {
    let grads = [
        operators::partial(u, Axis::X1).to_physical(),
        operators::partial(u, Axis::X2).to_physical(),
        operators::partial(u, Axis::X3).to_physical(),
    ];
    let grid = u.grid;
    (0..grid.len())
        .map(|idx| {
            let mut s = 0.0;
            for g in &grads {
                for c in 0..3 {
                    s += g.components[c][idx] * g.components[c][idx];
                }
            }
            s.sqrt()
        })
        .fold(0.0, f64::max)
}

/// `‖∇²u‖_∞` on the collocation grid: max Frobenius norm over all second
/// partials of all components.
pub fn hessian_linf(u: &SpectralField) -> f64 {
    let axes = [Axis::X1, Axis::X2, Axis::X3];
    let grid = u.grid;
    let mut sq = vec![0.0; grid.len()];
    for &a in &axes {
        let da = operators::partial(u, a);
        for &b in &axes {
            let dab = operators::partial(&da, b).to_physical();
            for c in 0..3 {
                for (slot, v) in sq.iter_mut().zip(&dab.components[c]) {
                    *slot += v * v;
                }
            }
        }
    }
    sq.iter().map(|v| v.sqrt()).fold(0.0, f64::max)
}

/// Bernstein ratio `‖u_q‖_r / (λ_q^{3(1/s-1/r)} ‖u_q‖_s)` with collocation
/// `L^p` norms; `r = ∞` is encoded as `f64::INFINITY`.
pub fn bernstein_ratio(
    profile: &DyadicProfile,
    u: &SpectralField,
    q: i32,
    r: f64,
    s_exp: f64,
) -> Result<f64> {
    profile.check_shell(q)?;
    if !(s_exp >= 1.0) || !(r >= s_exp) {
        return Err(Error::InvalidParameter(format!(
            "Bernstein exponents need 1 <= s <= r, got s={s_exp}, r={r}"
        )));
    }
    let block = dyadic_block_unchecked(u, q).to_physical();
    let norm_s = block.lp_norm(s_exp);
    if norm_s == 0.0 {
        return Err(Error::EmptyShell(q));
    }
    let norm_r = if r.is_infinite() {
        block.linf_norm()
    } else {
        block.lp_norm(r)
    };
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let exponent = 3.0 * (1.0 / s_exp - inv_r);
    Ok(norm_r / (lambda(q).powf(exponent) * norm_s))
}

/// One-time numerical confirmation that [`INTERACTION_BAND`] is wide enough:
/// returns the largest `‖Δ_q(u_{≤p-2}·∇v_p)‖₂ / scale` over `|p-q| = band+1`
/// for the given fields (should be roundoff).
pub fn band_is_exact(profile: &DyadicProfile, u: &SpectralField, v: &SpectralField) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let scale = u.l2_norm() * v.l2_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    for q in -1..=profile.q_max() {
        for dp in [-(INTERACTION_BAND + 1), INTERACTION_BAND + 1] {
            let p = q + dp;
            if p < -1 || p > profile.q_max() {
                continue;
            }
            let u_low = low_pass_unchecked(u, p - 2);
            let v_p = dyadic_block_unchecked(v, p);
            let term = operators::dealiased_product(&u_low, &v_p, ProductKind::Advect)?;
            let leak = dyadic_block_unchecked(&term, q).l2_norm();
            worst = worst.max(leak / scale);
        }
    }
    Ok(worst)
}

/// Random zero-mean field supported inside the profile's coverage ball, for
/// which the decomposition is exact; divergence-free after projection.
pub fn random_covered_field(profile: &DyadicProfile, seed: u64) -> SpectralField {
    SpectralField::random_band(profile.grid(), 1.0, profile.coverage_radius(), seed)
}
