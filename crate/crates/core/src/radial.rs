//! Explicit solution families.
//!
//! * the annulus field: radially symmetric solutions of `-Δh + h = 0` on
//!   the two rings `r ≤ ρ ≤ 2` and `2 ≤ ρ ≤ R`, glued at `ρ = 2` with
//!   equal and opposite slopes so that the vorticity is a measure on the
//!   middle circle;
//! * the n-line fields `|I_n(ρ) cos(nθ)|`, singular on n diameters;
//! * the slab kink `e^{-|x|}`, and its finite-flip generalization.

use crate::fields::{GridField, MASKED};
use crate::specfun::{bessel_i_value, bessel_k_value};
use crate::{Error, Result};

/// Node lattice specification: `cells`+1 nodes per side on the square
/// `[-half, half]²`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub cells: usize,
    pub half: f64,
}

impl GridSpec {
    pub fn square(cells: usize, half: f64) -> Self {
        GridSpec { cells, half }
    }
    pub fn nodes(&self) -> usize {
        self.cells + 1
    }
    pub fn spacing(&self) -> f64 {
        2.0 * self.half / self.cells as f64
    }
}

/// Coefficients of the two Bessel-basis profiles
/// `h₁ = α I₀ + β K₀` (inner ring, `h₁(r) = 0`, `h₁(2) = 1`) and
/// `h₂ = γ I₀ + δ K₀` (outer ring, `h₂(2) = 1`, `h₂(R) = 0`).
#[derive(Debug, Clone, Copy)]
pub struct AnnulusCoefficients {
    pub r: f64,
    pub big_r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl AnnulusCoefficients {
    pub fn h1(&self, rho: f64) -> f64 {
        self.alpha * bessel_i_value(0, rho).unwrap() + self.beta * bessel_k_value(0, rho).unwrap()
    }
    pub fn h2(&self, rho: f64) -> f64 {
        self.gamma * bessel_i_value(0, rho).unwrap() + self.delta * bessel_k_value(0, rho).unwrap()
    }
    pub fn h1_deriv(&self, rho: f64) -> f64 {
        self.alpha * bessel_i_value(1, rho).unwrap() - self.beta * bessel_k_value(1, rho).unwrap()
    }
    pub fn h2_deriv(&self, rho: f64) -> f64 {
        self.gamma * bessel_i_value(1, rho).unwrap() - self.delta * bessel_k_value(1, rho).unwrap()
    }
    /// Piecewise profile: `h₁` below the middle circle, `h₂` above.
    pub fn h(&self, rho: f64) -> f64 {
        if rho <= 2.0 {
            self.h1(rho)
        } else {
            self.h2(rho)
        }
    }
}

fn ring_denominator(rho: f64) -> Result<f64> {
    let den = bessel_k_value(0, 2.0)? * bessel_i_value(0, rho)?
        - bessel_i_value(0, 2.0)? * bessel_k_value(0, rho)?;
    if den.abs() < 1e-14 {
        return Err(Error::Domain(format!(
            "singular Bessel denominator at rho = {rho}"
        )));
    }
    Ok(den)
}

/// Dirichlet coefficients for inner radius `r ∈ (0, 2)` and outer `R > 2`.
pub fn annulus_coefficients(r: f64, big_r: f64) -> Result<AnnulusCoefficients> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::Domain(format!("inner radius must lie in (0, 2), got {r}")));
    }
    if !(big_r > 2.0) {
        return Err(Error::Domain(format!("outer radius must exceed 2, got {big_r}")));
    }
    let den_r = ring_denominator(r)?;
    let den_big = ring_denominator(big_r)?;
    Ok(AnnulusCoefficients {
        r,
        big_r,
        alpha: -bessel_k_value(0, r)? / den_r,
        beta: bessel_i_value(0, r)? / den_r,
        gamma: -bessel_k_value(0, big_r)? / den_big,
        delta: bessel_i_value(0, big_r)? / den_big,
    })
}

/// Inner slope function `f(r) = h₁'(2)`.
pub fn inner_slope(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::Domain(format!("inner radius must lie in (0, 2), got {r}")));
    }
    let den = ring_denominator(r)?;
    let alpha = -bessel_k_value(0, r)? / den;
    let beta = bessel_i_value(0, r)? / den;
    Ok(alpha * bessel_i_value(1, 2.0)? - beta * bessel_k_value(1, 2.0)?)
}

/// Outer slope function `g(R) = h₂'(2)`.
pub fn outer_slope(big_r: f64) -> Result<f64> {
    if !(big_r > 2.0) {
        return Err(Error::Domain(format!("outer radius must exceed 2, got {big_r}")));
    }
    let den = ring_denominator(big_r)?;
    let gamma = -bessel_k_value(0, big_r)? / den;
    let delta = bessel_i_value(0, big_r)? / den;
    Ok(gamma * bessel_i_value(1, 2.0)? - delta * bessel_k_value(1, 2.0)?)
}

/// A matched pair of ring profiles: `h₁'(2) = -h₂'(2)`, so the glued field
/// has a ridge of equal and opposite slopes on the middle circle.
#[derive(Debug, Clone, Copy)]
pub struct MatchedAnnulus {
    pub coefficients: AnnulusCoefficients,
    /// `f(r) = h₁'(2)`, the (positive) one-sided radial slope at the ridge.
    pub inner_slope_value: f64,
    /// `|f(r) + g(R)|` after matching.
    pub match_residual: f64,
}

/// Find `R > 2` with `g(R) = -f(r)` by bracketing and bisection.
///
/// `g` decreases without bound as `R → 2⁺` and tends to `-K₁(2)/K₀(2)`
/// as `R → ∞`, so a match exists exactly when `f(r) > K₁(2)/K₀(2)`;
/// otherwise this returns [`Error::NoMatch`].
pub fn match_annulus(r: f64) -> Result<MatchedAnnulus> {
    let f = inner_slope(r)?;
    let ceiling = bessel_k_value(1, 2.0)? / bessel_k_value(0, 2.0)?;
    if f <= ceiling {
        return Err(Error::NoMatch(format!(
            "f({r}) = {f:.6} does not exceed K1(2)/K0(2) = {ceiling:.6}; \
             no outer radius can balance the inner slope"
        )));
    }
    let target = |big_r: f64| -> Result<f64> { Ok(f + outer_slope(big_r)?) };
    let mut lo = 2.0 + 1e-9;
    let mut hi = 4.0;
    let f_lo = target(lo)?;
    if f_lo >= 0.0 {
        // slope already balanced at the degenerate end; shrink bracket
        lo = 2.0 + 1e-12;
    }
    let mut f_hi = target(hi)?;
    let mut doubles = 0;
    while f_hi < 0.0 {
        hi *= 2.0;
        f_hi = target(hi)?;
        doubles += 1;
        if doubles > 60 {
            return Err(Error::NoMatch(format!(
                "no sign change of f({r}) + g(R) up to R = {hi:.3e}"
            )));
        }
    }
    // bisection to 1e-12 in R
    let mut f_lo = target(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = target(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let big_r = 0.5 * (lo + hi);
    let coefficients = annulus_coefficients(r, big_r)?;
    let residual = (f + outer_slope(big_r)?).abs();
    if residual > 1e-10 {
        return Err(Error::NoMatch(format!(
            "bisection stalled: residual {residual:.3e} at R = {big_r}"
        )));
    }
    Ok(MatchedAnnulus {
        coefficients,
        inner_slope_value: f,
        match_residual: residual,
    })
}

/// Width of the guard band of extra active nodes kept beyond the domain of
/// a masked field, in units of the grid spacing.  Boundary stencils and
/// bicubic sampling stay inside the band.
pub const MASK_GUARD_CELLS: f64 = 3.0;

/// Sample the matched profile on a Cartesian grid covering the annulus.
///
/// The mask keeps `r - g ≤ ρ ≤ R + g` active, where `g` is the guard
/// width [`MASK_GUARD_CELLS`]·spacing; the values on the guard ring are the
/// natural radial continuation of the two profiles.
pub fn annulus_field(m: &MatchedAnnulus, spec: GridSpec) -> Result<GridField> {
    let c = &m.coefficients;
    let h = spec.spacing();
    let guard = MASK_GUARD_CELLS * h;
    if spec.half < c.big_r + 2.0 * guard {
        return Err(Error::Grid(format!(
            "grid half-extent {} does not cover the annulus of outer radius {} plus guard",
            spec.half, c.big_r
        )));
    }
    if c.r <= 2.0 * guard {
        return Err(Error::Grid(format!(
            "inner radius {} too small for the {guard}-wide guard band",
            c.r
        )));
    }
    let n = spec.nodes();
    let mut values = vec![MASKED; n * n];
    let mut mask = vec![false; n * n];
    for j in 0..n {
        let y = -spec.half + j as f64 * h;
        for i in 0..n {
            let x = -spec.half + i as f64 * h;
            let rho = x.hypot(y);
            if rho >= c.r - guard && rho <= c.big_r + guard {
                values[j * n + i] = c.h(rho);
                mask[j * n + i] = true;
            }
        }
    }
    GridField::new(n, n, (-spec.half, -spec.half), (h, h), values, Some(mask))
}

/// `h = |I_n(ρ) cos(nθ)|` on the unit disk; zero set is n diameters at the
/// angles `π/(2n) + kπ/n`.
pub fn multiline_field(n_lines: u32, spec: GridSpec) -> Result<GridField> {
    if !(2..=12).contains(&n_lines) {
        return Err(Error::Domain(format!(
            "line count must lie in 2..=12, got {n_lines}"
        )));
    }
    let h = spec.spacing();
    let guard = MASK_GUARD_CELLS * h;
    if spec.half < 1.0 + 2.0 * guard {
        return Err(Error::Grid(format!(
            "grid half-extent {} does not cover the unit disk plus guard",
            spec.half
        )));
    }
    let n = spec.nodes();
    let mut values = vec![MASKED; n * n];
    let mut mask = vec![false; n * n];
    for j in 0..n {
        let y = -spec.half + j as f64 * h;
        for i in 0..n {
            let x = -spec.half + i as f64 * h;
            let rho = x.hypot(y);
            if rho <= 1.0 + guard {
                let theta = y.atan2(x);
                let v = bessel_i_value(n_lines, rho)? * (n_lines as f64 * theta).cos();
                values[j * n + i] = v.abs();
                mask[j * n + i] = true;
            }
        }
    }
    GridField::new(n, n, (-spec.half, -spec.half), (h, h), values, Some(mask))
}

/// The slab kink `h(x, y) = e^{-|x|}` on `(-1, 1)²`.
pub fn slab_field(spec: GridSpec) -> Result<GridField> {
    let h = spec.spacing();
    let n = spec.nodes();
    GridField::from_fn(n, n, (-spec.half, -spec.half), (h, h), |x, _| (-x.abs()).exp())
}

/// Finite-flip stationary field: `h = exp(∫₀ˣ g)` with `g = ±1` flipping
/// sign at the given strictly increasing positions inside `(-half, half)`;
/// the leftmost interval carries `g = +1`.  With a single flip at 0 this
/// reduces to the slab kink.
pub fn nonbv_field(flips: &[f64], spec: GridSpec) -> Result<GridField> {
    if flips.is_empty() {
        return Err(Error::Domain("need at least one flip position".into()));
    }
    for w in flips.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Domain(format!(
                "flip positions must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if flips[0] <= -spec.half || flips[flips.len() - 1] >= spec.half {
        return Err(Error::Domain(
            "flip positions must lie strictly inside the grid".into(),
        ));
    }
    // sign of g on the interval containing x; leftmost interval is +1
    let sign_at = |x: f64| -> f64 {
        let crossed = flips.iter().filter(|&&p| p <= x).count();
        if crossed % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    // cumulative integral of g from 0 to x
    let integral_to = |x: f64| -> f64 {
        let (a, b) = if x >= 0.0 { (0.0, x) } else { (x, 0.0) };
        let mut acc = 0.0;
        let mut left = a;
        for &p in flips.iter().filter(|&&p| p > a && p < b) {
            acc += sign_at(0.5 * (left + p)) * (p - left);
            left = p;
        }
        acc += sign_at(0.5 * (left + b)) * (b - left);
        if x >= 0.0 {
            acc
        } else {
            -acc
        }
    };
    let h = spec.spacing();
    let n = spec.nodes();
    GridField::from_fn(n, n, (-spec.half, -spec.half), (h, h), |x, _| {
        integral_to(x).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::gradient;
    use crate::specfun::{bessel_i_value, bessel_k_value};
    use approx::assert_abs_diff_eq;

    // matched pair for r = 1.5, frozen from a 30-digit bisection oracle
    const MATCHED_R_15: f64 = 2.694_590_912_575_676_6;
    const F_15: f64 = 1.902_395_836_749_078_5;

    #[test]
    fn coefficients_satisfy_boundary_conditions() {
        let c = annulus_coefficients(1.0, 4.0).unwrap();
        assert!(c.h1(1.0).abs() < 1e-12);
        assert!((c.h1(2.0) - 1.0).abs() < 1e-12);
        assert!((c.h2(2.0) - 1.0).abs() < 1e-12);
        assert!(c.h2(4.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_matches_direct_formula() {
        let c = annulus_coefficients(1.0, 4.0).unwrap();
        let expect = -bessel_k_value(0, 1.0).unwrap()
            / (bessel_k_value(0, 2.0).unwrap() * bessel_i_value(0, 1.0).unwrap()
                - bessel_i_value(0, 2.0).unwrap() * bessel_k_value(0, 1.0).unwrap());
        assert_abs_diff_eq!(c.alpha, expect, epsilon = 1e-14);
    }

    #[test]
    fn near_degenerate_inner_radius_keeps_identities() {
        let c = annulus_coefficients(1.999, 4.0).unwrap();
        assert!(c.alpha.abs() > 50.0, "alpha = {}", c.alpha);
        assert!(c.beta.abs() > 50.0, "beta = {}", c.beta);
        assert!(c.h1(1.999).abs() < 1e-10);
        assert!(inner_slope(1.999).unwrap() > 100.0);
    }

    #[test]
    fn slope_limits() {
        // r → 0: f → I₁(2)/I₀(2) ≈ 0.69777
        let limit_inner =
            bessel_i_value(1, 2.0).unwrap() / bessel_i_value(0, 2.0).unwrap();
        assert_abs_diff_eq!(limit_inner, 0.697_774_657_964_008, epsilon = 1e-12);
        assert!((inner_slope(1e-6).unwrap() - limit_inner).abs() < 1e-4);
        assert!(inner_slope(1.0).unwrap() > 0.0);
        // R → ∞: g → -K₁(2)/K₀(2) ≈ -1.22804
        let limit_outer =
            -bessel_k_value(1, 2.0).unwrap() / bessel_k_value(0, 2.0).unwrap();
        assert_abs_diff_eq!(limit_outer, -1.228_036_929_818_908, epsilon = 1e-12);
        assert!((outer_slope(30.0).unwrap() - limit_outer).abs() < 1e-6);
        assert!(outer_slope(2.001).unwrap() < -100.0);
        assert!(outer_slope(4.0).unwrap() < 0.0);
    }

    #[test]
    fn slopes_match_centered_differences() {
        let c = annulus_coefficients(1.3, 3.5).unwrap();
        let h = 1e-5;
        let d1 = (c.h1(2.0 + h) - c.h1(2.0 - h)) / (2.0 * h);
        let d2 = (c.h2(2.0 + h) - c.h2(2.0 - h)) / (2.0 * h);
        assert_abs_diff_eq!(c.h1_deriv(2.0), d1, epsilon = 1e-8);
        assert_abs_diff_eq!(c.h2_deriv(2.0), d2, epsilon = 1e-8);
    }

    #[test]
    fn matching_succeeds_above_the_slope_ceiling() {
        let m = match_annulus(1.5).unwrap();
        let big_r = m.coefficients.big_r;
        assert!(m.match_residual < 1e-10);
        assert!(1.5 < 2.0 && 2.0 < big_r);
        assert_abs_diff_eq!(big_r, MATCHED_R_15, epsilon = 1e-9);
        assert_abs_diff_eq!(m.inner_slope_value, F_15, epsilon = 1e-12);
    }

    #[test]
    fn matching_rejects_shallow_inner_slopes() {
        // f(0.05) ≈ 0.729 < K₁(2)/K₀(2) ≈ 1.228: no outer radius balances it
        match match_annulus(0.05) {
            Err(crate::Error::NoMatch(_)) => {}
            other => panic!("expected NoMatch, got {other:?}"),
        }
        // f(1) ≈ 1.038 also sits below the ceiling
        match match_annulus(1.0) {
            Err(crate::Error::NoMatch(_)) => {}
            other => panic!("expected NoMatch, got {other:?}"),
        }
    }

    #[test]
    fn annulus_field_boundary_and_symmetry() {
        let m = match_annulus(1.5).unwrap();
        let big_r = m.coefficients.big_r;
        let spec = GridSpec::square(192, big_r + 0.5);
        let f = annulus_field(&m, spec).unwrap();
        // Dirichlet data at sampled boundary points (profile evaluation)
        for &rho in &[1.5, big_r] {
            assert!(m.coefficients.h(rho).abs() < 1e-10, "h({rho}) not 0");
        }
        assert_abs_diff_eq!(m.coefficients.h(2.0), 1.0, epsilon = 1e-12);
        // radial symmetry of node values at equal radius
        let c = f.nx() / 2; // origin node index (even cells)
        let k = (1.8 / f.dx()).round() as usize;
        let v_east = f.get(c + k, c);
        let v_north = f.get(c, c + k);
        let v_west = f.get(c - k, c);
        assert_abs_diff_eq!(v_east, v_north, epsilon = 1e-12);
        assert_abs_diff_eq!(v_east, v_west, epsilon = 1e-12);
        // value at the ridge radius is 1
        let k2 = (2.0 / f.dx()).round() as usize;
        let x = f.x(c + k2);
        assert_abs_diff_eq!(f.get(c + k2, c), m.coefficients.h(x), epsilon = 1e-12);
    }

    /// Derivative at `t` of the cubic through `(xs[k], vs[k])`.
    fn cubic_fit_deriv(xs: [f64; 4], vs: [f64; 4], t: f64) -> f64 {
        let mut d = 0.0;
        for k in 0..4 {
            // derivative of the k-th Lagrange basis at t
            let mut basis_d = 0.0;
            for m in 0..4 {
                if m == k {
                    continue;
                }
                let mut prod = 1.0;
                for l in 0..4 {
                    if l != k && l != m {
                        prod *= (t - xs[l]) / (xs[k] - xs[l]);
                    }
                }
                basis_d += prod / (xs[k] - xs[m]);
            }
            d += vs[k] * basis_d;
        }
        d
    }

    #[test]
    fn one_sided_ridge_slopes_converge_to_match() {
        let m = match_annulus(1.5).unwrap();
        let mut errs = Vec::new();
        for cells in [128usize, 256] {
            let spec = GridSpec::square(cells, m.coefficients.big_r + 0.5);
            let f = annulus_field(&m, spec).unwrap();
            let h = f.dx();
            let c = f.ny() / 2; // y = 0 row
            let i0 = ((2.0 - f.x0()) / h).floor() as usize; // node just below ρ = 2
            // cubic fits through four nodes on each side, differentiated at 2
            let xs_in = [f.x(i0 - 3), f.x(i0 - 2), f.x(i0 - 1), f.x(i0)];
            let vs_in = [
                f.get(i0 - 3, c),
                f.get(i0 - 2, c),
                f.get(i0 - 1, c),
                f.get(i0, c),
            ];
            let xs_out = [f.x(i0 + 1), f.x(i0 + 2), f.x(i0 + 3), f.x(i0 + 4)];
            let vs_out = [
                f.get(i0 + 1, c),
                f.get(i0 + 2, c),
                f.get(i0 + 3, c),
                f.get(i0 + 4, c),
            ];
            let inner = cubic_fit_deriv(xs_in, vs_in, 2.0);
            let outer = cubic_fit_deriv(xs_out, vs_out, 2.0);
            errs.push(((inner - F_15).abs()).max((outer + F_15).abs()));
        }
        assert!(errs[1] < errs[0], "one-sided slopes not converging: {errs:?}");
        assert!(errs[1] < 0.02 * F_15, "slope error too large: {errs:?}");
    }

    #[test]
    fn multiline_zero_set_and_center() {
        let spec = GridSpec::square(200, 1.1);
        let f = multiline_field(2, spec).unwrap();
        let c = f.nx() / 2;
        assert_abs_diff_eq!(f.get(c, c), 0.0, epsilon = 1e-14);
        // nodes on the diagonals y = ±x (cos 2θ = 0 there)
        for k in 1..40 {
            assert!(f.get(c + k, c + k) < 1e-14);
            assert!(f.get(c + k, c - k) < 1e-14);
        }
        assert!(multiline_field(1, spec).is_err());
        assert!(multiline_field(13, spec).is_err());
    }

    #[test]
    fn multiline_rotation_invariance() {
        let spec = GridSpec::square(128, 1.1);
        let f = multiline_field(3, spec).unwrap();
        // rotation by 2π/3 maps the field onto itself; compare samples
        let rot = 2.0 * std::f64::consts::PI / 3.0;
        let (s, c) = rot.sin_cos();
        let mut worst = 0.0f64;
        for k in 0..64 {
            let theta = 0.1 + k as f64 * 0.09;
            let rho = 0.2 + 0.65 * (k as f64 / 64.0);
            let (x, y) = (rho * theta.cos(), rho * theta.sin());
            let (xr, yr) = (c * x - s * y, s * x + c * y);
            worst = worst.max((f.sample(x, y) - f.sample(xr, yr)).abs());
        }
        assert!(worst < 1e-10, "rotation defect {worst}");
    }

    #[test]
    fn multiline_radial_factor_solves_its_ode() {
        for &rho in &[0.5, 1.0] {
            for n in [2u32, 3] {
                let res = crate::specfun::ode_residual(n, rho, crate::specfun::BesselKind::I)
                    .unwrap();
                assert!(res.abs() < 1e-10, "n={n} rho={rho} residual={res}");
            }
        }
    }

    #[test]
    fn slab_peak_and_eikonal_property() {
        let spec = GridSpec::square(256, 1.0);
        let f = slab_field(spec).unwrap();
        let n = f.nx();
        let c = n / 2;
        for j in 0..n {
            assert_abs_diff_eq!(f.get(c, j), 1.0, epsilon = 1e-15);
        }
        // |∇h| = h away from the kink, to second order
        let g = gradient(&f);
        let mut worst = 0.0f64;
        for j in 2..n - 2 {
            for i in 2..n - 2 {
                if (f.x(i)).abs() < 2.5 * f.dx() {
                    continue;
                }
                let mag = g.fx.get(i, j).hypot(g.fy.get(i, j));
                worst = worst.max((mag - f.get(i, j)).abs());
            }
        }
        assert!(worst < 2.0 * f.dx() * f.dx(), "eikonal defect {worst}");
    }

    #[test]
    fn nonbv_field_flips_and_slab_reduction() {
        let spec = GridSpec::square(200, 1.0);
        let f = nonbv_field(&[-0.5, 0.0, 0.5], spec).unwrap();
        let g = gradient(&f);
        let n = f.nx();
        let mut worst = 0.0f64;
        for j in 2..n - 2 {
            for i in 2..n - 2 {
                let x = f.x(i);
                // stay away from the three flip lines
                if [-0.5, 0.0, 0.5].iter().any(|p| (x - p).abs() < 3.0 * f.dx()) {
                    continue;
                }
                worst = worst.max((g.fx.get(i, j).abs() - f.get(i, j)).abs());
            }
        }
        assert!(worst < 5.0 * f.dx() * f.dx(), "|∂ₓh| = h defect {worst}");
        // single flip at 0 reproduces the slab
        let s1 = nonbv_field(&[0.0], spec).unwrap();
        let slab = slab_field(spec).unwrap();
        for k in 0..s1.values().len() {
            assert_abs_diff_eq!(s1.values()[k], slab.values()[k], epsilon = 1e-13);
        }
        assert!(nonbv_field(&[0.3, 0.3], spec).is_err());
        assert!(nonbv_field(&[], spec).is_err());
        assert!(nonbv_field(&[1.5], spec).is_err());
    }
}
