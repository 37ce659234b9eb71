//! Identity verifiers: the stress-energy tensor and its weak divergence,
//! the complex form of the stationarity equation, the Pohozaev identity,
//! the star-shaped non-existence check, and discrete total variation of
//! the second derivatives.
//!
//! Every check is weak (paired against compactly supported bumps or
//! boundary traces), never a pointwise stencil divergence: the fields of
//! interest have measure-valued second derivatives.

use crate::fields::geometry::{boundary_integrals, DomainGeometry};
use crate::fields::{
    check_support, gradient, node_range, FieldGradient, GridField, TestFunction, MASKED,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The stress-energy tensor `T = 2∇h⊗∇h - (|∇h|² + h²)I` as grid fields.
/// `T12 = T21` by construction (assembled once); the trace satisfies
/// `T11 + T22 = -2h²` node-wise.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub t11: GridField,
    pub t12: GridField,
    pub t22: GridField,
}

impl TensorField {
    pub fn t21(&self) -> &GridField {
        &self.t12
    }
}

pub fn stress_tensor(h: &GridField) -> TensorField {
    let grad = gradient(h);
    stress_tensor_with_grad(h, &grad)
}

pub fn stress_tensor_with_grad(h: &GridField, grad: &FieldGradient) -> TensorField {
    let n = h.nx() * h.ny();
    let mut t11 = vec![MASKED; n];
    let mut t12 = vec![MASKED; n];
    let mut t22 = vec![MASKED; n];
    for j in 0..h.ny() {
        for i in 0..h.nx() {
            if !h.is_active(i, j) {
                continue;
            }
            let k = j * h.nx() + i;
            let hx = grad.fx.values()[k];
            let hy = grad.fy.values()[k];
            let v = h.values()[k];
            t11[k] = hx * hx - hy * hy - v * v;
            t12[k] = 2.0 * hx * hy;
            t22[k] = hy * hy - hx * hx - v * v;
        }
    }
    let mk = |values: Vec<f64>| {
        GridField::new(
            h.nx(),
            h.ny(),
            (h.x0(), h.y0()),
            (h.dx(), h.dy()),
            values,
            h.mask().map(|m| m.to_vec()),
        )
        .expect("tensor grid inherits a valid layout")
    };
    TensorField {
        t11: mk(t11),
        t12: mk(t12),
        t22: mk(t22),
    }
}

/// Row-wise weak divergence `(∫ T_row1·∇φ, ∫ T_row2·∇φ)`.
/// Both components vanish iff `div T = 0` holds distributionally against φ.
pub fn weak_divergence(t: &TensorField, phi: &TestFunction) -> Result<(f64, f64)> {
    check_support(&t.t11, phi)?;
    let f = &t.t11;
    let (bx0, by0, bx1, by1) = phi.support_bbox();
    let (i0, j0, i1, j1) = node_range(f, bx0, by0, bx1, by1);
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for j in j0..=j1 {
        let y = f.y(j);
        for i in i0..=i1 {
            let x = f.x(i);
            let (gx, gy) = phi.grad(x, y);
            if gx == 0.0 && gy == 0.0 {
                continue;
            }
            let k = j * f.nx() + i;
            d1 += t.t11.values()[k] * gx + t.t12.values()[k] * gy;
            d2 += t.t12.values()[k] * gx + t.t22.values()[k] * gy;
        }
    }
    let cell = f.dx() * f.dy();
    Ok((d1 * cell, d2 * cell))
}

/// Weak residual of the complex form
/// `∂_z̄[(∂_z h)²] = ¼ ∂_z(h²)`, with `∂_z = ½(∂₁ - i∂₂)`: all derivatives
/// are moved onto the bump, so the residual is
/// `-∫ (∂_z h)² ∂_z̄φ + ¼ ∫ h² ∂_zφ`.
pub fn complex_residual(h: &GridField, phi: &TestFunction) -> Result<Complex64> {
    let grad = gradient(h);
    complex_residual_with_grad(h, &grad, phi)
}

pub fn complex_residual_with_grad(
    h: &GridField,
    grad: &FieldGradient,
    phi: &TestFunction,
) -> Result<Complex64> {
    check_support(h, phi)?;
    let (bx0, by0, bx1, by1) = phi.support_bbox();
    let (i0, j0, i1, j1) = node_range(h, bx0, by0, bx1, by1);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in j0..=j1 {
        let y = h.y(j);
        for i in i0..=i1 {
            let x = h.x(i);
            let (gx, gy) = phi.grad(x, y);
            if gx == 0.0 && gy == 0.0 {
                continue;
            }
            let k = j * h.nx() + i;
            let hx = grad.fx.values()[k];
            let hy = grad.fy.values()[k];
            let dz_h_sq = Complex64::new(0.25 * (hx * hx - hy * hy), -0.5 * hx * hy);
            let dzbar_phi = Complex64::new(0.5 * gx, 0.5 * gy);
            let dz_phi = Complex64::new(0.5 * gx, -0.5 * gy);
            let v = h.values()[k];
            acc += -dz_h_sq * dzbar_phi + 0.25 * v * v * dz_phi;
        }
    }
    Ok(acc * h.dx() * h.dy())
}

/// Left side of the Pohozaev identity
/// `½∫_∂Ω (x·ν)(|∂_τh|² - |∂_νh|² + h²) - ∫_∂Ω (x·τ) ∂_τh ∂_νh - ∫_Ω h²`.
pub fn pohozaev_residual(h: &GridField, geom: &DomainGeometry) -> Result<f64> {
    let trace = boundary_integrals(h, geom)?;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (k, node) in geom.nodes().iter().enumerate() {
        let xdotnu = node.point.0 * node.normal.0 + node.point.1 * node.normal.1;
        let xdottau = node.point.0 * node.tangent.0 + node.point.1 * node.tangent.1;
        let dt = trace.tangential_deriv[k];
        let dn = trace.normal_deriv[k];
        let v = trace.values[k];
        b1 += node.weight * xdotnu * (dt * dt - dn * dn + v * v);
        b2 += node.weight * xdottau * dt * dn;
    }
    let interior = geom.interior_integral(h, |v, _, _| v * v)?;
    Ok(0.5 * b1 - b2 - interior)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

/// Outcome of the star-shaped non-existence check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarShapedReport {
    pub h2_integral: f64,
    /// `-½ ∫_∂Ω (x·ν) |∂_ν h|²`
    pub weighted_normal_term: f64,
    pub pohozaev_residual: f64,
    pub verdict: Verdict,
}

/// On a star-shaped domain with `h ≈ 0` on the boundary, the Pohozaev
/// identity collapses to `-½∫(x·ν)|∂_νh|² = ∫h²`, which forces `h ≡ 0`.
/// A field with small identity residual but `∫h²` far from zero is flagged
/// `Inconsistent`: it cannot satisfy the stationarity equation.
pub fn starshaped_conclusion(
    h: &GridField,
    geom: &DomainGeometry,
    boundary_tol: f64,
    h2_tol: f64,
    residual_tol: f64,
) -> Result<StarShapedReport> {
    if !geom.star_shaped_wrt_origin() {
        return Err(Error::Geometry(
            "domain is not star-shaped with respect to the origin".into(),
        ));
    }
    let trace = boundary_integrals(h, geom)?;
    let worst_boundary = trace.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst_boundary > boundary_tol {
        return Err(Error::Domain(format!(
            "boundary values reach {worst_boundary:.3e}; the check requires h ≈ 0 on ∂Ω"
        )));
    }
    let mut weighted = 0.0;
    for (k, node) in geom.nodes().iter().enumerate() {
        let xdotnu = node.point.0 * node.normal.0 + node.point.1 * node.normal.1;
        let dn = trace.normal_deriv[k];
        weighted += node.weight * xdotnu * dn * dn;
    }
    let weighted_normal_term = -0.5 * weighted;
    let h2_integral = geom.interior_integral(h, |v, _, _| v * v)?;
    let residual = pohozaev_residual(h, geom)?;
    let verdict = if h2_integral > h2_tol && residual.abs() < residual_tol {
        Verdict::Inconsistent
    } else {
        Verdict::Consistent
    };
    Ok(StarShapedReport {
        h2_integral,
        weighted_normal_term,
        pohozaev_residual: residual,
        verdict,
    })
}

/// Discrete total variation of the four second derivatives over a ball,
/// the measure `|μ|` of the ball estimated by a partition of bumps, and
/// the data for the BV bound `‖∂_ij h‖ ≤ |μ| + C ‖h‖_∞ |B|`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TvReport {
    /// TV of (∂ₓh, ∂ᵧh) in (x, y): [xx, xy, yx, yy].
    pub tv: [f64; 4],
    pub mu_abs: f64,
    pub sup_h: f64,
    pub area: f64,
}

impl TvReport {
    /// Smallest constant C with `max_ij TV_ij ≤ |μ| + C sup|h| area`.
    pub fn calibrated_constant(&self) -> f64 {
        let worst = self.tv.iter().fold(0.0f64, |m, &v| m.max(v));
        ((worst - self.mu_abs) / (self.sup_h * self.area)).max(0.0)
    }
}

pub fn tv_second_derivatives(
    h: &GridField,
    center: (f64, f64),
    radius: f64,
) -> Result<TvReport> {
    let (gx0, gy0, gx1, gy1) = h.bounds();
    if center.0 - radius < gx0 + h.dx()
        || center.1 - radius < gy0 + h.dy()
        || center.0 + radius > gx1 - h.dx()
        || center.1 + radius > gy1 - h.dy()
    {
        return Err(Error::Geometry(format!(
            "ball at {center:?} radius {radius} leaves the grid"
        )));
    }
    let grad = gradient(h);
    let in_ball = |i: usize, j: usize| -> bool {
        h.is_active(i, j) && (h.x(i) - center.0).hypot(h.y(j) - center.1) <= radius
    };
    let mut tv = [0.0f64; 4];
    let mut sup_h = 0.0f64;
    let (i0, j0, i1, j1) = node_range(
        h,
        center.0 - radius,
        center.1 - radius,
        center.0 + radius,
        center.1 + radius,
    );
    for j in j0..=j1 {
        for i in i0..=i1 {
            if !in_ball(i, j) {
                continue;
            }
            sup_h = sup_h.max(h.get(i, j).abs());
            let k = j * h.nx() + i;
            // forward differences: Σ |Δ_x u| dy  approximates  ‖∂_x u‖_M
            if i + 1 <= i1 && in_ball(i + 1, j) {
                tv[0] += (grad.fx.values()[k + 1] - grad.fx.values()[k]).abs() * h.dy();
                tv[2] += (grad.fy.values()[k + 1] - grad.fy.values()[k]).abs() * h.dy();
            }
            if j + 1 <= j1 && in_ball(i, j + 1) {
                let kn = k + h.nx();
                tv[1] += (grad.fx.values()[kn] - grad.fx.values()[k]).abs() * h.dx();
                tv[3] += (grad.fy.values()[kn] - grad.fy.values()[k]).abs() * h.dx();
            }
        }
    }
    let mu_abs = mu_abs_ball(h, &grad, center, radius)?;
    Ok(TvReport {
        tv,
        mu_abs,
        sup_h,
        area: std::f64::consts::PI * radius * radius,
    })
}

/// `|μ|(B)` estimated by pairing against a Shepard partition of cubic
/// bumps on a lattice inside the ball and summing the absolute masses.
pub fn mu_abs_ball(
    h: &GridField,
    grad: &FieldGradient,
    center: (f64, f64),
    radius: f64,
) -> Result<f64> {
    let t = (radius / 6.0).max(3.0 * h.dx().max(h.dy()));
    let bump_r = 1.3 * t;
    let mut bumps = Vec::new();
    let m = (radius / t).ceil() as i64;
    for a in -m..=m {
        for b in -m..=m {
            let c = (center.0 + a as f64 * t, center.1 + b as f64 * t);
            if (c.0 - center.0).hypot(c.1 - center.1) <= radius - bump_r {
                bumps.push(TestFunction { center: c, radius: bump_r });
            }
        }
    }
    if bumps.is_empty() {
        return Ok(0.0);
    }
    let shepard_value_grad = |x: f64, y: f64, i: usize| -> (f64, f64, f64) {
        let mut s = 0.0;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for b in &bumps {
            s += b.value(x, y);
            let g = b.grad(x, y);
            sx += g.0;
            sy += g.1;
        }
        if s <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let v = bumps[i].value(x, y);
        let g = bumps[i].grad(x, y);
        let psi = v / s;
        let psix = (g.0 * s - v * sx) / (s * s);
        let psiy = (g.1 * s - v * sy) / (s * s);
        (psi, psix, psiy)
    };
    let cell = h.dx() * h.dy();
    let mut total = 0.0;
    for (idx, b) in bumps.iter().enumerate() {
        check_support(h, b)?;
        let (bx0, by0, bx1, by1) = b.support_bbox();
        let (i0, j0, i1, j1) = node_range(h, bx0, by0, bx1, by1);
        let mut mass = 0.0;
        for j in j0..=j1 {
            let y = h.y(j);
            for i in i0..=i1 {
                let x = h.x(i);
                let (psi, psix, psiy) = shepard_value_grad(x, y, idx);
                if psi == 0.0 && psix == 0.0 && psiy == 0.0 {
                    continue;
                }
                let k = j * h.nx() + i;
                mass += grad.fx.values()[k] * psix
                    + grad.fy.values()[k] * psiy
                    + h.values()[k] * psi;
            }
        }
        total += (mass * cell).abs();
    }
    Ok(total)
}

/// One named residual suite with its grid spacing and, when a coarse/fine
/// pair was run, the observed order `log₂(coarse/fine)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub residuals: Vec<f64>,
    pub dx: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
}

/// Observed refinement order between residuals on grids (N, 2N).
pub fn refinement_order(coarse: f64, fine: f64) -> f64 {
    (coarse.abs() / fine.abs()).log2()
}
