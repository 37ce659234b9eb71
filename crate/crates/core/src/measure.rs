//! Vorticity-measure extraction.
//!
//! Near a point where the vorticity concentrates and `∇h` does not vanish,
//! `(∂_z h)²` admits a continuous square root `g` with `∂_z h = θ g`,
//! `θ = ±1`, and `g = (∂_x H - i ∂_y H)/2` for a C¹ potential `H` whose
//! zero level carries the measure with density `2σ|∇h|`.  This module
//! builds all of those objects from grid data: the logarithm/square-root
//! branch on a disk, the sign field, the potential, the support curve with
//! per-vertex density, and the two-part decomposition check
//! `μ = h·1_{|∇h|=0} + 2σ|∇h|·H¹`.

use crate::fields::{
    check_support, gradient, laplacian, node_range, pair_vorticity_with_grad, FieldGradient,
    GridField, TestFunction, MASKED,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex field as a pair of real grids on the same lattice.
#[derive(Debug, Clone)]
pub struct ComplexGridField {
    pub re: GridField,
    pub im: GridField,
}

impl ComplexGridField {
    pub fn new(re: GridField, im: GridField) -> Result<Self> {
        if !re.same_lattice(&im) {
            return Err(Error::Grid(
                "real and imaginary parts live on different lattices".into(),
            ));
        }
        Ok(ComplexGridField { re, im })
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re.get(i, j), self.im.get(i, j))
    }

    pub fn sample(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(self.re.sample(x, y), self.im.sample(x, y))
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.re.is_active(i, j)
    }
}

/// `(∂_z h)²` with `∂_z h = ½(∂_x h - i ∂_y h)` from the discrete gradient.
pub fn dz_squared(h: &GridField) -> ComplexGridField {
    let grad = gradient(h);
    dz_squared_with_grad(h, &grad)
}

pub fn dz_squared_with_grad(h: &GridField, grad: &FieldGradient) -> ComplexGridField {
    let n = h.nx() * h.ny();
    let mut re = vec![MASKED; n];
    let mut im = vec![MASKED; n];
    for j in 0..h.ny() {
        for i in 0..h.nx() {
            if !h.is_active(i, j) {
                continue;
            }
            let k = j * h.nx() + i;
            let hx = grad.fx.values()[k];
            let hy = grad.fy.values()[k];
            re[k] = 0.25 * (hx * hx - hy * hy);
            im[k] = -0.5 * hx * hy;
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
        .expect("derived grid inherits a valid layout")
    };
    ComplexGridField {
        re: mk(re),
        im: mk(im),
    }
}

/// Disk on which a branch construction lives.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiskRegion {
    pub center: (f64, f64),
    pub radius: f64,
}

impl DiskRegion {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.center.0).hypot(y - self.center.1) <= self.radius
    }
}

fn region_nodes(f: &GridField, region: &DiskRegion) -> Vec<(usize, usize)> {
    let (i0, j0, i1, j1) = node_range(
        f,
        region.center.0 - region.radius,
        region.center.1 - region.radius,
        region.center.0 + region.radius,
        region.center.1 + region.radius,
    );
    let mut out = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            if region.contains(f.x(i), f.y(j)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Winding-corrected logarithm of a nonvanishing complex field on a disk.
///
/// The real part and the principal argument are taken pointwise (so
/// `exp(v) = w` holds to rounding); the branch sheet of the argument is
/// selected by integrating `(z-c)·∇w/w` along the radial segment from the
/// disk centre with an adaptively subdivided trapezoid rule.
pub fn log_branch(
    w: &ComplexGridField,
    region: &DiskRegion,
    base: Complex64,
) -> Result<ComplexGridField> {
    let nodes = region_nodes(&w.re, region);
    if nodes.is_empty() {
        return Err(Error::Grid("branch disk contains no grid nodes".into()));
    }
    let mut min_abs = f64::INFINITY;
    for &(i, j) in &nodes {
        if !w.is_active(i, j) {
            return Err(Error::Vanishing(format!(
                "node ({i}, {j}) in the branch disk is masked"
            )));
        }
        min_abs = min_abs.min(w.value(i, j).norm());
    }
    if !(min_abs > 0.0) {
        return Err(Error::Vanishing(format!(
            "min |w| over the disk is {min_abs}; a logarithm needs a nonvanishing field"
        )));
    }
    let wc = w.sample(region.center.0, region.center.1);
    if (base.exp() - wc).norm() > 1e-10 * wc.norm().max(1.0) {
        return Err(Error::BaseMismatch(format!(
            "exp(base) = {} but w(center) = {}",
            base.exp(),
            wc
        )));
    }
    let grad_re = gradient(&w.re);
    let grad_im = gradient(&w.im);
    let h = w.re.dx().min(w.re.dy());

    let integrand = |x: f64, y: f64, dirx: f64, diry: f64| -> Result<Complex64> {
        let wv = w.sample(x, y);
        if wv.norm() < 1e-3 * min_abs {
            return Err(Error::Vanishing(format!(
                "interpolated |w| collapses at ({x:.4}, {y:.4})"
            )));
        }
        let wx = Complex64::new(grad_re.fx.sample(x, y), grad_im.fx.sample(x, y));
        let wy = Complex64::new(grad_re.fy.sample(x, y), grad_im.fy.sample(x, y));
        Ok((dirx * wx + diry * wy) / wv)
    };

    // trapezoid along the segment centre -> p with n panels
    let segment_integral = |px: f64, py: f64, n: usize| -> Result<Complex64> {
        let dirx = px - region.center.0;
        let diry = py - region.center.1;
        let mut acc = 0.5
            * (integrand(region.center.0, region.center.1, dirx, diry)?
                + integrand(px, py, dirx, diry)?);
        for k in 1..n {
            let t = k as f64 / n as f64;
            acc += integrand(
                region.center.0 + t * dirx,
                region.center.1 + t * diry,
                dirx,
                diry,
            )?;
        }
        Ok(acc / n as f64)
    };

    let nx = w.re.nx();
    let ny = w.re.ny();
    let mut re_out = vec![MASKED; nx * ny];
    let mut im_out = vec![MASKED; nx * ny];
    let mut mask = vec![false; nx * ny];
    let two_pi = 2.0 * std::f64::consts::PI;
    for &(i, j) in &nodes {
        let (px, py) = (w.re.x(i), w.re.y(j));
        let len = (px - region.center.0).hypot(py - region.center.1);
        let mut n = ((2.0 * len / h).ceil() as usize).clamp(8, 512);
        let mut v_int = segment_integral(px, py, n)?;
        // adaptive refinement of the winding integral
        for _ in 0..6 {
            let finer = segment_integral(px, py, 2 * n)?;
            let delta = (finer - v_int).norm();
            v_int = finer;
            n *= 2;
            if delta < 1e-4 {
                break;
            }
        }
        let total_im = base.im + v_int.im;
        let wv = w.value(i, j);
        let sheet = ((total_im - wv.arg()) / two_pi).round();
        let k = j * nx + i;
        re_out[k] = wv.norm().ln();
        im_out[k] = wv.arg() + two_pi * sheet;
        mask[k] = true;
    }
    let mk = |values: Vec<f64>| {
        GridField::new(
            nx,
            ny,
            (w.re.x0(), w.re.y0()),
            (w.re.dx(), w.re.dy()),
            values,
            Some(mask.clone()),
        )
        .expect("derived grid inherits a valid layout")
    };
    let out = ComplexGridField {
        re: mk(re_out),
        im: mk(im_out),
    };
    // continuity of the selected branch
    let mut worst_jump = 0.0f64;
    for &(i, j) in &nodes {
        for (ni, nj) in [(i + 1, j), (i, j + 1)] {
            if ni < nx && nj < ny && out.re.is_active(ni, nj) {
                worst_jump = worst_jump.max((out.im.get(ni, nj) - out.im.get(i, j)).abs());
            }
        }
    }
    if worst_jump >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "branch is discontinuous: adjacent Im jump {worst_jump:.3} ≥ π/2"
        )));
    }
    Ok(out)
}

/// Continuous square root `g = exp(½ log w)` on a disk, rooted at the
/// principal square root of the centre value.  `g² = w` holds node-wise to
/// rounding because the magnitude and argument are taken pointwise.
pub fn sqrt_branch(w: &ComplexGridField, region: &DiskRegion) -> Result<ComplexGridField> {
    let wc = w.sample(region.center.0, region.center.1);
    if !(wc.norm() > 0.0) {
        return Err(Error::Vanishing("w vanishes at the disk centre".into()));
    }
    let base = Complex64::new(wc.norm().ln(), wc.arg());
    let v = log_branch(w, region, base)?;
    let nx = v.re.nx();
    let ny = v.re.ny();
    let mut re_out = vec![MASKED; nx * ny];
    let mut im_out = vec![MASKED; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if v.re.is_active(i, j) {
                let k = j * nx + i;
                let g = (0.5 * Complex64::new(v.re.values()[k], v.im.values()[k])).exp();
                re_out[k] = g.re;
                im_out[k] = g.im;
            }
        }
    }
    let mask = v.re.mask().map(|m| m.to_vec());
    let mk = |values: Vec<f64>| {
        GridField::new(
            nx,
            ny,
            (v.re.x0(), v.re.y0()),
            (v.re.dx(), v.re.dy()),
            values,
            mask.clone(),
        )
        .expect("derived grid inherits a valid layout")
    };
    Ok(ComplexGridField {
        re: mk(re_out),
        im: mk(im_out),
    })
}

/// ±1 field with `∂_z h = θ g` on nodes where `|∇h|` clears the threshold.
#[derive(Debug, Clone)]
pub struct SignField {
    pub field: GridField,
    pub threshold: f64,
}

impl SignField {
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        if self.field.is_active(i, j) {
            Some(self.field.get(i, j))
        } else {
            None
        }
    }
}

pub fn sign_field(h: &GridField, g: &ComplexGridField, grad_threshold: f64) -> Result<SignField> {
    let grad = gradient(h);
    let nx = h.nx();
    let ny = h.ny();
    let mut values = vec![MASKED; nx * ny];
    let mut mask = vec![false; nx * ny];
    let floor = 1e-12;
    for j in 0..ny {
        for i in 0..nx {
            if !h.is_active(i, j) || !g.is_active(i, j) {
                continue;
            }
            let k = j * nx + i;
            let hx = grad.fx.values()[k];
            let hy = grad.fy.values()[k];
            if hx.hypot(hy) <= grad_threshold {
                continue;
            }
            let gz = g.value(i, j);
            if gz.norm() < floor {
                return Err(Error::Vanishing(format!(
                    "|g| below floor at classified node ({i}, {j})"
                )));
            }
            let ratio = Complex64::new(0.5 * hx, -0.5 * hy) / gz;
            values[k] = if ratio.re >= 0.0 { 1.0 } else { -1.0 };
            mask[k] = true;
        }
    }
    let field = GridField::new(
        nx,
        ny,
        (h.x0(), h.y0()),
        (h.dx(), h.dy()),
        values,
        Some(mask),
    )?;
    Ok(SignField {
        field,
        threshold: grad_threshold,
    })
}

/// Potential `H` with `∇H = (2 Re g, -2 Im g)` by trapezoid integration
/// along grid lines from the disk centre, row-first and column-first; the
/// two orders must agree within `consistency_tol` (this is the discrete
/// curl check) and their average is returned, anchored to `H(centre) = base`.
pub fn potential(
    g: &ComplexGridField,
    region: &DiskRegion,
    base: f64,
    consistency_tol: f64,
) -> Result<GridField> {
    let f = &g.re;
    let nx = f.nx();
    let ny = f.ny();
    let ic = ((region.center.0 - f.x0()) / f.dx()).round() as usize;
    let jc = ((region.center.1 - f.y0()) / f.dy()).round() as usize;
    if !g.is_active(ic, jc) {
        return Err(Error::Grid("disk centre is not an active node".into()));
    }
    let ux = |k: usize| 2.0 * g.re.values()[k];
    let uy = |k: usize| -2.0 * g.im.values()[k];
    let active = |i: usize, j: usize| g.is_active(i, j) && region.contains(f.x(i), f.y(j));

    // integrate along a row from (ic, j) outwards, then along columns
    let integrate = |row_first: bool| -> Vec<f64> {
        let mut out = vec![MASKED; nx * ny];
        out[jc * nx + ic] = 0.0;
        let trap_x = |k_from: usize, k_to: usize, sign: f64| -> f64 {
            sign * 0.5 * f.dx() * (ux(k_from) + ux(k_to))
        };
        let trap_y = |k_from: usize, k_to: usize, sign: f64| -> f64 {
            sign * 0.5 * f.dy() * (uy(k_from) + uy(k_to))
        };
        if row_first {
            // along row jc
            for i in (0..ic).rev() {
                if !active(i, jc) || out[jc * nx + i + 1].is_nan() {
                    continue;
                }
                out[jc * nx + i] = out[jc * nx + i + 1] + trap_x(jc * nx + i + 1, jc * nx + i, -1.0);
            }
            for i in ic + 1..nx {
                if !active(i, jc) || out[jc * nx + i - 1].is_nan() {
                    continue;
                }
                out[jc * nx + i] = out[jc * nx + i - 1] + trap_x(jc * nx + i - 1, jc * nx + i, 1.0);
            }
            for i in 0..nx {
                if out[jc * nx + i].is_nan() {
                    continue;
                }
                for j in (0..jc).rev() {
                    if !active(i, j) || out[(j + 1) * nx + i].is_nan() {
                        continue;
                    }
                    out[j * nx + i] = out[(j + 1) * nx + i] + trap_y((j + 1) * nx + i, j * nx + i, -1.0);
                }
                for j in jc + 1..ny {
                    if !active(i, j) || out[(j - 1) * nx + i].is_nan() {
                        continue;
                    }
                    out[j * nx + i] = out[(j - 1) * nx + i] + trap_y((j - 1) * nx + i, j * nx + i, 1.0);
                }
            }
        } else {
            for j in (0..jc).rev() {
                if !active(ic, j) || out[(j + 1) * nx + ic].is_nan() {
                    continue;
                }
                out[j * nx + ic] = out[(j + 1) * nx + ic] + trap_y((j + 1) * nx + ic, j * nx + ic, -1.0);
            }
            for j in jc + 1..ny {
                if !active(ic, j) || out[(j - 1) * nx + ic].is_nan() {
                    continue;
                }
                out[j * nx + ic] = out[(j - 1) * nx + ic] + trap_y((j - 1) * nx + ic, j * nx + ic, 1.0);
            }
            for j in 0..ny {
                if out[j * nx + ic].is_nan() {
                    continue;
                }
                for i in (0..ic).rev() {
                    if !active(i, j) || out[j * nx + i + 1].is_nan() {
                        continue;
                    }
                    out[j * nx + i] = out[j * nx + i + 1] + trap_x(j * nx + i + 1, j * nx + i, -1.0);
                }
                for i in ic + 1..nx {
                    if !active(i, j) || out[j * nx + i - 1].is_nan() {
                        continue;
                    }
                    out[j * nx + i] = out[j * nx + i - 1] + trap_x(j * nx + i - 1, j * nx + i, 1.0);
                }
            }
        }
        out
    };

    let a = integrate(true);
    let b = integrate(false);
    let mut worst = 0.0f64;
    let mut values = vec![MASKED; nx * ny];
    let mut mask = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            match (a[k].is_nan(), b[k].is_nan()) {
                (false, false) => {
                    worst = worst.max((a[k] - b[k]).abs());
                    values[k] = base + 0.5 * (a[k] + b[k]);
                    mask[k] = true;
                }
                (false, true) => {
                    values[k] = base + a[k];
                    mask[k] = true;
                }
                (true, false) => {
                    values[k] = base + b[k];
                    mask[k] = true;
                }
                (true, true) => {}
            }
        }
    }
    if worst > consistency_tol {
        return Err(Error::Curl(format!(
            "path-order cross-check disagrees by {worst:.3e} (tolerance {consistency_tol:.3e})"
        )));
    }
    GridField::new(nx, ny, (f.x0(), f.y0()), (f.dx(), f.dy()), values, Some(mask))
}

/// One connected component of the support curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveComponent {
    pub vertices: Vec<[f64; 2]>,
    pub density: Vec<f64>,
    pub sigma: f64,
    #[serde(rename = "h")]
    pub h_values: Vec<f64>,
}

impl CurveComponent {
    pub fn length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }
}

/// Polyline approximation of `supp μ ∩ {|∇h| > 0}` with per-vertex density
/// `2|∇h|` and a per-component sign σ.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CurveMeasure {
    pub components: Vec<CurveComponent>,
}

impl CurveMeasure {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.length()).sum()
    }

    /// `Σ_components σ ∫ density · φ dH¹` by per-segment trapezoid.
    pub fn integrate_against(&self, phi: &TestFunction) -> f64 {
        let mut acc = 0.0;
        for comp in &self.components {
            let mut part = 0.0;
            for w in comp.vertices.windows(2).zip(comp.density.windows(2)) {
                let ((a, b), (da, db)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                let fa = da * phi.value(a[0], a[1]);
                let fb = db * phi.value(b[0], b[1]);
                part += 0.5 * (fa + fb) * len;
            }
            acc += comp.sigma * part;
        }
        acc
    }
}

/// Marching-squares extraction of `{H = 0}` with linear interpolation,
/// saddle cells disambiguated by the cell-centre sign.  Density at each
/// vertex is `2|∇h|` with the gradient magnitude extrapolated onto the
/// curve from both sides along the curve normal (the centred stencil dips
/// spuriously in the one-node band on the kink itself).  σ per component
/// is the sign of the measured pairing against a bump on that component.
pub fn support_curve(
    h: &GridField,
    big_h: &GridField,
    grad_threshold: f64,
) -> Result<CurveMeasure> {
    if !h.same_lattice(big_h) {
        return Err(Error::Grid("h and H live on different lattices".into()));
    }
    let segments = marching_squares(big_h);
    if segments.is_empty() {
        return Ok(CurveMeasure::default());
    }
    let grad_h = gradient(h);
    let grad_big = gradient(big_h);

    // |∇H| must stay bounded below along the zero level; cells where it
    // collapses are degenerate (no transverse crossing) and are dropped
    let keep: Vec<([f64; 2], [f64; 2])> = segments
        .into_iter()
        .filter(|(a, b)| {
            let (mx, my) = (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]));
            if !(grad_big.fx.can_sample(mx, my) && grad_big.fy.can_sample(mx, my)) {
                return true;
            }
            let norm = grad_big.fx.sample(mx, my).hypot(grad_big.fy.sample(mx, my));
            norm > 0.25 * grad_threshold
        })
        .collect();
    if keep.is_empty() {
        return Ok(CurveMeasure::default());
    }
    let chains = chain_segments(&keep, big_h.dx().min(big_h.dy()));
    let n = h.nx() * h.ny();
    let mut gradmag_vals = vec![MASKED; n];
    for j in 0..h.ny() {
        for i in 0..h.nx() {
            if h.is_active(i, j) {
                let k = j * h.nx() + i;
                gradmag_vals[k] = grad_h.fx.values()[k].hypot(grad_h.fy.values()[k]);
            }
        }
    }
    let gradmag = GridField::new(
        h.nx(),
        h.ny(),
        (h.x0(), h.y0()),
        (h.dx(), h.dy()),
        gradmag_vals,
        h.mask().map(|m| m.to_vec()),
    )?;

    let s = h.dx().max(h.dy());
    let density_at = |x: f64, y: f64| -> f64 {
        // curve normal from ∇H
        let gx = if grad_big.fx.can_sample(x, y) {
            grad_big.fx.sample(x, y)
        } else {
            MASKED
        };
        let gy = if grad_big.fy.can_sample(x, y) {
            grad_big.fy.sample(x, y)
        } else {
            MASKED
        };
        let norm = gx.hypot(gy);
        if norm.is_finite() && norm > 0.0 {
            let (nxd, nyd) = (gx / norm, gy / norm);
            let mut sides = Vec::new();
            for dir in [1.0, -1.0] {
                let p3 = (x + dir * 3.0 * s * nxd, y + dir * 3.0 * s * nyd);
                let p4 = (x + dir * 4.0 * s * nxd, y + dir * 4.0 * s * nyd);
                if gradmag.can_sample(p3.0, p3.1) && gradmag.can_sample(p4.0, p4.1) {
                    let v3 = gradmag.sample(p3.0, p3.1);
                    let v4 = gradmag.sample(p4.0, p4.1);
                    // linear extrapolation to the curve: v(0) = 4 v3 - 3 v4
                    sides.push(4.0 * v3 - 3.0 * v4);
                }
            }
            if !sides.is_empty() {
                return 2.0 * sides.iter().sum::<f64>() / sides.len() as f64;
            }
            // fall back to |∇H| on the curve, which equals |∇h| there
            return 2.0 * norm;
        }
        2.0 * gradmag.sample(x, y)
    };

    let mut components = Vec::new();
    for chain in chains {
        if chain.len() < 2 {
            continue;
        }
        let density: Vec<f64> = chain.iter().map(|p| density_at(p[0], p[1])).collect();
        let h_values: Vec<f64> = chain
            .iter()
            .map(|p| {
                if h.can_sample(p[0], p[1]) {
                    h.sample(p[0], p[1])
                } else {
                    h.get(
                        (((p[0] - h.x0()) / h.dx()).round() as usize).min(h.nx() - 1),
                        (((p[1] - h.y0()) / h.dy()).round() as usize).min(h.ny() - 1),
                    )
                }
            })
            .collect();
        // σ from a pairing against a bump centred mid-component
        let mid = chain[chain.len() / 2];
        let mut sigma = 1.0;
        let bump_r = 6.0 * s;
        if let Ok(phi) = TestFunction::new((mid[0], mid[1]), bump_r) {
            if check_support(h, &phi).is_ok() {
                if let Ok(p) = pair_vorticity_with_grad(h, &grad_h, &phi) {
                    if p < 0.0 {
                        sigma = -1.0;
                    }
                }
            }
        }
        components.push(CurveComponent {
            vertices: chain,
            density,
            sigma,
            h_values,
        });
    }
    components.sort_by(|a, b| b.length().partial_cmp(&a.length()).unwrap());
    Ok(CurveMeasure { components })
}

fn marching_squares(f: &GridField) -> Vec<([f64; 2], [f64; 2])> {
    let mut segments = Vec::new();
    for j in 0..f.ny() - 1 {
        for i in 0..f.nx() - 1 {
            if !(f.is_active(i, j)
                && f.is_active(i + 1, j)
                && f.is_active(i, j + 1)
                && f.is_active(i + 1, j + 1))
            {
                continue;
            }
            let v00 = f.get(i, j);
            let v10 = f.get(i + 1, j);
            let v01 = f.get(i, j + 1);
            let v11 = f.get(i + 1, j + 1);
            let (x0, y0) = (f.x(i), f.y(j));
            let (x1, y1) = (f.x(i + 1), f.y(j + 1));
            let cross = |va: f64, vb: f64| va / (va - vb);
            let mut pts: Vec<(u8, [f64; 2])> = Vec::new();
            if (v00 >= 0.0) != (v10 >= 0.0) {
                let t = cross(v00, v10);
                pts.push((0, [x0 + t * (x1 - x0), y0]));
            }
            if (v10 >= 0.0) != (v11 >= 0.0) {
                let t = cross(v10, v11);
                pts.push((1, [x1, y0 + t * (y1 - y0)]));
            }
            if (v01 >= 0.0) != (v11 >= 0.0) {
                let t = cross(v01, v11);
                pts.push((2, [x0 + t * (x1 - x0), y1]));
            }
            if (v00 >= 0.0) != (v01 >= 0.0) {
                let t = cross(v00, v01);
                pts.push((3, [x0, y0 + t * (y1 - y0)]));
            }
            match pts.len() {
                2 => segments.push((pts[0].1, pts[1].1)),
                4 => {
                    // saddle: pair by the sign at the cell centre
                    let centre = 0.25 * (v00 + v10 + v01 + v11);
                    let bottom = pts.iter().find(|p| p.0 == 0).unwrap().1;
                    let right = pts.iter().find(|p| p.0 == 1).unwrap().1;
                    let top = pts.iter().find(|p| p.0 == 2).unwrap().1;
                    let left = pts.iter().find(|p| p.0 == 3).unwrap().1;
                    if (centre >= 0.0) == (v00 >= 0.0) {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((bottom, left));
                        segments.push((top, right));
                    }
                }
                _ => {}
            }
        }
    }
    segments
}

fn chain_segments(segments: &[([f64; 2], [f64; 2])], h: f64) -> Vec<Vec<[f64; 2]>> {
    use std::collections::BTreeMap;
    let quant = |p: [f64; 2]| -> (i64, i64) {
        (
            (p[0] / (1e-6 * h)).round() as i64,
            (p[1] / (1e-6 * h)).round() as i64,
        )
    };
    let mut by_end: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        by_end.entry(quant(*a)).or_default().push(idx);
        by_end.entry(quant(*b)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut chain = vec![a, b];
        // extend forward from the back, then backward from the front
        for _ in 0..2 {
            loop {
                let tail = *chain.last().unwrap();
                let key = quant(tail);
                let next = by_end
                    .get(&key)
                    .and_then(|v| v.iter().find(|&&s| !used[s]).copied());
                match next {
                    Some(s) => {
                        used[s] = true;
                        let (p, q) = segments[s];
                        if quant(p) == key {
                            chain.push(q);
                        } else {
                            chain.push(p);
                        }
                    }
                    None => break,
                }
            }
            chain.reverse();
        }
        chains.push(chain);
    }
    chains.sort_by(|a, b| b.len().cmp(&a.len()));
    chains
}

/// Default gradient threshold: half-order in the grid spacing, scaled by
/// the field amplitude (|∇h| is Hölder-½-regular, so a √dx margin
/// separates the flat set from the kink band at grid resolution).
pub fn grad_threshold_default(h: &GridField) -> f64 {
    let diam = {
        let (x0, y0, x1, y1) = h.bounds();
        (x1 - x0).hypot(y1 - y0)
    };
    5.0 * h.max_abs() * (h.dx().max(h.dy()) / diam).sqrt()
}

/// Per-bump comparison of the pairing with the curve + flat decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub center: [f64; 2],
    pub radius: f64,
    pub pairing: f64,
    pub curve_part: f64,
    pub flat_part: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub grad_threshold: f64,
    pub flat_node_count: usize,
    pub entries: Vec<DecompositionEntry>,
    pub worst_residual: f64,
}

/// Nodes of the flat set `{|∇h| < threshold}` kept away from the extracted
/// curves (the kink band has a spurious gradient dip one node wide).
pub fn flat_mask(
    h: &GridField,
    grad_threshold: f64,
    curves: &CurveMeasure,
    exclusion: f64,
) -> Vec<bool> {
    let grad = gradient(h);
    let n = h.nx() * h.ny();
    let mut flat = vec![false; n];
    for j in 0..h.ny() {
        for i in 0..h.nx() {
            if !h.is_active(i, j) {
                continue;
            }
            let k = j * h.nx() + i;
            if grad.fx.values()[k].hypot(grad.fy.values()[k]) < grad_threshold {
                flat[k] = true;
            }
        }
    }
    if !curves.is_empty() && exclusion > 0.0 {
        for comp in &curves.components {
            for v in &comp.vertices {
                let (i0, j0, i1, j1) = node_range(
                    h,
                    v[0] - exclusion,
                    v[1] - exclusion,
                    v[0] + exclusion,
                    v[1] + exclusion,
                );
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        if (h.x(i) - v[0]).hypot(h.y(j) - v[1]) <= exclusion {
                            flat[j * h.nx() + i] = false;
                        }
                    }
                }
            }
        }
    }
    flat
}

/// For each bump, compare `⟨μ, φ⟩` against
/// `Σ_curves σ ∫ 2|∇h| φ dH¹ + ∫_flat h φ`.
pub fn decomposition_check(
    h: &GridField,
    curves: &CurveMeasure,
    battery: &[TestFunction],
    grad_threshold: f64,
) -> Result<DecompositionReport> {
    let grad = gradient(h);
    let exclusion = 3.0 * h.dx().max(h.dy());
    let flat = flat_mask(h, grad_threshold, curves, exclusion);
    let flat_node_count = flat.iter().filter(|&&b| b).count();
    let cell = h.dx() * h.dy();
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    for phi in battery {
        let pairing = pair_vorticity_with_grad(h, &grad, phi)?;
        let curve_part = curves.integrate_against(phi);
        let (bx0, by0, bx1, by1) = phi.support_bbox();
        let (i0, j0, i1, j1) = node_range(h, bx0, by0, bx1, by1);
        let mut flat_part = 0.0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * h.nx() + i;
                if flat[k] {
                    flat_part += h.values()[k] * phi.value(h.x(i), h.y(j));
                }
            }
        }
        flat_part *= cell;
        let residual = pairing - curve_part - flat_part;
        worst = worst.max(residual.abs());
        entries.push(DecompositionEntry {
            center: [phi.center.0, phi.center.1],
            radius: phi.radius,
            pairing,
            curve_part,
            flat_part,
            residual,
        });
    }
    Ok(DecompositionReport {
        grad_threshold,
        flat_node_count,
        entries,
        worst_residual: worst,
    })
}

/// Everything the extraction pipeline produces for one field.
#[derive(Debug)]
pub struct MeasureExtraction {
    pub curves: CurveMeasure,
    pub region: Option<DiskRegion>,
    pub grad_threshold: f64,
    pub sqrt_field: Option<ComplexGridField>,
    pub sign: Option<SignField>,
    pub potential_field: Option<GridField>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractionParams {
    pub grad_threshold: Option<f64>,
    /// Spike threshold factor: a ridge is declared where
    /// `|-Δ_d h + h| > factor · max|h| / √dx`.
    pub ridge_factor: f64,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            grad_threshold: None,
            ridge_factor: 5.0,
        }
    }
}

/// Locate the strongest concentration ridge, build the factorization disk
/// around it (largest disk on which `min |(∂_z h)²|` stays above half its
/// centre value), and run the branch / sign / potential / curve pipeline.
/// Fields without a ridge (smooth solutions, obstacle minimizers) come
/// back with an empty curve measure.
pub fn extract_measure(h: &GridField, params: ExtractionParams) -> Result<MeasureExtraction> {
    let thr = params
        .grad_threshold
        .unwrap_or_else(|| grad_threshold_default(h));
    let grad = gradient(h);
    let lap = laplacian(h);
    let nx = h.nx();
    let ny = h.ny();
    let dmax = h.dx().max(h.dy());
    let spike_cut = params.ridge_factor * h.max_abs() / dmax.sqrt();

    // strongest admissible spike node
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 2..ny - 2 {
        for i in 2..nx - 2 {
            if !h.is_active(i, j) {
                continue;
            }
            let k = j * nx + i;
            let spike = (-lap.values()[k] + h.values()[k]).abs();
            if spike <= spike_cut {
                continue;
            }
            // require a classified node in the immediate neighbourhood
            let mut near_classified = false;
            'scan: for dj in -2i64..=2 {
                for di in -2i64..=2 {
                    let (ii, jj) = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    if ii < nx && jj < ny && h.is_active(ii, jj) {
                        let kk = jj * nx + ii;
                        if grad.fx.values()[kk].hypot(grad.fy.values()[kk]) > thr {
                            near_classified = true;
                            break 'scan;
                        }
                    }
                }
            }
            if !near_classified {
                continue;
            }
            if best.map(|(_, _, s)| spike > s).unwrap_or(true) {
                best = Some((i, j, spike));
            }
        }
    }

    let Some((bi, bj, _)) = best else {
        return Ok(MeasureExtraction {
            curves: CurveMeasure::default(),
            region: None,
            grad_threshold: thr,
            sqrt_field: None,
            sign: None,
            potential_field: None,
        });
    };
    let center = (h.x(bi), h.y(bj));

    // (∂_z h)² with the one-node kink dip filled from its neighbours
    let mut w = dz_squared_with_grad(h, &grad);
    let suspect: Vec<bool> = (0..nx * ny)
        .map(|k| {
            h.is_active(k % nx, k / nx)
                && grad.fx.values()[k].hypot(grad.fy.values()[k]) <= thr
        })
        .collect();
    repair_band(&mut w, &suspect);

    // adaptive radius: largest disk keeping min |w| above half the centre
    // value, every node active and a sampling margin inside the grid
    let wc = w.value(bi, bj).norm();
    let max_geom = {
        let (x0, y0, x1, y1) = h.bounds();
        let margin = 3.0 * dmax;
        (center.0 - x0 - margin)
            .min(x1 - center.0 - margin)
            .min(center.1 - y0 - margin)
            .min(y1 - center.1 - margin)
    };
    let mut radius = 4.0 * dmax;
    let mut best_radius = None;
    while radius <= max_geom {
        let region = DiskRegion { center, radius };
        let mut ok = true;
        'check: for j in 0..ny {
            for i in 0..nx {
                if region.contains(h.x(i), h.y(j)) {
                    if !w.is_active(i, j) || !h.can_sample(h.x(i), h.y(j)) {
                        ok = false;
                        break 'check;
                    }
                    if w.value(i, j).norm() <= 0.5 * wc {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        if !ok {
            break;
        }
        best_radius = Some(radius);
        radius += dmax;
    }
    let Some(radius) = best_radius else {
        return Ok(MeasureExtraction {
            curves: CurveMeasure::default(),
            region: None,
            grad_threshold: thr,
            sqrt_field: None,
            sign: None,
            potential_field: None,
        });
    };
    let region = DiskRegion { center, radius };

    let g = sqrt_branch(&w, &region)?;
    let sign = sign_field(h, &g, thr)?;
    let gscale = 2.0 * wc.sqrt();
    let tol = (1e-6f64).max(20.0 * dmax * dmax * gscale * (radius / dmax));
    let big_h = potential(&g, &region, 0.0, tol)?;
    let curves = support_curve(h, &big_h, thr)?;
    Ok(MeasureExtraction {
        curves,
        region: Some(region),
        grad_threshold: thr,
        sqrt_field: Some(g),
        sign: Some(sign),
        potential_field: Some(big_h),
    })
}

/// Fill suspect nodes (the one-node gradient dip on a kink) with the mean
/// of their valid neighbours, iterating until the band is closed.
fn repair_band(w: &mut ComplexGridField, suspect: &[bool]) {
    let nx = w.re.nx();
    let ny = w.re.ny();
    let mut pending: Vec<usize> = (0..nx * ny)
        .filter(|&k| suspect[k] && w.re.is_active(k % nx, k / nx))
        .collect();
    let mut re = w.re.values().to_vec();
    let mut im = w.im.values().to_vec();
    let mut valid: Vec<bool> = (0..nx * ny)
        .map(|k| w.re.is_active(k % nx, k / nx) && !suspect[k])
        .collect();
    for _ in 0..32 {
        if pending.is_empty() {
            break;
        }
        let mut next = Vec::new();
        let mut filled = Vec::new();
        for &k in &pending {
            let (i, j) = (k % nx, k / nx);
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            let mut count = 0;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1), (-1, 1), (1, -1)] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                    continue;
                }
                let kk = jj as usize * nx + ii as usize;
                if valid[kk] {
                    acc_re += re[kk];
                    acc_im += im[kk];
                    count += 1;
                }
            }
            if count >= 2 {
                re[k] = acc_re / count as f64;
                im[k] = acc_im / count as f64;
                filled.push(k);
            } else {
                next.push(k);
            }
        }
        if filled.is_empty() {
            break;
        }
        for k in filled {
            valid[k] = true;
        }
        pending = next;
    }
    let mask = w.re.mask().map(|m| m.to_vec());
    let rebuild = |values: Vec<f64>, f: &GridField| {
        GridField::new(
            f.nx(),
            f.ny(),
            (f.x0(), f.y0()),
            (f.dx(), f.dy()),
            values,
            mask.clone(),
        )
        .expect("derived grid inherits a valid layout")
    };
    w.re = rebuild(re, &w.re.clone());
    w.im = rebuild(im, &w.im.clone());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{slab_field, GridSpec};
    use approx::assert_abs_diff_eq;

    fn constant_complex(n: usize, half: f64, re: f64, im: f64) -> ComplexGridField {
        let h = 2.0 * half / (n - 1) as f64;
        ComplexGridField {
            re: GridField::from_fn(n, n, (-half, -half), (h, h), |_, _| re).unwrap(),
            im: GridField::from_fn(n, n, (-half, -half), (h, h), |_, _| im).unwrap(),
        }
    }

    #[test]
    fn log_branch_trivial_cases() {
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 0.5,
        };
        let w1 = constant_complex(65, 1.0, 1.0, 0.0);
        let v = log_branch(&w1, &region, Complex64::new(0.0, 0.0)).unwrap();
        assert!(v.re.max_abs() < 1e-12);
        assert!(v.im.max_abs() < 1e-12);

        let w4 = constant_complex(65, 1.0, 4.0, 0.0);
        let v4 = log_branch(&w4, &region, Complex64::new(4.0f64.ln(), 0.0)).unwrap();
        for j in 0..65 {
            for i in 0..65 {
                if v4.re.is_active(i, j) {
                    assert_abs_diff_eq!(v4.re.get(i, j), 4.0f64.ln(), epsilon = 1e-12);
                }
            }
        }
        // base mismatch is rejected
        assert!(matches!(
            log_branch(&w4, &region, Complex64::new(0.0, 0.0)),
            Err(Error::BaseMismatch(_))
        ));
    }

    #[test]
    fn log_branch_positive_real_field() {
        let n = 129;
        let h = 2.4 / (n - 1) as f64;
        let w = ComplexGridField {
            re: GridField::from_fn(n, n, (-1.2, -1.2), (h, h), |x, _| 3.0 + x).unwrap(),
            im: GridField::from_fn(n, n, (-1.2, -1.2), (h, h), |_, _| 0.0).unwrap(),
        };
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 1.0,
        };
        let v = log_branch(&w, &region, Complex64::new(3.0f64.ln(), 0.0)).unwrap();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if v.re.is_active(i, j) {
                    let x = v.re.x(i);
                    worst = worst.max((v.re.get(i, j) - (3.0 + x).ln()).abs());
                    worst = worst.max(v.im.get(i, j).abs());
                }
            }
        }
        assert!(worst < 1e-8, "principal log defect {worst}");
    }

    #[test]
    fn log_branch_rejects_vanishing_fields() {
        let n = 65;
        let h = 2.0 / (n - 1) as f64;
        let w = ComplexGridField {
            re: GridField::from_fn(n, n, (-1.0, -1.0), (h, h), |x, _| x).unwrap(),
            im: GridField::from_fn(n, n, (-1.0, -1.0), (h, h), |_, _| 0.0).unwrap(),
        };
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 0.5,
        };
        assert!(matches!(
            log_branch(&w, &region, Complex64::new(0.0, 0.0)),
            Err(Error::Vanishing(_))
        ));
    }

    #[test]
    fn sqrt_branch_constants() {
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 0.5,
        };
        let w1 = constant_complex(65, 1.0, 1.0, 0.0);
        let g = sqrt_branch(&w1, &region).unwrap();
        for j in 0..65 {
            for i in 0..65 {
                if g.re.is_active(i, j) {
                    assert_abs_diff_eq!(g.re.get(i, j), 1.0, epsilon = 1e-12);
                    assert_abs_diff_eq!(g.im.get(i, j), 0.0, epsilon = 1e-12);
                }
            }
        }
        let w4 = constant_complex(65, 1.0, 4.0, 0.0);
        let g2 = sqrt_branch(&w4, &region).unwrap();
        for j in 0..65 {
            for i in 0..65 {
                if g2.re.is_active(i, j) {
                    assert_abs_diff_eq!(g2.re.get(i, j), 2.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sqrt_branch_squares_back_on_winding_phase() {
        // w = (3 + x + iy)²: the square root must recover ±(3 + z)
        let n = 129;
        let h = 2.4 / (n - 1) as f64;
        let w = ComplexGridField {
            re: GridField::from_fn(n, n, (-1.2, -1.2), (h, h), |x, y| {
                (3.0 + x) * (3.0 + x) - y * y
            })
            .unwrap(),
            im: GridField::from_fn(n, n, (-1.2, -1.2), (h, h), |x, y| 2.0 * (3.0 + x) * y)
                .unwrap(),
        };
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 1.0,
        };
        let g = sqrt_branch(&w, &region).unwrap();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                if g.re.is_active(i, j) {
                    let gz = g.value(i, j);
                    let wz = w.value(i, j);
                    worst = worst.max((gz * gz - wz).norm() / wz.norm());
                    // branch rooted at the positive square root
                    let exact = Complex64::new(3.0 + g.re.x(i), g.re.y(j));
                    worst = worst.max((gz - exact).norm());
                }
            }
        }
        assert!(worst < 1e-8, "sqrt branch defect {worst}");
    }

    #[test]
    fn slab_factorization_reproduces_dzh() {
        let f = slab_field(GridSpec::square(256, 1.0)).unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        let g = ext.sqrt_field.as_ref().expect("slab has a ridge");
        let sign = ext.sign.as_ref().unwrap();
        let grad = gradient(&f);
        let mut worst = 0.0f64;
        let mut plus = 0;
        let mut minus = 0;
        for j in 0..f.ny() {
            for i in 0..f.nx() {
                if let Some(theta) = sign.value(i, j) {
                    if !g.is_active(i, j) {
                        continue;
                    }
                    let k = j * f.nx() + i;
                    let dzh = Complex64::new(
                        0.5 * grad.fx.values()[k],
                        -0.5 * grad.fy.values()[k],
                    );
                    let err = (dzh - theta * g.value(i, j)).norm();
                    worst = worst.max(err);
                    if f.x(i) < -2.0 * f.dx() {
                        plus += (theta > 0.0) as usize;
                        minus += (theta < 0.0) as usize;
                    }
                }
            }
        }
        assert!(worst < 1e-6, "θg vs ∂_z h defect {worst}");
        // θ is single-signed on each side of the kink
        assert!(plus == 0 || minus == 0, "mixed signs left of the kink");
    }

    #[test]
    fn branch_flip_involution_is_exact() {
        let f = slab_field(GridSpec::square(128, 1.0)).unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        let g = ext.sqrt_field.as_ref().unwrap();
        let flipped = ComplexGridField {
            re: GridField::new(
                g.re.nx(),
                g.re.ny(),
                (g.re.x0(), g.re.y0()),
                (g.re.dx(), g.re.dy()),
                g.re.values().iter().map(|v| -v).collect(),
                g.re.mask().map(|m| m.to_vec()),
            )
            .unwrap(),
            im: GridField::new(
                g.im.nx(),
                g.im.ny(),
                (g.im.x0(), g.im.y0()),
                (g.im.dx(), g.im.dy()),
                g.im.values().iter().map(|v| -v).collect(),
                g.im.mask().map(|m| m.to_vec()),
            )
            .unwrap(),
        };
        let thr = ext.grad_threshold;
        let s1 = sign_field(&f, g, thr).unwrap();
        let s2 = sign_field(&f, &flipped, thr).unwrap();
        for j in 0..f.ny() {
            for i in 0..f.nx() {
                match (s1.value(i, j), s2.value(i, j)) {
                    (Some(a), Some(b)) => {
                        assert_eq!(a, -b, "flip did not negate θ at ({i}, {j})");
                        // θ·g is unchanged bit-for-bit
                        let ga = g.value(i, j) * a;
                        let gb = flipped.value(i, j) * b;
                        assert_eq!(ga, gb);
                    }
                    (None, None) => {}
                    _ => panic!("classification changed under the flip"),
                }
            }
        }
    }

    #[test]
    fn potential_of_constant_g_is_linear() {
        let g = constant_complex(65, 1.0, 0.5, 0.0);
        let region = DiskRegion {
            center: (0.0, 0.0),
            radius: 0.8,
        };
        let big_h = potential(&g, &region, 0.0, 1e-6).unwrap();
        for j in 0..65 {
            for i in 0..65 {
                if big_h.is_active(i, j) {
                    assert_abs_diff_eq!(big_h.get(i, j), big_h.x(i), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn slab_potential_recovers_signed_distance_primitive() {
        // H = sign(x)(1 - e^{-|x|}): C^{1,1}, zero exactly on the kink line
        let f = slab_field(GridSpec::square(256, 1.0)).unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        let big_h = ext.potential_field.as_ref().unwrap();
        let mut worst = 0.0f64;
        for j in 0..big_h.ny() {
            for i in 0..big_h.nx() {
                if big_h.is_active(i, j) {
                    let x = big_h.x(i);
                    let exact = x.signum() * (1.0 - (-x.abs()).exp());
                    worst = worst.max((big_h.get(i, j) - exact).abs());
                }
            }
        }
        assert!(worst < 5e-4, "potential defect {worst}");
    }

    #[test]
    fn slab_support_curve_is_the_kink_line() {
        let f = slab_field(GridSpec::square(256, 1.0)).unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        assert!(!ext.curves.is_empty(), "slab curve not found");
        let comp = &ext.curves.components[0];
        let dx = f.dx();
        let region = ext.region.unwrap();
        // every vertex sits on x = 0 up to 2dx
        for v in &comp.vertices {
            assert!(v[0].abs() < 2.0 * dx, "vertex off the line: {v:?}");
        }
        // the curve spans the disk's vertical extent
        let ymin = comp.vertices.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min);
        let ymax = comp
            .vertices
            .iter()
            .map(|v| v[1])
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(ymax - ymin > 1.6 * region.radius, "curve too short");
        // density 2|∇h| = 2 on the line; h constant 1 along it
        for (d, hv) in comp.density.iter().zip(&comp.h_values) {
            assert!((d - 2.0).abs() < 0.04, "density {d} should be 2");
            assert!((hv - 1.0).abs() < 1e-3, "h on curve {hv} should be 1");
        }
        assert_eq!(comp.sigma, 1.0, "slab measure is positive");
    }

    #[test]
    fn smooth_field_has_empty_extraction() {
        let n = 129;
        let h = 2.4 / (n - 1) as f64;
        let i0_1 = crate::specfun::bessel_i_value(0, 1.0).unwrap();
        let f = GridField::from_fn(n, n, (-1.2, -1.2), (h, h), |x, y| {
            crate::specfun::bessel_i_value(0, x.hypot(y)).unwrap() / i0_1
        })
        .unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        assert!(ext.curves.is_empty());
        assert!(ext.region.is_none());
    }

    #[test]
    fn slab_decomposition_with_curve_only() {
        let f = slab_field(GridSpec::square(256, 1.0)).unwrap();
        let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
        let battery = crate::battery::rect_battery(10, 3, (-0.25, -0.25, 0.25, 0.25), 0.12);
        let rep = decomposition_check(&f, &ext.curves, &battery, ext.grad_threshold).unwrap();
        // flat set is empty for the slab: |∇h| = h ≥ e^{-1} off the kink
        assert_eq!(rep.flat_node_count, 0);
        for e in &rep.entries {
            assert!(
                e.residual.abs() <= 0.05 * e.pairing.abs().max(0.05),
                "decomposition residual {e:?}"
            );
        }
    }

    #[test]
    fn decomposition_residual_decays_under_refinement() {
        let mut worsts = Vec::new();
        for cells in [128usize, 256] {
            let f = slab_field(GridSpec::square(cells, 1.0)).unwrap();
            let ext = extract_measure(&f, ExtractionParams::default()).unwrap();
            let battery = crate::battery::rect_battery(8, 3, (-0.2, -0.2, 0.2, 0.2), 0.1);
            let rep = decomposition_check(&f, &ext.curves, &battery, ext.grad_threshold).unwrap();
            worsts.push(rep.worst_residual);
        }
        let order = crate::verify::refinement_order(worsts[0], worsts[1]);
        assert!(order >= 1.0, "decomposition order {order} from {worsts:?}");
    }
}
