//! Uniform-grid scalar fields, finite-difference calculus, compactly
//! supported test functions, and the distributional pairing
//! `⟨μ, φ⟩ = ∫ ∇h·∇φ + hφ` that defines the vorticity of a field.

pub mod geometry;
pub mod io;

use crate::{Error, Result};

/// Sentinel stored at masked-out nodes.  Operators never read it.
pub const MASKED: f64 = f64::NAN;

/// A scalar field sampled on a uniform rectangular grid.
///
/// Values are stored row-major (`index = j * nx + i`, `i` along x).  An
/// optional per-node mask carves non-rectangular domains out of the grid;
/// inactive nodes hold [`MASKED`].
#[derive(Debug, Clone)]
pub struct GridField {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    values: Vec<f64>,
    mask: Option<Vec<bool>>,
}

impl GridField {
    pub fn new(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        values: Vec<f64>,
        mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::Grid(format!(
                "degenerate grid {nx}x{ny}: need at least 3 nodes per side"
            )));
        }
        if !(spacing.0 > 0.0 && spacing.1 > 0.0)
            || !spacing.0.is_finite()
            || !spacing.1.is_finite()
        {
            return Err(Error::Grid(format!("invalid spacing {spacing:?}")));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(Error::Grid(format!("invalid origin {origin:?}")));
        }
        if values.len() != nx * ny {
            return Err(Error::Grid(format!(
                "value buffer has {} entries, grid needs {}",
                values.len(),
                nx * ny
            )));
        }
        if let Some(m) = &mask {
            if m.len() != nx * ny {
                return Err(Error::Grid(format!(
                    "mask has {} entries, grid needs {}",
                    m.len(),
                    nx * ny
                )));
            }
            for (k, (&v, &act)) in values.iter().zip(m.iter()).enumerate() {
                if act && !v.is_finite() {
                    return Err(Error::Grid(format!(
                        "non-finite value {v} at active node {k}"
                    )));
                }
            }
        } else if let Some((k, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite value {v} at node {k}")));
        }
        Ok(GridField {
            nx,
            ny,
            x0: origin.0,
            y0: origin.1,
            dx: spacing.0,
            dy: spacing.1,
            values,
            mask,
        })
    }

    /// Build a field by evaluating `f` at every node of the given lattice.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        spacing: (f64, f64),
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let y = origin.1 + j as f64 * spacing.1;
            for i in 0..nx {
                let x = origin.0 + i as f64 * spacing.0;
                values.push(f(x, y));
            }
        }
        GridField::new(nx, ny, origin, spacing, values, None)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn y0(&self) -> f64 {
        self.y0
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        match &self.mask {
            Some(m) => m[j * self.nx + i],
            None => true,
        }
    }

    /// (x0, y0, x1, y1) of the node lattice.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.x0,
            self.y0,
            self.x0 + (self.nx - 1) as f64 * self.dx,
            self.y0 + (self.ny - 1) as f64 * self.dy,
        )
    }

    pub fn same_lattice(&self, other: &GridField) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.x0 == other.x0
            && self.y0 == other.y0
            && self.dx == other.dx
            && self.dy == other.dy
    }

    /// Largest |value| over active nodes.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.ny {
            for i in 0..self.nx {
                if self.is_active(i, j) {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }

    /// Whether `(x, y)` has a full 4x4 active Catmull-Rom window around it.
    pub fn can_sample(&self, x: f64, y: f64) -> bool {
        let fx = (x - self.x0) / self.dx;
        let fy = (y - self.y0) / self.dy;
        let i = fx.floor() as isize;
        let j = fy.floor() as isize;
        if i < 1 || j < 1 || i + 2 >= self.nx as isize || j + 2 >= self.ny as isize {
            return false;
        }
        for jj in (j - 1)..=(j + 2) {
            for ii in (i - 1)..=(i + 2) {
                if !self.is_active(ii as usize, jj as usize) {
                    return false;
                }
            }
        }
        true
    }

    /// Bicubic (Catmull-Rom) interpolation at an arbitrary point.
    ///
    /// The 4x4 node window around the point must be active; callers are
    /// expected to guard with [`Self::can_sample`] or construct grids with
    /// enough margin.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let fx = (x - self.x0) / self.dx;
        let fy = (y - self.y0) / self.dy;
        let mut i = fx.floor() as isize;
        let mut j = fy.floor() as isize;
        i = i.clamp(1, self.nx as isize - 3);
        j = j.clamp(1, self.ny as isize - 3);
        let tx = fx - i as f64;
        let ty = fy - j as f64;
        let wx = catmull_rom_weights(tx);
        let wy = catmull_rom_weights(ty);
        let mut acc = 0.0;
        for (b, wyb) in wy.iter().enumerate() {
            let jj = (j - 1 + b as isize) as usize;
            let mut row = 0.0;
            for (a, wxa) in wx.iter().enumerate() {
                let ii = (i - 1 + a as isize) as usize;
                row += wxa * self.values[jj * self.nx + ii];
            }
            acc += wyb * row;
        }
        acc
    }
}

fn catmull_rom_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Compactly supported C² bump `φ(x) = (max(0, 1 - |x-c|²/r²))³` with an
/// analytic gradient; the workhorse of every distributional pairing.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub center: (f64, f64),
    pub radius: f64,
}

impl TestFunction {
    pub fn new(center: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("bump radius must be > 0, got {radius}")));
        }
        Ok(TestFunction { center, radius })
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let s = 1.0 - (dx * dx + dy * dy) / (self.radius * self.radius);
        if s <= 0.0 {
            0.0
        } else {
            s * s * s
        }
    }

    pub fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        let r2 = self.radius * self.radius;
        let s = 1.0 - (dx * dx + dy * dy) / r2;
        if s <= 0.0 {
            (0.0, 0.0)
        } else {
            let c = -6.0 * s * s / r2;
            (c * dx, c * dy)
        }
    }

    /// Exact integral over the plane: π r² / 4.
    pub fn integral(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius / 4.0
    }

    /// Support bounding box (x_min, y_min, x_max, y_max).
    pub fn support_bbox(&self) -> (f64, f64, f64, f64) {
        (
            self.center.0 - self.radius,
            self.center.1 - self.radius,
            self.center.0 + self.radius,
            self.center.1 + self.radius,
        )
    }
}

/// x- and y-derivative fields of a scalar field.
#[derive(Debug, Clone)]
pub struct FieldGradient {
    pub fx: GridField,
    pub fy: GridField,
}

/// Second-order finite-difference gradient: centered in the interior,
/// one-sided (still second-order) at grid edges and mask transitions.
pub fn gradient(f: &GridField) -> FieldGradient {
    let nx = f.nx;
    let ny = f.ny;
    let mut gx = vec![MASKED; nx * ny];
    let mut gy = vec![MASKED; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if !f.is_active(i, j) {
                continue;
            }
            gx[j * nx + i] = directional_derivative(f, i, j, 1, 0, f.dx);
            gy[j * nx + i] = directional_derivative(f, i, j, 0, 1, f.dy);
        }
    }
    let mask = f.mask.clone();
    let fx = GridField {
        nx,
        ny,
        x0: f.x0,
        y0: f.y0,
        dx: f.dx,
        dy: f.dy,
        values: gx,
        mask: mask.clone(),
    };
    let fy = GridField {
        nx,
        ny,
        x0: f.x0,
        y0: f.y0,
        dx: f.dx,
        dy: f.dy,
        values: gy,
        mask,
    };
    FieldGradient { fx, fy }
}

fn offset_active(f: &GridField, i: usize, j: usize, si: isize, sj: isize, k: isize) -> Option<f64> {
    let ii = i as isize + si * k;
    let jj = j as isize + sj * k;
    if ii < 0 || jj < 0 || ii >= f.nx as isize || jj >= f.ny as isize {
        return None;
    }
    let (iu, ju) = (ii as usize, jj as usize);
    if f.is_active(iu, ju) {
        Some(f.get(iu, ju))
    } else {
        None
    }
}

fn directional_derivative(f: &GridField, i: usize, j: usize, si: isize, sj: isize, h: f64) -> f64 {
    let c = f.get(i, j);
    let p1 = offset_active(f, i, j, si, sj, 1);
    let m1 = offset_active(f, i, j, si, sj, -1);
    match (m1, p1) {
        (Some(a), Some(b)) => (b - a) / (2.0 * h),
        (None, Some(b)) => match offset_active(f, i, j, si, sj, 2) {
            Some(b2) => (-3.0 * c + 4.0 * b - b2) / (2.0 * h),
            None => (b - c) / h,
        },
        (Some(a), None) => match offset_active(f, i, j, si, sj, -2) {
            Some(a2) => (3.0 * c - 4.0 * a + a2) / (2.0 * h),
            None => (c - a) / h,
        },
        (None, None) => 0.0,
    }
}

/// 5-point stencil Laplacian.  Interior nodes get the classical stencil;
/// nodes whose neighbour is missing fall back to a one-sided second
/// difference in that direction.
pub fn laplacian(f: &GridField) -> GridField {
    let nx = f.nx;
    let ny = f.ny;
    let mut out = vec![MASKED; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            if !f.is_active(i, j) {
                continue;
            }
            let sxx = second_difference(f, i, j, 1, 0, f.dx);
            let syy = second_difference(f, i, j, 0, 1, f.dy);
            out[j * nx + i] = sxx + syy;
        }
    }
    GridField {
        nx,
        ny,
        x0: f.x0,
        y0: f.y0,
        dx: f.dx,
        dy: f.dy,
        values: out,
        mask: f.mask.clone(),
    }
}

fn second_difference(f: &GridField, i: usize, j: usize, si: isize, sj: isize, h: f64) -> f64 {
    let c = f.get(i, j);
    let p1 = offset_active(f, i, j, si, sj, 1);
    let m1 = offset_active(f, i, j, si, sj, -1);
    match (m1, p1) {
        (Some(a), Some(b)) => (a - 2.0 * c + b) / (h * h),
        (None, Some(b)) => match (offset_active(f, i, j, si, sj, 2), offset_active(f, i, j, si, sj, 3)) {
            (Some(b2), Some(b3)) => (2.0 * c - 5.0 * b + 4.0 * b2 - b3) / (h * h),
            (Some(b2), None) => (c - 2.0 * b + b2) / (h * h),
            _ => 0.0,
        },
        (Some(a), None) => match (offset_active(f, i, j, si, sj, -2), offset_active(f, i, j, si, sj, -3)) {
            (Some(a2), Some(a3)) => (2.0 * c - 5.0 * a + 4.0 * a2 - a3) / (h * h),
            (Some(a2), None) => (c - 2.0 * a + a2) / (h * h),
            _ => 0.0,
        },
        (None, None) => 0.0,
    }
}

/// Verify that the support of `phi` sits strictly inside the grid and away
/// from any masked node.
pub fn check_support(f: &GridField, phi: &TestFunction) -> Result<()> {
    let (bx0, by0, bx1, by1) = phi.support_bbox();
    let (gx0, gy0, gx1, gy1) = f.bounds();
    if bx0 <= gx0 + f.dx || by0 <= gy0 + f.dy || bx1 >= gx1 - f.dx || by1 >= gy1 - f.dy {
        return Err(Error::Support(format!(
            "bump at ({}, {}) radius {} touches the grid boundary",
            phi.center.0, phi.center.1, phi.radius
        )));
    }
    if f.mask.is_some() {
        let (i0, j0, i1, j1) = node_range(f, bx0, by0, bx1, by1);
        for j in j0..=j1 {
            for i in i0..=i1 {
                if !f.is_active(i, j) {
                    return Err(Error::Support(format!(
                        "bump at ({}, {}) radius {} overlaps a masked node",
                        phi.center.0, phi.center.1, phi.radius
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Inclusive node index range of a bounding box, clamped to the grid.
pub(crate) fn node_range(
    f: &GridField,
    bx0: f64,
    by0: f64,
    bx1: f64,
    by1: f64,
) -> (usize, usize, usize, usize) {
    let i0 = (((bx0 - f.x0) / f.dx).floor().max(0.0)) as usize;
    let j0 = (((by0 - f.y0) / f.dy).floor().max(0.0)) as usize;
    let i1 = (((bx1 - f.x0) / f.dx).ceil() as usize).min(f.nx - 1);
    let j1 = (((by1 - f.y0) / f.dy).ceil() as usize).min(f.ny - 1);
    (i0, j0, i1, j1)
}

/// Discrete action `⟨μ, φ⟩` of the vorticity `μ = -Δf + f` on a bump:
/// `Σ (∇f·∇φ + f φ) dx dy` with the analytic `∇φ` and the discrete `∇f`.
///
/// This is the weak form itself, never the stencil Laplacian, so it stays
/// meaningful across kinks of `f`.
pub fn pair_vorticity(f: &GridField, phi: &TestFunction) -> Result<f64> {
    let grad = gradient(f);
    pair_vorticity_with_grad(f, &grad, phi)
}

/// Same as [`pair_vorticity`] with a precomputed gradient, for batteries.
pub fn pair_vorticity_with_grad(
    f: &GridField,
    grad: &FieldGradient,
    phi: &TestFunction,
) -> Result<f64> {
    check_support(f, phi)?;
    let (bx0, by0, bx1, by1) = phi.support_bbox();
    let (i0, j0, i1, j1) = node_range(f, bx0, by0, bx1, by1);
    let cell = f.dx * f.dy;
    let mut acc = 0.0;
    for j in j0..=j1 {
        let y = f.y(j);
        for i in i0..=i1 {
            let x = f.x(i);
            let w = phi.value(x, y);
            let (gx, gy) = phi.grad(x, y);
            if w == 0.0 && gx == 0.0 && gy == 0.0 {
                continue;
            }
            let k = j * f.nx + i;
            acc += grad.fx.values[k] * gx + grad.fy.values[k] * gy + f.values[k] * w;
        }
    }
    Ok(acc * cell)
}
