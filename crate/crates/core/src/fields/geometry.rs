//! Domain geometry: boundary quadrature nodes with outward normals and
//! tangents, interior quadrature over curved domains, and boundary traces
//! of grid fields.

use super::GridField;
use crate::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, radius: f64 },
    Annulus { cx: f64, cy: f64, inner: f64, outer: f64 },
}

/// One boundary quadrature node: position, unit outward normal `ν`, unit
/// tangent `τ = ν` rotated by +π/2, and arc-length weight.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryNode {
    pub point: (f64, f64),
    pub normal: (f64, f64),
    pub tangent: (f64, f64),
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct DomainGeometry {
    pub kind: DomainKind,
    nodes: Vec<BoundaryNode>,
}

fn rotate_ccw(v: (f64, f64)) -> (f64, f64) {
    (-v.1, v.0)
}

fn circle_nodes(
    cx: f64,
    cy: f64,
    radius: f64,
    n: usize,
    outward: bool,
    nodes: &mut Vec<BoundaryNode>,
) {
    let w = 2.0 * PI * radius / n as f64;
    for k in 0..n {
        let theta = 2.0 * PI * (k as f64 + 0.5) / n as f64;
        let dir = (theta.cos(), theta.sin());
        let normal = if outward { dir } else { (-dir.0, -dir.1) };
        nodes.push(BoundaryNode {
            point: (cx + radius * dir.0, cy + radius * dir.1),
            normal,
            tangent: rotate_ccw(normal),
            weight: w,
        });
    }
}

impl DomainGeometry {
    pub fn disk(cx: f64, cy: f64, radius: f64, n_nodes: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!("disk radius must be > 0, got {radius}")));
        }
        let mut nodes = Vec::with_capacity(n_nodes);
        circle_nodes(cx, cy, radius, n_nodes.max(16), true, &mut nodes);
        Ok(DomainGeometry {
            kind: DomainKind::Disk { cx, cy, radius },
            nodes,
        })
    }

    /// Annulus `inner ≤ ρ ≤ outer`; the outward normal of the domain points
    /// toward the centre on the inner circle.
    pub fn annulus(cx: f64, cy: f64, inner: f64, outer: f64, n_nodes: usize) -> Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(Error::Geometry(format!(
                "annulus radii must satisfy 0 < inner < outer, got {inner}, {outer}"
            )));
        }
        let total = (inner + outer) * 2.0 * PI;
        let n_out = ((n_nodes.max(32)) as f64 * (outer * 2.0 * PI) / total).round() as usize;
        let n_in = n_nodes.max(32) - n_out;
        let mut nodes = Vec::new();
        circle_nodes(cx, cy, outer, n_out.max(16), true, &mut nodes);
        circle_nodes(cx, cy, inner, n_in.max(16), false, &mut nodes);
        Ok(DomainGeometry {
            kind: DomainKind::Annulus { cx, cy, inner, outer },
            nodes,
        })
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64, n_per_side: usize) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::Geometry(format!(
                "degenerate rectangle ({x0},{y0})-({x1},{y1})"
            )));
        }
        let n = n_per_side.max(8);
        let mut nodes = Vec::with_capacity(4 * n);
        let mut side = |a: (f64, f64), b: (f64, f64), normal: (f64, f64)| {
            let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            let w = len / n as f64;
            for k in 0..n {
                let t = (k as f64 + 0.5) / n as f64;
                nodes.push(BoundaryNode {
                    point: (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)),
                    normal,
                    tangent: rotate_ccw(normal),
                    weight: w,
                });
            }
        };
        side((x0, y0), (x1, y0), (0.0, -1.0));
        side((x1, y0), (x1, y1), (1.0, 0.0));
        side((x1, y1), (x0, y1), (0.0, 1.0));
        side((x0, y1), (x0, y0), (-1.0, 0.0));
        Ok(DomainGeometry {
            kind: DomainKind::Rectangle { x0, y0, x1, y1 },
            nodes,
        })
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn boundary_length(&self) -> f64 {
        match self.kind {
            DomainKind::Rectangle { x0, y0, x1, y1 } => 2.0 * ((x1 - x0) + (y1 - y0)),
            DomainKind::Disk { radius, .. } => 2.0 * PI * radius,
            DomainKind::Annulus { inner, outer, .. } => 2.0 * PI * (inner + outer),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self.kind {
            DomainKind::Rectangle { x0, y0, x1, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
            DomainKind::Disk { cx, cy, radius } => {
                (x - cx).hypot(y - cy) <= radius
            }
            DomainKind::Annulus { cx, cy, inner, outer } => {
                let rho = (x - cx).hypot(y - cy);
                rho >= inner && rho <= outer
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self.kind {
            DomainKind::Rectangle { x0, y0, x1, y1 } => (x1 - x0) * (y1 - y0),
            DomainKind::Disk { radius, .. } => PI * radius * radius,
            DomainKind::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
        }
    }

    /// `x·ν ≥ 0` at every boundary node (star-shapedness w.r.t. the origin).
    pub fn star_shaped_wrt_origin(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| n.point.0 * n.normal.0 + n.point.1 * n.normal.1 >= -1e-12)
    }

    /// Weighted boundary sum `Σ w_k f(node_k)`.
    pub fn boundary_sum(&self, mut f: impl FnMut(&BoundaryNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    /// `∫_Ω g(field(x), x) dA` with the field sampled bicubically.
    ///
    /// Rectangles use the trapezoid rule on the grid nodes themselves;
    /// disks and annuli use composite Gauss-Legendre panels radially and
    /// the trapezoid rule in the angle, with panel width tied to the grid
    /// spacing.
    pub fn interior_integral(
        &self,
        field: &GridField,
        g: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<f64> {
        match self.kind {
            DomainKind::Rectangle { x0, y0, x1, y1 } => {
                let (gx0, gy0, gx1, gy1) = field.bounds();
                if x0 < gx0 - 1e-9 || y0 < gy0 - 1e-9 || x1 > gx1 + 1e-9 || y1 > gy1 + 1e-9 {
                    return Err(Error::Geometry(
                        "rectangle extends beyond the grid".into(),
                    ));
                }
                let mut acc = 0.0;
                for j in 0..field.ny() {
                    let y = field.y(j);
                    if y < y0 - 1e-12 || y > y1 + 1e-12 {
                        continue;
                    }
                    let wy = if j == 0 || j == field.ny() - 1 { 0.5 } else { 1.0 };
                    for i in 0..field.nx() {
                        let x = field.x(i);
                        if x < x0 - 1e-12 || x > x1 + 1e-12 {
                            continue;
                        }
                        let wx = if i == 0 || i == field.nx() - 1 { 0.5 } else { 1.0 };
                        acc += wx * wy * g(field.get(i, j), x, y);
                    }
                }
                Ok(acc * field.dx() * field.dy())
            }
            DomainKind::Disk { cx, cy, radius } => {
                self.polar_integral(field, cx, cy, 0.0, radius, &g)
            }
            DomainKind::Annulus { cx, cy, inner, outer } => {
                self.polar_integral(field, cx, cy, inner, outer, &g)
            }
        }
    }

    fn polar_integral(
        &self,
        field: &GridField,
        cx: f64,
        cy: f64,
        r0: f64,
        r1: f64,
        g: &impl Fn(f64, f64, f64) -> f64,
    ) -> Result<f64> {
        let h = field.dx().min(field.dy());
        let n_panels = (((r1 - r0) / h).ceil() as usize).clamp(8, 4096);
        let n_theta = ((2.0 * PI * r1 / h).ceil() as usize).clamp(32, 16384);
        let dtheta = 2.0 * PI / n_theta as f64;
        let gl = gauss_legendre_4();
        let panel = (r1 - r0) / n_panels as f64;
        let mut acc = 0.0;
        for p in 0..n_panels {
            let a = r0 + p as f64 * panel;
            for (node, wgt) in gl {
                let rho = a + 0.5 * panel * (node + 1.0);
                let w_r = 0.5 * panel * wgt;
                for k in 0..n_theta {
                    let theta = dtheta * (k as f64 + 0.5);
                    let x = cx + rho * theta.cos();
                    let y = cy + rho * theta.sin();
                    if !field.can_sample(x, y) {
                        return Err(Error::Geometry(format!(
                            "interior quadrature point ({x:.4}, {y:.4}) leaves the sampleable grid"
                        )));
                    }
                    acc += g(field.sample(x, y), x, y) * rho * w_r * dtheta;
                }
            }
        }
        Ok(acc)
    }
}

/// 4-point Gauss-Legendre rule on [-1, 1].
fn gauss_legendre_4() -> [(f64, f64); 4] {
    let a = (3.0f64 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let b = (3.0f64 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
    let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
    [(-b, wb), (-a, wa), (a, wa), (b, wb)]
}

/// Boundary trace of a field: values, normal and tangential derivatives at
/// every boundary quadrature node.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub values: Vec<f64>,
    pub normal_deriv: Vec<f64>,
    pub tangential_deriv: Vec<f64>,
}

/// Sample the field trace on the boundary: the tangential derivative by a
/// centred difference along `τ`, the normal derivative by a one-sided
/// second-order stencil reaching into the domain along `-ν`.
pub fn boundary_integrals(f: &GridField, geom: &DomainGeometry) -> Result<BoundaryTrace> {
    let s = f.dx().max(f.dy());
    let mut values = Vec::with_capacity(geom.nodes().len());
    let mut normal_deriv = Vec::with_capacity(geom.nodes().len());
    let mut tangential_deriv = Vec::with_capacity(geom.nodes().len());
    for node in geom.nodes() {
        let (px, py) = node.point;
        let probes = [
            (px, py),
            (px - s * node.normal.0, py - s * node.normal.1),
            (px - 2.0 * s * node.normal.0, py - 2.0 * s * node.normal.1),
            (px + s * node.tangent.0, py + s * node.tangent.1),
            (px - s * node.tangent.0, py - s * node.tangent.1),
        ];
        for (qx, qy) in probes {
            if !f.can_sample(qx, qy) {
                return Err(Error::Geometry(format!(
                    "boundary stencil point ({qx:.4}, {qy:.4}) leaves the sampleable grid"
                )));
            }
        }
        let v0 = f.sample(probes[0].0, probes[0].1);
        let v1 = f.sample(probes[1].0, probes[1].1);
        let v2 = f.sample(probes[2].0, probes[2].1);
        let tp = f.sample(probes[3].0, probes[3].1);
        let tm = f.sample(probes[4].0, probes[4].1);
        values.push(v0);
        normal_deriv.push((3.0 * v0 - 4.0 * v1 + v2) / (2.0 * s));
        tangential_deriv.push((tp - tm) / (2.0 * s));
    }
    Ok(BoundaryTrace {
        values,
        normal_deriv,
        tangential_deriv,
    })
}
