//! Deterministic test-function batteries.  Placement uses a Halton
//! sequence so that a run is reproducible from its seed alone.

use crate::fields::TestFunction;

/// Radical-inverse (van der Corput) value of `index` in the given base.
pub fn halton(index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` bumps of fixed radius with centres Halton-distributed over the
/// rectangle `(x0, y0)..(x1, y1)`.
pub fn rect_battery(
    n: usize,
    seed: u64,
    bounds: (f64, f64, f64, f64),
    radius: f64,
) -> Vec<TestFunction> {
    let (x0, y0, x1, y1) = bounds;
    (0..n)
        .map(|k| {
            let idx = seed.wrapping_mul(7919).wrapping_add(k as u64 + 1);
            let u = halton(idx, 2);
            let v = halton(idx, 3);
            TestFunction {
                center: (x0 + u * (x1 - x0), y0 + v * (y1 - y0)),
                radius,
            }
        })
        .collect()
}

/// `n` bumps with centres Halton-distributed along the circle of radius
/// `rho` around `center`; every support straddles the circle.
pub fn circle_battery(
    n: usize,
    seed: u64,
    center: (f64, f64),
    rho: f64,
    radius: f64,
) -> Vec<TestFunction> {
    (0..n)
        .map(|k| {
            let idx = seed.wrapping_mul(7919).wrapping_add(k as u64 + 1);
            let theta = 2.0 * std::f64::consts::PI * halton(idx, 2);
            TestFunction {
                center: (center.0 + rho * theta.cos(), center.1 + rho * theta.sin()),
                radius,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_low_discrepancy_and_deterministic() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert_eq!(halton(1, 3), 1.0 / 3.0);
        for i in 1..100 {
            let v = halton(i, 2);
            assert!(v > 0.0 && v < 1.0);
            assert_eq!(v, halton(i, 2));
        }
    }

    #[test]
    fn batteries_are_reproducible() {
        let a = rect_battery(20, 7, (-0.5, -0.5, 0.5, 0.5), 0.1);
        let b = rect_battery(20, 7, (-0.5, -0.5, 0.5, 0.5), 0.1);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.center, q.center);
        }
        let c = rect_battery(20, 8, (-0.5, -0.5, 0.5, 0.5), 0.1);
        assert!(a.iter().zip(&c).any(|(p, q)| p.center != q.center));
    }
}
