//! Composite Gauss–Legendre quadrature on mesh elements.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre points and weights on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on the Legendre
    /// three-term recurrence, starting from the Chebyshev-like guess.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "Gauss-Legendre rule needs at least one point".into(),
            ));
        }
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            points[i] = -z;
            points[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// P_n(z) and P_n'(z).
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A composite rule: `points` Gauss nodes on each of `panels` equal
/// sub-intervals of an element.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    panels: usize,
    base: GaussLegendre,
}

impl Default for QuadratureRule {
    /// Five points, one panel.
    fn default() -> Self {
        Self::new(5, 1).expect("5-point rule is valid")
    }
}

impl QuadratureRule {
    pub fn new(points: usize, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidParameter(
                "quadrature needs at least one panel per element".into(),
            ));
        }
        Ok(Self {
            panels,
            base: GaussLegendre::new(points)?,
        })
    }

    /// One-point Gauss (midpoint) rule.
    pub fn midpoint() -> Self {
        Self::new(1, 1).expect("1-point rule is valid")
    }

    pub fn order(&self) -> usize {
        self.base.len()
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Same points per panel, twice as many panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: self.panels * 2,
            base: self.base.clone(),
        }
    }

    /// Calls `visit(x, w)` for every quadrature node of `[a, b]`.
    pub fn for_each_node(&self, a: f64, b: f64, mut visit: impl FnMut(f64, f64)) {
        let width = (b - a) / self.panels as f64;
        let half = 0.5 * width;
        for k in 0..self.panels {
            let left = a + k as f64 * width;
            let mid = left + half;
            for (&z, &w) in self.base.points.iter().zip(&self.base.weights) {
                visit(mid + half * z, half * w);
            }
        }
    }

    /// Like [`Self::for_each_node`], but also passes the element coordinate
    /// `s` in [0, 1] of each node. Hat functions built from `s` stay accurate
    /// on intervals far narrower than the spacing of doubles near `a`.
    pub fn for_each_node_local(&self, a: f64, b: f64, mut visit: impl FnMut(f64, f64, f64)) {
        let width = (b - a) / self.panels as f64;
        let half = 0.5 * width;
        let ds = 1.0 / self.panels as f64;
        for k in 0..self.panels {
            let mid = a + k as f64 * width + half;
            let smid = (k as f64 + 0.5) * ds;
            for (&z, &w) in self.base.points.iter().zip(&self.base.weights) {
                visit(mid + half * z, smid + 0.5 * ds * z, half * w);
            }
        }
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mut sum = 0.0;
        self.for_each_node(a, b, |x, w| sum += w * f(x));
        sum
    }
}
