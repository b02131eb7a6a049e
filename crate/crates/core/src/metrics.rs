//! Error norms and observed convergence rates.
//!
//! The energy norm is `||v||_E^2 = eps1 |v|_1^2 + ||v||^2`.

use crate::error::{Error, Result};
use crate::fem::PiecewiseLinear;
use crate::manufactured::ExactSolution;
use crate::quadrature::QuadratureRule;

/// Largest panel count the certificate loop will try.
pub const MAX_PANELS: usize = 32;
/// Relative change under panel doubling that certifies a quadrature.
pub const QUAD_TOLERANCE: f64 = 1e-3;

/// `||u - v||` measured by quadrature against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousError {
    pub energy: f64,
    pub l2: f64,
    /// `sqrt(eps1) |u - v|_1`.
    pub h1w: f64,
    /// `|u - v|_1`.
    pub h1_semi: f64,
    /// Relative change of `energy` when the panels were doubled.
    pub quad_delta: f64,
    /// Panels per element of the reported values.
    pub panels: usize,
    pub reliable: bool,
}

#[derive(Debug, Clone, Copy)]
struct Sums {
    energy: f64,
    l2: f64,
    semi: f64,
}

fn error_sums(exact: &impl ExactSolution, v: &PiecewiseLinear, eps1: f64, quad: &QuadratureRule) -> Result<Sums> {
    let x = v.nodes();
    let mut total = Sums {
        energy: 0.0,
        l2: 0.0,
        semi: 0.0,
    };
    for k in 0..v.n() {
        let slope = v.slope(k);
        let mut s = Sums {
            energy: 0.0,
            l2: 0.0,
            semi: 0.0,
        };
        quad.for_each_node_local(x[k], x[k + 1], |t, s_loc, w| {
            let e = exact.value(t) - v.eval_local(k, s_loc);
            let de = exact.derivative(t) - slope;
            s.energy += w * (eps1 * de * de + e * e);
            s.l2 += w * e * e;
            s.semi += w * de * de;
        });
        if !(s.energy.is_finite() && s.l2.is_finite() && s.semi.is_finite()) {
            return Err(Error::NonFiniteElement { element: k });
        }
        total.energy += s.energy;
        total.l2 += s.l2;
        total.semi += s.semi;
    }
    Ok(total)
}

/// Integrates the error elementwise with `quad`, then again with twice the
/// panels. The finer values are reported; `quad_delta` is the relative
/// change in the energy error. While the change exceeds [`QUAD_TOLERANCE`]
/// the panels keep doubling, up to [`MAX_PANELS`].
pub fn energy_error_continuous(
    exact: &impl ExactSolution,
    v: &PiecewiseLinear,
    eps1: f64,
    quad: &QuadratureRule,
) -> Result<ContinuousError> {
    let mut coarse_rule = quad.clone();
    let mut coarse = error_sums(exact, v, eps1, &coarse_rule)?;
    loop {
        let fine_rule = coarse_rule.refined();
        let fine = error_sums(exact, v, eps1, &fine_rule)?;
        let (ec, ef) = (coarse.energy.sqrt(), fine.energy.sqrt());
        let quad_delta = if ef > 0.0 { (ef - ec).abs() / ef } else { (ef - ec).abs() };
        let reliable = quad_delta <= QUAD_TOLERANCE;
        if reliable || fine_rule.panels() >= MAX_PANELS {
            return Ok(ContinuousError {
                energy: ef,
                l2: fine.l2.sqrt(),
                h1w: (eps1 * fine.semi).sqrt(),
                h1_semi: fine.semi.sqrt(),
                quad_delta,
                panels: fine_rule.panels(),
                reliable,
            });
        }
        coarse_rule = fine_rule;
        coarse = fine;
    }
}

/// Default rule for continuous errors: 5 Gauss points on 4 panels.
pub fn default_error_quadrature() -> QuadratureRule {
    QuadratureRule::new(5, 4).expect("5-point rule is valid")
}

/// Errors of one discrete solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// `||u - u^N||_E`.
    pub e_energy: f64,
    /// `||u^I - u^N||_E`.
    pub e_superclose: f64,
    pub e_l2: f64,
    pub e_h1w: f64,
    pub quad_refinement_delta: f64,
    pub reliable: bool,
}

impl ErrorReport {
    pub fn new(continuous: &ContinuousError, e_superclose: f64) -> Self {
        Self {
            e_energy: continuous.energy,
            e_superclose,
            e_l2: continuous.l2,
            e_h1w: continuous.h1w,
            quad_refinement_delta: continuous.quad_delta,
            reliable: continuous.reliable,
        }
    }

    /// Relative defect of `e_energy^2 = e_l2^2 + e_h1w^2`.
    pub fn pythagoras_defect(&self) -> f64 {
        let lhs = self.e_energy * self.e_energy;
        let rhs = self.e_l2 * self.e_l2 + self.e_h1w * self.e_h1w;
        if lhs == 0.0 {
            rhs
        } else {
            (lhs - rhs).abs() / lhs
        }
    }
}

/// `||v - w||_E` for two functions on the same mesh, evaluated exactly:
/// per element `eps1 (d_{i+1} - d_i)^2 / h + h (d_i^2 + d_i d_{i+1} + d_{i+1}^2) / 3`.
pub fn energy_norm_discrete_diff(v: &PiecewiseLinear, w: &PiecewiseLinear, eps1: f64) -> Result<f64> {
    if !v.same_mesh(w) {
        return Err(Error::MeshMismatch);
    }
    let x = v.nodes();
    let (a, b) = (v.values(), w.values());
    let mut sum = 0.0;
    for k in 0..v.n() {
        let h = x[k + 1] - x[k];
        let d0 = a[k] - b[k];
        let d1 = a[k + 1] - b[k + 1];
        let dd = d1 - d0;
        sum += eps1 * dd * dd / h + h * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    }
    Ok(sum.sqrt())
}

/// `log2(e_n / e_2n)`.
pub fn convergence_rate(e_n: f64, e_2n: f64) -> Result<f64> {
    if !(e_n > 0.0 && e_2n > 0.0) || !e_n.is_finite() || !e_2n.is_finite() {
        return Err(Error::UndefinedRate { e_n, e_2n });
    }
    Ok((e_n / e_2n).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manufactured::Analytic;
    use crate::mesh::BakhvalovMesh;
    use std::f64::consts::PI;

    #[test]
    fn zero_error() {
        let mesh = BakhvalovMesh::uniform(8).unwrap();
        let z = PiecewiseLinear::zero(&mesh);
        let u = Analytic::new(|_| 0.0, |_| 0.0);
        let e = energy_error_continuous(&u, &z, 1.0, &default_error_quadrature()).unwrap();
        assert_eq!(e.energy, 0.0);
        assert!(e.reliable);
    }

    #[test]
    fn sine_energy() {
        let mesh = BakhvalovMesh::uniform(16).unwrap();
        let z = PiecewiseLinear::zero(&mesh);
        let u = Analytic::new(|x: f64| (PI * x).sin(), |x: f64| PI * (PI * x).cos());
        let e = energy_error_continuous(&u, &z, 1.0, &default_error_quadrature()).unwrap();
        let exact = PI * PI / 2.0 + 0.5;
        assert!((e.energy * e.energy - exact).abs() < 1e-13);
        assert!((e.l2 * e.l2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hat_norm_closed_form() {
        let mesh = BakhvalovMesh::uniform(10).unwrap();
        let mut v = PiecewiseLinear::zero(&mesh);
        v.values_mut()[3] = 1.0;
        let z = PiecewiseLinear::zero(&mesh);
        let eps1: f64 = 0.37;
        let h = 0.1;
        let want = (eps1 * (2.0 / h) + 2.0 * h / 3.0).sqrt();
        let got = energy_norm_discrete_diff(&v, &z, eps1).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn discrete_norm_requires_a_common_mesh() {
        let a = PiecewiseLinear::zero(&BakhvalovMesh::uniform(8).unwrap());
        let b = PiecewiseLinear::zero(&BakhvalovMesh::uniform(16).unwrap());
        assert_eq!(energy_norm_discrete_diff(&a, &b, 1.0), Err(Error::MeshMismatch));
    }

    #[test]
    fn rates() {
        assert_eq!(convergence_rate(0.4, 0.1).unwrap(), 2.0);
        assert_eq!(convergence_rate(0.3, 0.3).unwrap(), 0.0);
        assert!((convergence_rate(0.89e-2, 0.28e-2).unwrap() - 1.67).abs() < 0.01);
        assert!(convergence_rate(0.0, 0.1).is_err());
        assert!(convergence_rate(0.1, -1.0).is_err());
    }
}
