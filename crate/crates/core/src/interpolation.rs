//! Nodal interpolants of the exact solution.

use crate::error::{Error, Result};
use crate::fem::PiecewiseLinear;
use crate::manufactured::ManufacturedSolution;
use crate::mesh::BakhvalovMesh;

/// Lagrange interpolant: `values[i] = g(x_i)`.
pub fn lagrange_interpolate(g: impl Fn(f64) -> f64, mesh: &BakhvalovMesh) -> Result<PiecewiseLinear> {
    let values = mesh
        .nodes()
        .iter()
        .map(|&x| {
            let v = g(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Evaluation {
                    what: "interpolated function",
                    x,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseLinear::new(mesh.shared_nodes(), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolantBundle {
    pub u_i: PiecewiseLinear,
    /// `u^I` with the weak-layer hat at node 3N/4 + 1 removed.
    pub pi_u: PiecewiseLinear,
    /// `E1(x_{3N/4+1})`.
    pub pe1_node_value: f64,
    /// Energy norm of `E1(x_{3N/4+1}) theta_{3N/4+1}`.
    pub pe1_energy: f64,
    pub notice: Option<String>,
}

/// Energy norm of `value * theta_i` where the hat `theta_i` spans elements
/// of sizes `h_left` and `h_right`.
pub fn scaled_hat_energy(value: f64, h_left: f64, h_right: f64, eps1: f64) -> f64 {
    value.abs() * (eps1 * (1.0 / h_left + 1.0 / h_right) + (h_left + h_right) / 3.0).sqrt()
}

/// Builds `u^I` and `Pi u = u^I - PE1`. Without a graded right layer the
/// correction is dropped and `Pi u = u^I`.
pub fn pi_interpolate(ms: &ManufacturedSolution, mesh: &BakhvalovMesh) -> Result<InterpolantBundle> {
    let u_i = lagrange_interpolate(|x| ms.u(x), mesh)?;
    let mut pi_u = u_i.clone();
    if !mesh.right_mode.is_graded() {
        return Ok(InterpolantBundle {
            u_i,
            pi_u,
            pe1_node_value: 0.0,
            pe1_energy: 0.0,
            notice: Some("right layer not graded; Pi u taken as u^I".into()),
        });
    }
    let n = mesh.n();
    let k = 3 * n / 4 + 1;
    let value = ms.layer1(mesh.nodes()[k]);
    pi_u.values_mut()[k] -= value;
    Ok(InterpolantBundle {
        u_i,
        pi_u,
        pe1_node_value: value,
        pe1_energy: scaled_hat_energy(value, mesh.h(k - 1), mesh.h(k), ms.eps1),
        notice: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, MeshParams};
    use std::f64::consts::FRAC_1_SQRT_2;
    use std::f64::consts::PI;

    fn graded(eps1: f64, eps2: f64, n: usize, tau: f64) -> (ManufacturedSolution, BakhvalovMesh) {
        let ms = ManufacturedSolution::new(eps1, eps2).unwrap();
        let params = MeshParams::new(n, tau, 0.5).unwrap();
        let mesh = build_mesh(ms.mu0, ms.mu1, &params).unwrap();
        (ms, mesh)
    }

    #[test]
    fn reproduces_linear_functions() {
        let (_, mesh) = graded(1e-8, 1e-4, 16, 2.0);
        let v = lagrange_interpolate(|x| 2.0 * x - 1.0, &mesh).unwrap();
        for k in 0..=97 {
            let x = k as f64 / 97.0;
            assert!((v.eval(x) - (2.0 * x - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn cosine_on_quarter_points() {
        let mesh = BakhvalovMesh::uniform(4).unwrap();
        let v = lagrange_interpolate(|x| (PI * x).cos(), &mesh).unwrap();
        let want = [1.0, FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2, -1.0];
        for (a, b) in v.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn transition_node_value() {
        let (ms, mesh) = graded(1e-8, 1e-4, 16, 2.0);
        let v = lagrange_interpolate(|x| ms.u(x), &mesh).unwrap();
        assert_eq!(v.values()[4], ms.u(mesh.sigma0));
    }

    #[test]
    fn non_finite_value_is_an_error() {
        let mesh = BakhvalovMesh::uniform(4).unwrap();
        let err = lagrange_interpolate(|x| 1.0 / (x - 0.5), &mesh).unwrap_err();
        assert!(matches!(err, Error::Evaluation { x, .. } if x == 0.5));
    }

    #[test]
    fn pi_differs_from_u_i_at_one_node() {
        let (_, mesh) = graded(1e-8, 1e-4, 64, 2.0);
        let ms = ManufacturedSolution::new(1e-8, 1e-4).unwrap();
        let b = pi_interpolate(&ms, &mesh).unwrap();
        let k = 3 * 64 / 4 + 1;
        for (i, (p, u)) in b.pi_u.values().iter().zip(b.u_i.values()).enumerate() {
            if i == k {
                assert_eq!(*p, u - b.pe1_node_value);
            } else {
                assert_eq!(p.to_bits(), u.to_bits());
            }
        }
        assert!(b.pe1_node_value != 0.0 && b.notice.is_none());
    }

    #[test]
    fn fallback_mesh_drops_the_correction() {
        let ms = ManufacturedSolution::new(1e-2, 1.0).unwrap();
        let params = MeshParams::new(128, 2.0, 0.5).unwrap();
        let mesh = build_mesh(ms.mu0, ms.mu1, &params).unwrap();
        let b = pi_interpolate(&ms, &mesh).unwrap();
        assert_eq!(b.pi_u, b.u_i);
        assert_eq!(b.pe1_energy, 0.0);
        assert!(b.notice.is_some());
    }

    #[test]
    fn pe1_node_value_decay() {
        // E1(x_k) = B exp(-mu1 (1 - x_k)) ~ N^{-tau/p}; the weighted
        // exponential exp(-p mu1 (1 - x_k)) ~ N^{-tau}.
        let ms = ManufacturedSolution::new(1e-8, 1e-4).unwrap();
        for tau in [2.0, 2.5] {
            let at = |n: usize| {
                let params = MeshParams::new(n, tau, 0.5).unwrap();
                let mesh = build_mesh(ms.mu0, ms.mu1, &params).unwrap();
                let xk = mesh.nodes()[3 * n / 4 + 1];
                let value = pi_interpolate(&ms, &mesh).unwrap().pe1_node_value;
                (value, (-0.5 * ms.mu1 * (1.0 - xk)).exp())
            };
            for n in [64, 128, 256] {
                let (v1, w1) = at(n);
                let (v2, w2) = at(2 * n);
                assert!(((v2 / v1).log2() + tau / 0.5).abs() < 0.1, "tau={tau} N={n}");
                assert!(((w2 / w1).log2() + tau).abs() < 0.05, "tau={tau} N={n}");
            }
        }
    }
}
