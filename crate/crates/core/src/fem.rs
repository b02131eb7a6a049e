//! Linear finite elements: assembly of the Galerkin system for
//! `a(u, v) = eps1 (u', v') + eps2 (b u', v) + (c u, v)` on the hat basis of
//! the interior nodes, and its tridiagonal solve.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::BakhvalovMesh;
use crate::problem::TwoParamBvp;
use crate::quadrature::QuadratureRule;

/// A continuous piecewise-linear function given by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    nodes: Arc<[f64]>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(nodes: Arc<[f64]>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} nodes",
                values.len(),
                nodes.len()
            )));
        }
        Ok(Self { nodes, values })
    }

    pub fn zero(mesh: &BakhvalovMesh) -> Self {
        Self {
            nodes: mesh.shared_nodes(),
            values: vec![0.0; mesh.n() + 1],
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn shared_nodes(&self) -> Arc<[f64]> {
        Arc::clone(&self.nodes)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Whether both functions live on the same node set.
    pub fn same_mesh(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || self.nodes[..] == other.nodes[..]
    }

    /// Element index containing `x` (clamped to [0, N-1]).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.n();
        let k = self.nodes.partition_point(|&xi| xi <= x);
        k.saturating_sub(1).min(n - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.locate(x);
        self.eval_on(k, x)
    }

    /// Value at `x` using the linear piece of element `k`.
    #[inline]
    pub fn eval_on(&self, k: usize, x: f64) -> f64 {
        let (x0, x1) = (self.nodes[k], self.nodes[k + 1]);
        self.eval_local(k, (x - x0) / (x1 - x0))
    }

    /// Value on element `k` at element coordinate `s` in [0, 1].
    #[inline]
    pub fn eval_local(&self, k: usize, s: f64) -> f64 {
        self.values[k] + s * (self.values[k + 1] - self.values[k])
    }

    /// Constant derivative on element `k`.
    #[inline]
    pub fn slope(&self, k: usize) -> f64 {
        (self.values[k + 1] - self.values[k]) / (self.nodes[k + 1] - self.nodes[k])
    }

    /// `values[0] == values[N] == 0`.
    pub fn satisfies_boundary_conditions(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.n()] == 0.0
    }
}

/// Tridiagonal system on the interior unknowns 1..N-1. Row `r` belongs to
/// node `r + 1`; `sub[0]` and `sup[N-2]` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    nodes: Arc<[f64]>,
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn from_parts(
        nodes: Arc<[f64]>,
        sub: Vec<f64>,
        diag: Vec<f64>,
        sup: Vec<f64>,
        rhs: Vec<f64>,
    ) -> Result<Self> {
        let m = nodes.len().saturating_sub(2);
        if m == 0 || [sub.len(), diag.len(), sup.len(), rhs.len()].iter().any(|&l| l != m) {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal arrays must have length {m}"
            )));
        }
        Ok(Self {
            nodes,
            sub,
            diag,
            sup,
            rhs,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `A y` for interior values `y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|r| {
                let mut s = self.diag[r] * y[r];
                if r > 0 {
                    s += self.sub[r] * y[r - 1];
                }
                if r + 1 < m {
                    s += self.sup[r] * y[r + 1];
                }
                s
            })
            .collect()
    }

    /// `max_r |(A y - rhs)_r| / ||A_r||_1`.
    pub fn scaled_residual(&self, y: &[f64]) -> f64 {
        let ay = self.apply(y);
        (0..self.len())
            .map(|r| {
                let norm = self.sub[r].abs() + self.diag[r].abs() + self.sup[r].abs();
                (ay[r] - self.rhs[r]).abs() / norm
            })
            .fold(0.0, f64::max)
    }

    /// `||A y - rhs||_inf / ||rhs||_inf` (absolute when `rhs = 0`).
    pub fn relative_residual(&self, y: &[f64]) -> f64 {
        let ay = self.apply(y);
        let res = ay
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = self.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale > 0.0 {
            res / scale
        } else {
            res
        }
    }
}

/// Element contributions: `k[a][b] = a(theta_b, theta_a)` and `(f, theta_a)`
/// for the local basis (left hat, right hat).
#[derive(Debug, Clone, Copy)]
struct ElementMatrix {
    k: [[f64; 2]; 2],
    f: [f64; 2],
}

fn element_matrix(problem: &TwoParamBvp, x0: f64, x1: f64, quad: &QuadratureRule) -> ElementMatrix {
    let h = x1 - x0;
    let d = [-1.0 / h, 1.0 / h];
    let mut conv = [0.0; 2]; // int b theta_a
    let mut mass = [[0.0; 2]; 2]; // int c theta_a theta_b
    let mut load = [0.0; 2];
    quad.for_each_node_local(x0, x1, |x, s, w| {
        let phi = [1.0 - s, s];
        let bx = problem.b.eval(x);
        let cx = problem.c.eval(x);
        let fx = problem.f.eval(x);
        for a in 0..2 {
            conv[a] += w * bx * phi[a];
            load[a] += w * fx * phi[a];
            for b in 0..2 {
                mass[a][b] += w * cx * phi[a] * phi[b];
            }
        }
    });
    let mut k = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            k[a][b] = problem.eps1 * d[a] * d[b] * h + problem.eps2 * d[b] * conv[a] + mass[a][b];
        }
    }
    ElementMatrix { k, f: load }
}

fn element_matrices(problem: &TwoParamBvp, nodes: &[f64], quad: &QuadratureRule) -> Vec<ElementMatrix> {
    let build = |e: usize| element_matrix(problem, nodes[e], nodes[e + 1], quad);
    let n = nodes.len() - 1;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if n >= 2048 {
            return (0..n).into_par_iter().map(build).collect();
        }
    }
    (0..n).map(build).collect()
}

/// Assembles the Galerkin system. Diffusion entries are exact; convection,
/// reaction and load integrals use `quad` on every element. Element
/// contributions are summed into rows in element order, so the result does
/// not depend on how the element integrals were scheduled.
pub fn assemble(problem: &TwoParamBvp, mesh: &BakhvalovMesh, quad: &QuadratureRule) -> Result<TridiagonalSystem> {
    let nodes = mesh.nodes();
    let n = mesh.n();
    let locals = element_matrices(problem, nodes, quad);
    if let Some(element) = locals
        .iter()
        .position(|m| m.k.iter().flatten().chain(&m.f).any(|v| !v.is_finite()))
    {
        return Err(Error::NonFiniteElement { element });
    }

    let m = n - 1;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for (e, loc) in locals.iter().enumerate() {
        // local 0 is node e, local 1 is node e + 1; row of node i is i - 1
        if e >= 1 {
            let r = e - 1;
            diag[r] += loc.k[0][0];
            rhs[r] += loc.f[0];
            if e < m {
                sup[r] += loc.k[0][1];
            }
        }
        if e < m {
            let r = e;
            diag[r] += loc.k[1][1];
            rhs[r] += loc.f[1];
            if e >= 1 {
                sub[r] += loc.k[1][0];
            }
        }
    }
    TridiagonalSystem::from_parts(mesh.shared_nodes(), sub, diag, sup, rhs)
}

/// Thomas elimination without pivoting.
pub fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = diag[0];
    if piv == 0.0 || !piv.is_finite() {
        return Err(Error::ZeroPivot { row: 0 });
    }
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for r in 1..m {
        piv = diag[r] - sub[r] * c[r - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::ZeroPivot { row: r });
        }
        c[r] = if r + 1 < m { sup[r] / piv } else { 0.0 };
        d[r] = (rhs[r] - sub[r] * d[r - 1]) / piv;
    }
    for r in (0..m - 1).rev() {
        d[r] -= c[r] * d[r + 1];
    }
    Ok(d)
}

/// Discrete solution together with `||A u - rhs||_inf / ||rhs||_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub u: PiecewiseLinear,
    pub residual: f64,
}

pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<DiscreteSolution> {
    let y = thomas(&sys.sub, &sys.diag, &sys.sup, &sys.rhs)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal("non-finite value in tridiagonal solution".into()));
    }
    let residual = sys.relative_residual(&y);
    let mut values = Vec::with_capacity(y.len() + 2);
    values.push(0.0);
    values.extend_from_slice(&y);
    values.push(0.0);
    Ok(DiscreteSolution {
        u: PiecewiseLinear::new(Arc::clone(&sys.nodes), values)?,
        residual,
    })
}

/// `max_i |a(u_h, theta_i) - (f, theta_i)| / ||A_i||_1` over interior nodes.
pub fn galerkin_residual(
    problem: &TwoParamBvp,
    mesh: &BakhvalovMesh,
    quad: &QuadratureRule,
    u_h: &PiecewiseLinear,
) -> Result<f64> {
    if u_h.nodes() != mesh.nodes() {
        return Err(Error::MeshMismatch);
    }
    let sys = assemble(problem, mesh, quad)?;
    let n = mesh.n();
    Ok(sys.scaled_residual(&u_h.values()[1..n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ScalarField;

    fn diffusion_only(eps1: f64) -> TwoParamBvp {
        // c = 0 violates the coercivity conditions; only used for entries.
        TwoParamBvp {
            eps1,
            eps2: 1e-3,
            b: ScalarField::constant(0.0),
            c: ScalarField::constant(0.0),
            f: ScalarField::constant(0.0),
            lambda_lb: 1.0,
            beta_lb: 1.0,
            gamma_lb: 1.0,
        }
    }

    #[test]
    fn stiffness_entries_on_uniform_mesh() {
        let mesh = BakhvalovMesh::uniform(10).unwrap();
        let sys = assemble(&diffusion_only(0.3), &mesh, &QuadratureRule::default()).unwrap();
        let h = 0.1;
        for r in 0..9 {
            assert!((sys.diag[r] - 2.0 * 0.3 / h).abs() < 1e-12);
            if r > 0 {
                assert!((sys.sub[r] + 0.3 / h).abs() < 1e-12);
            }
            if r < 8 {
                assert!((sys.sup[r] + 0.3 / h).abs() < 1e-12);
            }
        }
        assert_eq!(sys.sub[0], 0.0);
        assert_eq!(sys.sup[8], 0.0);
    }

    #[test]
    fn mass_entries_on_uniform_mesh() {
        let mut p = diffusion_only(1e-300);
        p.eps1 = 0.0;
        p.eps2 = 0.0;
        p.c = ScalarField::constant(1.0);
        let mesh = BakhvalovMesh::uniform(8).unwrap();
        let sys = assemble(&p, &mesh, &QuadratureRule::default()).unwrap();
        let h = 0.125;
        for r in 0..7 {
            assert!((sys.diag[r] - 2.0 * h / 3.0).abs() < 1e-15);
            if r > 0 {
                assert!((sys.sub[r] - h / 6.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn convection_makes_the_matrix_nonsymmetric() {
        let p = TwoParamBvp::model(1e-4, 0.5).unwrap();
        let mesh = BakhvalovMesh::uniform(16).unwrap();
        let sys = assemble(&p, &mesh, &QuadratureRule::default()).unwrap();
        // eps2 (theta_{i+1}', theta_i) = eps2 / 2, (theta_{i-1}', theta_i) = -eps2 / 2
        assert!(((sys.sup[3] - sys.sub[4]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn thomas_three_by_three() {
        let y = thomas(&[0.0, -1.0, -1.0], &[2.0; 3], &[-1.0, -1.0, 0.0], &[1.0; 3]).unwrap();
        for (got, want) in y.iter().zip([1.5, 2.0, 1.5]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn thomas_reports_zero_pivot() {
        let err = thomas(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::ZeroPivot { row: 1 });
        let err = thomas(&[0.0], &[0.0], &[0.0], &[1.0]).unwrap_err();
        assert_eq!(err, Error::ZeroPivot { row: 0 });
    }

    #[test]
    fn homogeneous_system_gives_zero() {
        let mut p = TwoParamBvp::model(1e-2, 1e-2).unwrap();
        p.f = ScalarField::constant(0.0);
        let mesh = BakhvalovMesh::uniform(16).unwrap();
        let sol = solve_tridiagonal(&assemble(&p, &mesh, &QuadratureRule::default()).unwrap()).unwrap();
        assert!(sol.u.values().iter().all(|&v| v == 0.0));
        assert!(sol.u.satisfies_boundary_conditions());
    }

    #[test]
    fn non_finite_coefficient_names_the_element() {
        let mut p = TwoParamBvp::model(1e-2, 1e-2).unwrap();
        p.f = ScalarField::new(|x| if x > 0.5 { f64::NAN } else { 1.0 });
        let mesh = BakhvalovMesh::uniform(16).unwrap();
        let err = assemble(&p, &mesh, &QuadratureRule::default()).unwrap_err();
        assert_eq!(err, Error::NonFiniteElement { element: 8 });
    }

    #[test]
    fn piecewise_linear_evaluation() {
        let mesh = BakhvalovMesh::uniform(4).unwrap();
        let v = PiecewiseLinear::new(mesh.shared_nodes(), vec![0.0, 1.0, 0.0, -1.0, 0.0]).unwrap();
        assert_eq!(v.eval(0.125), 0.5);
        assert_eq!(v.eval(1.0), 0.0);
        assert_eq!(v.eval(0.625), -0.5);
        assert_eq!(v.slope(0), 4.0);
        assert_eq!(v.locate(0.25), 1);
    }
}
