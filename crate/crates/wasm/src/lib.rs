//! Browser bindings: mesh view, single solve and a convergence sweep.
//!
//! Each binding wraps a plain Rust function so that the logic is testable
//! on the host; only the error conversion is JS-specific.

use spp_core::metrics::default_error_quadrature;
use spp_core::study::solve_cell;
use spp_core::{build_mesh, run_study, ManufacturedSolution, MeshParams, QuadratureRule, StudyConfig};
use wasm_bindgen::prelude::*;

/// Samples of the exact solution drawn by the solve view.
const EXACT_SAMPLES: usize = 801;

#[wasm_bindgen]
pub struct MeshView {
    nodes: Vec<f64>,
    mu0: f64,
    mu1: f64,
    sigma0: f64,
    sigma1: f64,
    left_graded: bool,
    right_graded: bool,
}

#[wasm_bindgen]
impl MeshView {
    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mu0(&self) -> f64 {
        self.mu0
    }
    #[wasm_bindgen(getter)]
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    #[wasm_bindgen(getter)]
    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }
    #[wasm_bindgen(getter)]
    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }
    #[wasm_bindgen(getter, js_name = leftGraded)]
    pub fn left_graded(&self) -> bool {
        self.left_graded
    }
    #[wasm_bindgen(getter, js_name = rightGraded)]
    pub fn right_graded(&self) -> bool {
        self.right_graded
    }
}

#[wasm_bindgen]
pub struct SolveView {
    nodes: Vec<f64>,
    u_h: Vec<f64>,
    exact_x: Vec<f64>,
    exact_u: Vec<f64>,
    e_energy: f64,
    e_superclose: f64,
    galerkin_residual: f64,
}

#[wasm_bindgen]
impl SolveView {
    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }
    #[wasm_bindgen(getter, js_name = uh)]
    pub fn u_h(&self) -> Vec<f64> {
        self.u_h.clone()
    }
    #[wasm_bindgen(getter, js_name = exactX)]
    pub fn exact_x(&self) -> Vec<f64> {
        self.exact_x.clone()
    }
    #[wasm_bindgen(getter, js_name = exactU)]
    pub fn exact_u(&self) -> Vec<f64> {
        self.exact_u.clone()
    }
    #[wasm_bindgen(getter, js_name = energyError)]
    pub fn e_energy(&self) -> f64 {
        self.e_energy
    }
    #[wasm_bindgen(getter, js_name = supercloseError)]
    pub fn e_superclose(&self) -> f64 {
        self.e_superclose
    }
    #[wasm_bindgen(getter, js_name = galerkinResidual)]
    pub fn galerkin_residual(&self) -> f64 {
        self.galerkin_residual
    }
}

#[wasm_bindgen]
pub struct SweepView {
    n: Vec<f64>,
    e_energy: Vec<f64>,
    e_superclose: Vec<f64>,
    p_energy: Vec<f64>,
    p_superclose: Vec<f64>,
}

#[wasm_bindgen]
impl SweepView {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> Vec<f64> {
        self.n.clone()
    }
    #[wasm_bindgen(getter, js_name = energyError)]
    pub fn e_energy(&self) -> Vec<f64> {
        self.e_energy.clone()
    }
    #[wasm_bindgen(getter, js_name = supercloseError)]
    pub fn e_superclose(&self) -> Vec<f64> {
        self.e_superclose.clone()
    }
    /// Rates, NaN where undefined.
    #[wasm_bindgen(getter, js_name = energyRate)]
    pub fn p_energy(&self) -> Vec<f64> {
        self.p_energy.clone()
    }
    #[wasm_bindgen(getter, js_name = supercloseRate)]
    pub fn p_superclose(&self) -> Vec<f64> {
        self.p_superclose.clone()
    }
}

pub fn mesh_view_native(eps1: f64, eps2: f64, n: usize, tau: f64, p: f64) -> spp_core::Result<MeshView> {
    let ms = ManufacturedSolution::new(eps1, eps2)?;
    let mesh = build_mesh(ms.mu0, ms.mu1, &MeshParams::new(n, tau, p)?)?;
    Ok(MeshView {
        nodes: mesh.nodes().to_vec(),
        mu0: mesh.mu0,
        mu1: mesh.mu1,
        sigma0: mesh.sigma0,
        sigma1: mesh.sigma1,
        left_graded: mesh.left_mode.is_graded(),
        right_graded: mesh.right_mode.is_graded(),
    })
}

pub fn solve_native(
    eps1: f64,
    eps2: f64,
    n: usize,
    tau: f64,
    p: f64,
    quad_points: usize,
) -> spp_core::Result<SolveView> {
    let params = MeshParams::new(n, tau, p)?;
    let quad = QuadratureRule::new(quad_points, 1)?;
    let cell = solve_cell(eps1, eps2, &params, &quad, &default_error_quadrature())?;
    // sample densely in each layer as well as uniformly, so the plot shows them
    let mut exact_x: Vec<f64> = (0..EXACT_SAMPLES).map(|k| k as f64 / (EXACT_SAMPLES - 1) as f64).collect();
    exact_x.extend(cell.mesh.nodes().iter().copied());
    exact_x.sort_by(f64::total_cmp);
    exact_x.dedup();
    let exact_u = exact_x.iter().map(|&x| cell.ms.u(x)).collect();
    Ok(SolveView {
        nodes: cell.mesh.nodes().to_vec(),
        u_h: cell.u_h.values().to_vec(),
        exact_x,
        exact_u,
        e_energy: cell.e_energy,
        e_superclose: cell.e_superclose,
        galerkin_residual: cell.galerkin_residual,
    })
}

pub fn sweep_native(
    eps1: f64,
    eps2: f64,
    n_max: usize,
    tau: f64,
    p: f64,
    quad_points: usize,
) -> spp_core::Result<SweepView> {
    let mut ns = vec![16];
    while ns.last().unwrap() * 2 <= n_max {
        ns.push(ns.last().unwrap() * 2);
    }
    let mut cfg = StudyConfig::new(vec![eps1], vec![eps2], ns);
    cfg.tau = tau;
    cfg.p = p;
    cfg.quad = QuadratureRule::new(quad_points, 1)?;
    let table = run_study(&cfg)?;
    if let Some(row) = table.failures().next() {
        return Err(spp_core::Error::Internal(row.error.clone().unwrap_or_default()));
    }
    let rows = &table.rows;
    Ok(SweepView {
        n: rows.iter().map(|r| r.n as f64).collect(),
        e_energy: rows.iter().map(|r| r.e_energy).collect(),
        e_superclose: rows.iter().map(|r| r.e_superclose).collect(),
        p_energy: rows.iter().map(|r| r.p_energy.unwrap_or(f64::NAN)).collect(),
        p_superclose: rows.iter().map(|r| r.p_superclose.unwrap_or(f64::NAN)).collect(),
    })
}

fn js(e: spp_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = meshView)]
pub fn mesh_view(eps1: f64, eps2: f64, n: usize, tau: f64, p: f64) -> Result<MeshView, JsError> {
    mesh_view_native(eps1, eps2, n, tau, p).map_err(js)
}

#[wasm_bindgen]
pub fn solve(eps1: f64, eps2: f64, n: usize, tau: f64, p: f64, quad_points: usize) -> Result<SolveView, JsError> {
    solve_native(eps1, eps2, n, tau, p, quad_points).map_err(js)
}

#[wasm_bindgen]
pub fn sweep(eps1: f64, eps2: f64, n_max: usize, tau: f64, p: f64, quad_points: usize) -> Result<SweepView, JsError> {
    sweep_native(eps1, eps2, n_max, tau, p, quad_points).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_view_reports_layers() {
        let m = mesh_view_native(1e-8, 1e-4, 64, 2.0, 0.5).unwrap();
        assert_eq!(m.nodes.len(), 65);
        assert!(m.left_graded && m.right_graded);
        assert!((m.nodes[16] - m.sigma0).abs() < 1e-12);
    }

    #[test]
    fn solve_view_has_boundary_zeros_and_dense_samples() {
        let s = solve_native(1e-8, 1e-4, 32, 2.0, 0.5, 5).unwrap();
        assert_eq!(s.u_h.len(), 33);
        assert_eq!((s.u_h[0], s.u_h[32]), (0.0, 0.0));
        assert!(s.exact_x.windows(2).all(|w| w[0] < w[1]));
        assert!(s.exact_x.len() >= EXACT_SAMPLES);
        assert!(s.galerkin_residual < 1e-10);
    }

    #[test]
    fn sweep_rates() {
        let s = sweep_native(1e-8, 1e-4, 256, 2.5, 0.5, 1).unwrap();
        assert_eq!(s.n, vec![16.0, 32.0, 64.0, 128.0, 256.0]);
        assert!(s.p_energy[4].is_nan());
        assert!(s.p_energy[..4].iter().all(|r| r.is_finite()));
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(mesh_view_native(0.0, 1.0, 16, 2.0, 0.5).is_err());
        assert!(solve_native(1.0, 1.0, 15, 2.0, 0.5, 5).is_err());
    }
}
