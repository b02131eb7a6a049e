//! Parameter sweeps over (eps1, eps2, N) for the model problem.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fem::{assemble, solve_tridiagonal, PiecewiseLinear};
use crate::interpolation::pi_interpolate;
use crate::manufactured::ManufacturedSolution;
use crate::mesh::{build_mesh, fmt17, BakhvalovMesh, LayerMode, MeshParams};
use crate::metrics::{
    convergence_rate, default_error_quadrature, energy_error_continuous, energy_norm_discrete_diff,
};
use crate::problem::{characteristic_roots, validate_problem, TwoParamBvp, DEFAULT_ROOT_SAMPLES};
use crate::quadrature::QuadratureRule;

pub const CSV_HEADER: &str = "eps1,eps2,N,tau,p,mu0,mu1,left_mode,right_mode,e_energy,p_energy,\
e_superclose,p_superclose,e_l2,e_h1w,pe1_energy,quad_delta";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub eps1_list: Vec<f64>,
    pub eps2_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub tau: f64,
    pub p: f64,
    /// Assembly quadrature.
    pub quad: QuadratureRule,
    /// Quadrature for continuous error norms.
    pub error_quad: QuadratureRule,
    /// Require N to double from row to row so rates are defined.
    pub rates: bool,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            eps1_list: Vec::new(),
            eps2_list: Vec::new(),
            n_list: Vec::new(),
            tau: 2.0,
            p: 0.5,
            quad: QuadratureRule::default(),
            error_quad: default_error_quadrature(),
            rates: true,
            jobs: None,
        }
    }
}

/// N = 16, 32, ..., 4096.
pub fn standard_n_list() -> Vec<usize> {
    (4..=12).map(|k| 1usize << k).collect()
}

/// eps1 = 1, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10.
pub fn standard_eps1_list() -> Vec<f64> {
    vec![1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10]
}

impl StudyConfig {
    pub fn new(eps1_list: Vec<f64>, eps2_list: Vec<f64>, n_list: Vec<usize>) -> Self {
        Self {
            eps1_list,
            eps2_list,
            n_list,
            ..Self::default()
        }
    }

    /// Settings that reproduce the printed tables: tau/p = 5 and one-point
    /// assembly quadrature.
    pub fn reproduction_profile(mut self) -> Self {
        self.tau = 2.5;
        self.p = 0.5;
        self.quad = QuadratureRule::midpoint();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps1_list.is_empty() || self.eps2_list.is_empty() || self.n_list.is_empty() {
            return Err(Error::Config("eps1, eps2 and N lists must be non-empty".into()));
        }
        for &e in self.eps1_list.iter().chain(&self.eps2_list) {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::Config(format!("eps values must lie in (0, 1], got {e}")));
            }
        }
        for &n in &self.n_list {
            MeshParams::new(n, self.tau, self.p).map_err(|e| Error::Config(e.to_string()))?;
        }
        for w in self.n_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("N list must be strictly increasing".into()));
            }
            if self.rates && w[1] != 2 * w[0] {
                return Err(Error::Config(format!(
                    "rates need successive N to double, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything measured for one discrete solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSolution {
    pub problem_eps: (f64, f64),
    pub ms: ManufacturedSolution,
    pub mesh: BakhvalovMesh,
    pub u_h: PiecewiseLinear,
    pub u_i: PiecewiseLinear,
    pub solve_residual: f64,
    pub galerkin_residual: f64,
    pub e_energy: f64,
    pub e_l2: f64,
    pub e_h1w: f64,
    pub quad_delta: f64,
    pub quad_reliable: bool,
    pub e_superclose: f64,
    /// `||u - u^I||_E`.
    pub e_interp: f64,
    pub pe1_energy: f64,
}

/// Runs the whole pipeline for the model problem at one grid point.
pub fn solve_cell(
    eps1: f64,
    eps2: f64,
    params: &MeshParams,
    quad: &QuadratureRule,
    error_quad: &QuadratureRule,
) -> Result<CellSolution> {
    let problem = TwoParamBvp::model(eps1, eps2)?;
    let report = validate_problem(&problem, 101)?;
    if let Some(v) = report.first() {
        return Err(Error::InvalidParameter(format!(
            "{:?} violated at x = {} (value {})",
            v.condition, v.x, v.value
        )));
    }
    let roots = characteristic_roots(&problem, DEFAULT_ROOT_SAMPLES)?;
    let ms = ManufacturedSolution::new(eps1, eps2)?;
    let mesh = build_mesh(roots.mu0, roots.mu1, params)?;
    let sys = assemble(&problem, &mesh, quad)?;
    let sol = solve_tridiagonal(&sys)?;
    let n = mesh.n();
    let galerkin_residual = sys.scaled_residual(&sol.u.values()[1..n]);
    let bundle = pi_interpolate(&ms, &mesh)?;
    let cont = energy_error_continuous(&ms, &sol.u, eps1, error_quad)?;
    let interp = energy_error_continuous(&ms, &bundle.u_i, eps1, error_quad)?;
    let e_superclose = energy_norm_discrete_diff(&bundle.u_i, &sol.u, eps1)?;
    Ok(CellSolution {
        problem_eps: (eps1, eps2),
        ms,
        mesh,
        solve_residual: sol.residual,
        galerkin_residual,
        e_energy: cont.energy,
        e_l2: cont.l2,
        e_h1w: cont.h1w,
        quad_delta: cont.quad_delta.max(interp.quad_delta),
        quad_reliable: cont.reliable && interp.reliable,
        e_superclose,
        e_interp: interp.energy,
        pe1_energy: bundle.pe1_energy,
        u_h: sol.u,
        u_i: bundle.u_i,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub eps1: f64,
    pub eps2: f64,
    pub n: usize,
    pub tau: f64,
    pub p: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub left_mode: LayerMode,
    pub right_mode: LayerMode,
    pub e_energy: f64,
    pub p_energy: Option<f64>,
    pub e_superclose: f64,
    pub p_superclose: Option<f64>,
    pub e_l2: f64,
    pub e_h1w: f64,
    pub pe1_energy: f64,
    pub quad_delta: f64,
    pub quad_reliable: bool,
    pub solve_residual: f64,
    pub galerkin_residual: f64,
    /// `||u - u^I||_E`.
    pub e_interp: f64,
    /// `eps2^{1/2} N^{-2} ln^{1/2} N`, recorded next to `e_superclose`.
    pub ln_factor: f64,
    /// Failure message for cells that could not be computed.
    pub error: Option<String>,
    /// The failure was numerical rather than a bad input.
    pub numerical_failure: bool,
}

impl TableRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn both_graded(&self) -> bool {
        self.left_mode.is_graded() && self.right_mode.is_graded()
    }

    fn failed(eps1: f64, eps2: f64, n: usize, tau: f64, p: f64, err: &Error) -> Self {
        Self {
            eps1,
            eps2,
            n,
            tau,
            p,
            mu0: f64::NAN,
            mu1: f64::NAN,
            left_mode: LayerMode::UniformFallback,
            right_mode: LayerMode::UniformFallback,
            e_energy: f64::NAN,
            p_energy: None,
            e_superclose: f64::NAN,
            p_superclose: None,
            e_l2: f64::NAN,
            e_h1w: f64::NAN,
            pe1_energy: f64::NAN,
            quad_delta: f64::NAN,
            quad_reliable: false,
            solve_residual: f64::NAN,
            galerkin_residual: f64::NAN,
            e_interp: f64::NAN,
            ln_factor: ln_factor(eps2, n),
            error: Some(err.to_string()),
            numerical_failure: err.is_numerical(),
        }
    }

    fn from_cell(c: &CellSolution) -> Self {
        let m = &c.mesh;
        let (eps1, eps2) = c.problem_eps;
        Self {
            eps1,
            eps2,
            n: m.n(),
            tau: m.params.tau,
            p: m.params.p,
            mu0: m.mu0,
            mu1: m.mu1,
            left_mode: m.left_mode,
            right_mode: m.right_mode,
            e_energy: c.e_energy,
            p_energy: None,
            e_superclose: c.e_superclose,
            p_superclose: None,
            e_l2: c.e_l2,
            e_h1w: c.e_h1w,
            pe1_energy: c.pe1_energy,
            quad_delta: c.quad_delta,
            quad_reliable: c.quad_reliable,
            solve_residual: c.solve_residual,
            galerkin_residual: c.galerkin_residual,
            e_interp: c.e_interp,
            ln_factor: ln_factor(eps2, m.n()),
            error: None,
            numerical_failure: false,
        }
    }
}

pub fn ln_factor(eps2: f64, n: usize) -> f64 {
    let nf = n as f64;
    eps2.sqrt() * nf.ln().sqrt() / (nf * nf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub config: StudyConfig,
    /// Sorted by (eps1, eps2, N).
    pub rows: Vec<TableRow>,
}

impl ConvergenceTable {
    pub fn get(&self, eps1: f64, eps2: f64, n: usize) -> Option<&TableRow> {
        self.rows
            .iter()
            .find(|r| r.eps1 == eps1 && r.eps2 == eps2 && r.n == n)
    }

    /// Rows of one (eps1, eps2) column in increasing N.
    pub fn column(&self, eps1: f64, eps2: f64) -> Vec<&TableRow> {
        self.rows
            .iter()
            .filter(|r| r.eps1 == eps1 && r.eps2 == eps2)
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.iter().filter(|r| !r.is_ok())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(256 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let rate = |r: Option<f64>| r.map(fmt17).unwrap_or_default();
        let val = |v: f64| if v.is_nan() { String::new() } else { fmt17(v) };
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt17(r.eps1),
                fmt17(r.eps2),
                r.n,
                fmt17(r.tau),
                fmt17(r.p),
                val(r.mu0),
                val(r.mu1),
                r.left_mode,
                r.right_mode,
                val(r.e_energy),
                rate(r.p_energy),
                val(r.e_superclose),
                rate(r.p_superclose),
                val(r.e_l2),
                val(r.e_h1w),
                val(r.pe1_energy),
                val(r.quad_delta),
            );
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let rate = |r: Option<f64>| r.map(|v| format!("{v:.2}")).unwrap_or_else(|| "---".into());
        let _ = writeln!(
            out,
            "| eps1 | eps2 | N | mode | e^N | p^N | e^N_I | p^N_I | quad_delta |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|");
        for r in &self.rows {
            if let Some(err) = &r.error {
                let _ = writeln!(out, "| {:e} | {:e} | {} | failed: {err} | | | | | |", r.eps1, r.eps2, r.n);
                continue;
            }
            let _ = writeln!(
                out,
                "| {:e} | {:e} | {} | {}/{} | {:.3e} | {} | {:.3e} | {} | {:.1e} |",
                r.eps1,
                r.eps2,
                r.n,
                r.left_mode,
                r.right_mode,
                r.e_energy,
                rate(r.p_energy),
                r.e_superclose,
                rate(r.p_superclose),
                r.quad_delta
            );
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Markdown => self.to_markdown(),
        }
    }
}

fn key_cmp(a: &(f64, f64, usize), b: &(f64, f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0)
        .then(a.1.total_cmp(&b.1))
        .then(a.2.cmp(&b.2))
}

fn run_cell(cfg: &StudyConfig, (eps1, eps2, n): (f64, f64, usize)) -> TableRow {
    let result = MeshParams::new(n, cfg.tau, cfg.p)
        .and_then(|params| solve_cell(eps1, eps2, &params, &cfg.quad, &cfg.error_quad));
    match result {
        Ok(c) => TableRow::from_cell(&c),
        Err(e) => TableRow::failed(eps1, eps2, n, cfg.tau, cfg.p, &e),
    }
}

#[cfg(feature = "parallel")]
fn run_cells(cfg: &StudyConfig, keys: &[(f64, f64, usize)]) -> Result<Vec<TableRow>> {
    use rayon::prelude::*;
    let work = || keys.par_iter().map(|&k| run_cell(cfg, k)).collect();
    match cfg.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_cells(cfg: &StudyConfig, keys: &[(f64, f64, usize)]) -> Result<Vec<TableRow>> {
    Ok(keys.iter().map(|&k| run_cell(cfg, k)).collect())
}

/// Solves every grid point. Per-cell failures are recorded in the row; only
/// configuration errors abort the sweep.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let mut keys: Vec<(f64, f64, usize)> = Vec::new();
    for &e1 in &cfg.eps1_list {
        for &e2 in &cfg.eps2_list {
            for &n in &cfg.n_list {
                keys.push((e1, e2, n));
            }
        }
    }
    keys.sort_by(key_cmp);
    keys.dedup();
    let mut rows = run_cells(cfg, &keys)?;
    fill_rates(&mut rows);
    Ok(ConvergenceTable {
        config: cfg.clone(),
        rows,
    })
}

/// Row N gets the rate between N and 2N; the last row of a column gets none.
fn fill_rates(rows: &mut [TableRow]) {
    for i in 0..rows.len().saturating_sub(1) {
        let (a, b) = (&rows[i], &rows[i + 1]);
        if a.eps1 != b.eps1 || a.eps2 != b.eps2 || b.n != 2 * a.n || !a.is_ok() || !b.is_ok() {
            continue;
        }
        let pe = convergence_rate(a.e_energy, b.e_energy).ok();
        let ps = convergence_rate(a.e_superclose, b.e_superclose).ok();
        rows[i].p_energy = pe;
        rows[i].p_superclose = ps;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = StudyConfig::new(vec![1e-8], vec![1e-4], vec![16, 32]);
        assert!(ok.validate().is_ok());
        assert!(StudyConfig::new(vec![1e-8], vec![1e-4], vec![]).validate().is_err());
        assert!(StudyConfig::new(vec![], vec![1e-4], vec![16]).validate().is_err());
        assert!(StudyConfig::new(vec![1e-8], vec![1e-4], vec![32, 16]).validate().is_err());
        assert!(StudyConfig::new(vec![1e-8], vec![1e-4], vec![16, 48]).validate().is_err());
        assert!(StudyConfig::new(vec![2.0], vec![1e-4], vec![16]).validate().is_err());
        assert!(StudyConfig::new(vec![1e-8], vec![1e-4], vec![18]).validate().is_err());
        let mut no_rates = StudyConfig::new(vec![1e-8], vec![1e-4], vec![16, 48]);
        no_rates.rates = false;
        assert!(no_rates.validate().is_ok());
    }

    #[test]
    fn csv_has_exact_header_and_empty_last_rate() {
        let cfg = StudyConfig::new(vec![1e-8], vec![1e-4], vec![16, 32]);
        let csv = run_study(&cfg).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        let last: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(last.len(), 17);
        assert_eq!(last[10], "");
        assert_eq!(last[12], "");
        let first: Vec<&str> = lines[1].split(',').collect();
        assert!(first[10].parse::<f64>().is_ok());
    }

    #[test]
    fn rows_are_sorted() {
        let cfg = StudyConfig::new(vec![1e-2, 1e-8], vec![1e-4, 1e-8], vec![16, 32]);
        let t = run_study(&cfg).unwrap();
        let keys: Vec<_> = t.rows.iter().map(|r| (r.eps1, r.eps2, r.n)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(key_cmp);
        assert_eq!(keys, sorted);
        assert_eq!(t.rows.len(), 8);
    }

    #[test]
    fn ln_factor_value() {
        let v = ln_factor(1e-4, 16);
        assert!((v - 1e-2 * 16f64.ln().sqrt() / 256.0).abs() < 1e-18);
    }
}
