//! Bakhvalov-type layer-adapted meshes.
//!
//! The mesh has N/4 graded elements in each layer region, `[0, sigma0]` and
//! `[1 - sigma1, 1]`, and N/2 equal elements in between. Graded nodes follow
//!
//! ```text
//! x_i = tau / (p mu0) * phi0(i / N),      phi0(t) = -ln(1 - 4 (1 - 1/mu0) t)
//! x_i = 1 - tau / (p mu1) * phi1(i / N),  phi1(t) = -ln(1 - 4 (1 - 1/mu1) (1 - t))
//! ```
//!
//! A layer region whose decay rate is too small for the grading to make sense
//! (mu < N, or a transition point outside (0, 1/4]) is meshed uniformly
//! instead, keeping the N/4 + N/2 + N/4 layout.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    pub n: usize,
    pub tau: f64,
    pub p: f64,
}

impl MeshParams {
    pub fn new(n: usize, tau: f64, p: f64) -> Result<Self> {
        if n < 16 || !n.is_multiple_of(4) {
            return Err(Error::InvalidParameter(format!(
                "N must be at least 16 and divisible by 4, got {n}"
            )));
        }
        if !(tau >= 1.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be >= 1, got {tau}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Self { n, tau, p })
    }

    /// Scale factor tau / p shared by both generating functions.
    pub fn stretch(&self) -> f64 {
        self.tau / self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerMode {
    Graded,
    UniformFallback,
}

impl LayerMode {
    pub fn is_graded(self) -> bool {
        self == LayerMode::Graded
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerMode::Graded => "graded",
            LayerMode::UniformFallback => "uniform-fallback",
        }
    }
}

impl fmt::Display for LayerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionPoints {
    pub sigma0: f64,
    pub sigma1: f64,
    pub left_valid: bool,
    pub right_valid: bool,
}

fn raw_sigma(mu: f64, params: &MeshParams) -> f64 {
    params.stretch() / mu * mu.ln()
}

fn side_valid(mu: f64, sigma: f64, n: usize) -> bool {
    mu >= n as f64 && sigma > 0.0 && sigma <= 0.25
}

/// `sigma_j = tau / (p mu_j) ln mu_j`; a side is usable iff `mu_j >= N` and
/// `0 < sigma_j <= 1/4`. Unusable sides report `sigma_j = 1/4`.
pub fn transition_points(mu0: f64, mu1: f64, params: &MeshParams) -> TransitionPoints {
    let s0 = raw_sigma(mu0, params);
    let s1 = raw_sigma(mu1, params);
    let left_valid = side_valid(mu0, s0, params.n);
    let right_valid = side_valid(mu1, s1, params.n);
    TransitionPoints {
        sigma0: if left_valid { s0 } else { 0.25 },
        sigma1: if right_valid { s1 } else { 0.25 },
        left_valid,
        right_valid,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BakhvalovMesh {
    pub params: MeshParams,
    nodes: Arc<[f64]>,
    pub sigma0: f64,
    pub sigma1: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub left_mode: LayerMode,
    pub right_mode: LayerMode,
}

/// `phi0(t) = -ln(1 - 4 (1 - 1/mu) t)`; `phi1(t)` is `phi0(1 - t)` with mu1.
fn generating_fn(mu: f64, t: f64) -> f64 {
    -(-4.0 * (1.0 - 1.0 / mu) * t).ln_1p()
}

/// Builds the mesh for decay rates `mu0 <= mu1`.
pub fn build_mesh(mu0: f64, mu1: f64, params: &MeshParams) -> Result<BakhvalovMesh> {
    if !(mu0 > 0.0 && mu1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decay rates must be positive, got mu0 = {mu0}, mu1 = {mu1}"
        )));
    }
    let n = params.n;
    let q = n / 4;
    let tp = transition_points(mu0, mu1, params);
    let nf = n as f64;
    let t = |i: usize| i as f64 / nf;
    let mut x = vec![0.0; n + 1];

    for (i, xi) in x.iter_mut().enumerate().take(q + 1) {
        *xi = if tp.left_valid {
            params.stretch() / mu0 * generating_fn(mu0, t(i))
        } else {
            t(i)
        };
    }
    let width = 1.0 - tp.sigma0 - tp.sigma1;
    for (i, xi) in x.iter_mut().enumerate().take(3 * q).skip(q) {
        *xi = tp.sigma0 + 2.0 * (t(i) - 0.25) * width;
    }
    for (i, xi) in x.iter_mut().enumerate().skip(3 * q) {
        *xi = if tp.right_valid {
            1.0 - params.stretch() / mu1 * generating_fn(mu1, 1.0 - t(i))
        } else {
            t(i)
        };
    }
    x[0] = 0.0;
    x[q] = tp.sigma0;
    x[3 * q] = 1.0 - tp.sigma1;
    x[n] = 1.0;

    if let Some(index) = x.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneMesh { index: index + 1 });
    }

    Ok(BakhvalovMesh {
        params: *params,
        nodes: x.into(),
        sigma0: tp.sigma0,
        sigma1: tp.sigma1,
        mu0,
        mu1,
        left_mode: if tp.left_valid {
            LayerMode::Graded
        } else {
            LayerMode::UniformFallback
        },
        right_mode: if tp.right_valid {
            LayerMode::Graded
        } else {
            LayerMode::UniformFallback
        },
    })
}

impl BakhvalovMesh {
    /// A uniform mesh on [0, 1] with `n` elements (any `n >= 1`).
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("uniform mesh needs n >= 1".into()));
        }
        let nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        Ok(Self {
            params: MeshParams {
                n,
                tau: 1.0,
                p: 0.5,
            },
            nodes: nodes.into(),
            sigma0: 0.25,
            sigma1: 0.25,
            mu0: 1.0,
            mu1: 1.0,
            left_mode: LayerMode::UniformFallback,
            right_mode: LayerMode::UniformFallback,
        })
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn shared_nodes(&self) -> Arc<[f64]> {
        Arc::clone(&self.nodes)
    }

    /// Element size `h_i = x_{i+1} - x_i`.
    #[inline]
    pub fn h(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn steps(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn both_graded(&self) -> bool {
        self.left_mode.is_graded() && self.right_mode.is_graded()
    }

    /// Writes the plain-text dump: a field-name header, a value line, then
    /// `i<TAB>x_i<TAB>h_i[<TAB>extra_i]` per node with 17 significant
    /// digits. The last node has `h_N = 0`.
    pub fn write_dump<W: Write>(&self, out: &mut W, extra: Option<&[f64]>) -> io::Result<()> {
        let p = &self.params;
        writeln!(out, "# N tau p mu0 mu1 sigma0 sigma1 left_mode right_mode")?;
        writeln!(
            out,
            "# {} {} {} {} {} {} {} {} {}",
            p.n,
            fmt17(p.tau),
            fmt17(p.p),
            fmt17(self.mu0),
            fmt17(self.mu1),
            fmt17(self.sigma0),
            fmt17(self.sigma1),
            self.left_mode,
            self.right_mode
        )?;
        let n = self.n();
        for i in 0..=n {
            let h = if i < n { self.h(i) } else { 0.0 };
            write!(out, "{i}\t{}\t{}", fmt17(self.nodes[i]), fmt17(h))?;
            if let Some(extra) = extra {
                write!(out, "\t{}", fmt17(extra[i]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// 17 significant digits in scientific notation; parses back to the same f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// One inequality of the mesh-size lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketCheck {
    pub name: &'static str,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl BracketCheck {
    pub fn holds(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

/// Quantities of one graded layer region, measured in the orientation of the
/// left layer (index 0 is the element touching the boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDiagnostics {
    /// Element sizes non-decreasing away from the boundary over the first
    /// N/4 - 1 elements.
    pub monotone: bool,
    pub brackets: Vec<BracketCheck>,
    /// `max_i (mu N h_i)^{3/2} exp(-p mu d_i)` over i <= N/4 - 2.
    pub scaled_product_m32: f64,
    /// Same with exponent 5/2.
    pub scaled_product_m52: f64,
    /// `T_i = (h_{i+1} - h_i) exp(-p mu d_{i+1})`, i = 0..=N/4-3.
    pub t_values: Vec<f64>,
    pub t_max: f64,
    pub t_argmax: usize,
    /// `t_argmax` is 0 or N/4 - 3.
    pub t_max_at_endpoint: bool,
    /// `mu N^2 max T_i`.
    pub t_max_scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SideReport {
    Graded(LayerDiagnostics),
    Skipped { notice: String },
}

impl SideReport {
    pub fn graded(&self) -> Option<&LayerDiagnostics> {
        match self {
            SideReport::Graded(d) => Some(d),
            SideReport::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDiagnostics {
    pub left: SideReport,
    pub right: SideReport,
    /// `N^{-1} <= h_i <= 2 N^{-1}` on the central region; empty unless both
    /// sides are graded.
    pub central: Vec<BracketCheck>,
    /// Largest relative spread of the central element sizes.
    pub central_spread: f64,
}

impl MeshDiagnostics {
    pub fn all_brackets_hold(&self) -> bool {
        let side_ok = |s: &SideReport| match s {
            SideReport::Graded(d) => d.monotone && d.brackets.iter().all(BracketCheck::holds),
            SideReport::Skipped { .. } => true,
        };
        side_ok(&self.left)
            && side_ok(&self.right)
            && self.central.iter().all(BracketCheck::holds)
    }
}

/// Numerical checks of the mesh-size, layer-product and T_i lemmas.
pub fn mesh_diagnostics(mesh: &BakhvalovMesh) -> MeshDiagnostics {
    let n = mesh.n();
    let h = mesh.steps();
    let x = mesh.nodes();

    let left = if mesh.left_mode.is_graded() {
        // distance to the boundary at node i is x_i.
        let d: Vec<f64> = x.to_vec();
        SideReport::Graded(layer_diagnostics(&h, &d, mesh.mu0, &mesh.params, "left"))
    } else {
        SideReport::Skipped {
            notice: "left layer meshed uniformly; diagnostics skipped".into(),
        }
    };
    let right = if mesh.right_mode.is_graded() {
        let hr: Vec<f64> = h.iter().rev().copied().collect();
        let dr: Vec<f64> = x.iter().rev().map(|&xi| 1.0 - xi).collect();
        SideReport::Graded(layer_diagnostics(&hr, &dr, mesh.mu1, &mesh.params, "right"))
    } else {
        SideReport::Skipped {
            notice: "right layer meshed uniformly; diagnostics skipped".into(),
        }
    };

    let central_h = &h[n / 4..3 * n / 4];
    let (hmin, hmax) = central_h
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let central_spread = (hmax - hmin) / hmax;
    let nf = n as f64;
    let central = if mesh.both_graded() {
        vec![
            BracketCheck {
                name: "1/N <= min h_i (central)",
                lower: 1.0 / nf,
                value: hmin,
                upper: 2.0 / nf,
            },
            BracketCheck {
                name: "max h_i <= 2/N (central)",
                lower: 1.0 / nf,
                value: hmax,
                upper: 2.0 / nf,
            },
        ]
    } else {
        Vec::new()
    };

    MeshDiagnostics {
        left,
        right,
        central,
        central_spread,
    }
}

/// `h[i]` are sizes ordered from the boundary inwards, `d[i]` the distance of
/// node i to the boundary.
fn layer_diagnostics(h: &[f64], d: &[f64], mu: f64, params: &MeshParams, side: &str) -> LayerDiagnostics {
    let n = params.n;
    let q = n / 4;
    let nf = n as f64;
    let s = params.stretch();
    let p = params.p;

    let monotone = h[..q - 1].windows(2).all(|w| w[0] <= w[1]);
    let brackets = vec![
        BracketCheck {
            name: if side == "left" {
                "tau/(4p) mu0^-1 <= h_{N/4-2} <= tau/p mu0^-1"
            } else {
                "tau/(4p) mu1^-1 <= h_{3N/4+1} <= tau/p mu1^-1"
            },
            lower: s / 4.0 / mu,
            value: h[q - 2],
            upper: s / mu,
        },
        BracketCheck {
            name: if side == "left" {
                "tau/(2p) mu0^-1 <= h_{N/4-1} <= 4 tau/p N^-1"
            } else {
                "tau/(2p) mu1^-1 <= h_{3N/4} <= 4 tau/p N^-1"
            },
            lower: s / 2.0 / mu,
            value: h[q - 1],
            upper: 4.0 * s / nf,
        },
    ];

    let product = |m: f64| {
        (0..=q - 2)
            .map(|i| (mu * nf * h[i]).powf(m) * (-p * mu * d[i]).exp())
            .fold(0.0f64, f64::max)
    };
    let scaled_product_m32 = product(1.5);
    let scaled_product_m52 = product(2.5);

    let t_values: Vec<f64> = (0..=q - 3)
        .map(|i| (h[i + 1] - h[i]) * (-p * mu * d[i + 1]).exp())
        .collect();
    let (t_argmax, t_max) = t_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    LayerDiagnostics {
        monotone,
        brackets,
        scaled_product_m32,
        scaled_product_m52,
        t_max_at_endpoint: t_argmax == 0 || t_argmax == q - 3,
        t_max_scaled: mu * nf * nf * t_max,
        t_values,
        t_max,
        t_argmax,
    }
}
