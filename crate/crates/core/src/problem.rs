//! The continuous problem
//!
//! ```text
//! -eps1 u'' + eps2 b(x) u' + c(x) u = f(x)  on (0, 1),   u(0) = u(1) = 0,
//! ```
//!
//! its structural conditions and the decay rates of its two boundary layers.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Step of the central difference used for b' when no derivative is supplied.
pub const FD_STEP: f64 = 1e-6;

/// Sample count used for the coefficient extremization in [`characteristic_roots`].
pub const DEFAULT_ROOT_SAMPLES: usize = 1025;

/// A real function on [0, 1], optionally with its derivative.
#[derive(Clone)]
pub struct ScalarField {
    value: Func,
    derivative: Option<Func>,
    constant: Option<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.constant {
            Some(c) => write!(f, "ScalarField::constant({c})"),
            None => f
                .debug_struct("ScalarField")
                .field("analytic_derivative", &self.derivative.is_some())
                .finish(),
        }
    }
}

impl ScalarField {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
            constant: None,
        }
    }

    pub fn with_derivative(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Some(Arc::new(derivative)),
            constant: None,
        }
    }

    /// A constant field; flagged so that root finding can use the closed form.
    pub fn constant(c: f64) -> Self {
        Self {
            value: Arc::new(move |_| c),
            derivative: Some(Arc::new(|_| 0.0)),
            constant: Some(c),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Analytic derivative if supplied, otherwise a central difference with
    /// step [`FD_STEP`] (one-sided within one step of the endpoints).
    pub fn derivative(&self, x: f64) -> f64 {
        if let Some(d) = &self.derivative {
            return d(x);
        }
        let h = FD_STEP;
        if x - h < 0.0 {
            (self.eval(x + h) - self.eval(x)) / h
        } else if x + h > 1.0 {
            (self.eval(x) - self.eval(x - h)) / h
        } else {
            (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
        }
    }
}

/// Coefficients and lower bounds of the two-parameter problem.
#[derive(Debug, Clone)]
pub struct TwoParamBvp {
    pub eps1: f64,
    pub eps2: f64,
    pub b: ScalarField,
    pub c: ScalarField,
    pub f: ScalarField,
    /// Lower bound for b.
    pub lambda_lb: f64,
    /// Lower bound for c.
    pub beta_lb: f64,
    /// Lower bound for c - eps2 b' / 2.
    pub gamma_lb: f64,
}

impl TwoParamBvp {
    pub fn new(eps1: f64, eps2: f64, b: ScalarField, c: ScalarField, f: ScalarField) -> Result<Self> {
        check_eps(eps1, eps2)?;
        Ok(Self {
            eps1,
            eps2,
            b,
            c,
            f,
            lambda_lb: 1.0,
            beta_lb: 1.0,
            gamma_lb: 1.0,
        })
    }

    pub fn with_bounds(mut self, lambda_lb: f64, beta_lb: f64, gamma_lb: f64) -> Self {
        self.lambda_lb = lambda_lb;
        self.beta_lb = beta_lb;
        self.gamma_lb = gamma_lb;
        self
    }

    /// The test problem `-eps1 u'' + eps2 u' + u = cos(pi x)` with b = c = 1
    /// and all lower bounds equal to 1.
    pub fn model(eps1: f64, eps2: f64) -> Result<Self> {
        Self::new(
            eps1,
            eps2,
            ScalarField::constant(1.0),
            ScalarField::constant(1.0),
            ScalarField::with_derivative(|x| (PI * x).cos(), |x| -PI * (PI * x).sin()),
        )
    }

    /// Coercivity constant min(1, gamma).
    pub fn coercivity(&self) -> f64 {
        self.gamma_lb.min(1.0)
    }
}

fn check_eps(eps1: f64, eps2: f64) -> Result<()> {
    for (name, e) in [("eps1", eps1), ("eps2", eps2)] {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in (0, 1], got {e}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// b(x) >= lambda > 0
    ConvectionLowerBound,
    /// c(x) >= beta > 0
    ReactionLowerBound,
    /// c(x) - eps2 b'(x) / 2 >= gamma > 0
    Coercivity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::ConvectionLowerBound => "b >= lambda > 0",
            Condition::ReactionLowerBound => "c >= beta > 0",
            Condition::Coercivity => "c - eps2 b'/2 >= gamma > 0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub x: f64,
    /// Value of the checked expression at `x`.
    pub value: f64,
}

/// First violation of each structural condition, in sample order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn find(&self, condition: Condition) -> Option<&Violation> {
        self.violations.iter().find(|v| v.condition == condition)
    }
}

/// Checks the three structural inequalities at `x_k = k / (n_samples - 1)`.
pub fn validate_problem(p: &TwoParamBvp, n_samples: usize) -> Result<ValidationReport> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter("validation needs at least two samples".into()));
    }
    let mut report = ValidationReport::default();
    let mut seen = [false; 3];
    let mut record = |report: &mut ValidationReport, idx: usize, condition, x, value| {
        if !seen[idx] {
            seen[idx] = true;
            report.violations.push(Violation { condition, x, value });
        }
    };
    for k in 0..n_samples {
        let x = k as f64 / (n_samples - 1) as f64;
        let b = finite(p.b.eval(x), "b", x)?;
        let c = finite(p.c.eval(x), "c", x)?;
        let db = finite(p.b.derivative(x), "b'", x)?;
        if !(p.lambda_lb > 0.0 && b >= p.lambda_lb) {
            record(&mut report, 0, Condition::ConvectionLowerBound, x, b);
        }
        if !(p.beta_lb > 0.0 && c >= p.beta_lb) {
            record(&mut report, 1, Condition::ReactionLowerBound, x, c);
        }
        let g = c - 0.5 * p.eps2 * db;
        if !(p.gamma_lb > 0.0 && g >= p.gamma_lb) {
            record(&mut report, 2, Condition::Coercivity, x, g);
        }
    }
    Ok(report)
}

fn finite(v: f64, what: &'static str, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { what, x })
    }
}

/// Layer decay rates mu0 <= mu1 and where they are attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots {
    pub mu0: f64,
    pub mu1: f64,
    /// Point maximizing the negative root g0.
    pub argmax_x0: f64,
    /// Point minimizing the positive root g1.
    pub argmin_x1: f64,
}

/// Positive root of `-eps1 g^2 + eps2 b g + c = 0`; the negative one is
/// recovered as `-c / (eps1 g1)` so that nothing cancels as eps1 -> 0.
fn roots_at(eps1: f64, eps2: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let disc = (eps2 * b).mul_add(eps2 * b, 4.0 * eps1 * c);
    if !(disc > 0.0) || !disc.is_finite() {
        return Err(Error::Internal(format!(
            "characteristic discriminant {disc} is not positive"
        )));
    }
    let g1 = (eps2 * b + disc.sqrt()) / (2.0 * eps1);
    let g0 = -c / (eps1 * g1);
    Ok((g0, g1))
}

/// Closed-form roots for constant coefficients: `(mu0, mu1)`.
pub fn constant_coefficient_roots(eps1: f64, eps2: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let (g0, g1) = roots_at(eps1, eps2, b, c)?;
    Ok((-g0, g1))
}

/// `mu0 = -max g0(x)` and `mu1 = min g1(x)` over [0, 1].
///
/// Constant coefficients use the closed form. Otherwise the extremum is
/// located on `n_samples` equispaced points and polished by a golden-section
/// search on the two neighbouring sample intervals.
pub fn characteristic_roots(p: &TwoParamBvp, n_samples: usize) -> Result<CharacteristicRoots> {
    check_eps(p.eps1, p.eps2)?;
    if let (Some(b), Some(c)) = (p.b.as_constant(), p.c.as_constant()) {
        let (mu0, mu1) = constant_coefficient_roots(p.eps1, p.eps2, b, c)?;
        return Ok(CharacteristicRoots {
            mu0,
            mu1,
            argmax_x0: 0.0,
            argmin_x1: 0.0,
        });
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("root search needs at least two samples".into()));
    }
    let roots = |x: f64| -> Result<(f64, f64)> {
        let b = finite(p.b.eval(x), "b", x)?;
        let c = finite(p.c.eval(x), "c", x)?;
        roots_at(p.eps1, p.eps2, b, c)
    };
    let grid = |k: usize| k as f64 / (n_samples - 1) as f64;

    // mu0 = min over x of -g0(x); mu1 = min over x of g1(x).
    let mut best0 = (f64::INFINITY, 0usize);
    let mut best1 = (f64::INFINITY, 0usize);
    for k in 0..n_samples {
        let (g0, g1) = roots(grid(k))?;
        if -g0 < best0.0 {
            best0 = (-g0, k);
        }
        if g1 < best1.0 {
            best1 = (g1, k);
        }
    }
    let refine = |k: usize, which: usize| -> Result<(f64, f64)> {
        let lo = grid(k.saturating_sub(1));
        let hi = grid((k + 1).min(n_samples - 1));
        let objective = |x: f64| -> Result<f64> {
            let (g0, g1) = roots(x)?;
            Ok(if which == 0 { -g0 } else { g1 })
        };
        let (x, v) = golden_section_min(lo, hi, objective)?;
        let at_sample = objective(grid(k))?;
        Ok(if v < at_sample { (v, x) } else { (at_sample, grid(k)) })
    };
    let (mu0, argmax_x0) = refine(best0.1, 0)?;
    let (mu1, argmin_x1) = refine(best1.1, 1)?;
    Ok(CharacteristicRoots {
        mu0,
        mu1,
        argmax_x0,
        argmin_x1,
    })
}

fn golden_section_min(
    mut a: f64,
    mut b: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..80 {
        if (b - a).abs() <= 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}
