//! Closed-form solution of the model problem
//! `-eps1 u'' + eps2 u' + u = cos(pi x)`, `u(0) = u(1) = 0`, split into a
//! smooth part and the two boundary layers.

use std::f64::consts::PI;

use crate::error::Result;
use crate::problem::constant_coefficient_roots;

/// Exponential arguments below this evaluate to exactly zero.
pub const EXP_CLAMP: f64 = -700.0;

/// `exp(arg)`, flushed to zero for `arg < EXP_CLAMP`.
#[inline]
pub fn clamped_exp(arg: f64) -> f64 {
    if arg < EXP_CLAMP {
        0.0
    } else {
        arg.exp()
    }
}

/// Something with a value and a first derivative on [0, 1].
pub trait ExactSolution {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// A pair of closures `(g, g')`.
pub struct Analytic<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<F, G> Analytic<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    pub fn new(value: F, derivative: G) -> Self {
        Self { value, derivative }
    }
}

impl<F, G> ExactSolution for Analytic<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }
}

/// `u = a cos(pi x) + b sin(pi x) + A exp(-mu0 x) + B exp(-mu1 (1 - x))`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub eps1: f64,
    pub eps2: f64,
    pub a: f64,
    pub b_coef: f64,
    pub A: f64,
    pub B: f64,
    pub mu0: f64,
    pub mu1: f64,
}

impl ManufacturedSolution {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let (mu0, mu1) = constant_coefficient_roots(eps1, eps2, 1.0, 1.0)?;
        let k = eps1 * PI * PI + 1.0;
        let den = eps2 * eps2 * PI * PI + k * k;
        let a = k / den;
        let b_coef = eps2 * PI / den;
        let q = 1.0 - clamped_exp(-mu0 - mu1);
        #[allow(non_snake_case)]
        let A = -a * (1.0 + clamped_exp(-mu1)) / q;
        #[allow(non_snake_case)]
        let B = a * (1.0 + clamped_exp(-mu0)) / q;
        Ok(Self {
            eps1,
            eps2,
            a,
            b_coef,
            A,
            B,
            mu0,
            mu1,
        })
    }

    /// Smooth part `S = a cos(pi x) + b sin(pi x)`.
    pub fn smooth(&self, x: f64) -> f64 {
        self.a * (PI * x).cos() + self.b_coef * (PI * x).sin()
    }

    pub fn smooth_d1(&self, x: f64) -> f64 {
        PI * (self.b_coef * (PI * x).cos() - self.a * (PI * x).sin())
    }

    pub fn smooth_d2(&self, x: f64) -> f64 {
        -PI * PI * self.smooth(x)
    }

    /// Layer at x = 0: `E0 = A exp(-mu0 x)`.
    pub fn layer0(&self, x: f64) -> f64 {
        self.A * clamped_exp(-self.mu0 * x)
    }

    pub fn layer0_d1(&self, x: f64) -> f64 {
        -self.mu0 * self.layer0(x)
    }

    pub fn layer0_d2(&self, x: f64) -> f64 {
        self.mu0 * self.mu0 * self.layer0(x)
    }

    /// Layer at x = 1: `E1 = B exp(-mu1 (1 - x))`.
    pub fn layer1(&self, x: f64) -> f64 {
        self.B * clamped_exp(-self.mu1 * (1.0 - x))
    }

    pub fn layer1_d1(&self, x: f64) -> f64 {
        self.mu1 * self.layer1(x)
    }

    pub fn layer1_d2(&self, x: f64) -> f64 {
        self.mu1 * self.mu1 * self.layer1(x)
    }

    pub fn u(&self, x: f64) -> f64 {
        self.smooth(x) + self.layer0(x) + self.layer1(x)
    }

    pub fn du(&self, x: f64) -> f64 {
        self.smooth_d1(x) + self.layer0_d1(x) + self.layer1_d1(x)
    }

    pub fn d2u(&self, x: f64) -> f64 {
        self.smooth_d2(x) + self.layer0_d2(x) + self.layer1_d2(x)
    }

    /// Right-hand side of the model problem.
    pub fn rhs(&self, x: f64) -> f64 {
        (PI * x).cos()
    }

    /// `-eps1 u'' + eps2 u' + u - f` evaluated term by term.
    pub fn ode_residual(&self, x: f64) -> f64 {
        -self.eps1 * self.d2u(x) + self.eps2 * self.du(x) + self.u(x) - self.rhs(x)
    }

    /// The smooth part as an [`ExactSolution`].
    pub fn smooth_part(&self) -> impl ExactSolution + '_ {
        Analytic::new(|x| self.smooth(x), |x| self.smooth_d1(x))
    }

    pub fn layer0_part(&self) -> impl ExactSolution + '_ {
        Analytic::new(|x| self.layer0(x), |x| self.layer0_d1(x))
    }

    pub fn layer1_part(&self) -> impl ExactSolution + '_ {
        Analytic::new(|x| self.layer1(x), |x| self.layer1_d1(x))
    }
}

impl ExactSolution for ManufacturedSolution {
    fn value(&self, x: f64) -> f64 {
        self.u(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.du(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values_vanish() {
        for &(e1, e2) in &[(1.0, 1.0), (1e-2, 1.0), (1e-8, 1e-4), (1e-10, 1e-8), (1.0, 1e-8)] {
            let ms = ManufacturedSolution::new(e1, e2).unwrap();
            assert!(ms.u(0.0).abs() <= 1e-12, "u(0) = {}", ms.u(0.0));
            assert!(ms.u(1.0).abs() <= 1e-12, "u(1) = {}", ms.u(1.0));
            // u(0) = a + A + B exp(-mu1)
            let u0 = ms.a + ms.A + ms.B * clamped_exp(-ms.mu1);
            assert!(u0.abs() <= 1e-12);
        }
    }

    #[test]
    fn decomposition_sums_to_u() {
        let ms = ManufacturedSolution::new(1e-6, 1e-4).unwrap();
        for k in 0..=200 {
            let x = k as f64 / 200.0;
            let parts = ms.smooth(x) + ms.layer0(x) + ms.layer1(x);
            let u = ms.u(x);
            assert!((parts - u).abs() <= 1e-14 * u.abs().max(1e-300));
        }
    }

    #[test]
    fn clamp_gives_exact_zero_far_from_the_layer() {
        let ms = ManufacturedSolution::new(1e-10, 1.0).unwrap();
        assert_eq!(ms.layer1(0.5), 0.0);
        assert_eq!(ms.layer1_d1(0.5), 0.0);
        assert!(ms.u(0.5).is_finite() && ms.du(0.9).is_finite());
        assert_eq!(clamped_exp(-700.5), 0.0);
        assert!(clamped_exp(-699.0) > 0.0);
    }

    #[test]
    fn unit_parameters_coefficient_a() {
        let ms = ManufacturedSolution::new(1.0, 1.0).unwrap();
        let k = PI * PI + 1.0;
        assert!((ms.a - k / (PI * PI + k * k)).abs() < 1e-16);
        assert!((ms.a - 0.084_906_907_872_382_08).abs() < 1e-15);
    }
}
