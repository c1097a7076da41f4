//! Spacetime Clifford algebra with complex coefficients.
//!
//! Generators obey `γᵢγⱼ + γⱼγᵢ = 2gᵢⱼ` for a diagonal metric `g`. Blades are
//! addressed by bitmask: bit `i` set means `γᵢ` is a factor, factors kept in
//! increasing index order. Indices are 0-based, `γ₀` is the time direction.
//!
//! The hypercomplex units realize the polymomentum and volume-element
//! operators `p̂ⁱ = κγⁱγ` and `ω̂ⱼ = κ⁻¹γγⱼ`, where `γ` is the normalized top
//! blade (see [`gamma_top`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported spacetime dimension (dense storage of `2ⁿ` blades).
pub const MAX_DIM: usize = 6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Diagonal metric `g = diag(±1, …)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Metric {
    diag: Vec<i8>,
}

impl Metric {
    pub fn new(diag: Vec<i8>) -> Result<Self> {
        if diag.is_empty() || diag.len() > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "metric dimension must be in 1..={MAX_DIM}, got {}",
                diag.len()
            )));
        }
        if let Some(bad) = diag.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "metric entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self { diag })
    }

    /// `diag(+1, −1, …, −1)`.
    pub fn minkowski(n: usize) -> Result<Self> {
        let mut diag = vec![-1; n];
        if let Some(first) = diag.first_mut() {
            *first = 1;
        }
        Self::new(diag)
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[i8] {
        &self.diag
    }

    /// `gᵢᵢ`; for a diagonal ±1 metric this also equals `gⁱⁱ`.
    pub fn g(&self, i: usize) -> f64 {
        f64::from(self.diag[i])
    }

    /// Sign of the determinant.
    pub fn sigma(&self) -> i8 {
        self.diag.iter().product()
    }

    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }
}

/// Sign picked up when the blade product `a·b` is brought to increasing order.
fn reorder_sign(a: usize, b: usize) -> i32 {
    let mut a = a >> 1;
    let mut swaps = 0;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Integer sign of the product of two basis blades, including the metric
/// factors of repeated generators. The product blade is `a ^ b`.
pub fn blade_product_sign(metric: &Metric, a: usize, b: usize) -> i32 {
    let mut sign = reorder_sign(a, b);
    let mut common = a & b;
    while common != 0 {
        let i = common.trailing_zeros() as usize;
        sign *= i32::from(metric.diag[i]);
        common &= common - 1;
    }
    sign
}

pub fn grade(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// An element of the complexified Clifford algebra of a [`Metric`].
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    metric: Metric,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(metric: &Metric) -> Self {
        Self {
            metric: metric.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); metric.blade_count()],
        }
    }

    pub fn scalar(metric: &Metric, value: Complex64) -> Self {
        let mut mv = Self::zero(metric);
        mv.coeffs[0] = value;
        mv
    }

    pub fn one(metric: &Metric) -> Self {
        Self::scalar(metric, Complex64::new(1.0, 0.0))
    }

    pub fn blade(metric: &Metric, blade: usize, value: Complex64) -> Self {
        let mut mv = Self::zero(metric);
        mv.coeffs[blade] = value;
        mv
    }

    /// Lower-index generator `γᵢ`.
    pub fn generator(metric: &Metric, i: usize) -> Self {
        Self::blade(metric, 1 << i, Complex64::new(1.0, 0.0))
    }

    /// Upper-index generator `γⁱ = gⁱⁱγᵢ`.
    pub fn generator_upper(metric: &Metric, i: usize) -> Self {
        Self::blade(metric, 1 << i, Complex64::new(metric.g(i), 0.0))
    }

    /// Vector `Σ vᵢγⁱ` from lower-index components.
    pub fn vector_lower(metric: &Metric, components: &[Complex64]) -> Self {
        let mut mv = Self::zero(metric);
        for (i, c) in components.iter().enumerate() {
            mv.coeffs[1 << i] = c * metric.g(i);
        }
        mv
    }

    pub fn from_coeffs(metric: &Metric, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != metric.blade_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                metric.blade_count(),
                coeffs.len()
            )));
        }
        Ok(Self {
            metric: metric.clone(),
            coeffs,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> Complex64 {
        self.coeffs[blade]
    }

    pub fn set_coeff(&mut self, blade: usize, value: Complex64) {
        self.coeffs[blade] = value;
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Coefficient of `γᵢ` (lower-index basis).
    pub fn vector_coeff(&self, i: usize) -> Complex64 {
        self.coeffs[1 << i]
    }

    pub fn grade_part(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.metric);
        for (b, c) in self.coeffs.iter().enumerate() {
            if grade(b) == k {
                out.coeffs[b] = *c;
            }
        }
        out
    }

    /// Largest grade carrying a coefficient with modulus above `tol`.
    pub fn max_grade(&self, tol: f64) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(b, _)| grade(b))
            .max()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            metric: self.metric.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli; submultiplicative under the geometric product.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn max_deviation(&self, other: &Self) -> Result<f64> {
        self.check_metric(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_metric(&self, other: &Self) -> Result<()> {
        if self.metric == other.metric {
            Ok(())
        } else {
            Err(Error::MetricMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_metric(other)?;
        Ok(Self {
            metric: self.metric.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// The geometric product.
    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        self.check_metric(other)?;
        let mut out = Self::zero(&self.metric);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.re == 0.0 && ca.im == 0.0 {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.re == 0.0 && cb.im == 0.0 {
                    continue;
                }
                let sign = f64::from(blade_product_sign(&self.metric, a, b));
                out.coeffs[a ^ b] += ca * cb * sign;
            }
        }
        Ok(out)
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.geometric_product(other)?
            .try_sub(&other.geometric_product(self)?)
    }

    /// `ab + ba`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.geometric_product(other)?
            .try_add(&other.geometric_product(self)?)
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale_real(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        -&self
    }
}

/// Panics when the operands carry different metrics; use
/// [`Multivector::try_add`] for a fallible version.
impl Add for &Multivector {
    type Output = Multivector;

    fn add(self, rhs: &Multivector) -> Multivector {
        self.try_add(rhs).expect("metric mismatch in multivector sum")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &Multivector) -> Multivector {
        self.try_sub(rhs).expect("metric mismatch in multivector difference")
    }
}

/// Geometric product. Panics on metric mismatch; see
/// [`Multivector::geometric_product`].
impl Mul for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
            .expect("metric mismatch in geometric product")
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for i in 0..self.metric.dim() {
                if b & (1 << i) != 0 {
                    write!(f, "γ{i}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `γ := i^{n(n−1)/2} σ^{1/2} γ₀γ₁…γₙ₋₁`, normalized so that `γ² = 1`.
/// `σ^{1/2}` is taken as `i` when `σ = −1`.
pub fn gamma_top(metric: &Metric) -> Multivector {
    let n = metric.dim();
    let quarter_turns = (n * (n - 1) / 2) % 4;
    let mut prefactor = I.powu(quarter_turns as u32);
    if metric.sigma() < 0 {
        prefactor *= I;
    }
    Multivector::blade(metric, (1 << n) - 1, prefactor)
}

/// Operators realizing the polymomenta `p̂ⁱ` and the forms `ω̂ⱼ` on
/// hypercomplex functions.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPair {
    pub p_hat: Vec<Multivector>,
    pub omega_hat: Vec<Multivector>,
    pub kappa: f64,
}

/// `p̂ⁱ = κγⁱγ`, `ω̂ⱼ = κ⁻¹γγⱼ`.
pub fn operator_pair(metric: &Metric, kappa: f64) -> Result<OperatorPair> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive and finite, got {kappa}"
        )));
    }
    let gamma = gamma_top(metric);
    let n = metric.dim();
    let p_hat = (0..n)
        .map(|i| (&Multivector::generator_upper(metric, i) * &gamma).scale_real(kappa))
        .collect();
    let omega_hat = (0..n)
        .map(|j| (&gamma * &Multivector::generator(metric, j)).scale_real(1.0 / kappa))
        .collect();
    Ok(OperatorPair {
        p_hat,
        omega_hat,
        kappa,
    })
}

impl OperatorPair {
    pub fn dim(&self) -> usize {
        self.p_hat.len()
    }

    /// Operator composition `p̂ⁱ∘ω̂ⱼ` (left multiplication on the wave function).
    pub fn compose(&self, i: usize, j: usize) -> Multivector {
        &self.p_hat[i] * &self.omega_hat[j]
    }

    /// `p̂ⁱ∘ω̂ⱼ − ω̂ⱼ∘p̂ⁱ`.
    pub fn commutator(&self, i: usize, j: usize) -> Multivector {
        self.p_hat[i]
            .commutator(&self.omega_hat[j])
            .expect("operator pair shares one metric")
    }

    /// Symmetrized composition `½(p̂ⁱ∘ω̂ⱼ + ω̂ⱼ∘p̂ⁱ)`.
    pub fn symmetric_compose(&self, i: usize, j: usize) -> Multivector {
        self.p_hat[i]
            .anticommutator(&self.omega_hat[j])
            .expect("operator pair shares one metric")
            .scale_real(0.5)
    }
}

const EXP_MAX_TERMS: usize = 400;

/// Multivector exponential `Σ aᵏ/k!`.
///
/// Summation stops once the remaining tail is bounded below `tol`, using the
/// submultiplicative coefficient 1-norm for the bound.
pub fn mv_exp(a: &Multivector, tol: f64) -> Result<Multivector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let norm = a.l1_norm();
    if !norm.is_finite() {
        return Err(Error::InvalidParameter("non-finite exponent".into()));
    }
    let mut sum = Multivector::one(a.metric());
    let mut term = Multivector::one(a.metric());
    // bound on |a|^k / k! tracked alongside the actual terms
    let mut term_bound = 1.0_f64;
    for k in 1..EXP_MAX_TERMS {
        term = (&term * a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        term_bound *= norm / k as f64;
        let ratio = norm / (k as f64 + 1.0);
        if ratio < 1.0 {
            let tail = term_bound * ratio / (1.0 - ratio);
            if tail < tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "exponential series with |a|_1 = {norm} did not reach tolerance {tol} in {EXP_MAX_TERMS} terms"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn timelike_generator_squares_to_one() {
        let g = Metric::minkowski(2).unwrap();
        let g0 = Multivector::generator(&g, 0);
        assert_eq!(&g0 * &g0, Multivector::one(&g));
    }

    #[test]
    fn orthogonal_generators_anticommute() {
        let g = Metric::minkowski(2).unwrap();
        let g0 = Multivector::generator(&g, 0);
        let g1 = Multivector::generator(&g, 1);
        assert!(g0.anticommutator(&g1).unwrap().is_zero());
    }

    #[test]
    fn product_of_different_metrics_is_rejected() {
        let a = Multivector::one(&Metric::minkowski(2).unwrap());
        let b = Multivector::one(&Metric::euclidean(2).unwrap());
        assert_eq!(a.geometric_product(&b), Err(Error::MetricMismatch));
    }

    #[test]
    fn metric_rejects_bad_entries() {
        assert!(Metric::new(vec![1, 0]).is_err());
        assert!(Metric::new(vec![]).is_err());
        assert!(Metric::new(vec![1; MAX_DIM + 1]).is_err());
    }

    #[test]
    fn gamma_top_in_one_dimension_is_the_generator() {
        let g = Metric::new(vec![1]).unwrap();
        assert_eq!(gamma_top(&g), Multivector::generator(&g, 0));
    }

    #[test]
    fn gamma_top_two_dimensional_minkowski() {
        let g = Metric::minkowski(2).unwrap();
        let gamma = gamma_top(&g);
        // i · i · γ₀γ₁
        assert_eq!(gamma.coeff(0b11), c(-1.0));
        assert_eq!(&gamma * &gamma, Multivector::one(&g));
    }

    #[test]
    fn operator_pair_rejects_nonpositive_kappa() {
        let g = Metric::minkowski(2).unwrap();
        assert!(matches!(
            operator_pair(&g, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(operator_pair(&g, -1.0).is_err());
    }

    #[test]
    fn exp_of_zero_is_one() {
        let g = Metric::minkowski(3).unwrap();
        let e = mv_exp(&Multivector::zero(&g), 1e-14).unwrap();
        assert_eq!(e, Multivector::one(&g));
    }

    #[test]
    fn exp_of_euclidean_bivector_is_a_rotor() {
        let g = Metric::euclidean(3).unwrap();
        let b = &Multivector::generator(&g, 1) * &Multivector::generator(&g, 2);
        let theta = 0.3;
        let e = mv_exp(&b.scale_real(theta), 1e-15).unwrap();
        let expected = &Multivector::scalar(&g, c(theta.cos())) + &b.scale_real(theta.sin());
        assert!(e.max_deviation(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn exp_rejects_bad_tolerance() {
        let g = Metric::euclidean(1).unwrap();
        assert!(mv_exp(&Multivector::one(&g), 0.0).is_err());
    }

    #[test]
    fn exp_reports_non_convergence() {
        let g = Metric::euclidean(1).unwrap();
        let huge = Multivector::scalar(&g, c(1e4));
        assert!(matches!(
            mv_exp(&huge, 1e-12),
            Err(Error::ConvergenceFailure(_))
        ));
    }
}
