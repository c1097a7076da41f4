//! Functions of the field variable `y`: Hermite-function expansions and
//! uniform grids.

use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};

/// `f(y) = Σₖ cₖ ψₖ(y/ℓ)/√ℓ` with `ψₖ` the orthonormal Hermite functions, so
/// the coefficient 2-norm equals the L² norm of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    ell: f64,
    coeffs: Vec<f64>,
}

impl SpectralFunction {
    pub fn new(ell: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidDomain(format!("basis width must be positive, got {ell}")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("non-finite spectral coefficient".into()));
        }
        Ok(Self { ell, coeffs })
    }

    /// The `k`-th basis function.
    pub fn basis(ell: f64, k: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::new(ell, coeffs)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn eval(&self, y: f64) -> f64 {
        let xi = y / self.ell;
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
        let mut sum = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            sum += c * cur;
            let kf = k as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        sum / self.ell.sqrt()
    }

    /// `df/dy`, exact in a basis one element larger.
    pub fn derivative(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            if k > 0 {
                out[k - 1] += c * (kf / 2.0).sqrt();
            }
            out[k + 1] -= c * ((kf + 1.0) / 2.0).sqrt();
        }
        for v in &mut out {
            *v /= self.ell;
        }
        Self {
            ell: self.ell,
            coeffs: out,
        }
    }

    /// `y·f(y)`.
    pub fn mul_y(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let kf = k as f64;
            if k > 0 {
                out[k - 1] += c * (kf / 2.0).sqrt();
            }
            out[k + 1] += c * ((kf + 1.0) / 2.0).sqrt();
        }
        for v in &mut out {
            *v *= self.ell;
        }
        Self {
            ell: self.ell,
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            ell: self.ell,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.ell != other.ell {
            return Err(Error::InvalidDomain("spectral bases of different width".into()));
        }
        let len = self.len().max(other.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Ok(Self {
            ell: self.ell,
            coeffs: (0..len)
                .map(|k| get(&self.coeffs, k) + get(&other.coeffs, k))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-1.0))
    }

    /// Applies `−½ A f'' + Σⱼ vⱼ yʲ f` exactly in an enlarged basis.
    pub(crate) fn apply_operator(&self, a: f64, potential: &[f64]) -> Self {
        let second = self.derivative().derivative().scale(-0.5 * a);
        let mut out = second;
        let mut power = self.clone();
        for (j, &vj) in potential.iter().enumerate() {
            if j > 0 {
                power = power.mul_y();
            }
            if vj != 0.0 {
                out = out.try_add(&power.scale(vj)).expect("same basis");
            }
        }
        out
    }
}

/// Samples `f(y₀ + j·Δy)`, `j = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    y0: f64,
    dy: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(y0: f64, dy: f64, values: Vec<f64>) -> Result<Self> {
        if !(dy > 0.0 && dy.is_finite() && y0.is_finite()) {
            return Err(Error::InvalidDomain(format!("bad grid origin/spacing ({y0}, {dy})")));
        }
        if values.len() < 5 {
            return Err(Error::InvalidDomain("a y-grid needs at least 5 points".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain("non-finite grid value".into()));
        }
        Ok(Self { y0, dy, values })
    }

    pub fn sample(y0: f64, dy: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(y0, dy, (0..len).map(|j| f(y0 + j as f64 * dy)).collect())
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Discrete L² norm `(Σ|f|²Δy)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.dy).sqrt()
    }

    pub(crate) fn apply_operator(&self, a: f64, potential: impl Fn(f64) -> f64) -> Self {
        let values = apply_line(&self.values, self.y0, self.dy, a, &potential);
        Self {
            y0: self.y0,
            dy: self.dy,
            values,
        }
    }
}

/// Second derivative on a uniform line: the fourth-order five-point stencil
/// in the interior, the three-point stencil next to the ends, and zero
/// extension beyond the ends.
pub(crate) fn second_derivative<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    let at = |j: isize| -> T {
        if j < 0 || j >= n as isize {
            T::zero()
        } else {
            values[j as usize]
        }
    };
    let h2 = h * h;
    (0..n as isize)
        .map(|j| {
            let interior = j >= 2 && j + 2 < n as isize;
            if interior {
                (at(j - 2) * (-1.0) + at(j - 1) * 16.0 - at(j) * 30.0 + at(j + 1) * 16.0
                    - at(j + 2))
                    * (1.0 / (12.0 * h2))
            } else {
                (at(j - 1) - at(j) * 2.0 + at(j + 1)) * (1.0 / h2)
            }
        })
        .collect()
}

/// `−½ A f'' + V f` on a uniform line.
pub(crate) fn apply_line<T>(values: &[T], y0: f64, h: f64, a: f64, potential: &dyn Fn(f64) -> f64) -> Vec<T>
where
    T: Copy + Zero + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    second_derivative(values, h)
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(j, (d2, &v))| d2 * (-0.5 * a) + v * potential(y0 + j as f64 * h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_normalized_gaussian() {
        let f = SpectralFunction::basis(2.0, 0).unwrap();
        let expected = std::f64::consts::PI.powf(-0.25) / 2f64.sqrt() * (-0.125f64).exp();
        assert!((f.eval(1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let f = SpectralFunction::new(0.7, vec![0.3, -0.2, 0.5, 0.1]).unwrap();
        let d = f.derivative();
        let h = 1e-6;
        for y in [-1.0, 0.2, 0.9] {
            let fd = (f.eval(y + h) - f.eval(y - h)) / (2.0 * h);
            assert!((d.eval(y) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn mul_y_is_pointwise() {
        let f = SpectralFunction::new(1.3, vec![0.4, 0.0, -0.7]).unwrap();
        let g = f.mul_y();
        for y in [-2.0, 0.5, 1.1] {
            assert!((g.eval(y) - y * f.eval(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn stencil_is_exact_on_quartics() {
        let h = 0.1;
        let values: Vec<f64> = (0..11).map(|j| (j as f64 * h).powi(4)).collect();
        let d2 = second_derivative(&values, h);
        for (j, v) in d2.iter().enumerate().take(8).skip(2) {
            let y = j as f64 * h;
            assert!((v - 12.0 * y * y).abs() < 1e-10);
        }
    }

    #[test]
    fn short_grids_are_rejected() {
        assert!(matches!(
            GridFunction::new(0.0, 0.1, vec![0.0; 4]),
            Err(Error::InvalidDomain(_))
        ));
    }
}
