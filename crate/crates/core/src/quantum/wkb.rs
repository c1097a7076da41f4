//! Quasiclassical form `Ψ = R exp(iS^μγ_μ/ħκ)` and the residuals of the
//! resulting Hamilton–Jacobi-type equations.

use num_complex::Complex64;
use serde::Serialize;

use super::residual::fit_slope;
use super::wave::WaveComponents;
use super::QuantumModel;
use crate::clifford::{mv_exp, Multivector};
use crate::dwmech::{dw_hamiltonian, HjFunctions};
use crate::error::{Error, Result};

/// Access to `S^μ(x, y)` (coefficients of `γ_μ`), `R(x, y)` and the
/// derivatives entering the quasiclassical equations.
pub trait WkbFields {
    fn n(&self) -> usize;
    fn s(&self, x: &[f64], y: f64) -> Result<Vec<f64>>;
    /// `ds[j][μ] = ∂ⱼS^μ`.
    fn ds_dx(&self, x: &[f64], y: f64) -> Result<Vec<Vec<f64>>>;
    /// `∂_y S^μ`.
    fn ds_dy(&self, x: &[f64], y: f64) -> Result<Vec<f64>>;
    fn r(&self, x: &[f64], y: f64) -> Result<f64>;
    /// `∂²_y R`.
    fn laplacian_r(&self, x: &[f64], y: f64) -> Result<f64>;
}

/// Central-difference derivatives of user-supplied `S^μ` and `R`.
pub struct FiniteDifferenceWkb<S, R> {
    pub n: usize,
    pub s: S,
    pub r: R,
    pub step: f64,
}

impl<S, R> WkbFields for FiniteDifferenceWkb<S, R>
where
    S: Fn(&[f64], f64) -> Vec<f64>,
    R: Fn(&[f64], f64) -> f64,
{
    fn n(&self) -> usize {
        self.n
    }

    fn s(&self, x: &[f64], y: f64) -> Result<Vec<f64>> {
        Ok((self.s)(x, y))
    }

    fn ds_dx(&self, x: &[f64], y: f64) -> Result<Vec<Vec<f64>>> {
        let h = self.step;
        Ok((0..self.n)
            .map(|j| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[j] += h;
                minus[j] -= h;
                let (a, b) = ((self.s)(&plus, y), (self.s)(&minus, y));
                a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect()
            })
            .collect())
    }

    fn ds_dy(&self, x: &[f64], y: f64) -> Result<Vec<f64>> {
        let h = self.step;
        let (a, b) = ((self.s)(x, y + h), (self.s)(x, y - h));
        Ok(a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect())
    }

    fn r(&self, x: &[f64], y: f64) -> Result<f64> {
        Ok((self.r)(x, y))
    }

    fn laplacian_r(&self, x: &[f64], y: f64) -> Result<f64> {
        let h = self.step;
        Ok(((self.r)(x, y + h) - 2.0 * (self.r)(x, y) + (self.r)(x, y - h)) / (h * h))
    }
}

/// Pointwise decomposition `(R, S^μ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbSample {
    pub r: f64,
    pub s: Vec<f64>,
}

/// Inverts `ψ + ψⁱγᵢ = R exp(iS^μγ_μ/ħκ)` at one point.
///
/// Requires `ψ` real and `ψ^μ = i w^μ` with `w` real. With `w² = w^μw_μ`:
/// `w² > 0` gives `ψ = R cos β`, `w = R sin β ŵ`; `w² < 0` gives
/// `ψ = R cosh β` (needs `ψ > 0`); `w² = 0` gives `R = ψ` (needs `ψ > 0`).
/// Anything else, including a complex scalar with no vector part, fails.
pub fn extract_wkb_at(model: &QuantumModel, scalar: Complex64, lower: &[Complex64]) -> Result<WkbSample> {
    let metric = model.metric();
    let n = metric.dim();
    if lower.len() != n {
        return Err(Error::InvalidParameter("vector part has the wrong dimension".into()));
    }
    let scale = lower.iter().map(|c| c.norm()).fold(scalar.norm(), f64::max);
    if scale == 0.0 {
        return Err(Error::DecompositionFailure("Ψ vanishes".into()));
    }
    let tol = 1e-12 * scale;
    if scalar.im.abs() > tol {
        return Err(Error::DecompositionFailure(format!(
            "scalar part {scalar} is not real"
        )));
    }
    // upper-index vector coefficients ψ^μ = i w^μ
    let w: Vec<f64> = lower
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let up = c * metric.g(i);
            if up.re.abs() > tol {
                Err(Error::DecompositionFailure(format!(
                    "vector component {i} has a real part"
                )))
            } else {
                Ok(up.im)
            }
        })
        .collect::<Result<_>>()?;
    let psi = scalar.re;
    let w_sq: f64 = w.iter().enumerate().map(|(i, v)| metric.g(i) * v * v).sum();
    let hk = model.hk();
    let null = w_sq.abs() <= 1e-14 * scale * scale;
    if null {
        if psi <= 0.0 {
            return Err(Error::DecompositionFailure(
                "null vector part with non-positive scalar".into(),
            ));
        }
        return Ok(WkbSample {
            r: psi,
            s: w.iter().map(|v| hk * v / psi).collect(),
        });
    }
    let (r, beta, norm) = if w_sq > 0.0 {
        let norm = w_sq.sqrt();
        let r = (psi * psi + w_sq).sqrt();
        (r, norm.atan2(psi), norm)
    } else {
        let norm = (-w_sq).sqrt();
        if psi <= 0.0 || psi * psi + w_sq <= 0.0 {
            return Err(Error::DecompositionFailure(
                "time-like exponent needs ψ > |w|".into(),
            ));
        }
        let r = (psi * psi + w_sq).sqrt();
        (r, (norm / psi).atanh(), norm)
    };
    Ok(WkbSample {
        r,
        s: w.iter().map(|v| hk * beta * v / norm).collect(),
    })
}

/// `R exp(iS^μγ_μ/ħκ)` through the Clifford exponential series.
pub fn wkb_reassemble(model: &QuantumModel, sample: &WkbSample) -> Result<Multivector> {
    let metric = model.metric();
    let mut b = Multivector::zero(metric);
    for (i, s) in sample.s.iter().enumerate() {
        b.set_coeff(1 << i, Complex64::new(0.0, s / model.hk()));
    }
    Ok(mv_exp(&b, 1e-15)?.scale_real(sample.r))
}

/// `(R, S)` of a wave function, with finite-difference derivatives of the
/// pointwise decomposition.
pub struct ExtractedWkb {
    model: QuantumModel,
    wave: WaveComponents,
    step: f64,
}

/// Wraps `wave` for quasiclassical analysis. Derivatives use central
/// differences of step `step`, so the wave must be evaluable off-grid
/// (spectral) or `step` must match the grid spacing.
pub fn extract_wkb(model: &QuantumModel, wave: &WaveComponents, step: f64) -> Result<ExtractedWkb> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad step {step}")));
    }
    if wave.metric() != model.metric() {
        return Err(Error::MetricMismatch);
    }
    Ok(ExtractedWkb {
        model: model.clone(),
        wave: wave.clone(),
        step,
    })
}

impl ExtractedWkb {
    pub fn sample(&self, x: &[f64], y: f64) -> Result<WkbSample> {
        let mut p = x.to_vec();
        p.push(y);
        let jet = self.wave.jet(&self.model, &p)?;
        extract_wkb_at(&self.model, jet.values[0], &jet.values[1..])
    }
}

impl WkbFields for ExtractedWkb {
    fn n(&self) -> usize {
        self.model.n()
    }

    fn s(&self, x: &[f64], y: f64) -> Result<Vec<f64>> {
        Ok(self.sample(x, y)?.s)
    }

    fn ds_dx(&self, x: &[f64], y: f64) -> Result<Vec<Vec<f64>>> {
        let h = self.step;
        (0..self.n())
            .map(|j| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[j] += h;
                minus[j] -= h;
                let (a, b) = (self.s(&plus, y)?, self.s(&minus, y)?);
                Ok(a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect())
            })
            .collect()
    }

    fn ds_dy(&self, x: &[f64], y: f64) -> Result<Vec<f64>> {
        let h = self.step;
        let (a, b) = (self.s(x, y + h)?, self.s(x, y - h)?);
        Ok(a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect())
    }

    fn r(&self, x: &[f64], y: f64) -> Result<f64> {
        Ok(self.sample(x, y)?.r)
    }

    fn laplacian_r(&self, x: &[f64], y: f64) -> Result<f64> {
        let h = self.step;
        Ok((self.r(x, y + h)? - 2.0 * self.r(x, y)? + self.r(x, y - h)?) / (h * h))
    }
}

/// View of the `S^μ` of a [`WkbFields`] as DW Hamilton–Jacobi functions;
/// evaluation errors surface as NaN.
pub struct AsHjFunctions<'a>(pub &'a dyn WkbFields);

fn divergence(ds: &[Vec<f64>]) -> f64 {
    ds.iter().enumerate().map(|(i, row)| row[i]).sum()
}

impl HjFunctions for AsHjFunctions<'_> {
    fn values(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.0.s(x, y[0]).unwrap_or_else(|_| vec![f64::NAN; self.0.n()])
    }

    fn divergence(&self, x: &[f64], y: &[f64]) -> f64 {
        self.0.ds_dx(x, y[0]).map_or(f64::NAN, |ds| divergence(&ds))
    }

    fn field_gradient(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        match self.0.ds_dy(x, y[0]) {
            Ok(d) => d.into_iter().map(|v| vec![v]).collect(),
            Err(_) => vec![vec![f64::NAN]; self.0.n()],
        }
    }
}

/// Pointwise terms of the quasiclassical equations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbPoint {
    /// `|∂_μS^μ + ½∂_yS^μ∂_yS_μ + V − ½ħ²κ²∂²_yR/R|`
    pub main: f64,
    /// `∂_μS^μ + H(∂_yS)`, the classical DW Hamilton–Jacobi expression.
    pub classical: f64,
    /// `½ħ²κ²∂²_yR/R`.
    pub quantum: f64,
    /// `|∂ᵢSⁱ − (Sⁱ/|S|)∂ᵢ|S||`
    pub side1: f64,
    /// `|∂_ySⁱ∂_ySᵢ − ∂ᵢSⁱ|`
    pub side2: f64,
}

/// Max-norm residuals over a point set plus the pointwise breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbResidual {
    pub main: f64,
    pub side1: f64,
    pub side2: f64,
    pub points: Vec<WkbPoint>,
}

/// Evaluates the quasiclassical equations at `(x, y)` points. `|S|` is
/// `√|SᵢSⁱ|`; a vanishing `|S|` at any point is an error.
pub fn wkb_residual(
    model: &QuantumModel,
    w: &dyn WkbFields,
    points: &[(Vec<f64>, f64)],
) -> Result<WkbResidual> {
    let metric = model.metric();
    let n = metric.dim();
    if w.n() != n {
        return Err(Error::InvalidParameter("WKB data dimension differs from the model".into()));
    }
    let classical_model = model.classical_model()?;
    let mut out = WkbResidual {
        main: 0.0,
        side1: 0.0,
        side2: 0.0,
        points: Vec::with_capacity(points.len()),
    };
    for (x, y) in points {
        let s = w.s(x, *y)?;
        let ds = w.ds_dx(x, *y)?;
        let dy = w.ds_dy(x, *y)?;
        let r = w.r(x, *y)?;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("R = {r} is not positive")));
        }
        let div = divergence(&ds);
        let p: Vec<Vec<f64>> = dy.iter().map(|v| vec![*v]).collect();
        let classical = div + dw_hamiltonian(&classical_model, &[*y], &p)?;
        let quantum = 0.5 * model.kinetic_coeff() * w.laplacian_r(x, *y)? / r;
        let main = (classical - quantum).abs();

        let s_sq: f64 = (0..n).map(|i| metric.g(i) * s[i] * s[i]).sum();
        if s_sq == 0.0 || !s_sq.is_finite() {
            return Err(Error::SingularHJNorm);
        }
        // (Sⁱ/|S|)∂ᵢ|S| = Sⁱ Σ_μ S_μ ∂ᵢS^μ / (S·S)
        let projected: f64 = (0..n)
            .map(|i| s[i] * (0..n).map(|mu| metric.g(mu) * s[mu] * ds[i][mu]).sum::<f64>())
            .sum::<f64>()
            / s_sq;
        let side1 = (div - projected).abs();
        let grad_sq: f64 = (0..n).map(|i| metric.g(i) * dy[i] * dy[i]).sum();
        let side2 = (grad_sq - div).abs();

        out.main = out.main.max(main);
        out.side1 = out.side1.max(side1);
        out.side2 = out.side2.max(side2);
        out.points.push(WkbPoint {
            main,
            classical,
            quantum,
            side1,
            side2,
        });
    }
    Ok(out)
}

/// Quantum-potential term under `κ → λκ` at fixed `(S, R)` and `ħ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HkSweep {
    pub hk: Vec<f64>,
    /// `max |main − |classical||`, i.e. the size of the quantum term.
    pub quantum: Vec<f64>,
    /// Fitted exponent of `quantum ∝ (ħκ)^p`.
    pub exponent: f64,
}

pub fn hk_sweep(
    model: &QuantumModel,
    w: &dyn WkbFields,
    points: &[(Vec<f64>, f64)],
    factors: &[f64],
) -> Result<HkSweep> {
    if factors.len() < 2 {
        return Err(Error::InvalidParameter("a sweep needs at least two factors".into()));
    }
    let mut hk = Vec::with_capacity(factors.len());
    let mut quantum = Vec::with_capacity(factors.len());
    for &f in factors {
        let scaled = model.with_kappa(model.kappa() * f)?;
        let res = wkb_residual(&scaled, w, points)?;
        hk.push(scaled.hk());
        quantum.push(res.points.iter().map(|p| p.quantum.abs()).fold(0.0, f64::max));
    }
    if quantum.iter().any(|q| !(*q > 0.0)) {
        return Err(Error::InvalidParameter(
            "quantum potential vanishes; no scaling exponent".into(),
        ));
    }
    let lx: Vec<f64> = hk.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = quantum.iter().map(|v| v.ln()).collect();
    Ok(HkSweep {
        exponent: fit_slope(&lx, &ly),
        hk,
        quantum,
    })
}
