//! Residuals of the covariant Schrödinger equation, its conservation law and
//! its second-order consequence.

use num_complex::Complex64;
use serde::Serialize;

use super::wave::{Axis, GridWave, SpectralWave, WaveComponents};
use super::QuantumModel;
use crate::clifford::{Multivector};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Max-norm residuals of the component system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchrodingerResidual {
    /// `|iħκ∂ᵢψⁱ − Ĥψ|`
    pub scalar: f64,
    /// `maxᵢ |iħκ∂ᵢψ − Ĥψᵢ|`
    pub vector: f64,
}

impl SchrodingerResidual {
    pub fn max(&self) -> f64 {
        self.scalar.max(self.vector)
    }
}

/// One JSON-serializable residual record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRecord {
    pub op: String,
    pub grid: Option<String>,
    pub residual: f64,
    pub order: Option<f64>,
}

pub fn schrodinger_residual(
    model: &QuantumModel,
    wave: &WaveComponents,
    points: &[Vec<f64>],
) -> Result<SchrodingerResidual> {
    let metric = wave.metric();
    let n = metric.dim();
    let hk = model.hk();
    let mut out = SchrodingerResidual {
        scalar: 0.0,
        vector: 0.0,
    };
    for p in points {
        let jet = wave.jet(model, p)?;
        let div: Complex64 = (0..n).map(|i| jet.dx[i][1 + i] * metric.g(i)).sum();
        out.scalar = out.scalar.max((I * hk * div - jet.h[0]).norm());
        for i in 0..n {
            out.vector = out.vector.max((I * hk * jet.dx[i][0] - jet.h[1 + i]).norm());
        }
    }
    Ok(out)
}

/// `iħκγⁱ∂ᵢΨ − ĤΨ` as a multivector. Its scalar part is the first component
/// residual, its vector part (coefficient of `γⁱ`) the second; the bivector
/// part is `iħκ γⁱγʲ ∂ᵢψⱼ` over `i ≠ j` and vanishes for gradient-type
/// vector components.
pub fn gamma_form_residual(
    model: &QuantumModel,
    wave: &WaveComponents,
    point: &[f64],
) -> Result<Multivector> {
    let metric = wave.metric();
    let n = metric.dim();
    let jet = wave.jet(model, point)?;
    let mut lhs = Multivector::zero(metric);
    for i in 0..n {
        let d = Multivector::vector_lower(metric, &jet.dx[i][1..]);
        let mut d = d;
        d.set_coeff(0, jet.dx[i][0]);
        let term = Multivector::generator_upper(metric, i).geometric_product(&d)?;
        lhs = lhs.try_add(&term)?;
    }
    let mut h_psi = Multivector::vector_lower(metric, &jet.h[1..]);
    h_psi.set_coeff(0, jet.h[0]);
    lhs.scale(I * model.hk()).try_sub(&h_psi)
}

/// `max |ħ²□ψ + κ⁻²Ĥ²ψ|` over the points.
pub fn second_order_residual(
    model: &QuantumModel,
    wave: &WaveComponents,
    points: &[Vec<f64>],
) -> Result<f64> {
    let (h2, k2) = (model.hbar().powi(2), model.kappa().powi(2));
    let mut worst = 0.0f64;
    for p in points {
        let jet = wave.jet(model, p)?;
        worst = worst.max((jet.box_psi * h2 + jet.h2_psi / k2).norm());
    }
    Ok(worst)
}

/// Axis-aligned box in `(x⁰, …, xⁿ⁻¹, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidDomain("region bounds must satisfy lo < hi".into()));
        }
        Ok(Self { lo, hi })
    }

    fn contains(&self, p: &[f64], slack: f64) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= a - slack && *v <= b + slack)
    }
}

/// `max |∂ᵢ[ψ̄ψⁱ + ψψ̄ⁱ] − (iħκ/2)∂_y[ψ̄∂↔_yψ + ψ̄ⁱ∂↔_yψᵢ]|` over grid nodes
/// inside `region` (the whole grid interior when `None`). Bars denote
/// componentwise complex conjugation, `ψⁱ = gⁱⁱψᵢ`, and
/// `a∂↔b = a∂b − (∂a)b`. Nested central differences, second order.
pub fn conservation_residual(
    model: &QuantumModel,
    grid: &GridWave,
    region: Option<&Region>,
) -> Result<f64> {
    let metric = grid.metric();
    let n = metric.dim();
    if model.metric() != metric {
        return Err(Error::MetricMismatch);
    }
    let axes = grid.axes();
    let hk = model.hk();

    let current = |idx: &[usize], i: usize| -> Complex64 {
        let psi = grid.value(0, idx);
        let up = grid.value(1 + i, idx) * metric.g(i);
        psi.conj() * up + psi * up.conj()
    };
    let flux = |idx: &[usize]| -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for c in 0..=n {
            let weight = if c == 0 { 1.0 } else { metric.g(c - 1) };
            let v = grid.value(c, idx);
            let dv = grid.central(c, idx, n);
            total += (v.conj() * dv - dv.conj() * v) * weight;
        }
        total
    };

    let mut worst = 0.0f64;
    let mut idx = vec![0usize; n + 1];
    let total: usize = axes.iter().map(|a| a.count).product();
    for flat in 0..total {
        let mut rest = flat;
        for d in (0..=n).rev() {
            idx[d] = rest % axes[d].count;
            rest /= axes[d].count;
        }
        if !grid.has_margin(&idx, 1, 2) {
            continue;
        }
        if let Some(r) = region {
            let slack = 1e-9 * axes.iter().map(|a| a.step).fold(0.0, f64::max);
            if !r.contains(&grid.node(&idx), slack) {
                continue;
            }
        }
        let mut lhs = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let h = axes[i].step;
            lhs += (current(&GridWave::shifted(&idx, i, 1), i)
                - current(&GridWave::shifted(&idx, i, -1), i))
                * (0.5 / h);
        }
        let hy = axes[n].step;
        let d_flux = (flux(&GridWave::shifted(&idx, n, 1)) - flux(&GridWave::shifted(&idx, n, -1)))
            * (0.5 / hy);
        let rhs = I * (0.5 * hk) * d_flux;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Residuals under factor-two refinement and the fitted order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    /// Spacing along the field axis at each level.
    pub spacings: Vec<f64>,
    pub residuals: Vec<f64>,
    pub grid_sizes: Vec<Vec<usize>>,
    /// Least-squares slope of `ln residual` against `ln spacing`.
    pub order: f64,
}

impl ConvergenceStudy {
    pub fn records(&self, op: &str) -> Vec<ResidualRecord> {
        self.residuals
            .iter()
            .zip(&self.grid_sizes)
            .map(|(r, g)| ResidualRecord {
                op: op.to_string(),
                grid: Some(g.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x")),
                residual: *r,
                order: Some(self.order),
            })
            .collect()
    }
}

pub(crate) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Samples `wave` on grids covering `region` with `base_cells · 2^l` cells
/// per axis (`l = 0..levels`) and fits the order of the conservation
/// residual measured inside `region`.
pub fn conservation_convergence(
    model: &QuantumModel,
    wave: &SpectralWave,
    region: &Region,
    base_cells: usize,
    levels: usize,
) -> Result<ConvergenceStudy> {
    let n = wave.metric().dim();
    if region.lo.len() != n + 1 {
        return Err(Error::InvalidDomain(format!("region must have {} axes", n + 1)));
    }
    if levels < 2 || base_cells < 2 {
        return Err(Error::InvalidDomain(
            "a convergence study needs at least 2 levels and 2 base cells".into(),
        ));
    }
    let mut spacings = Vec::with_capacity(levels);
    let mut residuals = Vec::with_capacity(levels);
    let mut grid_sizes = Vec::with_capacity(levels);
    for level in 0..levels {
        let cells = base_cells << level;
        let axes = (0..=n)
            .map(|d| {
                let h = (region.hi[d] - region.lo[d]) / cells as f64;
                Axis::new(region.lo[d] - 2.0 * h, h, cells + 5)
            })
            .collect::<Result<Vec<_>>>()?;
        spacings.push(axes[n].step);
        grid_sizes.push(axes.iter().map(|a| a.count).collect());
        let grid = wave.sample(axes)?;
        residuals.push(conservation_residual(model, &grid, Some(region))?);
    }
    if residuals.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::ConvergenceFailure(
            "conservation residual vanished identically; no order can be fitted".into(),
        ));
    }
    let lx: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    Ok(ConvergenceStudy {
        order: fit_slope(&lx, &ly),
        spacings,
        residuals,
        grid_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Metric;
    use crate::quantum::{assemble_mode, standing_mode};

    fn points() -> Vec<Vec<f64>> {
        vec![vec![0.1, -0.3, 0.2], vec![1.2, 0.7, -0.9], vec![-0.4, 2.0, 1.5]]
    }

    #[test]
    fn modes_solve_the_component_system() {
        let model = QuantumModel::new(Metric::minkowski(2).unwrap(), 1.3, 0.7, 1.9).unwrap();
        for level in [0, 1, 3] {
            let mode = assemble_mode(&model, level, &[0.8]).unwrap();
            let r = schrodinger_residual(&model, &mode.wave.into(), &points()).unwrap();
            assert!(r.max() < 1e-10, "N = {level}: {r:?}");
        }
    }

    #[test]
    fn zero_wave_has_zero_residual() {
        let model = QuantumModel::free_default();
        let wave = SpectralWave::zero(model.metric().clone()).into();
        let r = schrodinger_residual(&model, &wave, &points()).unwrap();
        assert_eq!(r.max(), 0.0);
        assert_eq!(second_order_residual(&model, &wave, &points()).unwrap(), 0.0);
    }

    #[test]
    fn gamma_form_reproduces_component_residuals() {
        let model = QuantumModel::free_default();
        let mut mode = assemble_mode(&model, 2, &[0.4]).unwrap();
        mode.wave = {
            // detune ω so that both residuals are nonzero
            let mut terms = mode.wave.terms().to_vec();
            terms[0].covector[0] += 0.1;
            SpectralWave::from_terms(model.metric().clone(), terms).unwrap()
        };
        let wave: WaveComponents = mode.wave.into();
        let p = vec![0.2, 0.1, 0.4];
        let mv = gamma_form_residual(&model, &wave, &p).unwrap();
        let jet = wave.jet(&model, &p).unwrap();
        let div = jet.dx[0][1] - jet.dx[1][2];
        let scalar = I * model.hk() * div - jet.h[0];
        assert!((mv.scalar_part() - scalar).norm() < 1e-13);
        for i in 0..2 {
            let comp = I * model.hk() * jet.dx[i][0] - jet.h[1 + i];
            let coeff = mv.vector_coeff(i) * model.metric().g(i);
            assert!((coeff - comp).norm() < 1e-13);
        }
        assert!(mv.coeff(0b11).norm() < 1e-13);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let model = QuantumModel::free_default();
        let wave = standing_mode(&model, 0, &[0.0]).unwrap();
        let region = Region::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert!(matches!(
            conservation_convergence(&model, &wave, &region, 1, 3),
            Err(Error::InvalidDomain(_))
        ));
    }
}
