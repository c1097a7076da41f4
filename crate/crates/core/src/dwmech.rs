//! Classical De Donder–Weyl layer for scalar field models
//! `L = ½ ∂ᵢyᵃ ∂ⁱyₐ − V(y)`.
//!
//! Polymomenta are `pⁱₐ = ∂L/∂(∂ᵢyᵃ) = gⁱⁱ ∂ᵢyᵃ` and the DW Hamiltonian is
//! `H = ½ pⁱₐ pₐᵢ + V(y)`. Residuals are reported in max norm per equation
//! family so that a failure points at the offending family.

use std::collections::HashMap;
use std::io::Read;

use num_traits::Zero;

use crate::clifford::Metric;
use crate::error::{Error, Result};
use crate::gradedforms::{rational, PhaseContext, Poly};

/// Default central-difference step for derivative fallbacks.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarModel {
    metric: Metric,
    fields: usize,
    /// Polynomial in field variables `0..fields`.
    potential: Poly,
}

impl ScalarModel {
    pub fn new(metric: Metric, fields: usize, potential: Poly) -> Result<Self> {
        if fields == 0 {
            return Err(Error::InvalidParameter("model needs at least one field".into()));
        }
        if let Some(v) = potential.variables().into_iter().find(|&v| v >= fields) {
            return Err(Error::InvalidParameter(format!(
                "potential depends on variable {v}, but the model has {fields} field(s)"
            )));
        }
        Ok(Self {
            metric,
            fields,
            potential,
        })
    }

    /// `V = ½ μ² Σₐ (yᵃ)²` with rational `μ² = num/den`.
    pub fn free(metric: Metric, fields: usize, mass_sq: (i64, i64)) -> Result<Self> {
        let half_mass = rational(mass_sq.0, 2 * mass_sq.1);
        let mut v = Poly::zero();
        for a in 0..fields {
            v += &(&Poly::var(a) * &Poly::var(a)).scale(&half_mass);
        }
        Self::new(metric, fields, v)
    }

    pub fn n(&self) -> usize {
        self.metric.dim()
    }

    pub fn m(&self) -> usize {
        self.fields
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn potential(&self) -> &Poly {
        &self.potential
    }

    pub fn phase_context(&self) -> Result<PhaseContext> {
        PhaseContext::new(self.n(), self.m())
    }

    pub fn potential_value(&self, y: &[f64]) -> f64 {
        self.potential.eval(y)
    }

    pub fn potential_gradient(&self, y: &[f64]) -> Vec<f64> {
        (0..self.fields)
            .map(|a| self.potential.derivative(a).eval(y))
            .collect()
    }

    pub fn lagrangian(&self, jp: &JetPoint) -> Result<f64> {
        jp.validate(self)?;
        let mut kinetic = 0.0;
        for i in 0..self.n() {
            for a in 0..self.m() {
                kinetic += self.metric.g(i) * jp.dy[i][a] * jp.dy[i][a];
            }
        }
        Ok(0.5 * kinetic - self.potential_value(&jp.y))
    }
}

/// Point of the first jet: `(xⁱ, yᵃ, ∂ᵢyᵃ)` with `dy[i][a] = ∂ᵢyᵃ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<Vec<f64>>,
}

impl JetPoint {
    fn validate(&self, model: &ScalarModel) -> Result<()> {
        let (n, m) = (model.n(), model.m());
        let shape_ok = self.x.len() == n
            && self.y.len() == m
            && self.dy.len() == n
            && self.dy.iter().all(|r| r.len() == m);
        if !shape_ok {
            return Err(Error::InvalidParameter(format!(
                "jet point shape does not match n = {n}, m = {m}"
            )));
        }
        let finite = self
            .x
            .iter()
            .chain(&self.y)
            .chain(self.dy.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("jet point has non-finite entries".into()));
        }
        Ok(())
    }
}

/// `pⁱₐ = gⁱⁱ ∂ᵢyᵃ`, indexed `[i][a]`.
pub fn polymomenta(model: &ScalarModel, jp: &JetPoint) -> Result<Vec<Vec<f64>>> {
    jp.validate(model)?;
    Ok((0..model.n())
        .map(|i| jp.dy[i].iter().map(|d| model.metric.g(i) * d).collect())
        .collect())
}

/// `H = ½ gᵢᵢ pⁱₐ pⁱₐ + V(y)`.
pub fn dw_hamiltonian(model: &ScalarModel, y: &[f64], p: &[Vec<f64>]) -> Result<f64> {
    if y.len() != model.m() || p.len() != model.n() || p.iter().any(|r| r.len() != model.m()) {
        return Err(Error::InvalidParameter(
            "field or polymomentum shape does not match the model".into(),
        ));
    }
    let mut kinetic = 0.0;
    for (i, row) in p.iter().enumerate() {
        for pa in row {
            kinetic += model.metric.g(i) * pa * pa;
        }
    }
    Ok(0.5 * kinetic + model.potential_value(y))
}

/// `∂H/∂pⁱₐ = gᵢᵢ pⁱₐ`.
fn hamiltonian_p_gradient(model: &ScalarModel, p: &[Vec<f64>]) -> Vec<Vec<f64>> {
    p.iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|v| model.metric.g(i) * v).collect())
        .collect()
}

/// Values and first derivatives of a field configuration at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub y: Vec<f64>,
    /// `p[i][a]`
    pub p: Vec<Vec<f64>>,
    /// `dy[k][a] = ∂ₖyᵃ`
    pub dy: Vec<Vec<f64>>,
    /// `dp[k][i][a] = ∂ₖpⁱₐ`
    pub dp: Vec<Vec<Vec<f64>>>,
}

impl FieldSample {
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        let rows_ok = |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|r| r.len() == m);
        let shape_ok = self.y.len() == m
            && rows_ok(&self.p)
            && rows_ok(&self.dy)
            && self.dp.len() == n
            && self.dp.iter().all(|d| rows_ok(d));
        if !shape_ok {
            return Err(Error::InvalidSolutionData(format!(
                "sample shape does not match n = {n}, m = {m}"
            )));
        }
        let finite = self
            .y
            .iter()
            .chain(self.p.iter().flatten())
            .chain(self.dy.iter().flatten())
            .chain(self.dp.iter().flatten().flatten())
            .all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidSolutionData("sample has non-finite entries".into()))
        }
    }
}

/// Source of `yᵃ(x)`, `pⁱₐ(x)` and their spacetime derivatives.
pub trait SolutionSampler {
    fn sample(&self, x: &[f64]) -> Result<FieldSample>;
}

/// `yᵃ = Aᵃ cos(kᵢxⁱ)` with `pⁱ = gⁱⁱ∂ᵢy`. Solves the free equations when
/// `gⁱⁱkᵢkᵢ = μ²`.
#[derive(Debug, Clone)]
pub struct PlaneWave {
    pub metric: Metric,
    pub amplitudes: Vec<f64>,
    /// Covector components `kᵢ`.
    pub wavevector: Vec<f64>,
}

impl PlaneWave {
    /// On-shell wave of mass `μ` along spatial axis 1 (or at rest for `n = 1`).
    pub fn on_shell(metric: Metric, amplitudes: Vec<f64>, mass: f64, spatial_k: f64) -> Self {
        let n = metric.dim();
        let mut wavevector = vec![0.0; n];
        if n > 1 {
            wavevector[1] = spatial_k;
            wavevector[0] = (mass * mass + spatial_k * spatial_k).sqrt();
        } else {
            wavevector[0] = mass;
        }
        Self {
            metric,
            amplitudes,
            wavevector,
        }
    }
}

impl SolutionSampler for PlaneWave {
    fn sample(&self, x: &[f64]) -> Result<FieldSample> {
        let n = self.metric.dim();
        if x.len() != n || self.wavevector.len() != n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let phase: f64 = self.wavevector.iter().zip(x).map(|(k, x)| k * x).sum();
        let (s, c) = phase.sin_cos();
        let k = &self.wavevector;
        let y = self.amplitudes.iter().map(|a| a * c).collect();
        let dy: Vec<Vec<f64>> = (0..n)
            .map(|i| self.amplitudes.iter().map(|a| -a * k[i] * s).collect())
            .collect();
        let p: Vec<Vec<f64>> = (0..n)
            .map(|i| dy[i].iter().map(|d| self.metric.g(i) * d).collect())
            .collect();
        let dp = (0..n)
            .map(|kk| {
                (0..n)
                    .map(|i| {
                        self.amplitudes
                            .iter()
                            .map(|a| -self.metric.g(i) * a * k[i] * k[kk] * c)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(FieldSample { y, p, dy, dp })
    }
}

/// Constant field configuration with vanishing polymomenta.
#[derive(Debug, Clone)]
pub struct ConstantField {
    pub n: usize,
    pub y: Vec<f64>,
}

impl SolutionSampler for ConstantField {
    fn sample(&self, x: &[f64]) -> Result<FieldSample> {
        if x.len() != self.n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let m = self.y.len();
        let zeros = vec![vec![0.0; m]; self.n];
        Ok(FieldSample {
            y: self.y.clone(),
            p: zeros.clone(),
            dy: zeros.clone(),
            dp: vec![zeros; self.n],
        })
    }
}

/// Central-difference sampler for a field given as a function of `x`.
/// Polymomenta come from the differenced field, their derivatives from a
/// second (nested) central difference.
pub struct FiniteDifferenceSampler<F> {
    pub metric: Metric,
    pub field: F,
    pub step: f64,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FiniteDifferenceSampler<F> {
    pub fn new(metric: Metric, field: F, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad step {step}")));
        }
        Ok(Self {
            metric,
            field,
            step,
        })
    }

    fn gradient(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let h = self.step;
        (0..x.len())
            .map(|k| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[k] += h;
                minus[k] -= h;
                let (fp, fm) = ((self.field)(&plus), (self.field)(&minus));
                fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            })
            .collect()
    }

    fn momenta(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.gradient(x)
            .into_iter()
            .enumerate()
            .map(|(i, row)| row.into_iter().map(|d| self.metric.g(i) * d).collect())
            .collect()
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> SolutionSampler for FiniteDifferenceSampler<F> {
    fn sample(&self, x: &[f64]) -> Result<FieldSample> {
        let n = self.metric.dim();
        if x.len() != n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let h = self.step;
        let dy = self.gradient(x);
        let p = self.momenta(x);
        let dp = (0..n)
            .map(|k| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[k] += h;
                minus[k] -= h;
                let (pp, pm) = (self.momenta(&plus), self.momenta(&minus));
                pp.iter()
                    .zip(&pm)
                    .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v) / (2.0 * h)).collect())
                    .collect()
            })
            .collect();
        Ok(FieldSample {
            y: (self.field)(x),
            p,
            dy,
            dp,
        })
    }
}

/// Max-norm residuals of the DW field equations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DwResidual {
    /// `|∂ᵢpⁱₐ + ∂H/∂yᵃ|`
    pub momentum: f64,
    /// `|∂ᵢyᵃ − ∂H/∂pⁱₐ|`
    pub field: f64,
}

impl DwResidual {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.field)
    }
}

pub fn dw_equations_residual(
    model: &ScalarModel,
    sampler: &dyn SolutionSampler,
    points: &[Vec<f64>],
) -> Result<DwResidual> {
    let (n, m) = (model.n(), model.m());
    let mut out = DwResidual {
        momentum: 0.0,
        field: 0.0,
    };
    for x in points {
        if x.len() != n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let s = sampler.sample(x)?;
        s.validate(n, m)?;
        let dv = model.potential_gradient(&s.y);
        let dh_dp = hamiltonian_p_gradient(model, &s.p);
        for a in 0..m {
            let div: f64 = (0..n).map(|i| s.dp[i][i][a]).sum();
            out.momentum = out.momentum.max((div + dv[a]).abs());
            for i in 0..n {
                out.field = out.field.max((s.dy[i][a] - dh_dp[i][a]).abs());
            }
        }
    }
    Ok(out)
}

/// The `n` functions `Sⁱ(x, y)` of the DW Hamilton–Jacobi equation.
pub trait HjFunctions {
    fn values(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    /// `∂ᵢSⁱ` (explicit spacetime divergence).
    fn divergence(&self, x: &[f64], y: &[f64]) -> f64;
    /// `grad[i][a] = ∂Sⁱ/∂yᵃ`.
    fn field_gradient(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>>;
}

/// Central-difference derivatives of `Sⁱ` supplied as a plain function.
pub struct FiniteDifferenceHj<F> {
    pub s: F,
    pub step: f64,
}

impl<F: Fn(&[f64], &[f64]) -> Vec<f64>> HjFunctions for FiniteDifferenceHj<F> {
    fn values(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (self.s)(x, y)
    }

    fn divergence(&self, x: &[f64], y: &[f64]) -> f64 {
        let h = self.step;
        (0..x.len())
            .map(|i| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[i] += h;
                minus[i] -= h;
                ((self.s)(&plus, y)[i] - (self.s)(&minus, y)[i]) / (2.0 * h)
            })
            .sum()
    }

    fn field_gradient(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        let h = self.step;
        let per_field: Vec<(Vec<f64>, Vec<f64>)> = (0..y.len())
            .map(|a| {
                let mut plus = y.to_vec();
                let mut minus = y.to_vec();
                plus[a] += h;
                minus[a] -= h;
                ((self.s)(x, &plus), (self.s)(x, &minus))
            })
            .collect();
        (0..x.len())
            .map(|i| {
                per_field
                    .iter()
                    .map(|(p, q)| (p[i] - q[i]) / (2.0 * h))
                    .collect()
            })
            .collect()
    }
}

/// Classical action of the unit-mass oscillator `H = ½p² + ½ω²y²` in one
/// dimension: `S(t, y) = −½ ω y² tan(ωt)`, valid for `|ωt| < π/2`.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorAction {
    pub omega: f64,
}

impl HjFunctions for OscillatorAction {
    fn values(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![-0.5 * self.omega * y[0] * y[0] * (self.omega * x[0]).tan()]
    }

    fn divergence(&self, x: &[f64], y: &[f64]) -> f64 {
        let sec = 1.0 / (self.omega * x[0]).cos();
        -0.5 * self.omega * self.omega * y[0] * y[0] * sec * sec
    }

    fn field_gradient(&self, x: &[f64], y: &[f64]) -> Vec<Vec<f64>> {
        vec![vec![-self.omega * y[0] * (self.omega * x[0]).tan()]]
    }
}

/// `|∂ᵢSⁱ + H(x, y, pⁱₐ = ∂Sⁱ/∂yᵃ)|` per point.
pub fn dwhj_residual(
    model: &ScalarModel,
    s: &dyn HjFunctions,
    points: &[(Vec<f64>, Vec<f64>)],
) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|(x, y)| {
            if x.len() != model.n() || y.len() != model.m() {
                return Err(Error::InvalidSolutionData(
                    "evaluation point does not match the model".into(),
                ));
            }
            let p = s.field_gradient(x, y);
            let div = s.divergence(x, y);
            if !div.is_finite() || p.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSolutionData(
                    "Hamilton-Jacobi functions are not finite at the point".into(),
                ));
            }
            Ok((div + dw_hamiltonian(model, y, &p)?).abs())
        })
        .collect()
}

/// Solution tabulated on a tensor grid, loaded from CSV.
///
/// Columns: `x0..x{n-1}`, `y0..y{m-1}`, `dy{i}_{a}` and optionally
/// `ddy{k}_{i}_{a} = ∂ₖ∂ᵢyᵃ`. With second derivatives every row is usable;
/// without them `∂ₖpⁱₐ` comes from central differences across grid
/// neighbours and only interior rows can be sampled.
#[derive(Debug, Clone)]
pub struct TabulatedSolution {
    metric: Metric,
    m: usize,
    rows: Vec<TableRow>,
    has_second: bool,
    axes: Vec<Vec<f64>>,
    index: HashMap<Vec<usize>, usize>,
}

#[derive(Debug, Clone)]
struct TableRow {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<Vec<f64>>,
    ddy: Option<Vec<Vec<Vec<f64>>>>,
}

const GRID_TOL: f64 = 1e-9;

impl TabulatedSolution {
    pub fn from_csv<R: Read>(reader: R, metric: Metric, m: usize) -> Result<Self> {
        let n = metric.dim();
        let bad = |msg: String| Error::InvalidSolutionData(msg);
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| bad(format!("unreadable header: {e}")))?
            .clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let need = |name: String| col(&name).ok_or_else(|| bad(format!("missing column {name}")));
        let xs = (0..n).map(|i| need(format!("x{i}"))).collect::<Result<Vec<_>>>()?;
        let ys = (0..m).map(|a| need(format!("y{a}"))).collect::<Result<Vec<_>>>()?;
        let dys = (0..n)
            .map(|i| (0..m).map(|a| need(format!("dy{i}_{a}"))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let has_second = col("ddy0_0_0").is_some();
        let ddys = if has_second {
            Some(
                (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|i| {
                                (0..m)
                                    .map(|a| need(format!("ddy{k}_{i}_{a}")))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
            let num = |c: usize| -> Result<f64> {
                let field = record
                    .get(c)
                    .ok_or_else(|| bad(format!("row {}: missing field", line + 1)))?;
                let v: f64 = field
                    .parse()
                    .map_err(|_| bad(format!("row {}: '{field}' is not a number", line + 1)))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(bad(format!("row {}: non-finite value", line + 1)))
                }
            };
            let x = xs.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>()?;
            let y = ys.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>()?;
            let dy = dys
                .iter()
                .map(|r| r.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let ddy = match &ddys {
                Some(cols) => Some(
                    cols.iter()
                        .map(|ki| {
                            ki.iter()
                                .map(|r| r.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>())
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            rows.push(TableRow { x, y, dy, ddy });
        }
        if rows.is_empty() {
            return Err(bad("no data rows".into()));
        }
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut vals: Vec<f64> = rows.iter().map(|r| r.x[i]).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup_by(|a, b| (*a - *b).abs() < GRID_TOL);
                vals
            })
            .collect();
        let expected: usize = axes.iter().map(Vec::len).product();
        if expected != rows.len() {
            return Err(bad(format!(
                "rows do not form a tensor grid: {} rows for {expected} grid nodes",
                rows.len()
            )));
        }
        let mut index = HashMap::new();
        for (r, row) in rows.iter().enumerate() {
            let key = locate(&axes, &row.x).ok_or_else(|| bad("row off grid".into()))?;
            if index.insert(key, r).is_some() {
                return Err(bad("duplicate grid node".into()));
            }
        }
        if !has_second {
            for axis in &axes {
                if axis.len() < 3 {
                    return Err(bad(
                        "without second derivatives every axis needs at least 3 nodes".into(),
                    ));
                }
                let h = axis[1] - axis[0];
                if axis.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
                    return Err(bad("grid spacing is not uniform".into()));
                }
            }
        }
        Ok(Self {
            metric,
            m,
            rows,
            has_second,
            axes,
            index,
        })
    }

    pub fn has_second_derivatives(&self) -> bool {
        self.has_second
    }

    /// Points at which [`SolutionSampler::sample`] succeeds.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .filter(|r| {
                self.has_second
                    || locate(&self.axes, &r.x).is_some_and(|key| {
                        key.iter()
                            .zip(&self.axes)
                            .all(|(&k, axis)| k > 0 && k + 1 < axis.len())
                    })
            })
            .map(|r| r.x.clone())
            .collect()
    }

    fn row_at(&self, key: &[usize]) -> Option<&TableRow> {
        self.index.get(key).map(|&r| &self.rows[r])
    }

    fn momenta(&self, row: &TableRow) -> Vec<Vec<f64>> {
        row.dy
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|d| self.metric.g(i) * d).collect())
            .collect()
    }
}

fn locate(axes: &[Vec<f64>], x: &[f64]) -> Option<Vec<usize>> {
    axes.iter()
        .zip(x)
        .map(|(axis, v)| axis.iter().position(|a| (a - v).abs() < GRID_TOL))
        .collect()
}

impl SolutionSampler for TabulatedSolution {
    fn sample(&self, x: &[f64]) -> Result<FieldSample> {
        let n = self.metric.dim();
        if x.len() != n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let key = locate(&self.axes, x)
            .ok_or_else(|| Error::InvalidSolutionData(format!("point {x:?} is not a grid node")))?;
        let row = self.row_at(&key).expect("indexed grid node");
        let p = self.momenta(row);
        let dp = match &row.ddy {
            Some(ddy) => (0..n)
                .map(|k| {
                    (0..n)
                        .map(|i| ddy[k][i].iter().map(|v| self.metric.g(i) * v).collect())
                        .collect()
                })
                .collect(),
            None => {
                let mut dp = Vec::with_capacity(n);
                for k in 0..n {
                    let mut up = key.clone();
                    let mut down = key.clone();
                    if key[k] == 0 || key[k] + 1 >= self.axes[k].len() {
                        return Err(Error::InvalidSolutionData(format!(
                            "point {x:?} lies on the grid boundary"
                        )));
                    }
                    up[k] += 1;
                    down[k] -= 1;
                    let (ru, rd) = (
                        self.row_at(&up).expect("interior neighbour"),
                        self.row_at(&down).expect("interior neighbour"),
                    );
                    let h = ru.x[k] - rd.x[k];
                    let (pu, pd) = (self.momenta(ru), self.momenta(rd));
                    dp.push(
                        pu.iter()
                            .zip(&pd)
                            .map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v) / h).collect())
                            .collect(),
                    );
                }
                dp
            }
        };
        let sample = FieldSample {
            y: row.y.clone(),
            p,
            dy: row.dy.clone(),
            dp,
        };
        sample.validate(n, self.m)?;
        Ok(sample)
    }
}

impl Default for ScalarModel {
    fn default() -> Self {
        Self::free(Metric::minkowski(2).expect("valid metric"), 1, (1, 1))
            .expect("valid free model")
    }
}

/// True when the potential has no terms (massless free field).
pub fn is_massless(model: &ScalarModel) -> bool {
    model.potential.is_zero() || model.potential.as_constant().is_some_and(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free2() -> ScalarModel {
        ScalarModel::free(Metric::minkowski(2).unwrap(), 1, (1, 1)).unwrap()
    }

    #[test]
    fn polymomenta_raise_the_index() {
        let model = free2();
        let jp = JetPoint {
            x: vec![0.0, 0.0],
            y: vec![0.0],
            dy: vec![vec![2.0], vec![3.0]],
        };
        assert_eq!(polymomenta(&model, &jp).unwrap(), vec![vec![2.0], vec![-3.0]]);
    }

    #[test]
    fn zero_jet_has_zero_polymomenta() {
        let model = free2();
        let jp = JetPoint {
            x: vec![1.0, 2.0],
            y: vec![0.3],
            dy: vec![vec![0.0], vec![0.0]],
        };
        assert_eq!(polymomenta(&model, &jp).unwrap(), vec![vec![0.0], vec![0.0]]);
    }

    #[test]
    fn multi_field_polymomenta_componentwise() {
        let model = ScalarModel::free(Metric::minkowski(3).unwrap(), 2, (1, 1)).unwrap();
        let jp = JetPoint {
            x: vec![0.0; 3],
            y: vec![0.0, 0.0],
            dy: vec![vec![1.0, -2.0], vec![0.5, 4.0], vec![-1.5, 3.0]],
        };
        let p = polymomenta(&model, &jp).unwrap();
        assert_eq!(p, vec![vec![1.0, -2.0], vec![-0.5, -4.0], vec![1.5, -3.0]]);
    }

    #[test]
    fn hamiltonian_values() {
        let model = free2();
        assert_eq!(dw_hamiltonian(&model, &[0.0], &[vec![0.0], vec![0.0]]).unwrap(), 0.0);
        assert_eq!(dw_hamiltonian(&model, &[1.0], &[vec![0.0], vec![0.0]]).unwrap(), 0.5);
    }

    #[test]
    fn potential_must_live_on_fields() {
        let v = Poly::var(3);
        assert!(ScalarModel::new(Metric::minkowski(2).unwrap(), 1, v).is_err());
    }

    #[test]
    fn static_vacuum_has_zero_residual() {
        let model = free2();
        let sampler = ConstantField { n: 2, y: vec![0.0] };
        let r = dw_equations_residual(&model, &sampler, &[vec![0.1, 0.2], vec![3.0, -1.0]]).unwrap();
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn malformed_sample_is_rejected() {
        struct Broken;
        impl SolutionSampler for Broken {
            fn sample(&self, _x: &[f64]) -> Result<FieldSample> {
                Ok(FieldSample {
                    y: vec![f64::NAN],
                    p: vec![vec![0.0]; 2],
                    dy: vec![vec![0.0]; 2],
                    dp: vec![vec![vec![0.0]; 2]; 2],
                })
            }
        }
        let r = dw_equations_residual(&free2(), &Broken, &[vec![0.0, 0.0]]);
        assert!(matches!(r, Err(Error::InvalidSolutionData(_))));
    }

    #[test]
    fn trivial_hj_functions_have_zero_residual() {
        let model = ScalarModel::new(Metric::minkowski(2).unwrap(), 1, Poly::zero()).unwrap();
        let s = FiniteDifferenceHj {
            s: |_x: &[f64], _y: &[f64]| vec![0.0, 0.0],
            step: 1e-4,
        };
        let r = dwhj_residual(&model, &s, &[(vec![0.3, 0.1], vec![0.7])]).unwrap();
        assert_eq!(r, vec![0.0]);
        assert!(is_massless(&model));
    }

    #[test]
    fn csv_requires_columns() {
        let data = "x0,x1,y0\n0,0,1\n";
        let r = TabulatedSolution::from_csv(data.as_bytes(), Metric::minkowski(2).unwrap(), 1);
        assert!(matches!(r, Err(Error::InvalidSolutionData(_))));
    }
}
