//! Clifford wave functions `Ψ = ψ + ψⁱγᵢ`: separated modes, superpositions
//! and sampled grids.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::eigen::{eigensolve, Domain};
use super::spectral::{apply_line, SpectralFunction};
use super::{QuantumModel, YFunction};
use crate::clifford::{grade, Metric, Multivector};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One separated component `A e^{i s·x} f(y)` together with its vector
/// partner `ψᵢ = −(ħκ/χ) sᵢ A e^{i s·x} f(y)`, which is
/// `(iħκ/χ)∂ᵢφ · f` for `φ = A e^{i s·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTerm {
    pub amplitude: Complex64,
    /// Phase covector `sᵢ`; a mode `e^{i(ωt − k·x)}` has `s = (ω, −k)`.
    pub covector: Vec<f64>,
    /// `−ħκ/χ`.
    pub vector_factor: f64,
    pub profile: SpectralFunction,
}

impl ModeTerm {
    fn coefficient(&self, c: usize) -> f64 {
        if c == 0 {
            1.0
        } else {
            self.vector_factor * self.covector[c - 1]
        }
    }

    fn phase(&self, x: &[f64]) -> Complex64 {
        let theta: f64 = self.covector.iter().zip(x).map(|(s, x)| s * x).sum();
        self.amplitude * Complex64::from_polar(1.0, theta)
    }
}

/// Finite superposition of separated modes, evaluated analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWave {
    metric: Metric,
    terms: Vec<ModeTerm>,
}

/// Values of `(ψ, ψ₀, …, ψₙ₋₁)` (lower index) and the derivatives entering
/// the residuals at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveJet {
    pub values: Vec<Complex64>,
    /// `dx[j][c] = ∂ⱼ` of component `c`.
    pub dx: Vec<Vec<Complex64>>,
    /// `Ĥ` applied to each component.
    pub h: Vec<Complex64>,
    /// `□ψ = gⁱⁱ∂ᵢ∂ᵢψ`.
    pub box_psi: Complex64,
    /// `Ĥ²ψ`.
    pub h2_psi: Complex64,
}

impl WaveJet {
    fn zero(n: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            values: vec![zero; n + 1],
            dx: vec![vec![zero; n + 1]; n],
            h: vec![zero; n + 1],
            box_psi: zero,
            h2_psi: zero,
        }
    }

    /// `ψ + ψⁱγᵢ`.
    pub fn multivector(&self, metric: &Metric) -> Multivector {
        let mut mv = Multivector::vector_lower(metric, &self.values[1..]);
        mv.set_coeff(0, self.values[0]);
        mv
    }
}

fn check_point(n: usize, point: &[f64]) -> Result<()> {
    if point.len() != n + 1 {
        return Err(Error::InvalidDomain(format!(
            "expected a point (x0..x{}, y), got {} coordinates",
            n - 1,
            point.len()
        )));
    }
    if point.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDomain("non-finite evaluation point".into()));
    }
    Ok(())
}

impl SpectralWave {
    pub fn zero(metric: Metric) -> Self {
        Self {
            metric,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(metric: Metric, terms: Vec<ModeTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.covector.len() != metric.dim()) {
            return Err(Error::InvalidParameter("mode covector has the wrong dimension".into()));
        }
        Ok(Self { metric, terms })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn terms(&self) -> &[ModeTerm] {
        &self.terms
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.amplitude *= c);
        out
    }

    pub fn superpose(&self, other: &Self) -> Result<Self> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    /// Jet at `(x, y)` from closed-form spacetime derivatives and exact
    /// spectral application of `Ĥ`.
    pub fn jet(&self, model: &QuantumModel, point: &[f64]) -> Result<WaveJet> {
        let n = self.metric.dim();
        if model.metric() != &self.metric {
            return Err(Error::MetricMismatch);
        }
        check_point(n, point)?;
        let (x, y) = point.split_at(n);
        let y = y[0];
        let a = model.kinetic_coeff();
        let v = model.potential_coeffs();
        let mut jet = WaveJet::zero(n);
        for term in &self.terms {
            let phi = term.phase(x);
            let hf = term.profile.apply_operator(a, &v);
            let h2f = hf.apply_operator(a, &v);
            let (f, hf, h2f) = (term.profile.eval(y), hf.eval(y), h2f.eval(y));
            let s_sq: f64 = (0..n).map(|i| self.metric.g(i) * term.covector[i].powi(2)).sum();
            for c in 0..=n {
                let coef = term.coefficient(c);
                let val = phi * (coef * f);
                jet.values[c] += val;
                jet.h[c] += phi * (coef * hf);
                for j in 0..n {
                    jet.dx[j][c] += I * term.covector[j] * val;
                }
            }
            jet.box_psi -= phi * (s_sq * f);
            jet.h2_psi += phi * h2f;
        }
        Ok(jet)
    }

    /// Samples all components on a tensor grid; separable, so each profile
    /// is evaluated once per `y` node.
    pub fn sample(&self, axes: Vec<Axis>) -> Result<GridWave> {
        let n = self.metric.dim();
        if axes.len() != n + 1 {
            return Err(Error::InvalidDomain(format!("expected {} axes", n + 1)));
        }
        let shape = GridShape::new(&axes)?;
        let y_axis = &axes[n];
        let profiles: Vec<Vec<f64>> = self
            .terms
            .iter()
            .map(|t| (0..y_axis.count).map(|j| t.profile.eval(y_axis.node(j))).collect())
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        let mut comps = vec![vec![zero; shape.total]; n + 1];
        let outer = shape.total / y_axis.count;
        let mut x = vec![0.0; n];
        for o in 0..outer {
            let idx = shape.unflatten(o * y_axis.count);
            for i in 0..n {
                x[i] = axes[i].node(idx[i]);
            }
            for (t, term) in self.terms.iter().enumerate() {
                let phi = term.phase(&x);
                for c in 0..=n {
                    let cphi = phi * term.coefficient(c);
                    let base = o * y_axis.count;
                    for (j, f) in profiles[t].iter().enumerate() {
                        comps[c][base + j] += cphi * f;
                    }
                }
            }
        }
        GridWave::new(self.metric.clone(), axes, comps)
    }
}

/// A separated solution `Ψ = Φ(x) f_N(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub level: usize,
    /// Spatial wavevector `k` (`n − 1` components).
    pub k: Vec<f64>,
    pub chi: f64,
    pub omega: f64,
    pub profile: SpectralFunction,
    pub wave: SpectralWave,
}

/// `ψ = e^{i(ωt − k·x)} f_N(y)`, `ψᵢ = (iħκ/χ_N)∂ᵢφ f_N(y)`, with `ω > 0`
/// fixed by `gⁱⁱsᵢsᵢ = χ_N²/ħ²κ²`.
pub fn assemble_mode(model: &QuantumModel, level: usize, k: &[f64]) -> Result<ModeSolution> {
    let n = model.n();
    if k.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "expected {} spatial wavevector components, got {}",
            n - 1,
            k.len()
        )));
    }
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite wavevector".into()));
    }
    let pair = eigensolve(model, level, Domain::Spectral)?
        .pop()
        .expect("eigensolve returns level + 1 pairs");
    let YFunction::Spectral(profile) = pair.function else {
        unreachable!("spectral domain yields spectral functions")
    };
    let chi = pair.chi;
    if chi <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue chi_{level} = {chi} is not positive"
        )));
    }
    let metric = model.metric();
    let mass_shell = (chi / model.hk()).powi(2);
    let spatial: f64 = k
        .iter()
        .enumerate()
        .map(|(j, kj)| metric.g(j + 1) * kj * kj)
        .sum();
    let omega_sq = (mass_shell - spatial) * metric.g(0);
    if omega_sq < 0.0 {
        return Err(Error::TachyonicMode { level, omega_sq });
    }
    let omega = omega_sq.sqrt();
    let mut covector = vec![omega];
    covector.extend(k.iter().map(|v| -v));
    let term = ModeTerm {
        amplitude: Complex64::new(1.0, 0.0),
        covector,
        vector_factor: -model.hk() / chi,
        profile: profile.clone(),
    };
    Ok(ModeSolution {
        level,
        k: k.to_vec(),
        chi,
        omega,
        profile,
        wave: SpectralWave::from_terms(metric.clone(), vec![term])?,
    })
}

/// `½[mode(ω, k) + mode(−ω, −k)]`: scalar part `cos(ωt − k·x) f_N`, vector
/// part purely imaginary.
pub fn standing_mode(model: &QuantumModel, level: usize, k: &[f64]) -> Result<SpectralWave> {
    let mode = assemble_mode(model, level, k)?;
    let forward = mode.wave.terms[0].clone();
    let mut backward = forward.clone();
    backward.covector.iter_mut().for_each(|s| *s = -*s);
    let half = Complex64::new(0.5, 0.0);
    let terms = vec![
        ModeTerm {
            amplitude: half,
            ..forward
        },
        ModeTerm {
            amplitude: half,
            ..backward
        },
    ];
    SpectralWave::from_terms(model.metric().clone(), terms)
}

/// Scalar and lower-index vector components of a multivector restricted to
/// the `ψ + ψⁱγᵢ` truncation.
pub fn multivector_truncation(mv: &Multivector) -> Result<(Complex64, Vec<Complex64>)> {
    if let Some(b) = (0..mv.coeffs().len()).find(|&b| grade(b) >= 2 && mv.coeff(b).norm() != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "component of grade {} lies outside the scalar + vector truncation",
            grade(b)
        )));
    }
    let metric = mv.metric();
    let lower = (0..metric.dim())
        .map(|i| mv.vector_coeff(i) * metric.g(i))
        .collect();
    Ok((mv.scalar_part(), lower))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(Error::InvalidDomain(format!("bad axis ({start}, {step})")));
        }
        if count < 5 {
            return Err(Error::InvalidDomain(format!(
                "every axis needs at least 5 points, got {count}"
            )));
        }
        Ok(Self { start, step, count })
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    fn locate(&self, v: f64) -> Option<usize> {
        let j = ((v - self.start) / self.step).round();
        if j < 0.0 || j as usize >= self.count {
            return None;
        }
        ((self.node(j as usize) - v).abs() <= 1e-9 * self.step).then_some(j as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct GridShape {
    counts: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl GridShape {
    fn new(axes: &[Axis]) -> Result<Self> {
        for a in axes {
            Axis::new(a.start, a.step, a.count)?;
        }
        let counts: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let mut strides = vec![1; counts.len()];
        for d in (0..counts.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * counts[d + 1];
        }
        Ok(Self {
            total: counts.iter().product(),
            counts,
            strides,
        })
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let i = flat / s;
                flat %= s;
                i
            })
            .collect()
    }
}

/// Components sampled on a uniform tensor grid over `(x⁰, …, xⁿ⁻¹, y)`,
/// last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWave {
    metric: Metric,
    axes: Vec<Axis>,
    shape: GridShape,
    /// `comps[c][node]`, `c = 0` scalar, `c = 1 + i` for `ψᵢ`.
    comps: Vec<Vec<Complex64>>,
}

impl GridWave {
    pub fn new(metric: Metric, axes: Vec<Axis>, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = metric.dim();
        if axes.len() != n + 1 {
            return Err(Error::InvalidDomain(format!("expected {} axes", n + 1)));
        }
        let shape = GridShape::new(&axes)?;
        if comps.len() != n + 1 || comps.iter().any(|c| c.len() != shape.total) {
            return Err(Error::InvalidDomain("component arrays do not match the grid".into()));
        }
        if comps.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDomain("non-finite wave component".into()));
        }
        Ok(Self {
            metric,
            axes,
            shape,
            comps,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.shape.total
    }

    pub fn is_empty(&self) -> bool {
        self.shape.total == 0
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn node_index(&self, point: &[f64]) -> Result<Vec<usize>> {
        check_point(self.metric.dim(), point)?;
        self.axes
            .iter()
            .zip(point)
            .map(|(a, v)| a.locate(*v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidDomain(format!("{point:?} is not a grid node")))
    }

    pub fn node(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(i, a)| a.node(*i)).collect()
    }

    pub(crate) fn value(&self, c: usize, idx: &[usize]) -> Complex64 {
        self.comps[c][self.shape.flatten(idx)]
    }

    pub(crate) fn shifted(idx: &[usize], axis: usize, delta: isize) -> Vec<usize> {
        let mut out = idx.to_vec();
        out[axis] = (out[axis] as isize + delta) as usize;
        out
    }

    /// Central difference along `axis` at `idx`.
    pub(crate) fn central(&self, c: usize, idx: &[usize], axis: usize) -> Complex64 {
        let h = self.axes[axis].step;
        (self.value(c, &Self::shifted(idx, axis, 1)) - self.value(c, &Self::shifted(idx, axis, -1)))
            * (0.5 / h)
    }

    pub(crate) fn has_margin(&self, idx: &[usize], spacetime: usize, field: usize) -> bool {
        let n = self.metric.dim();
        idx.iter().enumerate().all(|(d, &i)| {
            let m = if d == n { field } else { spacetime };
            i >= m && i + m < self.axes[d].count
        })
    }

    /// Jet at a grid node by central differences; `Ĥ` uses the five-point
    /// stencil along `y`.
    pub fn jet(&self, model: &QuantumModel, point: &[f64]) -> Result<WaveJet> {
        let n = self.metric.dim();
        if model.metric() != &self.metric {
            return Err(Error::MetricMismatch);
        }
        let idx = self.node_index(point)?;
        if !self.has_margin(&idx, 1, 4) {
            return Err(Error::InvalidDomain(format!(
                "{point:?} is too close to the grid boundary for the difference stencils"
            )));
        }
        let a = model.kinetic_coeff();
        let y_axis = self.axes[n];
        let line = |c: usize| -> (Vec<Complex64>, f64) {
            let vals: Vec<Complex64> = (-4..=4)
                .map(|d| self.value(c, &Self::shifted(&idx, n, d)))
                .collect();
            (vals, y_axis.node(idx[n]) - 4.0 * y_axis.step)
        };
        let pot = |y: f64| model.potential_value(y);
        let mut jet = WaveJet::zero(n);
        for c in 0..=n {
            jet.values[c] = self.value(c, &idx);
            for j in 0..n {
                jet.dx[j][c] = self.central(c, &idx, j);
            }
            let (vals, y0) = line(c);
            jet.h[c] = apply_line(&vals, y0, y_axis.step, a, &pot)[4];
            if c == 0 {
                let h1 = apply_line(&vals, y0, y_axis.step, a, &pot);
                jet.h2_psi = apply_line(&h1[2..7], y0 + 2.0 * y_axis.step, y_axis.step, a, &pot)[2];
            }
        }
        for j in 0..n {
            let h = self.axes[j].step;
            let d2 = self.value(0, &Self::shifted(&idx, j, 1)) - self.value(0, &idx) * 2.0
                + self.value(0, &Self::shifted(&idx, j, -1));
            jet.box_psi += d2 * (self.metric.g(j) / (h * h));
        }
        Ok(jet)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let n = self.metric.dim();
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidDomain(format!("write failed: {e}"));
        let mut header = vec!["t".to_string()];
        header.extend((1..n).map(|i| format!("x{i}")));
        header.push("y".into());
        header.extend(["psi_re".into(), "psi_im".into()]);
        for i in 0..n {
            header.push(format!("psi{i}_re"));
            header.push(format!("psi{i}_im"));
        }
        w.write_record(&header).map_err(io)?;
        for flat in 0..self.shape.total {
            let idx = self.shape.unflatten(flat);
            let mut row: Vec<String> = self.node(&idx).iter().map(|v| format!("{v:e}")).collect();
            for c in &self.comps {
                row.push(format!("{:e}", c[flat].re));
                row.push(format!("{:e}", c[flat].im));
            }
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidDomain(format!("write failed: {e}")))?;
        Ok(())
    }

    /// Reads the columnar layout written by [`GridWave::write_csv`]. Columns
    /// for grade-two and higher components (`psi01_re`, …) are rejected.
    pub fn read_csv<R: Read>(reader: R, metric: Metric) -> Result<Self> {
        let n = metric.dim();
        let bad = |m: String| Error::InvalidSolutionData(m);
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| bad(format!("header: {e}")))?.clone();
        if let Some(h) = headers.iter().find(|h| {
            h.strip_prefix("psi")
                .and_then(|r| r.split('_').next())
                .is_some_and(|digits| digits.len() >= 2 && digits.chars().all(|c| c.is_ascii_digit()))
        }) {
            return Err(Error::InvalidParameter(format!(
                "column {h} holds a higher-grade component outside the scalar + vector truncation"
            )));
        }
        let mut coord_names = vec!["t".to_string()];
        coord_names.extend((1..n).map(|i| format!("x{i}")));
        coord_names.push("y".into());
        let mut comp_names = vec![("psi_re".to_string(), "psi_im".to_string())];
        comp_names.extend((0..n).map(|i| (format!("psi{i}_re"), format!("psi{i}_im"))));
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| bad(format!("missing column {name}")))
        };
        let coord_cols = coord_names.iter().map(|c| col(c)).collect::<Result<Vec<_>>>()?;
        let comp_cols = comp_names
            .iter()
            .map(|(r, i)| Ok((col(r)?, col(i)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut rows: Vec<(Vec<f64>, Vec<Complex64>)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
            let num = |c: usize| -> Result<f64> {
                let s = rec.get(c).unwrap_or("");
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("row {}: bad number '{s}'", line + 1)))
            };
            let coords = coord_cols.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>()?;
            let vals = comp_cols
                .iter()
                .map(|&(r, i)| Ok(Complex64::new(num(r)?, num(i)?)))
                .collect::<Result<Vec<_>>>()?;
            rows.push((coords, vals));
        }
        let axes = (0..=n)
            .map(|d| {
                let mut v: Vec<f64> = rows.iter().map(|r| r.0[d]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + b.abs()));
                if v.len() < 2 {
                    return Err(bad(format!("axis {d} has fewer than 2 distinct values")));
                }
                let step = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
                if v.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-6 * step) {
                    return Err(bad(format!("axis {d} is not uniform")));
                }
                Axis::new(v[0], step, v.len()).map_err(|e| bad(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let shape = GridShape::new(&axes)?;
        if rows.len() != shape.total {
            return Err(bad(format!(
                "{} rows do not fill the {} node grid",
                rows.len(),
                shape.total
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut comps = vec![vec![zero; shape.total]; n + 1];
        let mut seen = vec![false; shape.total];
        for (coords, vals) in rows {
            let idx = axes
                .iter()
                .zip(&coords)
                .map(|(a, v)| {
                    let j = ((v - a.start) / a.step).round();
                    ((j - (v - a.start) / a.step).abs() < 1e-6).then_some(j as usize)
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad(format!("row at {coords:?} is off the grid")))?;
            let flat = shape.flatten(&idx);
            if std::mem::replace(&mut seen[flat], true) {
                return Err(bad(format!("duplicate node {coords:?}")));
            }
            for (c, v) in vals.into_iter().enumerate() {
                comps[c][flat] = v;
            }
        }
        Self::new(metric, axes, comps)
    }
}

/// Either representation of a truncated Clifford wave function.
#[derive(Debug, Clone, PartialEq)]
pub enum WaveComponents {
    Spectral(SpectralWave),
    Grid(GridWave),
}

impl WaveComponents {
    pub fn metric(&self) -> &Metric {
        match self {
            Self::Spectral(w) => w.metric(),
            Self::Grid(g) => g.metric(),
        }
    }

    pub fn jet(&self, model: &QuantumModel, point: &[f64]) -> Result<WaveJet> {
        match self {
            Self::Spectral(w) => w.jet(model, point),
            Self::Grid(g) => g.jet(model, point),
        }
    }
}

impl From<SpectralWave> for WaveComponents {
    fn from(w: SpectralWave) -> Self {
        Self::Spectral(w)
    }
}

impl From<GridWave> for WaveComponents {
    fn from(g: GridWave) -> Self {
        Self::Grid(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_mode_dispersion() {
        let model = QuantumModel::new(Metric::minkowski(2).unwrap(), 1.4, 0.8, 2.5).unwrap();
        let mode = assemble_mode(&model, 0, &[0.6]).unwrap();
        let lhs = mode.omega * mode.omega - 0.36;
        let rhs = (0.5 * model.mass() / model.hbar()).powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn euclidean_signature_can_be_tachyonic() {
        let model = QuantumModel::new(Metric::euclidean(2).unwrap(), 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            assemble_mode(&model, 0, &[3.0]),
            Err(Error::TachyonicMode { level: 0, .. })
        ));
    }

    #[test]
    fn rest_frame_vector_part() {
        let model = QuantumModel::free_default();
        let mode = assemble_mode(&model, 0, &[0.0]).unwrap();
        assert!((mode.omega - 0.5).abs() < 1e-12);
        let jet = mode.wave.jet(&model, &[0.3, 0.2, 0.1]).unwrap();
        // ψ₀ = (iħκ/χ)(iω)ψ = −ψ when ω = χ/ħκ; ψ₁ = 0
        assert!((jet.values[1] + jet.values[0]).norm() < 1e-12);
        assert!(jet.values[2].norm() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let model = QuantumModel::free_default();
        let wave = standing_mode(&model, 1, &[0.5]).unwrap();
        let axes = vec![
            Axis::new(0.0, 0.1, 5).unwrap(),
            Axis::new(-0.2, 0.1, 5).unwrap(),
            Axis::new(-1.0, 0.25, 9).unwrap(),
        ];
        let grid = wave.sample(axes).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let back = GridWave::read_csv(buf.as_slice(), model.metric().clone()).unwrap();
        for c in 0..3 {
            for (p, q) in grid.component(c).iter().zip(back.component(c)) {
                assert!((p - q).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn higher_grade_columns_are_rejected() {
        let data = "t,x1,y,psi_re,psi_im,psi0_re,psi0_im,psi1_re,psi1_im,psi01_re,psi01_im\n";
        let r = GridWave::read_csv(data.as_bytes(), Metric::minkowski(2).unwrap());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bivector_is_outside_the_truncation() {
        let metric = Metric::minkowski(2).unwrap();
        let mv = Multivector::blade(&metric, 0b11, Complex64::new(1.0, 0.0));
        assert!(multivector_truncation(&mv).is_err());
        let v = Multivector::generator(&metric, 1);
        let (s, lower) = multivector_truncation(&v).unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));
        assert_eq!(lower[1], Complex64::new(-1.0, 0.0));
    }
}
