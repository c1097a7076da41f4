//! Residuals of the DW field equations, the equations of motion of the
//! canonical variables, and the mechanics Hamilton-Jacobi equation.

use num_rational::BigRational;
use serde_json::json;

use dwq_core::clifford::Metric;
use dwq_core::dwmech::{dw_equations_residual, dwhj_residual, OscillatorAction, ScalarModel, TabulatedSolution};
use dwq_core::gradedforms::{equation_of_motion_residual, HorizontalForm, Monomial, Poly};

use super::num;
use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::Failure;

const BUNDLED: &str = include_str!("../../fixtures/plane_wave.csv");

fn load(cfg: &RunConfig, metric: Metric) -> Result<TabulatedSolution, Failure> {
    match &cfg.dw_check.solution {
        Some(path) => {
            let path = cfg.resolve(path);
            let file = std::fs::File::open(&path)
                .map_err(|e| Failure::Data(format!("cannot open {}: {e}", path.display())))?;
            Ok(TabulatedSolution::from_csv(file, metric, cfg.model.m)?)
        }
        None => Ok(TabulatedSolution::from_csv(BUNDLED.as_bytes(), metric, cfg.model.m)?),
    }
}

/// `H = ½p² + ½μ²y²` with `μ = m/ħ`, solved by `S = −½μy² tan(μt)`.
fn oscillator_check(cfg: &RunConfig) -> Result<f64, Failure> {
    let mu = cfg.model.mass / cfg.model.hbar;
    let half_mu_sq = BigRational::from_float(0.5 * mu * mu)
        .ok_or_else(|| Failure::Config(format!("mass/hbar = {mu} is not representable")))?;
    let v = Poly::term(half_mu_sq, Monomial::from_powers([(0, 2)]));
    let model = ScalarModel::new(Metric::minkowski(1)?, 1, v)?;
    // |μt| ≤ 0.6 stays clear of the pole of the tangent
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..9)
        .map(|j| (vec![(-0.6 + 0.15 * j as f64) / mu], vec![-1.0 + 0.27 * j as f64]))
        .collect();
    let r = dwhj_residual(&model, &OscillatorAction { omega: mu }, &points)?;
    Ok(r.into_iter().fold(0.0, f64::max))
}

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Report, Failure> {
    let metric = cfg.metric().map_err(Failure::Config)?;
    let model = cfg.classical_model().map_err(Failure::Config)?;
    let table = load(cfg, metric)?;
    let points = table.points();
    if points.is_empty() {
        return Err(Failure::Data("solution has no evaluable points".into()));
    }
    let ctx = model.phase_context()?;
    let (n, m) = (model.n(), model.m());
    let forms: Vec<HorizontalForm> = (0..m)
        .map(|a| HorizontalForm::function(ctx, ctx.y(a)))
        .chain((0..m).map(|a| HorizontalForm::polymomentum(ctx, a)))
        .collect();

    let mut columns: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    columns.extend(["field_equations", "motion"].map(String::from));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut rows = Table::new("dw_check", &columns);

    let mut motion_per_point = vec![0.0f64; points.len()];
    let mut motion_max = 0.0f64;
    for f in &forms {
        let r = equation_of_motion_residual(f, &model, &table, &points)?;
        for (acc, v) in motion_per_point.iter_mut().zip(&r.per_point) {
            *acc = acc.max(*v);
        }
        motion_max = motion_max.max(r.max);
    }
    for (p, motion) in points.iter().zip(&motion_per_point) {
        let field = dw_equations_residual(&model, &table, std::slice::from_ref(p))?.max();
        let mut row: Vec<_> = p.iter().map(|v| json!(v)).collect();
        row.extend([num(field), num(*motion)]);
        rows.push(row);
    }

    let total = dw_equations_residual(&model, &table, &points)?;
    let tol = cfg.tolerances.residual;
    let mut report = Report::new("dw-check", seed);
    report.note("points", points.len() as f64);
    report.bound("field equations: momentum", total.momentum, tol);
    report.bound("field equations: field", total.field, tol);
    report.bound("equations of motion of y and p", motion_max, tol);
    report.bound("oscillator Hamilton-Jacobi", oscillator_check(cfg)?, tol);
    report.tables.push(rows);
    Ok(report)
}
