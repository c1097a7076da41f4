//! Spectrum of the DW Hamiltonian operator, separated modes and the
//! conservation law of their superposition.

use num_complex::Complex64;
use serde_json::json;

use dwq_core::quantum::{
    assemble_mode, conservation_convergence, eigensolve, gamma_form_residual,
    schrodinger_residual, second_order_residual, Domain, ModeSolution, QuantumModel, Region,
    SpectralWave, WaveComponents,
};

use super::{join, num};
use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::Failure;

/// Weight of the `j`-th mode in the superposition is `cʲ`.
const MIX: Complex64 = Complex64::new(0.6, -0.2);

/// Six spacetime-field points spread over a few oscillator lengths.
fn probe_points(model: &QuantumModel) -> Vec<Vec<f64>> {
    let n = model.n();
    (0..6)
        .map(|t| {
            let mut p: Vec<f64> = (0..n).map(|i| 0.3 * t as f64 - 0.2 * i as f64).collect();
            p.push(model.oscillator_length() * (-1.5 + 0.6 * t as f64));
            p
        })
        .collect()
}

fn superpose(modes: &[ModeSolution]) -> Result<SpectralWave, Failure> {
    let mut wave = modes[0].wave.clone();
    let mut weight = Complex64::new(1.0, 0.0);
    for mode in &modes[1..] {
        weight *= MIX;
        wave = wave.superpose(&mode.wave.scale(weight))?;
    }
    Ok(wave)
}

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Report, Failure> {
    let model = cfg.quantum_model().map_err(Failure::Config)?;
    let tol = &cfg.tolerances;
    let mut report = Report::new("quantum", seed);

    let pairs = eigensolve(&model, cfg.quantum.n_max, Domain::Spectral)?;
    let km = model.kappa() * model.mass();
    let mut spectrum = Table::new("spectrum", &["N", "chi", "chi_over_kappa_m", "residual"]);
    let mut worst_residual = 0.0f64;
    let mut worst_ladder = 0.0f64;
    for p in &pairs {
        spectrum.push(vec![json!(p.level), num(p.chi), num(p.chi / km), num(p.residual)]);
        worst_residual = worst_residual.max(p.residual);
        worst_ladder = worst_ladder.max((p.chi / km - (p.level as f64 + 0.5)).abs());
    }
    report.bound("eigenpair residual", worst_residual, tol.spectral);
    if cfg.is_free() {
        report.bound("free spectrum |chi/(kappa m) - (N + 1/2)|", worst_ladder, tol.spectral);
    }
    report.tables.push(spectrum);

    let points = probe_points(&model);
    let requested = cfg.quantum.modes(model.n());
    let mut table = Table::new(
        "modes",
        &["N", "k", "chi", "omega", "component_residual", "gamma_residual", "second_order"],
    );
    let mut modes = Vec::with_capacity(requested.len());
    let (mut worst_component, mut worst_second) = (0.0f64, 0.0f64);
    for req in &requested {
        let mode = assemble_mode(&model, req.level, &req.k)?;
        let wave = WaveComponents::from(mode.wave.clone());
        let component = schrodinger_residual(&model, &wave, &points)?.max();
        let mut gamma = 0.0f64;
        for p in &points {
            gamma = gamma.max(gamma_form_residual(&model, &wave, p)?.max_norm());
        }
        let second = second_order_residual(&model, &wave, &points)?;
        worst_component = worst_component.max(component).max(gamma);
        worst_second = worst_second.max(second);
        table.push(vec![
            json!(req.level),
            json!(join(&req.k)),
            num(mode.chi),
            num(mode.omega),
            num(component),
            num(gamma),
            num(second),
        ]);
        modes.push(mode);
    }
    report.tables.push(table);
    if modes.is_empty() {
        report.warn("no modes configured; mode and conservation checks skipped".into());
        return Ok(report);
    }
    report.bound("mode residual", worst_component, tol.residual);
    report.bound("second-order consequence", worst_second, tol.spectral);

    let wave = superpose(&modes)?;
    let g = &cfg.grid;
    let region = Region::new(vec![-g.half_width; model.n() + 1], vec![g.half_width; model.n() + 1])?;
    let study = conservation_convergence(&model, &wave, &region, g.base_cells, g.levels)?;
    let mut conservation = Table::new("conservation", &["spacing", "grid", "residual"]);
    for ((h, r), sizes) in study.spacings.iter().zip(&study.residuals).zip(&study.grid_sizes) {
        let grid: Vec<String> = sizes.iter().map(|c| c.to_string()).collect();
        conservation.push(vec![num(*h), json!(grid.join("x")), num(*r)]);
    }
    report.tables.push(conservation);
    report.records.extend(study.records("conservation"));
    report.check(
        "conservation convergence order",
        study.order,
        Some(tol.order),
        (study.order - 2.0).abs() <= tol.order,
    );
    Ok(report)
}
