//! Gaussian coefficient of the composed vacuum amplitude against the
//! functional Schrödinger vacuum over a wavenumber grid.

use dwq_core::vacuum::{compare, CutoffConfig, KappaChoice};

use super::num;
use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::Failure;

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Report, Failure> {
    let (m, v) = (&cfg.model, &cfg.vacuum);
    let cutoff = CutoffConfig::new(v.cutoff, v.volume, m.n, m.hbar, m.mass)?;
    let choice = if v.counterfactual { KappaChoice::Counterfactual } else { KappaChoice::Identified };
    let k_unit = m.mass / m.hbar;
    let ks: Vec<f64> = match &v.k {
        Some(ks) => ks.clone(),
        None if v.points == 1 => vec![0.0],
        None => (0..v.points)
            .map(|j| v.band * k_unit * j as f64 / (v.points - 1) as f64)
            .collect(),
    };
    let rows = compare(&cutoff, &ks, choice)?;
    let at_zero = compare(&cutoff, &[0.0], choice)?[0].ratio;

    let mut table = Table::new("vacuum", &["k", "functional_coeff", "composed_coeff", "ratio"]);
    for r in &rows {
        table.push(vec![num(r.k), num(r.functional_coeff), num(r.composed_coeff), num(r.ratio)]);
    }
    // ħ|k|/m ≤ band
    let band_dev = rows
        .iter()
        .filter(|r| r.k.abs() <= v.band * k_unit)
        .map(|r| (r.ratio / at_zero - 1.0).abs())
        .fold(0.0, f64::max);

    let expected = if v.counterfactual { 0.5 } else { 1.0 };
    let mut report = Report::new("vacuum", seed);
    report.note("ratio at k = 0", at_zero);
    report.bound("|ratio(0) - expected|", (at_zero - expected).abs(), 0.0);
    report.bound("long-wave band max |ratio/ratio(0) - 1|", band_dev, cfg.tolerances.vacuum);
    report.tables.push(table);
    Ok(report)
}
