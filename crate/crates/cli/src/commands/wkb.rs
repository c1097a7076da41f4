//! Quasiclassical analysis of a standing mode and the ħκ scaling of the
//! quantum potential.

use serde_json::{json, Value};

use dwq_core::quantum::{extract_wkb, hk_sweep, standing_mode, wkb_residual, WaveComponents};
use dwq_core::Error;

use super::num;
use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::Failure;

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Report, Failure> {
    let model = cfg.quantum_model().map_err(Failure::Config)?;
    let w = &cfg.wkb;
    let k = w.k.clone().unwrap_or_else(|| vec![0.0; model.n() - 1]);
    let wave = WaveComponents::from(standing_mode(&model, w.level, &k)?);
    let fields = extract_wkb(&model, &wave, w.step)?;
    let mut report = Report::new("wkb", seed);

    let ell = model.oscillator_length();
    let mut table = Table::new(
        "wkb",
        &["t", "y", "R", "main", "classical", "quantum", "side1", "side2", "flag"],
    );
    let mut good = Vec::new();
    for &t in &w.times {
        for &u in &w.fields {
            let mut x = vec![0.0; model.n()];
            x[0] = t;
            let y = u * ell;
            let sample = fields.sample(&x, y)?;
            let flag = if sample.r <= 0.0 {
                Some("R vanishes")
            } else {
                match wkb_residual(&model, &fields, &[(x.clone(), y)]) {
                    Ok(res) => {
                        let p = &res.points[0];
                        table.push(vec![
                            num(t),
                            num(y),
                            num(sample.r),
                            num(p.main),
                            num(p.classical),
                            num(p.quantum),
                            num(p.side1),
                            num(p.side2),
                            json!(""),
                        ]);
                        good.push((x, y));
                        None
                    }
                    Err(Error::SingularHJNorm) => Some("|S| vanishes"),
                    Err(e) => return Err(e.into()),
                }
            };
            if let Some(reason) = flag {
                report.warn(format!("t = {t}, y = {y}: {reason}; point excluded"));
                let mut row = vec![num(t), num(y), num(sample.r)];
                row.extend(std::iter::repeat(Value::Null).take(5));
                row.push(json!(reason));
                table.push(row);
            }
        }
    }
    report.tables.push(table);
    if good.is_empty() {
        report.warn("every point was flagged; no residuals to check".into());
        return Ok(report);
    }

    let res = wkb_residual(&model, &fields, &good)?;
    report.bound("main quasiclassical residual", res.main, cfg.tolerances.wkb);
    report.note("side condition: divergence along S", res.side1);
    report.note("side condition: gradient norm", res.side2);

    let sweep = hk_sweep(&model, &fields, &good, &w.factors)?;
    let mut rows = Table::new("hk_sweep", &["factor", "hk", "quantum"]);
    for ((f, hk), q) in w.factors.iter().zip(&sweep.hk).zip(&sweep.quantum) {
        rows.push(vec![num(*f), num(*hk), num(*q)]);
    }
    report.tables.push(rows);
    report.check(
        "quantum potential exponent in hbar kappa",
        sweep.exponent,
        Some(cfg.tolerances.exponent),
        (sweep.exponent - 2.0).abs() <= cfg.tolerances.exponent,
    );
    Ok(report)
}
