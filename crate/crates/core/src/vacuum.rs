//! Gaussian width of the free-field vacuum: the functional Schrödinger
//! vacuum `∝ exp(−Σₖ ωₖ|ỹ(k)|²/2Vħ)` against the product of precanonical
//! ground states, whose coefficient is `mQ/(2(2π)ⁿ⁻¹Vħ²κ)` for every `k`.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffConfig {
    /// Ultraviolet cutoff `Q`.
    pub q: f64,
    /// Spatial volume `V`.
    pub volume: f64,
    /// Spacetime dimension.
    pub n: usize,
    pub hbar: f64,
    pub mass: f64,
}

impl CutoffConfig {
    pub fn new(q: f64, volume: f64, n: usize, hbar: f64, mass: f64) -> Result<Self> {
        for (name, v) in [("Q", q), ("volume", volume), ("hbar", hbar), ("mass", mass)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if n == 0 {
            return Err(Error::InvalidParameter("spacetime dimension must be positive".into()));
        }
        Ok(Self {
            q,
            volume,
            n,
            hbar,
            mass,
        })
    }

    fn momentum_volume(&self) -> f64 {
        (2.0 * PI).powi(self.n as i32 - 1)
    }
}

/// Which `κ` the composed amplitude is built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KappaChoice {
    /// `κ = Q/(2π)ⁿ⁻¹`.
    Identified,
    /// `κ = 2Q/(2π)ⁿ⁻¹`, to show that the identification matters.
    Counterfactual,
}

pub fn kappa_from_cutoff(cfg: &CutoffConfig) -> f64 {
    cfg.q / cfg.momentum_volume()
}

pub fn kappa_for(cfg: &CutoffConfig, choice: KappaChoice) -> f64 {
    match choice {
        KappaChoice::Identified => kappa_from_cutoff(cfg),
        KappaChoice::Counterfactual => 2.0 * kappa_from_cutoff(cfg),
    }
}

/// `ωₖ = (m²/ħ² + k²)^{1/2}`.
pub fn omega_k(cfg: &CutoffConfig, k: f64) -> f64 {
    let m = cfg.mass / cfg.hbar;
    (m * m + k * k).sqrt()
}

/// `ωₖ/(2Vħ)`.
pub fn functional_coeff(cfg: &CutoffConfig, k: f64) -> f64 {
    omega_k(cfg, k) / (2.0 * cfg.volume * cfg.hbar)
}

/// Ratio `(Q/(2π)ⁿ⁻¹)/κ`; exactly 1 for the identified `κ`.
fn cutoff_factor(cfg: &CutoffConfig, kappa: f64) -> f64 {
    kappa_from_cutoff(cfg) / kappa
}

/// `mQ/(2(2π)ⁿ⁻¹Vħ²κ)`, independent of `k`.
pub fn composed_coeff(cfg: &CutoffConfig, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    Ok(cfg.mass / cfg.hbar * cutoff_factor(cfg, kappa) / (2.0 * cfg.volume * cfg.hbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficients {
    pub k: f64,
    pub functional_coeff: f64,
    pub composed_coeff: f64,
    /// `composed/functional = (Q/(2π)ⁿ⁻¹κ)(m/ħ)/ωₖ`, evaluated in that form.
    pub ratio: f64,
}

pub fn compare(cfg: &CutoffConfig, ks: &[f64], choice: KappaChoice) -> Result<Vec<ModeCoefficients>> {
    let kappa = kappa_for(cfg, choice);
    let composed = composed_coeff(cfg, kappa)?;
    let factor = cutoff_factor(cfg, kappa);
    ks.iter()
        .map(|&k| {
            if !k.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite wavenumber {k}")));
            }
            Ok(ModeCoefficients {
                k,
                functional_coeff: functional_coeff(cfg, k),
                composed_coeff: composed,
                ratio: factor * (cfg.mass / cfg.hbar) / omega_k(cfg, k),
            })
        })
        .collect()
}

/// Columns `k, functional_coeff, composed_coeff, ratio`.
pub fn write_csv<W: Write>(rows: &[ModeCoefficients], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::InvalidParameter(format!("csv write failed: {e}"));
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParameter(format!("csv write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> CutoffConfig {
        CutoffConfig::new(2.0 * PI, 1.0, n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn kappa_identification() {
        assert!((kappa_from_cutoff(&unit(2)) - 1.0).abs() < 1e-15);
        let cfg = CutoffConfig::new((2.0 * PI).powi(3), 1.0, 4, 1.0, 1.0).unwrap();
        assert!((kappa_from_cutoff(&cfg) - 1.0).abs() < 1e-15);
        let cfg = CutoffConfig::new(100.0, 1.0, 2, 1.0, 1.0).unwrap();
        assert!((kappa_from_cutoff(&cfg) - 15.915494309189533).abs() < 1e-12);
    }

    #[test]
    fn functional_values() {
        let cfg = unit(2);
        assert_eq!(functional_coeff(&cfg, 0.0), 0.5);
        assert!((functional_coeff(&cfg, 1.0) - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn composed_identified_is_half() {
        let cfg = unit(2);
        assert_eq!(composed_coeff(&cfg, kappa_from_cutoff(&cfg)).unwrap(), 0.5);
    }

    #[test]
    fn csv_has_header() {
        let rows = compare(&unit(2), &[0.0, 0.5], KappaChoice::Identified).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,functional_coeff,composed_coeff,ratio\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn invalid_config_is_rejected() {
        assert!(CutoffConfig::new(-1.0, 1.0, 2, 1.0, 1.0).is_err());
        assert!(CutoffConfig::new(1.0, 1.0, 0, 1.0, 1.0).is_err());
    }
}
