//! Run configuration.
//!
//! TOML with dotted sections. Every key is optional; unknown keys are
//! rejected. Example:
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! n = 2
//! m = 1
//! metric = [1, -1]
//! mass = 1.0
//! hbar = 1.0
//! kappa = 1.0
//! potential = [0.0, 0.0, 0.5]   # V = Σ c_j y^j; default ½(m/ħ)² y²
//!
//! [grid]
//! base_cells = 8
//! levels = 4
//! half_width = 0.5
//!
//! [tolerances]
//! residual = 1e-10
//! spectral = 1e-8
//! order = 0.1
//! exponent = 0.02
//! vacuum = 5.1e-5
//! wkb = 1e-6
//!
//! [brackets]
//! samples = 50
//!
//! [dw_check]
//! solution = "fixtures/plane_wave.csv"   # relative to the config file
//!
//! [quantum]
//! n_max = 10
//! modes = [{ level = 0, k = [0.5] }, { level = 1, k = [-0.3] }]
//!
//! [wkb]
//! level = 0
//! k = [0.0]                          # default: zero
//! times = [0.0, 0.3, 0.6, 0.9]
//! fields = [-1.0, -0.3, 0.4, 1.0]
//! factors = [0.25, 0.5, 1.0, 2.0, 4.0]
//!
//! [vacuum]
//! cutoff = 6.283185307179586
//! volume = 1.0
//! band = 0.01
//! points = 101
//! counterfactual = false
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use dwq_core::clifford::Metric;
use dwq_core::dwmech::ScalarModel;
use dwq_core::gradedforms::{Monomial, Poly};
use dwq_core::quantum::QuantumModel;
use num_rational::BigRational;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub brackets: BracketsConfig,
    #[serde(default)]
    pub dw_check: DwCheckConfig,
    #[serde(default)]
    pub quantum: QuantumConfig,
    #[serde(default)]
    pub wkb: WkbConfig,
    #[serde(default)]
    pub vacuum: VacuumConfig,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub n: usize,
    pub m: usize,
    /// Diagonal metric signs; Minkowski `(+, −, …)` when absent.
    pub metric: Option<Vec<i8>>,
    pub mass: f64,
    pub hbar: f64,
    pub kappa: f64,
    pub potential: Option<Vec<f64>>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n: 2,
            m: 1,
            metric: None,
            mass: 1.0,
            hbar: 1.0,
            kappa: 1.0,
            potential: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub base_cells: usize,
    pub levels: usize,
    /// Half-width of the cube on which the conservation law is checked.
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            base_cells: 8,
            levels: 4,
            half_width: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Pointwise residuals of exact solutions.
    pub residual: f64,
    /// Eigenvalues and spectral-method residuals.
    pub spectral: f64,
    /// Allowed deviation of an empirical convergence order from 2.
    pub order: f64,
    /// Allowed deviation of the ħκ scaling exponent from 2.
    pub exponent: f64,
    /// Bound on `|ratio/ratio(0) − 1|` in the long-wave band.
    pub vacuum: f64,
    /// Main quasiclassical residual of extracted `(R, S)`; finite differences.
    pub wkb: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-10,
            spectral: 1e-8,
            order: 0.1,
            exponent: 0.02,
            vacuum: 5.1e-5,
            wkb: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BracketsConfig {
    /// Random Hamiltonian pairs for the antisymmetry property.
    pub samples: usize,
}

impl Default for BracketsConfig {
    fn default() -> Self {
        Self { samples: 50 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwCheckConfig {
    /// Tabulated solution; the bundled plane-wave fixture when absent.
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub level: usize,
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumConfig {
    pub n_max: usize,
    /// Modes checked individually and superposed for the conservation law.
    pub modes: Option<Vec<ModeSpec>>,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self {
            n_max: 10,
            modes: None,
        }
    }
}

impl QuantumConfig {
    /// Configured modes, or `(0, k₁ = 0.5)` and `(1, k₁ = −0.3)`.
    pub fn modes(&self, n: usize) -> Vec<ModeSpec> {
        self.modes.clone().unwrap_or_else(|| {
            [(0, 0.5), (1, -0.3)]
                .into_iter()
                .map(|(level, k1)| ModeSpec {
                    level,
                    k: (1..n).map(|j| if j == 1 { k1 } else { 0.0 }).collect(),
                })
                .collect()
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WkbConfig {
    /// Standing mode whose `(R, S)` is analysed.
    pub level: usize,
    /// Spatial wavevector; zero when absent.
    pub k: Option<Vec<f64>>,
    /// Evaluation times; remaining spacetime coordinates are zero.
    pub times: Vec<f64>,
    /// Field values `y`, in units of the oscillator length.
    pub fields: Vec<f64>,
    /// Multipliers of `κ` in the ħκ sweep.
    pub factors: Vec<f64>,
    /// Finite-difference step for derivatives of the extracted `(R, S)`.
    pub step: f64,
}

impl Default for WkbConfig {
    fn default() -> Self {
        Self {
            level: 0,
            k: None,
            times: vec![0.0, 0.3, 0.6, 0.9],
            fields: vec![-1.0, -0.3, 0.4, 1.0],
            factors: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VacuumConfig {
    /// Ultraviolet cutoff `Q`.
    pub cutoff: f64,
    pub volume: f64,
    /// Upper end of the band in units of `ħk/m`.
    pub band: f64,
    pub points: usize,
    /// Explicit wavenumbers; overrides `band`/`points`.
    pub k: Option<Vec<f64>>,
    pub counterfactual: bool,
}

impl Default for VacuumConfig {
    fn default() -> Self {
        Self {
            cutoff: 2.0 * std::f64::consts::PI,
            volume: 1.0,
            band: 0.01,
            points: 101,
            k: None,
            counterfactual: false,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be positive and finite, got {v}"))
    }
}

fn finite(name: &str, values: &[f64]) -> Result<(), String> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(format!("{name} contains non-finite value {v}")),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let m = &self.model;
        if m.n == 0 || m.n > 6 {
            return Err(format!("model.n must be in 1..=6, got {}", m.n));
        }
        if m.m == 0 || m.m > 4 {
            return Err(format!("model.m must be in 1..=4, got {}", m.m));
        }
        if let Some(signs) = &m.metric {
            if signs.len() != m.n || signs.iter().any(|s| s.abs() != 1) {
                return Err(format!("model.metric must hold {} entries of ±1", m.n));
            }
        }
        positive("model.mass", m.mass)?;
        positive("model.hbar", m.hbar)?;
        positive("model.kappa", m.kappa)?;
        if let Some(v) = &m.potential {
            finite("model.potential", v)?;
        }

        let g = &self.grid;
        if g.base_cells < 2 || g.levels < 2 {
            return Err("grid.base_cells and grid.levels must be at least 2".into());
        }
        positive("grid.half_width", g.half_width)?;

        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.residual", t.residual),
            ("tolerances.spectral", t.spectral),
            ("tolerances.order", t.order),
            ("tolerances.exponent", t.exponent),
            ("tolerances.vacuum", t.vacuum),
            ("tolerances.wkb", t.wkb),
        ] {
            positive(name, v)?;
        }

        for mode in self.quantum.modes.iter().flatten() {
            if mode.k.len() + 1 != m.n {
                return Err(format!(
                    "quantum.modes: k needs {} components for n = {}",
                    m.n - 1,
                    m.n
                ));
            }
            finite("quantum.modes.k", &mode.k)?;
        }

        let w = &self.wkb;
        if let Some(k) = &w.k {
            if k.len() + 1 != m.n {
                return Err(format!("wkb.k needs {} components for n = {}", m.n - 1, m.n));
            }
            finite("wkb.k", k)?;
        }
        finite("wkb.times", &w.times)?;
        finite("wkb.fields", &w.fields)?;
        if w.times.is_empty() || w.fields.is_empty() {
            return Err("wkb.times and wkb.fields must be non-empty".into());
        }
        if w.factors.len() < 2 {
            return Err("wkb.factors needs at least two entries".into());
        }
        for f in &w.factors {
            positive("wkb.factors", *f)?;
        }
        positive("wkb.step", w.step)?;

        let v = &self.vacuum;
        positive("vacuum.cutoff", v.cutoff)?;
        positive("vacuum.volume", v.volume)?;
        positive("vacuum.band", v.band)?;
        if v.points == 0 {
            return Err("vacuum.points must be positive".into());
        }
        if let Some(k) = &v.k {
            finite("vacuum.k", k)?;
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<Metric, String> {
        match &self.model.metric {
            Some(signs) => Metric::new(signs.clone()),
            None => Metric::minkowski(self.model.n),
        }
        .map_err(|e| e.to_string())
    }

    pub fn quantum_model(&self) -> Result<QuantumModel, String> {
        let m = &self.model;
        let model = QuantumModel::new(self.metric()?, m.mass, m.hbar, m.kappa)
            .map_err(|e| e.to_string())?;
        match &m.potential {
            Some(c) => model.with_potential_coeffs(c).map_err(|e| e.to_string()),
            None => Ok(model),
        }
    }

    /// `V = Σₐ ½μ²(yᵃ)²` with `μ = m/ħ`, or the configured polynomial in
    /// every field.
    pub fn classical_model(&self) -> Result<ScalarModel, String> {
        let m = &self.model;
        let exact = |v: f64| BigRational::from_float(v).expect("validated finite");
        let coeffs = m.potential.clone().unwrap_or_else(|| {
            let mu = m.mass / m.hbar;
            vec![0.0, 0.0, 0.5 * mu * mu]
        });
        let mut v = Poly::zero();
        for a in 0..m.m {
            for (j, c) in coeffs.iter().enumerate() {
                v += &Poly::term(exact(*c), Monomial::from_powers([(a, j as u32)]));
            }
        }
        ScalarModel::new(self.metric()?, m.m, v).map_err(|e| e.to_string())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn is_free(&self) -> bool {
        self.model.potential.is_none()
    }
}
