//! Precanonical quantization of a single real scalar field.
//!
//! The wave function is Clifford-valued, `Ψ = ψ + ψⁱγᵢ`, on the space of
//! `(xⁱ, y)` and obeys `iħκγⁱ∂ᵢΨ = ĤΨ` with the DW Hamiltonian operator
//! `Ĥ = −½ħ²κ²∂²_y + V(y)`. In components:
//!
//! ```text
//! iħκ ∂ᵢψⁱ = Ĥψ,    iħκ ∂ᵢψ = Ĥψᵢ
//! ```
//!
//! Norms reported anywhere in this module are unweighted L² norms of the
//! component functions. They carry no probabilistic meaning: the bilinear
//! form implied by the conservation law is not positive definite.

mod eigen;
mod residual;
mod spectral;
mod wave;
mod wkb;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::clifford::Metric;
use crate::dwmech::ScalarModel;
use crate::error::{Error, Result};
use crate::gradedforms::Poly;

pub use eigen::{eigensolve, Domain, Eigenpair, EIGEN_TOLERANCE};
pub use residual::{
    conservation_convergence, conservation_residual, gamma_form_residual, second_order_residual,
    schrodinger_residual, ConvergenceStudy, Region, ResidualRecord, SchrodingerResidual,
};
pub use spectral::{GridFunction, SpectralFunction};
pub use wave::{
    assemble_mode, multivector_truncation, standing_mode, Axis, GridWave, ModeSolution, ModeTerm,
    SpectralWave, WaveComponents, WaveJet,
};
pub use wkb::{
    extract_wkb, extract_wkb_at, hk_sweep, wkb_reassemble, wkb_residual, AsHjFunctions,
    ExtractedWkb, FiniteDifferenceWkb, HkSweep, WkbFields, WkbPoint, WkbResidual, WkbSample,
};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    metric: Metric,
    mass: f64,
    hbar: f64,
    kappa: f64,
    /// Polynomial in variable 0 (the field value `y`).
    potential: Poly,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
}

impl QuantumModel {
    /// Free field: `V = ½ (m²/ħ²) y²`.
    pub fn new(metric: Metric, mass: f64, hbar: f64, kappa: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("hbar", hbar)?;
        positive("kappa", kappa)?;
        let b = mass * mass / (hbar * hbar);
        let potential = (&Poly::var(0) * &Poly::var(0)).scale(&exact(0.5 * b));
        Ok(Self {
            metric,
            mass,
            hbar,
            kappa,
            potential,
        })
    }

    /// `n = 2` Minkowski, `m = ħ = κ = 1`.
    pub fn free_default() -> Self {
        Self::new(Metric::minkowski(2).expect("valid"), 1.0, 1.0, 1.0).expect("valid")
    }

    /// Replaces the potential by a polynomial in the field value (variable 0).
    pub fn with_potential(mut self, potential: Poly) -> Result<Self> {
        if potential.variables().iter().any(|&v| v != 0) {
            return Err(Error::InvalidParameter(
                "the potential must depend on the single field variable only".into(),
            ));
        }
        self.potential = potential;
        Ok(self)
    }

    /// Potential `Σⱼ cⱼ yʲ` from floating coefficients.
    pub fn with_potential_coeffs(self, coeffs: &[f64]) -> Result<Self> {
        let mut v = Poly::zero();
        for (j, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidParameter("non-finite potential coefficient".into()));
            }
            let mono = crate::gradedforms::Monomial::from_powers([(0, j as u32)]);
            v += &Poly::term(exact(c), mono);
        }
        self.with_potential(v)
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        positive("kappa", kappa)?;
        Ok(Self {
            kappa,
            ..self.clone()
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.metric.dim()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn potential(&self) -> &Poly {
        &self.potential
    }

    /// `ħκ`.
    pub fn hk(&self) -> f64 {
        self.hbar * self.kappa
    }

    /// Coefficient `A = ħ²κ²` of `−½A∂²_y`.
    pub fn kinetic_coeff(&self) -> f64 {
        self.hk() * self.hk()
    }

    /// Natural width `√(κħ²/m)` of the free-field eigenfunctions.
    pub fn oscillator_length(&self) -> f64 {
        (self.kappa * self.hbar * self.hbar / self.mass).sqrt()
    }

    pub fn potential_value(&self, y: f64) -> f64 {
        self.potential.eval(&[y])
    }

    /// Coefficients `cⱼ` of `V = Σ cⱼ yʲ`.
    pub fn potential_coeffs(&self) -> Vec<f64> {
        let degree = self.potential.total_degree() as usize;
        let mut out = vec![0.0; degree + 1];
        for (mono, c) in self.potential.terms() {
            out[mono.exponent(0) as usize] += c.to_f64().unwrap_or(f64::NAN);
        }
        out
    }

    /// Classical model with the same metric and potential.
    pub fn classical_model(&self) -> Result<ScalarModel> {
        ScalarModel::new(self.metric.clone(), 1, self.potential.clone())
    }
}

/// A function of the field variable in one of the two supported
/// representations.
#[derive(Debug, Clone, PartialEq)]
pub enum YFunction {
    Spectral(SpectralFunction),
    Grid(GridFunction),
}

impl YFunction {
    /// Value at `y`; grid functions are only defined at their nodes.
    pub fn eval(&self, y: f64) -> Result<f64> {
        match self {
            Self::Spectral(f) => Ok(f.eval(y)),
            Self::Grid(g) => {
                let j = ((y - g.y0()) / g.dy()).round();
                if j < 0.0 || j as usize >= g.len() || (g.node(j as usize) - y).abs() > 1e-9 * g.dy() {
                    return Err(Error::InvalidDomain(format!("{y} is not a grid node")));
                }
                Ok(g.values()[j as usize])
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            Self::Spectral(f) => f.l2_norm(),
            Self::Grid(g) => g.l2_norm(),
        }
    }
}

/// `Ĥf = −½ħ²κ²f'' + V(y)f`.
///
/// Spectral inputs are mapped exactly (the result lives in a basis enlarged
/// by the degree of `V` plus two). Grid inputs use the fourth-order
/// five-point stencil with zero extension beyond the ends, so only nodes at
/// least two steps from either end carry fourth-order accuracy.
pub fn apply_dw_hamiltonian(model: &QuantumModel, f: &YFunction) -> Result<YFunction> {
    match f {
        YFunction::Spectral(s) => {
            if s.is_empty() {
                return Err(Error::InvalidDomain("empty spectral expansion".into()));
            }
            Ok(YFunction::Spectral(
                s.apply_operator(model.kinetic_coeff(), &model.potential_coeffs()),
            ))
        }
        YFunction::Grid(g) => Ok(YFunction::Grid(
            g.apply_operator(model.kinetic_coeff(), |y| model.potential_value(y)),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_gaussian_has_eigenvalue_half_kappa_m() {
        let model = QuantumModel::new(Metric::minkowski(2).unwrap(), 1.7, 0.9, 1.3).unwrap();
        let f = SpectralFunction::basis(model.oscillator_length(), 0).unwrap();
        let hf = apply_dw_hamiltonian(&model, &YFunction::Spectral(f.clone())).unwrap();
        let chi = 0.5 * model.kappa() * model.mass();
        for y in [-1.0, 0.0, 0.4, 2.0] {
            let lhs = hf.eval(y).unwrap();
            assert!((lhs - chi * f.eval(y)).abs() < 1e-12, "{lhs}");
        }
    }

    #[test]
    fn constant_without_potential_is_annihilated() {
        let model = QuantumModel::free_default().with_potential(Poly::zero()).unwrap();
        let g = GridFunction::new(-1.0, 0.1, vec![2.0; 21]).unwrap();
        let YFunction::Grid(out) = apply_dw_hamiltonian(&model, &YFunction::Grid(g)).unwrap() else {
            unreachable!()
        };
        assert!(out.values()[2..19].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn parameters_must_be_positive() {
        let metric = Metric::minkowski(2).unwrap();
        assert!(QuantumModel::new(metric.clone(), 0.0, 1.0, 1.0).is_err());
        assert!(QuantumModel::new(metric.clone(), 1.0, -1.0, 1.0).is_err());
        assert!(QuantumModel::new(metric, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn potential_coefficients_round_trip() {
        let model = QuantumModel::free_default()
            .with_potential_coeffs(&[0.0, 0.0, 0.5, 0.0, 0.25])
            .unwrap();
        assert_eq!(model.potential_coeffs(), vec![0.0, 0.0, 0.5, 0.0, 0.25]);
        assert_eq!(model.potential_value(2.0), 0.5 * 4.0 + 0.25 * 16.0);
    }
}
