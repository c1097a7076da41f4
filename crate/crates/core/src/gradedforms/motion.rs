//! Equation of motion `𝒅F = {HΩ, F} + d^hor F` evaluated on sampled
//! field configurations.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use super::{
    hamiltonian_kernel, hamiltonian_multivector, HorizontalForm, VerticalMultivector,
};
use crate::dwmech::{FieldSample, ScalarModel, SolutionSampler};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MotionResidual {
    /// Max-norm of the residual form at each point.
    pub per_point: Vec<f64>,
    pub max: f64,
}

fn point_values(x: &[f64], s: &FieldSample) -> Vec<f64> {
    // coordinates order pⁱₐ with the field index outermost
    let mut values = x.to_vec();
    values.extend(&s.y);
    for a in 0..s.y.len() {
        values.extend(s.p.iter().map(|row| row[a]));
    }
    values
}

/// `∂ₖzᵛ` for every vertical coordinate, ordered like the unknowns below.
fn jet_derivatives(model: &ScalarModel, s: &FieldSample) -> Vec<Vec<f64>> {
    let (n, m) = (model.n(), model.m());
    let mut out = Vec::with_capacity(m + n * m);
    for a in 0..m {
        out.push((0..n).map(|k| s.dy[k][a]).collect());
    }
    for a in 0..m {
        for i in 0..n {
            out.push((0..n).map(|k| s.dp[k][i][a]).collect());
        }
    }
    out
}

fn tangent_components(x: &VerticalMultivector) -> &BTreeMap<(usize, usize), super::Poly> {
    match x {
        VerticalMultivector::TangentOneForm { components } => components,
        VerticalMultivector::Multivector { .. } => {
            unreachable!("top forms map to tangent-valued one-forms")
        }
    }
}

/// Residual of the equation of motion for the horizontal form `f` along
/// the field configuration produced by `sampler`.
///
/// The Hamiltonian tangent one-form of `HΩ` is fixed only up to the kernel
/// of the polysymplectic map; at each point the kernel part is chosen as the
/// least-squares projection of the jet, so the residual measures only the
/// gauge-invariant content of the equations.
pub fn equation_of_motion_residual(
    f: &HorizontalForm,
    model: &ScalarModel,
    sampler: &dyn SolutionSampler,
    points: &[Vec<f64>],
) -> Result<MotionResidual> {
    let ctx = f.ctx();
    if ctx.n() != model.n() || ctx.m() != model.m() {
        return Err(Error::InvalidParameter(
            "form and model live on different phase spaces".into(),
        ));
    }
    hamiltonian_multivector(f)?;
    let h = ctx.dw_hamiltonian(model.metric(), model.potential())?;
    let h_top = HorizontalForm::top(ctx, h);
    let canonical = hamiltonian_multivector(&h_top)?;
    let canonical = tangent_components(&canonical);
    let kernel = hamiltonian_kernel(ctx, ctx.n())?;

    let n = ctx.n();
    let verticals: Vec<usize> = ctx.vertical_coords().collect();
    let slot = |v: usize, k: usize| (v - n) * n + k;
    let len = verticals.len() * n;
    let kernel_matrix = DMatrix::from_fn(len, kernel.len(), |r, c| {
        let (v, k) = (n + r / n, r % n);
        tangent_components(&kernel[c])
            .get(&(v, k))
            .map_or(0.0, |p| p.as_constant().and_then(|q| q.to_f64()).unwrap_or(0.0))
    });

    // ∂ᵥ of each coefficient of F
    let coeff_derivs: Vec<(u64, super::Poly, Vec<super::Poly>)> = f
        .exterior()
        .terms()
        .map(|(mask, c)| {
            let dv = verticals.iter().map(|&v| c.derivative(v)).collect();
            (*mask, c.clone(), dv)
        })
        .collect();

    let mut per_point = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != n {
            return Err(Error::InvalidSolutionData("point dimension mismatch".into()));
        }
        let s = sampler.sample(x)?;
        s.validate(n, ctx.m())?;
        let values = point_values(x, &s);
        let jet = jet_derivatives(model, &s);

        let mut x_can = DVector::zeros(len);
        for (&(v, k), c) in canonical {
            x_can[slot(v, k)] = c.eval(&values);
        }
        let mut diff = DVector::zeros(len);
        for (vi, &v) in verticals.iter().enumerate() {
            for k in 0..n {
                diff[slot(v, k)] = jet[vi][k] - x_can[slot(v, k)];
            }
        }
        let x_used = if kernel.is_empty() {
            x_can
        } else {
            let svd = kernel_matrix.clone().svd(true, true);
            let c = svd
                .solve(&diff, 1e-12)
                .map_err(|e| Error::ConvergenceFailure(e.to_string()))?;
            x_can + &kernel_matrix * c
        };

        // 𝒅F − {HΩ, F} − d^hor F = Σₖ dxᵏ ∧ Σᵥ (∂ₖzᵛ − X̃ᵛₖ) ∂ᵥF
        let mut residual: BTreeMap<u64, f64> = BTreeMap::new();
        for (mask, _c, dv) in &coeff_derivs {
            for k in 0..n {
                let bit = 1u64 << k;
                if mask & bit != 0 {
                    continue;
                }
                let mut total = 0.0;
                for (vi, &v) in verticals.iter().enumerate() {
                    let weight = jet[vi][k] - x_used[slot(v, k)];
                    if weight != 0.0 {
                        total += weight * dv[vi].eval(&values);
                    }
                }
                let sign = if (mask & (bit - 1)).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                *residual.entry(mask | bit).or_insert(0.0) += sign * total;
            }
        }
        per_point.push(residual.values().fold(0.0f64, |acc, v| acc.max(v.abs())));
    }
    let max = per_point.iter().copied().fold(0.0, f64::max);
    Ok(MotionResidual { per_point, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Metric;
    use crate::dwmech::PlaneWave;
    use crate::gradedforms::PhaseContext;

    fn setup() -> (ScalarModel, PlaneWave, Vec<Vec<f64>>) {
        let metric = Metric::minkowski(2).unwrap();
        let model = ScalarModel::free(metric.clone(), 1, (1, 1)).unwrap();
        let wave = PlaneWave::on_shell(metric, vec![0.7], 1.0, 0.75);
        let points = (0..6)
            .map(|i| vec![0.3 * i as f64, -0.2 + 0.17 * i as f64])
            .collect();
        (model, wave, points)
    }

    #[test]
    fn field_and_momentum_evolve_on_shell() {
        let (model, wave, points) = setup();
        let ctx = PhaseContext::new(2, 1).unwrap();
        for f in [
            HorizontalForm::function(ctx, ctx.y(0)),
            HorizontalForm::top(ctx, ctx.y(0)),
            HorizontalForm::current(ctx, &[ctx.p(0, 0), ctx.p(1, 0)]).unwrap(),
        ] {
            let r = equation_of_motion_residual(&f, &model, &wave, &points).unwrap();
            assert!(r.max < 1e-12, "{f}: {}", r.max);
        }
    }

    #[test]
    fn two_fields_use_field_major_momentum_layout() {
        let metric = Metric::minkowski(2).unwrap();
        let model = ScalarModel::free(metric.clone(), 2, (1, 1)).unwrap();
        let wave = PlaneWave::on_shell(metric, vec![0.8, -0.3], 1.0, 0.6);
        let ctx = model.phase_context().unwrap();
        let points = vec![vec![0.4, -0.1], vec![1.1, 0.7]];
        for a in 0..2 {
            for f in [HorizontalForm::function(ctx, ctx.y(a)), HorizontalForm::polymomentum(ctx, a)] {
                let r = equation_of_motion_residual(&f, &model, &wave, &points).unwrap();
                assert!(r.max < 1e-12, "{f}: {}", r.max);
            }
        }
    }

    #[test]
    fn off_shell_configuration_leaves_a_residual() {
        let (model, _, points) = setup();
        let metric = Metric::minkowski(2).unwrap();
        let wrong = PlaneWave::on_shell(metric, vec![0.7], 2.0, 0.75);
        let ctx = PhaseContext::new(2, 1).unwrap();
        let f = HorizontalForm::current(ctx, &[ctx.p(0, 0), ctx.p(1, 0)]).unwrap();
        let r = equation_of_motion_residual(&f, &model, &wrong, &points).unwrap();
        assert!(r.max > 1e-3);
    }
}
