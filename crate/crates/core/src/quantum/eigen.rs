//! Eigenproblem `Ĥf = χf` on the field axis.

use nalgebra::{DMatrix, SymmetricEigen};

use super::spectral::{GridFunction, SpectralFunction};
use super::{QuantumModel, YFunction};
use crate::error::{Error, Result};

/// Certified bound on `‖Ĥf − χf‖` for returned eigenpairs.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

const MIN_BASIS: usize = 32;
const MAX_BASIS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Whole line, Galerkin projection on Hermite functions of width
    /// `√(κħ²/m)`.
    Spectral,
    /// Dirichlet walls at `±half_width`, second-order finite differences.
    Box { half_width: f64, intervals: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub level: usize,
    pub chi: f64,
    /// L²-normalized, with its largest coefficient (or sample) positive.
    pub function: YFunction,
    /// `‖Ĥf − χf‖` in the representation's own norm.
    pub residual: f64,
}

/// Lowest `n_max + 1` eigenpairs of the DW Hamiltonian operator.
pub fn eigensolve(model: &QuantumModel, n_max: usize, domain: Domain) -> Result<Vec<Eigenpair>> {
    match domain {
        Domain::Spectral => spectral(model, n_max),
        Domain::Box {
            half_width,
            intervals,
        } => boxed(model, n_max, half_width, intervals),
    }
}

fn sign_fix(v: &mut [f64]) {
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn spectral(model: &QuantumModel, n_max: usize) -> Result<Vec<Eigenpair>> {
    let ell = model.oscillator_length();
    let a = model.kinetic_coeff();
    let v = model.potential_coeffs();
    let mut size = MIN_BASIS.max(2 * (n_max + 1));
    let mut worst = f64::INFINITY;
    while size <= MAX_BASIS {
        let columns: Vec<SpectralFunction> = (0..size)
            .map(|j| SpectralFunction::basis(ell, j).map(|b| b.apply_operator(a, &v)))
            .collect::<Result<_>>()?;
        let h = DMatrix::from_fn(size, size, |i, j| {
            let upper = columns[j].coeffs().get(i).copied().unwrap_or(0.0);
            let lower = columns[i].coeffs().get(j).copied().unwrap_or(0.0);
            0.5 * (upper + lower)
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
        let mut pairs = Vec::with_capacity(n_max + 1);
        worst = 0.0f64;
        for (level, &idx) in order.iter().take(n_max + 1).enumerate() {
            let chi = eig.eigenvalues[idx];
            let mut c: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
            sign_fix(&mut c);
            let f = SpectralFunction::new(ell, c)?;
            let residual = f.apply_operator(a, &v).try_sub(&f.scale(chi))?.l2_norm();
            worst = worst.max(residual);
            pairs.push(Eigenpair {
                level,
                chi,
                function: YFunction::Spectral(f),
                residual,
            });
        }
        if worst < EIGEN_TOLERANCE {
            return Ok(pairs);
        }
        size *= 2;
    }
    Err(Error::ConvergenceFailure(format!(
        "Hermite basis of {MAX_BASIS} functions leaves eigen-residual {worst:.3e}"
    )))
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (j, d) in self.diag.iter().enumerate() {
            let coupling = if j == 0 { 0.0 } else { self.off * self.off / q };
            q = d - lambda - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + lambda.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                let mut v = self.diag[j] * x[j];
                if j > 0 {
                    v += self.off * x[j - 1];
                }
                if j + 1 < n {
                    v += self.off * x[j + 1];
                }
                v
            })
            .collect()
    }

    /// Solves `(T − σ)x = b` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let tiny = f64::EPSILON * self.bounds().1.abs().max(1.0);
        let off_at = |j: usize| if j < n { self.off } else { 0.0 };
        // upper factor rows: entries at columns j, j+1, j+2
        let mut u = vec![[0.0f64; 3]; n];
        let mut rhs = b.to_vec();
        let mut cur = [self.diag[0] - sigma, off_at(1), 0.0];
        for j in 0..n {
            if j + 1 == n {
                u[j] = cur;
                break;
            }
            let mut next = [self.off, self.diag[j + 1] - sigma, off_at(j + 2)];
            if next[0].abs() > cur[0].abs() {
                std::mem::swap(&mut cur, &mut next);
                rhs.swap(j, j + 1);
            }
            if cur[0].abs() < tiny {
                cur[0] = tiny;
            }
            let f = next[0] / cur[0];
            rhs[j + 1] -= f * rhs[j];
            u[j] = cur;
            cur = [next[1] - f * cur[1], next[2] - f * cur[2], 0.0];
        }
        if u[n - 1][0].abs() < tiny {
            u[n - 1][0] = tiny;
        }
        let mut x = vec![0.0; n];
        for j in (0..n).rev() {
            let mut s = rhs[j];
            if j + 1 < n {
                s -= u[j][1] * x[j + 1];
            }
            if j + 2 < n {
                s -= u[j][2] * x[j + 2];
            }
            x[j] = s / u[j][0];
        }
        x
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn boxed(model: &QuantumModel, n_max: usize, half_width: f64, intervals: usize) -> Result<Vec<Eigenpair>> {
    if !(half_width > 0.0 && half_width.is_finite()) || intervals < 4 {
        return Err(Error::InvalidDomain(format!(
            "box needs a positive half-width and at least 4 intervals, got ({half_width}, {intervals})"
        )));
    }
    let interior = intervals - 1;
    if n_max >= interior {
        return Err(Error::InvalidDomain(format!(
            "{interior} interior nodes cannot resolve level {n_max}"
        )));
    }
    let h = 2.0 * half_width / intervals as f64;
    let a = model.kinetic_coeff();
    let nodes: Vec<f64> = (1..intervals).map(|j| -half_width + j as f64 * h).collect();
    let t = Tridiagonal {
        diag: nodes.iter().map(|&y| a / (h * h) + model.potential_value(y)).collect(),
        off: -0.5 * a / (h * h),
    };
    let mut pairs = Vec::with_capacity(n_max + 1);
    for level in 0..=n_max {
        let lambda = t.eigenvalue(level);
        let mut x: Vec<f64> = (0..interior).map(|j| 1.0 + 0.1 * ((j * 7919) % 13) as f64).collect();
        normalize(&mut x);
        let mut chi = lambda;
        let mut residual = f64::INFINITY;
        for _ in 0..6 {
            x = t.shifted_solve(lambda, &x);
            normalize(&mut x);
            let tx = t.apply(&x);
            chi = x.iter().zip(&tx).map(|(p, q)| p * q).sum();
            residual = tx
                .iter()
                .zip(&x)
                .map(|(p, q)| (p - chi * q).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < 1e-3 * EIGEN_TOLERANCE {
                break;
            }
        }
        if residual >= EIGEN_TOLERANCE {
            return Err(Error::ConvergenceFailure(format!(
                "inverse iteration for level {level} stalled at residual {residual:.3e}"
            )));
        }
        sign_fix(&mut x);
        let scale = 1.0 / h.sqrt();
        let mut values = vec![0.0];
        values.extend(x.iter().map(|v| v * scale));
        values.push(0.0);
        pairs.push(Eigenpair {
            level,
            chi,
            function: YFunction::Grid(GridFunction::new(-half_width, h, values)?),
            residual,
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Metric;
    use crate::gradedforms::Poly;

    #[test]
    fn free_field_levels_are_equally_spaced() {
        let model = QuantumModel::new(Metric::minkowski(2).unwrap(), 2.0, 1.0, 0.5).unwrap();
        let pairs = eigensolve(&model, 5, Domain::Spectral).unwrap();
        for p in &pairs {
            let expected = model.kappa() * model.mass() * (p.level as f64 + 0.5);
            assert!((p.chi - expected).abs() < 1e-10, "{} vs {expected}", p.chi);
        }
    }

    #[test]
    fn anharmonic_levels_are_certified() {
        let model = QuantumModel::free_default()
            .with_potential_coeffs(&[0.0, 0.0, 0.5, 0.0, 0.1])
            .unwrap();
        let pairs = eigensolve(&model, 4, Domain::Spectral).unwrap();
        assert!(pairs.iter().all(|p| p.residual < EIGEN_TOLERANCE));
        assert!(pairs.windows(2).all(|w| w[0].chi < w[1].chi));
        assert!(pairs[0].chi > 0.5);
    }

    #[test]
    fn flat_potential_does_not_converge_on_the_line() {
        let model = QuantumModel::free_default().with_potential(Poly::zero()).unwrap();
        assert!(matches!(
            eigensolve(&model, 0, Domain::Spectral),
            Err(Error::ConvergenceFailure(_))
        ));
    }

    #[test]
    fn box_levels_approach_particle_in_a_box() {
        let model = QuantumModel::free_default().with_potential(Poly::zero()).unwrap();
        let pairs = eigensolve(
            &model,
            3,
            Domain::Box {
                half_width: 1.0,
                intervals: 400,
            },
        )
        .unwrap();
        for p in &pairs {
            let k = (p.level + 1) as f64 * std::f64::consts::PI / 2.0;
            let exact = 0.5 * k * k;
            assert!((p.chi - exact).abs() / exact < 1e-4);
        }
    }

    #[test]
    fn tridiagonal_solve_matches_apply() {
        let t = Tridiagonal {
            diag: vec![2.0, 3.0, 1.0, 4.0, 0.5],
            off: -1.2,
        };
        let b = vec![1.0, -2.0, 0.5, 0.3, 1.1];
        let x = t.shifted_solve(0.7, &b);
        let back: Vec<f64> = t.apply(&x).iter().zip(&x).map(|(p, q)| p - 0.7 * q).collect();
        for (p, q) in back.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
