//! Exact elimination for systems `A·x = b` with rational `A` and polynomial
//! right-hand sides.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;

pub(crate) struct ReducedSystem {
    /// Row-reduced matrix; pivot rows first.
    matrix: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    /// Row operations replayed on right-hand sides: `(target, source, factor)`
    /// meaning `row[target] -= factor · row[source]`, plus swaps and scalings.
    ops: Vec<RowOp>,
    cols: usize,
}

enum RowOp {
    Swap(usize, usize),
    Scale(usize, BigRational),
    Eliminate {
        target: usize,
        source: usize,
        factor: BigRational,
    },
}

pub(crate) enum Solve {
    Solution(Vec<Poly>),
    /// Index of a row whose right-hand side survives elimination.
    Inconsistent(usize),
}

impl ReducedSystem {
    pub(crate) fn new(mut matrix: Vec<Vec<BigRational>>, cols: usize) -> Self {
        let rows = matrix.len();
        let mut ops = Vec::new();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !matrix[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                matrix.swap(p, r);
                ops.push(RowOp::Swap(p, r));
            }
            let inv = BigRational::one() / matrix[r][c].clone();
            if !inv.is_one() {
                for v in matrix[r].iter_mut() {
                    *v = &*v * &inv;
                }
                ops.push(RowOp::Scale(r, inv));
            }
            for i in 0..rows {
                if i == r || matrix[i][c].is_zero() {
                    continue;
                }
                let factor = matrix[i][c].clone();
                for k in 0..cols {
                    let delta = &factor * &matrix[r][k];
                    matrix[i][k] = &matrix[i][k] - &delta;
                }
                ops.push(RowOp::Eliminate {
                    target: i,
                    source: r,
                    factor,
                });
            }
            pivots.push(c);
            r += 1;
        }
        Self {
            matrix,
            pivots,
            ops,
            cols,
        }
    }

    /// Particular solution with all free unknowns set to zero.
    pub(crate) fn solve(&self, rhs: &[Poly]) -> Solve {
        let mut b = rhs.to_vec();
        for op in &self.ops {
            match op {
                RowOp::Swap(i, j) => b.swap(*i, *j),
                RowOp::Scale(i, s) => b[*i] = b[*i].scale(s),
                RowOp::Eliminate {
                    target,
                    source,
                    factor,
                } => {
                    let delta = b[*source].scale(factor);
                    b[*target] = &b[*target] - &delta;
                }
            }
        }
        if let Some(bad) = (self.pivots.len()..b.len()).find(|&i| !b[i].is_zero()) {
            return Solve::Inconsistent(bad);
        }
        let mut x = vec![Poly::zero(); self.cols];
        for (row, &col) in self.pivots.iter().enumerate() {
            x[col] = b[row].clone();
        }
        Solve::Solution(x)
    }

    /// Basis of the null space, one vector per free column.
    pub(crate) fn kernel(&self) -> Vec<Vec<BigRational>> {
        let free: Vec<usize> = (0..self.cols).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &col) in self.pivots.iter().enumerate() {
                    v[col] = -self.matrix[row][f].clone();
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradedforms::poly::rational;

    #[test]
    fn solves_and_reports_kernel() {
        // x0 + x1 = v0 ; 2 x0 + 2 x1 = 2 v0
        let a = vec![
            vec![rational(1, 1), rational(1, 1)],
            vec![rational(2, 1), rational(2, 1)],
        ];
        let sys = ReducedSystem::new(a, 2);
        let rhs = vec![Poly::var(0), Poly::var(0).scale(&rational(2, 1))];
        match sys.solve(&rhs) {
            Solve::Solution(x) => {
                assert_eq!(x[0], Poly::var(0));
                assert!(x[1].is_zero());
            }
            Solve::Inconsistent(_) => panic!("consistent system"),
        }
        let k = sys.kernel();
        assert_eq!(k, vec![vec![rational(-1, 1), rational(1, 1)]]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![rational(1, 1)], vec![rational(1, 1)]];
        let sys = ReducedSystem::new(a, 1);
        let rhs = vec![Poly::var(0), Poly::var(1)];
        assert!(matches!(sys.solve(&rhs), Solve::Inconsistent(_)));
    }
}
