//! Seeded generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use dwq_core::gradedforms::{rational, HorizontalForm, Monomial, PhaseContext, Poly};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random polynomial in `vars` with total degree at most `max_degree` and
/// small rational coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[usize], max_degree: u32, terms: usize) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree);
        let powers: Vec<(usize, u32)> = (0..degree)
            .map(|_| (vars[rng.gen_range(0..vars.len())], 1))
            .collect();
        let c = rational(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        p += &Poly::term(c, Monomial::from_powers(powers));
    }
    p
}

pub fn base_vars(ctx: &PhaseContext) -> Vec<usize> {
    (0..ctx.n()).map(|i| ctx.x_index(i)).chain((0..ctx.m()).map(|a| ctx.y_index(a))).collect()
}

pub fn all_vars(ctx: &PhaseContext) -> Vec<usize> {
    (0..ctx.num_coords()).collect()
}

/// Random Hamiltonian form of the requested degree. Degree `n − 1` uses
/// `Fⁱ = Σₐ Aₐ(x, y) pⁱₐ + Bⁱ(x, y)`, the general polynomial Hamiltonian
/// current.
pub fn random_hamiltonian(rng: &mut ChaCha8Rng, ctx: PhaseContext, degree: usize) -> HorizontalForm {
    let n = ctx.n();
    if degree == 0 {
        return HorizontalForm::function(ctx, random_poly(rng, &all_vars(&ctx), 3, 4));
    }
    if degree == n {
        return HorizontalForm::top(ctx, random_poly(rng, &all_vars(&ctx), 3, 4));
    }
    assert_eq!(degree, n - 1);
    let base = base_vars(&ctx);
    let a: Vec<Poly> = (0..ctx.m()).map(|_| random_poly(rng, &base, 2, 2)).collect();
    let comps: Vec<Poly> = (0..n)
        .map(|i| {
            let mut f = random_poly(rng, &base, 2, 2);
            for (k, ak) in a.iter().enumerate() {
                f += &(ak * &ctx.p(i, k));
            }
            f
        })
        .collect();
    HorizontalForm::current(ctx, &comps).expect("valid current")
}

/// Degree pairs for which the bracket of polynomial Hamiltonian forms is
/// defined and independent of the kernel choice.
pub fn degree_pairs(n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        vec![(0, 0), (0, 1), (1, 0)]
    } else {
        vec![(0, n - 1), (n - 1, 0), (n - 1, n - 1), (n - 1, n), (n, n - 1)]
    }
}

/// Eigenvalues `0..count` of `−½A f'' + V f` with Dirichlet walls at `±L`,
/// second-order differences on `intervals` cells, by Sturm-sequence
/// bisection of the tridiagonal matrix.
pub fn fd_oracle_eigenvalues(a: f64, v: impl Fn(f64) -> f64, half_width: f64, intervals: usize, count: usize) -> Vec<f64> {
    let h = 2.0 * half_width / intervals as f64;
    let off = -0.5 * a / (h * h);
    let diag: Vec<f64> = (1..intervals)
        .map(|j| a / (h * h) + v(-half_width + j as f64 * h))
        .collect();
    // number of eigenvalues strictly below `x`
    let below = |x: f64| -> usize {
        let mut q = 1.0f64;
        let mut count = 0;
        for (j, d) in diag.iter().enumerate() {
            let coupling = if j == 0 { 0.0 } else { off * off };
            q = d - x - coupling / q;
            if q == 0.0 {
                q = f64::EPSILON * (d.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let lo0 = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let hi0 = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs();
    (0..count)
        .map(|k| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(criterion: u32, title: &str, pass: bool, detail: &str) -> bool {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{title}]: {verdict} ({detail})");
    pass
}
