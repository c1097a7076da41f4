//! Canonical bracket table and the seeded graded-antisymmetry suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use dwq_core::gradedforms::{
    graded_antisymmetry_check, graded_bracket, rational, HorizontalForm, Monomial, PhaseContext,
    Poly,
};

use crate::config::RunConfig;
use crate::report::{Report, Table};
use crate::Failure;

struct Identity {
    name: String,
    left: HorizontalForm,
    right: HorizontalForm,
    expected: HorizontalForm,
}

fn delta(a: usize, b: usize) -> Poly {
    Poly::from_int(i64::from(a == b))
}

/// `{p_a, y^b} = δ`, and for `n ≥ 2` also `{p^i_a, y^b ω_j} = δδ` and
/// `{p_a, y^b ω_j} = δ ω_j`. For `n = 1` the last two coincide with the first.
fn canonical_identities(ctx: PhaseContext) -> Vec<Identity> {
    let (n, m) = (ctx.n(), ctx.m());
    let mut out = Vec::new();
    for a in 0..m {
        let p_a = HorizontalForm::polymomentum(ctx, a);
        for b in 0..m {
            out.push(Identity {
                name: format!("{{p_{a}, y^{b}}}"),
                left: p_a.clone(),
                right: HorizontalForm::function(ctx, ctx.y(b)),
                expected: HorizontalForm::function(ctx, delta(a, b)),
            });
            if n == 1 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out.push(Identity {
                        name: format!("{{p^{i}_{a}, y^{b} w_{j}}}"),
                        left: HorizontalForm::function(ctx, ctx.p(i, a)),
                        right: HorizontalForm::omega_i(ctx, j, ctx.y(b)),
                        expected: HorizontalForm::function(ctx, &delta(i, j) * &delta(a, b)),
                    });
                }
            }
            for j in 0..n {
                out.push(Identity {
                    name: format!("{{p_{a}, y^{b} w_{j}}}"),
                    left: p_a.clone(),
                    right: HorizontalForm::omega_i(ctx, j, ctx.y(b)),
                    expected: HorizontalForm::omega_i(ctx, j, delta(a, b)),
                });
            }
        }
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[usize], max_degree: u32, terms: usize) -> Poly {
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

/// Degree `n − 1` forms are Hamiltonian currents `Σₐ Aₐ pⁱₐ + Bⁱ`.
fn random_hamiltonian(rng: &mut ChaCha8Rng, ctx: PhaseContext, degree: usize) -> Result<HorizontalForm, Failure> {
    let n = ctx.n();
    let all: Vec<usize> = (0..ctx.num_coords()).collect();
    if degree == 0 {
        return Ok(HorizontalForm::function(ctx, random_poly(rng, &all, 3, 4)));
    }
    if degree == n {
        return Ok(HorizontalForm::top(ctx, random_poly(rng, &all, 3, 4)));
    }
    let base: Vec<usize> = (0..n)
        .map(|i| ctx.x_index(i))
        .chain((0..ctx.m()).map(|a| ctx.y_index(a)))
        .collect();
    let coeffs: Vec<Poly> = (0..ctx.m()).map(|_| random_poly(rng, &base, 2, 2)).collect();
    let comps: Vec<Poly> = (0..n)
        .map(|i| {
            let mut f = random_poly(rng, &base, 2, 2);
            for (a, c) in coeffs.iter().enumerate() {
                f += &(c * &ctx.p(i, a));
            }
            f
        })
        .collect();
    Ok(HorizontalForm::current(ctx, &comps)?)
}

/// Degree pairs with a defined, kernel-independent bracket.
fn degree_pairs(n: usize) -> Vec<(usize, usize)> {
    if n == 1 {
        vec![(0, 0), (0, 1), (1, 0)]
    } else {
        vec![(0, n - 1), (n - 1, 0), (n - 1, n - 1), (n - 1, n), (n, n - 1)]
    }
}

pub fn run(cfg: &RunConfig, seed: u64) -> Result<Report, Failure> {
    let ctx = PhaseContext::new(cfg.model.n, cfg.model.m)?;
    let mut report = Report::new("brackets", seed);

    let mut table = Table::new("brackets", &["identity", "expected", "computed", "status"]);
    let mut wrong = 0usize;
    for id in canonical_identities(ctx) {
        let got = graded_bracket(&id.left, &id.right)?;
        let ok = got == id.expected;
        wrong += usize::from(!ok);
        table.push(vec![
            json!(id.name),
            json!(id.expected.to_string()),
            json!(got.to_string()),
            json!(if ok { "PASS" } else { "FAIL" }),
        ]);
    }
    let total = table.rows.len();
    report.note("canonical identities", total as f64);
    report.check("canonical identities wrong", wrong as f64, Some(0.0), wrong == 0);
    report.tables.push(table);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = degree_pairs(ctx.n());
    let mut suite = Table::new("antisymmetry", &["sample", "r", "s", "status"]);
    let mut violations = 0usize;
    for t in 0..cfg.brackets.samples {
        let (r, s) = pairs[t % pairs.len()];
        let f1 = random_hamiltonian(&mut rng, ctx, r)?;
        let f2 = random_hamiltonian(&mut rng, ctx, s)?;
        let ok = graded_antisymmetry_check(&f1, &f2)?;
        violations += usize::from(!ok);
        suite.push(vec![json!(t), json!(r), json!(s), json!(if ok { "PASS" } else { "FAIL" })]);
    }
    report.check("antisymmetry violations", violations as f64, Some(0.0), violations == 0);
    report.tables.push(suite);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_counts() {
        let count = |n, m| canonical_identities(PhaseContext::new(n, m).unwrap()).len();
        assert_eq!(count(1, 1), 1);
        assert_eq!(count(1, 2), 4);
        assert_eq!(count(2, 1), 7);
        assert_eq!(count(3, 2), 4 * (1 + 9 + 3));
    }

    #[test]
    fn random_forms_have_the_requested_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ctx = PhaseContext::new(3, 2).unwrap();
        for (r, s) in degree_pairs(3) {
            assert_eq!(random_hamiltonian(&mut rng, ctx, r).unwrap().degree(), r);
            assert_eq!(random_hamiltonian(&mut rng, ctx, s).unwrap().degree(), s);
        }
    }
}
