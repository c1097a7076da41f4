mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_vars, base_vars, degree_pairs, random_hamiltonian, random_poly};
use dwq_core::gradedforms::{
    bracket_degree, bracket_with, graded_bracket, hamiltonian_kernel, hamiltonian_multivector,
    parse_form, HorizontalForm, PhaseContext, Poly,
};
use dwq_core::Error;

fn context(rng: &mut ChaCha8Rng) -> PhaseContext {
    PhaseContext::new(rng.gen_range(1..=3), rng.gen_range(1..=2)).unwrap()
}

#[test]
fn bracket_degree_range() {
    assert_eq!(bracket_degree(2, 0, 1).unwrap(), 0);
    assert_eq!(bracket_degree(3, 2, 2).unwrap(), 2);
    assert_eq!(bracket_degree(3, 2, 3).unwrap(), 3);
    assert_eq!(
        bracket_degree(3, 0, 0),
        Err(Error::UndefinedBracketDegree { r: 0, s: 0, n: 3 })
    );
    assert!(bracket_degree(2, 2, 2).is_err());
}

#[test]
fn field_current_bracket_with_polymomentum() {
    // {p_a, y^b ω_j} reproduces the horizontal form ω_j itself
    let ctx = PhaseContext::new(3, 1).unwrap();
    let p = HorizontalForm::polymomentum(ctx, 0);
    let f = HorizontalForm::omega_i(ctx, 2, &ctx.y(0) * &ctx.y(0));
    let got = graded_bracket(&p, &f).unwrap();
    let want = HorizontalForm::omega_i(ctx, 2, &Poly::from_int(2) * &ctx.y(0));
    assert_eq!(got, want);
}

#[test]
fn non_hamiltonian_second_argument_is_rejected() {
    let ctx = PhaseContext::new(2, 1).unwrap();
    let p = HorizontalForm::polymomentum(ctx, 0);
    // p¹ appearing in the 0-th component is not of Hamiltonian type
    let bad = HorizontalForm::current(ctx, &[ctx.p(1, 0), Poly::zero()]).unwrap();
    assert!(matches!(graded_bracket(&p, &bad), Err(Error::NotHamiltonian(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_bilinear(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = context(&mut rng);
        let pairs = degree_pairs(ctx.n());
        let (r, s) = pairs[rng.gen_range(0..pairs.len())];
        let f = random_hamiltonian(&mut rng, ctx, r);
        let g = random_hamiltonian(&mut rng, ctx, s);
        let h = random_hamiltonian(&mut rng, ctx, s);
        let c = Poly::from_int(rng.gen_range(-3..=3));
        let lhs = graded_bracket(&f, &g.add(&h.scale(&c)).unwrap()).unwrap();
        let rhs = graded_bracket(&f, &g).unwrap().add(&graded_bracket(&f, &h).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// Polynomial multiples of kernel elements do not change brackets of
    /// `(n − 1)`-forms with Hamiltonian forms.
    #[test]
    fn current_brackets_ignore_the_kernel(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = context(&mut rng);
        let n = ctx.n();
        let f = random_hamiltonian(&mut rng, ctx, n - 1);
        let s = if rng.gen_bool(0.5) { n - 1 } else { n };
        let g = random_hamiltonian(&mut rng, ctx, s);
        let mut x = hamiltonian_multivector(&f).unwrap();
        for k in hamiltonian_kernel(ctx, n - 1).unwrap() {
            let coeff = random_poly(&mut rng, &all_vars(&ctx), 2, 2);
            x = x.add(&k.scale(&coeff)).unwrap();
        }
        prop_assert_eq!(bracket_with(&x, &f, &g).unwrap(), graded_bracket(&f, &g).unwrap());
    }

    #[test]
    fn poisson_limit_satisfies_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = PhaseContext::new(1, rng.gen_range(1..=2)).unwrap();
        let vars = all_vars(&ctx);
        let [a, b, c] = [0; 3].map(|_| HorizontalForm::function(ctx, random_poly(&mut rng, &vars, 2, 3)));
        let br = |u: &HorizontalForm, v: &HorizontalForm| graded_bracket(u, v).unwrap();
        let total = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).unwrap().add(&br(&c, &br(&a, &b))).unwrap();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn horizontal_dependence_is_parametric(seed in any::<u64>()) {
        // coefficients depending only on x pass through the bracket untouched
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = context(&mut rng);
        let n = ctx.n();
        let xs: Vec<usize> = (0..n).map(|i| ctx.x_index(i)).collect();
        let lambda = random_poly(&mut rng, &xs, 2, 2);
        let f = random_hamiltonian(&mut rng, ctx, n - 1);
        let g = HorizontalForm::function(ctx, random_poly(&mut rng, &base_vars(&ctx), 2, 3));
        let g = if n == 1 { g } else { random_hamiltonian(&mut rng, ctx, n - 1) };
        let scaled = graded_bracket(&f.scale(&lambda), &g).unwrap();
        prop_assert_eq!(scaled, graded_bracket(&f, &g).unwrap().scale(&lambda));
    }

    #[test]
    fn rendered_forms_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = context(&mut rng);
        let degree = [0, ctx.n() - 1, ctx.n()][rng.gen_range(0..3)];
        let f = random_hamiltonian(&mut rng, ctx, degree);
        prop_assert_eq!(parse_form(&f.to_string(), ctx).unwrap(), f);
    }
}
