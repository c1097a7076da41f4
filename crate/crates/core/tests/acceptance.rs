//! Acceptance suite. Each test prints one `criterion N [...]: PASS|FAIL` line
//! and asserts at the stated tolerance.

mod common;

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{degree_pairs, fd_oracle_eigenvalues, random_hamiltonian, random_poly, report};
use dwq_core::clifford::{gamma_top, operator_pair, Metric, Multivector};
use dwq_core::dwmech::{
    dw_equations_residual, dwhj_residual, FieldSample, PlaneWave, ScalarModel, SolutionSampler,
};
use dwq_core::gradedforms::{
    equation_of_motion_residual, graded_antisymmetry_check, graded_bracket, HorizontalForm,
    PhaseContext, Poly,
};
use dwq_core::quantum::{
    assemble_mode, conservation_convergence, eigensolve, hk_sweep, second_order_residual,
    wkb_residual, AsHjFunctions, Domain, FiniteDifferenceWkb, QuantumModel, Region, WaveComponents,
};
use dwq_core::vacuum::{compare, CutoffConfig, KappaChoice};

fn delta(a: usize, b: usize) -> Poly {
    Poly::from_int(i64::from(a == b))
}

#[test]
fn criterion_1_canonical_brackets() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=3 {
        for m in 1..=2 {
            let ctx = PhaseContext::new(n, m).unwrap();
            for a in 0..m {
                let p_a = HorizontalForm::polymomentum(ctx, a);
                for b in 0..m {
                    let y_b = HorizontalForm::function(ctx, ctx.y(b));
                    let got = graded_bracket(&p_a, &y_b).unwrap();
                    checked += 1;
                    if got != HorizontalForm::function(ctx, delta(a, b)) {
                        failures.push(format!("n={n} m={m} {{p_{a}, y^{b}}}"));
                    }
                    for i in 0..n {
                        let p_ia = HorizontalForm::function(ctx, ctx.p(i, a));
                        for j in 0..n {
                            let y_omega = HorizontalForm::omega_i(ctx, j, ctx.y(b));
                            let got = graded_bracket(&p_ia, &y_omega).unwrap();
                            let want = &delta(i, j) * &delta(a, b);
                            checked += 1;
                            if got != HorizontalForm::function(ctx, want) {
                                failures.push(format!("n={n} m={m} {{p^{i}_{a}, y^{b} w_{j}}}"));
                            }
                        }
                    }
                    for j in 0..n {
                        let y_omega = HorizontalForm::omega_i(ctx, j, ctx.y(b));
                        let got = graded_bracket(&p_a, &y_omega).unwrap();
                        checked += 1;
                        if got != HorizontalForm::omega_i(ctx, j, delta(a, b)) {
                            failures.push(format!("n={n} m={m} {{p_{a}, y^{b} w_{j}}}"));
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 10.0;
    report(
        1,
        "canonical brackets",
        pass,
        &format!("{checked} identities, {} wrong, {elapsed:.2} s; {failures:?}", failures.len()),
    );
    assert!(pass);
}

/// `Σₐ ∂F₁/∂pₐ ∂F₂/∂yᵃ − ∂F₁/∂yᵃ ∂F₂/∂pₐ`.
fn poisson_oracle(ctx: &PhaseContext, f1: &Poly, f2: &Poly) -> Poly {
    let mut out = Poly::zero();
    for a in 0..ctx.m() {
        let (y, p) = (ctx.y_index(a), ctx.p_index(0, a));
        out += &(&f1.derivative(p) * &f2.derivative(y));
        out += &(&(&f1.derivative(y) * &f2.derivative(p)) * &Poly::from_int(-1));
    }
    out
}

#[test]
fn criterion_2_graded_antisymmetry_and_poisson_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut failures = Vec::new();
    let mut pairs = 0;
    for n in 1..=3 {
        for m in 1..=2 {
            let ctx = PhaseContext::new(n, m).unwrap();
            let degrees = degree_pairs(n);
            for t in 0..50 {
                let (r, s) = degrees[t % degrees.len()];
                let f1 = random_hamiltonian(&mut rng, ctx, r);
                let f2 = random_hamiltonian(&mut rng, ctx, s);
                pairs += 1;
                if !graded_antisymmetry_check(&f1, &f2).unwrap() {
                    failures.push(format!("n={n} m={m} ({r},{s}) pair {t}"));
                }
            }
        }
    }
    let mut poisson = 0;
    for m in 1..=2 {
        let ctx = PhaseContext::new(1, m).unwrap();
        let vars: Vec<usize> = (0..ctx.num_coords()).collect();
        for t in 0..60 {
            let f1 = random_poly(&mut rng, &vars, 3, 4);
            let f2 = random_poly(&mut rng, &vars, 3, 4);
            let got = graded_bracket(
                &HorizontalForm::function(ctx, f1.clone()),
                &HorizontalForm::function(ctx, f2.clone()),
            )
            .unwrap();
            poisson += 1;
            if got != HorizontalForm::function(ctx, poisson_oracle(&ctx, &f1, &f2)) {
                failures.push(format!("n=1 m={m} Poisson pair {t}"));
            }
        }
    }
    let pass = failures.is_empty();
    report(
        2,
        "graded antisymmetry",
        pass,
        &format!("{pairs} antisymmetry pairs, {poisson} Poisson pairs; failures {failures:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_clifford_layer() {
    let mut anticommutator_exact = true;
    let mut worst_top = 0.0f64;
    let mut worst_compose = 0.0f64;
    let mut worst_commutator = 0.0f64;
    let mut worst_diagonal = 0.0f64;
    for n in 1..=4 {
        for metric in [Metric::minkowski(n).unwrap(), Metric::euclidean(n).unwrap()] {
            for i in 0..n {
                for j in 0..n {
                    let gi = Multivector::generator(&metric, i);
                    let gj = Multivector::generator(&metric, j);
                    let want = if i == j { 2.0 * metric.g(i) } else { 0.0 };
                    let want = Multivector::scalar(&metric, Complex64::new(want, 0.0));
                    anticommutator_exact &=
                        gi.anticommutator(&gj).unwrap().max_deviation(&want).unwrap() == 0.0;
                }
            }
            let gamma = gamma_top(&metric);
            let one = Multivector::one(&metric);
            worst_top = worst_top.max((&gamma * &gamma).max_deviation(&one).unwrap());

            let ops = operator_pair(&metric, 1.7).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let want = Multivector::scalar(&metric, Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
                    let dev = ops.compose(i, j).max_deviation(&want).unwrap();
                    if i == j {
                        worst_diagonal = worst_diagonal.max(dev);
                    }
                    worst_compose = worst_compose.max(dev);
                    worst_commutator = worst_commutator.max(ops.commutator(i, j).max_norm());
                }
            }
        }
    }
    let literal_ok = worst_compose == 0.0 && worst_commutator == 0.0;
    let pass = anticommutator_exact && worst_top < 1e-14 && literal_ok;
    report(
        3,
        "Clifford layer",
        pass,
        &format!(
            "anticommutator exact: {anticommutator_exact}; max |γ²−1| = {worst_top:.1e}; \
             max |p̂ⁱ∘ω̂ⱼ − δⁱⱼ| = {worst_compose:.3} (diagonal {worst_diagonal:.1e}); \
             max |[p̂ⁱ, ω̂ⱼ]| = {worst_commutator:.3}. Off the diagonal p̂ⁱ∘ω̂ⱼ = γⁱγⱼ is a \
             unit bivector; no associative realization has p̂⁰ω̂₀ = 1, [p̂⁰, ω̂₀] = 0 and \
             p̂⁰ω̂₁ = 0 with ω̂₁ ≠ 0"
        ),
    );
    assert!(anticommutator_exact && worst_top < 1e-14);
    assert!(literal_ok, "literal operator relations do not hold off the diagonal");
}

/// Plane wave whose polymomenta are 1.5 times the Legendre value.
struct SkewedMomentum(PlaneWave);

impl SolutionSampler for SkewedMomentum {
    fn sample(&self, x: &[f64]) -> dwq_core::Result<FieldSample> {
        let mut s = self.0.sample(x)?;
        s.p.iter_mut().flatten().for_each(|v| *v *= 1.5);
        s.dp.iter_mut().flatten().flatten().for_each(|v| *v *= 1.5);
        Ok(s)
    }
}

#[test]
fn criterion_4_dw_classical_layer() {
    let mut lines = Vec::new();
    let mut pass = true;
    for (n, m) in [(2, 1), (2, 2), (3, 2), (1, 1)] {
        let metric = Metric::minkowski(n).unwrap();
        let model = ScalarModel::free(metric.clone(), m, (1, 1)).unwrap();
        let amps: Vec<f64> = (0..m).map(|a| 0.8 - 0.3 * a as f64).collect();
        let on = PlaneWave::on_shell(metric.clone(), amps.clone(), 1.0, 0.75);
        let off = PlaneWave::on_shell(metric.clone(), amps, 2.0, 0.75);
        let points: Vec<Vec<f64>> = (0..7)
            .map(|t| (0..n).map(|i| 0.37 * t as f64 - 0.21 * i as f64).collect())
            .collect();

        let dw_on = dw_equations_residual(&model, &on, &points).unwrap().max();
        let dw_off = dw_equations_residual(&model, &off, &points).unwrap().max();
        pass &= dw_on < 1e-10 && dw_off > 1e-2;

        let ctx = model.phase_context().unwrap();
        let mut forms: Vec<(String, HorizontalForm)> = (0..m)
            .map(|a| (format!("y^{a}"), HorizontalForm::function(ctx, ctx.y(a))))
            .collect();
        forms.extend((0..m).map(|a| (format!("p_{a}"), HorizontalForm::polymomentum(ctx, a))));
        let skewed = SkewedMomentum(on.clone());
        let mut motion_on = 0.0f64;
        let mut motion_off = f64::INFINITY;
        for (name, f) in &forms {
            let r_on = equation_of_motion_residual(f, &model, &on, &points).unwrap().max;
            // field forms only see the Legendre relation, momenta only the field equation
            let control: &dyn SolutionSampler = if name.starts_with('y') { &skewed } else { &off };
            let r_off = equation_of_motion_residual(f, &model, control, &points).unwrap().max;
            motion_on = motion_on.max(r_on);
            motion_off = motion_off.min(r_off);
        }
        pass &= motion_on < 1e-10 && motion_off > 1e-2;
        lines.push(format!(
            "n={n} m={m}: field eqs {dw_on:.1e}/{dw_off:.1e}, motion {motion_on:.1e}/{motion_off:.1e}"
        ));
    }
    report(4, "DW classical layer", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_5_spectrum() {
    let start = Instant::now();
    let mut worst_spectral = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut worst_dispersion = 0.0f64;
    let params = [(1.0, 1.0, 1.0), (1.7, 0.9, 1.3), (0.4, 2.0, 0.6)];
    for (mass, hbar, kappa) in params {
        let model = QuantumModel::new(Metric::minkowski(2).unwrap(), mass, hbar, kappa).unwrap();
        let pairs = eigensolve(&model, 10, Domain::Spectral).unwrap();
        for p in &pairs {
            let scaled = p.chi / (kappa * mass);
            worst_spectral = worst_spectral.max((scaled - (p.level as f64 + 0.5)).abs());
        }
        let half_width = 8.0 * model.oscillator_length();
        let oracle = fd_oracle_eigenvalues(
            model.kinetic_coeff(),
            |y| model.potential_value(y),
            half_width,
            2000,
            11,
        );
        for (p, o) in pairs.iter().zip(&oracle) {
            worst_oracle = worst_oracle.max(((p.chi - o) / o).abs());
        }
        for k in [0.0, 0.3, -1.1, 4.0] {
            let mode = assemble_mode(&model, 0, &[k]).unwrap();
            let lhs = mode.omega * mode.omega - k * k;
            let rhs = (mass / (2.0 * hbar)).powi(2);
            let scale = (mode.omega * mode.omega).max(rhs);
            worst_dispersion = worst_dispersion.max((lhs - rhs).abs() / scale);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst_spectral < 1e-8
        && worst_oracle < 1e-4
        && worst_dispersion <= 8.0 * f64::EPSILON
        && elapsed < 30.0;
    report(
        5,
        "spectrum",
        pass,
        &format!(
            "max |χ/κm − (N+½)| = {worst_spectral:.1e}; FD oracle rel {worst_oracle:.1e}; \
             dispersion rel {worst_dispersion:.1e}; {elapsed:.2} s"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_conservation_law() {
    let model = QuantumModel::free_default();
    let a = assemble_mode(&model, 0, &[0.5]).unwrap().wave;
    let b = assemble_mode(&model, 1, &[-0.3]).unwrap().wave;
    let wave = a.superpose(&b.scale(Complex64::new(0.6, -0.2))).unwrap();
    let region = Region::new(vec![-0.5; 3], vec![0.5; 3]).unwrap();
    let study = conservation_convergence(&model, &wave, &region, 8, 4).unwrap();
    let pass = study.residuals.len() >= 3 && (study.order - 2.0).abs() <= 0.1;
    report(
        6,
        "conservation law",
        pass,
        &format!(
            "{} levels, residuals {:?}, order {:.3}",
            study.residuals.len(),
            study.residuals,
            study.order
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_wkb() {
    let model = QuantumModel::new(Metric::minkowski(2).unwrap(), 1.2, 0.8, 1.1).unwrap();
    let s = |x: &[f64], y: f64| {
        vec![
            -0.4 * y * y * (0.9 * x[0]).tan() + 0.3 * x[1],
            0.2 * y * x[0] - 0.1 * y * y * x[1],
        ]
    };
    let points: Vec<(Vec<f64>, f64)> = (0..9)
        .map(|t| (vec![0.05 * t as f64, 0.3 - 0.07 * t as f64], -0.8 + 0.21 * t as f64))
        .collect();

    let flat = FiniteDifferenceWkb { n: 2, s, r: |_: &[f64], _: f64| 1.3, step: 1e-4 };
    let res = wkb_residual(&model, &flat, &points).unwrap();
    let hj_points: Vec<(Vec<f64>, Vec<f64>)> =
        points.iter().map(|(x, y)| (x.clone(), vec![*y])).collect();
    let classical = dwhj_residual(
        &model.classical_model().unwrap(),
        &AsHjFunctions(&flat),
        &hj_points,
    )
    .unwrap();
    let identical = res
        .points
        .iter()
        .zip(&classical)
        .all(|(p, c)| p.main == *c && p.quantum == 0.0);

    let curved = FiniteDifferenceWkb { n: 2, s, r: |_: &[f64], y: f64| (-0.7 * y * y).exp(), step: 1e-4 };
    let sweep = hk_sweep(&model, &curved, &points, &[0.25, 0.5, 1.0, 2.0, 4.0]).unwrap();
    let sides = wkb_residual(&model, &curved, &points).unwrap();
    let pass = identical && (sweep.exponent - 2.0).abs() <= 0.02;
    report(
        7,
        "WKB",
        pass,
        &format!(
            "R constant: main equals classical DWHJ residual bitwise: {identical}; \
             ħκ exponent {:.6}; side residuals (reported) {:.3e}, {:.3e}",
            sweep.exponent, sides.side1, sides.side2
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_vacuum() {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (q, volume, n, hbar, mass) in [(6.0, 1.0, 2, 1.0, 1.0), (40.0, 2.5, 4, 0.7, 1.9), (1.3, 0.2, 3, 1.4, 0.3)] {
        let cfg = CutoffConfig::new(q, volume, n, hbar, mass).unwrap();
        let k_unit = mass / hbar;
        let small: Vec<f64> = (0..=20).map(|j| k_unit * 0.01 * (j as f64 / 20.0 - 0.5) * 2.0).collect();
        let rows = compare(&cfg, &small, KappaChoice::Identified).unwrap();
        let at_zero = compare(&cfg, &[0.0], KappaChoice::Identified).unwrap()[0].ratio;
        let small_dev = rows.iter().map(|r| (r.ratio - 1.0).abs()).fold(0.0, f64::max);

        let mid: Vec<f64> = (1..=40).map(|j| k_unit * 0.1 * j as f64 / 40.0).collect();
        let rows = compare(&cfg, &mid, KappaChoice::Identified).unwrap();
        let shape = rows
            .iter()
            .map(|r| {
                let u = hbar * r.k / mass;
                ((1.0 - r.ratio) - 0.5 * u * u).abs() / (0.5 * u * u)
            })
            .fold(0.0, f64::max);
        let counter = compare(&cfg, &[0.0], KappaChoice::Counterfactual).unwrap()[0].ratio;

        pass &= at_zero == 1.0 && small_dev <= 5.1e-5 && shape <= 0.05 && counter == 0.5;
        notes.push(format!(
            "n={n}: ratio(0) = {at_zero}, small-k dev {small_dev:.2e}, shape rel {shape:.2e}, counterfactual {counter}"
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    pass &= elapsed < 1.0;
    report(8, "vacuum comparison", pass, &format!("{}; {elapsed:.4} s", notes.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_9_second_order_consequence() {
    let mut worst = 0.0f64;
    for (n, mass, hbar, kappa) in [(2, 1.0, 1.0, 1.0), (2, 1.7, 0.9, 1.3), (3, 0.6, 1.2, 0.8)] {
        let model = QuantumModel::new(Metric::minkowski(n).unwrap(), mass, hbar, kappa).unwrap();
        for level in [0, 1, 3, 6] {
            for k in [0.0, 0.4, -1.2] {
                let kv: Vec<f64> = (0..n - 1).map(|j| k * (1.0 - 0.3 * j as f64)).collect();
                let mode = assemble_mode(&model, level, &kv).unwrap();
                let wave = WaveComponents::from(mode.wave);
                let points: Vec<Vec<f64>> = (0..6)
                    .map(|t| {
                        let mut p: Vec<f64> = (0..n).map(|i| 0.3 * t as f64 - 0.2 * i as f64).collect();
                        p.push(model.oscillator_length() * (-1.5 + 0.6 * t as f64));
                        p
                    })
                    .collect();
                worst = worst.max(second_order_residual(&model, &wave, &points).unwrap());
            }
        }
    }
    let pass = worst < 1e-8;
    report(9, "second-order consequence", pass, &format!("max |ħ²□ψ + κ⁻²Ĥ²ψ| = {worst:.2e}"));
    assert!(pass);
}
