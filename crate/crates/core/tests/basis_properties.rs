use bernoulli_opmat::basis::{bernoulli_numbers, bernoulli_polynomial_exact, build_dual_matrix};
use bernoulli_opmat::quadrature::GaussLegendre;
use bernoulli_opmat::scalar::ratio;
use bernoulli_opmat::{Basis64, BernoulliTable, ExactBasis, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::sync::OnceLock;

fn basis(n: usize) -> &'static Basis64 {
    static CACHE: OnceLock<Vec<Basis64>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=15).map(|k| Basis64::new(k).unwrap()).collect())[n]
}

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

#[test]
fn first_bernoulli_numbers() {
    let t = bernoulli_numbers(5).unwrap();
    assert_eq!(t.numbers(), &[ratio(1, 1), ratio(-1, 2), ratio(1, 6), ratio(0, 1), ratio(-1, 30)]);
}

#[test]
fn odd_bernoulli_numbers_vanish() {
    let t = bernoulli_numbers(41).unwrap();
    for n in (3..41).step_by(2) {
        assert!(t.numbers()[n].is_zero(), "B_{n}");
    }
    // even ones alternate in sign from B_2 on
    for n in (2..41).step_by(2) {
        assert_eq!(t.numbers()[n].is_positive(), n % 4 == 2, "B_{n}");
    }
}

#[test]
fn dual_matrix_symmetric_and_solvable() {
    for n in 0..=15 {
        let table = BernoulliTable::for_order(n).unwrap();
        let d = build_dual_matrix(&table, n).unwrap();
        assert!(d.is_symmetric());
        let df = d.convert::<f64>();
        for k in 0..=n {
            let mut e = vec![0.0; n + 1];
            e[k] = 1.0;
            let y = df.solve(&e).unwrap();
            assert!(y.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn dual_entries_match_quadrature() {
    let n = 8;
    let basis = Basis64::new(n).unwrap();
    let rule = GaussLegendre::new(20);
    for i in 0..=n {
        for j in 0..=n {
            let q = rule.integrate(|x| {
                let b = basis.eval_basis(&x);
                b[i] * b[j]
            }, 0.0, 1.0);
            assert!((q - basis.dual_matrix()[(i, j)]).abs() < 1e-14, "D[{i}][{j}]");
        }
    }
}

#[test]
fn basis_values_at_special_points() {
    let basis = Basis64::new(6).unwrap();
    let at0 = basis.eval_basis(&0.0);
    let nums = basis.table().numbers();
    for (k, v) in at0.iter().enumerate() {
        assert!((v - bernoulli_opmat::scalar::rational_to_f64(&nums[k])).abs() < 1e-15);
    }
    assert_eq!(basis.eval_basis(&0.5)[1], 0.0);
    assert!(basis.eval_basis(&1.0)[3].abs() < 1e-15);
}

#[test]
fn low_degree_expansions() {
    let basis = ExactBasis::new(8).unwrap();
    let z = |n: i64| ratio(n, 1);
    let x = basis.expand_polynomial(&[z(0), z(1)]).unwrap();
    assert_eq!(&x.as_slice()[..3], &[ratio(1, 2), z(1), z(0)]);
    let x2 = basis.expand_polynomial(&[z(0), z(0), z(1)]).unwrap();
    assert_eq!(&x2.as_slice()[..4], &[ratio(1, 3), z(1), z(1), z(0)]);
    let one_x2 = basis.expand_polynomial(&[z(1), z(0), z(1)]).unwrap();
    assert_eq!(&one_x2.as_slice()[..4], &[ratio(4, 3), z(1), z(1), z(0)]);
}

#[test]
fn projection_of_non_polynomial_is_orthogonal() {
    let n = 6;
    let basis = Basis64::new(n).unwrap();
    let a = basis.project(|x: f64| x.exp()).unwrap();
    let rule = GaussLegendre::new(30);
    for j in 0..=n {
        let r = rule.integrate(
            |x| (x.exp() - basis.eval(a.as_slice(), &x).unwrap()) * basis.eval_basis(&x)[j],
            0.0,
            1.0,
        );
        assert!(r.abs() < 1e-12, "⟨e^x - Πe^x, B_{j}⟩ = {r:e}");
    }
}

proptest! {
    #[test]
    fn translation_identity(x in 0.0f64..1.0) {
        let n = 12;
        let basis = basis(n);
        let here = basis.eval_basis(&x);
        let next = basis.eval_basis(&(x + 1.0));
        for k in 1..=n {
            let want = k as f64 * x.powi(k as i32 - 1);
            prop_assert!(rel_close(next[k] - here[k], want, 1e-12), "n = {}", k);
        }
    }

    #[test]
    fn reflection_identity(x in 0.0f64..1.0) {
        let n = 12;
        let basis = basis(n);
        let here = basis.eval_basis(&x);
        let there = basis.eval_basis(&(1.0 - x));
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(rel_close(there[k], sign * here[k], 1e-12), "n = {}", k);
        }
    }

    #[test]
    fn exact_evaluation_matches_float(num in -40i64..40, n in 0usize..10) {
        let table = basis(10).table();
        let x = ratio(num, 17);
        let exact = bernoulli_polynomial_exact(table, n, &x).unwrap();
        let basis = basis(10);
        let float = basis.eval_basis(&(num as f64 / 17.0))[n];
        prop_assert!(rel_close(float, bernoulli_opmat::scalar::rational_to_f64(&exact), 1e-12));
    }

    #[test]
    fn expand_round_trips(coeffs in prop::collection::vec(-1000i64..1000, 1..10)) {
        let n = 9;
        let basis = ExactBasis::new(n).unwrap();
        let mut mono: Vec<Rational> = coeffs.iter().map(|&c| ratio(c, 7)).collect();
        mono.resize(n + 1, Rational::zero());
        let b = basis.expand_polynomial(&mono).unwrap();
        prop_assert_eq!(basis.to_monomial(b.as_slice()).unwrap(), mono);
    }

    #[test]
    fn projection_equals_expansion(n in 0usize..=4, seed in prop::collection::vec(-1.0f64..1.0, 5)) {
        let coeffs = &seed[..=n];
        let basis = basis(n);
        let p = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let projected = basis.project(p).unwrap();
        let expanded = basis.expand_polynomial(coeffs).unwrap();
        for (a, b) in projected.as_slice().iter().zip(expanded.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // beyond N = 4 the f64 sampling noise ε‖f‖ in ⟨f, P̃_k⟩ is amplified by the
    // Bernoulli coefficients of P̃_N, which grow like (2N+1)·C(2N, N)
    #[test]
    fn projection_within_sampling_floor(n in 5usize..=10, seed in prop::collection::vec(-2.0f64..2.0, 11)) {
        let coeffs = &seed[..=n];
        let basis = basis(n);
        let p = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let projected = basis.project(p).unwrap();
        let expanded = basis.expand_polynomial(coeffs).unwrap();
        let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1.0);
        let floor = 16.0 * f64::EPSILON * (2 * n + 1) as f64 * binomial(2 * n, n) * scale;
        for (a, b) in projected.as_slice().iter().zip(expanded.as_slice()) {
            prop_assert!((a - b).abs() <= floor, "N = {}: {} vs {} (floor {:e})", n, a, b, floor);
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn zero_mean() {
    let n = 15;
    let basis = basis(n);
    let rule = GaussLegendre::new(20);
    for k in 1..=n {
        let m = rule.integrate(|x| basis.eval_basis(&x)[k], 0.0, 1.0);
        assert!(m.abs() <= 1e-13, "∫B_{k} = {m:e}");
    }
}

#[test]
fn degree_overflow_is_rejected() {
    let basis = Basis64::new(3).unwrap();
    assert!(basis.expand_polynomial(&[0.0, 0.0, 0.0, 0.0, 1.0]).is_err());
    // trailing zeros beyond N are fine
    assert!(basis.expand_polynomial(&[1.0, 0.0, 0.0, 0.0, 0.0]).is_ok());
}
