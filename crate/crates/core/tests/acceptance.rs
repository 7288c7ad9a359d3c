//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always visible:
//! `cargo test -p bernoulli-opmat --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use bernoulli_opmat::basis::{build_dual_matrix, build_m_matrix, build_q_matrix, eval_rows, kronecker_bernoulli};
use bernoulli_opmat::benchmarks::{run_benchmark, uniform_grid, SolveReport};
use bernoulli_opmat::galerkin::{assemble_residual, solve, solve_mixed};
use bernoulli_opmat::quadrature::GaussLegendre;
use bernoulli_opmat::scalar::rational_to_f64;
use bernoulli_opmat::{
    Basis64, Benchmark, BernoulliTable, ExactBasis, ExactOperators, Matrix, Operators64, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn report(name: &str, n: usize) -> Result<SolveReport, String> {
    run_benchmark(name, n, 101).map_err(|e| format!("{name} N={n}: {e}"))
}

fn criterion_1() -> Outcome {
    for n in 0..=15 {
        let table = BernoulliTable::for_order(n).map_err(|e| e.to_string())?;
        let m = build_m_matrix(&table, n).map_err(|e| e.to_string())?;
        let q = build_q_matrix(&table, n).map_err(|e| e.to_string())?;
        let qm = q.mul(&m).map_err(|e| e.to_string())?;
        check(qm == Matrix::identity(n + 1), format!("Q·M ≠ I at N={n}"))?;
    }
    let reference = [
        [r(1, 1), r(0, 1), r(0, 1), r(0, 1), r(0, 1), r(0, 1)],
        [r(0, 1), r(1, 12), r(0, 1), r(-1, 120), r(0, 1), r(1, 252)],
        [r(0, 1), r(0, 1), r(1, 180), r(0, 1), r(-1, 630), r(0, 1)],
        [r(0, 1), r(-1, 120), r(0, 1), r(1, 840), r(0, 1), r(-1, 1680)],
        [r(0, 1), r(0, 1), r(-1, 630), r(0, 1), r(1, 2100), r(0, 1)],
        [r(0, 1), r(1, 252), r(0, 1), r(-1, 1680), r(0, 1), r(5, 16632)],
    ];
    let table = BernoulliTable::for_order(5).map_err(|e| e.to_string())?;
    let d = build_dual_matrix(&table, 5).map_err(|e| e.to_string())?;
    for (i, row) in reference.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            check(&d[(i, j)] == want, format!("D[{i}][{j}] = {} ≠ {want}", d[(i, j)]))?;
        }
    }
    Ok("Q·M = I for N = 0..15; N=5 dual matrix matches all 36 reference entries".into())
}

/// `Σ_{k<n+1} C(n+1, k) B_k = 0`, solved for `B_n` with plain big-rational arithmetic.
fn recurrence_oracle(count: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(count);
    for n in 0..count {
        if n == 0 {
            b.push(Rational::one());
            continue;
        }
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(n + 1)));
    }
    b
}

fn criterion_2() -> Outcome {
    let oracle = recurrence_oracle(41);
    for (n, want) in oracle.iter().enumerate() {
        let got = kronecker_bernoulli(n);
        check(&got == want, format!("B_{n}: Kronecker {got} vs recurrence {want}"))?;
    }
    Ok(format!("B_0..B_40 agree exactly (B_40 = {})", oracle[40]))
}

fn points_within(rep: &SolveReport, tol: f64) -> Result<f64, String> {
    let worst = rep.point_values.iter().map(|p| p.abs_error).fold(0.0, f64::max);
    check(
        worst <= tol,
        format!("{} N={}: max table-point error {worst:.3e} > {tol:e}", rep.name, rep.n),
    )?;
    Ok(worst)
}

fn criterion_3() -> Outcome {
    let rep = report("bessel0", 10)?;
    let worst = points_within(&rep, 1e-8)?;
    check(rep.rms <= 1e-9, format!("RMS {:.3e} > 1e-9", rep.rms))?;
    let ratio = rep.rms / 1.901e-15;
    Ok(format!(
        "N=10 max point error {worst:.2e}, RMS {:.3e} (reference 1.901e-15, ratio {ratio:.2}, within ×100: {})",
        rep.rms,
        (0.01..=100.0).contains(&ratio)
    ))
}

fn criterion_4() -> Outcome {
    let bench = Benchmark::get("lane-emden").map_err(|e| e.to_string())?;
    let grid = uniform_grid(1001);
    for n in [6usize, 8, 10, 12] {
        let ops = Operators64::new(n).map_err(|e| e.to_string())?;
        let sol = solve_mixed(bench.problem(), &ops, &Default::default()).map_err(|e| e.to_string())?;
        let a = sol.a_vector().as_slice();
        for (i, want) in [1.0, 6.0, 12.0].iter().enumerate() {
            check((a[i] - want).abs() <= 1e-12, format!("N={n}: A[{i}] = {}", a[i]))?;
        }
        let tail = a[3..].iter().map(|v| v.abs()).fold(0.0, f64::max);
        check(tail <= 1e-12, format!("N={n}: |A[3..]| = {tail:.2e}"))?;
        let worst = grid
            .iter()
            .map(|&x| (sol.evaluate(&x, 0).unwrap() - bench.exact(x)).abs())
            .fold(0.0, f64::max);
        check(worst <= 1e-12, format!("N={n}: max error {worst:.2e}"))?;
    }
    let ops = ExactOperators::new(6).map_err(|e| e.to_string())?;
    let sol = solve(bench.problem(), &ops).map_err(|e| e.to_string())?;
    let res = assemble_residual(bench.problem(), &ops, sol.a_vector()).map_err(|e| e.to_string())?;
    check(res.as_slice().iter().all(Zero::is_zero), "exact residual is not zero".into())?;
    let prefix: Vec<String> = sol.a_vector().as_slice()[..3].iter().map(|v| v.to_string()).collect();
    Ok(format!(
        "A prefix ({}) for N = 6..12, |u - (x⁴ - x³)| ≤ 1e-12 on 1001 points; exact residual identically zero",
        prefix.join(", ")
    ))
}

fn criterion_5() -> Outcome {
    let rep = report("riccati-tanh", 10)?;
    let worst = points_within(&rep, 1e-6)?;
    let iters = rep.newton_iters.ok_or("no Newton iteration count")?;
    check(iters <= 15, format!("Newton took {iters} iterations"))?;
    Ok(format!(
        "N=10 max point error {worst:.2e}, RMS {:.3e} (reference 7.7612e-8), Newton iterations {iters}",
        rep.rms
    ))
}

fn criterion_6() -> Outcome {
    let rep = report("riccati-erf", 10)?;
    let worst = points_within(&rep, 1e-8)?;
    let low = report("riccati-erf", 2)?;
    let ratio = low.rms / 3.0751e-3;
    check(
        (0.1..=10.0).contains(&ratio),
        format!("N=2 RMS {:.4e} is not within ×10 of 3.0751e-3", low.rms),
    )?;
    Ok(format!(
        "N=10 max point error {worst:.2e}, RMS {:.3e} (reference 2.0730e-10); N=2 RMS {:.4e} (ratio {ratio:.2})",
        rep.rms, low.rms
    ))
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    for name in ["bessel0", "riccati-tanh", "riccati-erf"] {
        let rms = [4usize, 6, 8, 10]
            .iter()
            .map(|&n| report(name, n).map(|r| r.rms))
            .collect::<Result<Vec<_>, _>>()?;
        for w in rms.windows(2) {
            check(
                w[1] * 5.0 <= w[0],
                format!("{name}: RMS {:.3e} -> {:.3e} is less than a 5× drop", w[0], w[1]),
            )?;
        }
        let factors: Vec<String> = rms.windows(2).map(|w| format!("{:.0}", w[0] / w[1])).collect();
        lines.push(format!("{name} ×[{}]", factors.join(", ")));
    }
    Ok(format!("RMS drop factors over N = 4,6,8,10: {}", lines.join("; ")))
}

fn random_rationals(rng: &mut StdRng, len: usize) -> Vec<Rational> {
    (0..len).map(|_| r(rng.gen_range(-50..=50), rng.gen_range(1..=12))).collect()
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_b3a7);

    // derivative: 𝒟ᵀa has the monomial coefficients of the derivative of aᵀB
    for n in [3usize, 7, 12] {
        let ops = ExactOperators::new(n).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let a = random_rationals(&mut rng, n + 1);
            let mono = ops.basis().to_monomial(&a).map_err(|e| e.to_string())?;
            let got = ops
                .basis()
                .to_monomial(&ops.differentiate(&a).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut want: Vec<Rational> = (1..=n).map(|k| &mono[k] * r(k as i64, 1)).collect();
            want.push(Rational::zero());
            check(got == want, format!("derivative identity fails at N={n}"))?;
        }
    }

    // integration rows 0..N-1: exact antiderivative vanishing at 0
    for n in [3usize, 7, 12] {
        let ops = ExactOperators::new(n).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let mut a = random_rationals(&mut rng, n + 1);
            a[n] = Rational::zero();
            let mono = ops.basis().to_monomial(&a).map_err(|e| e.to_string())?;
            let got = ops
                .basis()
                .to_monomial(&ops.integrate(&a).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let mut want = vec![Rational::zero(); n + 1];
            for k in 0..n {
                want[k + 1] = &mono[k] / r(k as i64 + 1, 1);
            }
            check(got == want, format!("antiderivative identity fails at N={n}"))?;
        }
    }

    // last row: ∫₀ˣ B_N - (ℐB)_N is L²-orthogonal to every B_j; integrands have
    // degree at most 2N + 1, integrated exactly by the 20-point rule
    let rule = GaussLegendre::new(20);
    let mut worst_orth: f64 = 0.0;
    for n in [2usize, 5, 8, 10] {
        let ops = Operators64::new(n).map_err(|e| e.to_string())?;
        let basis = ops.basis();
        let top = ExactBasis::new(n + 1).map_err(|e| e.to_string())?;
        let b_top = rational_to_f64(&top.table().numbers()[n + 1]);
        let top_m = top.m_exact().convert::<f64>();
        let xi = ops.xi().as_slice().to_vec();
        for j in 0..=n {
            let f = |x: f64| {
                let exact_anti = (eval_rows(&top_m, &x)[n + 1] - b_top) / (n + 1) as f64;
                let approx = basis.eval(&xi, &x).unwrap();
                (exact_anti - approx) * basis.eval_basis(&x)[j]
            };
            let v = rule.integrate(f, 0.0, 1.0);
            worst_orth = worst_orth.max(v.abs());
        }
    }
    check(worst_orth <= 1e-12, format!("last-row orthogonality {worst_orth:.2e}"))?;

    // product exactness when the degrees add up to at most N
    let mut worst_prod: f64 = 0.0;
    for n in [4usize, 8, 12] {
        let ops = Operators64::new(n).map_err(|e| e.to_string())?;
        let half = n / 2;
        let rand_vec = |rng: &mut StdRng| -> Vec<f64> {
            let mut v = vec![0.0; n + 1];
            for x in v.iter_mut().take(half + 1) {
                *x = rng.gen_range(-1.0..1.0);
            }
            v
        };
        let c = rand_vec(&mut rng);
        let p = rand_vec(&mut rng);
        let prod = ops.multiply(&p, &c).map_err(|e| e.to_string())?;
        let projected = ops.projected_product(&c).and_then(|m| m.tr_mul_vec(&p)).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let x: f64 = rng.gen_range(0.0..1.0);
            let b = ops.basis();
            let want = b.eval(&p, &x).unwrap() * b.eval(&c, &x).unwrap();
            worst_prod = worst_prod
                .max((b.eval(&prod, &x).unwrap() - want).abs())
                .max((b.eval(&projected, &x).unwrap() - want).abs());
        }
    }
    check(worst_prod <= 1e-12, format!("product exactness {worst_prod:.2e}"))?;

    // basis identities
    let n = 12;
    let basis = Basis64::new(n).map_err(|e| e.to_string())?;
    let mut worst_id: f64 = 0.0;
    for _ in 0..50 {
        let x: f64 = rng.gen_range(0.0..1.0);
        let here = basis.eval_basis(&x);
        let shifted = basis.eval_basis(&(x + 1.0));
        let mirrored = basis.eval_basis(&(1.0 - x));
        for k in 1..=n {
            let want = k as f64 * x.powi(k as i32 - 1);
            worst_id = worst_id.max((shifted[k] - here[k] - want).abs() / want.abs().max(1.0));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            worst_id = worst_id.max((mirrored[k] - sign * here[k]).abs() / here[k].abs().max(1.0));
        }
    }
    for k in 1..=n {
        let mean = rule.integrate(|x| basis.eval_basis(&x)[k], 0.0, 1.0);
        check(mean.abs() <= 1e-13, format!("∫B_{k} = {mean:.2e}"))?;
    }
    check(worst_id <= 1e-12, format!("translation/reflection {worst_id:.2e}"))?;

    Ok(format!(
        "derivative and antiderivative identities exact; last-row orthogonality {worst_orth:.1e}; \
         product exactness {worst_prod:.1e}; translation/reflection {worst_id:.1e}; zero mean ≤ 1e-13"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact identities (Q·M, dual matrix)", criterion_1),
        ("Bernoulli numbers B_0..B_40", criterion_2),
        ("bessel0 at N=10", criterion_3),
        ("lane-emden exact recovery", criterion_4),
        ("riccati-tanh at N=10", criterion_5),
        ("riccati-erf at N=10 and N=2", criterion_6),
        ("convergence monotonicity", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {title}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
