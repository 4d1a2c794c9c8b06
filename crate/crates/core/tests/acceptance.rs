//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use dirconv::certificate::{certify, validate, NormInput};
use dirconv::cli::{render, run_text, Format, RunOptions};
use dirconv::series::verify_scalar_equation;
use dirconv::solver::{factorization_check, residual, residual_scale, solve, solve_all};
use dirconv::{Complex64, ConvPolynomial, Coords, Error, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { passed: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { passed: false, detail: detail.into() }
}

/// Every solved instance passes through here.
#[derive(Default)]
struct ResidualLog {
    exact: usize,
    double: usize,
    failures: Vec<String>,
}

impl ResidualLog {
    fn record<S: Scalar>(&mut self, label: &str, poly: &ConvPolynomial<S>, g: &TruncatedFunction<S>) {
        let res = residual(poly, g).unwrap();
        if S::EXACT {
            self.exact += 1;
            if !res.is_zero() {
                self.failures.push(format!("{label}: non-zero exact residual"));
            }
        } else {
            self.double += 1;
            let scale = residual_scale(poly, g).unwrap();
            if res.max_abs() > 1e-10 * scale {
                self.failures.push(format!("{label}: residual {:e} > 1e-10 * {scale:e}", res.max_abs()));
            }
        }
    }

    fn record_flag(&mut self, label: &str, exact: bool, passed: bool) {
        if exact {
            self.exact += 1;
        } else {
            self.double += 1;
        }
        if !passed {
            self.failures.push(format!("{label}: residual check failed"));
        }
    }
}

fn sqrt_one(w: &std::sync::Arc<Window>) -> ConvPolynomial<Exact> {
    ConvPolynomial::new(vec![
        TruncatedFunction::one(w).neg(),
        TruncatedFunction::zero(w),
        TruncatedFunction::unit(w),
    ])
    .unwrap()
}

fn mobius_oracle(log: &mut ResidualLog) -> Outcome {
    let n = 10_000;
    let start = Instant::now();
    let w = od_window(n as u64);
    let one = TruncatedFunction::<Exact>::one(&w);
    let mu = one.invert().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let sieve = sieve_mobius(n);
    let mismatches = (1..=n)
        .filter(|&k| mu.get(&Coords::Dirichlet(vec![k as u64])) != Some(&q(sieve[k], 1)))
        .count();
    let linear = ConvPolynomial::new(vec![TruncatedFunction::unit(&w).neg(), one]).unwrap();
    log.record("mobius", &linear, &mu);
    let detail = format!("n <= {n}: {mismatches} mismatches against the sieve, {elapsed:.2} s (limit 10 s)");
    if mismatches == 0 && elapsed < 10.0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn zeta_root_oracle(log: &mut ResidualLog) -> Outcome {
    let n = 1000usize;
    let w = od_window(n as u64);
    let t = sqrt_one(&w);
    let g = solve(&t, &q(1, 1)).unwrap();
    log.record("zeta-sqrt", &t, &g);
    let at = |k: usize| g.get(&Coords::Dirichlet(vec![k as u64])).unwrap().clone();
    let primes = primes_upto(n);
    let bad_p = primes.iter().filter(|&&p| at(p) != q(1, 2)).count();
    let squares: Vec<usize> = primes.iter().map(|p| p * p).filter(|&s| s <= n).collect();
    let bad_p2 = squares.iter().filter(|&&s| at(s) != q(3, 8)).count();
    let mut pairs = 0;
    let mut bad_mult = 0;
    for a in 2..=n {
        for b in a..=n / a {
            if gcd(a, b) == 1 {
                pairs += 1;
                if at(a * b) != at(a) * at(b) {
                    bad_mult += 1;
                }
            }
        }
    }
    let detail = format!(
        "{} primes, {} prime squares, {pairs} coprime pairs; failures {bad_p}/{bad_p2}/{bad_mult}",
        primes.len(),
        squares.len()
    );
    if bad_p + bad_p2 + bad_mult == 0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn binomial_oracle(log: &mut ResidualLog) -> Outcome {
    let w = Window::enumerate(Semigroup::lattice(1), Truncation::MaxElements(51)).unwrap();
    let mut a0 = TruncatedFunction::zero(&w);
    a0.set(&Coords::Lattice(vec![0]), q(-1, 1)).unwrap();
    a0.set(&Coords::Lattice(vec![1]), q(-1, 1)).unwrap();
    let t = ConvPolynomial::new(vec![a0, TruncatedFunction::zero(&w), TruncatedFunction::unit(&w)]).unwrap();
    let g = solve(&t, &q(1, 1)).unwrap();
    log.record("binomial", &t, &g);
    let expected: Vec<Exact> = (0..=50).map(|k| Exact::from_rational(&half_binomial(k))).collect();
    let exact_ok = g.values() == expected.as_slice();

    let ta = ConvPolynomial::new(t.coeffs().iter().map(|c| c.to_approx()).collect()).unwrap();
    let ga = solve(&ta, &Complex64::new(1.0, 0.0)).unwrap();
    log.record("binomial-double", &ta, &ga);
    let err = ga
        .values()
        .iter()
        .zip(&expected)
        .map(|(a, e)| (a - e.to_c64()).norm())
        .fold(0.0, f64::max);
    let detail = format!("n <= 50: exact match {exact_ok}, double max error {err:e} (limit 1e-12)");
    if exact_ok && err <= 1e-12 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn unsolvability() -> Outcome {
    let cases: Vec<(&str, std::sync::Arc<Window>, Coords, Exact)> = vec![
        ("ordinary-dirichlet", od_window(50), Coords::Dirichlet(vec![2]), q(1, 1)),
        (
            "lattice(2)",
            Window::enumerate(Semigroup::lattice(2), Truncation::SizeBound(Size::integer(4))).unwrap(),
            Coords::Lattice(vec![1, 0]),
            q(3, 1),
        ),
        (
            "generators {2,3}",
            Window::enumerate(Semigroup::integer_generators(&[&[2], &[3]]), Truncation::SizeBound(Size::integer(15))).unwrap(),
            Coords::Rational(vec![dirconv::scalar::rational(2, 1)]),
            q(-5, 7),
        ),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, w, qpt, value) in cases {
        let mut a = TruncatedFunction::zero(&w);
        a.set(&qpt, value.clone()).unwrap();
        // some mass further out must not matter
        let far = w.len() - 1;
        let mut vals = a.into_values();
        vals[far] = q(7, 3);
        let a = TruncatedFunction::new(w.clone(), vals).unwrap();
        let t = ConvPolynomial::new(vec![a.neg(), TruncatedFunction::zero(&w), TruncatedFunction::unit(&w)]).unwrap();
        match solve_all(&t) {
            Err(Error::NoSimpleRoots { obstructions, .. }) => {
                let expected = (-value).to_repr();
                let hit = obstructions.iter().any(|o| o.element == qpt.to_string() && o.value == expected);
                ok &= hit;
                notes.push(format!("{name}: -a{qpt} = {} {}", expected.re, if hit { "reported" } else { "MISSING" }));
            }
            other => {
                ok = false;
                notes.push(format!("{name}: expected refusal, got {other:?}"));
            }
        }
    }
    if ok {
        pass(notes.join("; "))
    } else {
        fail(notes.join("; "))
    }
}

fn factorization(log: &mut ResidualLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut failures = 0;
    for i in 0..25 {
        let w = random_window(&mut rng);
        let d = 2 + i % 2;
        let (t, _) = random_simple_instance(&mut rng, &w, d);
        let all = solve_all(&t).unwrap();
        for (_, g) in &all.solutions {
            log.record("factorization", &t, g);
        }
        let gs: Vec<_> = all.solutions.into_iter().map(|(_, g)| g).collect();
        match factorization_check(&t, &gs) {
            Ok(c) if c.holds && c.max_deviation == 0.0 => {}
            _ => failures += 1,
        }
    }
    let detail = format!("25 exact instances, d in {{2,3}}, {failures} failures");
    if failures == 0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn certificate_soundness(log: &mut ResidualLog) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let (mut certified, mut attempts, mut refused, mut violations) = (0, 0, 0, Vec::new());
    let mut levels = 0;
    while certified < 25 && attempts < 200 {
        attempts += 1;
        let w = random_window(&mut rng);
        let d = 1 + attempts % 3;
        let (t, roots) = random_simple_instance(&mut rng, &w, d);
        let z0 = roots[attempts % d].clone();
        let rho = [0.0, 0.5, 1.0][attempts % 3];
        let double = attempts % 4 == 0;
        let outcome = if double {
            let ta = ConvPolynomial::new(t.coeffs().iter().map(|c| c.to_approx()).collect()).unwrap();
            let z = z0.to_c64();
            let g = solve(&ta, &z).unwrap();
            log.record("certificate-double", &ta, &g);
            certify(&ta, &z, rho, &NormInput::WindowSupported).map(|c| validate(&c, &g))
        } else {
            let g = solve(&t, &z0).unwrap();
            log.record("certificate", &t, &g);
            certify(&t, &z0, rho, &NormInput::WindowSupported).map(|c| validate(&c, &g))
        };
        match outcome {
            Ok(Ok(report)) => {
                certified += 1;
                levels += report.levels;
            }
            Ok(Err(e)) => {
                certified += 1;
                violations.push(format!("instance {attempts}: {e}"));
            }
            Err(Error::NoPositiveR) => refused += 1,
            Err(e) => violations.push(format!("instance {attempts}: certify failed: {e}")),
        }
    }
    let detail = format!(
        "{certified} certified instances ({refused} without certificate), {levels} levels checked, {} violations{}",
        violations.len(),
        violations.first().map(|v| format!(": {v}")).unwrap_or_default()
    );
    if certified >= 25 && violations.is_empty() {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn half_plane(log: &mut ResidualLog) -> Outcome {
    let w = od_window(1000);
    let t = sqrt_one(&w);
    let g = solve(&t, &q(1, 1)).unwrap();
    log.record("half-plane", &t, &g);
    // ‖one‖_2 = ζ(2) < 2, ‖0‖ = 0, ‖u‖ = 1
    let cert = certify(&t, &q(1, 1), 2.0, &NormInput::UserBounds(vec![2.0, 0.0, 1.0])).unwrap();
    let points: Vec<Vec<Complex64>> = [(2.0, 0.0), (3.0, 0.0), (5.0, 0.0), (2.0, 10.0)]
        .iter()
        .map(|&(re, im)| vec![Complex64::new(re, im)])
        .collect();
    let report = verify_scalar_equation(&t, &g, Some(&cert), &points).unwrap();
    let notes: Vec<String> = report
        .points
        .iter()
        .map(|p| {
            let route = match p.route {
                dirconv::series::BoundRoute::Certificate => "cert",
                dirconv::series::BoundRoute::WindowDefect => "window",
            };
            format!("s={}: {:.1e} <= {:.1e} ({route})", fmt_s(p.s[0]), p.defect, p.bound)
        })
        .collect();
    let detail = format!("certified r = {:.3}; {}", cert.r, notes.join(", "));
    if report.passed {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn fmt_s(s: Complex64) -> String {
    if s.im == 0.0 {
        format!("{}", s.re)
    } else {
        format!("{}+{}i", s.re, s.im)
    }
}

fn algebra_laws() -> Outcome {
    let windows = law_windows();
    let cases = 256;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let value = (-4i64..=4, 1i64..=3);
    let n = windows.iter().map(|w| w.len()).max().unwrap();
    let strategy = (
        0..windows.len(),
        proptest::collection::vec(value.clone(), n),
        proptest::collection::vec(value.clone(), n),
        proptest::collection::vec(value, n),
    );
    let result = runner.run(&strategy, |(wi, a, b, c)| {
        let w = &windows[wi];
        let (f, g, h) = (function_from(w, &a), function_from(w, &b), function_from(w, &c));
        check_laws(&f, &g, &h).map_err(|law| TestCaseError::fail(format!("{law} fails on window {wi}")))
    });
    match result {
        Ok(()) => pass(format!("{cases} random exact cases over {} windows", windows.len())),
        Err(e) => fail(format!("{e}")),
    }
}

fn determinism(log: &mut ResidualLog) -> Outcome {
    let spec = r#"{
        "semigroup": {"kind": "ordinary-dirichlet", "k": 1, "size_bound": "log(10000)"},
        "arithmetic": {"mode": "double"},
        "equation": {"coefficients": [
            {"kind": "const", "value": -2},
            {"kind": "one"},
            {"kind": "indicator", "element": [2], "value": "1/2"},
            {"kind": "unit"}
        ]},
        "task": {"kind": "solve", "root": 1}
    }"#;
    let mut outputs = Vec::new();
    let mut single = 0.0;
    for threads in [1, 4, 8] {
        let start = Instant::now();
        let mut doc = match run_text(spec, Path::new("."), &RunOptions { threads, tolerance: None }) {
            Ok(d) => d,
            Err(e) => return fail(format!("run failed: {e}")),
        };
        if threads == 1 {
            single = start.elapsed().as_secs_f64();
            for s in &doc.solutions {
                log.record_flag("determinism", false, s.residual.as_ref().is_some_and(|r| r.passed));
            }
        }
        doc.timing_ms = 0;
        outputs.push(render(&doc, Format::Json));
    }
    let identical = outputs.windows(2).all(|p| p[0] == p[1]);
    let detail = format!(
        "d = 3, n <= 10000, double: {single:.2} s single-threaded (limit 60 s), output identical for 1/4/8 threads: {identical}"
    );
    if identical && single < 60.0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn residuals(log: &ResidualLog) -> Outcome {
    let detail = format!(
        "{} exact and {} double solutions checked, {} failures{}",
        log.exact,
        log.double,
        log.failures.len(),
        log.failures.first().map(|f| format!(": {f}")).unwrap_or_default()
    );
    if log.failures.is_empty() && log.exact > 0 && log.double > 0 {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn main() -> ExitCode {
    let mut log = ResidualLog::default();
    let mut results: Vec<(u8, &str, Outcome)> = vec![
        (1, "mobius oracle", mobius_oracle(&mut log)),
        (2, "square root of zeta", zeta_root_oracle(&mut log)),
        (3, "binomial series", binomial_oracle(&mut log)),
        (4, "unsolvability", unsolvability()),
        (5, "factorization", factorization(&mut log)),
        (7, "certificate soundness", certificate_soundness(&mut log)),
        (8, "half-plane verification", half_plane(&mut log)),
        (9, "algebra laws", algebra_laws()),
        (10, "determinism and performance", determinism(&mut log)),
    ];
    results.push((6, "residual exactness", residuals(&log)));
    results.sort_by_key(|r| r.0);
    let mut all = true;
    for (id, name, outcome) in &results {
        all &= outcome.passed;
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {}", outcome.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
