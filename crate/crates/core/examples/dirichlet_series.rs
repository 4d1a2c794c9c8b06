// Truncated Dirichlet series and the scalar equation they satisfy: the
// series of the square root of `one` squares to `ζ(s)` on the window.

use dirconv::series::{evaluate, verify_scalar_equation};
use dirconv::solver::solve;
use dirconv::{Complex64, ConvPolynomial, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(1000)))?;
    let one = TruncatedFunction::<Exact>::one(&window);
    let zeta2 = evaluate(&one, &[Complex64::new(2.0, 0.0)])?.value.re;
    println!("sum n^-2 for n <= 1000 = {zeta2:.9} (pi^2/6 = {:.9})", std::f64::consts::PI.powi(2) / 6.0);

    let t = ConvPolynomial::new(vec![one.neg(), TruncatedFunction::zero(&window), TruncatedFunction::unit(&window)])?;
    let g = solve(&t, &Exact::one())?;
    let points: Vec<Vec<Complex64>> = [(2.0, 0.0), (3.0, 0.0), (5.0, 0.0), (2.0, 10.0)]
        .into_iter()
        .map(|(re, im)| vec![Complex64::new(re, im)])
        .collect();
    let report = verify_scalar_equation(&t, &g, None, &points)?;
    for p in &report.points {
        println!("s = {}: g~(s) = {:.9}, |g~^2 - zeta~| = {:.2e} <= {:.2e}", p.s[0], p.g_value, p.defect, p.bound);
    }
    assert!(report.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
