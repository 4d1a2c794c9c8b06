// A certificate turns finite coefficient norms into a half-plane where the
// solution's series converges absolutely, with explicit bounds that can be
// rechecked against the computed coefficients.

use dirconv::certificate::{certify, validate, NormInput};
use dirconv::series::evaluate_with_tail;
use dirconv::solver::solve;
use dirconv::{Complex64, ConvPolynomial, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(1000)))?;
    let t = ConvPolynomial::new(vec![
        TruncatedFunction::<Exact>::one(&window).neg(),
        TruncatedFunction::zero(&window),
        TruncatedFunction::unit(&window),
    ])?;
    let g = solve(&t, &Exact::one())?;

    // ‖one‖_2 = ζ(2) ≤ 2 holds for the whole function, not just the window
    let cert = certify(&t, &Exact::one(), 2.0, &NormInput::UserBounds(vec![2.0, 0.0, 1.0]))?;
    println!("rho = {}, m1 = {:.6}, t* = {:.6}, C = {:.6}, r = {:.6}", cert.rho, cert.m1, cert.t_star, cert.c, cert.r);
    println!("certified ||g||_r <= {:.6}", cert.norm_bound());

    let report = validate(&cert, &g)?;
    println!("validated on {} levels, max S_r = {:.6}", report.levels, report.max_partial_sum);

    let s = [Complex64::new(8.0, 1.0)];
    let v = evaluate_with_tail(&g, &cert, &s)?;
    let tail = v.tail_bound.unwrap();
    println!("g~(8+i) = {:.12} (tail <= {tail:.3e})", v.value);
    assert!(tail < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
