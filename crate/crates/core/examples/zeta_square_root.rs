// Solves `g ∗ g = one` with `g(1) = 1`: the Dirichlet coefficients of
// `ζ(s)^{1/2}`. The solution is multiplicative with
// `g(p^k) = binomial(2k, k) / 4^k`.

use dirconv::scalar::rational;
use dirconv::solver::{residual, solve};
use dirconv::{ConvPolynomial, Coords, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(500)))?;
    let t = ConvPolynomial::new(vec![
        TruncatedFunction::<Exact>::one(&window).neg(),
        TruncatedFunction::zero(&window),
        TruncatedFunction::unit(&window),
    ])?;
    let g = solve(&t, &Exact::one())?;
    assert!(residual(&t, &g)?.is_zero());

    let at = |n: u64| g.get(&Coords::Dirichlet(vec![n])).unwrap().clone();
    for (p, k, num, den) in [(2, 1, 1, 2), (2, 2, 3, 8), (2, 3, 5, 16), (3, 2, 3, 8), (7, 3, 5, 16)] {
        let n = u64::pow(p, k);
        assert_eq!(at(n), Exact::from_rational(&rational(num, den)));
        println!("g({p}^{k}) = {num}/{den}");
    }
    assert_eq!(at(6 * 35), at(6) * at(35));
    println!("g(210) = g(6) g(35) = {}", at(210).to_c64().re);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
