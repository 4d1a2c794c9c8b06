// On the lattice `ℕ₀` the algebra is formal power series in `w`, so
// `g ∗ g = 1 + w` gives the binomial series of `(1 + w)^{1/2}`, in both
// exact and double arithmetic.

use dirconv::scalar::rational;
use dirconv::solver::{residual, residual_scale, solve};
use dirconv::{Complex64, ConvPolynomial, Coords, Exact, Scalar, Semigroup, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::lattice(1), Truncation::MaxElements(21))?;
    let mut a0 = TruncatedFunction::<Exact>::zero(&window);
    a0.set(&Coords::Lattice(vec![0]), Exact::from_int(-1))?;
    a0.set(&Coords::Lattice(vec![1]), Exact::from_int(-1))?;
    let t = ConvPolynomial::new(vec![a0, TruncatedFunction::zero(&window), TruncatedFunction::unit(&window)])?;

    let g = solve(&t, &Exact::one())?;
    let mut binom = rational(1, 1);
    for (n, value) in g.values().iter().enumerate() {
        assert_eq!(*value, Exact::from_rational(&binom));
        binom = binom * (rational(1, 2) - rational(n as i64, 1)) / rational(n as i64 + 1, 1);
    }
    let shown: Vec<String> = g.values()[..6].iter().map(|v| v.to_repr().re).collect();
    println!("exact:  {} ...", shown.join(", "));

    let approx = ConvPolynomial::new(t.coeffs().iter().map(|c| c.to_approx()).collect())?;
    let ga = solve(&approx, &Complex64::new(1.0, 0.0))?;
    let err = g.to_approx().max_abs_diff(&ga)?;
    let res = residual(&approx, &ga)?.max_abs();
    assert!(err < 1e-14 && res <= 1e-10 * residual_scale(&approx, &ga)?);
    println!("double: max error {err:e}, residual {res:e}");

    // (1 + w)^{1/2} at w = 1/4 is sqrt(5)/2
    let w = Complex64::new(-(0.25f64).ln(), 0.0);
    let value = dirconv::series::evaluate(&ga, &[w])?.value.re;
    assert!((value - 5f64.sqrt() / 2.0).abs() < 1e-12);
    println!("series at w = 1/4: {value} (sqrt(5)/2 = {})", 5f64.sqrt() / 2.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
