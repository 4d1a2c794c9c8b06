// `g ∗ g = a` with `a(0) = 0` has only the double zero `z = 0` as an
// anchor. At the smallest non-zero element `q` the equation then reads
// `0 · g(q) − a(q) = 0`, impossible when `a(q) ≠ 0`. The solver refuses and
// reports that value on every backend.

use dirconv::scalar::rational;
use dirconv::solver::solve_all;
use dirconv::{ConvPolynomial, Coords, Error, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(30)), Coords::Dirichlet(vec![2])),
        (Semigroup::lattice(2), Truncation::SizeBound(Size::integer(3)), Coords::Lattice(vec![0, 1])),
        (
            Semigroup::integer_generators(&[&[2], &[3]]),
            Truncation::SizeBound(Size::integer(10)),
            Coords::Rational(vec![rational(2, 1)]),
        ),
    ];
    for (semigroup, truncation, q) in cases {
        let window = Window::enumerate(semigroup, truncation)?;
        let a = TruncatedFunction::indicator(&window, &q, Exact::from_int(4))?;
        let t = ConvPolynomial::new(vec![a.neg(), TruncatedFunction::zero(&window), TruncatedFunction::unit(&window)])?;
        match solve_all(&t) {
            Err(e @ Error::NoSimpleRoots { .. }) => {
                if let Error::NoSimpleRoots { obstructions, .. } = &e {
                    assert_eq!(obstructions[0].element, q.to_string());
                    assert_eq!(obstructions[0].value.re, "-4");
                }
                println!("{e}");
            }
            other => panic!("expected a refusal, got {other:?}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
