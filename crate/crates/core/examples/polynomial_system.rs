// A square system in two unknown functions. `g₁ ∗ g₂ = one` together with
// `g₁ = g₂` forces both to be the square root of `one`.

use dirconv::solver::{solve, solve_system, system_residual, Monomial};
use dirconv::{ConvPolynomial, Exact, PolySystem, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(200)))?;
    let unit = TruncatedFunction::<Exact>::unit(&window);
    let one = TruncatedFunction::one(&window);
    let system = PolySystem {
        equations: vec![
            vec![
                Monomial { coefficient: unit.clone(), exponents: vec![1, 1] },
                Monomial { coefficient: one.neg(), exponents: vec![0, 0] },
            ],
            vec![
                Monomial { coefficient: unit.clone(), exponents: vec![1, 0] },
                Monomial { coefficient: unit.neg(), exponents: vec![0, 1] },
            ],
        ],
        base_point: vec![Exact::one(), Exact::one()],
    };
    let gs = solve_system(&system)?;
    assert!(system_residual(&system, &gs)?.iter().all(|r| r.is_zero()));

    let scalar = ConvPolynomial::new(vec![one.neg(), TruncatedFunction::zero(&window), unit])?;
    assert_eq!(gs[0], solve(&scalar, &Exact::one())?);
    println!("g1 = g2 = square root of one; g1(2..=8) = {:?}", gs[0].values()[1..8].iter().map(|v| v.to_repr().re).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
