// On `ℕ₀²` the algebra is power series in `(w₁, w₂)`. Solving
// `g ∗ g = (1 + w₁)(1 + w₂)` gives `√(1 + w₁) √(1 + w₂)`, which the truncated
// series reproduces at sample points with `|wᵢ| ≤ 1/4`.

use dirconv::series::verify_scalar_equation;
use dirconv::solver::solve_all;
use dirconv::{Complex64, ConvPolynomial, Coords, Semigroup, Size, Truncation, TruncatedFunction, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::lattice(2), Truncation::SizeBound(Size::integer(40)))?;
    let mut a0 = TruncatedFunction::<Complex64>::zero(&window);
    for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        a0.set(&Coords::Lattice(vec![i, j]), Complex64::new(-1.0, 0.0))?;
    }
    let t = ConvPolynomial::new(vec![a0, TruncatedFunction::zero(&window), TruncatedFunction::unit(&window)])?;
    let all = solve_all(&t)?;
    let (z0, g) = all.solutions.iter().find(|(z, _)| z.re > 0.0).expect("anchor at +1");
    println!("anchored at g(0) = {z0}, {} coefficients", window.len());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut points = Vec::new();
    for _ in 0..5 {
        let w: Vec<Complex64> = (0..2)
            .map(|_| Complex64::from_polar(rng.random_range(0.0..0.25), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        // e^{-s} = w
        points.push(w.iter().map(|w| -w.ln()).collect::<Vec<_>>());
        let closed = (Complex64::new(1.0, 0.0) + w[0]).sqrt() * (Complex64::new(1.0, 0.0) + w[1]).sqrt();
        let value = dirconv::series::evaluate(g, points.last().unwrap())?.value;
        assert!((value - closed).norm() < 1e-12);
        println!("w = ({:.3}, {:.3}): series {value:.12}, closed form {closed:.12}", w[0], w[1]);
    }
    let report = verify_scalar_equation(&t, g, None, &points)?;
    assert!(report.passed);
    println!("equation defect within bound at all points (worst ratio {:.3})", report.worst_ratio);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
