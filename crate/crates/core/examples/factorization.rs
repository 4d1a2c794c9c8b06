// When the initial polynomial of a degree-`d` equation has `d` simple
// zeros, the `d` solutions factor it: `T g = a_d ∗ (g − g₁) ∗ ⋯ ∗ (g − g_d)`.

use dirconv::solver::{factorization_check, solve_all};
use dirconv::{ConvPolynomial, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(60)))?;
    // a_j = c_j·u + (small arithmetic perturbation), initial polynomial (z+1)(z-1)(z-2)
    let perturbed = |c: i64, k: u64| {
        TruncatedFunction::from_fn(&window, |e| {
            let n = match e.coords() {
                dirconv::Coords::Dirichlet(v) => v[0],
                _ => unreachable!(),
            };
            if n == 1 {
                Exact::from_int(c)
            } else if n % k == 0 {
                Exact::from_int(1)
            } else {
                Exact::zero()
            }
        })
    };
    let t = ConvPolynomial::new(vec![perturbed(2, 2), perturbed(-1, 3), perturbed(-2, 5), TruncatedFunction::unit(&window)])?;
    let all = solve_all(&t)?;
    for (z0, g) in &all.solutions {
        println!("g(1) = {:>2}: g(2..=6) = {:?}", z0.to_c64().re, g.values()[1..6].iter().map(|v| v.to_repr().re).collect::<Vec<_>>());
    }
    let gs: Vec<_> = all.solutions.into_iter().map(|(_, g)| g).collect();
    let check = factorization_check(&t, &gs)?;
    assert!(check.holds);
    println!("factorization holds exactly (max deviation {})", check.max_deviation);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
