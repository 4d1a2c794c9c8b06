// Inverts the constant function `one` in the ordinary Dirichlet algebra,
// which yields the Möbius function, and checks it against a sieve.

use dirconv::{Coords, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};

const N: u64 = 2000;

fn sieve(n: usize) -> Vec<i64> {
    let mut mu = vec![1i64; n + 1];
    let mut is_prime = vec![true; n + 1];
    for p in 2..=n {
        if !is_prime[p] {
            continue;
        }
        for m in (p..=n).step_by(p) {
            if m > p {
                is_prime[m] = false;
            }
            mu[m] = -mu[m];
        }
        for m in (p * p..=n).step_by(p * p) {
            mu[m] = 0;
        }
    }
    mu
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let window = Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(N)))?;
    let one = TruncatedFunction::<Exact>::one(&window);
    let mu = one.invert()?;

    let expected = sieve(N as usize);
    for n in 1..=N {
        let value = mu.get(&Coords::Dirichlet(vec![n])).expect("n is in the window");
        assert_eq!(*value, Exact::from_int(expected[n as usize]), "mu({n})");
    }
    assert!(one.convolve(&mu)? == TruncatedFunction::unit(&window));

    let first: Vec<String> = (1..=12)
        .map(|n| format!("{}", mu.get(&Coords::Dirichlet(vec![n])).unwrap().to_c64().re))
        .collect();
    println!("mu(1..=12) = [{}]", first.join(", "));
    println!("matches the sieve for every n <= {N}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
