//! Oracles and random instance generators shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use dirconv::scalar::rational;
use dirconv::{ConvPolynomial, Coords, Exact, Scalar, Semigroup, Size, Truncation, TruncatedFunction, Window};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub fn q(p: i64, d: i64) -> Exact {
    Exact::from_rational(&rational(p, d))
}

/// Möbius function by a linear sieve, indices `0..=n` (index 0 unused).
pub fn sieve_mobius(n: usize) -> Vec<i64> {
    let mut mu = vec![1i64; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    mu[0] = 0;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            composite[i * p] = true;
            if i % p == 0 {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    mu
}

pub fn primes_upto(n: usize) -> Vec<usize> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `binomial(1/2, n)` from the product formula.
pub fn half_binomial(n: usize) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    let mut acc = BigRational::from_integer(BigInt::from(1));
    for i in 0..n {
        acc = acc * (&half - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

pub fn od_window(n: u64) -> Arc<Window> {
    Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(n))).unwrap()
}

/// A small window on one of the three backends.
pub fn random_window(rng: &mut impl Rng) -> Arc<Window> {
    let (sg, tr) = match rng.random_range(0..6) {
        0 => (Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(rng.random_range(20..60)))),
        1 => (Semigroup::ordinary_dirichlet(2), Truncation::SizeBound(Size::log_of(rng.random_range(8..20)))),
        2 => (Semigroup::lattice(1), Truncation::MaxElements(rng.random_range(8..20))),
        3 => (Semigroup::lattice(2), Truncation::SizeBound(Size::integer(rng.random_range(2..5)))),
        4 => (
            Semigroup::integer_generators(&[&[2], &[3]]),
            Truncation::SizeBound(Size::integer(rng.random_range(8..20))),
        ),
        _ => (
            Semigroup::rational_generators(vec![
                vec![rational(1, 1), rational(0, 1)],
                vec![rational(1, 2), rational(1, 1)],
            ]),
            Truncation::MaxElements(rng.random_range(8..20)),
        ),
    };
    Window::enumerate(sg, tr).unwrap()
}

pub fn random_rational(rng: &mut impl Rng) -> Exact {
    q(rng.random_range(-3..=3), rng.random_range(1..=4))
}

/// `value at 0` plus sparse random values elsewhere.
pub fn random_function(rng: &mut impl Rng, w: &Arc<Window>, at_zero: Exact, density: f64) -> TruncatedFunction<Exact> {
    let mut values: Vec<Exact> = (0..w.len())
        .map(|_| if rng.random_bool(density) { random_rational(rng) } else { q(0, 1) })
        .collect();
    values[0] = at_zero;
    TruncatedFunction::new(w.clone(), values).unwrap()
}

/// Ascending coefficients of `lead · Π (z − rᵢ)`.
pub fn poly_from_roots(lead: &Exact, roots: &[Exact]) -> Vec<Exact> {
    let mut c = vec![lead.clone()];
    for r in roots {
        let mut next = vec![q(0, 1); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() + ck.clone();
            next[k] = next[k].clone() - ck.clone() * r.clone();
        }
        c = next;
    }
    c
}

const ROOT_POOL: [(i64, i64, i64); 9] = [(-2, 0, 1), (-1, 0, 1), (0, 0, 1), (1, 0, 1), (2, 0, 1), (1, 0, 2), (0, 1, 1), (1, 1, 1), (-1, 1, 2)];

/// An instance whose initial polynomial has `d` distinct simple zeros.
pub fn random_simple_instance(rng: &mut impl Rng, w: &Arc<Window>, d: usize) -> (ConvPolynomial<Exact>, Vec<Exact>) {
    let mut pool: Vec<usize> = (0..ROOT_POOL.len()).collect();
    let mut roots = Vec::with_capacity(d);
    for _ in 0..d {
        let (re, im, den) = ROOT_POOL[pool.swap_remove(rng.random_range(0..pool.len()))];
        roots.push(Exact::new(rational(re, den), rational(im, den)));
    }
    let lead = [q(1, 1), q(2, 1), q(-1, 1), q(1, 2)][rng.random_range(0..4)].clone();
    let f = poly_from_roots(&lead, &roots);
    let coeffs = f
        .into_iter()
        .map(|c| random_function(rng, w, c, 0.3))
        .collect();
    (ConvPolynomial::new(coeffs).unwrap(), roots)
}

/// Windows used by the algebra-law properties: one per backend shape.
pub fn law_windows() -> Vec<Arc<Window>> {
    vec![
        od_window(30),
        Window::enumerate(Semigroup::ordinary_dirichlet(2), Truncation::SizeBound(Size::log_of(12))).unwrap(),
        Window::enumerate(Semigroup::lattice(1), Truncation::MaxElements(12)).unwrap(),
        Window::enumerate(Semigroup::lattice(2), Truncation::SizeBound(Size::integer(3))).unwrap(),
        Window::enumerate(Semigroup::integer_generators(&[&[2], &[3]]), Truncation::SizeBound(Size::integer(12))).unwrap(),
    ]
}

pub fn function_from(w: &Arc<Window>, raw: &[(i64, i64)]) -> TruncatedFunction<Exact> {
    TruncatedFunction::new(w.clone(), raw.iter().take(w.len()).map(|&(p, d)| q(p, d)).collect()).unwrap()
}

/// Ring laws and inverse round trip for three functions on one window.
/// Returns the first law that fails.
pub fn check_laws(f: &TruncatedFunction<Exact>, g: &TruncatedFunction<Exact>, h: &TruncatedFunction<Exact>) -> Result<(), String> {
    let w = f.window();
    let u = TruncatedFunction::unit(w);
    let fg = f.convolve(g).unwrap();
    if fg != g.convolve(f).unwrap() {
        return Err("commutativity".into());
    }
    if fg.convolve(h).unwrap() != f.convolve(&g.convolve(h).unwrap()).unwrap() {
        return Err("associativity".into());
    }
    let lhs = f.convolve(&g.try_add(h).unwrap()).unwrap();
    if lhs != fg.try_add(&f.convolve(h).unwrap()).unwrap() {
        return Err("distributivity".into());
    }
    if f.convolve(&u).unwrap() != *f {
        return Err("unit".into());
    }
    if !Scalar::is_zero(f.at_zero()) {
        let inv = f.invert().unwrap();
        if f.convolve(&inv).unwrap() != u || inv.invert().unwrap() != *f {
            return Err("inverse round trip".into());
        }
    }
    Ok(())
}

pub fn element(w: &Window, c: Coords) -> usize {
    w.index_of(&c).expect("enumerated")
}
