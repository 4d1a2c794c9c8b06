//! Zeros of the initial polynomial `f(z) = Σ a_j(0) z^j`.
//!
//! Double mode runs Aberth's simultaneous iteration and groups the computed
//! zeros into clusters to read off multiplicities. Exact mode first snaps
//! approximate zeros to Gaussian rationals, confirms them by exact
//! evaluation and deflates them out; only what is left over is reported
//! from the floating-point clusters, without an exact anchor.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One};

use crate::error::{Error, Result};
use crate::scalar::{Exact, Scalar};

/// `Σ coeffs[j] z^j` by Horner's rule.
pub fn poly_eval<S: Scalar>(coeffs: &[S], z: &S) -> S {
    let mut acc = S::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(z).add_ref(c);
    }
    acc
}

pub fn derivative<S: Scalar>(coeffs: &[S]) -> Vec<S> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c.mul_ref(&S::from_int(j as i64)))
        .collect()
}

/// Drops exactly-zero leading coefficients.
pub fn trim<S: Scalar>(coeffs: &[S]) -> &[S] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].is_zero() {
        n -= 1;
    }
    &coeffs[..n]
}

/// Divides by `(z − r)`, discarding the remainder.
fn deflate<S: Scalar>(coeffs: &[S], r: &S) -> Vec<S> {
    let n = coeffs.len() - 1;
    let mut out = vec![S::zero(); n];
    let mut carry = S::zero();
    for k in (1..=n).rev() {
        carry = coeffs[k].add_ref(&carry.mul_ref(r));
        out[k - 1] = carry.clone();
    }
    out
}

fn eval_c64(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex zeros of a polynomial (ascending coefficients, non-zero
/// leading term) by Aberth–Ehrlich iteration followed by Newton polishing.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // zeros at the origin are split off exactly
    let lead_zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    if lead_zeros > 0 {
        let mut roots = vec![Complex64::new(0.0, 0.0); lead_zeros];
        roots.extend(aberth(&coeffs[lead_zeros..]));
        return roots;
    }
    if n == 1 {
        return vec![-coeffs[0] / coeffs[1]];
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let upper = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let geo = monic[0].norm().powf(1.0 / n as f64);
    let radius = if geo > 0.0 { geo.min(upper) } else { 0.5 * upper };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_c64(&monic, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step <= 1e-15 {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_c64(&monic, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zk - p / dp;
            if !next.is_finite() || eval_c64(&monic, next).0.norm() >= p.norm() {
                break;
            }
            *zk = next;
        }
    }
    z
}

/// Candidate exact zero near `approx`: a zero `p/q` of a polynomial with
/// Gaussian-integer coefficients has `q | lead`, so `lead·z` is a Gaussian
/// integer. Confirmed by exact evaluation.
pub(crate) fn snap_gaussian_rational(coeffs: &[Exact], approx: Complex64) -> Option<Exact> {
    let coeffs = trim(coeffs);
    let lead = coeffs.last()?;
    let denom_lcm = coeffs
        .iter()
        .flat_map(|c| [c.re.denom(), c.im.denom()])
        .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let scale = BigRational::from_integer(denom_lcm);
    let lead_int = Exact::new(&lead.re * &scale, &lead.im * &scale);
    let w = lead_int.to_c64() * approx;
    if !w.is_finite() {
        return None;
    }
    let round = |x: f64| BigRational::from_integer(BigInt::from_f64(x.round()).unwrap_or_default());
    let candidate_num = Exact::new(round(w.re), round(w.im));
    let candidate = candidate_num.mul_ref(&Scalar::recip(&lead_int)?);
    Scalar::is_zero(&poly_eval(coeffs, &candidate)).then_some(candidate)
}

/// One zero of `f` with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Root<S> {
    pub approx: Complex64,
    /// The zero in the working scalar mode; `None` for zeros that exact
    /// mode cannot represent.
    pub anchor: Option<S>,
    pub multiplicity: usize,
    pub simple: bool,
}

/// Zeros of `f` plus `f` and `f′` themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct RootReport<S> {
    pub f: Vec<S>,
    pub f_prime: Vec<S>,
    pub degree: usize,
    pub roots: Vec<Root<S>>,
}

impl<S: Scalar> RootReport<S> {
    pub fn simple_roots(&self) -> impl Iterator<Item = &Root<S>> {
        self.roots.iter().filter(|r| r.simple)
    }

    pub fn summary(&self) -> crate::error::RootSummary {
        crate::error::RootSummary {
            roots: self.roots.iter().map(|r| (r.approx, r.multiplicity)).collect(),
            degree: self.degree,
        }
    }
}

/// Tolerances for deciding multiplicities in double mode.
#[derive(Clone, Copy, Debug)]
pub struct RootTolerances {
    /// Cluster radius `τ_root`.
    pub cluster: f64,
    /// Simplicity gate `τ_simple`: `|f′(z₀)|` must exceed it.
    pub simple: f64,
}

impl RootTolerances {
    /// `τ_root = 10⁻⁸(1 + max|a_j(0)|)`, `τ_simple = 10⁻⁶ max|a_j(0)|`.
    pub fn for_coefficients<S: Scalar>(coeffs: &[S]) -> Self {
        let scale = coeffs.iter().map(S::magnitude).fold(0.0, f64::max);
        RootTolerances {
            cluster: 1e-8 * (1.0 + scale),
            simple: 1e-6 * scale,
        }
    }
}

/// Groups approximate zeros into clusters. Points within `τ_root` merge;
/// points that both fail the simplicity gate also merge at the wider radius
/// `10⁻³(1+scale)`, since an m-fold zero perturbed by ε splits by ~ε^{1/m}.
fn cluster(coeffs: &[Complex64], zs: &[Complex64], tol: RootTolerances) -> Vec<(Complex64, usize, bool)> {
    let dcoeffs = derivative(coeffs);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let wide = 1e-3 * (1.0 + scale);
    let weak: Vec<bool> = zs
        .iter()
        .map(|z| poly_eval(&dcoeffs, z).norm() <= tol.simple)
        .collect();
    let n = zs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (zs[i] - zs[j]).norm();
            if d <= tol.cluster || (weak[i] && weak[j] && d <= wide) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let center = members.iter().map(|&i| zs[i]).sum::<Complex64>() / members.len() as f64;
            let simple = members.len() == 1 && !weak[members[0]];
            (center, members.len(), simple)
        })
        .collect()
}

fn sort_roots<S>(roots: &mut [Root<S>]) {
    roots.sort_by(|a, b| {
        a.approx
            .re
            .total_cmp(&b.approx.re)
            .then(a.approx.im.total_cmp(&b.approx.im))
    });
}

/// Zeros of the polynomial with ascending coefficients `coeffs`.
pub fn find_roots<S: Scalar>(coeffs: &[S]) -> Result<RootReport<S>> {
    let f = trim(coeffs).to_vec();
    if f.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if f.len() == 1 {
        return Err(Error::DegenerateConstant);
    }
    let degree = f.len() - 1;
    let f_prime = derivative(&f);
    let tol = RootTolerances::for_coefficients(&f);
    let mut roots = Vec::new();

    let mut rest = f.clone();
    if S::EXACT {
        'outer: while rest.len() > 1 {
            let approx: Vec<Complex64> = aberth(&rest.iter().map(S::to_c64).collect::<Vec<_>>());
            for z in approx {
                let Some(r) = S::snap_root(&rest, z) else { continue };
                let mut multiplicity = 0;
                while rest.len() > 1 && poly_eval(&rest, &r).is_zero() {
                    rest = deflate(&rest, &r);
                    multiplicity += 1;
                }
                if multiplicity > 0 {
                    roots.push(Root {
                        approx: r.to_c64(),
                        simple: multiplicity == 1,
                        anchor: Some(r),
                        multiplicity,
                    });
                    continue 'outer;
                }
            }
            break;
        }
    }
    if rest.len() > 1 {
        let approx_coeffs: Vec<Complex64> = rest.iter().map(S::to_c64).collect();
        let zs = aberth(&approx_coeffs);
        // multiplicity judged against the full polynomial
        let full: Vec<Complex64> = f.iter().map(S::to_c64).collect();
        for (center, multiplicity, simple) in cluster(&full, &zs, tol) {
            roots.push(Root {
                approx: center,
                anchor: if S::EXACT { None } else { Some(S::from_c64(center)) },
                multiplicity,
                simple,
            });
        }
    }
    sort_roots(&mut roots);
    debug_assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), degree);
    Ok(RootReport {
        f,
        f_prime,
        degree,
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn ex(v: &[i64]) -> Vec<Exact> {
        v.iter().map(|&n| Exact::from_int(n)).collect()
    }

    fn c(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn z_squared_minus_one_exact() {
        let rep = find_roots(&ex(&[-1, 0, 1])).unwrap();
        assert_eq!(rep.degree, 2);
        let anchors: Vec<Exact> = rep.roots.iter().map(|r| r.anchor.clone().unwrap()).collect();
        assert_eq!(anchors, ex(&[-1, 1]));
        assert!(rep.roots.iter().all(|r| r.simple));
        assert_eq!(rep.f_prime, ex(&[0, 2]));
    }

    #[test]
    fn double_zero_at_origin() {
        let rep = find_roots(&ex(&[0, 0, 1])).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert_eq!(rep.roots[0].multiplicity, 2);
        assert!(!rep.roots[0].simple);
        let rep = find_roots(&c(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert_eq!(rep.roots[0].multiplicity, 2);
    }

    #[test]
    fn linear_polynomial() {
        let rep = find_roots(&ex(&[3, 1])).unwrap();
        assert_eq!(rep.roots[0].anchor, Some(Exact::from_int(-3)));
        assert!(rep.roots[0].simple);
    }

    #[test]
    fn rational_and_gaussian_zeros() {
        // 6z² − 5z + 1 = (2z − 1)(3z − 1)
        let rep = find_roots(&ex(&[1, -5, 6])).unwrap();
        let anchors: Vec<Exact> = rep.roots.iter().map(|r| r.anchor.clone().unwrap()).collect();
        assert_eq!(anchors, vec![Exact::from_rational(&rational(1, 3)), Exact::from_rational(&rational(1, 2))]);
        // z² + 1/4 has zeros ±i/2
        let f = vec![Exact::from_rational(&rational(1, 4)), Exact::from_int(0), Exact::from_int(1)];
        let rep = find_roots(&f).unwrap();
        assert_eq!(rep.roots.len(), 2);
        for r in &rep.roots {
            let a = r.anchor.clone().unwrap();
            assert!(Scalar::is_zero(&poly_eval(&f, &a)));
        }
    }

    #[test]
    fn irrational_zeros_have_no_exact_anchor() {
        let rep = find_roots(&ex(&[-2, 0, 1])).unwrap();
        assert_eq!(rep.roots.len(), 2);
        assert!(rep.roots.iter().all(|r| r.anchor.is_none() && r.simple));
        assert!((rep.roots[1].approx.re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn triple_zero_in_double_mode() {
        // (z − 1)³
        let rep = find_roots(&c(&[-1.0, 3.0, -3.0, 1.0])).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert_eq!(rep.roots[0].multiplicity, 3);
        // (z − 1)²(z + 2) in exact mode
        let rep = find_roots(&ex(&[2, -3, 0, 1])).unwrap();
        let mults: Vec<usize> = rep.roots.iter().map(|r| r.multiplicity).collect();
        assert_eq!(mults, vec![1, 2]);
    }

    #[test]
    fn cubic_with_three_simple_zeros() {
        // z(z − 1)(z − 2) = z³ − 3z² + 2z
        let rep = find_roots(&c(&[0.0, 2.0, -3.0, 1.0])).unwrap();
        let mut re: Vec<f64> = rep.roots.iter().map(|r| r.approx.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(rep.roots.iter().all(|r| r.simple));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(find_roots(&ex(&[0, 0])), Err(Error::ZeroPolynomial)));
        assert!(matches!(find_roots(&ex(&[5, 0, 0])), Err(Error::DegenerateConstant)));
    }

    #[test]
    fn aberth_high_degree_unit_roots() {
        // z⁸ − 1
        let mut f = vec![Complex64::new(0.0, 0.0); 9];
        f[0] = Complex64::new(-1.0, 0.0);
        f[8] = Complex64::new(1.0, 0.0);
        let zs = aberth(&f);
        assert_eq!(zs.len(), 8);
        for z in zs {
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(8) - 1.0).norm() < 1e-12);
        }
    }
}
