//! Generalized Dirichlet series `g̃(s) = Σ_x g(x) e^{−x·s}` on a window.
//!
//! For the ordinary-Dirichlet backend `e^{−x·s}` is `Π nᵢ^{−sᵢ}`, for the
//! lattice backend it is the monomial `Π wᵢ^{xᵢ}` with `wᵢ = e^{−sᵢ}`.
//! Sums run in enumeration order with compensated summation, so results
//! do not depend on thread count.

use num_complex::Complex64;

use crate::algebra::{map_range, weight_enclosure, TruncatedFunction};
use crate::certificate::{NormCertificate, NormScope};
use crate::error::{Error, Result};
use crate::rounding::{add_up, mul_up, sum_up, Enclosure};
use crate::scalar::Scalar;
use crate::semigroup::{Size, Window};
use crate::solver::{residual, ConvPolynomial};

/// A truncated series value, optionally with a bound on the neglected tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub s: Vec<Complex64>,
    /// Largest size included in the sum.
    pub bound: Size,
    pub terms: usize,
    pub tail_bound: Option<f64>,
}

/// Neumaier's compensated summation, one accumulator per component.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

fn check_point(window: &Window, s: &[Complex64]) -> Result<()> {
    if s.len() != window.dim() {
        return Err(Error::InvalidArgument(format!(
            "evaluation point has {} components, semigroup has dimension {}",
            s.len(),
            window.dim()
        )));
    }
    Ok(())
}

/// `e^{−x·s}` for every window element, in enumeration order.
pub fn kernel(window: &Window, s: &[Complex64]) -> Result<Vec<Complex64>> {
    check_point(window, s)?;
    Ok(map_range(0..window.len(), |i| {
        let c = window.element(i).coords();
        let mut exponent = Complex64::new(0.0, 0.0);
        for (j, sj) in s.iter().enumerate() {
            let x = c.coord_f64(j);
            if x != 0.0 {
                exponent -= sj * x;
            }
        }
        exponent.exp()
    }))
}

fn dot<S: Scalar>(values: &[S], kernel: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for (v, k) in values.iter().zip(kernel) {
        if v.is_zero() {
            continue;
        }
        let t = v.to_c64() * k;
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.total(), im.total())
}

/// `Σ_{x∈window} g(x) e^{−x·s}`.
pub fn evaluate<S: Scalar>(g: &TruncatedFunction<S>, s: &[Complex64]) -> Result<SeriesValue> {
    let w = g.window();
    let k = kernel(w, s)?;
    Ok(SeriesValue {
        value: dot(g.values(), &k),
        s: s.to_vec(),
        bound: w.max_size().clone(),
        terms: w.len(),
        tail_bound: None,
    })
}

/// [`evaluate`] plus the certified tail bound at `s`.
pub fn evaluate_with_tail<S: Scalar>(
    g: &TruncatedFunction<S>,
    cert: &NormCertificate,
    s: &[Complex64],
) -> Result<SeriesValue> {
    let mut v = evaluate(g, s)?;
    v.tail_bound = Some(tail_bound(g, cert, s)?);
    Ok(v)
}

fn min_re(s: &[Complex64]) -> f64 {
    s.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// Bound on `|Σ_{x∉window} g(x) e^{−x·s}|`: the certified `‖g‖_r` minus the
/// part of it already inside the window, damped by `e^{−(σ−r)M}` where
/// `σ = min Re sᵢ` and `M` is the largest size in the window (every element
/// outside a prefix window is at least that large). Needs `σ ≥ r`.
pub fn tail_bound<S: Scalar>(g: &TruncatedFunction<S>, cert: &NormCertificate, s: &[Complex64]) -> Result<f64> {
    check_point(g.window(), s)?;
    if cert.scope == NormScope::WindowOnly {
        return Err(Error::TailUnavailable(
            "certificate covers the window only; supply coefficient norm bounds".into(),
        ));
    }
    if min_re(s) < cert.r {
        return Err(Error::OutOfHalfPlane { r: cert.r });
    }
    let inside = g.window_norm(cert.r).lo;
    let mass = (Enclosure::exact(cert.norm_bound()) - Enclosure::exact(inside)).hi.max(0.0);
    let excess = (Enclosure::exact(min_re(s)) - Enclosure::exact(cert.r)).lo.max(0.0);
    let damping = (-(Enclosure::exact(excess) * g.window().max_size().enclosure())).exp().hi.min(1.0);
    Ok(mul_up(mass, damping))
}

/// How the bound at one sample point was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundRoute {
    /// Propagated from certified coefficient and solution tails.
    Certificate,
    /// Cross terms of the window sums that land outside the window.
    WindowDefect,
}

/// Verification at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCheck {
    pub s: Vec<Complex64>,
    pub g_value: Complex64,
    /// `|Σ_j ã_j(s) g̃(s)^j|` from window sums.
    pub defect: f64,
    pub bound: f64,
    pub route: BoundRoute,
    pub passed: bool,
}

/// Outcome of [`verify_scalar_equation`].
#[derive(Clone, Debug, PartialEq)]
pub struct EquationReport {
    pub points: Vec<PointCheck>,
    /// Largest `defect / bound`.
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Upper bound for `Σ_{x∈window} |f(x)| e^{−σ|x|}`, and a lower bound.
fn abs_sum<S: Scalar>(f: &TruncatedFunction<S>, sigma: f64) -> Enclosure {
    let mut acc = Enclosure::ZERO;
    for (v, e) in f.values().iter().zip(f.window().elements()) {
        if !v.is_zero() {
            acc = acc + v.abs_enclosure() * weight_enclosure(e.size(), sigma);
        }
    }
    acc.nonneg()
}

fn abs_function<S: Scalar>(f: &TruncatedFunction<S>) -> TruncatedFunction<Complex64> {
    TruncatedFunction::new(
        f.window().clone(),
        f.values().iter().map(|v| Complex64::new(v.magnitude(), 0.0)).collect(),
    )
    .expect("same window")
}

/// Checks that the truncated series satisfy `Σ_j ã_j(s) g̃(s)^j ≈ 0`.
///
/// The defect computed from window sums is compared with the smaller of two
/// bounds. With a certificate whose half-plane contains `s` and whose scope
/// reaches beyond the window, the coefficient and solution tails are
/// propagated through the polynomial. Without one, the product of window
/// sums differs from the window sum of the product only by terms whose size
/// leaves the window, and those are bounded by `A_j G^j − Σ_W (|a_j|∗|g|^{∗j})
/// e^{−σ|x|}`, `σ = min Re sᵢ ≥ 0`. Both get the weighted residual of `g` and
/// a floating-point allowance added.
pub fn verify_scalar_equation<S: Scalar>(
    poly: &ConvPolynomial<S>,
    g: &TruncatedFunction<S>,
    cert: Option<&NormCertificate>,
    points: &[Vec<Complex64>],
) -> Result<EquationReport> {
    let w = poly.window();
    poly.coeffs()[0].check_compatible(g)?;
    let d = poly.degree();
    let res = residual(poly, g)?;

    // |a_j| ∗ |g|^{∗j} on the window, shared by every sample point
    let gabs = abs_function(g);
    let mut chains = Vec::with_capacity(d + 1);
    let mut power = TruncatedFunction::unit(w);
    for (j, a) in poly.coeffs().iter().enumerate() {
        if j > 0 {
            power = power.convolve(&gabs)?;
        }
        chains.push(abs_function(a).convolve(&power)?);
    }
    let max_decomp = (0..w.len()).map(|i| w.decomposition_indices(i).len()).max().unwrap_or(1);

    let mut checks = Vec::with_capacity(points.len());
    for s in points {
        let k = kernel(w, s)?;
        let sigma = min_re(s);
        let gv = dot(g.values(), &k);
        let av: Vec<Complex64> = poly.coeffs().iter().map(|a| dot(a.values(), &k)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in av.iter().rev() {
            acc = acc * gv + a;
        }
        let defect = acc.norm();

        let big_g = abs_sum(g, sigma.max(0.0));
        let big_a: Vec<Enclosure> = poly.coeffs().iter().map(|a| abs_sum(a, sigma.max(0.0))).collect();

        let mut allowance = 0.0;
        for (j, aj) in big_a.iter().enumerate() {
            let term = (*aj * big_g.powi_nonneg(j as u32)).hi;
            allowance = add_up(allowance, mul_up(term, 64.0 * (j + 2) as f64 * f64::EPSILON));
        }
        let residual_term = abs_sum(&res, sigma.max(0.0)).hi;

        let mut window_route = f64::INFINITY;
        if sigma >= 0.0 {
            let shrink = 1.0 - 4.0 * ((d + 2) * (max_decomp + 2)) as f64 * f64::EPSILON;
            let mut total = 0.0;
            for (j, aj) in big_a.iter().enumerate() {
                let product = (*aj * big_g.powi_nonneg(j as u32)).hi;
                let inside = abs_sum(&chains[j], sigma).lo * shrink;
                total = add_up(total, (Enclosure::exact(product) - Enclosure::exact(inside)).hi.max(0.0));
            }
            window_route = total;
        }

        let mut cert_route = f64::INFINITY;
        if let Some(c) = cert {
            if c.scope != NormScope::WindowOnly && sigma >= c.r {
                let tail_g = tail_bound(g, c, s)?;
                let reach = add_up(gv.norm() * (1.0 + 4.0 * f64::EPSILON), tail_g);
                let mut total = 0.0;
                for (j, (a, norm)) in av.iter().zip(&c.coefficient_norms).enumerate() {
                    let tail_a = match c.scope {
                        NormScope::WindowExact => 0.0,
                        _ => (Enclosure::exact(*norm) - poly.coeffs()[j].window_norm(c.rho)).hi.max(0.0),
                    };
                    let reach_j = Enclosure::exact(reach).powi_nonneg(j as u32).hi;
                    total = add_up(total, mul_up(tail_a, reach_j));
                    if j > 0 {
                        let reach_jm1 = Enclosure::exact(reach).powi_nonneg(j as u32 - 1).hi;
                        let a_abs = a.norm() * (1.0 + 4.0 * f64::EPSILON);
                        total = add_up(total, mul_up(mul_up(mul_up(a_abs, j as f64), reach_jm1), tail_g));
                    }
                }
                cert_route = total;
            }
        }

        let (base, route) = if cert_route <= window_route {
            (cert_route, BoundRoute::Certificate)
        } else {
            (window_route, BoundRoute::WindowDefect)
        };
        if !base.is_finite() {
            return Err(Error::OutOfHalfPlane { r: cert.map_or(0.0, |c| c.r) });
        }
        let bound = sum_up([base, residual_term, allowance]);
        checks.push(PointCheck {
            s: s.clone(),
            g_value: gv,
            defect,
            bound,
            route,
            passed: defect <= bound,
        });
    }
    let worst_ratio = checks
        .iter()
        .map(|c| if c.bound > 0.0 { c.defect / c.bound } else if c.defect == 0.0 { 0.0 } else { f64::INFINITY })
        .fold(0.0, f64::max);
    Ok(EquationReport {
        passed: checks.iter().all(|c| c.passed),
        points: checks,
        worst_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{certify, NormInput};
    use crate::scalar::{rational, Exact};
    use crate::semigroup::{Coords, Semigroup, Truncation};
    use crate::solver::solve;
    use std::sync::Arc;

    fn od(n: u64) -> Arc<Window> {
        Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(n))).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(p: i64, d: i64) -> Exact {
        Exact::from_rational(&rational(p, d))
    }

    fn sqrt_one(w: &Arc<Window>) -> ConvPolynomial<Exact> {
        ConvPolynomial::new(vec![
            TruncatedFunction::one(w).neg(),
            TruncatedFunction::zero(w),
            TruncatedFunction::unit(w),
        ])
        .unwrap()
    }

    #[test]
    fn unit_evaluates_to_one() {
        let w = od(50);
        for s in [c(2.0, 0.0), c(0.5, 3.0), c(-1.0, 0.0)] {
            assert_eq!(evaluate(&TruncatedFunction::<Exact>::unit(&w), &[s]).unwrap().value, c(1.0, 0.0));
        }
    }

    #[test]
    fn zeta_two_partial_sum() {
        let w = od(1000);
        let v = evaluate(&TruncatedFunction::<Exact>::one(&w), &[c(2.0, 0.0)]).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(v.value.re < zeta2 && zeta2 - v.value.re < 1e-3);
        assert!((v.value.re - 1.643_934_566_681_56).abs() < 1e-12);
        assert_eq!(v.terms, 1000);
    }

    #[test]
    fn geometric_series_at_one_half() {
        let w = Window::enumerate(Semigroup::lattice(1), Truncation::MaxElements(60)).unwrap();
        let s = c(2f64.ln(), 0.0);
        let v = evaluate(&TruncatedFunction::<Exact>::one(&w), &[s]).unwrap();
        assert!((v.value.re - 2.0).abs() < 1e-15 * 8.0);
    }

    #[test]
    fn conjugate_symmetry_for_real_functions() {
        let w = od(300);
        let f = TruncatedFunction::from_fn(&w, |e| q(((e.size().to_f64() * 7.0) as i64 % 5) - 2, 3));
        let s = c(1.3, 4.7);
        let a = evaluate(&f, &[s]).unwrap().value;
        let b = evaluate(&f, &[s.conj()]).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn homomorphism_for_compact_support() {
        let w = od(200);
        let mut f = TruncatedFunction::zero(&w);
        let mut h = TruncatedFunction::zero(&w);
        for (n, v) in [(1, 2), (2, -1), (3, 5), (5, 1)] {
            f.set(&Coords::Dirichlet(vec![n]), q(v, 1)).unwrap();
        }
        for (n, v) in [(1, 1), (4, 3), (7, -2), (10, 1)] {
            h.set(&Coords::Dirichlet(vec![n]), q(v, 2)).unwrap();
        }
        let s = [c(0.7, -2.0)];
        let lhs = evaluate(&f.convolve(&h).unwrap(), &s).unwrap().value;
        let rhs = evaluate(&f, &s).unwrap().value * evaluate(&h, &s).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn tail_bound_behaviour() {
        let w = od(20);
        let t = sqrt_one(&w);
        let g = solve(&t, &q(1, 1)).unwrap();
        let only = certify(&t, &q(1, 1), 2.0, &NormInput::WindowOnly).unwrap();
        assert!(matches!(tail_bound(&g, &only, &[c(10.0, 0.0)]), Err(Error::TailUnavailable(_))));
        let cert = certify(&t, &q(1, 1), 2.0, &NormInput::UserBounds(vec![2.0, 0.0, 1.0])).unwrap();
        assert!(matches!(
            tail_bound(&g, &cert, &[c(cert.r - 0.01, 0.0)]),
            Err(Error::OutOfHalfPlane { .. })
        ));
        let unit = TruncatedFunction::<Exact>::unit(&w);
        let lin = ConvPolynomial::new(vec![unit.neg(), unit.clone()]).unwrap();
        let ucert = certify(&lin, &q(1, 1), 0.0, &NormInput::WindowSupported).unwrap();
        assert!(tail_bound(&unit, &ucert, &[c(ucert.r, 0.0)]).unwrap() >= 0.0);
    }

    #[test]
    fn tail_bound_shrinks_with_window() {
        let bounds = vec![2.0, 0.0, 1.0];
        let mut last = f64::INFINITY;
        for n in [10u64, 40, 160, 640] {
            let w = od(n);
            let t = sqrt_one(&w);
            let g = solve(&t, &q(1, 1)).unwrap();
            let cert = certify(&t, &q(1, 1), 2.0, &NormInput::UserBounds(bounds.clone())).unwrap();
            let s = [c(cert.r.max(3.0), 0.0)];
            let tb = tail_bound(&g, &cert, &s).unwrap();
            assert!(tb <= last);
            last = tb;
        }
    }

    #[test]
    fn tail_bound_covers_terms_beyond_the_window() {
        let big = od(5000);
        let gbig = solve(&sqrt_one(&big), &q(1, 1)).unwrap();
        for n in [50u64, 400] {
            let w = od(n);
            let t = sqrt_one(&w);
            let g = solve(&t, &q(1, 1)).unwrap();
            let cert = certify(&t, &q(1, 1), 2.0, &NormInput::UserBounds(vec![2.0, 0.0, 1.0])).unwrap();
            for sigma in [cert.r, cert.r + 0.5, 8.0] {
                let beyond: f64 = (n as usize..5000).map(|i| gbig.at(i).to_c64().norm() * ((i + 1) as f64).powf(-sigma)).sum();
                let tb = tail_bound(&g, &cert, &[c(sigma, 1.0)]).unwrap();
                assert!(beyond <= tb, "n={n} sigma={sigma}: {beyond} > {tb}");
            }
        }
    }

    #[test]
    fn zeta_square_root_satisfies_equation() {
        let w = od(1000);
        let t = sqrt_one(&w);
        let g = solve(&t, &q(1, 1)).unwrap();
        let pts: Vec<Vec<Complex64>> = [c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), c(2.0, 10.0)]
            .into_iter()
            .map(|s| vec![s])
            .collect();
        let report = verify_scalar_equation(&t, &g, None, &pts).unwrap();
        assert!(report.passed, "{report:?}");
        let cert = certify(&t, &q(1, 1), 2.0, &NormInput::UserBounds(vec![2.0, 0.0, 1.0])).unwrap();
        let report = verify_scalar_equation(&t, &g, Some(&cert), &pts).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn linear_instance_has_tiny_defect() {
        let w = od(100);
        let a0 = TruncatedFunction::from_fn(&w, |e| q(1, 1 + e.size().to_f64().exp().round() as i64));
        let t = ConvPolynomial::new(vec![a0.clone(), TruncatedFunction::unit(&w)]).unwrap();
        let g = solve(&t, &-a0.at_zero().clone()).unwrap();
        let report = verify_scalar_equation(&t, &g, None, &[vec![c(1.5, 0.0)]]).unwrap();
        assert!(report.passed);
        assert!(report.points[0].defect < 1e-15);
    }
}
