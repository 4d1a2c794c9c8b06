//! Quantitative convergence certificates.
//!
//! For a solution `g` anchored at the simple zero `z₀` and coefficients with
//! finite ρ-norms, the partial sums `S_r(m) = Σ_{0<|x|≤m} |g(x)| e^{−r|x|}`
//! obey
//!
//! ```text
//! S_r(m_n) ≤ P(S_r(m_{n−1})) + e^{−(r−ρ)m₁} Q(|z₀| + S_r(m_{n−1}))
//! ```
//!
//! with
//!
//! ```text
//! P(t) = |f′(z₀)|⁻¹ Σ_{j≥2} |a_j(0)| Σ_{i=2}^{j} C(j,i) |z₀|^{j−i} tⁱ
//! Q(t) = |f′(z₀)|⁻¹ Σ_j ‖a_j‖_ρ t^j.
//! ```
//!
//! Whenever `e^{−(r−ρ)m₁} ≤ R(t) = (t − P(t)) / Q(|z₀| + t)` for some `t > 0`,
//! induction gives `S_r(m) ≤ t` at every level and so `‖g‖_r ≤ |z₀| + t`.
//! Every quantity on the unfavourable side of an inequality is rounded up.

use num_complex::Complex64;

use crate::algebra::{map_range, TruncatedFunction};
use crate::error::{Error, Result};
use crate::rounding::{add_up, next_up, Enclosure};
use crate::scalar::{Scalar, ScalarRepr};
use crate::solver::{check_anchor, ConvPolynomial};

/// Where the coefficient norms come from.
#[derive(Clone, Debug, PartialEq)]
pub enum NormInput {
    /// Window norms, with the caller vouching that every coefficient is
    /// supported inside the window, so they are the true norms.
    WindowSupported,
    /// Window norms without any support guarantee. Claims then hold for the
    /// window truncation only.
    WindowOnly,
    /// Analytic upper bounds for `‖a_0‖_ρ, …, ‖a_d‖_ρ`.
    UserBounds(Vec<f64>),
}

/// Scope of validity recorded on a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormScope {
    WindowExact,
    WindowOnly,
    UserBound,
}

/// The one-variable majorants `P`, `Q` and the bound `|z₀|` they use.
#[derive(Clone, Debug, PartialEq)]
pub struct Majorants {
    /// Coefficients of `P`, ascending; entries 0 and 1 are zero.
    pub p: Vec<f64>,
    /// Coefficients of `Q`, ascending.
    pub q: Vec<f64>,
    /// Upper bound for `|z₀|`.
    pub abs_z0: f64,
}

fn horner(coeffs: &[f64], t: Enclosure) -> Enclosure {
    coeffs
        .iter()
        .rev()
        .fold(Enclosure::ZERO, |acc, &c| acc * t + Enclosure::exact(c))
}

impl Majorants {
    pub fn p_at(&self, t: f64) -> Enclosure {
        horner(&self.p, Enclosure::exact(t))
    }

    pub fn q_at(&self, t: f64) -> Enclosure {
        horner(&self.q, Enclosure::exact(t))
    }

    /// Guaranteed lower bound for `R(t) = (t − P(t)) / Q(|z₀| + t)`.
    pub fn ratio_lower(&self, t: f64) -> f64 {
        let te = Enclosure::exact(t);
        let num = te - horner(&self.p, te);
        if num.lo <= 0.0 {
            return num.lo;
        }
        let den = horner(&self.q, Enclosure::exact(self.abs_z0) + te);
        if den.lo <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (num / den).lo
    }
}

/// A certified convergence abscissa for one solution.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCertificate {
    pub rho: f64,
    /// Lower bound for the minimal positive size.
    pub m1: f64,
    pub z0: Complex64,
    pub z0_repr: ScalarRepr,
    /// Lower bound for `|f′(z₀)|`.
    pub f_prime_abs: f64,
    pub coefficient_norms: Vec<f64>,
    pub majorants: Majorants,
    pub t_star: f64,
    /// Lower bound for `R(t*)`.
    pub ratio_at_t_star: f64,
    /// `min(R(t*), 1)`.
    pub c: f64,
    pub r: f64,
    pub scope: NormScope,
}

impl NormCertificate {
    /// Upper bound for `‖g‖_r`, namely `|z₀| + t*`.
    pub fn norm_bound(&self) -> f64 {
        add_up(self.majorants.abs_z0, self.t_star)
    }

    /// Upper bound for `e^{−(r−ρ)m₁}`.
    pub fn decay(&self) -> f64 {
        let gap = (Enclosure::exact(self.r) - Enclosure::exact(self.rho)).nonneg();
        (-(gap * Enclosure::exact(self.m1))).exp().hi
    }
}

fn binomial(n: usize, k: usize) -> Enclosure {
    (0..k).fold(Enclosure::ONE, |acc, i| {
        acc * Enclosure::exact((n - i) as f64) / Enclosure::exact((i + 1) as f64)
    })
}

/// Upper bounds for `‖a_j‖_ρ`, plus the resulting scope.
pub fn coefficient_norms<S: Scalar>(
    poly: &ConvPolynomial<S>,
    rho: f64,
    input: &NormInput,
) -> Result<(Vec<f64>, NormScope)> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("norm level ρ = {rho} must be finite and ≥ 0")));
    }
    let window: Vec<Enclosure> = poly.coeffs().iter().map(|a| a.window_norm(rho)).collect();
    match input {
        NormInput::WindowSupported => Ok((window.iter().map(|e| e.hi).collect(), NormScope::WindowExact)),
        NormInput::WindowOnly => Ok((window.iter().map(|e| e.hi).collect(), NormScope::WindowOnly)),
        NormInput::UserBounds(bounds) => {
            if bounds.len() != window.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} norm bounds for {} coefficients",
                    bounds.len(),
                    window.len()
                )));
            }
            let mut out = Vec::with_capacity(bounds.len());
            for (j, (&b, w)) in bounds.iter().zip(&window).enumerate() {
                if !(b.is_finite() && b >= w.lo) {
                    return Err(Error::InvalidArgument(format!(
                        "norm bound {b} for a_{j} is below its window norm {}",
                        w.lo
                    )));
                }
                out.push(b.max(w.hi));
            }
            Ok((out, NormScope::UserBound))
        }
    }
}

/// `P` and `Q` for anchor `z0` given norm upper bounds, and `|f′(z₀)|`.
pub fn build_pq<S: Scalar>(poly: &ConvPolynomial<S>, z0: &S, norms: &[f64]) -> Result<(Majorants, f64)> {
    let d = poly.degree();
    let (_, fp) = poly.eval_initial(z0);
    let fp_abs = fp.abs_enclosure().lo;
    if Scalar::is_zero(&fp) || fp_abs <= 0.0 {
        return Err(Error::ZeroDerivative);
    }
    if norms.iter().all(|&n| n == 0.0) {
        return Err(Error::AllCoefficientsZero);
    }
    let inv = Enclosure::ONE / Enclosure::exact(fp_abs);
    let z = z0.abs_enclosure();
    let a0: Vec<Enclosure> = poly.coeffs().iter().map(|a| a.at_zero().abs_enclosure()).collect();
    let mut p = vec![0.0; d + 1];
    for (i, pi) in p.iter_mut().enumerate().skip(2) {
        let mut acc = Enclosure::ZERO;
        for (j, aj) in a0.iter().enumerate().skip(i) {
            acc = acc + *aj * binomial(j, i) * z.powi_nonneg((j - i) as u32);
        }
        *pi = (acc * inv).nonneg().hi;
    }
    let q = norms.iter().map(|&n| (Enclosure::exact(n) * inv).nonneg().hi).collect();
    Ok((Majorants { p, q, abs_z0: z.hi }, fp_abs))
}

pub const GRID_POINTS: usize = 2048;
pub const T_MIN: f64 = 1e-6;
pub const T_MAX: f64 = 1e6;

/// `(t*, R(t*))` maximizing the guaranteed lower bound of `R` over a
/// log-spaced grid on `[T_MIN, T_MAX]`, refined by golden-section search.
/// When `R` is still increasing at `T_MAX` the plateau value there is used.
pub fn maximize_r(m: &Majorants) -> Result<(f64, f64)> {
    let (lmin, lmax) = (T_MIN.ln(), T_MAX.ln());
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| match i {
            0 => T_MIN,
            i if i == GRID_POINTS - 1 => T_MAX,
            i => (lmin + (lmax - lmin) * i as f64 / (GRID_POINTS - 1) as f64).exp(),
        })
        .collect();
    let values = map_range(0..GRID_POINTS, |i| m.ratio_lower(grid[i]));
    let best = (0..GRID_POINTS)
        .fold(0, |b, i| if values[i] > values[b] { i } else { b });
    if values[best] <= 0.0 || !values[best].is_finite() {
        return Err(Error::NoPositiveR);
    }
    if best == 0 || best == GRID_POINTS - 1 {
        return Ok((grid[best], values[best]));
    }
    let (mut lo, mut hi) = (grid[best - 1].ln(), grid[best + 1].ln());
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |u: f64| m.ratio_lower(u.exp());
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    let (t, v) = if f1 >= f2 { (x1.exp(), f1) } else { (x2.exp(), f2) };
    Ok(if v > values[best] { (t, v) } else { (grid[best], values[best]) })
}

/// Certificate for the solution anchored at `z0`.
pub fn certify<S: Scalar>(
    poly: &ConvPolynomial<S>,
    z0: &S,
    rho: f64,
    input: &NormInput,
) -> Result<NormCertificate> {
    check_anchor(poly, z0).map_err(|e| match e {
        Error::NotASimpleRoot(_) if Scalar::is_zero(&poly.eval_initial(z0).1) => Error::ZeroDerivative,
        e => e,
    })?;
    let m1 = poly.window().min_positive_size()?.enclosure().lo;
    let (norms, scope) = coefficient_norms(poly, rho, input)?;
    let (majorants, f_prime_abs) = build_pq(poly, z0, &norms)?;
    let (t_star, ratio) = maximize_r(&majorants)?;
    let c = ratio.min(1.0);
    let r = if c >= 1.0 {
        rho
    } else {
        let shift = -Enclosure::exact(c).ln() / Enclosure::exact(m1);
        next_up(add_up(rho, shift.hi))
    };
    Ok(NormCertificate {
        rho,
        m1,
        z0: z0.to_c64(),
        z0_repr: z0.to_repr(),
        f_prime_abs,
        coefficient_norms: norms,
        majorants,
        t_star,
        ratio_at_t_star: ratio,
        c,
        r,
        scope,
    })
}

/// Outcome of checking a certificate against a solved function.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub levels: usize,
    /// Largest `S_r(m)` over the window (upper bound).
    pub max_partial_sum: f64,
    /// `t* − max S_r(m)`.
    pub bound_margin: f64,
    /// Smallest slack in the level-wise recursive inequality.
    pub recursion_margin: f64,
    /// Level where the recursive slack is smallest (1-based).
    pub tightest_level: usize,
}

/// Rechecks `S_r(m) ≤ t*` and the recursive inequality level by level.
pub fn validate<S: Scalar>(cert: &NormCertificate, g: &TruncatedFunction<S>) -> Result<ValidationReport> {
    let g0 = g.at_zero().to_c64();
    if (g0 - cert.z0).norm() > 1e-9 * (1.0 + cert.z0.norm()) {
        return Err(Error::InvalidArgument(format!(
            "g(0) = {g0} does not match the certified anchor {}",
            cert.z0
        )));
    }
    let sums = g.level_partial_sums(cert.r);
    let decay = Enclosure::exact(cert.decay());
    // computed solutions in double mode carry their own rounding error
    let slack = if S::EXACT { 0.0 } else { 1e-9 };
    let mut report = ValidationReport {
        levels: sums.len(),
        max_partial_sum: 0.0,
        bound_margin: cert.t_star,
        recursion_margin: f64::INFINITY,
        tightest_level: 0,
    };
    let mut prev = 0.0;
    for (n, s) in sums.iter().enumerate() {
        let level = n + 1;
        if s.hi > cert.t_star * (1.0 + slack) {
            return Err(Error::CertificateViolated {
                level,
                detail: format!("S_r = {} exceeds t* = {}", s.hi, cert.t_star),
            });
        }
        let rhs = cert.majorants.p_at(prev) + decay * cert.majorants.q_at(add_up(cert.majorants.abs_z0, prev));
        let margin = rhs.hi * (1.0 + slack) - s.lo;
        if margin < 0.0 {
            return Err(Error::CertificateViolated {
                level,
                detail: format!("recursive bound {} below S_r = {}", rhs.hi, s.lo),
            });
        }
        if margin < report.recursion_margin {
            report.recursion_margin = margin;
            report.tightest_level = level;
        }
        report.max_partial_sum = report.max_partial_sum.max(s.hi);
        report.bound_margin = report.bound_margin.min(cert.t_star - s.hi);
        prev = s.hi;
    }
    Ok(report)
}
