//! Solving `T g = a_d∗g^{∗d} + ⋯ + a_1∗g + a_0 = 0` on a window.
//!
//! Evaluating `T g` at `x = 0` forces `f(g(0)) = 0` for the initial
//! polynomial `f(z) = Σ a_j(0) z^j`. At `x ≠ 0` the value `g(x)` enters
//! `(T g)(x)` linearly with coefficient `f′(g(0))`, and every other term only
//! involves `g` at strictly smaller sizes. Anchoring `g(0)` at a simple zero
//! of `f` therefore determines `g` level by level.
//!
//! The implementation evaluates `T g` in Horner form
//! `H_d = a_d`, `H_j = a_j + g∗H_{j+1}`, `T g = H_0`, with the entry `g(x)`
//! masked to zero, then divides by `−f′(z₀)` and patches every `H_j(x)` with
//! its own linear coefficient `κ_j` so later levels see the full values.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{map_range, TruncatedFunction};
use crate::error::{Error, Obstruction, Result};
use crate::roots::{find_roots, poly_eval, RootReport, RootTolerances};
use crate::scalar::{Scalar, DEFAULT_TOLERANCE};
use crate::semigroup::Window;

/// The convolution polynomial `T`, coefficients in ascending order.
#[derive(Clone, Debug)]
pub struct ConvPolynomial<S> {
    coeffs: Vec<TruncatedFunction<S>>,
}

impl<S: Scalar> ConvPolynomial<S> {
    /// `coeffs[j]` multiplies `g^{∗j}`. Needs degree ≥ 1, a non-zero top
    /// coefficient and a common window.
    pub fn new(coeffs: Vec<TruncatedFunction<S>>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument("degree must be at least 1".into()));
        }
        for c in &coeffs[1..] {
            coeffs[0].check_compatible(c)?;
        }
        if coeffs.last().is_some_and(TruncatedFunction::is_zero) {
            return Err(Error::InvalidArgument("leading coefficient a_d vanishes".into()));
        }
        Ok(ConvPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[TruncatedFunction<S>] {
        &self.coeffs
    }

    pub fn window(&self) -> &Arc<Window> {
        self.coeffs[0].window()
    }

    /// `(a_0(0), …, a_d(0))`.
    pub fn initial_coefficients(&self) -> Vec<S> {
        self.coeffs.iter().map(|c| c.at_zero().clone()).collect()
    }

    /// Root-finding tolerances derived from the initial coefficients.
    pub fn tolerances(&self) -> RootTolerances {
        RootTolerances::for_coefficients(&self.initial_coefficients())
    }

    /// `f(z)` and `f′(z)`.
    pub fn eval_initial(&self, z: &S) -> (S, S) {
        let f = self.initial_coefficients();
        let fp = crate::roots::derivative(&f);
        (poly_eval(&f, z), poly_eval(&fp, z))
    }
}

/// Roots of `f(z) = Σ a_j(0) z^j` with multiplicities.
pub fn initial_polynomial<S: Scalar>(poly: &ConvPolynomial<S>) -> Result<RootReport<S>> {
    find_roots(&poly.initial_coefficients())
}

pub(crate) fn check_anchor<S: Scalar>(poly: &ConvPolynomial<S>, z0: &S) -> Result<S> {
    let (fz, fpz) = poly.eval_initial(z0);
    let tol = poly.tolerances();
    let ok = if S::EXACT {
        fz.is_zero() && !fpz.is_zero()
    } else {
        fz.magnitude() <= tol.cluster && fpz.magnitude() > tol.simple
    };
    if !ok {
        return Err(Error::NotASimpleRoot(crate::error::fmt_repr(&z0.to_repr())));
    }
    Ok(fpz)
}

/// The unique `g` with `g(0) = z0` and `T g = 0` on the window.
pub fn solve<S: Scalar>(poly: &ConvPolynomial<S>, z0: &S) -> Result<TruncatedFunction<S>> {
    let fp = check_anchor(poly, z0)?;
    let neg_inv_fp = -fp.recip().ok_or_else(|| Error::NotASimpleRoot("f′ vanishes".into()))?;
    let w = poly.window();
    let n = w.len();
    let d = poly.degree();
    let a: Vec<&[S]> = poly.coeffs.iter().map(|c| c.values()).collect();

    let mut g = vec![S::zero(); n];
    g[0] = z0.clone();
    // h[j] holds H_j for j < d; H_d is a_d itself
    let mut h: Vec<Vec<S>> = vec![vec![S::zero(); n]; d];
    for j in (0..d).rev() {
        let next0 = if j + 1 == d { a[d][0].clone() } else { h[j + 1][0].clone() };
        h[j][0] = a[j][0].add_ref(&z0.mul_ref(&next0));
    }
    // κ_j = ∂H_j(x)/∂g(x) = H_{j+1}(0) + z₀ κ_{j+1}, κ_d = 0
    let mut kappa = vec![S::zero(); d + 1];
    for j in (0..d).rev() {
        let next0 = if j + 1 == d { &a[d][0] } else { &h[j + 1][0] };
        kappa[j] = next0.add_ref(&z0.mul_ref(&kappa[j + 1]));
    }
    debug_assert!(kappa[0].close_to(&fp, 1e-9 * (1.0 + fp.magnitude())));

    for level in &w.levels()[1..] {
        let computed = {
            let (g, h) = (&g, &h);
            map_range(level.clone(), |i| {
                let mut masked: Vec<S> = vec![S::zero(); d];
                let mut masked_next = a[d][i].clone();
                for j in (0..d).rev() {
                    let next: &[S] = if j + 1 == d { a[d] } else { &h[j + 1] };
                    let mut acc = a[j][i].clone();
                    for &(p, q) in w.decomposition_indices(i) {
                        let (p, q) = (p as usize, q as usize);
                        if p == i {
                            continue;
                        }
                        if q == i {
                            acc.add_mul(&g[p], &masked_next);
                        } else {
                            acc.add_mul(&g[p], &next[q]);
                        }
                    }
                    masked_next = acc.clone();
                    masked[j] = acc;
                }
                let gx = masked[0].mul_ref(&neg_inv_fp);
                let full: Vec<S> = masked
                    .iter()
                    .zip(&kappa)
                    .map(|(m, k)| m.add_ref(&k.mul_ref(&gx)))
                    .collect();
                (gx, full)
            })
        };
        for (i, (gx, full)) in level.clone().zip(computed) {
            g[i] = gx;
            for (j, v) in full.into_iter().enumerate() {
                h[j][i] = v;
            }
        }
    }
    TruncatedFunction::new(w.clone(), g)
}

/// `T g` on the window, by convolution in Horner form.
pub fn residual<S: Scalar>(poly: &ConvPolynomial<S>, g: &TruncatedFunction<S>) -> Result<TruncatedFunction<S>> {
    poly.coeffs[0].check_compatible(g)?;
    let d = poly.degree();
    let mut acc = poly.coeffs[d].clone();
    for j in (0..d).rev() {
        acc = poly.coeffs[j].try_add(&g.convolve(&acc)?)?;
    }
    Ok(acc)
}

/// Largest entry of `Σ_j |a_j| ∗ |g|^{∗j}`, the magnitude of the terms
/// whose cancellation a double-precision residual measures.
pub fn residual_scale<S: Scalar>(poly: &ConvPolynomial<S>, g: &TruncatedFunction<S>) -> Result<f64> {
    poly.coeffs[0].check_compatible(g)?;
    let abs = |f: &TruncatedFunction<S>| {
        TruncatedFunction::new(
            f.window().clone(),
            f.values().iter().map(|v| Complex64::new(v.magnitude(), 0.0)).collect(),
        )
        .expect("same length")
    };
    let gabs = abs(g);
    let d = poly.degree();
    let mut acc = abs(&poly.coeffs[d]);
    for j in (0..d).rev() {
        acc = abs(&poly.coeffs[j]).try_add(&gabs.convolve(&acc)?)?;
    }
    Ok(acc.max_abs())
}

/// For a non-simple zero `z0` of `f`, the value `(T g)(q) = Σ_j a_j(q) z0^j`
/// at each minimal-size `q ≠ 0`, which is the same for every `g` with
/// `g(0) = z0`. A non-zero value rules that anchor out.
pub fn obstructions<S: Scalar>(poly: &ConvPolynomial<S>, z0: &S) -> Vec<Obstruction> {
    let w = poly.window();
    let Some(first) = w.levels().get(1) else { return Vec::new() };
    let tol = DEFAULT_TOLERANCE * (1.0 + poly.initial_coefficients().iter().map(S::magnitude).fold(0.0, f64::max));
    first
        .clone()
        .filter_map(|i| {
            let col: Vec<S> = poly.coeffs.iter().map(|c| c.at(i).clone()).collect();
            let value = poly_eval(&col, z0);
            (!value.is_negligible(tol)).then(|| Obstruction {
                root: z0.to_repr(),
                element: w.element(i).to_string(),
                value_approx: value.to_c64(),
                value: value.to_repr(),
            })
        })
        .collect()
}

/// A zero of `f` that `solve_all` could not use.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedRoot {
    pub root: Complex64,
    pub multiplicity: usize,
    pub reason: String,
}

/// Everything [`solve_all`] found.
#[derive(Clone, Debug)]
pub struct SolveAll<S> {
    pub report: RootReport<S>,
    pub solutions: Vec<(S, TruncatedFunction<S>)>,
    pub skipped: Vec<SkippedRoot>,
}

/// One solution per usable simple zero of `f`. Fails with
/// [`Error::NoSimpleRoots`], carrying any obstruction found, when `f` has
/// no simple zero at all.
pub fn solve_all<S: Scalar>(poly: &ConvPolynomial<S>) -> Result<SolveAll<S>> {
    let report = initial_polynomial(poly)?;
    if report.simple_roots().next().is_none() {
        let obstructions = report
            .roots
            .iter()
            .flat_map(|r| {
                let z = r.anchor.clone().unwrap_or_else(|| S::from_c64(r.approx));
                obstructions(poly, &z)
            })
            .collect();
        return Err(Error::NoSimpleRoots {
            roots: report.summary(),
            obstructions,
        });
    }
    let mut solutions = Vec::new();
    let mut skipped = Vec::new();
    for r in &report.roots {
        match (&r.anchor, r.simple) {
            (Some(z0), true) => solutions.push((z0.clone(), solve(poly, z0)?)),
            (None, true) => skipped.push(SkippedRoot {
                root: r.approx,
                multiplicity: 1,
                reason: "zero is not a Gaussian rational; solve in double mode".into(),
            }),
            (_, false) => skipped.push(SkippedRoot {
                root: r.approx,
                multiplicity: r.multiplicity,
                reason: format!("zero of multiplicity {}", r.multiplicity),
            }),
        }
    }
    debug_assert!(solutions.len() <= poly.degree());
    Ok(SolveAll {
        report,
        solutions,
        skipped,
    })
}

/// Outcome of comparing `T` with `a_d∗(g−g₁)∗⋯∗(g−g_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

/// Expands `a_d∗Π(g − gᵢ)` as a polynomial in `g` and compares its
/// coefficient functions with `a_0, …, a_{d−1}`.
pub fn factorization_check<S: Scalar>(
    poly: &ConvPolynomial<S>,
    solutions: &[TruncatedFunction<S>],
) -> Result<FactorizationCheck> {
    let d = poly.degree();
    let report = initial_polynomial(poly)?;
    if report.degree != d || report.roots.iter().any(|r| !r.simple) {
        return Err(Error::PreconditionFailed(
            "needs deg f = d with only simple zeros".into(),
        ));
    }
    if solutions.len() != d {
        return Err(Error::PreconditionFailed(format!(
            "{} solutions supplied for degree {d}",
            solutions.len()
        )));
    }
    let w = poly.window();
    // expansion[k] is the coefficient function of g^k
    let mut expansion = vec![poly.coeffs[d].clone()];
    for gi in solutions {
        gi.check_compatible(&poly.coeffs[0])?;
        let mut next = vec![TruncatedFunction::zero(w); expansion.len() + 1];
        for (k, e) in expansion.iter().enumerate() {
            next[k + 1] = next[k + 1].try_add(e)?;
            next[k] = next[k].try_sub(&gi.convolve(e)?)?;
        }
        expansion = next;
    }
    let mut max_deviation: f64 = 0.0;
    let mut holds = true;
    let tol = DEFAULT_TOLERANCE * (1.0 + poly.coeffs.iter().map(TruncatedFunction::max_abs).fold(0.0, f64::max));
    for (k, e) in expansion.iter().enumerate().take(d) {
        let dev = e.max_abs_diff(&poly.coeffs[k])?;
        max_deviation = max_deviation.max(dev);
        holds &= if S::EXACT { e == &poly.coeffs[k] } else { dev <= tol };
    }
    Ok(FactorizationCheck { holds, max_deviation })
}

/// One term `c ∗ g₁^{∗e₁} ∗ ⋯ ∗ g_m^{∗e_m}`.
#[derive(Clone, Debug)]
pub struct Monomial<S> {
    pub coefficient: TruncatedFunction<S>,
    pub exponents: Vec<u32>,
}

/// `m` polynomial equations in `m` unknown functions with base point `z₀`.
#[derive(Clone, Debug)]
pub struct PolySystem<S> {
    pub equations: Vec<Vec<Monomial<S>>>,
    pub base_point: Vec<S>,
}

/// Guards against combinatorial blow-up.
#[derive(Clone, Copy, Debug)]
pub struct SystemLimits {
    pub max_unknowns: usize,
    pub max_total_degree: u32,
}

impl Default for SystemLimits {
    fn default() -> Self {
        SystemLimits {
            max_unknowns: 8,
            max_total_degree: 8,
        }
    }
}

/// Condition-number gate for double-mode Jacobians.
pub const CONDITION_TOLERANCE: f64 = 1e-12;

/// `J⁻¹` by Gauss–Jordan with partial pivoting.
fn invert_matrix<S: Scalar>(mut a: Vec<Vec<S>>) -> Result<Vec<Vec<S>>> {
    let m = a.len();
    let mut inv: Vec<Vec<S>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    let scale = a.iter().flatten().map(S::magnitude).fold(0.0, f64::max);
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x][col].magnitude().total_cmp(&a[y][col].magnitude()))
            .expect("non-empty");
        let tiny = if S::EXACT { 0.0 } else { 1e-300 + f64::EPSILON * scale * 1e-3 };
        if a[pivot][col].is_zero() || a[pivot][col].magnitude() <= tiny {
            return Err(Error::SingularJacobian);
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip().ok_or(Error::SingularJacobian)?;
        for j in 0..m {
            a[col][j] = a[col][j].mul_ref(&p);
            inv[col][j] = inv[col][j].mul_ref(&p);
        }
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..m {
                let t = factor.mul_ref(&a[col][j]);
                a[r][j] = a[r][j].clone() - t;
                let t = factor.mul_ref(&inv[col][j]);
                inv[r][j] = inv[r][j].clone() - t;
            }
        }
    }
    Ok(inv)
}

fn one_norm<S: Scalar>(a: &[Vec<S>]) -> f64 {
    let m = a.len();
    (0..m)
        .map(|j| (0..m).map(|i| a[i][j].magnitude()).sum::<f64>())
        .fold(0.0, f64::max)
}

struct SystemState<'a, S> {
    window: &'a Window,
    system: &'a PolySystem<S>,
    /// pows[k][e-1] = g_k^{∗e}; pows[k][0] is g_k itself
    pows: Vec<Vec<Vec<S>>>,
    /// stages[eq][t][l]: running product of monomial t after l factors
    stages: Vec<Vec<Vec<Vec<S>>>>,
    factors: Vec<Vec<Vec<(usize, usize)>>>,
}

impl<'a, S: Scalar> SystemState<'a, S> {
    fn new(window: &'a Window, system: &'a PolySystem<S>) -> Self {
        let m = system.base_point.len();
        let n = window.len();
        let mut max_exp = vec![1u32; m];
        for eq in &system.equations {
            for mono in eq {
                for (k, &e) in mono.exponents.iter().enumerate() {
                    max_exp[k] = max_exp[k].max(e);
                }
            }
        }
        let pows = max_exp
            .iter()
            .map(|&e| vec![vec![S::zero(); n]; e as usize])
            .collect();
        let factors: Vec<Vec<Vec<(usize, usize)>>> = system
            .equations
            .iter()
            .map(|eq| {
                eq.iter()
                    .map(|mono| {
                        mono.exponents
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(k, &e)| (k, e as usize))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let stages = factors
            .iter()
            .map(|eq: &Vec<Vec<(usize, usize)>>| {
                eq.iter()
                    .map(|fs| vec![vec![S::zero(); n]; fs.len()])
                    .collect()
            })
            .collect();
        SystemState {
            window,
            system,
            pows,
            stages,
            factors,
        }
    }

    fn conv_at(&self, a: &[S], b: &[S], i: usize) -> S {
        let mut acc = S::zero();
        for &(p, q) in self.window.decomposition_indices(i) {
            acc.add_mul(&a[p as usize], &b[q as usize]);
        }
        acc
    }

    /// Recomputes all derived quantities at index `i` from the current
    /// `g_k(i)` values and returns `F(i)`.
    fn update_at(&mut self, i: usize) -> Vec<S> {
        for k in 0..self.pows.len() {
            for e in 1..self.pows[k].len() {
                let v = self.conv_at(&self.pows[k][0], &self.pows[k][e - 1], i);
                self.pows[k][e][i] = v;
            }
        }
        let mut out = Vec::with_capacity(self.system.equations.len());
        for (eqi, eq) in self.system.equations.iter().enumerate() {
            let mut total = S::zero();
            for (t, mono) in eq.iter().enumerate() {
                let coeff = mono.coefficient.values();
                let fs = &self.factors[eqi][t];
                if fs.is_empty() {
                    total = total.add_ref(&coeff[i]);
                    continue;
                }
                for (l, &(k, e)) in fs.iter().enumerate() {
                    let prev: &[S] = if l == 0 { coeff } else { &self.stages[eqi][t][l - 1] };
                    let v = self.conv_at(prev, &self.pows[k][e - 1], i);
                    self.stages[eqi][t][l][i] = v;
                }
                total = total.add_ref(&self.stages[eqi][t][fs.len() - 1][i]);
            }
            out.push(total);
        }
        out
    }
}

/// `∂F/∂z` at the base point from the coefficients' values at 0.
fn jacobian<S: Scalar>(system: &PolySystem<S>) -> Vec<Vec<S>> {
    let z0 = &system.base_point;
    let m = z0.len();
    system
        .equations
        .iter()
        .map(|eq| {
            (0..m)
                .map(|k| {
                    let mut acc = S::zero();
                    for mono in eq {
                        let ek = mono.exponents[k];
                        if ek == 0 {
                            continue;
                        }
                        let mut term = mono.coefficient.at_zero().mul_ref(&S::from_int(ek as i64));
                        for (l, &el) in mono.exponents.iter().enumerate() {
                            let e = if l == k { el - 1 } else { el };
                            for _ in 0..e {
                                term = term.mul_ref(&z0[l]);
                            }
                        }
                        acc = acc.add_ref(&term);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn validate_system<S: Scalar>(system: &PolySystem<S>, limits: SystemLimits) -> Result<Arc<Window>> {
    let m = system.base_point.len();
    if m == 0 || system.equations.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} equations for {m} unknowns",
            system.equations.len()
        )));
    }
    if m > limits.max_unknowns {
        return Err(Error::LimitExceeded(format!("{m} unknowns > {}", limits.max_unknowns)));
    }
    let mut window: Option<Arc<Window>> = None;
    for eq in &system.equations {
        for mono in eq {
            if mono.exponents.len() != m {
                return Err(Error::InvalidArgument("exponent vector length must equal m".into()));
            }
            let deg: u32 = mono.exponents.iter().sum();
            if deg > limits.max_total_degree {
                return Err(Error::LimitExceeded(format!(
                    "monomial degree {deg} > {}",
                    limits.max_total_degree
                )));
            }
            match &window {
                None => window = Some(mono.coefficient.window().clone()),
                Some(w) if !w.same_as(mono.coefficient.window()) => return Err(Error::BackendMismatch),
                _ => {}
            }
        }
    }
    window.ok_or_else(|| Error::InvalidArgument("system has no terms".into()))
}

/// The unique `(g₁,…,g_m)` with `g_k(0) = z₀_k` solving the system on the
/// window; needs `F(v₀,z₀) = 0` and an invertible Jacobian.
pub fn solve_system<S: Scalar>(system: &PolySystem<S>) -> Result<Vec<TruncatedFunction<S>>> {
    solve_system_with_limits(system, SystemLimits::default())
}

pub fn solve_system_with_limits<S: Scalar>(
    system: &PolySystem<S>,
    limits: SystemLimits,
) -> Result<Vec<TruncatedFunction<S>>> {
    let window = validate_system(system, limits)?;
    let m = system.base_point.len();
    let jac = jacobian(system);
    let jinv = invert_matrix(jac.clone())?;
    if !S::EXACT && one_norm(&jac) * one_norm(&jinv) > 1.0 / CONDITION_TOLERANCE {
        return Err(Error::SingularJacobian);
    }

    let mut state = SystemState::new(&window, system);
    for k in 0..m {
        state.pows[k][0][0] = system.base_point[k].clone();
    }
    let f0 = state.update_at(0);
    let scale = system
        .equations
        .iter()
        .flatten()
        .map(|mono| mono.coefficient.at_zero().magnitude())
        .fold(0.0, f64::max);
    let tol = 1e-8 * (1.0 + scale);
    if let Some(bad) = f0.iter().find(|v| !v.is_negligible(tol)) {
        return Err(Error::InconsistentBasePoint(crate::error::fmt_repr(&bad.to_repr())));
    }

    for i in 1..window.len() {
        for k in 0..m {
            state.pows[k][0][i] = S::zero();
        }
        let masked = state.update_at(i);
        for (k, row) in jinv.iter().enumerate() {
            let mut acc = S::zero();
            for (j, v) in row.iter().zip(&masked) {
                acc.add_mul(j, v);
            }
            state.pows[k][0][i] = -acc;
        }
        state.update_at(i);
    }
    state
        .pows
        .into_iter()
        .map(|mut p| TruncatedFunction::new(window.clone(), p.swap_remove(0)))
        .collect()
}

/// `F[a, g]` componentwise on the window.
pub fn system_residual<S: Scalar>(
    system: &PolySystem<S>,
    solution: &[TruncatedFunction<S>],
) -> Result<Vec<TruncatedFunction<S>>> {
    let window = validate_system(system, SystemLimits { max_unknowns: usize::MAX, max_total_degree: u32::MAX })?;
    if solution.len() != system.base_point.len() {
        return Err(Error::InvalidArgument("solution has the wrong number of components".into()));
    }
    system
        .equations
        .iter()
        .map(|eq| {
            let mut total = TruncatedFunction::zero(&window);
            for mono in eq {
                let mut term = mono.coefficient.clone();
                for (k, &e) in mono.exponents.iter().enumerate() {
                    if e > 0 {
                        term = term.convolve(&solution[k].power(e))?;
                    }
                }
                total = total.try_add(&term)?;
            }
            Ok(total)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Exact};
    use crate::semigroup::{Coords, Semigroup, Size, Truncation};

    fn od(n: u64) -> Arc<Window> {
        Window::enumerate(Semigroup::ordinary_dirichlet(1), Truncation::SizeBound(Size::log_of(n))).unwrap()
    }

    fn lat(n: usize) -> Arc<Window> {
        Window::enumerate(Semigroup::lattice(1), Truncation::MaxElements(n)).unwrap()
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
    fn zeta_square_root_first_values() {
        let w = od(12);
        let t = sqrt_one(&w);
        let g = solve(&t, &q(1, 1)).unwrap();
        let at = |n: u64| g.get(&Coords::Dirichlet(vec![n])).unwrap().clone();
        assert_eq!(at(1), q(1, 1));
        assert_eq!(at(2), q(1, 2));
        assert_eq!(at(3), q(1, 2));
        assert_eq!(at(4), q(3, 8));
        assert_eq!(at(6), q(1, 4));
        assert!(residual(&t, &g).unwrap().is_zero());
    }

    #[test]
    fn binomial_series_square_root() {
        let w = lat(6);
        let mut a0 = TruncatedFunction::zero(&w);
        a0.set(&Coords::Lattice(vec![0]), q(-1, 1)).unwrap();
        a0.set(&Coords::Lattice(vec![1]), q(-1, 1)).unwrap();
        let t = ConvPolynomial::new(vec![a0, TruncatedFunction::zero(&w), TruncatedFunction::unit(&w)]).unwrap();
        let g = solve(&t, &q(1, 1)).unwrap();
        assert_eq!(g.values(), &[q(1, 1), q(1, 2), q(-1, 8), q(1, 16), q(-5, 128), q(7, 256)]);
    }

    #[test]
    fn linear_equation_returns_negated_constant() {
        let w = od(30);
        let a0 = TruncatedFunction::from_fn(&w, |e| q(e.size().to_f64().round() as i64 + 2, 3));
        let t = ConvPolynomial::new(vec![a0.clone(), TruncatedFunction::unit(&w)]).unwrap();
        let z0 = -a0.at_zero().clone();
        let g = solve(&t, &z0).unwrap();
        assert_eq!(g, a0.neg());
        assert!(residual(&t, &a0.neg()).unwrap().is_zero());
    }

    #[test]
    fn linear_solve_agrees_with_invert() {
        let w = od(40);
        let a1 = TruncatedFunction::from_fn(&w, |e| match e.coords() {
            Coords::Dirichlet(v) => q(1 + (v[0] % 3) as i64, 1),
            _ => unreachable!(),
        });
        let t = ConvPolynomial::new(vec![TruncatedFunction::unit(&w).neg(), a1.clone()]).unwrap();
        let z0 = a1.at_zero().recip().unwrap();
        assert_eq!(solve(&t, &z0).unwrap(), a1.invert().unwrap());
    }

    #[test]
    fn refuses_non_simple_or_non_root_anchors() {
        let w = od(10);
        let t = sqrt_one(&w);
        assert!(matches!(solve(&t, &q(2, 1)), Err(Error::NotASimpleRoot(_))));
        let sq = ConvPolynomial::new(vec![TruncatedFunction::zero(&w), TruncatedFunction::zero(&w), TruncatedFunction::unit(&w)]).unwrap();
        assert!(matches!(solve(&sq, &q(0, 1)), Err(Error::NotASimpleRoot(_))));
    }

    #[test]
    fn solve_all_gives_opposite_square_roots() {
        let w = od(50);
        let t = sqrt_one(&w);
        let all = solve_all(&t).unwrap();
        assert_eq!(all.solutions.len(), 2);
        let (g1, g2) = (&all.solutions[0].1, &all.solutions[1].1);
        assert_eq!(g1, &g2.neg());
        let check = factorization_check(&t, &[g1.clone(), g2.clone()]).unwrap();
        assert!(check.holds);
        assert_eq!(check.max_deviation, 0.0);
    }

    #[test]
    fn unsolvable_square_reports_obstruction() {
        let w = od(10);
        let mut a = TruncatedFunction::zero(&w);
        a.set(&Coords::Dirichlet(vec![2]), q(1, 1)).unwrap();
        let t = ConvPolynomial::new(vec![a.neg(), TruncatedFunction::zero(&w), TruncatedFunction::unit(&w)]).unwrap();
        match solve_all(&t) {
            Err(Error::NoSimpleRoots { roots, obstructions }) => {
                assert_eq!(roots.roots, vec![(Complex64::new(0.0, 0.0), 2)]);
                assert_eq!(obstructions.len(), 1);
                assert_eq!(obstructions[0].element, "(2)");
                assert_eq!(obstructions[0].value.re, "-1");
            }
            other => panic!("expected NoSimpleRoots, got {other:?}"),
        }
    }

    #[test]
    fn constant_and_zero_initial_polynomials() {
        let w = od(10);
        let mut a1 = TruncatedFunction::zero(&w);
        a1.set(&Coords::Dirichlet(vec![3]), q(1, 1)).unwrap();
        let t = ConvPolynomial::new(vec![TruncatedFunction::unit(&w), a1.clone()]).unwrap();
        assert!(matches!(solve_all(&t), Err(Error::DegenerateConstant)));
        let t = ConvPolynomial::new(vec![TruncatedFunction::zero(&w), a1]).unwrap();
        assert!(matches!(solve_all(&t), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn rejects_degree_zero_and_zero_leading_coefficient() {
        let w = od(5);
        assert!(ConvPolynomial::<Exact>::new(vec![TruncatedFunction::one(&w)]).is_err());
        assert!(ConvPolynomial::<Exact>::new(vec![TruncatedFunction::one(&w), TruncatedFunction::zero(&w)]).is_err());
    }

    #[test]
    fn residual_detects_single_entry_perturbation() {
        let w = od(30);
        let t = sqrt_one(&w);
        let g = solve(&t, &q(1, 1)).unwrap();
        for i in [0usize, 1, 5, 29] {
            let mut bad = g.clone().into_values();
            bad[i] = bad[i].add_ref(&q(1, 1000));
            let bad = TruncatedFunction::new(w.clone(), bad).unwrap();
            assert!(!residual(&t, &bad).unwrap().is_zero());
        }
    }

    #[test]
    fn cubic_with_three_integer_roots() {
        // f(z) = z(z − 1)(z − 2) = z³ − 3z² + 2z
        let w = lat(8);
        let pert = |c: i64, s: i64| TruncatedFunction::from_fn(&w, |e| if e.is_zero() { q(c, 1) } else { q(s, 1 + e.size().to_f64() as i64) });
        let t = ConvPolynomial::new(vec![pert(0, 1), pert(2, -1), pert(-3, 2), pert(1, 1)]).unwrap();
        let all = solve_all(&t).unwrap();
        assert_eq!(all.solutions.len(), 3);
        for (z, g) in &all.solutions {
            assert_eq!(g.at_zero(), z);
            assert!(residual(&t, g).unwrap().is_zero());
        }
        let gs: Vec<_> = all.solutions.iter().map(|(_, g)| g.clone()).collect();
        assert!(factorization_check(&t, &gs).unwrap().holds);
        assert!(matches!(factorization_check(&t, &gs[..2]), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn double_mode_solve_matches_exact() {
        let w = od(200);
        let t = sqrt_one(&w);
        let exact = solve(&t, &q(1, 1)).unwrap();
        let ta = ConvPolynomial::new(t.coeffs().iter().map(|c| c.to_approx()).collect()).unwrap();
        let approx = solve(&ta, &Complex64::new(1.0, 0.0)).unwrap();
        assert!(exact.to_approx().max_abs_diff(&approx).unwrap() < 1e-14);
        let res = residual(&ta, &approx).unwrap();
        assert!(res.max_abs() <= 1e-10 * residual_scale(&ta, &approx).unwrap());
    }

    #[test]
    fn scalar_system_matches_solve() {
        let w = od(60);
        let system = PolySystem {
            equations: vec![vec![
                Monomial { coefficient: TruncatedFunction::unit(&w), exponents: vec![2] },
                Monomial { coefficient: TruncatedFunction::one(&w).neg(), exponents: vec![0] },
            ]],
            base_point: vec![q(1, 1)],
        };
        let gs = solve_system(&system).unwrap();
        assert_eq!(gs[0], solve(&sqrt_one(&w), &q(1, 1)).unwrap());
    }

    #[test]
    fn coupled_system_gives_zeta_square_root() {
        let w = od(60);
        let unit = TruncatedFunction::unit(&w);
        let system = PolySystem {
            equations: vec![
                vec![
                    Monomial { coefficient: unit.clone(), exponents: vec![1, 1] },
                    Monomial { coefficient: TruncatedFunction::one(&w).neg(), exponents: vec![0, 0] },
                ],
                vec![
                    Monomial { coefficient: unit.clone(), exponents: vec![1, 0] },
                    Monomial { coefficient: unit.neg(), exponents: vec![0, 1] },
                ],
            ],
            base_point: vec![q(1, 1), q(1, 1)],
        };
        let gs = solve_system(&system).unwrap();
        let root = solve(&sqrt_one(&w), &q(1, 1)).unwrap();
        assert_eq!(gs[0], root);
        assert_eq!(gs[1], root);
        for r in system_residual(&system, &gs).unwrap() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn decoupled_linear_system() {
        let w = lat(5);
        let a = TruncatedFunction::from_fn(&w, |e| q(1 + e.size().to_f64() as i64, 1));
        let b = TruncatedFunction::from_fn(&w, |e| q(2, 1 + e.size().to_f64() as i64));
        let unit = TruncatedFunction::unit(&w);
        let system = PolySystem {
            equations: vec![
                vec![
                    Monomial { coefficient: unit.clone(), exponents: vec![1, 0] },
                    Monomial { coefficient: a.clone(), exponents: vec![0, 0] },
                ],
                vec![
                    Monomial { coefficient: unit.clone(), exponents: vec![0, 1] },
                    Monomial { coefficient: b.clone(), exponents: vec![0, 0] },
                ],
            ],
            base_point: vec![-a.at_zero().clone(), -b.at_zero().clone()],
        };
        let gs = solve_system(&system).unwrap();
        assert_eq!(gs, vec![a.neg(), b.neg()]);
    }

    #[test]
    fn system_errors() {
        let w = lat(4);
        let unit = TruncatedFunction::unit(&w);
        // g² = 0 at z₀ = 0: singular
        let singular = PolySystem {
            equations: vec![vec![Monomial { coefficient: unit.clone(), exponents: vec![2] }]],
            base_point: vec![q(0, 1)],
        };
        assert!(matches!(solve_system(&singular), Err(Error::SingularJacobian)));
        let inconsistent = PolySystem {
            equations: vec![vec![Monomial { coefficient: unit.clone(), exponents: vec![1] }]],
            base_point: vec![q(1, 1)],
        };
        assert!(matches!(solve_system(&inconsistent), Err(Error::InconsistentBasePoint(_))));
        let too_big = PolySystem {
            equations: vec![vec![Monomial { coefficient: unit, exponents: vec![9] }]],
            base_point: vec![q(0, 1)],
        };
        assert!(matches!(solve_system(&too_big), Err(Error::LimitExceeded(_))));
    }
}
