//! The truncated Dirichlet algebra on a window.
//!
//! A [`TruncatedFunction`] stores one value per window element, aligned with
//! the ≼ enumeration. Because sizes are additive and windows are ≼-prefixes,
//! the convolution of two truncated functions agrees with the untruncated
//! convolution at every window element.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rounding::Enclosure;
use crate::scalar::Scalar;
use crate::semigroup::{Coords, Element, Size, Window};

/// Levels at least this long are evaluated on the rayon pool.
pub(crate) const PAR_THRESHOLD: usize = 64;

/// Evaluates `f` over `range` in order, in parallel when it is long enough.
/// Output order never depends on the thread count.
pub(crate) fn map_range<T: Send>(
    range: std::ops::Range<usize>,
    f: impl Fn(usize) -> T + Sync + Send,
) -> Vec<T> {
    if range.len() >= PAR_THRESHOLD {
        range.into_par_iter().with_min_len(16).map(f).collect()
    } else {
        range.map(f).collect()
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedFunction<S> {
    window: Arc<Window>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for TruncatedFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        self.window.same_as(&other.window) && self.values == other.values
    }
}

impl<S: Scalar> TruncatedFunction<S> {
    pub fn new(window: Arc<Window>, values: Vec<S>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a window of {} elements",
                values.len(),
                window.len()
            )));
        }
        Ok(TruncatedFunction { window, values })
    }

    pub fn zero(window: &Arc<Window>) -> Self {
        TruncatedFunction {
            values: vec![S::zero(); window.len()],
            window: window.clone(),
        }
    }

    /// The convolution unit `u`: 1 at 0, 0 elsewhere.
    pub fn unit(window: &Arc<Window>) -> Self {
        let mut f = Self::zero(window);
        f.values[0] = S::one();
        f
    }

    /// The constant function 1 on `X`.
    pub fn one(window: &Arc<Window>) -> Self {
        Self::constant(window, S::one())
    }

    pub fn constant(window: &Arc<Window>, c: S) -> Self {
        TruncatedFunction {
            values: vec![c; window.len()],
            window: window.clone(),
        }
    }

    pub fn from_fn(window: &Arc<Window>, f: impl Fn(&Element) -> S) -> Self {
        TruncatedFunction {
            values: window.elements().iter().map(f).collect(),
            window: window.clone(),
        }
    }

    /// `value` at the single element `coords`, zero elsewhere.
    pub fn indicator(window: &Arc<Window>, coords: &Coords, value: S) -> Result<Self> {
        let i = window
            .index_of(coords)
            .ok_or_else(|| Error::NotEnumerated(coords.to_string()))?;
        let mut f = Self::zero(window);
        f.values[i] = value;
        Ok(f)
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn at(&self, i: usize) -> &S {
        &self.values[i]
    }

    pub fn get(&self, coords: &Coords) -> Option<&S> {
        self.window.index_of(coords).map(|i| &self.values[i])
    }

    pub fn set(&mut self, coords: &Coords, value: S) -> Result<()> {
        let i = self
            .window
            .index_of(coords)
            .ok_or_else(|| Error::NotEnumerated(coords.to_string()))?;
        self.values[i] = value;
        Ok(())
    }

    /// `g(0)`.
    pub fn at_zero(&self) -> &S {
        &self.values[0]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(S::is_zero)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.window.same_as(&other.window) {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(TruncatedFunction {
            window: self.window.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add_ref(b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn neg(&self) -> Self {
        TruncatedFunction {
            window: self.window.clone(),
            values: self.values.iter().map(|v| -v.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        TruncatedFunction {
            window: self.window.clone(),
            values: self.values.iter().map(|v| v.mul_ref(c)).collect(),
        }
    }

    /// `(g∗h)(x) = Σ_{x′+x″=x} g(x′)h(x″)` on every window element.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let w = &self.window;
        let (a, b) = (&self.values, &other.values);
        let values = map_range(0..w.len(), |i| {
            let mut acc = S::zero();
            for &(p, q) in w.decomposition_indices(i) {
                acc.add_mul(&a[p as usize], &b[q as usize]);
            }
            acc
        });
        Ok(TruncatedFunction {
            window: w.clone(),
            values,
        })
    }

    /// `g^{∗j}`, with `g^{∗0} = u`.
    pub fn power(&self, j: u32) -> Self {
        let mut result = Self::unit(&self.window);
        let mut base = self.clone();
        let mut e = j;
        while e > 0 {
            if e & 1 == 1 {
                result = result.convolve(&base).expect("same window");
            }
            e >>= 1;
            if e > 0 {
                base = base.convolve(&base).expect("same window");
            }
        }
        result
    }

    /// Convolution inverse, defined iff `g(0) ≠ 0`.
    ///
    /// `g⁻¹(0) = 1/g(0)` and `g⁻¹(x) = −g(0)⁻¹ Σ g(x′)g⁻¹(x″)` over the
    /// decompositions with `x″ ≠ x`. Entries of one size level only depend
    /// on strictly smaller levels, so each level is filled in parallel.
    pub fn invert(&self) -> Result<Self> {
        self.invert_with_tolerance(crate::scalar::DEFAULT_TOLERANCE)
    }

    pub fn invert_with_tolerance(&self, tol: f64) -> Result<Self> {
        let g0 = &self.values[0];
        if g0.is_negligible(tol) {
            return Err(Error::NotInvertible);
        }
        let inv0 = g0.recip().ok_or(Error::NotInvertible)?;
        let neg_inv0 = -inv0.clone();
        let w = &self.window;
        let g = &self.values;
        let mut out = vec![S::zero(); w.len()];
        out[0] = inv0;
        for level in &w.levels()[1..] {
            let computed = {
                let out_ref = &out;
                map_range(level.clone(), |i| {
                    let mut acc = S::zero();
                    for &(p, q) in w.decomposition_indices(i) {
                        if q as usize != i {
                            acc.add_mul(&g[p as usize], &out_ref[q as usize]);
                        }
                    }
                    acc.mul_ref(&neg_inv0)
                })
            };
            for (i, v) in level.clone().zip(computed) {
                out[i] = v;
            }
        }
        Ok(TruncatedFunction {
            window: w.clone(),
            values: out,
        })
    }

    /// Enclosure of `e^{-r|x|}` at window index `i`.
    pub(crate) fn weight(&self, r: f64, i: usize) -> Enclosure {
        weight_enclosure(self.window.element(i).size(), r)
    }

    /// `S_r(m) = Σ_{0<|x|≤m} |g(x)| e^{-r|x|}`, or the full partial norm
    /// `Σ_{|x|≤m}` when `include_zero` is set. Returns an upper bound.
    pub fn r_norm_partial(&self, r: f64, m: &Size, include_zero: bool) -> f64 {
        self.r_norm_enclosure(r, m, include_zero).hi
    }

    /// Guaranteed enclosure of the partial r-norm described in
    /// [`r_norm_partial`](Self::r_norm_partial).
    pub fn r_norm_enclosure(&self, r: f64, m: &Size, include_zero: bool) -> Enclosure {
        let start = if include_zero { 0 } else { 1 };
        let mut acc = Enclosure::ZERO;
        for i in start..self.values.len() {
            if self.window.element(i).size() > m {
                break;
            }
            if self.values[i].is_zero() {
                continue;
            }
            acc = acc + self.values[i].abs_enclosure() * self.weight(r, i);
        }
        acc.nonneg()
    }

    /// Full window norm `Σ_{x∈window} |g(x)| e^{-r|x|}`.
    pub fn window_norm(&self, r: f64) -> Enclosure {
        self.r_norm_enclosure(r, self.window.max_size(), true)
    }

    /// Cumulative `S_r(m_n)` for every positive size level `m_1 < m_2 < …`.
    pub fn level_partial_sums(&self, r: f64) -> Vec<Enclosure> {
        let mut acc = Enclosure::ZERO;
        let mut out = Vec::with_capacity(self.window.levels().len().saturating_sub(1));
        for level in &self.window.levels()[1..] {
            for i in level.clone() {
                if !self.values[i].is_zero() {
                    acc = acc + self.values[i].abs_enclosure() * self.weight(r, i);
                }
            }
            acc = acc.nonneg();
            out.push(acc);
        }
        out
    }

    /// `g_r(x) = e^{-r|x|} g(x)` in double precision.
    pub fn damped(&self, r: f64) -> TruncatedFunction<Complex64> {
        TruncatedFunction {
            window: self.window.clone(),
            values: self
                .values
                .iter()
                .zip(self.window.elements())
                .map(|(v, e)| v.to_c64() * (-r * e.size().to_f64()).exp())
                .collect(),
        }
    }

    pub fn to_approx(&self) -> TruncatedFunction<Complex64> {
        TruncatedFunction {
            window: self.window.clone(),
            values: self.values.iter().map(S::to_c64).collect(),
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.to_c64() - b.to_c64()).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(S::magnitude).fold(0.0, f64::max)
    }

    /// Exact equality in exact mode; entrywise within `tol` otherwise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.window.same_as(&other.window)
            && self.values.iter().zip(&other.values).all(|(a, b)| a.close_to(b, tol))
    }
}

/// Enclosure of `e^{-r·size}`.
pub(crate) fn weight_enclosure(size: &Size, r: f64) -> Enclosure {
    if r == 0.0 || size.is_zero() {
        return Enclosure::ONE;
    }
    (-(Enclosure::exact(r) * size.enclosure())).exp()
}

/// Builds a function from its explicit value table `(element id, value)`.
pub fn from_table<S: Scalar>(
    window: &Arc<Window>,
    entries: impl IntoIterator<Item = (Coords, S)>,
) -> Result<TruncatedFunction<S>> {
    let mut f = TruncatedFunction::zero(window);
    for (c, v) in entries {
        f.set(&c, v)?;
    }
    Ok(f)
}
