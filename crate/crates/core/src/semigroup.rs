//! Discrete additive semigroups `X ⊆ [0,∞)^k` and their finite windows.
//!
//! Three concrete families are supported:
//!
//! * [`Semigroup::Lattice`]: `X = ℕ₀^k`, elements are exponent tuples, so the
//!   generalized Dirichlet series are power series in `w = e^{-s}`.
//! * [`Semigroup::OrdinaryDirichlet`]: `X = (log ℕ)^k`, elements are index
//!   tuples `(n₁,…,n_k)` standing for `(log n₁,…,log n_k)`; addition is
//!   coordinatewise multiplication of indices.
//! * [`Semigroup::RationalGenerators`]: the semigroup generated by finitely
//!   many non-negative rational vectors of positive size.
//!
//! Element identity is always exact. Sizes of ordinary-Dirichlet elements
//! are compared through the integer products `Π nᵢ`, never as floats.
//!
//! A [`Window`] is a ≼-prefix of `X` (all elements up to a size bound, or
//! the first `N` elements). Every prefix is closed under taking summands,
//! which makes truncated convolution exact on the window.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rounding::Enclosure;
use crate::scalar::rational_repr;

/// Exact size `|x| = Σ xᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Size {
    /// A rational size (lattice and rational-generator backends).
    Rational(BigRational),
    /// `log n`, stored as `n` (ordinary-Dirichlet backend).
    Log(u64),
}

impl Size {
    pub fn rational(q: BigRational) -> Self {
        Size::Rational(q)
    }

    pub fn integer(n: i64) -> Self {
        Size::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `log n` for a positive integer `n`.
    pub fn log_of(n: u64) -> Self {
        assert!(n >= 1, "log size needs n >= 1");
        Size::Log(n)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Size::Rational(q) => q.is_zero(),
            Size::Log(n) => *n == 1,
        }
    }

    fn add(&self, other: &Size) -> Option<Size> {
        match (self, other) {
            (Size::Rational(a), Size::Rational(b)) => Some(Size::Rational(a + b)),
            (Size::Log(a), Size::Log(b)) => a.checked_mul(*b).map(Size::Log),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Size::Rational(q) => q.to_f64().unwrap_or(f64::INFINITY),
            Size::Log(n) => (*n as f64).ln(),
        }
    }

    /// Guaranteed enclosure of the real size.
    pub fn enclosure(&self) -> Enclosure {
        match self {
            Size::Rational(q) => Enclosure::from_rational(q),
            Size::Log(1) => Enclosure::ZERO,
            Size::Log(n) => Enclosure::around(*n as f64, if *n < (1 << 53) { 0 } else { 1 }).ln(),
        }
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Rational(q) => f.write_str(&rational_repr(q)),
            Size::Log(n) => write!(f, "log({n})"),
        }
    }
}

/// Exact identity of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coords {
    /// Exponent tuple in `ℕ₀^k`.
    Lattice(Vec<u64>),
    /// Index tuple `(n₁,…,n_k)`, each `nᵢ ≥ 1`.
    Dirichlet(Vec<u64>),
    /// Rational coordinate vector.
    Rational(Vec<BigRational>),
}

impl Coords {
    pub fn dim(&self) -> usize {
        match self {
            Coords::Lattice(v) | Coords::Dirichlet(v) => v.len(),
            Coords::Rational(v) => v.len(),
        }
    }

    /// Identity as strings, the form used by the JSON interface.
    pub fn id_strings(&self) -> Vec<String> {
        match self {
            Coords::Lattice(v) | Coords::Dirichlet(v) => v.iter().map(u64::to_string).collect(),
            Coords::Rational(v) => v.iter().map(rational_repr).collect(),
        }
    }

    /// Coordinates in `[0,∞)^k` as strings (`log(n)` for Dirichlet indices).
    pub fn coord_strings(&self) -> Vec<String> {
        match self {
            Coords::Dirichlet(v) => v.iter().map(|n| format!("log({n})")).collect(),
            _ => self.id_strings(),
        }
    }

    /// Enclosure of the i-th real coordinate.
    pub fn coord_enclosure(&self, i: usize) -> Enclosure {
        match self {
            Coords::Lattice(v) => Enclosure::exact(v[i] as f64),
            Coords::Dirichlet(v) => Size::Log(v[i]).enclosure(),
            Coords::Rational(v) => Enclosure::from_rational(&v[i]),
        }
    }

    pub fn coord_f64(&self, i: usize) -> f64 {
        match self {
            Coords::Lattice(v) => v[i] as f64,
            Coords::Dirichlet(v) => (v[i] as f64).ln(),
            Coords::Rational(v) => v[i].to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

impl fmt::Display for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.id_strings().join(","))
    }
}

/// An element of `X`, ordered by size and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    // field order matters: derived Ord compares size first
    size: Size,
    coords: Coords,
}

impl Element {
    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn size(&self) -> &Size {
        &self.size
    }

    pub fn is_zero(&self) -> bool {
        self.size.is_zero()
    }

    fn from_coords(coords: Coords) -> Self {
        let size = match &coords {
            Coords::Lattice(v) => Size::integer(v.iter().sum::<u64>() as i64),
            Coords::Dirichlet(v) => Size::Log(v.iter().product()),
            Coords::Rational(v) => Size::Rational(v.iter().fold(BigRational::zero(), |a, b| a + b)),
        };
        Element { size, coords }
    }

    /// Semigroup addition. `None` on mixed backends or overflow.
    pub fn add(&self, other: &Element) -> Option<Element> {
        let coords = match (&self.coords, &other.coords) {
            (Coords::Lattice(a), Coords::Lattice(b)) if a.len() == b.len() => {
                Coords::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Coords::Dirichlet(a), Coords::Dirichlet(b)) if a.len() == b.len() => Coords::Dirichlet(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_mul(*y))
                    .collect::<Option<Vec<_>>>()?,
            ),
            (Coords::Rational(a), Coords::Rational(b)) if a.len() == b.len() => {
                Coords::Rational(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => return None,
        };
        let size = self.size.add(&other.size)?;
        Some(Element { size, coords })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.coords.fmt(f)
    }
}

/// The backend family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semigroup {
    Lattice { k: usize },
    OrdinaryDirichlet { k: usize },
    RationalGenerators { generators: Vec<Vec<BigRational>> },
}

impl Semigroup {
    pub fn lattice(k: usize) -> Self {
        Semigroup::Lattice { k }
    }

    pub fn ordinary_dirichlet(k: usize) -> Self {
        Semigroup::OrdinaryDirichlet { k }
    }

    pub fn rational_generators(generators: Vec<Vec<BigRational>>) -> Self {
        Semigroup::RationalGenerators { generators }
    }

    /// Generators given as integers, the common case.
    pub fn integer_generators(generators: &[&[i64]]) -> Self {
        Semigroup::RationalGenerators {
            generators: generators
                .iter()
                .map(|g| g.iter().map(|&c| BigRational::from_integer(c.into())).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Semigroup::Lattice { k } | Semigroup::OrdinaryDirichlet { k } => *k,
            Semigroup::RationalGenerators { generators } => {
                generators.first().map(Vec::len).unwrap_or(0)
            }
        }
    }

    pub fn zero(&self) -> Element {
        let k = self.dim();
        Element::from_coords(match self {
            Semigroup::Lattice { .. } => Coords::Lattice(vec![0; k]),
            Semigroup::OrdinaryDirichlet { .. } => Coords::Dirichlet(vec![1; k]),
            Semigroup::RationalGenerators { .. } => Coords::Rational(vec![BigRational::zero(); k]),
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            Semigroup::Lattice { k } | Semigroup::OrdinaryDirichlet { k } => {
                if *k == 0 {
                    return Err(Error::InvalidBackend("dimension k must be at least 1".into()));
                }
            }
            Semigroup::RationalGenerators { generators } => {
                let k = self.dim();
                if generators.is_empty() || k == 0 {
                    return Err(Error::InvalidBackend("at least one non-empty generator required".into()));
                }
                for g in generators {
                    if g.len() != k {
                        return Err(Error::InvalidBackend("generators must share one dimension".into()));
                    }
                    if g.iter().any(Signed::is_negative) {
                        return Err(Error::InvalidBackend("generator coordinates must be non-negative".into()));
                    }
                    if g.iter().all(Zero::is_zero) {
                        return Err(Error::InvalidBackend("generators must have positive size".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds an element of this backend from its identity. Membership in
    /// `X` is only checked against a window, see [`Window::find`].
    pub fn element(&self, coords: Coords) -> Result<Element> {
        let ok = matches!(
            (self, &coords),
            (Semigroup::Lattice { .. }, Coords::Lattice(_))
                | (Semigroup::OrdinaryDirichlet { .. }, Coords::Dirichlet(_))
                | (Semigroup::RationalGenerators { .. }, Coords::Rational(_))
        );
        if !ok || coords.dim() != self.dim() {
            return Err(Error::InvalidBackend(format!("{coords} is not an element id for this backend")));
        }
        if let Coords::Dirichlet(v) = &coords {
            if v.contains(&0) {
                return Err(Error::InvalidBackend("Dirichlet indices start at 1".into()));
            }
        }
        if let Coords::Rational(v) = &coords {
            if v.iter().any(Signed::is_negative) {
                return Err(Error::InvalidBackend("coordinates must be non-negative".into()));
            }
        }
        Ok(Element::from_coords(coords))
    }
}

/// How much of `X` a window covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// All `x` with `|x| ≤ B`.
    SizeBound(Size),
    /// The first `N` elements in ≼ order.
    MaxElements(usize),
}

/// A finite ≼-prefix of `X` with precomputed additive decompositions.
#[derive(Debug)]
pub struct Window {
    semigroup: Semigroup,
    truncation: Truncation,
    elements: Vec<Element>,
    index: HashMap<Coords, usize>,
    decomp_offsets: Vec<usize>,
    decomp_pairs: Vec<(u32, u32)>,
    levels: Vec<Range<usize>>,
}

impl Window {
    /// Enumerates `{x ∈ X : |x| ≤ B}` (or the first `N` elements) sorted by
    /// size, ties broken lexicographically, and precomputes decompositions.
    pub fn enumerate(semigroup: Semigroup, truncation: Truncation) -> Result<Arc<Window>> {
        semigroup.validate()?;
        let elements = match (&semigroup, &truncation) {
            (_, Truncation::MaxElements(0)) => return Err(Error::EmptyTruncation),
            (Semigroup::Lattice { k }, Truncation::SizeBound(Size::Rational(b))) => {
                if b.is_negative() {
                    return Err(Error::EmptyTruncation);
                }
                lattice_points(*k, b.floor().to_integer().to_u64().ok_or_else(too_large)?)
            }
            (Semigroup::Lattice { k }, Truncation::MaxElements(n)) => {
                let mut level = 0u64;
                while binomial_saturating(level + *k as u64, *k as u64) < *n as u64 {
                    level += 1;
                }
                let mut pts = lattice_points(*k, level);
                pts.truncate(*n);
                pts
            }
            (Semigroup::OrdinaryDirichlet { k }, Truncation::SizeBound(Size::Log(n))) => {
                dirichlet_points(*k, *n)
            }
            (Semigroup::OrdinaryDirichlet { .. }, Truncation::SizeBound(Size::Rational(b))) => {
                if b.is_negative() {
                    return Err(Error::EmptyTruncation);
                }
                return Err(Error::InvalidBackend(
                    "ordinary-Dirichlet windows take a bound of the form log(N)".into(),
                ));
            }
            (Semigroup::OrdinaryDirichlet { k }, Truncation::MaxElements(n)) => {
                let mut bound = *n as u64;
                let mut pts = dirichlet_points(*k, bound);
                while pts.len() < *n {
                    bound = bound.checked_mul(2).ok_or_else(too_large)?;
                    pts = dirichlet_points(*k, bound);
                }
                pts.truncate(*n);
                pts
            }
            (Semigroup::RationalGenerators { generators }, Truncation::SizeBound(Size::Rational(b))) => {
                if b.is_negative() {
                    return Err(Error::EmptyTruncation);
                }
                best_first(&semigroup, generators, Some(b), usize::MAX)
            }
            (Semigroup::RationalGenerators { generators }, Truncation::MaxElements(n)) => {
                best_first(&semigroup, generators, None, *n)
            }
            (_, Truncation::SizeBound(Size::Log(_))) => {
                return Err(Error::InvalidBackend(
                    "log(N) bounds only apply to the ordinary-Dirichlet backend".into(),
                ))
            }
        };
        debug_assert!(elements.first().is_some_and(Element::is_zero));
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));

        let index: HashMap<Coords, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.coords.clone(), i))
            .collect();
        let mut levels = Vec::new();
        let mut start = 0;
        for i in 1..=elements.len() {
            if i == elements.len() || elements[i].size != elements[start].size {
                levels.push(start..i);
                start = i;
            }
        }

        let mut window = Window {
            semigroup,
            truncation,
            elements,
            index,
            decomp_offsets: Vec::new(),
            decomp_pairs: Vec::new(),
            levels,
        };
        window.build_decompositions();
        Ok(Arc::new(window))
    }

    fn build_decompositions(&mut self) {
        let n = self.elements.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        offsets.push(0);
        match &self.semigroup {
            Semigroup::Lattice { .. } => {
                for x in &self.elements {
                    let Coords::Lattice(c) = &x.coords else { unreachable!() };
                    let start = pairs.len();
                    for_each_box_point(c, |y| {
                        let rest: Vec<u64> = c.iter().zip(y).map(|(a, b)| a - b).collect();
                        let iy = self.index[&Coords::Lattice(y.to_vec())];
                        let ir = self.index[&Coords::Lattice(rest)];
                        pairs.push((iy as u32, ir as u32));
                    });
                    pairs[start..].sort_unstable();
                    offsets.push(pairs.len());
                }
            }
            Semigroup::OrdinaryDirichlet { .. } => {
                let max_index = self
                    .elements
                    .iter()
                    .filter_map(|e| match &e.coords {
                        Coords::Dirichlet(v) => v.iter().copied().max(),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(1);
                let divisors = divisor_table(max_index as usize);
                for x in &self.elements {
                    let Coords::Dirichlet(c) = &x.coords else { unreachable!() };
                    let start = pairs.len();
                    let lists: Vec<&[u32]> = c.iter().map(|&n| divisors[n as usize].as_slice()).collect();
                    for_each_divisor_tuple(&lists, |d| {
                        let dv: Vec<u64> = d.iter().map(|&v| v as u64).collect();
                        let rest: Vec<u64> = c.iter().zip(&dv).map(|(a, b)| a / b).collect();
                        let iy = self.index[&Coords::Dirichlet(dv)];
                        let ir = self.index[&Coords::Dirichlet(rest)];
                        pairs.push((iy as u32, ir as u32));
                    });
                    pairs[start..].sort_unstable();
                    offsets.push(pairs.len());
                }
            }
            Semigroup::RationalGenerators { .. } => {
                for (ix, x) in self.elements.iter().enumerate() {
                    let Coords::Rational(c) = &x.coords else { unreachable!() };
                    for (iy, y) in self.elements[..=ix].iter().enumerate() {
                        let Coords::Rational(d) = &y.coords else { unreachable!() };
                        let rest: Vec<BigRational> = c.iter().zip(d).map(|(a, b)| a - b).collect();
                        if rest.iter().any(Signed::is_negative) {
                            continue;
                        }
                        if let Some(&ir) = self.index.get(&Coords::Rational(rest)) {
                            pairs.push((iy as u32, ir as u32));
                        }
                    }
                    offsets.push(pairs.len());
                }
            }
        }
        self.decomp_offsets = offsets;
        self.decomp_pairs = pairs;
    }

    pub fn semigroup(&self) -> &Semigroup {
        &self.semigroup
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn dim(&self) -> usize {
        self.semigroup.dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    /// Size of the last element; every element of `X` below it is present.
    pub fn max_size(&self) -> &Size {
        &self.elements[self.elements.len() - 1].size
    }

    pub fn index_of(&self, coords: &Coords) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn find(&self, coords: &Coords) -> Option<&Element> {
        self.index_of(coords).map(|i| &self.elements[i])
    }

    /// Index ranges of elements sharing one size, in increasing size.
    pub fn levels(&self) -> &[Range<usize>] {
        &self.levels
    }

    /// Ordered pairs `(i′, i″)` of element indices with `x′ + x″ = x`,
    /// ascending in `i′`.
    pub fn decomposition_indices(&self, i: usize) -> &[(u32, u32)] {
        &self.decomp_pairs[self.decomp_offsets[i]..self.decomp_offsets[i + 1]]
    }

    /// Total number of decomposition pairs over the window.
    pub fn decomposition_count(&self) -> usize {
        self.decomp_pairs.len()
    }

    /// Every `(x′, x″)` with `x′ + x″ = x`, ordered by `x′`.
    pub fn decompositions(&self, x: &Element) -> Result<Vec<(Element, Element)>> {
        let i = self
            .index_of(&x.coords)
            .ok_or_else(|| Error::NotEnumerated(x.to_string()))?;
        Ok(self
            .decomposition_indices(i)
            .iter()
            .map(|&(a, b)| (self.elements[a as usize].clone(), self.elements[b as usize].clone()))
            .collect())
    }

    /// `m₁ = min{|x| : x ≠ 0}`.
    pub fn min_positive_size(&self) -> Result<&Size> {
        self.elements.get(1).map(|e| &e.size).ok_or(Error::OnlyZero)
    }

    /// Two windows are interchangeable when they describe the same set.
    pub fn same_as(&self, other: &Window) -> bool {
        std::ptr::eq(self, other)
            || (self.semigroup == other.semigroup && self.elements == other.elements)
    }
}

fn too_large() -> Error {
    Error::InvalidBackend("truncation bound too large".into())
}

fn binomial_saturating(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn lattice_points(k: usize, level: u64) -> Vec<Element> {
    fn rec(k: usize, budget: u64, prefix: &mut Vec<u64>, out: &mut Vec<Element>) {
        if prefix.len() == k {
            out.push(Element::from_coords(Coords::Lattice(prefix.clone())));
            return;
        }
        for c in 0..=budget {
            prefix.push(c);
            rec(k, budget - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, level, &mut Vec::with_capacity(k), &mut out);
    out.sort_unstable();
    out
}

fn dirichlet_points(k: usize, bound: u64) -> Vec<Element> {
    fn rec(k: usize, budget: u64, prefix: &mut Vec<u64>, out: &mut Vec<Element>) {
        if prefix.len() == k {
            out.push(Element::from_coords(Coords::Dirichlet(prefix.clone())));
            return;
        }
        for n in 1..=budget {
            prefix.push(n);
            rec(k, budget / n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if bound >= 1 {
        rec(k, bound, &mut Vec::with_capacity(k), &mut out);
    }
    out.sort_unstable();
    out
}

fn best_first(
    semigroup: &Semigroup,
    generators: &[Vec<BigRational>],
    bound: Option<&BigRational>,
    limit: usize,
) -> Vec<Element> {
    let gens: Vec<Element> = generators
        .iter()
        .map(|g| Element::from_coords(Coords::Rational(g.clone())))
        .collect();
    let within = |e: &Element| match (bound, &e.size) {
        (Some(b), Size::Rational(s)) => s <= b,
        _ => true,
    };
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Coords> = HashSet::new();
    let zero = semigroup.zero();
    seen.insert(zero.coords.clone());
    heap.push(std::cmp::Reverse(zero));
    let mut out = Vec::new();
    while let Some(std::cmp::Reverse(x)) = heap.pop() {
        for g in &gens {
            let y = x.add(g).expect("same backend");
            if within(&y) && seen.insert(y.coords.clone()) {
                heap.push(std::cmp::Reverse(y));
            }
        }
        out.push(x);
        if out.len() >= limit {
            break;
        }
    }
    out
}

fn for_each_box_point(upper: &[u64], mut f: impl FnMut(&[u64])) {
    let mut cur = vec![0u64; upper.len()];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == upper.len() {
                return;
            }
            if cur[i] < upper[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

fn for_each_divisor_tuple(lists: &[&[u32]], mut f: impl FnMut(&[u32])) {
    let mut pos = vec![0usize; lists.len()];
    let mut cur: Vec<u32> = lists.iter().map(|l| l[0]).collect();
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == lists.len() {
                return;
            }
            if pos[i] + 1 < lists[i].len() {
                pos[i] += 1;
                cur[i] = lists[i][pos[i]];
                break;
            }
            pos[i] = 0;
            cur[i] = lists[i][0];
            i += 1;
        }
    }
}

/// `divisors[n]` lists the divisors of `n` in increasing order.
fn divisor_table(max: usize) -> Vec<Vec<u32>> {
    let mut divisors = vec![Vec::new(); max + 1];
    for d in 1..=max {
        for m in (d..=max).step_by(d) {
            divisors[m].push(d as u32);
        }
    }
    divisors
}
