//! The JSON problem format and the `dirconv run` pipeline.
//!
//! A problem names a semigroup window, an arithmetic mode, the coefficient
//! functions of an equation (or a single function to invert) and a task.
//! Running it produces a [`ResultDocument`], rendered either as a
//! fixed-width table or as JSON that parses back to the same document.
//!
//! ```json
//! {
//!   "semigroup": {"kind": "ordinary-dirichlet", "k": 1, "size_bound": "log(1000)"},
//!   "arithmetic": {"mode": "exact"},
//!   "equation": {"coefficients": [
//!     {"kind": "const", "value": -1},
//!     {"kind": "table", "entries": []},
//!     {"kind": "unit"}
//!   ]},
//!   "task": {"kind": "verify", "root": 1, "rho": 2, "points": [2, 3, {"re": 2, "im": 10}]}
//! }
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::TruncatedFunction;
use crate::certificate::{certify, validate, NormCertificate, NormInput, NormScope};
use crate::error::{fmt_repr, Error};
use crate::scalar::{parse_rational, Exact, Scalar, ScalarRepr, DEFAULT_TOLERANCE};
use crate::semigroup::{Coords, Semigroup, Size, Truncation, Window};
use crate::series::{evaluate, tail_bound, verify_scalar_equation, BoundRoute};
use crate::solver::{initial_polynomial, residual, residual_scale, solve, solve_all, ConvPolynomial};

/// Failures that stop a run before a document exists.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}: line {line}, column {column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        1
    }

    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Errors that mean "this mathematical problem has no answer here", as
/// opposed to a malformed request.
pub fn is_refusal(e: &Error) -> bool {
    matches!(
        e,
        Error::NoSimpleRoots { .. }
            | Error::NotInvertible
            | Error::NoPositiveR
            | Error::DegenerateConstant
            | Error::ZeroPolynomial
            | Error::NotASimpleRoot(_)
            | Error::ZeroDerivative
            | Error::AllCoefficientsZero
    )
}

// ---------------------------------------------------------------- spec types

/// A JSON number or a string such as `"3/4"`, `"log(10)"` or `"all"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Int(i) => i.to_string(),
            Number::Float(f) => f.to_string(),
            Number::Text(s) => s.trim().to_string(),
        }
    }

    fn rational(&self, field: &str) -> Result<BigRational, CliError> {
        parse_rational(&self.text())
            .ok_or_else(|| CliError::invalid(field, format!("`{}` is not a rational number", self.text())))
    }
}

/// A real number or `{"re": …, "im": …}`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ScalarSpec {
    Real(Number),
    Complex {
        re: Number,
        #[serde(default = "zero_number")]
        im: Number,
    },
}

fn zero_number() -> Number {
    Number::Int(0)
}

impl ScalarSpec {
    fn is_all(&self) -> bool {
        matches!(self, ScalarSpec::Real(Number::Text(t)) if t.trim() == "all")
    }

    fn exact(&self, field: &str) -> Result<Exact, CliError> {
        match self {
            ScalarSpec::Real(n) => Ok(Exact::new(n.rational(field)?, BigRational::zero())),
            ScalarSpec::Complex { re, im } => Ok(Exact::new(
                re.rational(&format!("{field}.re"))?,
                im.rational(&format!("{field}.im"))?,
            )),
        }
    }

    fn scalar<S: Scalar>(&self, field: &str) -> Result<S, CliError> {
        let z = self.exact(field)?;
        Ok(S::from_complex_rational(&z.re, &z.im))
    }

    fn c64(&self, field: &str) -> Result<Complex64, CliError> {
        Ok(self.exact(field)?.to_c64())
    }
}

/// One evaluation point: a bare scalar when `k = 1`, or a list of `k`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointSpec {
    Many(Vec<ScalarSpec>),
    One(ScalarSpec),
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Lattice,
    OrdinaryDirichlet,
    RationalGenerators,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    pub kind: BackendKind,
    pub k: usize,
    #[serde(default)]
    pub generators: Option<Vec<Vec<Number>>>,
    #[serde(default)]
    pub size_bound: Option<Number>,
    #[serde(default)]
    pub max_elements: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    Double,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArithmeticSpec {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub element: Vec<Number>,
    pub value: ScalarSpec,
}

/// A coefficient or input function.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Point mass at 0.
    Unit,
    /// Constant 1 everywhere.
    One,
    /// Constant `value` everywhere.
    Const { value: ScalarSpec },
    /// `value` (default 1) at one element, 0 elsewhere.
    Indicator {
        element: Vec<Number>,
        #[serde(default)]
        value: Option<ScalarSpec>,
    },
    /// Explicit values; unlisted elements are 0.
    Table { entries: Vec<EntrySpec> },
    /// A table read from a JSON file, relative to the spec file.
    File { path: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub coefficients: Vec<FunctionSpec>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Solve,
    SolveAll,
    Invert,
    Certify,
    Eval,
    Verify,
}

impl TaskKind {
    fn name(self) -> &'static str {
        match self {
            TaskKind::Solve => "solve",
            TaskKind::SolveAll => "solve-all",
            TaskKind::Invert => "invert",
            TaskKind::Certify => "certify",
            TaskKind::Eval => "eval",
            TaskKind::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// An anchor value, or `"all"`.
    #[serde(default)]
    pub root: Option<ScalarSpec>,
    #[serde(default)]
    pub rho: Option<Number>,
    #[serde(default)]
    pub norm_bounds: Option<Vec<Number>>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    /// Input of `invert`, or an explicit function for `eval`.
    #[serde(default)]
    pub function: Option<FunctionSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub semigroup: SemigroupSpec,
    #[serde(default)]
    pub arithmetic: ArithmeticSpec,
    #[serde(default)]
    pub equation: Option<EquationSpec>,
    pub task: TaskSpec,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, file: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        parse_json(text, "spec")
    }
}

// ------------------------------------------------------------ result types

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDoc {
    fn from(z: Complex64) -> Self {
        ComplexDoc { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Row {
    pub id: Vec<String>,
    pub coords: Vec<String>,
    pub size: String,
    pub value: ScalarRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootDoc {
    pub approx: ComplexDoc,
    pub multiplicity: usize,
    pub simple: bool,
    pub exact: Option<ScalarRepr>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootsDoc {
    pub degree: usize,
    /// `a_0(0), …, a_d(0)`.
    pub coefficients: Vec<ScalarRepr>,
    pub roots: Vec<RootDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SkippedDoc {
    pub root: ComplexDoc,
    pub multiplicity: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualDoc {
    pub max_abs: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateDoc {
    pub rho: f64,
    pub m1: f64,
    pub z0: ScalarRepr,
    pub t_star: f64,
    pub c: f64,
    pub r: f64,
    pub scope: NormScope,
    pub norm_bound: f64,
    pub coefficient_norms: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl From<&NormCertificate> for CertificateDoc {
    fn from(c: &NormCertificate) -> Self {
        CertificateDoc {
            rho: c.rho,
            m1: c.m1,
            z0: c.z0_repr.clone(),
            t_star: c.t_star,
            c: c.c,
            r: c.r,
            scope: c.scope,
            norm_bound: c.norm_bound(),
            coefficient_norms: c.coefficient_norms.clone(),
            p: c.majorants.p.clone(),
            q: c.majorants.q.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationDoc {
    pub levels: usize,
    pub max_partial_sum: f64,
    pub bound_margin: f64,
    pub recursion_margin: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesDoc {
    pub s: Vec<ComplexDoc>,
    pub value: ComplexDoc,
    pub terms: usize,
    pub tail_bound: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckDoc {
    pub s: Vec<ComplexDoc>,
    pub defect: f64,
    pub bound: f64,
    pub route: BoundRoute,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionDoc {
    pub label: String,
    pub anchor: Option<ScalarRepr>,
    pub rows: Vec<Row>,
    pub residual: Option<ResidualDoc>,
    pub certificate: Option<CertificateDoc>,
    pub validation: Option<ValidationDoc>,
    pub series: Vec<SeriesDoc>,
    pub checks: Vec<CheckDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ObstructionDoc {
    pub root: ScalarRepr,
    pub element: String,
    pub value: ScalarRepr,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    pub obstructions: Vec<ObstructionDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultDocument {
    pub spec_hash: String,
    pub task: TaskKind,
    pub mode: Mode,
    pub semigroup: String,
    pub window_elements: usize,
    pub roots: Option<RootsDoc>,
    pub solutions: Vec<SolutionDoc>,
    pub skipped: Vec<SkippedDoc>,
    pub diagnostic: Option<Diagnostic>,
    pub timing_ms: u64,
}

impl ResultDocument {
    /// 0 on success, 2 when the run ended in a mathematical refusal.
    pub fn exit_code(&self) -> i32 {
        if self.diagnostic.is_some() {
            2
        } else {
            0
        }
    }
}

fn diagnostic(e: &Error) -> Diagnostic {
    let kind = format!("{e:?}");
    let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string();
    let obstructions = match e {
        Error::NoSimpleRoots { obstructions, .. } => obstructions
            .iter()
            .map(|o| ObstructionDoc {
                root: o.root.clone(),
                element: o.element.clone(),
                value: o.value.clone(),
            })
            .collect(),
        _ => Vec::new(),
    };
    Diagnostic {
        kind,
        message: e.to_string(),
        obstructions,
    }
}

// ----------------------------------------------------------------- running

/// Knobs from the command line.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub threads: usize,
    pub tolerance: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            tolerance: None,
        }
    }
}

/// Reads, validates and executes a spec file.
pub fn run(spec_path: &Path, options: &RunOptions) -> Result<ResultDocument, CliError> {
    let text = std::fs::read_to_string(spec_path).map_err(|source| CliError::Io {
        path: spec_path.to_path_buf(),
        source,
    })?;
    let base = spec_path.parent().map(Path::to_path_buf).unwrap_or_default();
    run_text(&text, &base, options)
}

/// Executes a spec given as text; `file` references resolve against `base`.
pub fn run_text(text: &str, base: &Path, options: &RunOptions) -> Result<ResultDocument, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .map_err(|e| CliError::invalid("--threads", e.to_string()))?;
    pool.install(|| {
        let start = Instant::now();
        let spec = ProblemSpec::parse(text)?;
        let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        let mut doc = match spec.arithmetic.mode {
            Mode::Exact => Runner::<Exact>::new(&spec, base, options)?.run(hash)?,
            Mode::Double => Runner::<Complex64>::new(&spec, base, options)?.run(hash)?,
        };
        doc.timing_ms = start.elapsed().as_millis() as u64;
        Ok(doc)
    })
}

fn build_window(spec: &SemigroupSpec) -> Result<Arc<Window>, CliError> {
    if spec.k == 0 {
        return Err(CliError::invalid("semigroup.k", "dimension must be at least 1"));
    }
    let semigroup = match spec.kind {
        BackendKind::Lattice => Semigroup::lattice(spec.k),
        BackendKind::OrdinaryDirichlet => Semigroup::ordinary_dirichlet(spec.k),
        BackendKind::RationalGenerators => {
            let gens = spec
                .generators
                .as_ref()
                .ok_or_else(|| CliError::invalid("semigroup.generators", "required for rational-generators"))?;
            let mut out = Vec::with_capacity(gens.len());
            for (i, g) in gens.iter().enumerate() {
                let field = format!("semigroup.generators[{i}]");
                if g.len() != spec.k {
                    return Err(CliError::invalid(field, format!("expected {} coordinates", spec.k)));
                }
                out.push(g.iter().map(|c| c.rational(&field)).collect::<Result<Vec<_>, _>>()?);
            }
            Semigroup::rational_generators(out)
        }
    };
    if spec.kind != BackendKind::RationalGenerators && spec.generators.is_some() {
        return Err(CliError::invalid("semigroup.generators", "only valid for rational-generators"));
    }
    let truncation = match (&spec.size_bound, spec.max_elements) {
        (Some(_), Some(_)) => {
            return Err(CliError::invalid("semigroup", "give either size_bound or max_elements, not both"))
        }
        (None, None) => return Err(CliError::invalid("semigroup", "size_bound or max_elements is required")),
        (None, Some(n)) => Truncation::MaxElements(n),
        (Some(b), None) => {
            let text = b.text();
            let log_arg = text.strip_prefix("log(").and_then(|t| t.strip_suffix(')'));
            match (spec.kind, log_arg) {
                (BackendKind::OrdinaryDirichlet, Some(n)) => {
                    let n: u64 = n.trim().parse().map_err(|_| {
                        CliError::invalid("semigroup.size_bound", format!("`{text}` is not log of a positive integer"))
                    })?;
                    if n == 0 {
                        return Err(CliError::invalid("semigroup.size_bound", "log(0) is not a size"));
                    }
                    Truncation::SizeBound(Size::log_of(n))
                }
                (BackendKind::OrdinaryDirichlet, None) => {
                    return Err(CliError::invalid(
                        "semigroup.size_bound",
                        "ordinary-dirichlet bounds are written \"log(N)\"",
                    ))
                }
                (_, Some(_)) => {
                    return Err(CliError::invalid("semigroup.size_bound", "log bounds need ordinary-dirichlet"))
                }
                (_, None) => Truncation::SizeBound(Size::rational(b.rational("semigroup.size_bound")?)),
            }
        }
    };
    Window::enumerate(semigroup, truncation).map_err(|e| CliError::invalid("semigroup", e.to_string()))
}

fn describe_window(spec: &SemigroupSpec, w: &Window) -> String {
    let kind = match spec.kind {
        BackendKind::Lattice => "lattice",
        BackendKind::OrdinaryDirichlet => "ordinary-dirichlet",
        BackendKind::RationalGenerators => "rational-generators",
    };
    let bound = match w.truncation() {
        Truncation::SizeBound(b) => format!("|x| <= {b}"),
        Truncation::MaxElements(n) => format!("first {n} elements"),
    };
    format!("{kind} k={} {bound}", spec.k)
}

fn parse_coords(window: &Window, id: &[Number], field: &str) -> Result<Coords, CliError> {
    if id.len() != window.dim() {
        return Err(CliError::invalid(field, format!("expected {} coordinates", window.dim())));
    }
    let ints = || -> Result<Vec<u64>, CliError> {
        id.iter()
            .map(|n| {
                n.text()
                    .parse::<u64>()
                    .map_err(|_| CliError::invalid(field, format!("`{}` is not a non-negative integer", n.text())))
            })
            .collect()
    };
    let coords = match window.semigroup() {
        Semigroup::Lattice { .. } => Coords::Lattice(ints()?),
        Semigroup::OrdinaryDirichlet { .. } => {
            let v = ints()?;
            if v.contains(&0) {
                return Err(CliError::invalid(field, "Dirichlet indices start at 1"));
            }
            Coords::Dirichlet(v)
        }
        Semigroup::RationalGenerators { .. } => {
            Coords::Rational(id.iter().map(|n| n.rational(field)).collect::<Result<_, _>>()?)
        }
    };
    if window.index_of(&coords).is_none() {
        return Err(CliError::invalid(field, format!("element {coords} lies outside the window")));
    }
    Ok(coords)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TableFile {
    Wrapped { entries: Vec<EntrySpec> },
    Bare(Vec<EntrySpec>),
}

/// Builds a function and reports whether its support is known to be finite.
fn build_function<S: Scalar>(
    spec: &FunctionSpec,
    window: &Arc<Window>,
    base: &Path,
    field: &str,
) -> Result<(TruncatedFunction<S>, bool), CliError> {
    let table = |entries: &[EntrySpec], field: &str| -> Result<TruncatedFunction<S>, CliError> {
        let mut f = TruncatedFunction::zero(window);
        for (i, e) in entries.iter().enumerate() {
            let ef = format!("{field}.entries[{i}]");
            let c = parse_coords(window, &e.element, &format!("{ef}.element"))?;
            let v = e.value.scalar::<S>(&format!("{ef}.value"))?;
            f.set(&c, v).map_err(|err| CliError::invalid(&ef, err.to_string()))?;
        }
        Ok(f)
    };
    Ok(match spec {
        FunctionSpec::Unit => (TruncatedFunction::unit(window), true),
        FunctionSpec::One => (TruncatedFunction::one(window), false),
        FunctionSpec::Const { value } => {
            let v = value.scalar::<S>(&format!("{field}.value"))?;
            let finite = v.is_zero();
            (TruncatedFunction::constant(window, v), finite)
        }
        FunctionSpec::Indicator { element, value } => {
            let c = parse_coords(window, element, &format!("{field}.element"))?;
            let v = match value {
                Some(v) => v.scalar::<S>(&format!("{field}.value"))?,
                None => S::one(),
            };
            (TruncatedFunction::indicator(window, &c, v)?, true)
        }
        FunctionSpec::Table { entries } => (table(entries, field)?, true),
        FunctionSpec::File { path } => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full).map_err(|source| CliError::Io { path: full.clone(), source })?;
            let entries = match parse_json::<TableFile>(&text, &full.display().to_string())? {
                TableFile::Wrapped { entries } | TableFile::Bare(entries) => entries,
            };
            (table(&entries, &format!("{field}({path})"))?, true)
        }
    })
}

struct Runner<'a, S> {
    spec: &'a ProblemSpec,
    base: &'a Path,
    window: Arc<Window>,
    tolerance: f64,
    points: Vec<Vec<Complex64>>,
    _mode: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar> Runner<'a, S> {
    fn new(spec: &'a ProblemSpec, base: &'a Path, options: &RunOptions) -> Result<Self, CliError> {
        let window = build_window(&spec.semigroup)?;
        let tolerance = options.tolerance.or(spec.arithmetic.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(CliError::invalid("arithmetic.tolerance", "must be positive and finite"));
        }
        let mut points = Vec::with_capacity(spec.task.points.len());
        for (i, p) in spec.task.points.iter().enumerate() {
            let field = format!("task.points[{i}]");
            let s: Vec<Complex64> = match p {
                PointSpec::One(v) => vec![v.c64(&field)?],
                PointSpec::Many(vs) => vs
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v.c64(&format!("{field}[{j}]")))
                    .collect::<Result<_, _>>()?,
            };
            if s.len() != window.dim() {
                return Err(CliError::invalid(field, format!("expected {} components", window.dim())));
            }
            points.push(s);
        }
        Ok(Runner {
            spec,
            base,
            window,
            tolerance,
            points,
            _mode: std::marker::PhantomData,
        })
    }

    fn document(&self, hash: String) -> ResultDocument {
        ResultDocument {
            spec_hash: hash,
            task: self.spec.task.kind,
            mode: self.spec.arithmetic.mode,
            semigroup: describe_window(&self.spec.semigroup, &self.window),
            window_elements: self.window.len(),
            roots: None,
            solutions: Vec::new(),
            skipped: Vec::new(),
            diagnostic: None,
            timing_ms: 0,
        }
    }

    fn rows(&self, g: &TruncatedFunction<S>) -> Vec<Row> {
        self.window
            .elements()
            .iter()
            .zip(g.values())
            .map(|(e, v)| Row {
                id: e.coords().id_strings(),
                coords: e.coords().coord_strings(),
                size: e.size().to_string(),
                value: v.to_repr(),
            })
            .collect()
    }

    fn solution_doc(&self, label: String, anchor: Option<&S>, g: &TruncatedFunction<S>) -> SolutionDoc {
        SolutionDoc {
            label,
            anchor: anchor.map(Scalar::to_repr),
            rows: self.rows(g),
            residual: None,
            certificate: None,
            validation: None,
            series: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn series_docs(&self, g: &TruncatedFunction<S>, cert: Option<&NormCertificate>) -> Result<Vec<SeriesDoc>, CliError> {
        let mut out = Vec::with_capacity(self.points.len());
        for s in &self.points {
            let v = evaluate(g, s)?;
            let (tail, note) = match cert.map(|c| tail_bound(g, c, s)) {
                None => (None, None),
                Some(Ok(t)) => (Some(t), None),
                Some(Err(e @ (Error::OutOfHalfPlane { .. } | Error::TailUnavailable(_)))) => (None, Some(e.to_string())),
                Some(Err(e)) => return Err(e.into()),
            };
            out.push(SeriesDoc {
                s: s.iter().copied().map(ComplexDoc::from).collect(),
                value: v.value.into(),
                terms: v.terms,
                tail_bound: tail,
                note,
            });
        }
        Ok(out)
    }

    fn coefficients(&self) -> Result<(ConvPolynomial<S>, bool), CliError> {
        let eq = self
            .spec
            .equation
            .as_ref()
            .ok_or_else(|| CliError::invalid("equation", "required for this task"))?;
        if eq.coefficients.len() < 2 {
            return Err(CliError::invalid(
                "equation.coefficients",
                "need a_0, …, a_d with d >= 1 (at least two entries)",
            ));
        }
        let mut coeffs = Vec::with_capacity(eq.coefficients.len());
        let mut finite = true;
        for (j, c) in eq.coefficients.iter().enumerate() {
            let (f, fin) = build_function::<S>(c, &self.window, self.base, &format!("equation.coefficients[{j}]"))?;
            finite &= fin;
            coeffs.push(f);
        }
        let poly = ConvPolynomial::new(coeffs).map_err(|e| CliError::invalid("equation.coefficients", e.to_string()))?;
        Ok((poly, finite))
    }

    fn norm_input(&self, finite: bool, degree: usize) -> Result<NormInput, CliError> {
        match &self.spec.task.norm_bounds {
            Some(b) => {
                if b.len() != degree + 1 {
                    return Err(CliError::invalid("task.norm_bounds", format!("expected {} bounds", degree + 1)));
                }
                let v = b
                    .iter()
                    .enumerate()
                    .map(|(j, n)| {
                        let f = format!("task.norm_bounds[{j}]");
                        n.rational(&f)?
                            .to_f64()
                            .map(crate::rounding::next_up)
                            .ok_or_else(|| CliError::invalid(f, "out of range"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(NormInput::UserBounds(v))
            }
            None if finite => Ok(NormInput::WindowSupported),
            None => Ok(NormInput::WindowOnly),
        }
    }

    fn rho(&self) -> Result<f64, CliError> {
        match &self.spec.task.rho {
            None => Ok(0.0),
            Some(n) => {
                let q = n.rational("task.rho")?;
                let v = crate::rounding::Enclosure::from_rational(&q).hi;
                if v < 0.0 {
                    return Err(CliError::invalid("task.rho", "must be non-negative"));
                }
                Ok(v)
            }
        }
    }

    fn run(self, hash: String) -> Result<ResultDocument, CliError> {
        let mut doc = self.document(hash);
        let kind = self.spec.task.kind;
        if kind == TaskKind::Invert || (kind == TaskKind::Eval && self.spec.task.function.is_some()) {
            self.run_function(&mut doc)?;
            return Ok(doc);
        }
        let (poly, finite) = self.coefficients()?;
        let report = match initial_polynomial(&poly) {
            Ok(r) => r,
            Err(e) if is_refusal(&e) => {
                doc.diagnostic = Some(diagnostic(&e));
                return Ok(doc);
            }
            Err(e) => return Err(e.into()),
        };
        doc.roots = Some(RootsDoc {
            degree: report.degree,
            coefficients: poly.initial_coefficients().iter().map(Scalar::to_repr).collect(),
            roots: report
                .roots
                .iter()
                .map(|r| RootDoc {
                    approx: r.approx.into(),
                    multiplicity: r.multiplicity,
                    simple: r.simple,
                    exact: if S::EXACT { r.anchor.as_ref().map(Scalar::to_repr) } else { None },
                })
                .collect(),
        });

        let root = self.spec.task.root.as_ref().filter(|r| !r.is_all());
        if kind == TaskKind::Solve && root.is_none() && self.spec.task.root.is_none() {
            return Err(CliError::invalid("task.root", "solve needs an anchor value or \"all\""));
        }
        let solutions: Vec<(S, TruncatedFunction<S>)> = match root {
            Some(r) => {
                let z0 = r.scalar::<S>("task.root")?;
                match solve(&poly, &z0) {
                    Ok(g) => vec![(z0, g)],
                    Err(e) if is_refusal(&e) => {
                        doc.diagnostic = Some(diagnostic(&e));
                        return Ok(doc);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            None => match solve_all(&poly) {
                Ok(all) => {
                    doc.skipped = all
                        .skipped
                        .iter()
                        .map(|s| SkippedDoc {
                            root: s.root.into(),
                            multiplicity: s.multiplicity,
                            reason: s.reason.clone(),
                        })
                        .collect();
                    all.solutions
                }
                Err(e) if is_refusal(&e) => {
                    doc.diagnostic = Some(diagnostic(&e));
                    return Ok(doc);
                }
                Err(e) => return Err(e.into()),
            },
        };

        let wants_cert = matches!(kind, TaskKind::Certify | TaskKind::Verify);
        let norm_input = self.norm_input(finite, poly.degree())?;
        let rho = self.rho()?;
        for (n, (z0, g)) in solutions.iter().enumerate() {
            let mut sd = self.solution_doc(format!("g{}", n + 1), Some(z0), g);
            let res = residual(&poly, g)?;
            let scale = residual_scale(&poly, g)?;
            let max_abs = res.max_abs();
            sd.residual = Some(ResidualDoc {
                max_abs,
                scale,
                tolerance: if S::EXACT { 0.0 } else { self.tolerance * scale },
                passed: if S::EXACT { res.is_zero() } else { max_abs <= self.tolerance * scale },
            });
            let mut cert = None;
            if wants_cert {
                match certify(&poly, z0, rho, &norm_input) {
                    Ok(c) => {
                        let v = validate(&c, g)?;
                        sd.validation = Some(ValidationDoc {
                            levels: v.levels,
                            max_partial_sum: v.max_partial_sum,
                            bound_margin: v.bound_margin,
                            recursion_margin: v.recursion_margin.is_finite().then_some(v.recursion_margin),
                        });
                        sd.certificate = Some(CertificateDoc::from(&c));
                        cert = Some(c);
                    }
                    // verification can proceed on window bounds alone
                    Err(Error::NoPositiveR) if kind == TaskKind::Verify => {}
                    Err(e) if is_refusal(&e) => doc.diagnostic = Some(diagnostic(&e)),
                    Err(e) => return Err(e.into()),
                }
            }
            if matches!(kind, TaskKind::Eval | TaskKind::Verify | TaskKind::Certify) {
                sd.series = self.series_docs(g, cert.as_ref())?;
            }
            if kind == TaskKind::Verify {
                if self.points.is_empty() {
                    return Err(CliError::invalid("task.points", "verify needs at least one evaluation point"));
                }
                let report = verify_scalar_equation(&poly, g, cert.as_ref(), &self.points)?;
                sd.checks = report
                    .points
                    .iter()
                    .map(|p| CheckDoc {
                        s: p.s.iter().copied().map(ComplexDoc::from).collect(),
                        defect: p.defect,
                        bound: p.bound,
                        route: p.route,
                        passed: p.passed,
                    })
                    .collect();
            }
            doc.solutions.push(sd);
        }
        Ok(doc)
    }

    fn run_function(&self, doc: &mut ResultDocument) -> Result<(), CliError> {
        let fspec = self
            .spec
            .task
            .function
            .as_ref()
            .ok_or_else(|| CliError::invalid("task.function", "required for invert"))?;
        let (f, _) = build_function::<S>(fspec, &self.window, self.base, "task.function")?;
        if self.spec.task.kind == TaskKind::Eval {
            let mut sd = self.solution_doc("f".into(), None, &f);
            sd.series = self.series_docs(&f, None)?;
            doc.solutions.push(sd);
            return Ok(());
        }
        let inv = match f.invert_with_tolerance(self.tolerance) {
            Ok(inv) => inv,
            Err(e) if is_refusal(&e) => {
                doc.diagnostic = Some(diagnostic(&e));
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        };
        let mut sd = self.solution_doc("inverse".into(), None, &inv);
        let res = f.convolve(&inv)?.try_sub(&TruncatedFunction::unit(&self.window))?;
        let scale = f.to_approx().max_abs() * inv.to_approx().max_abs();
        sd.residual = Some(ResidualDoc {
            max_abs: res.max_abs(),
            scale,
            tolerance: if S::EXACT { 0.0 } else { self.tolerance * scale.max(1.0) },
            passed: if S::EXACT { res.is_zero() } else { res.max_abs() <= self.tolerance * scale.max(1.0) },
        });
        sd.series = self.series_docs(&inv, None)?;
        doc.solutions.push(sd);
        Ok(())
    }
}

// --------------------------------------------------------------- rendering

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected table or json)")),
        }
    }
}

pub fn render(doc: &ResultDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
            s.push('\n');
            s
        }
        Format::Table => render_table(doc),
    }
}

/// Inverse of JSON rendering.
pub fn parse_document(text: &str) -> Result<ResultDocument, CliError> {
    parse_json(text, "document")
}

fn fmt_complex(z: &ComplexDoc) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn fmt_point(s: &[ComplexDoc]) -> String {
    let parts: Vec<String> = s.iter().map(fmt_complex).collect();
    format!("({})", parts.join(", "))
}

fn render_table(doc: &ResultDocument) -> String {
    let mut out = String::new();
    let mode = match doc.mode {
        Mode::Exact => "exact",
        Mode::Double => "double",
    };
    let _ = writeln!(out, "task       {} ({mode})", doc.task.name());
    let _ = writeln!(out, "semigroup  {}, {} elements", doc.semigroup, doc.window_elements);
    let _ = writeln!(out, "spec       sha256:{}", doc.spec_hash);
    if let Some(r) = &doc.roots {
        let coeffs: Vec<String> = r.coefficients.iter().map(fmt_repr).collect();
        let _ = writeln!(out, "f(z)       coefficients [{}], degree {}", coeffs.join(", "), r.degree);
        for root in &r.roots {
            let value = root.exact.as_ref().map(fmt_repr).unwrap_or_else(|| fmt_complex(&root.approx));
            let kind = if root.simple { "simple".to_string() } else { format!("multiplicity {}", root.multiplicity) };
            let _ = writeln!(out, "  root     {value} ({kind})");
        }
    }
    for s in &doc.skipped {
        let _ = writeln!(out, "skipped    {}: {}", fmt_complex(&s.root), s.reason);
    }
    for sol in &doc.solutions {
        out.push('\n');
        match &sol.anchor {
            Some(a) => {
                let _ = writeln!(out, "[{}]  g(0) = {}", sol.label, fmt_repr(a));
            }
            None => {
                let _ = writeln!(out, "[{}]", sol.label);
            }
        }
        let ids: Vec<String> = sol.rows.iter().map(|r| format!("({})", r.id.join(","))).collect();
        let w_id = ids.iter().map(String::len).max().unwrap_or(0).max(7);
        let w_size = sol.rows.iter().map(|r| r.size.len()).max().unwrap_or(0).max(4);
        let _ = writeln!(out, "  {:<w_id$}  {:<w_size$}  value", "element", "size");
        for (id, row) in ids.iter().zip(&sol.rows) {
            let _ = writeln!(out, "  {id:<w_id$}  {:<w_size$}  {}", row.size, fmt_repr(&row.value));
        }
        if let Some(r) = &sol.residual {
            let verdict = if r.passed { "ok" } else { "FAILED" };
            let _ = writeln!(
                out,
                "  residual     max |T g| = {:e}, scale {:e}, tolerance {:e}: {verdict}",
                r.max_abs, r.scale, r.tolerance
            );
        }
        if let Some(c) = &sol.certificate {
            let _ = writeln!(
                out,
                "  certificate  rho = {}, m1 = {}, z0 = {}, t* = {:e}, C = {}, r = {}, scope = {}",
                c.rho,
                c.m1,
                fmt_repr(&c.z0),
                c.t_star,
                c.c,
                c.r,
                serde_json::to_value(c.scope).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
            );
            let _ = writeln!(out, "               ||g||_r <= {:e}", c.norm_bound);
        }
        if let Some(v) = &sol.validation {
            let _ = writeln!(
                out,
                "  validation   {} levels, max S_r = {:e}, margin to t* = {:e}",
                v.levels, v.max_partial_sum, v.bound_margin
            );
        }
        for s in &sol.series {
            let tail = match (&s.tail_bound, &s.note) {
                (Some(t), _) => format!(", tail <= {t:e}"),
                (None, Some(n)) => format!(", no tail bound: {n}"),
                (None, None) => String::new(),
            };
            let _ = writeln!(out, "  series       s = {}: {}{tail}", fmt_point(&s.s), fmt_complex(&s.value));
        }
        for c in &sol.checks {
            let route = match c.route {
                BoundRoute::Certificate => "certificate",
                BoundRoute::WindowDefect => "window defect",
            };
            let verdict = if c.passed { "ok" } else { "FAILED" };
            let _ = writeln!(
                out,
                "  equation     s = {}: |E| = {:e} <= {:e} ({route}): {verdict}",
                fmt_point(&c.s),
                c.defect,
                c.bound
            );
        }
    }
    if let Some(d) = &doc.diagnostic {
        out.push('\n');
        let _ = writeln!(out, "refused    {}: {}", d.kind, d.message);
        for o in &d.obstructions {
            let _ = writeln!(
                out,
                "  obstruction  g(0) = {}: (T g){} = {} for every g",
                fmt_repr(&o.root),
                o.element,
                fmt_repr(&o.value)
            );
        }
    }
    let _ = writeln!(out, "\ntime       {} ms", doc.timing_ms);
    out
}
