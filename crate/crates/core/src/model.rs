//! Reachability problems: representation, validation, classification and
//! the JSON problem document format.

use crate::algnum::{eigen_structure, format_rational, parse_rational, AMat, AlgReal, Mat, SpectralStructure};
use crate::ReachError;
use rug::Rational;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq)]
pub enum InputSet {
    /// `U = [-1, 1]^m`
    Hypercube,
    /// `U = {u}`
    Singleton(Vec<Rational>),
    /// `U = {0}`
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Horizon {
    Infinite,
    Bounded(AlgReal),
}

impl Horizon {
    pub fn tau(&self) -> Option<&AlgReal> {
        match self {
            Horizon::Infinite => None,
            Horizon::Bounded(t) => Some(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Point(Vec<AlgReal>),
    /// `{x : c^T x = d}`
    Hyperplane { c: Vec<AlgReal>, d: AlgReal },
    /// `{x : c^T x <= d}`
    Halfspace { c: Vec<AlgReal>, d: AlgReal },
    /// `{x : c^T x = d, |x_i| <= m}`
    BoxedHyperplane { c: Vec<AlgReal>, d: AlgReal, m: AlgReal },
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Point(y) => y.len(),
            Target::Hyperplane { c, .. } | Target::Halfspace { c, .. } | Target::BoxedHyperplane { c, .. } => c.len(),
        }
    }
}

/// A reachability query `x' = Ax + Bu`, `x(0) = 0`, `u(t) ∈ U`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachProblem {
    pub a: AMat,
    pub b: AMat,
    pub input_set: InputSet,
    pub horizon: Horizon,
    pub target: Option<Target>,
}

impl ReachProblem {
    pub fn new(a: AMat, b: AMat) -> Self {
        ReachProblem { a, b, input_set: InputSet::Hypercube, horizon: Horizon::Infinite, target: None }
    }

    pub fn with_target(mut self, t: Target) -> Self {
        self.target = Some(t);
        self
    }

    pub fn with_horizon(mut self, h: Horizon) -> Self {
        self.horizon = h;
        self
    }

    pub fn n(&self) -> usize {
        self.a.rows
    }

    pub fn m(&self) -> usize {
        self.b.cols
    }

    pub fn column(&self, j: usize) -> Vec<AlgReal> {
        self.b.col(j)
    }

    pub fn validate(&self) -> Result<(), ReachError> {
        let n = self.a.rows;
        if n == 0 {
            return Err(ReachError::Parse { field: "A".into(), msg: "matrix is empty".into() });
        }
        if !self.a.is_square() {
            return Err(ReachError::DimensionMismatch(format!("A is {}x{}, expected square", self.a.rows, self.a.cols)));
        }
        if self.b.rows != n {
            return Err(ReachError::DimensionMismatch(format!("B has {} rows, A has {}", self.b.rows, n)));
        }
        if let InputSet::Singleton(u) = &self.input_set {
            if u.len() != self.b.cols {
                return Err(ReachError::DimensionMismatch(format!(
                    "singleton input has {} entries, B has {} columns",
                    u.len(),
                    self.b.cols
                )));
            }
        }
        if let Horizon::Bounded(t) = &self.horizon {
            if t.signum() < 0 {
                return Err(ReachError::Parse { field: "horizon.tau".into(), msg: "must be nonnegative".into() });
            }
        }
        if let Some(t) = &self.target {
            if t.dim() != n {
                return Err(ReachError::DimensionMismatch(format!("target lives in dimension {}, system in {}", t.dim(), n)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SubclassTag {
    RationalMultipleSpectrum,
    TwoNonzeroEntries,
    SingleRealEigenvalue,
    RealSpectrum,
    Planar,
    PlanarComplex,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemClassification {
    pub spectral: SpectralStructure,
    /// Exact rank of `[b, Ab, ..., A^{n-1} b]` for each column.
    pub column_ranks: Vec<usize>,
    pub column_controllable: Vec<bool>,
    /// Rank of the full controllability matrix `[B, AB, ...]`.
    pub rank: usize,
    pub tags: BTreeSet<SubclassTag>,
}

impl ProblemClassification {
    pub fn has(&self, t: SubclassTag) -> bool {
        self.tags.contains(&t)
    }

    pub fn controllable(&self) -> bool {
        self.rank == self.spectral.n
    }
}

fn is_diagonal(a: &AMat) -> bool {
    (0..a.rows).all(|i| (0..a.cols).all(|j| i == j || a.get(i, j).is_zero()))
}

/// Whether all nonzero eigenvalues are rational multiples of one another.
fn rational_multiples(vals: &[AlgReal]) -> bool {
    let nz: Vec<&AlgReal> = vals.iter().filter(|v| !v.is_zero()).collect();
    if nz.len() <= 1 {
        return true;
    }
    nz.iter().skip(1).all(|v| v.div(nz[0]).is_rational())
}

/// Exact controllability ranks, spectral class and applicable subclass tags.
pub fn classify(p: &ReachProblem) -> Result<ProblemClassification, ReachError> {
    p.validate()?;
    let spectral = eigen_structure(&p.a)?;
    let n = p.n();
    let mut column_ranks = Vec::with_capacity(p.m());
    for j in 0..p.m() {
        column_ranks.push(crate::decomp::controllability_matrix(&p.a, &p.column(j)).1);
    }
    let column_controllable = column_ranks.iter().map(|&r| r == n).collect();
    let rank = crate::decomp::controllability_matrix_multi(&p.a, &p.b).1;
    let mut tags = BTreeSet::new();
    if spectral.real_spectrum {
        tags.insert(SubclassTag::RealSpectrum);
        let vals: Vec<AlgReal> = spectral.eigenvalues.iter().map(|e| e.re.clone()).collect();
        if spectral.is_diagonalizable() && rational_multiples(&vals) {
            tags.insert(SubclassTag::RationalMultipleSpectrum);
        }
        if spectral.eigenvalues.len() == 1 {
            tags.insert(SubclassTag::SingleRealEigenvalue);
        }
        if is_diagonal(&p.a) && (0..p.m()).all(|j| p.column(j).iter().filter(|x| !x.is_zero()).count() <= 2) {
            tags.insert(SubclassTag::TwoNonzeroEntries);
        }
    }
    if n == 2 {
        tags.insert(SubclassTag::Planar);
        if !spectral.real_spectrum {
            tags.insert(SubclassTag::PlanarComplex);
        }
    }
    Ok(ProblemClassification { spectral, column_ranks, column_controllable, rank, tags })
}

// ---------------------------------------------------------------------------
// Document format

fn perr(field: &str, msg: impl Into<String>) -> ReachError {
    ReachError::Parse { field: field.to_string(), msg: msg.into() }
}

fn alg_value(v: &Value, field: &str) -> Result<AlgReal, ReachError> {
    if v.is_number() {
        return Err(perr(field, format!("numeric literal {} not allowed; write rationals as strings \"p/q\"", v)));
    }
    serde_json::from_value::<AlgReal>(v.clone()).map_err(|e| perr(field, e.to_string()))
}

fn alg_vec(v: &Value, field: &str) -> Result<Vec<AlgReal>, ReachError> {
    let arr = v.as_array().ok_or_else(|| perr(field, "expected an array"))?;
    arr.iter().enumerate().map(|(i, x)| alg_value(x, &format!("{}[{}]", field, i))).collect()
}

fn rat_value(v: &Value, field: &str) -> Result<Rational, ReachError> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| perr(field, e)),
        _ => Err(perr(field, "expected a rational string \"p/q\"")),
    }
}

fn matrix(v: &Value, field: &str) -> Result<AMat, ReachError> {
    let rows = v.as_array().ok_or_else(|| perr(field, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(perr(field, "matrix is empty"));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let row = alg_vec(r, &format!("{}[{}]", field, i))?;
        out.push(row);
    }
    let c = out[0].len();
    if c == 0 {
        return Err(perr(field, "matrix has empty rows"));
    }
    if let Some((i, _)) = out.iter().enumerate().find(|(_, r)| r.len() != c) {
        return Err(ReachError::DimensionMismatch(format!("{}: row {} has a different length", field, i)));
    }
    Ok(Mat::from_rows(out))
}

fn target_from(v: &Value) -> Result<Target, ReachError> {
    let obj = v.as_object().ok_or_else(|| perr("target", "expected an object"))?;
    if obj.len() != 1 {
        return Err(perr("target", "expected exactly one of point, hyperplane, halfspace, boxed_hyperplane"));
    }
    let (k, body) = obj.iter().next().unwrap();
    match k.as_str() {
        "point" => Ok(Target::Point(alg_vec(body, "target.point")?)),
        "hyperplane" | "halfspace" | "boxed_hyperplane" => {
            let f = format!("target.{}", k);
            let c = alg_vec(body.get("c").ok_or_else(|| perr(&f, "missing c"))?, &format!("{}.c", f))?;
            let d = alg_value(body.get("d").ok_or_else(|| perr(&f, "missing d"))?, &format!("{}.d", f))?;
            Ok(match k.as_str() {
                "hyperplane" => Target::Hyperplane { c, d },
                "halfspace" => Target::Halfspace { c, d },
                _ => {
                    let m = alg_value(body.get("m").ok_or_else(|| perr(&f, "missing m"))?, &format!("{}.m", f))?;
                    Target::BoxedHyperplane { c, d, m }
                }
            })
        }
        other => Err(perr("target", format!("unknown target kind '{}'", other))),
    }
}

/// Parse a problem document. Input sets of the form `{"hypercube": "M"}`
/// describe `[-M, M]^m` and are normalized by scaling `B`.
pub fn parse_problem(text: &str) -> Result<ReachProblem, ReachError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| perr(&format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| perr("document", "expected a JSON object"))?;
    let a = matrix(obj.get("A").ok_or_else(|| perr("A", "missing"))?, "A")?;
    let mut b = matrix(obj.get("B").ok_or_else(|| perr("B", "missing"))?, "B")?;
    let input_set = match obj.get("input_set") {
        None => InputSet::Hypercube,
        Some(Value::String(s)) if s == "hypercube" => InputSet::Hypercube,
        Some(Value::String(s)) if s == "zero" => InputSet::Zero,
        Some(Value::Object(o)) if o.contains_key("singleton") => {
            let arr = o["singleton"].as_array().ok_or_else(|| perr("input_set.singleton", "expected an array"))?;
            let u: Result<Vec<Rational>, ReachError> =
                arr.iter().enumerate().map(|(i, x)| rat_value(x, &format!("input_set.singleton[{}]", i))).collect();
            InputSet::Singleton(u?)
        }
        Some(Value::Object(o)) if o.contains_key("hypercube") => {
            let m = alg_value(&o["hypercube"], "input_set.hypercube")?;
            if m.signum() <= 0 {
                return Err(perr("input_set.hypercube", "scale must be positive"));
            }
            b = b.scale(&m);
            InputSet::Hypercube
        }
        Some(other) => return Err(perr("input_set", format!("unrecognized input set {}", other))),
    };
    let horizon = match obj.get("horizon") {
        None => Horizon::Infinite,
        Some(Value::String(s)) if s == "inf" => Horizon::Infinite,
        Some(Value::Object(o)) if o.contains_key("tau") => Horizon::Bounded(alg_value(&o["tau"], "horizon.tau")?),
        Some(other) => return Err(perr("horizon", format!("expected \"inf\" or {{\"tau\": ...}}, got {}", other))),
    };
    let target = match obj.get("target") {
        None | Some(Value::Null) => None,
        Some(t) => Some(target_from(t)?),
    };
    let p = ReachProblem { a, b, input_set, horizon, target };
    p.validate()?;
    Ok(p)
}

fn alg_json(x: &AlgReal) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn vec_json(v: &[AlgReal]) -> Value {
    Value::Array(v.iter().map(alg_json).collect())
}

fn mat_json(m: &AMat) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_json(r)).collect())
}

/// Serialize to the problem document format (pretty-printed JSON).
pub fn serialize_problem(p: &ReachProblem) -> String {
    let mut o = serde_json::Map::new();
    o.insert("A".into(), mat_json(&p.a));
    o.insert("B".into(), mat_json(&p.b));
    o.insert(
        "input_set".into(),
        match &p.input_set {
            InputSet::Hypercube => Value::String("hypercube".into()),
            InputSet::Zero => Value::String("zero".into()),
            InputSet::Singleton(u) => serde_json::json!({
                "singleton": u.iter().map(|q| Value::String(format_rational(q))).collect::<Vec<_>>()
            }),
        },
    );
    o.insert(
        "horizon".into(),
        match &p.horizon {
            Horizon::Infinite => Value::String("inf".into()),
            Horizon::Bounded(t) => serde_json::json!({ "tau": alg_json(t) }),
        },
    );
    if let Some(t) = &p.target {
        let tv = match t {
            Target::Point(y) => serde_json::json!({ "point": vec_json(y) }),
            Target::Hyperplane { c, d } => serde_json::json!({ "hyperplane": { "c": vec_json(c), "d": alg_json(d) } }),
            Target::Halfspace { c, d } => serde_json::json!({ "halfspace": { "c": vec_json(c), "d": alg_json(d) } }),
            Target::BoxedHyperplane { c, d, m } => serde_json::json!({
                "boxed_hyperplane": { "c": vec_json(c), "d": alg_json(d), "m": alg_json(m) }
            }),
        };
        o.insert("target".into(), tv);
    }
    serde_json::to_string_pretty(&Value::Object(o)).expect("serializable")
}

/// Build an algebraic matrix from `(num, den)` pairs.
pub fn amat(rows: &[&[(i64, i64)]]) -> AMat {
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| AlgReal::frac(n, d)).collect()).collect())
}

/// Build an algebraic vector from `(num, den)` pairs.
pub fn avec(v: &[(i64, i64)]) -> Vec<AlgReal> {
    v.iter().map(|&(n, d)| AlgReal::frac(n, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
        "A": [["-1/2", "0"], ["0", "-1/3"]],
        "B": [["1", "-1"], ["1", "1"]],
        "input_set": "hypercube",
        "horizon": "inf",
        "target": {"point": ["4", "0"]}
    }"#;

    #[test]
    fn parse_diag() {
        let p = parse_problem(FIG1).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.m(), 2);
        assert_eq!(*p.a.get(0, 0), AlgReal::frac(-1, 2));
        let back = parse_problem(&serialize_problem(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_floats_and_empty() {
        assert!(parse_problem(r#"{"A": [[0.5]], "B": [["1"]]}"#).is_err());
        assert!(parse_problem(r#"{"A": [["0.5"]], "B": [["1"]]}"#).is_err());
        assert!(parse_problem(r#"{"A": [], "B": []}"#).is_err());
        assert!(matches!(
            parse_problem(r#"{"A": [["1","0"],["0","1"]], "B": [["1"]]}"#),
            Err(ReachError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn scaled_hypercube() {
        let p = parse_problem(r#"{"A": [["0","1"],["0","0"]], "B": [["0","0"],["0","1"]], "input_set": {"hypercube": "3"}}"#).unwrap();
        assert_eq!(*p.b.get(1, 1), AlgReal::from(3));
    }
}
