//! JSON documents exchanged by the command-line tool.
//!
//! Every document is `{"version": "1", "kind": ..., "payload": ...}`. Numbers
//! are strings: decimal floats (`"0.5"`, `"1e-3"`), rationals (`"p/q"`), or
//! quadratic records `{"a": "p/q", "b": "p/q", "d": 5}` for `a + b sqrt(d)`.
//! Exact fields never accept binary JSON floats. Matrices are row-major
//! arrays of rows. Permutations are zero-based image lists.
//!
//! Decoding yields plain specs (`SystemSpec`, `PairSpec`, ...) whose `build`
//! methods run the library checks, so malformed input and domain failures
//! stay distinguishable.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classify::{
    Automorphism, Certification, ClassifyError, CommensurabilityRecord, CommonSublattice, EquivalenceCheck, Method,
    Permutation, Verdict,
};
use crate::exact::{ExactMatrix, ExactScalar, IntLattice, IntMatrix, Intersection};
use crate::group::{DiagSystem, GroupElement, Precision, SystemError};
use crate::lattice::{CompatiblePair, LatticeElement, LatticeError, Presentation, Reduction};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    System,
    Pair,
    LatticeElement,
    GroupElement,
    Automorphism,
    Decision,
    Matrix,
    Reduction,
    Presentation,
    Sublattice,
    Permutations,
    Error,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serde_json::to_value(self) {
            Ok(Value::String(s)) => f.write_str(&s),
            _ => write!(f, "{self:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unsupported format version {0:?}")]
    Version(String),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: Kind, found: Kind },
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
}

impl ParseError {
    pub fn name(&self) -> &'static str {
        "ParseError"
    }
}

fn field_err(field: &str, reason: impl Into<String>) -> ParseError {
    ParseError::Field { field: field.to_string(), reason: reason.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: String,
    pub kind: Kind,
    pub payload: Value,
}

impl Document {
    pub fn new(kind: Kind, payload: Value) -> Self {
        Document { version: FORMAT_VERSION.to_string(), kind, payload }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(ParseError::Version(doc.version));
        }
        Ok(doc)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents are plain JSON values")
    }

    pub fn expect_kind(&self, kind: Kind) -> Result<&Value, ParseError> {
        if self.kind == kind {
            Ok(&self.payload)
        } else {
            Err(ParseError::WrongKind { expected: kind, found: self.kind })
        }
    }
}

// ---------------------------------------------------------------- numbers

pub fn float_to_json(x: f64) -> Value {
    Value::String(format!("{x:?}"))
}

/// Exact value of a decimal string such as `-1.25e-3`, an integer, or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], i64::from_str(&s[i + 1..]).ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    let shift = exp - frac.len() as i64;
    if shift.abs() > 4000 {
        return None;
    }
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if shift >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -r } else { r })
}

fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn exact_to_json(x: &ExactScalar) -> Value {
    match x {
        ExactScalar::Quadratic(q) => json!({
            "a": rational_to_string(q.rational_part()),
            "b": rational_to_string(q.irrational_part()),
            "d": q.radicand(),
        }),
        other => Value::String(rational_to_string(&other.as_rational().expect("non-quadratic values are rational"))),
    }
}

pub fn exact_from_json(v: &Value, field: &str) -> Result<ExactScalar, ParseError> {
    match v {
        Value::String(s) => parse_rational(s)
            .map(ExactScalar::from_rational)
            .ok_or_else(|| field_err(field, format!("{s:?} is not an exact number"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(ExactScalar::from_int(BigInt::from_str(&n.to_string()).expect("JSON integer"))),
        Value::Number(_) => Err(field_err(field, "exact values must not be binary floats")),
        Value::Object(o) => {
            let part = |k: &str| -> Result<BigRational, ParseError> {
                let s = o.get(k).and_then(Value::as_str).ok_or_else(|| field_err(field, format!("missing string `{k}`")))?;
                parse_rational(s).ok_or_else(|| field_err(field, format!("{s:?} is not a rational")))
            };
            let d = o.get("d").and_then(Value::as_u64).ok_or_else(|| field_err(field, "missing integer `d`"))?;
            ExactScalar::quadratic(part("a")?, part("b")?, d).map_err(|e| field_err(field, e.to_string()))
        }
        _ => Err(field_err(field, "expected a number")),
    }
}

pub fn float_from_json(v: &Value, field: &str) -> Result<f64, ParseError> {
    match v {
        Value::String(s) => {
            if s.contains('/') {
                parse_rational(s)
                    .map(|r| ExactScalar::from_rational(r).to_f64())
                    .ok_or_else(|| field_err(field, format!("{s:?} is not a number")))
            } else {
                f64::from_str(s.trim()).map_err(|_| field_err(field, format!("{s:?} is not a number")))
            }
        }
        Value::Number(n) => n.as_f64().ok_or_else(|| field_err(field, "number out of range")),
        Value::Object(_) => Ok(exact_from_json(v, field)?.to_f64()),
        _ => Err(field_err(field, "expected a number")),
    }
}

fn int_from_json(v: &Value, field: &str) -> Result<BigInt, ParseError> {
    let s = match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(field_err(field, "expected an integer")),
    };
    BigInt::from_str(&s).map_err(|_| field_err(field, format!("{s:?} is not an integer")))
}

fn i64_from_json(v: &Value, field: &str) -> Result<i64, ParseError> {
    let b = int_from_json(v, field)?;
    i64::try_from(&b).map_err(|_| field_err(field, format!("{b} does not fit in 64 bits")))
}

// ---------------------------------------------------------------- containers

fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value, ParseError> {
    obj.get(key).filter(|v| !v.is_null()).ok_or_else(|| field_err(key, "missing"))
}

fn opt<'a>(obj: &'a Value, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, ParseError> {
    v.as_array().ok_or_else(|| field_err(field, "expected an array"))
}

fn rows_of<T>(v: &Value, field: &str, mut cell: impl FnMut(&Value) -> Result<T, ParseError>) -> Result<(usize, usize, Vec<T>), ParseError> {
    let rows = array(v, field)?;
    if rows.is_empty() {
        return Err(field_err(field, "matrix has no rows"));
    }
    let mut cols = None;
    let mut data = Vec::new();
    for row in rows {
        let row = array(row, field)?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(field_err(field, "rows have different lengths"));
        }
        for x in row {
            data.push(cell(x)?);
        }
    }
    Ok((rows.len(), cols.unwrap_or(0), data))
}

pub fn matrix_to_json(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| float_to_json(m[(r, c)])).collect())).collect())
}

pub fn matrix_from_json(v: &Value, field: &str) -> Result<DMatrix<f64>, ParseError> {
    let (r, c, data) = rows_of(v, field, |x| float_from_json(x, field))?;
    Ok(DMatrix::from_row_slice(r, c, &data))
}

pub fn vector_to_json(v: &DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| float_to_json(x)).collect())
}

pub fn vector_from_json(v: &Value, field: &str) -> Result<DVector<f64>, ParseError> {
    let items = array(v, field)?.iter().map(|x| float_from_json(x, field)).collect::<Result<Vec<_>, _>>()?;
    Ok(DVector::from_vec(items))
}

pub fn exact_matrix_to_json(m: &ExactMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(exact_to_json).collect())).collect())
}

pub fn exact_matrix_from_json(v: &Value, field: &str) -> Result<ExactMatrix, ParseError> {
    let (r, c, data) = rows_of(v, field, |x| exact_from_json(x, field))?;
    ExactMatrix::new(r, c, data).map_err(|e| field_err(field, e.to_string()))
}

pub fn int_matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(|x| Value::String(x.to_string())).collect())).collect())
}

pub fn int_matrix_from_json(v: &Value, field: &str) -> Result<IntMatrix, ParseError> {
    let (r, c, data) = rows_of(v, field, |x| int_from_json(x, field))?;
    Ok(IntMatrix::new(r, c, data))
}

fn opt_json<T>(x: Option<&T>, f: impl Fn(&T) -> Value) -> Value {
    x.map(f).unwrap_or(Value::Null)
}

fn serde_field<T: for<'de> Deserialize<'de>>(v: &Value, field: &str) -> Result<T, ParseError> {
    T::deserialize(v).map_err(|e| field_err(field, e.to_string()))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

// ---------------------------------------------------------------- system

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub omega: DMatrix<f64>,
    pub precision: Precision,
}

impl SystemSpec {
    pub fn build(&self, tol: f64) -> Result<DiagSystem, SystemError> {
        Ok(DiagSystem::validate_with_tol(self.omega.clone(), tol)?.with_precision(self.precision))
    }
}

pub fn system_payload(sys: &DiagSystem) -> Value {
    json!({ "omega": matrix_to_json(sys.omega()), "precision": to_value(&sys.precision()) })
}

pub fn system_from_payload(v: &Value) -> Result<SystemSpec, ParseError> {
    let precision = match opt(v, "precision") {
        Some(p) => serde_field(p, "precision")?,
        None => Precision::Double,
    };
    Ok(SystemSpec { omega: matrix_from_json(get(v, "omega")?, "omega")?, precision })
}

// ---------------------------------------------------------------- pair

#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub system: SystemSpec,
    pub sigma: Option<DMatrix<f64>>,
    pub rho: Option<DMatrix<f64>>,
    /// Exact `σ` and diagonal multipliers `E_j`.
    pub exact: Option<(ExactMatrix, Vec<ExactMatrix>)>,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl PairSpec {
    /// Exact certification when exact data is present, floating-point
    /// verification at `tol` otherwise.
    pub fn build(&self, system_tol: f64, tol: f64) -> Result<CompatiblePair, BuildError> {
        let sys = self.system.build(system_tol)?;
        if let Some((sigma, mults)) = &self.exact {
            return Ok(CompatiblePair::verify_exact(&sys, sigma, mults)?);
        }
        match (&self.sigma, &self.rho) {
            (Some(sigma), Some(rho)) => Ok(CompatiblePair::verify(&sys, sigma, rho, tol)?),
            _ => Err(field_err("sigma", "a pair needs `sigma` and `rho`, or `exact`").into()),
        }
    }
}

pub fn pair_payload(pair: &CompatiblePair) -> Value {
    let mut v = json!({
        "system": system_payload(pair.sys()),
        "sigma": matrix_to_json(pair.sigma()),
        "rho": matrix_to_json(pair.rho()),
        "holonomy": pair.holonomy().iter().map(int_matrix_to_json).collect::<Vec<_>>(),
        "residual": float_to_json(pair.residual()),
    });
    if let Some(ex) = pair.exact() {
        v["exact"] = json!({
            "sigma": exact_matrix_to_json(&ex.sigma),
            "multipliers": ex.multipliers.iter().map(exact_matrix_to_json).collect::<Vec<_>>(),
        });
    }
    v
}

pub fn pair_from_payload(v: &Value) -> Result<PairSpec, ParseError> {
    let exact = match opt(v, "exact") {
        Some(ex) => {
            let sigma = exact_matrix_from_json(get(ex, "sigma")?, "exact.sigma")?;
            let mults = array(get(ex, "multipliers")?, "exact.multipliers")?
                .iter()
                .map(|m| exact_matrix_from_json(m, "exact.multipliers"))
                .collect::<Result<Vec<_>, _>>()?;
            Some((sigma, mults))
        }
        None => None,
    };
    Ok(PairSpec {
        system: system_from_payload(get(v, "system")?)?,
        sigma: opt(v, "sigma").map(|m| matrix_from_json(m, "sigma")).transpose()?,
        rho: opt(v, "rho").map(|m| matrix_from_json(m, "rho")).transpose()?,
        exact,
    })
}

// ---------------------------------------------------------------- elements

pub fn lattice_element_payload(e: &LatticeElement) -> Value {
    json!({
        "v": e.v.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "k": e.k.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    })
}

pub fn lattice_element_from_payload(v: &Value) -> Result<LatticeElement, ParseError> {
    let fv = array(get(v, "v")?, "v")?.iter().map(|x| int_from_json(x, "v")).collect::<Result<Vec<_>, _>>()?;
    let fk = array(get(v, "k")?, "k")?.iter().map(|x| i64_from_json(x, "k")).collect::<Result<Vec<_>, _>>()?;
    Ok(LatticeElement::new(fv, fk))
}

pub fn group_element_payload(g: &GroupElement) -> Value {
    json!({ "x": vector_to_json(&g.x), "t": vector_to_json(&g.t) })
}

pub fn group_element_from_payload(v: &Value) -> Result<GroupElement, ParseError> {
    Ok(GroupElement::new(vector_from_json(get(v, "x")?, "x")?, vector_from_json(get(v, "t")?, "t")?))
}

pub fn reduction_payload(r: &Reduction) -> Value {
    json!({
        "gamma": lattice_element_payload(&r.gamma),
        "r": group_element_payload(&r.r),
        "z": vector_to_json(&r.z),
        "y": vector_to_json(&r.y),
    })
}

pub fn reduction_from_payload(v: &Value) -> Result<Reduction, ParseError> {
    Ok(Reduction {
        gamma: lattice_element_from_payload(get(v, "gamma")?)?,
        r: group_element_from_payload(get(v, "r")?)?,
        z: vector_from_json(get(v, "z")?, "z")?,
        y: vector_from_json(get(v, "y")?, "y")?,
    })
}

// ---------------------------------------------------------------- automorphism

#[derive(Clone, Debug, PartialEq)]
pub struct AutomorphismSpec {
    pub system: SystemSpec,
    pub tau: Vec<usize>,
    pub c: Option<Vec<f64>>,
    pub exact_c: Option<Vec<ExactScalar>>,
    pub w: Option<DVector<f64>>,
    pub u: Option<DMatrix<f64>>,
}

impl AutomorphismSpec {
    /// Prefers exact scales and the translation vector `w`; falls back to
    /// the float scales and the matrix `U`.
    pub fn build(&self, system_tol: f64) -> Result<Automorphism, BuildError> {
        let sys = self.system.build(system_tol)?;
        let tau = Permutation::new(self.tau.clone())?;
        let zero_w = || DVector::zeros(sys.n());
        if let Some(c) = &self.exact_c {
            return match (&self.w, &self.u) {
                (None, Some(_)) => Err(field_err("u", "exact scales take a translation `w`, not `u`").into()),
                (w, _) => Ok(Automorphism::from_translation_exact(&sys, tau, c.clone(), w.clone().unwrap_or_else(zero_w))?),
            };
        }
        let c = self.c.clone().ok_or_else(|| field_err("c", "missing"))?;
        match (&self.w, &self.u) {
            (Some(w), _) => Ok(Automorphism::from_translation(&sys, tau, c, w.clone())?),
            (None, Some(u)) => Ok(Automorphism::build(&sys, tau, c, u.clone())?),
            (None, None) => Ok(Automorphism::from_translation(&sys, tau, c, zero_w())?),
        }
    }
}

pub fn automorphism_payload(phi: &Automorphism) -> Value {
    let mut v = json!({
        "system": system_payload(phi.sys()),
        "tau": phi.tau().images(),
        "c": phi.c().iter().map(|&x| float_to_json(x)).collect::<Vec<_>>(),
        "w": vector_to_json(phi.w()),
        "u": matrix_to_json(phi.u()),
        "delta": matrix_to_json(phi.delta()),
        "intertwining_residual": float_to_json(phi.intertwining_residual()),
    });
    if let Some(ec) = phi.exact_c() {
        v["exact_c"] = Value::Array(ec.iter().map(exact_to_json).collect());
    }
    v
}

pub fn automorphism_from_payload(v: &Value) -> Result<AutomorphismSpec, ParseError> {
    let tau = array(get(v, "tau")?, "tau")?
        .iter()
        .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| field_err("tau", "expected non-negative integers")))
        .collect::<Result<Vec<_>, _>>()?;
    let c = opt(v, "c")
        .map(|c| array(c, "c")?.iter().map(|x| float_from_json(x, "c")).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    let exact_c = opt(v, "exact_c")
        .map(|c| array(c, "exact_c")?.iter().map(|x| exact_from_json(x, "exact_c")).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    Ok(AutomorphismSpec {
        system: system_from_payload(get(v, "system")?)?,
        tau,
        c,
        exact_c,
        w: opt(v, "w").map(|w| vector_from_json(w, "w")).transpose()?,
        u: opt(v, "u").map(|u| matrix_from_json(u, "u")).transpose()?,
    })
}

pub fn permutations_payload(sys: &DiagSystem, perms: &[(Permutation, DMatrix<f64>)]) -> Value {
    json!({
        "system": system_payload(sys),
        "permutations": perms
            .iter()
            .map(|(tau, delta)| json!({ "tau": tau.images(), "delta": matrix_to_json(delta) }))
            .collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- decisions

#[derive(Clone, Debug, PartialEq)]
pub enum DecisionRecord {
    Equivalence { check: EquivalenceCheck, witness: Option<Automorphism> },
    /// The bounded search for an equivalence came back empty.
    EquivalenceNotFound { denom_bound: u64, radius: i64, tol: f64 },
    Commensurability(CommensurabilityRecord),
    Membership { element: Option<LatticeElement>, tol: f64 },
}

fn sign_to_json(s: Option<i32>) -> Value {
    s.map(Value::from).unwrap_or(Value::Null)
}

fn sign_from_json(v: Option<&Value>, field: &str) -> Result<Option<i32>, ParseError> {
    v.map(|x| x.as_i64().map(|s| s as i32).ok_or_else(|| field_err(field, "expected -1, 0 or 1"))).transpose()
}

pub fn decision_payload(d: &DecisionRecord) -> Value {
    match d {
        DecisionRecord::Equivalence { check, witness } => json!({
            "question": "equivalence",
            "decision": if check.equivalent { "equivalent" } else { "not-equivalent" },
            "equivalent": check.equivalent,
            "b": opt_json(check.b.as_ref(), int_matrix_to_json),
            "c": opt_json(check.c.as_ref(), int_matrix_to_json),
            "det_b_sign": sign_to_json(check.det_b_sign),
            "det_c_sign": sign_to_json(check.det_c_sign),
            "residual_b": float_to_json(check.residual_b),
            "residual_c": float_to_json(check.residual_c),
            "certification": to_value(&check.certification),
            "witness": opt_json(witness.as_ref(), automorphism_payload),
        }),
        DecisionRecord::EquivalenceNotFound { denom_bound, radius, tol } => json!({
            "question": "equivalence",
            "decision": "no-witness-at-bound",
            "equivalent": false,
            "denom_bound": denom_bound,
            "radius": radius,
            "certification": to_value(&Certification::Tolerance { tol: *tol, bound: Some(*denom_bound) }),
        }),
        DecisionRecord::Membership { element, tol } => json!({
            "question": "membership",
            "decision": if element.is_some() { "member" } else { "not-member" },
            "element": opt_json(element.as_ref(), lattice_element_payload),
            "certification": to_value(&Certification::Tolerance { tol: *tol, bound: None }),
        }),
        DecisionRecord::Commensurability(rec) => json!({
            "question": "commensurability",
            "decision": to_value(&rec.verdict),
            "method": to_value(&rec.method),
            "certification": to_value(&rec.certification),
            "bound": rec.bound,
            "q": opt_json(rec.q.as_ref(), exact_matrix_to_json),
            "r": opt_json(rec.r.as_ref(), exact_matrix_to_json),
            "ranks": rec.ranks.map(|(f, b)| json!([f, b])).unwrap_or(Value::Null),
            "note": rec.note,
        }),
    }
}

/// Decodes a decision; a witness automorphism is rebuilt and recertified.
pub fn decision_from_payload(v: &Value) -> Result<DecisionRecord, BuildError> {
    let question = get(v, "question")?.as_str().unwrap_or_default();
    match question {
        "equivalence" if get(v, "decision")?.as_str() == Some("no-witness-at-bound") => Ok(DecisionRecord::EquivalenceNotFound {
            denom_bound: get(v, "denom_bound")?.as_u64().ok_or_else(|| field_err("denom_bound", "expected an integer"))?,
            radius: get(v, "radius")?.as_i64().ok_or_else(|| field_err("radius", "expected an integer"))?,
            tol: match serde_field::<Certification>(get(v, "certification")?, "certification")? {
                Certification::Tolerance { tol, .. } => tol,
                Certification::Exact => return Err(field_err("certification", "a bounded search is not exact").into()),
            },
        }),
        "membership" => {
            let tol = match serde_field::<Certification>(get(v, "certification")?, "certification")? {
                Certification::Tolerance { tol, .. } => tol,
                Certification::Exact => return Err(field_err("certification", "membership is a tolerance decision").into()),
            };
            let element = opt(v, "element").map(lattice_element_from_payload).transpose()?;
            Ok(DecisionRecord::Membership { element, tol })
        }
        "equivalence" => {
            let equivalent = get(v, "equivalent")?.as_bool().ok_or_else(|| field_err("equivalent", "expected a boolean"))?;
            let check = EquivalenceCheck {
                equivalent,
                b: opt(v, "b").map(|m| int_matrix_from_json(m, "b")).transpose()?,
                c: opt(v, "c").map(|m| int_matrix_from_json(m, "c")).transpose()?,
                det_b_sign: sign_from_json(opt(v, "det_b_sign"), "det_b_sign")?,
                det_c_sign: sign_from_json(opt(v, "det_c_sign"), "det_c_sign")?,
                residual_b: float_from_json(get(v, "residual_b")?, "residual_b")?,
                residual_c: float_from_json(get(v, "residual_c")?, "residual_c")?,
                certification: serde_field::<Certification>(get(v, "certification")?, "certification")?,
            };
            let witness = match opt(v, "witness") {
                Some(w) => Some(automorphism_from_payload(w)?.build(crate::group::DEFAULT_GROUP_TOL)?),
                None => None,
            };
            Ok(DecisionRecord::Equivalence { check, witness })
        }
        "commensurability" => {
            let ranks = match opt(v, "ranks") {
                Some(r) => {
                    let r = array(r, "ranks")?;
                    let fiber = r.first().and_then(Value::as_u64).ok_or_else(|| field_err("ranks", "expected [fiber, base]"))?;
                    Some((fiber as usize, r.get(1).and_then(Value::as_u64).map(|b| b as usize)))
                }
                None => None,
            };
            Ok(DecisionRecord::Commensurability(CommensurabilityRecord {
                verdict: serde_field::<Verdict>(get(v, "decision")?, "decision")?,
                method: serde_field::<Method>(get(v, "method")?, "method")?,
                certification: serde_field::<Certification>(get(v, "certification")?, "certification")?,
                bound: get(v, "bound")?.as_u64().ok_or_else(|| field_err("bound", "expected an integer"))?,
                q: opt(v, "q").map(|m| exact_matrix_from_json(m, "q")).transpose()?,
                r: opt(v, "r").map(|m| exact_matrix_from_json(m, "r")).transpose()?,
                ranks,
                note: opt(v, "note").and_then(Value::as_str).map(str::to_string),
            }))
        }
        other => Err(field_err("question", format!("unknown question {other:?}")).into()),
    }
}

// ---------------------------------------------------------------- sublattice, presentation

fn intersection_payload(x: &Intersection) -> Value {
    json!({
        "basis": exact_matrix_to_json(x.lattice.basis()),
        "index_in_first": x.index_in_first.to_string(),
        "index_in_second": x.index_in_second.to_string(),
        "coords_first": int_matrix_to_json(&x.coords_first),
        "coords_second": int_matrix_to_json(&x.coords_second),
    })
}

fn intersection_from_payload(v: &Value, field: &str) -> Result<Intersection, ParseError> {
    let basis = exact_matrix_from_json(get(v, "basis")?, field)?;
    Ok(Intersection {
        lattice: IntLattice::new(basis).map_err(|e| field_err(field, e.to_string()))?,
        index_in_first: int_from_json(get(v, "index_in_first")?, field)?,
        index_in_second: int_from_json(get(v, "index_in_second")?, field)?,
        coords_first: int_matrix_from_json(get(v, "coords_first")?, field)?,
        coords_second: int_matrix_from_json(get(v, "coords_second")?, field)?,
    })
}

pub fn sublattice_payload(s: &CommonSublattice) -> Value {
    json!({
        "fiber": intersection_payload(&s.fiber),
        "base": intersection_payload(&s.base),
        "index_left": s.index_left.to_string(),
        "index_right": s.index_right.to_string(),
    })
}

pub fn sublattice_from_payload(v: &Value) -> Result<CommonSublattice, ParseError> {
    Ok(CommonSublattice {
        fiber: intersection_from_payload(get(v, "fiber")?, "fiber")?,
        base: intersection_from_payload(get(v, "base")?, "base")?,
        index_left: int_from_json(get(v, "index_left")?, "index_left")?,
        index_right: int_from_json(get(v, "index_right")?, "index_right")?,
    })
}

pub fn presentation_payload(p: &Presentation) -> Value {
    let mut v = to_value(p);
    v["text"] = Value::String(p.to_string());
    v
}

pub fn presentation_from_payload(v: &Value) -> Result<Presentation, ParseError> {
    serde_field(v, "presentation")
}

pub fn matrix_payload(m: &ExactMatrix) -> Value {
    json!({ "entries": exact_matrix_to_json(m) })
}

pub fn matrix_from_payload(v: &Value) -> Result<ExactMatrix, ParseError> {
    exact_matrix_from_json(get(v, "entries")?, "entries")
}

/// Structured report of a failed command.
pub fn error_payload(name: &str, message: &str, details: Value) -> Value {
    let mut m = Map::new();
    m.insert("error".into(), Value::String(name.to_string()));
    m.insert("message".into(), Value::String(message.to_string()));
    if !details.is_null() {
        m.insert("details".into(), details);
    }
    Value::Object(m)
}
