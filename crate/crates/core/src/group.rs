//! The ambient group `G = R^n ⋊ R^m` and its Lie algebra.
//!
//! `G` is determined by commuting traceless diagonal matrices
//! `Δ_1, ..., Δ_m`. Column `i` of the `n x m` matrix `Ω` holds the diagonal
//! of `Δ_i`, so that for `t ∈ R^m` the exponent of `η(t) = exp(t·Δ)` is the
//! vector `Ω t`. The product is `(x, t)(y, s) = (x + η(t) y, t + s)`.
//!
//! Everything here is binary64.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for identity checks in this module.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;

/// Below this magnitude `φ₁` is evaluated by its Taylor series.
pub const PHI1_SERIES_THRESHOLD: f64 = 1e-4;
pub const PHI1_SERIES_TERMS: usize = 8;

/// How the diagonal data was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Double,
    /// Exact diagonal multipliers `exp(Δ)` are known; the logarithms stored
    /// here are their binary64 images.
    ExactProvided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum SystemViolation {
    BadShape { n: usize, m: usize },
    NotTraceless { column: usize, sum: f64 },
    ZeroEntry { row: usize, column: usize },
    RepeatedEntryInColumn { column: usize, rows: (usize, usize) },
    RankDeficientOmega { rank: usize },
}

impl SystemViolation {
    pub fn name(&self) -> &'static str {
        match self {
            SystemViolation::BadShape { .. } => "BadShape",
            SystemViolation::NotTraceless { .. } => "NotTraceless",
            SystemViolation::ZeroEntry { .. } => "ZeroEntry",
            SystemViolation::RepeatedEntryInColumn { .. } => "RepeatedEntryInColumn",
            SystemViolation::RankDeficientOmega { .. } => "RankDeficientOmega",
        }
    }
}

/// Every constraint a candidate diagonal system violates.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("invalid diagonal system: {}", .0.iter().map(SystemViolation::name).collect::<Vec<_>>().join(", "))]
pub struct SystemError(pub Vec<SystemViolation>);

impl SystemError {
    pub fn names(&self) -> Vec<&'static str> {
        self.0.iter().map(SystemViolation::name).collect()
    }
}

/// A validated set of diagonal matrices `Δ_1..Δ_m` defining `G`.
///
/// Unimodularity of `G` (`|det Ad| = 1`) is implied by tracelessness and is
/// not checked separately.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagSystem {
    omega: DMatrix<f64>,
    precision: Precision,
}

impl DiagSystem {
    /// Validates `d` (`n x m`, column `i` = diagonal of `Δ_i`) at the default
    /// tolerance.
    pub fn validate(d: DMatrix<f64>) -> Result<Self, SystemError> {
        Self::validate_with_tol(d, DEFAULT_GROUP_TOL)
    }

    pub fn validate_with_tol(d: DMatrix<f64>, tol: f64) -> Result<Self, SystemError> {
        let (n, m) = d.shape();
        let mut violations = Vec::new();
        if n == 0 || m == 0 || m > n {
            violations.push(SystemViolation::BadShape { n, m });
            return Err(SystemError(violations));
        }
        for col in 0..m {
            let column = d.column(col);
            let scale = column.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let sum: f64 = column.iter().sum();
            if !(sum.abs() <= tol * scale) {
                violations.push(SystemViolation::NotTraceless { column: col, sum });
            }
        }
        for col in 0..m {
            for row in 0..n {
                if !(d[(row, col)].abs() > tol) {
                    violations.push(SystemViolation::ZeroEntry { row, column: col });
                }
            }
        }
        for col in 0..m {
            'pairs: for i in 0..n {
                for j in i + 1..n {
                    if (d[(i, col)] - d[(j, col)]).abs() <= tol {
                        violations.push(SystemViolation::RepeatedEntryInColumn { column: col, rows: (i, j) });
                        break 'pairs;
                    }
                }
            }
        }
        let rank = d.clone().svd(false, false).rank(tol * d.amax().max(1.0));
        if rank < m {
            violations.push(SystemViolation::RankDeficientOmega { rank });
        }
        if violations.is_empty() {
            Ok(DiagSystem { omega: d, precision: Precision::Double })
        } else {
            Err(SystemError(violations))
        }
    }

    /// Marks the system as backed by exact multipliers.
    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn n(&self) -> usize {
        self.omega.nrows()
    }

    pub fn m(&self) -> usize {
        self.omega.ncols()
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `d_j^{(i)}`: entry `j` of `Δ_i`.
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.omega[(j, i)]
    }

    /// Diagonal of `t·Δ`.
    pub fn exponent(&self, t: &DVector<f64>) -> DVector<f64> {
        assert_eq!(t.len(), self.m(), "t must have length m");
        &self.omega * t
    }

    /// Diagonal of `η(t) = exp(t·Δ)`.
    pub fn eta_diag(&self, t: &DVector<f64>) -> DVector<f64> {
        self.exponent(t).map(f64::exp)
    }

    /// `η(t)` as an `n x n` matrix.
    pub fn eta(&self, t: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.eta_diag(t))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(DVector::zeros(self.n()), DVector::zeros(self.m()))
    }

    fn check(&self, g: &GroupElement) {
        assert!(g.x.len() == self.n() && g.t.len() == self.m(), "element does not belong to this group");
    }

    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.check(g);
        self.check(h);
        let x = &g.x + self.eta_diag(&g.t).component_mul(&h.x);
        GroupElement::new(x, &g.t + &h.t)
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        self.check(g);
        let neg_t = -&g.t;
        let x = -self.eta_diag(&neg_t).component_mul(&g.x);
        GroupElement::new(x, neg_t)
    }

    /// `[(X,T),(Y,S)] = ((T·Δ)Y - (S·Δ)X, 0)`.
    pub fn bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let x = self.exponent(&a.t).component_mul(&b.x) - self.exponent(&b.t).component_mul(&a.x);
        AlgebraElement::new(x, DVector::zeros(self.m()))
    }

    /// `exp(X, T) = (φ₁(T·Δ) X, T)`.
    pub fn exp(&self, a: &AlgebraElement) -> GroupElement {
        let mu = self.exponent(&a.t);
        let x = mu.map(phi1).component_mul(&a.x);
        GroupElement::new(x, a.t.clone())
    }

    /// Inverse of [`DiagSystem::exp`].
    pub fn log(&self, g: &GroupElement) -> AlgebraElement {
        self.check(g);
        let mu = self.exponent(&g.t);
        let x = g.x.component_div(&mu.map(phi1));
        AlgebraElement::new(x, g.t.clone())
    }

    /// Upper-triangular `(n+1) x (n+1)` realization of `g`.
    pub fn embed_gl(&self, g: &GroupElement) -> DMatrix<f64> {
        self.check(g);
        let n = self.n();
        let diag = self.eta_diag(&g.t);
        let mut out = DMatrix::zeros(n + 1, n + 1);
        for j in 0..n {
            out[(j, j)] = diag[j];
            out[(j, n)] = g.x[j];
        }
        out[(n, n)] = 1.0;
        out
    }
}

/// `φ₁(μ) = (e^μ - 1)/μ`, with `φ₁(0) = 1`.
pub fn phi1(mu: f64) -> f64 {
    if mu.abs() < PHI1_SERIES_THRESHOLD {
        phi1_series(mu, PHI1_SERIES_TERMS)
    } else {
        phi1_closed(mu)
    }
}

pub fn phi1_closed(mu: f64) -> f64 {
    mu.exp_m1() / mu
}

/// `Σ_{k < terms} μ^k / (k+1)!`, Horner form.
pub fn phi1_series(mu: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in (0..terms).rev() {
        acc = 1.0 + acc * mu / (k as f64 + 2.0);
    }
    acc
}

/// A point `(x, t)` of `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub x: DVector<f64>,
    pub t: DVector<f64>,
}

impl GroupElement {
    pub fn new(x: DVector<f64>, t: DVector<f64>) -> Self {
        GroupElement { x, t }
    }

    pub fn from_slices(x: &[f64], t: &[f64]) -> Self {
        GroupElement::new(DVector::from_column_slice(x), DVector::from_column_slice(t))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.t.iter()).all(|v| v.is_finite())
    }

    /// Sup-norm distance over both components.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        let dx = (&self.x - &other.x).amax();
        let dt = if self.t.is_empty() { 0.0 } else { (&self.t - &other.t).amax() };
        dx.max(dt)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={:?}, t={:?})", self.x.as_slice(), self.t.as_slice())
    }
}

/// A Lie algebra element `(X, T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub x: DVector<f64>,
    pub t: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(x: DVector<f64>, t: DVector<f64>) -> Self {
        AlgebraElement { x, t }
    }

    pub fn from_slices(x: &[f64], t: &[f64]) -> Self {
        AlgebraElement::new(DVector::from_column_slice(x), DVector::from_column_slice(t))
    }

    pub fn scale(&self, s: f64) -> Self {
        AlgebraElement::new(&self.x * s, &self.t * s)
    }

    pub fn distance(&self, other: &AlgebraElement) -> f64 {
        let dx = (&self.x - &other.x).amax();
        let dt = if self.t.is_empty() { 0.0 } else { (&self.t - &other.t).amax() };
        dx.max(dt)
    }
}
