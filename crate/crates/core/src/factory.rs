//! Systems and compatible pairs built from commuting hyperbolic integer
//! matrices `A_1, .., A_m ∈ SL_n(Z)`: with `A_j = P exp(Δ_j) P⁻¹`, the pair
//! `(P, I_m)` is compatible and its holonomy is `A_1, .., A_m` again.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{quad_solve_char2, ExactError, ExactMatrix, ExactScalar, IntMatrix};
use crate::group::{DiagSystem, SystemError};
use crate::lattice::{CompatiblePair, LatticeError, DEFAULT_PAIR_TOL};

/// Relative spectral gap below which two eigenvalues count as equal.
pub const SPECTRAL_GAP_TOL: f64 = 1e-6;
/// Tolerance for `A_j p_i = λ_{j,i} p_i` on the shared eigenbasis.
pub const EIGENBASIS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactoryError {
    #[error("matrices {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("matrix {j} has determinant {det}")]
    DetNotOne { j: usize, det: BigInt },
    #[error("matrix {0} has a non-real or non-positive eigenvalue")]
    NonPositiveSpectrum(usize),
    #[error("matrix {0} has a repeated eigenvalue")]
    RepeatedEigenvalue(usize),
    #[error("matrix {0} has eigenvalue 1")]
    EigenvalueOne(usize),
    #[error("the eigenbasis of the first matrix does not diagonalize matrix {j} (residual {residual:e})")]
    SharedEigenbasisFailure { j: usize, residual: f64 },
    #[error("trace {trace} is at most 2")]
    NotHyperbolic { trace: i64 },
    #[error("k = {k}, l = {l} gives eigenvalue 1")]
    Degenerate { k: i64, l: i64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid system: {0:?}")]
    System(SystemError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl FactoryError {
    pub fn name(&self) -> &'static str {
        match self {
            FactoryError::NotCommuting(..) => "NotCommuting",
            FactoryError::DetNotOne { .. } => "DetNotOne",
            FactoryError::NonPositiveSpectrum(_) => "NonPositiveSpectrum",
            FactoryError::RepeatedEigenvalue(_) => "RepeatedEigenvalue",
            FactoryError::EigenvalueOne(_) => "EigenvalueOne",
            FactoryError::SharedEigenbasisFailure { .. } => "SharedEigenbasisFailure",
            FactoryError::NotHyperbolic { .. } => "NotHyperbolic",
            FactoryError::Degenerate { .. } => "Degenerate",
            FactoryError::Shape(_) => "Shape",
            FactoryError::System(_) => "SystemError",
            FactoryError::Lattice(e) => e.name(),
            FactoryError::Exact(e) => e.name(),
        }
    }
}

impl From<SystemError> for FactoryError {
    fn from(e: SystemError) -> Self {
        FactoryError::System(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HyperbolicChecks {
    pub commuting: bool,
    pub det_one: bool,
    pub positive_spectrum: bool,
    pub distinct_spectrum: bool,
}

/// Commuting matrices in `SL_n(Z)` with real, positive, distinct spectra
/// avoiding 1.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicInput {
    matrices: Vec<IntMatrix>,
    checks: HyperbolicChecks,
}

/// Eigenvalues sorted decreasingly, after checking they are real and
/// positive.
fn real_spectrum(j: usize, a: &IntMatrix) -> Result<Vec<f64>, FactoryError> {
    let af = a.to_f64();
    let scale = af.amax().max(1.0);
    let eig = af.complex_eigenvalues();
    let mut vals = Vec::with_capacity(eig.len());
    for z in eig.iter() {
        if z.im.abs() > 1e-9 * scale || z.re <= 0.0 {
            return Err(FactoryError::NonPositiveSpectrum(j));
        }
        vals.push(z.re);
    }
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

fn check_spectrum(j: usize, a: &IntMatrix) -> Result<Vec<f64>, FactoryError> {
    let vals = real_spectrum(j, a)?;
    if vals.windows(2).any(|w| (w[0] - w[1]) <= SPECTRAL_GAP_TOL * w[0].abs().max(1.0)) {
        return Err(FactoryError::RepeatedEigenvalue(j));
    }
    let shifted = a.add(&IntMatrix::identity(a.rows()).scale(&BigInt::from(-1)));
    if shifted.det().is_zero() {
        return Err(FactoryError::EigenvalueOne(j));
    }
    Ok(vals)
}

impl HyperbolicInput {
    pub fn new(matrices: Vec<IntMatrix>) -> Result<Self, FactoryError> {
        let n = matrices.first().map(IntMatrix::rows).ok_or_else(|| FactoryError::Shape("no matrices".into()))?;
        if matrices.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(FactoryError::Shape("matrices must be square of one size".into()));
        }
        for (j, a) in matrices.iter().enumerate() {
            let det = a.det();
            if !det.is_one() {
                return Err(FactoryError::DetNotOne { j, det });
            }
        }
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                if !matrices[i].commutes_with(&matrices[j]) {
                    return Err(FactoryError::NotCommuting(i, j));
                }
            }
        }
        for (j, a) in matrices.iter().enumerate() {
            check_spectrum(j, a)?;
        }
        let checks = HyperbolicChecks { commuting: true, det_one: true, positive_spectrum: true, distinct_spectrum: true };
        Ok(HyperbolicInput { matrices, checks })
    }

    /// Evaluates every check without failing.
    pub fn inspect(matrices: &[IntMatrix]) -> HyperbolicChecks {
        let commuting = (0..matrices.len())
            .all(|i| (i + 1..matrices.len()).all(|j| matrices[i].commutes_with(&matrices[j])));
        let det_one = matrices.iter().all(|a| a.is_square() && a.det().is_one());
        let positive_spectrum = matrices.iter().enumerate().all(|(j, a)| a.is_square() && real_spectrum(j, a).is_ok());
        let distinct_spectrum = matrices.iter().enumerate().all(|(j, a)| {
            a.is_square()
                && matches!(check_spectrum(j, a), Ok(_) | Err(FactoryError::EigenvalueOne(_)))
        });
        HyperbolicChecks { commuting, det_one, positive_spectrum, distinct_spectrum }
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.matrices
    }

    pub fn checks(&self) -> HyperbolicChecks {
        self.checks
    }
}

/// Output of [`from_hyperbolic`].
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicPair {
    pub sys: DiagSystem,
    pub pair: CompatiblePair,
    /// `λ_{j,i}` at `(i, j)`: eigenvalue of `A_j` on column `i` of `P`.
    pub eigenvalues: DMatrix<f64>,
}

/// Unit vector spanning the (numerical) kernel of `A - λI`, scaled to unit
/// sup-norm with a positive leading entry.
fn eigenvector(a: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = a.nrows();
    let shifted = a - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let k = svd.singular_values.imin();
    let mut v: DVector<f64> = v_t.row(k).transpose();
    let norm = v.amax();
    v /= norm;
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        v = -v;
    }
    v
}

/// `σ = P` from the eigendecomposition of `A_1`, `Δ_j = diag(ln λ_{j,i})`
/// and `ρ = I_m`, certified by [`CompatiblePair::verify`].
pub fn from_hyperbolic(input: &HyperbolicInput) -> Result<HyperbolicPair, FactoryError> {
    let mats = input.matrices();
    let (n, m) = (mats[0].rows(), mats.len());
    let lead = mats[0].to_f64();
    let vals = check_spectrum(0, &mats[0])?;
    let p = DMatrix::from_columns(&vals.iter().map(|&l| eigenvector(&lead, l)).collect::<Vec<_>>());

    let mut eigenvalues = DMatrix::zeros(n, m);
    for (j, a) in mats.iter().enumerate() {
        let af = a.to_f64();
        let scale = af.amax().max(1.0);
        for i in 0..n {
            let col = p.column(i);
            let image = &af * col;
            let lambda = image.dot(&col) / col.norm_squared();
            let residual = (image - col * lambda).amax() / scale;
            if residual > EIGENBASIS_TOL {
                return Err(FactoryError::SharedEigenbasisFailure { j, residual });
            }
            if lambda <= 0.0 {
                return Err(FactoryError::NonPositiveSpectrum(j));
            }
            eigenvalues[(i, j)] = lambda;
        }
    }
    let omega = eigenvalues.map(f64::ln);
    let sys = DiagSystem::validate_with_tol(omega, 1e-10)?;
    let pair = CompatiblePair::verify(&sys, &p, &DMatrix::identity(m, m), DEFAULT_PAIR_TOL)?;
    for (j, a) in mats.iter().enumerate() {
        if &pair.holonomy()[j] != a {
            return Err(FactoryError::SharedEigenbasisFailure { j, residual: pair.residual() });
        }
    }
    Ok(HyperbolicPair { sys, pair, eigenvalues })
}

/// Output of [`from_hyperbolic_exact_2d`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExactHyperbolicPair {
    pub sigma: ExactMatrix,
    pub multiplier: ExactMatrix,
    pub sys: DiagSystem,
    pub pair: CompatiblePair,
}

/// Exact eigen-data of a positive hyperbolic `A ∈ SL_2(Z)` over `Q(√d)`:
/// eigenvalues `λ_1 > λ_2` from the characteristic polynomial, eigenvector
/// columns `((λ - a_22)/a_21, 1)`, and the multiplier `diag(λ_1, λ_2)`.
pub fn from_hyperbolic_exact_2d(a: [[i64; 2]; 2]) -> Result<ExactHyperbolicPair, FactoryError> {
    let im = IntMatrix::from_rows_i64(&a);
    let det = im.det();
    if !det.is_one() {
        return Err(FactoryError::DetNotOne { j: 0, det });
    }
    let trace = a[0][0] + a[1][1];
    if trace <= 2 {
        return Err(FactoryError::NotHyperbolic { trace });
    }
    // trace > 2 with det 1 forces a_21 != 0, otherwise both diagonal entries are ±1
    let (hi, lo) = quad_solve_char2(a)?;
    let a11 = ExactScalar::from_i64(a[1][1]);
    let a10 = ExactScalar::from_i64(a[1][0]);
    let top = |l: &ExactScalar| l.checked_sub(&a11).and_then(|x| x.checked_div(&a10));
    let sigma = ExactMatrix::from_rows(vec![vec![top(&hi)?, top(&lo)?], vec![ExactScalar::one(), ExactScalar::one()]])?;
    let multiplier = ExactMatrix::diagonal(vec![hi.clone(), lo.clone()])?;
    let omega = DMatrix::from_column_slice(2, 1, &[hi.to_f64().ln(), lo.to_f64().ln()]);
    let sys = DiagSystem::validate_with_tol(omega, 1e-10)?;
    let pair = CompatiblePair::verify_exact(&sys, &sigma, std::slice::from_ref(&multiplier))?;
    Ok(ExactHyperbolicPair { sigma, multiplier, sys, pair })
}

/// `[[k²+1, 0, k], [0, 1, l], [k, l, l²+1]]`, which has determinant 1 and
/// avoids the eigenvalue 1 exactly when `kl ≠ 0`.
pub fn family_3d(k: i64, l: i64) -> Result<IntMatrix, FactoryError> {
    if k == 0 || l == 0 {
        return Err(FactoryError::Degenerate { k, l });
    }
    Ok(IntMatrix::from_rows_i64(&[[k * k + 1, 0, k], [0, 1, l], [k, l, l * l + 1]]))
}
