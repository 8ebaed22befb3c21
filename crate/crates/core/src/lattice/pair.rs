use nalgebra::{DMatrix, DVector};
use num_traits::One;

use super::LatticeError;
use crate::exact::{ExactMatrix, ExactScalar, IntMatrix};
use crate::group::DiagSystem;

pub const DEFAULT_PAIR_TOL: f64 = 1e-6;

/// Exact data behind a pair certified by [`CompatiblePair::verify_exact`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPairData {
    pub sigma: ExactMatrix,
    /// `E_j = exp(ρ^{(j)}·Δ)` as exact diagonal matrices.
    pub multipliers: Vec<ExactMatrix>,
}

/// A certified G-compatible pair together with its holonomy matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatiblePair {
    sys: DiagSystem,
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
    rho: DMatrix<f64>,
    rho_inv: DMatrix<f64>,
    holonomy: Vec<IntMatrix>,
    residual: f64,
    exact: Option<ExactPairData>,
}

fn sup_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn check_sl_and_commuting(holonomy: &[IntMatrix]) -> Result<(), LatticeError> {
    for (j, a) in holonomy.iter().enumerate() {
        let det = a.det();
        if !det.is_one() {
            return Err(LatticeError::DetNotOne { j, det });
        }
    }
    for i in 0..holonomy.len() {
        for j in i + 1..holonomy.len() {
            if !holonomy[i].commutes_with(&holonomy[j]) {
                return Err(LatticeError::NonCommuting(i, j));
            }
        }
    }
    Ok(())
}

fn invert(m: &DMatrix<f64>) -> Result<DMatrix<f64>, LatticeError> {
    let inv = m.clone().try_inverse().ok_or(LatticeError::Singular)?;
    if !inv.iter().all(|v| v.is_finite()) {
        return Err(LatticeError::Singular);
    }
    Ok(inv)
}

impl CompatiblePair {
    /// Floating-point certification: each `σ exp(ρ^{(j)}·Δ) σ⁻¹` must lie
    /// within `tol` of an integer matrix of determinant one, and the rounded
    /// matrices must commute.
    pub fn verify(sys: &DiagSystem, sigma: &DMatrix<f64>, rho: &DMatrix<f64>, tol: f64) -> Result<Self, LatticeError> {
        let (n, m) = (sys.n(), sys.m());
        if sigma.shape() != (n, n) || rho.shape() != (m, m) {
            return Err(LatticeError::Shape(format!(
                "sigma is {:?} and rho is {:?}, expected ({n}, {n}) and ({m}, {m})",
                sigma.shape(),
                rho.shape()
            )));
        }
        let sigma_inv = invert(sigma)?;
        let rho_inv = invert(rho)?;
        let mut holonomy = Vec::with_capacity(m);
        let mut residual = 0f64;
        for j in 0..m {
            let col: DVector<f64> = rho.column(j).into_owned();
            let mj = sigma * sys.eta(&col) * &sigma_inv;
            let aj = IntMatrix::round_from(&mj).ok_or(LatticeError::NotNearInteger { j, residual: f64::INFINITY })?;
            let r = sup_norm(&(&mj - aj.to_f64()));
            if !(r <= tol) {
                return Err(LatticeError::NotNearInteger { j, residual: r });
            }
            residual = residual.max(r);
            holonomy.push(aj);
        }
        check_sl_and_commuting(&holonomy)?;
        Ok(CompatiblePair {
            sys: sys.clone(),
            sigma: sigma.clone(),
            sigma_inv,
            rho: rho.clone(),
            rho_inv,
            holonomy,
            residual,
            exact: None,
        })
    }

    /// Exact certification from `σ` and the diagonal multipliers
    /// `E_j = exp(ρ^{(j)}·Δ)`. The holonomy `σ E_j σ⁻¹` is computed in exact
    /// arithmetic; `ρ` is recovered from `ln E_j` and must reproduce the
    /// multipliers through `Δ` to within `1e-6`.
    pub fn verify_exact(sys: &DiagSystem, sigma: &ExactMatrix, multipliers: &[ExactMatrix]) -> Result<Self, LatticeError> {
        let (n, m) = (sys.n(), sys.m());
        if sigma.rows() != n || sigma.cols() != n || multipliers.len() != m {
            return Err(LatticeError::Shape(format!(
                "sigma is {}x{} with {} multipliers, expected {n}x{n} with {m}",
                sigma.rows(),
                sigma.cols(),
                multipliers.len()
            )));
        }
        let sigma_inv = sigma.inverse().map_err(|_| LatticeError::Singular)?;
        let omega = sys.omega();
        let omega_pinv = (omega.transpose() * omega)
            .try_inverse()
            .ok_or(LatticeError::Singular)?
            * omega.transpose();
        let mut rho = DMatrix::zeros(m, m);
        let mut holonomy = Vec::with_capacity(m);
        for (j, e) in multipliers.iter().enumerate() {
            check_multiplier(j, e, n)?;
            let logs = DVector::from_iterator(n, (0..n).map(|i| e.get(i, i).to_f64().ln()));
            let col = &omega_pinv * &logs;
            let mismatch = (omega * &col - &logs).amax();
            if mismatch > 1e-6 * (1.0 + logs.amax()) {
                return Err(LatticeError::BadMultiplier {
                    j,
                    reason: format!("ln E_{j} is not in the column space of the system ({mismatch:e})"),
                });
            }
            rho.set_column(j, &col);
            let a = sigma.mul(e)?.mul(&sigma_inv)?;
            if let Some(position) = a.first_non_integer() {
                return Err(LatticeError::NotInteger { j, position });
            }
            holonomy.push(a.to_int().expect("integrality checked"));
        }
        check_sl_and_commuting(&holonomy)?;
        let rho_inv = invert(&rho)?;
        let sigma_f = sigma.to_f64();
        Ok(CompatiblePair {
            sys: sys.clone(),
            sigma_inv: invert(&sigma_f)?,
            sigma: sigma_f,
            rho,
            rho_inv,
            holonomy,
            residual: 0.0,
            exact: Some(ExactPairData { sigma: sigma.clone(), multipliers: multipliers.to_vec() }),
        })
    }

    /// The pair `(λσ, qρ)`, recertified.
    pub fn scaled(&self, lambda: f64, q: i64, tol: f64) -> Result<Self, LatticeError> {
        let sigma = &self.sigma * lambda;
        let rho = &self.rho * q as f64;
        CompatiblePair::verify(&self.sys, &sigma, &rho, tol)
    }

    /// Exact version of [`scaled`](Self::scaled); requires exact data.
    pub fn scaled_exact(&self, lambda: &ExactScalar, q: i64) -> Result<Self, LatticeError> {
        let ex = self
            .exact
            .as_ref()
            .ok_or_else(|| LatticeError::Shape("pair has no exact data".into()))?;
        let sigma = ex.sigma.scale(lambda)?;
        let mults = ex.multipliers.iter().map(|e| e.pow(q)).collect::<Result<Vec<_>, _>>()?;
        CompatiblePair::verify_exact(&self.sys, &sigma, &mults)
    }

    pub fn sys(&self) -> &DiagSystem {
        &self.sys
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn rho_inv(&self) -> &DMatrix<f64> {
        &self.rho_inv
    }

    pub fn holonomy(&self) -> &[IntMatrix] {
        &self.holonomy
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn exact(&self) -> Option<&ExactPairData> {
        self.exact.as_ref()
    }

    pub fn n(&self) -> usize {
        self.sys.n()
    }

    pub fn m(&self) -> usize {
        self.sys.m()
    }
}

fn check_multiplier(j: usize, e: &ExactMatrix, n: usize) -> Result<(), LatticeError> {
    let bad = |reason: &str| LatticeError::BadMultiplier { j, reason: reason.to_string() };
    if e.rows() != n || e.cols() != n || !e.is_diagonal() {
        return Err(bad("not an n x n diagonal matrix"));
    }
    let diag: Vec<&ExactScalar> = (0..n).map(|i| e.get(i, i)).collect();
    if diag.iter().any(|x| x.signum() <= 0) {
        return Err(bad("entries must be positive"));
    }
    for a in 0..n {
        for b in a + 1..n {
            if diag[a] == diag[b] {
                return Err(bad("entries must be distinct"));
            }
        }
    }
    if !e.det()?.is_one() {
        return Err(bad("determinant must be 1"));
    }
    Ok(())
}

