use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::perm::{delta_of, Permutation};
use super::ClassifyError;
use crate::exact::ExactScalar;
use crate::group::{phi1, DiagSystem, GroupElement};

/// Number of random base vectors used to certify `α η(t) = η(δt) α`.
pub const INTERTWINING_SAMPLES: usize = 100;
pub const INTERTWINING_TOL: f64 = 1e-9;
const INTERTWINING_SEED: u64 = 0x5eed;

/// An automorphism `φ(x, t) = (α x + β(t), δ t)` of `G`.
///
/// `α ε_i = c_i ε_{τ⁻¹(i)}` and `β(t) = φ₁((δt)·Δ) U t`. The map `β` is a
/// cocycle exactly when `β(t) = (η(δt) - I) w` for a vector `w`, which in
/// terms of `U` reads `U_{j,k} = w_j Ω_{τ(j),k}`; both forms are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    sys: DiagSystem,
    tau: Permutation,
    c: Vec<f64>,
    exact_c: Option<Vec<ExactScalar>>,
    delta: DMatrix<f64>,
    u: DMatrix<f64>,
    w: DVector<f64>,
    intertwining_residual: f64,
}

fn u_from_w(sys: &DiagSystem, tau: &Permutation, w: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(sys.n(), sys.m(), |j, k| w[j] * sys.omega()[(tau.apply(j), k)])
}

impl Automorphism {
    /// Assembles `(τ, c, δ_τ, U)` and certifies the intertwining relation on
    /// random base vectors.
    pub fn build(sys: &DiagSystem, tau: Permutation, c: Vec<f64>, u: DMatrix<f64>) -> Result<Self, ClassifyError> {
        let (n, m) = (sys.n(), sys.m());
        let delta = delta_of(sys, &tau)?;
        if c.len() != n {
            return Err(ClassifyError::Shape(format!("{} scales for dimension {n}", c.len())));
        }
        if let Some(i) = c.iter().position(|&ci| ci == 0.0 || !ci.is_finite()) {
            return Err(ClassifyError::ZeroScale(i));
        }
        if u.shape() != (n, m) {
            return Err(ClassifyError::Shape(format!("U is {:?}, expected ({n}, {m})", u.shape())));
        }
        let omega = sys.omega();
        let mut w = DVector::zeros(n);
        for j in 0..n {
            let target = omega.row(tau.apply(j));
            let wj = u.row(j).dot(&target) / target.norm_squared();
            let miss = (u.row(j) - target * wj).amax();
            if miss > 1e-9 * (1.0 + u.row(j).amax()) {
                return Err(ClassifyError::NonCocycle(j));
            }
            w[j] = wj;
        }
        let mut phi = Automorphism { sys: sys.clone(), tau, c, exact_c: None, delta, u, w, intertwining_residual: 0.0 };
        phi.certify()?;
        Ok(phi)
    }

    /// The automorphism with `β(t) = (η(δt) - I) w`.
    pub fn from_translation(sys: &DiagSystem, tau: Permutation, c: Vec<f64>, w: DVector<f64>) -> Result<Self, ClassifyError> {
        if w.len() != sys.n() {
            return Err(ClassifyError::Shape(format!("w has length {}, expected {}", w.len(), sys.n())));
        }
        let u = u_from_w(sys, &tau, &w);
        let mut phi = Automorphism::build(sys, tau, c, u)?;
        phi.w = w;
        Ok(phi)
    }

    /// `β = 0` with exactly known scales `c_i`.
    pub fn with_exact_scales(sys: &DiagSystem, tau: Permutation, c: Vec<ExactScalar>) -> Result<Self, ClassifyError> {
        Automorphism::from_translation_exact(sys, tau, c, DVector::zeros(sys.n()))
    }

    pub fn from_translation_exact(
        sys: &DiagSystem,
        tau: Permutation,
        c: Vec<ExactScalar>,
        w: DVector<f64>,
    ) -> Result<Self, ClassifyError> {
        if let Some(i) = c.iter().position(ExactScalar::is_zero) {
            return Err(ClassifyError::ZeroScale(i));
        }
        let cf = c.iter().map(ExactScalar::to_f64).collect();
        let mut phi = Automorphism::from_translation(sys, tau, cf, w)?;
        phi.exact_c = Some(c);
        Ok(phi)
    }

    pub fn identity(sys: &DiagSystem) -> Self {
        let n = sys.n();
        Automorphism::with_exact_scales(sys, Permutation::identity(n), vec![ExactScalar::one(); n])
            .expect("the identity is an automorphism")
    }

    fn certify(&mut self) -> Result<(), ClassifyError> {
        let mut rng = StdRng::seed_from_u64(INTERTWINING_SEED);
        let mut worst = 0f64;
        for _ in 0..INTERTWINING_SAMPLES {
            let t = DVector::from_fn(self.sys.m(), |_, _| rng.random_range(-1.0..1.0));
            worst = worst.max(self.intertwining_residual_at(&t));
        }
        self.intertwining_residual = worst;
        if worst > INTERTWINING_TOL {
            return Err(ClassifyError::IntertwiningFailed(worst));
        }
        Ok(())
    }

    /// `‖α η(t) - η(δt) α‖_∞`, relative to the size of `α η(t)`.
    pub fn intertwining_residual_at(&self, t: &DVector<f64>) -> f64 {
        let alpha = self.alpha();
        let lhs = &alpha * self.sys.eta(t);
        let rhs = self.sys.eta(&(&self.delta * t)) * &alpha;
        (&lhs - rhs).amax() / lhs.amax().max(1.0)
    }

    pub fn sys(&self) -> &DiagSystem {
        &self.sys
    }

    pub fn tau(&self) -> &Permutation {
        &self.tau
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn exact_c(&self) -> Option<&[ExactScalar]> {
        self.exact_c.as_deref()
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn w(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn intertwining_residual(&self) -> f64 {
        self.intertwining_residual
    }

    /// Matrix of `α`: entry `(τ⁻¹(i), i)` is `c_i`.
    pub fn alpha(&self) -> DMatrix<f64> {
        let inv = self.tau.inverse();
        let mut a = DMatrix::zeros(self.sys.n(), self.sys.n());
        for i in 0..self.sys.n() {
            a[(inv.apply(i), i)] = self.c[i];
        }
        a
    }

    pub fn beta(&self, t: &DVector<f64>) -> DVector<f64> {
        let mu = self.sys.exponent(&(&self.delta * t));
        let ut = &self.u * t;
        DVector::from_fn(self.sys.n(), |j, _| phi1(mu[j]) * ut[j])
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        let x = self.alpha() * &g.x + self.beta(&g.t);
        GroupElement::new(x, &self.delta * &g.t)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &Automorphism) -> Result<Automorphism, ClassifyError> {
        let (outer, inner) = (self, first);
        let tau = inner.tau.compose(&outer.tau);
        let inner_inv = inner.tau.inverse();
        let n = self.sys.n();
        let c: Vec<f64> = (0..n).map(|i| inner.c[i] * outer.c[inner_inv.apply(i)]).collect();
        let w = outer.alpha() * &inner.w + &outer.w;
        let mut phi = Automorphism::from_translation(&self.sys, tau, c, w)?;
        if let (Some(ci), Some(co)) = (&inner.exact_c, &outer.exact_c) {
            let exact: Result<Vec<_>, _> = (0..n).map(|i| ci[i].checked_mul(&co[inner_inv.apply(i)])).collect();
            phi.exact_c = Some(exact?);
        }
        Ok(phi)
    }

    pub fn inverse(&self) -> Result<Automorphism, ClassifyError> {
        let n = self.sys.n();
        let tau = self.tau.inverse();
        let c: Vec<f64> = (0..n).map(|j| 1.0 / self.c[self.tau.apply(j)]).collect();
        let alpha_inv = self.alpha().try_inverse().ok_or(ClassifyError::ZeroScale(0))?;
        let w = -(alpha_inv * &self.w);
        let mut phi = Automorphism::from_translation(&self.sys, tau, c, w)?;
        if let Some(ec) = &self.exact_c {
            let exact: Result<Vec<_>, _> = (0..n).map(|j| ec[self.tau.apply(j)].checked_inv()).collect();
            phi.exact_c = Some(exact?);
        }
        Ok(phi)
    }
}
