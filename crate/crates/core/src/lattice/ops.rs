use std::fmt;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use super::{CompatiblePair, LatticeError};
use crate::exact::IntMatrix;
use crate::group::GroupElement;

/// Default bound on `‖k‖_∞` accepted by [`Lattice::reduce`].
pub const DEFAULT_MAX_POWER: i64 = 1_000_000;
/// Relative distance below which a coordinate is treated as an integer during
/// reduction.
pub const DEFAULT_SNAP: f64 = 1e-10;

/// The element `(σ⁻¹v, ρk)` of a lattice, in integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeElement {
    pub v: Vec<BigInt>,
    pub k: Vec<i64>,
}

impl LatticeElement {
    pub fn new(v: Vec<BigInt>, k: Vec<i64>) -> Self {
        LatticeElement { v, k }
    }

    pub fn from_i64(v: &[i64], k: &[i64]) -> Self {
        LatticeElement { v: v.iter().map(|&x| BigInt::from(x)).collect(), k: k.to_vec() }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        LatticeElement { v: vec![BigInt::zero(); n], k: vec![0; m] }
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().all(Zero::is_zero) && self.k.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(|x| x.to_string()).collect();
        write!(f, "(v=[{}], k={:?})", v.join(", "), self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceOptions {
    pub max_power: i64,
    pub snap: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { max_power: DEFAULT_MAX_POWER, snap: DEFAULT_SNAP }
    }
}

/// `g = lat_to_group(gamma) · r` with `r` in the fundamental domain
/// `σ⁻¹[0,1)^n × ρ[0,1)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub gamma: LatticeElement,
    pub r: GroupElement,
    /// Fiber and base coordinates of `r`: `z ∈ [0,1)^n`, `y ∈ [0,1)^m`.
    pub z: DVector<f64>,
    pub y: DVector<f64>,
}

/// The lattice `L_(σ,ρ) = σ⁻¹Z^n ⋊ ρZ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pair: CompatiblePair,
    inverses: Vec<IntMatrix>,
}

fn snap(x: f64, tol: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= tol * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

impl Lattice {
    pub fn new(pair: CompatiblePair) -> Self {
        let inverses = pair
            .holonomy()
            .iter()
            .map(|a| a.inverse_unimodular().expect("holonomy has determinant one"))
            .collect();
        Lattice { pair, inverses }
    }

    pub fn pair(&self) -> &CompatiblePair {
        &self.pair
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn m(&self) -> usize {
        self.pair.m()
    }

    pub fn identity(&self) -> LatticeElement {
        LatticeElement::identity(self.n(), self.m())
    }

    /// `M(k) = Π_j A_j^{k_j}`.
    pub fn holonomy(&self, k: &[i64]) -> IntMatrix {
        assert_eq!(k.len(), self.m(), "base coordinate has wrong length");
        let mut acc = IntMatrix::identity(self.n());
        for (j, &kj) in k.iter().enumerate() {
            if kj > 0 {
                acc = acc.mul(&self.pair.holonomy()[j].pow(kj as u64));
            } else if kj < 0 {
                acc = acc.mul(&self.inverses[j].pow(kj.unsigned_abs()));
            }
        }
        acc
    }

    pub fn mul(&self, a: &LatticeElement, b: &LatticeElement) -> LatticeElement {
        let mw = self.holonomy(&a.k).mul_vec(&b.v);
        LatticeElement {
            v: a.v.iter().zip(mw).map(|(x, y)| x + y).collect(),
            k: a.k.iter().zip(&b.k).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn inv(&self, a: &LatticeElement) -> LatticeElement {
        let neg_k: Vec<i64> = a.k.iter().map(|x| -x).collect();
        let v = self.holonomy(&neg_k).mul_vec(&a.v).into_iter().map(|x| -x).collect();
        LatticeElement { v, k: neg_k }
    }

    /// The group element `(σ⁻¹v, ρk)`.
    pub fn to_group(&self, a: &LatticeElement) -> GroupElement {
        let v = DVector::from_iterator(self.n(), a.v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)));
        let k = DVector::from_iterator(self.m(), a.k.iter().map(|&x| x as f64));
        GroupElement::new(self.pair.sigma_inv() * v, self.pair.rho() * k)
    }

    /// Inverse of [`to_group`](Self::to_group): the element whose image is
    /// within `tol` of `g` in the coordinates `σx`, `ρ⁻¹t`.
    pub fn membership(&self, g: &GroupElement, tol: f64) -> Option<LatticeElement> {
        let vs = self.pair.sigma() * &g.x;
        let ks = self.pair.rho_inv() * &g.t;
        let mut v = Vec::with_capacity(self.n());
        for x in vs.iter() {
            let r = x.round();
            if !((x - r).abs() <= tol) {
                return None;
            }
            v.push(BigInt::from_f64(r)?);
        }
        let mut k = Vec::with_capacity(self.m());
        for x in ks.iter() {
            let r = x.round();
            if !((x - r).abs() <= tol) {
                return None;
            }
            k.push(r.to_i64()?);
        }
        Some(LatticeElement { v, k })
    }

    pub fn reduce(&self, g: &GroupElement) -> Result<Reduction, LatticeError> {
        self.reduce_with(g, ReduceOptions::default())
    }

    /// Splits `g` as `γ · r` with `γ` in the lattice and `r` in the
    /// fundamental domain. Coordinates within `opts.snap` (relative) of an
    /// integer are snapped to it, so that reducing `r` again gives the
    /// identity.
    pub fn reduce_with(&self, g: &GroupElement, opts: ReduceOptions) -> Result<Reduction, LatticeError> {
        if !g.is_finite() {
            return Err(LatticeError::NonFinite);
        }
        let u = (self.pair.rho_inv() * &g.t).map(|x| snap(x, opts.snap));
        let mut k = Vec::with_capacity(self.m());
        for x in u.iter() {
            let f = x.floor();
            if f.abs() > opts.max_power as f64 {
                let k = if f > 0.0 { f.min(i64::MAX as f64) as i64 } else { f.max(i64::MIN as f64) as i64 };
                return Err(LatticeError::Overflow { k, bound: opts.max_power });
            }
            k.push(f as i64);
        }
        let kf = DVector::from_iterator(self.m(), k.iter().map(|&x| x as f64));
        let y = &u - &kf;
        let rho_k = self.pair.rho() * &kf;
        let back = self.pair.sys().eta_diag(&(-rho_k));
        let w = (self.pair.sigma() * back.component_mul(&g.x)).map(|x| snap(x, opts.snap));
        if !w.iter().all(|x| x.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        let lf = w.map(f64::floor);
        let z = &w - &lf;
        let l: Vec<BigInt> = lf.iter().map(|&x| BigInt::from_f64(x).expect("finite")).collect();
        let gamma = LatticeElement { v: self.holonomy(&k).mul_vec(&l), k };
        let r = GroupElement::new(self.pair.sigma_inv() * &z, self.pair.rho() * &y);
        Ok(Reduction { gamma, r, z, y })
    }

    /// Smallest sup-distance from the identity over nonzero elements with
    /// `‖v‖_∞, ‖k‖_∞ <= radius`.
    pub fn discreteness_witness(&self, radius: i64) -> f64 {
        let (n, m) = (self.n(), self.m());
        let id = self.pair.sys().identity();
        let side = (2 * radius + 1) as usize;
        let total = side.pow((n + m) as u32);
        let mut best = f64::INFINITY;
        for code in 0..total {
            let mut c = code;
            let mut coords = Vec::with_capacity(n + m);
            for _ in 0..n + m {
                coords.push((c % side) as i64 - radius);
                c /= side;
            }
            if coords.iter().all(|&x| x == 0) {
                continue;
            }
            let a = LatticeElement::from_i64(&coords[..n], &coords[n..]);
            best = best.min(self.to_group(&a).distance(&id));
        }
        best
    }
}
