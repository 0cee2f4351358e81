//! Single-factor complex inner-product space.
//!
//! The inner product is conjugate-linear in its first argument. With that
//! convention a ket `|phi>` evaluated at `psi` is `<psi, phi>`, which is
//! anti-linear in `psi`, and a bra is its complex conjugate.

use num_complex::Complex64;

use crate::dual::{Functional, FunctionalKind};
use crate::error::{ModelError, Result};
use crate::tensor::TensorVector;

/// Complex scalar.
pub type Cplx = Complex64;

/// Residual threshold used by checks unless overridden.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Threshold for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Largest accepted tensor-space dimension `dim^factors`.
pub const MAX_DENSE_LEN: usize = 1 << 20;

/// Fixes the concrete model: factor dimension, number of factors and the
/// numerical equality threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    dim: usize,
    factors: usize,
    tol: f64,
    dense_len: usize,
}

impl ModelConfig {
    pub fn new(dim: usize, factors: usize) -> Result<Self> {
        Self::with_tol(dim, factors, DEFAULT_TOL)
    }

    pub fn with_tol(dim: usize, factors: usize, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(ModelError::InvalidConfig("dim must be at least 1".into()));
        }
        if factors == 0 {
            return Err(ModelError::InvalidConfig("factors must be at least 1".into()));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(ModelError::InvalidConfig(format!("tol must be positive, got {tol}")));
        }
        let dense_len = checked_dense_len(dim, factors)?;
        Ok(Self { dim, factors, tol, dense_len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `dim^factors`, the length of dense tensor coordinates.
    pub fn dense_len(&self) -> usize {
        self.dense_len
    }

    pub fn check_vector(&self, v: &HilbertVector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        Ok(())
    }

    /// Checks that `t` lives in the full `factors`-fold tensor space.
    pub fn check_tensor(&self, t: &TensorVector) -> Result<()> {
        if t.dim() != self.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: t.dim() });
        }
        if t.arity() != self.factors {
            return Err(ModelError::ArityMismatch { expected: self.factors, found: t.arity() });
        }
        Ok(())
    }
}

pub(crate) fn checked_dense_len(dim: usize, factors: usize) -> Result<usize> {
    let exp = u32::try_from(factors)
        .map_err(|_| ModelError::InvalidConfig("factor count overflows".into()))?;
    match dim.checked_pow(exp) {
        Some(n) if n <= MAX_DENSE_LEN => Ok(n),
        Some(n) => Err(ModelError::InvalidConfig(format!(
            "tensor dimension {dim}^{factors} = {n} exceeds the limit {MAX_DENSE_LEN}"
        ))),
        None => Err(ModelError::InvalidConfig(format!(
            "tensor dimension {dim}^{factors} overflows the index range"
        ))),
    }
}

/// Element of the single-factor space.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector {
    coords: Vec<Cplx>,
}

impl HilbertVector {
    pub fn new(coords: Vec<Cplx>) -> Result<Self> {
        if coords.is_empty() {
            return Err(ModelError::InvalidConfig("vector must have at least one coordinate".into()));
        }
        if coords.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(ModelError::NonFinite("vector coordinates"));
        }
        Ok(Self { coords })
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dimension {dim}");
        let mut coords = vec![Cplx::new(0.0, 0.0); dim];
        coords[i] = Cplx::new(1.0, 0.0);
        Self { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Self { coords: vec![Cplx::new(0.0, 0.0); dim] }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Cplx::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Cplx] {
        &self.coords
    }

    pub fn scale(&self, a: Cplx) -> Self {
        Self { coords: self.coords.iter().map(|c| a * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix action `M v`.
    pub(crate) fn mapped(&self, matrix: &nalgebra::DMatrix<Cplx>) -> Self {
        let v = nalgebra::DVector::from_column_slice(&self.coords);
        Self { coords: (matrix * v).as_slice().to_vec() }
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(ModelError::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `<u, v>`, conjugate-linear in `u`.
pub fn inner(u: &HilbertVector, v: &HilbertVector) -> Result<Cplx> {
    same_dim(u.dim(), v.dim())?;
    Ok(dot(&u.coords, &v.coords))
}

pub(crate) fn dot(u: &[Cplx], v: &[Cplx]) -> Cplx {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// The ket of `phi`: `psi -> <psi, phi>`.
pub fn make_ket(model: &ModelConfig, phi: &HilbertVector) -> Result<Functional> {
    model.check_vector(phi)?;
    Ok(Functional::new(FunctionalKind::Ket, TensorVector::from_vector(phi)))
}

/// The bra of `phi`: `psi -> <phi, psi>`.
pub fn make_bra(model: &ModelConfig, phi: &HilbertVector) -> Result<Functional> {
    model.check_vector(phi)?;
    Ok(Functional::new(FunctionalKind::Bra, TensorVector::from_vector(phi)))
}

/// Swaps bra and ket while keeping the representing vector.
pub fn conjugate(f: &Functional) -> Functional {
    f.conjugate()
}
