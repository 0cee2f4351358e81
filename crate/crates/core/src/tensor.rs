//! N-fold tensor product of the factor space.
//!
//! A [`TensorVector`] keeps both a list of weighted simple tensors and the
//! dense coordinates obtained by flattening them. Dense coordinates use
//! row-major multi-index ordering with factor 1 slowest: the coefficient of
//! `e_{i_1} (x) ... (x) e_{i_N}` sits at `i_1 d^{N-1} + ... + i_N`.
//!
//! Term lists are never canonicalized; equality is decided on dense form.

use crate::error::{ModelError, Result};
use crate::hilbert::{checked_dense_len, dot, inner, Cplx, HilbertVector, ModelConfig};

/// `weight * phi_1 (x) ... (x) phi_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleTensor {
    weight: Cplx,
    factors: Vec<HilbertVector>,
}

impl SimpleTensor {
    pub fn new(weight: Cplx, factors: Vec<HilbertVector>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| ModelError::InvalidConfig("simple tensor needs at least one factor".into()))?;
        let dim = first.dim();
        for f in &factors {
            if f.dim() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, found: f.dim() });
            }
        }
        if !(weight.re.is_finite() && weight.im.is_finite()) {
            return Err(ModelError::NonFinite("tensor weight"));
        }
        Ok(Self { weight, factors })
    }

    pub fn weight(&self) -> Cplx {
        self.weight
    }

    pub fn factors(&self) -> &[HilbertVector] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    fn accumulate_into(&self, dense: &mut [Cplx]) {
        let mut acc = vec![self.weight];
        for f in &self.factors {
            acc = acc.iter().flat_map(|a| f.coords().iter().map(move |c| a * c)).collect();
        }
        for (d, a) in dense.iter_mut().zip(acc) {
            *d += a;
        }
    }
}

/// Element of the tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorVector {
    dim: usize,
    arity: usize,
    terms: Vec<SimpleTensor>,
    dense: Vec<Cplx>,
}

/// Above this many simple terms, operations that would multiply the term
/// count fall back to the basis-expansion representation.
pub(crate) const TERM_LIMIT: usize = 4096;

impl TensorVector {
    pub fn zero(dim: usize, arity: usize) -> Result<Self> {
        let len = checked_dense_len(dim, arity)?;
        if arity == 0 {
            return Err(ModelError::InvalidConfig("tensor arity must be at least 1".into()));
        }
        Ok(Self { dim, arity, terms: Vec::new(), dense: vec![Cplx::new(0.0, 0.0); len] })
    }

    pub fn from_terms(dim: usize, arity: usize, terms: Vec<SimpleTensor>) -> Result<Self> {
        let mut out = Self::zero(dim, arity)?;
        for t in &terms {
            if t.arity() != arity {
                return Err(ModelError::ArityMismatch { expected: arity, found: t.arity() });
            }
            if t.dim() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, found: t.dim() });
            }
        }
        out.dense = flatten_terms(out.dense.len(), &terms);
        out.terms = terms;
        Ok(out)
    }

    /// Builds a vector from dense coordinates. The term list is the expansion
    /// over product basis tensors with nonzero coefficient.
    pub fn from_dense(dim: usize, arity: usize, dense: Vec<Cplx>) -> Result<Self> {
        let len = checked_dense_len(dim, arity)?;
        if dense.len() != len {
            return Err(ModelError::DimensionMismatch { expected: len, found: dense.len() });
        }
        if dense.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(ModelError::NonFinite("dense coordinates"));
        }
        let terms = dense
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Cplx::new(0.0, 0.0))
            .map(|(i, &c)| SimpleTensor {
                weight: c,
                factors: multi_index(i, dim, arity)
                    .into_iter()
                    .map(|k| HilbertVector::basis(dim, k))
                    .collect(),
            })
            .collect();
        Ok(Self { dim, arity, terms, dense })
    }

    /// Single-factor tensor holding `v`.
    pub fn from_vector(v: &HilbertVector) -> Self {
        Self::product(std::slice::from_ref(v)).expect("single factor is always valid")
    }

    /// `phi_1 (x) ... (x) phi_k` with weight 1, for any arity.
    pub fn product(factors: &[HilbertVector]) -> Result<Self> {
        let term = SimpleTensor::new(Cplx::new(1.0, 0.0), factors.to_vec())?;
        Self::from_terms(term.dim(), term.arity(), vec![term])
    }

    /// Product basis tensor for a multi-index.
    pub fn basis(dim: usize, index: &[usize]) -> Result<Self> {
        let factors: Vec<_> = index.iter().map(|&i| HilbertVector::basis(dim, i)).collect();
        Self::product(&factors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[SimpleTensor] {
        &self.terms
    }

    pub fn dense(&self) -> &[Cplx] {
        &self.dense
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.dense.iter().all(|c| c.norm() <= tol)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dense.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        if self.arity != other.arity {
            return Err(ModelError::ArityMismatch { expected: self.arity, found: other.arity });
        }
        Ok(())
    }

    pub fn scale(&self, a: Cplx) -> Self {
        Self {
            dim: self.dim,
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|t| SimpleTensor { weight: a * t.weight, factors: t.factors.clone() })
                .collect(),
            dense: self.dense.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let dense = self.dense.iter().zip(&other.dense).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, arity: self.arity, terms, dense })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Cplx::new(-1.0, 0.0)))
    }

    /// Tensor product `self (x) other`; arities add.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let arity = self.arity + other.arity;
        checked_dense_len(self.dim, arity)?;
        let dense: Vec<Cplx> =
            self.dense.iter().flat_map(|a| other.dense.iter().map(move |b| a * b)).collect();
        if self.terms.len() * other.terms.len() > TERM_LIMIT {
            return Self::from_dense(self.dim, arity, dense);
        }
        let terms = self
            .terms
            .iter()
            .flat_map(|s| {
                other.terms.iter().map(move |t| SimpleTensor {
                    weight: s.weight * t.weight,
                    factors: s.factors.iter().chain(&t.factors).cloned().collect(),
                })
            })
            .collect();
        Ok(Self { dim: self.dim, arity, terms, dense })
    }

    /// Largest coordinate-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_space(other)?;
        Ok(max_abs_diff(&self.dense, &other.dense))
    }

    /// Same vector with its terms replaced by the basis expansion of the
    /// dense coordinates.
    pub(crate) fn with_dense(dim: usize, arity: usize, terms: Vec<SimpleTensor>, dense: Vec<Cplx>) -> Self {
        Self { dim, arity, terms, dense }
    }
}

pub(crate) fn max_abs_diff(a: &[Cplx], b: &[Cplx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Decodes a flat dense index into its multi-index (factor 1 first).
pub fn multi_index(mut flat: usize, dim: usize, arity: usize) -> Vec<usize> {
    let mut idx = vec![0; arity];
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    idx
}

/// Encodes a multi-index into its flat dense position.
pub fn flat_index(index: &[usize], dim: usize) -> usize {
    index.iter().fold(0, |acc, &i| acc * dim + i)
}

fn flatten_terms(len: usize, terms: &[SimpleTensor]) -> Vec<Cplx> {
    let mut dense = vec![Cplx::new(0.0, 0.0); len];
    for t in terms {
        t.accumulate_into(&mut dense);
    }
    dense
}

/// The canonical multilinear map `(phi_1, ..., phi_N) -> phi_1 (x) ... (x) phi_N`.
pub fn canonical_chi(model: &ModelConfig, factors: &[HilbertVector]) -> Result<TensorVector> {
    if factors.len() != model.factors() {
        return Err(ModelError::ArityMismatch { expected: model.factors(), found: factors.len() });
    }
    for f in factors {
        model.check_vector(f)?;
    }
    TensorVector::product(factors)
}

/// Recomputes dense coordinates from the term list.
pub fn flatten(t: &TensorVector) -> Vec<Cplx> {
    flatten_terms(t.dense.len(), &t.terms)
}

/// Inner product on the tensor space, computed on dense coordinates.
pub fn tensor_inner(s: &TensorVector, t: &TensorVector) -> Result<Cplx> {
    s.same_space(t)?;
    Ok(dot(&s.dense, &t.dense))
}

/// Inner product evaluated term by term with the product rule
/// `<a_1 (x) a_2, b_1 (x) b_2> = <a_1, b_1><a_2, b_2>`.
pub fn tensor_inner_by_terms(s: &TensorVector, t: &TensorVector) -> Result<Cplx> {
    s.same_space(t)?;
    let mut total = Cplx::new(0.0, 0.0);
    for a in &s.terms {
        for b in &t.terms {
            let mut prod = a.weight.conj() * b.weight;
            for (fa, fb) in a.factors.iter().zip(&b.factors) {
                prod *= inner(fa, fb)?;
            }
            total += prod;
        }
    }
    Ok(total)
}
