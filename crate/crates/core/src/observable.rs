//! Self-adjoint observables on the factor and tensor spaces and their
//! extension to bras and kets.

use nalgebra::{DMatrix, DVector};

use crate::dual::{eval_product_functional, Functional};
use crate::error::{ModelError, Result};
use crate::hilbert::{checked_dense_len, Cplx, DEFAULT_TOL};
use crate::report::CheckReport;
use crate::tensor::{SimpleTensor, TensorVector};

/// Largest `|M_ij - conj(M_ji)|`.
pub fn max_asymmetry(m: &DMatrix<Cplx>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_norm(m: &DMatrix<Cplx>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `||AB - BA||_max`.
pub fn commutator_norm(a: &DMatrix<Cplx>, b: &DMatrix<Cplx>) -> f64 {
    max_norm(&(a * b - b * a))
}

fn validate_hermitian(name: &str, m: &DMatrix<Cplx>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(ModelError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(ModelError::NonFinite("operator entries"));
    }
    let max_asymmetry = max_asymmetry(m);
    if max_asymmetry > tol {
        return Err(ModelError::NotHermitian { name: name.to_string(), max_asymmetry });
    }
    Ok(())
}

/// Hermitian operator `A_i` on one factor space.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorObservable {
    name: String,
    matrix: DMatrix<Cplx>,
}

impl FactorObservable {
    pub fn new(name: impl Into<String>, matrix: DMatrix<Cplx>) -> Result<Self> {
        Self::with_tol(name, matrix, DEFAULT_TOL)
    }

    pub fn with_tol(name: impl Into<String>, matrix: DMatrix<Cplx>, tol: f64) -> Result<Self> {
        let name = name.into();
        validate_hermitian(&name, &matrix, tol)?;
        Ok(Self { name, matrix })
    }

    pub fn diagonal(name: impl Into<String>, values: &[f64]) -> Self {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&x| Cplx::new(x, 0.0))));
        Self { name: name.into(), matrix: m }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Cplx> {
        &self.matrix
    }
}

/// Hermitian operator on an `arity`-fold tensor space of `dim`-dimensional factors.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    arity: usize,
    matrix: DMatrix<Cplx>,
}

impl HermitianOperator {
    pub fn new(dim: usize, arity: usize, matrix: DMatrix<Cplx>, tol: f64) -> Result<Self> {
        let len = checked_dense_len(dim, arity)?;
        if matrix.nrows() != len {
            return Err(ModelError::DimensionMismatch { expected: len, found: matrix.nrows() });
        }
        validate_hermitian("operator", &matrix, tol)?;
        Ok(Self { dim, arity, matrix })
    }

    pub fn identity(dim: usize, arity: usize) -> Result<Self> {
        let len = checked_dense_len(dim, arity)?;
        Ok(Self { dim, arity, matrix: DMatrix::identity(len, len) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<Cplx> {
        &self.matrix
    }

    /// Matrix action on a tensor vector.
    pub fn apply(&self, t: &TensorVector) -> Result<TensorVector> {
        if t.dim() != self.dim {
            return Err(ModelError::DimensionMismatch { expected: self.dim, found: t.dim() });
        }
        if t.arity() != self.arity {
            return Err(ModelError::ArityMismatch { expected: self.arity, found: t.arity() });
        }
        let v = &self.matrix * DVector::from_column_slice(t.dense());
        TensorVector::from_dense(self.dim, self.arity, v.as_slice().to_vec())
    }

    /// Product of two commuting-or-not operators, kept Hermitian only when
    /// the result actually is.
    pub fn product(&self, other: &Self, tol: f64) -> Result<Self> {
        Self::new(self.dim, self.arity, &self.matrix * &other.matrix, tol)
    }

    pub fn linear_combination(terms: &[(f64, &Self)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| ModelError::Precondition("empty combination".into()))?;
        let mut m = DMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
        for (c, op) in terms {
            if op.matrix.nrows() != m.nrows() {
                return Err(ModelError::DimensionMismatch { expected: m.nrows(), found: op.matrix.nrows() });
            }
            m += &op.matrix * Cplx::new(*c, 0.0);
        }
        Ok(Self { dim: first.dim, arity: first.arity, matrix: m })
    }
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

/// Kronecker sum `A = sum_i I (x) ... (x) A_i (x) ... (x) I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeObservable {
    factor_ops: Vec<FactorObservable>,
    dense: HermitianOperator,
}

impl CompositeObservable {
    pub fn factor_ops(&self) -> &[FactorObservable] {
        &self.factor_ops
    }

    pub fn dense(&self) -> &HermitianOperator {
        &self.dense
    }

    pub fn dim(&self) -> usize {
        self.dense.dim
    }

    pub fn arity(&self) -> usize {
        self.dense.arity
    }

    /// `I (x) ... (x) A_k (x) ... (x) I` for factor `k`.
    pub fn embedded_factor(&self, k: usize) -> HermitianOperator {
        let m = embed(self.factor_ops[k].matrix(), k, self.arity());
        HermitianOperator { dim: self.dim(), arity: self.arity(), matrix: m }
    }

    /// Whether all factor observables are the same matrix within `tol`.
    pub fn identical_factors(&self, tol: f64) -> bool {
        let first = self.factor_ops[0].matrix();
        self.factor_ops.iter().all(|op| max_norm(&(op.matrix() - first)) <= tol)
    }
}

impl AsRef<HermitianOperator> for CompositeObservable {
    fn as_ref(&self) -> &HermitianOperator {
        &self.dense
    }
}

fn embed(a: &DMatrix<Cplx>, slot: usize, arity: usize) -> DMatrix<Cplx> {
    let d = a.nrows();
    let id = DMatrix::<Cplx>::identity(d, d);
    let mut m = DMatrix::<Cplx>::identity(1, 1);
    for k in 0..arity {
        m = m.kronecker(if k == slot { a } else { &id });
    }
    m
}

/// Largest accepted dense composite dimension.
pub const MAX_OPERATOR_DIM: usize = 4096;

pub fn compose_observable(factor_ops: Vec<FactorObservable>) -> Result<CompositeObservable> {
    let first = factor_ops
        .first()
        .ok_or_else(|| ModelError::InvalidConfig("at least one factor observable is required".into()))?;
    let d = first.dim();
    for op in &factor_ops {
        if op.dim() != d {
            return Err(ModelError::DimensionMismatch { expected: d, found: op.dim() });
        }
        validate_hermitian(op.name(), op.matrix(), DEFAULT_TOL)?;
    }
    let n = factor_ops.len();
    let len = checked_dense_len(d, n)?;
    if len > MAX_OPERATOR_DIM {
        return Err(ModelError::InvalidConfig(format!(
            "composite operator dimension {len} exceeds the dense limit {MAX_OPERATOR_DIM}"
        )));
    }
    let mut dense = DMatrix::zeros(len, len);
    for (k, op) in factor_ops.iter().enumerate() {
        dense += embed(op.matrix(), k, n);
    }
    Ok(CompositeObservable { factor_ops, dense: HermitianOperator { dim: d, arity: n, matrix: dense } })
}

/// `A^(f)`: the functional `phi -> f(A phi)`. For Hermitian `A` the
/// representing vector of either kind transforms as `r -> A r`.
pub fn extend_operator(op: impl AsRef<HermitianOperator>, f: &Functional) -> Result<Functional> {
    Ok(Functional::new(f.kind(), op.as_ref().apply(f.rep())?))
}

/// Definitional evaluation `A^(f)(phi) = f(A phi)`.
pub fn extend_operator_eval(op: impl AsRef<HermitianOperator>, f: &Functional, phi: &TensorVector) -> Result<Cplx> {
    f.eval(&op.as_ref().apply(phi)?)
}

/// Checks `A^(f) = (A_1^ (x) I^ + ... + I^ (x) A_N^)(f)` for
/// `f = sum_i f_i^1 (x) ... (x) f_i^N`.
///
/// The left side builds `f` densely and evaluates `f(A phi)`. The right side
/// never forms `A`: for each probe term `phi_j^1 (x) ... (x) phi_j^N` it sums
/// `f_i^1(phi_j^1) ... f_i^k(A_k phi_j^k) ... f_i^N(phi_j^N)` over `i, j, k`.
pub fn check_extension_relation(
    a: &CompositeObservable,
    f_terms: &[Vec<Functional>],
    probes: &[TensorVector],
    tol: f64,
) -> CheckReport {
    let name = "extension.two_path";
    let run = || -> Result<f64> {
        let kind = f_terms
            .first()
            .and_then(|t| t.first())
            .map(Functional::kind)
            .ok_or_else(|| ModelError::Precondition("functional has no terms".into()))?;
        let n = a.arity();
        let mut f = Functional::zero(kind, a.dim(), n)?;
        for term in f_terms {
            if term.len() != n {
                return Err(ModelError::ArityMismatch { expected: n, found: term.len() });
            }
            if term.iter().any(|g| g.kind() != kind || g.arity() != 1) {
                return Err(ModelError::MixedKinds("extension relation terms"));
            }
            let mut prod = term[0].clone();
            for g in &term[1..] {
                prod = prod.tensor(g)?;
            }
            f = f.add(&prod)?;
        }
        let mut worst = 0.0_f64;
        for phi in probes {
            let lhs = extend_operator_eval(a, &f, phi)?;
            let rhs = factorwise_extension_eval(a, f_terms, phi)?;
            worst = worst.max((lhs - rhs).norm());
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => CheckReport::measured(name, r, tol, format!("{} terms, {} probes", f_terms.len(), probes.len())),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// `sum_k (I^ (x) .. A_k^ .. (x) I^)(f)(phi)` evaluated term by term.
pub fn factorwise_extension_eval(a: &CompositeObservable, f_terms: &[Vec<Functional>], phi: &TensorVector) -> Result<Cplx> {
    let mut total = Cplx::new(0.0, 0.0);
    for term in f_terms {
        for (k, op) in a.factor_ops().iter().enumerate() {
            // A_k acting on slot k of every simple term of phi.
            let moved = phi
                .terms()
                .iter()
                .map(|t| {
                    let mut factors = t.factors().to_vec();
                    factors[k] = factors[k].mapped(op.matrix());
                    SimpleTensor::new(t.weight(), factors)
                })
                .collect::<Result<Vec<_>>>()?;
            let moved = TensorVector::from_terms(phi.dim(), phi.arity(), moved)?;
            total += eval_product_functional(term, &moved)?;
        }
    }
    Ok(total)
}
