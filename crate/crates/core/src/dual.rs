//! Bras and kets on the tensor space.
//!
//! A functional is stored as a kind tag plus its representing vector `r`:
//! a bra evaluates `phi -> <r, phi>` (linear), a ket `phi -> <phi, r>`
//! (anti-linear). Scaling and addition are pointwise on evaluations.

use crate::error::{ModelError, Result};
use crate::hilbert::{Cplx, HilbertVector, ModelConfig};
use crate::report::CheckReport;
use crate::tensor::{canonical_chi, tensor_inner, TensorVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalKind {
    Bra,
    Ket,
}

impl FunctionalKind {
    pub fn flipped(self) -> Self {
        match self {
            FunctionalKind::Bra => FunctionalKind::Ket,
            FunctionalKind::Ket => FunctionalKind::Bra,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionalKind::Bra => "bra",
            FunctionalKind::Ket => "ket",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    kind: FunctionalKind,
    rep: TensorVector,
}

impl Functional {
    pub fn new(kind: FunctionalKind, rep: TensorVector) -> Self {
        Self { kind, rep }
    }

    pub fn zero(kind: FunctionalKind, dim: usize, arity: usize) -> Result<Self> {
        Ok(Self::new(kind, TensorVector::zero(dim, arity)?))
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn rep(&self) -> &TensorVector {
        &self.rep
    }

    pub fn into_rep(self) -> TensorVector {
        self.rep
    }

    pub fn arity(&self) -> usize {
        self.rep.arity()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn eval(&self, phi: &TensorVector) -> Result<Cplx> {
        match self.kind {
            FunctionalKind::Bra => tensor_inner(&self.rep, phi),
            FunctionalKind::Ket => tensor_inner(phi, &self.rep),
        }
    }

    pub fn eval_vector(&self, phi: &HilbertVector) -> Result<Cplx> {
        self.eval(&TensorVector::from_vector(phi))
    }

    pub fn conjugate(&self) -> Self {
        Self { kind: self.kind.flipped(), rep: self.rep.clone() }
    }

    /// Pointwise `a * f`.
    pub fn scale(&self, a: Cplx) -> Self {
        let factor = match self.kind {
            FunctionalKind::Ket => a,
            FunctionalKind::Bra => a.conj(),
        };
        Self { kind: self.kind, rep: self.rep.scale(factor) }
    }

    /// Pointwise `f + g`; kinds must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(ModelError::MixedKinds("addition"));
        }
        Ok(Self { kind: self.kind, rep: self.rep.add(&other.rep)? })
    }

    /// `f (x) g`, evaluating as `f(phi) g(psi)` on `phi (x) psi`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(ModelError::MixedKinds("tensor product"));
        }
        Ok(Self { kind: self.kind, rep: self.rep.tensor(&other.rep)? })
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.rep.is_zero(tol)
    }

    /// Largest `|f(phi) - g(phi)|` over the probes.
    pub fn max_eval_diff(&self, other: &Self, probes: &[TensorVector]) -> Result<f64> {
        let mut worst = 0.0_f64;
        for p in probes {
            worst = worst.max((self.eval(p)? - other.eval(p)?).norm());
        }
        Ok(worst)
    }
}

/// Ket on the tensor space represented by `phi`.
pub fn composite_ket(model: &ModelConfig, phi: &TensorVector) -> Result<Functional> {
    model.check_tensor(phi)?;
    Ok(Functional::new(FunctionalKind::Ket, phi.clone()))
}

pub fn composite_bra(model: &ModelConfig, phi: &TensorVector) -> Result<Functional> {
    model.check_tensor(phi)?;
    Ok(Functional::new(FunctionalKind::Bra, phi.clone()))
}

/// Tensor product of `N` single-factor functionals of one kind.
pub fn functional_tensor(model: &ModelConfig, fs: &[Functional]) -> Result<Functional> {
    if fs.len() != model.factors() {
        return Err(ModelError::ArityMismatch { expected: model.factors(), found: fs.len() });
    }
    let first = &fs[0];
    let mut acc = first.clone();
    for f in fs {
        if f.arity() != 1 {
            return Err(ModelError::ArityMismatch { expected: 1, found: f.arity() });
        }
        if f.dim() != model.dim() {
            return Err(ModelError::DimensionMismatch { expected: model.dim(), found: f.dim() });
        }
        if f.kind() != first.kind() {
            return Err(ModelError::MixedKinds("functional_tensor"));
        }
    }
    for f in &fs[1..] {
        acc = acc.tensor(f)?;
    }
    Ok(acc)
}

/// Evaluates `f_1 (x) ... (x) f_N` on the simple-tensor expansion of `phi`
/// as `sum_j w_j prod_k f_k(phi_jk)`, never touching dense coordinates.
pub fn eval_product_functional(fs: &[Functional], phi: &TensorVector) -> Result<Cplx> {
    let mut total = Cplx::new(0.0, 0.0);
    for term in phi.terms() {
        if term.arity() != fs.len() {
            return Err(ModelError::ArityMismatch { expected: fs.len(), found: term.arity() });
        }
        let mut prod = Cplx::new(1.0, 0.0);
        for (f, v) in fs.iter().zip(term.factors()) {
            prod *= f.eval_vector(v)?;
        }
        let w = match fs.first().map(Functional::kind) {
            Some(FunctionalKind::Ket) => term.weight().conj(),
            _ => term.weight(),
        };
        total += w * prod;
    }
    Ok(total)
}

/// Checks `|phi_1 (x) ... (x) phi_N> = |phi_1> (x) ... (x) |phi_N>` and the bra
/// analogue by evaluating both sides at every probe.
///
/// The left side is the composite functional of `chi(phi_1, ..., phi_N)`
/// evaluated densely; the right side multiplies single-factor evaluations
/// term by term over each probe's simple-tensor expansion.
pub fn check_identification(
    model: &ModelConfig,
    factors: &[HilbertVector],
    probes: &[TensorVector],
    tol: f64,
) -> CheckReport {
    let name = "identification";
    let run = || -> Result<(f64, f64)> {
        if probes.is_empty() {
            return Err(ModelError::Precondition("no probes supplied".into()));
        }
        let chi = canonical_chi(model, factors)?;
        let ket = composite_ket(model, &chi)?;
        let bra = composite_bra(model, &chi)?;
        let kets = factors.iter().map(|v| crate::hilbert::make_ket(model, v)).collect::<Result<Vec<_>>>()?;
        let bras: Vec<_> = kets.iter().map(Functional::conjugate).collect();
        let (mut ket_res, mut bra_res) = (0.0_f64, 0.0_f64);
        for p in probes {
            model.check_tensor(p)?;
            ket_res = ket_res.max((ket.eval(p)? - eval_product_functional(&kets, p)?).norm());
            bra_res = bra_res.max((bra.eval(p)? - eval_product_functional(&bras, p)?).norm());
        }
        Ok((ket_res, bra_res))
    };
    match run() {
        Ok((k, b)) => CheckReport::measured(
            name,
            k.max(b),
            tol,
            format!("{} probes, ket residual {k:.3e}, bra residual {b:.3e}", probes.len()),
        ),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}
