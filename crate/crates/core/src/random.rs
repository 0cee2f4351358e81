//! Seeded generators for randomized property suites.
//!
//! Every trial draws from its own ChaCha stream derived from `(seed, stream)`,
//! so results do not depend on execution order or thread count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dual::{Functional, FunctionalKind};
use crate::hilbert::{Cplx, HilbertVector};
use crate::observable::{FactorObservable, HermitianOperator};
use crate::tensor::{SimpleTensor, TensorVector};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "BRAKET_RHS_SEED";

/// Seed from `BRAKET_RHS_SEED`, or 42 when unset or unparsable.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn trial_rng(seed: u64, suite: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(suite) << 32) | u64::from(trial));
    rng
}

pub fn cplx<R: Rng>(rng: &mut R) -> Cplx {
    Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn vector<R: Rng>(rng: &mut R, dim: usize) -> HilbertVector {
    HilbertVector::new((0..dim).map(|_| cplx(rng)).collect()).expect("finite coordinates")
}

pub fn simple<R: Rng>(rng: &mut R, dim: usize, arity: usize) -> TensorVector {
    let factors: Vec<_> = (0..arity).map(|_| vector(rng, dim)).collect();
    TensorVector::product(&factors).expect("consistent factors")
}

/// Sum of `terms` random weighted simple tensors.
pub fn tensor<R: Rng>(rng: &mut R, dim: usize, arity: usize, terms: usize) -> TensorVector {
    let terms = (0..terms)
        .map(|_| SimpleTensor::new(cplx(rng), (0..arity).map(|_| vector(rng, dim)).collect()).expect("consistent factors"))
        .collect();
    TensorVector::from_terms(dim, arity, terms).expect("consistent terms")
}

pub fn functional<R: Rng>(rng: &mut R, kind: FunctionalKind, dim: usize, arity: usize, terms: usize) -> Functional {
    Functional::new(kind, tensor(rng, dim, arity, terms))
}

pub fn hermitian_matrix<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Cplx> {
    let m = DMatrix::from_fn(dim, dim, |_, _| cplx(rng));
    (&m + m.adjoint()) * Cplx::new(0.5, 0.0)
}

pub fn factor_observable<R: Rng>(rng: &mut R, name: &str, dim: usize) -> FactorObservable {
    FactorObservable::new(name, hermitian_matrix(rng, dim)).expect("hermitian by construction")
}

pub fn hermitian_operator<R: Rng>(rng: &mut R, dim: usize, arity: usize) -> HermitianOperator {
    let len = dim.pow(arity as u32);
    HermitianOperator::new(dim, arity, hermitian_matrix(rng, len), 1e-12).expect("hermitian by construction")
}

pub fn kind<R: Rng>(rng: &mut R) -> FunctionalKind {
    if rng.random_bool(0.5) {
        FunctionalKind::Bra
    } else {
        FunctionalKind::Ket
    }
}
