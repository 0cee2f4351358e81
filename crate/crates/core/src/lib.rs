//! Finite-dimensional bra-ket algebra for composite and identical-particle
//! systems.
//!
//! Every factor space is `C^d`; the test space, the Hilbert space and both
//! dual spaces coincide as sets, while bras (linear functionals) and kets
//! (anti-linear functionals) stay distinct types of evaluation. On top of
//! that sit tensor products, the symmetric-group action and its
//! (anti)symmetrizers, spectral expansions of Kronecker-sum observables, a
//! small Dirac-notation expression language, and a check runner.

pub mod cli;
pub mod dsl;
pub mod dual;
pub mod error;
pub mod exec;
pub mod hilbert;
pub mod observable;
pub mod permutation;
pub mod random;
pub mod report;
pub mod spectral;
pub mod suite;
pub mod tensor;

pub use dual::{check_identification, composite_bra, composite_ket, functional_tensor, Functional, FunctionalKind};
pub use error::{ModelError, Result};
pub use exec::Exec;
pub use hilbert::{conjugate, inner, make_bra, make_ket, Cplx, HilbertVector, ModelConfig};
pub use observable::{compose_observable, extend_operator, CompositeObservable, FactorObservable, HermitianOperator};
pub use permutation::{apply_permutation, dual_projector, enumerate_group, projector, Permutation, SymmetrizerKind};
pub use report::{CheckReport, Status};
pub use spectral::{spectral_decompose, GeneralizedEigenpair, SpectralDecomposition};
pub use tensor::{canonical_chi, flatten, tensor_inner, SimpleTensor, TensorVector};
