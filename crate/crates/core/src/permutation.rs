//! Symmetric-group action on the tensor space and the (anti)symmetrizers.
//!
//! `U_sigma` places the input's factor `sigma(k)` into output slot `k`. With
//! this slot rule `U_tau . U_sigma = U_{sigma . tau}`, an anti-homomorphism;
//! the projectors sum over the whole group with a multiplicative character
//! and do not depend on that order.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::dual::Functional;
use crate::error::{ModelError, Result};
use crate::hilbert::{Cplx, EXACT_TOL};
use crate::tensor::{flat_index, multi_index, SimpleTensor, TensorVector, TERM_LIMIT};

/// Largest supported group degree.
pub const MAX_DEGREE: usize = 8;

/// A bijection of `{0, .., N-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(ModelError::InvalidPermutation("empty map".into()));
        }
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ModelError::InvalidPermutation(format!("{map:?} is not a bijection")));
            }
        }
        Ok(Self { map })
    }

    /// From the image of `1..=N`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(ModelError::InvalidPermutation("one-based images start at 1".into()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, k: usize) -> usize {
        self.map[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|i| i + 1).collect()
    }

    /// `self . other`, i.e. `k -> self(other(k))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(ModelError::ArityMismatch { expected: self.degree(), found: other.degree() });
        }
        Ok(Self { map: other.map.iter().map(|&k| self.map[k]).collect() })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (k, &i) in self.map.iter().enumerate() {
            inv[i] = k;
        }
        Self { map: inv }
    }

    /// +1 or -1 from the cycle decomposition.
    pub fn sign(&self) -> i32 {
        let mut seen = vec![false; self.map.len()];
        let mut transpositions = 0;
        for start in 0..self.map.len() {
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.map[k];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Which character weights the group sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetrizerKind {
    Sym,
    Antisym,
}

impl SymmetrizerKind {
    pub const BOTH: [SymmetrizerKind; 2] = [SymmetrizerKind::Sym, SymmetrizerKind::Antisym];

    pub fn character(self, sigma: &Permutation) -> f64 {
        match self {
            SymmetrizerKind::Sym => 1.0,
            SymmetrizerKind::Antisym => f64::from(sigma.sign()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetrizerKind::Sym => "sym",
            SymmetrizerKind::Antisym => "antisym",
        }
    }
}

/// All `N!` permutations in lexicographic order.
pub fn enumerate_group(n: usize) -> Result<Vec<Permutation>> {
    Ok(symmetric_group(n)?.to_vec())
}

/// Cached, read-only view of `enumerate_group(n)`.
pub fn symmetric_group(n: usize) -> Result<&'static [Permutation]> {
    static CACHE: [OnceLock<Vec<Permutation>>; MAX_DEGREE] = [const { OnceLock::new() }; MAX_DEGREE];
    if !(1..=MAX_DEGREE).contains(&n) {
        return Err(ModelError::GroupOutOfRange(n));
    }
    Ok(CACHE[n - 1].get_or_init(|| lexicographic_permutations(n)))
}

fn lexicographic_permutations(n: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation { map: current.clone() }];
    while let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).expect("successor exists");
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(Permutation { map: current.clone() });
    }
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Dense index map of `U_sigma`: output position `i` reads input position `map[i]`.
fn dense_source_map(sigma: &Permutation, dim: usize) -> Vec<usize> {
    let n = sigma.degree();
    let len = dim.pow(n as u32);
    let mut src = vec![0; n];
    (0..len)
        .map(|i| {
            let out = multi_index(i, dim, n);
            for (k, &ik) in out.iter().enumerate() {
                src[sigma.image(k)] = ik;
            }
            flat_index(&src, dim)
        })
        .collect()
}

fn check_degree(sigma: &Permutation, t: &TensorVector) -> Result<()> {
    if sigma.degree() != t.arity() {
        return Err(ModelError::ArityMismatch { expected: t.arity(), found: sigma.degree() });
    }
    Ok(())
}

/// `U_sigma(sum_j phi_1j (x) ... (x) phi_Nj) = sum_j phi_sigma(1)j (x) ... (x) phi_sigma(N)j`.
pub fn apply_permutation(sigma: &Permutation, t: &TensorVector) -> Result<TensorVector> {
    check_degree(sigma, t)?;
    let terms = t
        .terms()
        .iter()
        .map(|term| {
            let factors = (0..sigma.degree()).map(|k| term.factors()[sigma.image(k)].clone()).collect();
            SimpleTensor::new(term.weight(), factors)
        })
        .collect::<Result<Vec<_>>>()?;
    let src = dense_source_map(sigma, t.dim());
    let dense = src.iter().map(|&j| t.dense()[j]).collect();
    Ok(TensorVector::with_dense(t.dim(), t.arity(), terms, dense))
}

/// `P_c(t) = (1/N!) sum_sigma c(sigma) U_sigma(t)`.
pub fn projector(c: SymmetrizerKind, t: &TensorVector) -> Result<TensorVector> {
    let n = t.arity();
    let group = symmetric_group(n)?;
    let norm = 1.0 / factorial(n) as f64;
    let mut dense = vec![Cplx::new(0.0, 0.0); t.dense().len()];
    let keep_terms = group.len() * t.terms().len() <= TERM_LIMIT;
    let mut terms = Vec::new();
    for sigma in group {
        let w = norm * c.character(sigma);
        for (d, &j) in dense.iter_mut().zip(&dense_source_map(sigma, t.dim())) {
            *d += w * t.dense()[j];
        }
        if keep_terms {
            for term in t.terms() {
                let factors = (0..n).map(|k| term.factors()[sigma.image(k)].clone()).collect();
                terms.push(SimpleTensor::new(w * term.weight(), factors)?);
            }
        }
    }
    if keep_terms {
        Ok(TensorVector::with_dense(t.dim(), n, terms, dense))
    } else {
        TensorVector::from_dense(t.dim(), n, dense)
    }
}

/// Dense matrix of `U_sigma` on `dim^N` coordinates.
pub fn permutation_matrix(sigma: &Permutation, dim: usize) -> DMatrix<Cplx> {
    let src = dense_source_map(sigma, dim);
    let len = src.len();
    let mut m = DMatrix::zeros(len, len);
    for (i, j) in src.into_iter().enumerate() {
        m[(i, j)] = Cplx::new(1.0, 0.0);
    }
    m
}

/// Dense matrix of `P_c` on the `n`-fold tensor space.
pub fn projector_matrix(c: SymmetrizerKind, dim: usize, n: usize) -> Result<DMatrix<Cplx>> {
    let group = symmetric_group(n)?;
    crate::hilbert::checked_dense_len(dim, n)?;
    let norm = 1.0 / factorial(n) as f64;
    let len = dim.pow(n as u32);
    let mut m = DMatrix::zeros(len, len);
    for sigma in group {
        let w = Cplx::new(norm * c.character(sigma), 0.0);
        for (i, j) in dense_source_map(sigma, dim).into_iter().enumerate() {
            m[(i, j)] += w;
        }
    }
    Ok(m)
}

/// Rank of a dense projector by counting eigenvalues above one half.
pub fn projector_rank(p: &DMatrix<Cplx>) -> usize {
    let eig = nalgebra::SymmetricEigen::new(p.clone());
    eig.eigenvalues.iter().filter(|&&l| l > 0.5).count()
}

/// `P~_c(f)`, the pullback `phi -> f(P_c phi)`. `P_c` is real symmetric in the
/// product basis, so the representing vector transforms by `P_c` itself.
pub fn dual_projector(c: SymmetrizerKind, f: &Functional) -> Result<Functional> {
    Ok(Functional::new(f.kind(), projector(c, f.rep())?))
}

/// Definitional evaluation `P~_c(f)(phi) = f(P_c(phi))`.
pub fn dual_projector_eval(c: SymmetrizerKind, f: &Functional, phi: &TensorVector) -> Result<Cplx> {
    f.eval(&projector(c, phi)?)
}

/// Fixed-point test for membership of the (anti)symmetric bra/ket space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub residual: f64,
}

pub fn is_in_symmetric_space(f: &Functional, c: SymmetrizerKind, tol: f64) -> Result<Membership> {
    let projected = dual_projector(c, f)?;
    let residual = projected.rep().max_abs_diff(f.rep())?;
    Ok(Membership { member: residual <= tol, residual })
}

/// Convenience for the default exact-algebra threshold.
pub fn is_in_symmetric_space_default(f: &Functional, c: SymmetrizerKind) -> Result<Membership> {
    is_in_symmetric_space(f, c, EXACT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::FunctionalKind;
    use crate::hilbert::HilbertVector;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn perm(m: &[usize]) -> Permutation {
        Permutation::new(m.to_vec()).unwrap()
    }

    #[test]
    fn small_groups() {
        assert_eq!(enumerate_group(1).unwrap(), vec![Permutation::identity(1)]);
        assert_eq!(enumerate_group(2).unwrap(), vec![perm(&[0, 1]), perm(&[1, 0])]);
        assert!(enumerate_group(0).is_err());
        assert!(enumerate_group(9).is_err());
    }

    #[test]
    fn s3_is_lexicographic_and_complete() {
        // Brute-force oracle: every map on {0,1,2}^3 that is a bijection, in numeric order.
        let mut oracle = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    if a != b && b != d && a != d {
                        oracle.push(perm(&[a, b, d]));
                    }
                }
            }
        }
        assert_eq!(enumerate_group(3).unwrap(), oracle);
        assert_eq!(enumerate_group(8).unwrap().len(), 40320);
    }

    #[test]
    fn sign_and_inverse() {
        assert_eq!(perm(&[1, 0, 2]).sign(), -1);
        assert_eq!(perm(&[1, 2, 0]).sign(), 1);
        for s in enumerate_group(4).unwrap() {
            assert_eq!(s.compose(&s.inverse()).unwrap(), Permutation::identity(4));
            for t in enumerate_group(4).unwrap().iter().step_by(5) {
                assert_eq!(s.compose(t).unwrap().sign(), s.sign() * t.sign());
            }
        }
    }

    #[test]
    fn invalid_permutations() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert_eq!(Permutation::from_one_based(&[2, 1]).unwrap(), perm(&[1, 0]));
    }

    #[test]
    fn swap_on_basis() {
        let t = TensorVector::basis(2, &[0, 1]).unwrap();
        let s = apply_permutation(&perm(&[1, 0]), &t).unwrap();
        assert_eq!(s.dense(), TensorVector::basis(2, &[1, 0]).unwrap().dense());
        assert_eq!(s.terms()[0].factors()[0], HilbertVector::basis(2, 1));
        assert_eq!(apply_permutation(&Permutation::identity(2), &t).unwrap(), t);
        assert!(apply_permutation(&Permutation::identity(3), &t).is_err());
    }

    #[test]
    fn slot_rule_is_factor_sigma_k_into_slot_k() {
        // Three distinct basis vectors make every slot traceable.
        let t = TensorVector::basis(3, &[0, 1, 2]).unwrap();
        let s = perm(&[2, 0, 1]);
        let out = apply_permutation(&s, &t).unwrap();
        assert_eq!(out.dense(), TensorVector::basis(3, &[2, 0, 1]).unwrap().dense());
    }

    #[test]
    fn antisymmetrizer_kills_repeated_factor() {
        let t = TensorVector::basis(2, &[0, 0]).unwrap();
        assert!(projector(SymmetrizerKind::Antisym, &t).unwrap().is_zero(0.0));
    }

    #[test]
    fn symmetrizer_on_e0_e1() {
        let t = TensorVector::basis(2, &[0, 1]).unwrap();
        let p = projector(SymmetrizerKind::Sym, &t).unwrap();
        assert_eq!(p.dense(), &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.terms().len(), 2);
    }

    #[test]
    fn projector_matrix_matches_vector_action() {
        for n in 1..=3 {
            let pm = projector_matrix(SymmetrizerKind::Antisym, 2, n).unwrap();
            for i in 0..2usize.pow(n as u32) {
                let t = TensorVector::basis(2, &multi_index(i, 2, n)).unwrap();
                let p = projector(SymmetrizerKind::Antisym, &t).unwrap();
                for (r, v) in p.dense().iter().enumerate() {
                    assert!((pm[(r, i)] - v).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn projector_ranks() {
        // Symmetric and antisymmetric subspace dimensions C(d+N-1, N) and C(d, N).
        assert_eq!(projector_rank(&projector_matrix(SymmetrizerKind::Sym, 2, 2).unwrap()), 3);
        assert_eq!(projector_rank(&projector_matrix(SymmetrizerKind::Antisym, 2, 2).unwrap()), 1);
        assert_eq!(projector_rank(&projector_matrix(SymmetrizerKind::Sym, 3, 3).unwrap()), 10);
        assert_eq!(projector_rank(&projector_matrix(SymmetrizerKind::Antisym, 3, 3).unwrap()), 1);
        assert_eq!(projector_rank(&projector_matrix(SymmetrizerKind::Antisym, 2, 3).unwrap()), 0);
    }

    #[test]
    fn large_group_falls_back_to_dense_terms() {
        let t = TensorVector::basis(2, &[0, 1, 0, 1, 1, 0, 0, 1]).unwrap();
        let p = projector(SymmetrizerKind::Sym, &t).unwrap();
        assert!(p.terms().len() <= 256);
        assert!((p.norm_sqr() - 1.0 / 70.0).abs() < 1e-14);
    }

    #[test]
    fn membership() {
        let f = Functional::new(FunctionalKind::Ket, TensorVector::basis(2, &[0, 1]).unwrap());
        for k in SymmetrizerKind::BOTH {
            assert!(!is_in_symmetric_space_default(&f, k).unwrap().member);
            assert!(is_in_symmetric_space_default(&dual_projector(k, &f).unwrap(), k).unwrap().member);
            let zero = Functional::zero(FunctionalKind::Bra, 2, 2).unwrap();
            assert!(is_in_symmetric_space_default(&zero, k).unwrap().member);
        }
        let r = is_in_symmetric_space_default(&f, SymmetrizerKind::Sym).unwrap();
        assert!((r.residual - 0.5).abs() < 1e-15);
    }
}
