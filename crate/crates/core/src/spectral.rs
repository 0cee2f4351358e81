//! Spectral decomposition of composite observables.
//!
//! Each factor observable is diagonalized on its own; the generalized
//! eigenvectors of the composite are the product eigenvectors, labelled by
//! one factor eigenvalue and multiplicity index per factor, with unit
//! counting-measure weight.
//!
//! Ordering and phase are fixed so that decompositions are reproducible:
//! factor eigenvalues ascend; inside a degenerate factor eigenspace the basis
//! comes from Gram-Schmidt on the projections of `e_0, e_1, ...` in that
//! order; each vector's first largest-modulus component is made positive real.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dual::{Functional, FunctionalKind};
use crate::error::{ModelError, Result};
use crate::hilbert::{dot, inner, Cplx, HilbertVector, DEFAULT_TOL};
use crate::observable::{commutator_norm, extend_operator, max_norm, CompositeObservable, FactorObservable, HermitianOperator};
use crate::permutation::{dual_projector, projector_matrix, SymmetrizerKind};
use crate::report::CheckReport;
use crate::tensor::{flat_index, multi_index, TensorVector};

/// Two eigenvalues belong to one degenerate level when they differ by at
/// most `1e-9 (1 + |lambda|)`.
pub fn same_level(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

/// Orthonormal eigenbasis of one factor observable.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorEigenbasis {
    values: Vec<f64>,
    vectors: Vec<HilbertVector>,
    mult: Vec<usize>,
}

impl FactorEigenbasis {
    /// Eigenvalue of each basis vector, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &[HilbertVector] {
        &self.vectors
    }

    /// 1-based index of each vector inside its degenerate level.
    pub fn mult_indices(&self) -> &[usize] {
        &self.mult
    }

    /// Distinct eigenvalues, ascending.
    pub fn levels(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &v in &self.values {
            if out.last().is_none_or(|&l| !same_level(l, v)) {
                out.push(v);
            }
        }
        out
    }
}

pub fn factor_eigenbasis(op: &FactorObservable) -> Result<FactorEigenbasis> {
    let d = op.dim();
    let eig = SymmetricEigen::try_new(op.matrix().clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| ModelError::Numeric(format!("eigensolver did not converge for `{}`", op.name())))?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut levels: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match levels.last_mut() {
            Some(level) if same_level(eig.eigenvalues[*level.last().unwrap()], eig.eigenvalues[i]) => level.push(i),
            _ => levels.push(vec![i]),
        }
    }

    let mut basis = FactorEigenbasis { values: Vec::with_capacity(d), vectors: Vec::with_capacity(d), mult: Vec::with_capacity(d) };
    for level in levels {
        let value = level.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / level.len() as f64;
        let cols: Vec<DVector<Cplx>> = level.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        for (k, v) in canonical_level_basis(&cols, d).into_iter().enumerate() {
            basis.values.push(value);
            basis.vectors.push(HilbertVector::new(v)?);
            basis.mult.push(k + 1);
        }
    }
    Ok(basis)
}

/// Deterministic orthonormal basis of the span of `cols`.
fn canonical_level_basis(cols: &[DVector<Cplx>], d: usize) -> Vec<Vec<Cplx>> {
    let rank = cols.len();
    // Projector onto the level; independent of the solver's basis choice.
    let mut q = DMatrix::<Cplx>::zeros(d, d);
    for c in cols {
        q += c * c.adjoint();
    }
    let candidates: Vec<Vec<Cplx>> = (0..d).map(|i| q.column(i).iter().copied().collect()).collect();

    let mut accepted: Vec<Vec<Cplx>> = Vec::with_capacity(rank);
    let residual = |v: &[Cplx], acc: &[Vec<Cplx>]| -> Vec<Cplx> {
        let mut w = v.to_vec();
        // Two Gram-Schmidt passes.
        for _ in 0..2 {
            for a in acc {
                let proj = dot(a, &w);
                for (x, y) in w.iter_mut().zip(a) {
                    *x -= proj * y;
                }
            }
        }
        w
    };
    let norm = |w: &[Cplx]| w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();

    let mut used = vec![false; d];
    for (i, cand) in candidates.iter().enumerate() {
        if accepted.len() == rank {
            break;
        }
        let w = residual(cand, &accepted);
        let n = norm(&w);
        if n >= 1e-3 {
            accepted.push(w.iter().map(|c| c / n).collect());
            used[i] = true;
        }
    }
    while accepted.len() < rank {
        let (i, w, n) = (0..d)
            .filter(|&i| !used[i])
            .map(|i| {
                let w = residual(&candidates[i], &accepted);
                let n = norm(&w);
                (i, w, n)
            })
            .fold(None::<(usize, Vec<Cplx>, f64)>, |best, cur| match best {
                Some(b) if b.2 >= cur.2 => Some(b),
                _ => Some(cur),
            })
            .expect("a level never has more vectors than the space dimension");
        used[i] = true;
        accepted.push(w.iter().map(|c| c / n).collect());
    }
    for v in &mut accepted {
        fix_phase(v);
    }
    accepted
}

fn fix_phase(v: &mut [Cplx]) {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().find(|c| c.norm() >= max - 1e-12).copied().unwrap_or(v[0]);
    let phase = pivot.conj() / pivot.norm();
    for c in v.iter_mut() {
        *c *= phase;
    }
}

/// One product eigenvector `|lambda_1, k_1> (x) ... (x) |lambda_N, k_N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigenpair {
    pub lambdas: Vec<f64>,
    pub mult_indices: Vec<usize>,
    /// Position of each factor vector inside its factor eigenbasis.
    pub factor_indices: Vec<usize>,
    pub lambda_sum: f64,
    pub ket: Functional,
    pub bra: Functional,
    pub weight: f64,
}

impl GeneralizedEigenpair {
    pub fn rep(&self) -> &TensorVector {
        self.ket.rep()
    }
}

/// Eigenpairs sharing one value of `lambda_1 + ... + lambda_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGroup {
    pub value: f64,
    pub pairs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    operator: HermitianOperator,
    factor_bases: Vec<FactorEigenbasis>,
    pairs: Vec<GeneralizedEigenpair>,
    groups: Vec<SpectrumGroup>,
}

impl SpectralDecomposition {
    pub fn pairs(&self) -> &[GeneralizedEigenpair] {
        &self.pairs
    }

    pub fn groups(&self) -> &[SpectrumGroup] {
        &self.groups
    }

    pub fn factor_bases(&self) -> &[FactorEigenbasis] {
        &self.factor_bases
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn arity(&self) -> usize {
        self.operator.arity()
    }

    /// Distinct values of the composite spectrum, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.value).collect()
    }

    /// Pair index for a tuple of factor-basis positions.
    pub fn pair_index(&self, factor_indices: &[usize]) -> usize {
        flat_index(factor_indices, self.dim())
    }

    /// `{l_1 + ... + l_N : l_k in Sp(A_k)}` over distinct factor levels.
    pub fn factor_sumset(&self) -> Vec<f64> {
        let mut sums = vec![0.0];
        for basis in &self.factor_bases {
            sums = sums.iter().flat_map(|s| basis.levels().into_iter().map(move |l| s + l)).collect();
        }
        group_values(&sums)
    }
}

fn group_values(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if out.last().is_none_or(|&l| !same_level(l, x)) {
            out.push(x);
        }
    }
    out
}

pub fn spectral_decompose(a: &CompositeObservable) -> Result<SpectralDecomposition> {
    let factor_bases = a.factor_ops().iter().map(factor_eigenbasis).collect::<Result<Vec<_>>>()?;
    let (d, n) = (a.dim(), a.arity());
    let len = d.pow(n as u32);
    let bound = DEFAULT_TOL * (1.0 + max_norm(a.dense().matrix()));
    let mut pairs = Vec::with_capacity(len);
    for flat in 0..len {
        let idx = multi_index(flat, d, n);
        let lambdas: Vec<f64> = idx.iter().zip(&factor_bases).map(|(&j, b)| b.values[j]).collect();
        let mult_indices = idx.iter().zip(&factor_bases).map(|(&j, b)| b.mult[j]).collect();
        let vectors: Vec<HilbertVector> = idx.iter().zip(&factor_bases).map(|(&j, b)| b.vectors[j].clone()).collect();
        let lambda_sum: f64 = lambdas.iter().sum();
        let rep = TensorVector::product(&vectors)?;
        let image = a.dense().apply(&rep)?;
        let residual = image.sub(&rep.scale(Cplx::new(lambda_sum, 0.0)))?.norm();
        if residual > bound {
            return Err(ModelError::Numeric(format!("eigen-residual {residual:e} for pair {idx:?} exceeds {bound:e}")));
        }
        pairs.push(GeneralizedEigenpair {
            lambdas,
            mult_indices,
            factor_indices: idx,
            lambda_sum,
            bra: Functional::new(FunctionalKind::Bra, rep.clone()),
            ket: Functional::new(FunctionalKind::Ket, rep),
            weight: 1.0,
        });
    }

    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&i, &j| pairs[i].lambda_sum.total_cmp(&pairs[j].lambda_sum).then(i.cmp(&j)));
    let mut groups: Vec<SpectrumGroup> = Vec::new();
    for i in order {
        let s = pairs[i].lambda_sum;
        match groups.last_mut() {
            Some(g) if same_level(g.value, s) => g.pairs.push(i),
            _ => groups.push(SpectrumGroup { value: s, pairs: vec![i] }),
        }
    }
    for g in &mut groups {
        g.pairs.sort_unstable();
    }
    Ok(SpectralDecomposition { operator: a.dense().clone(), factor_bases, pairs, groups })
}

/// Coefficients `<lambda| phi>` of `phi` over all eigenpairs.
pub fn expand_ket(sd: &SpectralDecomposition, phi: &TensorVector) -> Result<Vec<(usize, Cplx)>> {
    sd.pairs.iter().enumerate().map(|(p, pair)| Ok((p, pair.bra.eval(phi)?))).collect()
}

/// Image of `phi` under `A` in the same expansion: each coefficient scaled by its eigenvalue.
pub fn expand_ket_image(sd: &SpectralDecomposition, phi: &TensorVector) -> Result<Vec<(usize, Cplx)>> {
    Ok(expand_ket(sd, phi)?.into_iter().map(|(p, c)| (p, c * sd.pairs[p].lambda_sum)).collect())
}

/// `sum_p c_p rep_p`.
pub fn reconstruct(sd: &SpectralDecomposition, coeffs: &[(usize, Cplx)]) -> Result<TensorVector> {
    let mut dense = vec![Cplx::new(0.0, 0.0); sd.operator.matrix().nrows()];
    for &(p, c) in coeffs {
        for (d, r) in dense.iter_mut().zip(sd.pairs[p].rep().dense()) {
            *d += c * r;
        }
    }
    TensorVector::from_dense(sd.dim(), sd.arity(), dense)
}

/// Coefficients of `phi_1 (x) ... (x) phi_N` as products `<lambda_1|phi_1> ... <lambda_N|phi_N>`.
pub fn expand_product_ket(sd: &SpectralDecomposition, phis: &[HilbertVector]) -> Result<Vec<(usize, Cplx)>> {
    if phis.len() != sd.arity() {
        return Err(ModelError::ArityMismatch { expected: sd.arity(), found: phis.len() });
    }
    // Single-factor inner products, computed once per factor.
    let mut table: Vec<Vec<Cplx>> = Vec::with_capacity(phis.len());
    for (basis, phi) in sd.factor_bases.iter().zip(phis) {
        table.push(basis.vectors.iter().map(|v| inner(v, phi)).collect::<Result<_>>()?);
    }
    Ok(sd
        .pairs
        .iter()
        .enumerate()
        .map(|(p, pair)| (p, pair.factor_indices.iter().zip(&table).map(|(&j, row)| row[j]).product()))
        .collect())
}

/// Bra-side coefficients `<phi_1|lambda_1> ... <phi_N|lambda_N>`: conjugates of the ket ones.
pub fn expand_product_bra(sd: &SpectralDecomposition, phis: &[HilbertVector]) -> Result<Vec<(usize, Cplx)>> {
    Ok(expand_product_ket(sd, phis)?.into_iter().map(|(p, c)| (p, c.conj())).collect())
}

/// `<phi, psi> = sum_p conj(c_p(phi)) c_p(psi)` and the same with `A psi`
/// weighted by `lambda_p`.
pub fn parseval_check(sd: &SpectralDecomposition, phi: &TensorVector, psi: &TensorVector, tol: f64) -> CheckReport {
    let name = "spectral.parseval";
    let run = || -> Result<(f64, f64)> {
        let cphi = expand_ket(sd, phi)?;
        let cpsi = expand_ket(sd, psi)?;
        let lhs = crate::tensor::tensor_inner(phi, psi)?;
        let lhs_a = crate::tensor::tensor_inner(phi, &sd.operator.apply(psi)?)?;
        let mut rhs = Cplx::new(0.0, 0.0);
        let mut rhs_a = Cplx::new(0.0, 0.0);
        for ((p, a), (_, b)) in cphi.iter().zip(&cpsi) {
            let term = a.conj() * b;
            rhs += term;
            rhs_a += term * sd.pairs[*p].lambda_sum;
        }
        Ok(((lhs - rhs).norm(), (lhs_a - rhs_a).norm()))
    };
    match run() {
        Ok((r, ra)) => CheckReport::measured(name, r.max(ra), tol, format!("plain {r:.3e}, weighted {ra:.3e}")),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// `||sum_p |lambda_p><lambda_p| - I||_max`.
pub fn completeness_residual(sd: &SpectralDecomposition) -> f64 {
    let len = sd.operator.matrix().nrows();
    let mut sum = DMatrix::<Cplx>::zeros(len, len);
    for pair in &sd.pairs {
        let v = DVector::from_column_slice(pair.rep().dense());
        sum += &v * v.adjoint();
    }
    max_norm(&(sum - DMatrix::identity(len, len)))
}

pub fn completeness_check(sd: &SpectralDecomposition, tol: f64) -> CheckReport {
    let r = completeness_residual(sd);
    CheckReport::measured("spectral.completeness", r, tol, format!("{} pairs", sd.pairs.len()))
}

/// `max_{p,q} |<lambda_p|(rep_q) - delta_pq|`.
pub fn orthonormality_check(sd: &SpectralDecomposition, tol: f64) -> CheckReport {
    let name = "spectral.orthonormality";
    let run = || -> Result<f64> {
        let mut worst = 0.0_f64;
        for (p, a) in sd.pairs.iter().enumerate() {
            for (q, b) in sd.pairs.iter().enumerate() {
                let delta = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((a.bra.eval(b.rep())? - delta).norm());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => CheckReport::measured(name, r, tol, format!("{}x{} evaluations", sd.pairs.len(), sd.pairs.len())),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// Overlaps between pairs with equal `lambda_sum` but different labels; the
/// delta structure is per label, so these all vanish.
pub fn equal_sum_label_check(sd: &SpectralDecomposition, tol: f64) -> CheckReport {
    let name = "spectral.orthonormality.equal_sum";
    let run = || -> Result<(f64, usize)> {
        let mut worst = 0.0_f64;
        let mut count = 0;
        for g in &sd.groups {
            for &p in &g.pairs {
                for &q in &g.pairs {
                    if p != q {
                        count += 1;
                        worst = worst.max(sd.pairs[p].bra.eval(sd.pairs[q].rep())?.norm());
                    }
                }
            }
        }
        Ok((worst, count))
    };
    match run() {
        Ok((r, count)) => CheckReport::measured(name, r, tol, format!("{count} equal-sum label pairs")),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// `<lambda|(A phi) = lambda <lambda|(phi)`, `|lambda>(A phi) = lambda |lambda>(phi)`,
/// and `A^|lambda> = lambda |lambda>` as functionals, for every pair and probe.
pub fn eigenequation_check(
    sd: &SpectralDecomposition,
    a: &CompositeObservable,
    probes: &[TensorVector],
    tol: f64,
) -> CheckReport {
    let name = "spectral.eigenequation";
    let run = || -> Result<f64> {
        if probes.is_empty() {
            return Err(ModelError::Precondition("no probes supplied".into()));
        }
        let images = probes.iter().map(|p| a.dense().apply(p)).collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0_f64;
        for pair in &sd.pairs {
            let lambda = Cplx::new(pair.lambda_sum, 0.0);
            let ext_ket = extend_operator(a, &pair.ket)?;
            let ext_bra = extend_operator(a, &pair.bra)?;
            for (phi, a_phi) in probes.iter().zip(&images) {
                let kb = pair.ket.eval(phi)?;
                let bb = pair.bra.eval(phi)?;
                worst = worst
                    .max((pair.bra.eval(a_phi)? - lambda * bb).norm())
                    .max((pair.ket.eval(a_phi)? - lambda * kb).norm())
                    .max((ext_ket.eval(phi)? - lambda * kb).norm())
                    .max((ext_bra.eval(phi)? - lambda * bb).norm());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(r) => CheckReport::measured(name, r, tol, format!("{} pairs x {} probes", sd.pairs.len(), probes.len())),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// Lemma for commuting observables: if `[A, B] = 0` then `B^|lambda>` and
/// `<lambda|B^` are eigen-functionals of `A^` with the same eigenvalue.
///
/// Evaluated through the pullback chain
/// `A^(B^ f)(phi) = (B^ f)(A phi) = f(B A phi)`, without the
/// representation shortcut.
pub fn lemma_commuting_check(
    a: &CompositeObservable,
    b: &HermitianOperator,
    sd: &SpectralDecomposition,
    probes: &[TensorVector],
    tol: f64,
) -> Result<CheckReport> {
    if b.matrix().nrows() != a.dense().matrix().nrows() {
        return Err(ModelError::DimensionMismatch { expected: a.dense().matrix().nrows(), found: b.matrix().nrows() });
    }
    let norm = commutator_norm(a.dense().matrix(), b.matrix());
    if norm > tol {
        return Err(ModelError::NonCommuting { norm, tol });
    }
    if probes.is_empty() {
        return Err(ModelError::Precondition("no probes supplied".into()));
    }
    let mut worst = 0.0_f64;
    for phi in probes {
        let b_phi = b.apply(phi)?;
        let b_a_phi = b.apply(&a.dense().apply(phi)?)?;
        for pair in &sd.pairs {
            let lambda = Cplx::new(pair.lambda_sum, 0.0);
            for f in [&pair.ket, &pair.bra] {
                worst = worst.max((f.eval(&b_a_phi)? - lambda * f.eval(&b_phi)?).norm());
            }
        }
    }
    Ok(CheckReport::measured(
        "lemma.commuting",
        worst,
        tol,
        format!("||[A,B]||_max = {norm:.3e}, {} pairs x {} probes", sd.pairs.len(), probes.len()),
    ))
}

/// `P~_c |lambda_1> (x) ... (x) |lambda_N>` for pair `pair`.
pub fn symmetrized_eigenvector(sd: &SpectralDecomposition, pair: usize, c: SymmetrizerKind) -> Result<Functional> {
    let p = sd.pairs.get(pair).ok_or_else(|| ModelError::Precondition(format!("no eigenpair {pair}")))?;
    dual_projector(c, &p.ket)
}

/// Bra variant `<lambda_1| (x) ... (x) <lambda_N| P~_c`.
pub fn symmetrized_eigenbra(sd: &SpectralDecomposition, pair: usize, c: SymmetrizerKind) -> Result<Functional> {
    let p = sd.pairs.get(pair).ok_or_else(|| ModelError::Precondition(format!("no eigenpair {pair}")))?;
    dual_projector(c, &p.bra)
}

/// `||[A, P_c]||_max` on dense forms.
pub fn projector_commutator(a: &CompositeObservable, c: SymmetrizerKind) -> Result<f64> {
    let p = projector_matrix(c, a.dim(), a.arity())?;
    Ok(commutator_norm(a.dense().matrix(), &p))
}

/// With identical factor observables, every symmetrized eigen-functional
/// satisfies `A^ (P~_c |lambda>) = lambda P~_c |lambda>` and the bra analogue.
pub fn symmetrized_eigenequation_check(
    a: &CompositeObservable,
    sd: &SpectralDecomposition,
    c: SymmetrizerKind,
    probes: &[TensorVector],
    tol: f64,
) -> Result<CheckReport> {
    if !a.identical_factors(tol) {
        return Err(ModelError::UnequalFactors(
            "symmetrization requires identical factor observables".into(),
        ));
    }
    let comm = projector_commutator(a, c)?;
    if comm > tol {
        return Err(ModelError::NonCommuting { norm: comm, tol });
    }
    if probes.is_empty() {
        return Err(ModelError::Precondition("no probes supplied".into()));
    }
    let images = probes.iter().map(|p| a.dense().apply(p)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0_f64;
    let mut zero = 0;
    for p in 0..sd.pairs.len() {
        let lambda = Cplx::new(sd.pairs[p].lambda_sum, 0.0);
        let ket = symmetrized_eigenvector(sd, p, c)?;
        let bra = symmetrized_eigenbra(sd, p, c)?;
        if ket.is_zero(tol) {
            zero += 1;
        }
        for (phi, a_phi) in probes.iter().zip(&images) {
            for f in [&ket, &bra] {
                worst = worst.max((f.eval(a_phi)? - lambda * f.eval(phi)?).norm());
            }
        }
    }
    Ok(CheckReport::measured(
        format!("symmetrization.eigenequation.{}", c.as_str()),
        worst,
        tol,
        format!("||[A,P]||_max = {comm:.3e}, {} pairs ({zero} vanish) x {} probes", sd.pairs.len(), probes.len()),
    ))
}
