//! Randomized property suites.
//!
//! Each suite draws its inputs from per-trial seeded streams, evaluates the
//! trials through [`Exec`], and folds them into one [`CheckReport`] per
//! property (worst residual over all trials).

use nalgebra::DMatrix;
use rand::Rng;

use crate::dual::{check_identification, Functional, FunctionalKind};
use crate::error::{ModelError, Result};
use crate::exec::Exec;
use crate::hilbert::{make_ket, Cplx, HilbertVector, ModelConfig};
use crate::observable::{
    check_extension_relation, compose_observable, max_norm, CompositeObservable, HermitianOperator,
};
use crate::permutation::{
    apply_permutation, dual_projector, projector, projector_matrix, projector_rank, symmetric_group, SymmetrizerKind,
};
use crate::random;
use crate::report::CheckReport;
use crate::spectral::{
    completeness_check, eigenequation_check, equal_sum_label_check, expand_ket, orthonormality_check, parseval_check,
    projector_commutator, reconstruct, spectral_decompose, symmetrized_eigenequation_check, symmetrized_eigenvector,
    SpectralDecomposition,
};
use crate::tensor::{tensor_inner, TensorVector};

/// Stream tags keeping suites statistically independent.
mod stream {
    pub const IDENTIFICATION: u32 = 1;
    pub const PERMUTATION: u32 = 2;
    pub const DUAL_PROJECTOR: u32 = 3;
    pub const SPECTRAL_MODELS: u32 = 4;
    pub const SPECTRAL_PROBES: u32 = 5;
    pub const EXTENSION: u32 = 6;
    pub const LEMMA: u32 = 7;
    pub const SYMMETRIZATION: u32 = 8;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: random::DEFAULT_SEED, exec: Exec::default() }
    }
}

/// Residual thresholds: `exact` for identities of pure algebra, `residual`
/// for anything that goes through an eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact: crate::hilbert::EXACT_TOL, residual: crate::hilbert::DEFAULT_TOL }
    }
}

impl Tolerances {
    pub fn from_residual(residual: f64) -> Self {
        Self { exact: residual * 1e-2, residual }
    }
}

/// Folds per-trial reports: any error wins, otherwise the worst residual.
pub fn combine(name: &str, reports: &[CheckReport], tol: f64) -> CheckReport {
    if let Some(e) = reports.iter().find(|r| r.residual.is_none()) {
        return CheckReport::error(name, tol, e.detail.clone());
    }
    let (worst_idx, worst) = reports
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.residual_or_nan()))
        .fold((0, 0.0_f64), |(bi, b), (i, r)| if r > b || r.is_nan() { (i, r) } else { (bi, b) });
    CheckReport::measured(name, worst, tol, format!("{} trials, worst trial {worst_idx}", reports.len()))
}

fn measured_or_error(name: &str, tol: f64, r: Result<f64>, detail: impl Into<String>) -> CheckReport {
    match r {
        Ok(v) => CheckReport::measured(name, v, tol, detail),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

fn random_probes<R: Rng>(rng: &mut R, dim: usize, arity: usize, count: usize) -> Vec<TensorVector> {
    (0..count).map(|_| {
        let terms = rng.random_range(1..=3);
        random::tensor(rng, dim, arity, terms)
    }).collect()
}

/// Composite kets/bras versus tensor products of single-factor ones.
pub fn identification(opts: SuiteOptions, dim: usize, n: usize, tuples: usize, probes: usize, tol: f64) -> CheckReport {
    let name = format!("identification.d{dim}n{n}");
    let model = match ModelConfig::new(dim, n) {
        Ok(m) => m,
        Err(e) => return CheckReport::error(name, tol, e.to_string()),
    };
    let reports = opts.exec.map_range(tuples, |t| {
        let mut rng = random::trial_rng(opts.seed, stream::IDENTIFICATION, t as u32);
        let factors: Vec<_> = (0..n).map(|_| random::vector(&mut rng, dim)).collect();
        let probes = random_probes(&mut rng, dim, n, probes);
        check_identification(&model, &factors, &probes, tol)
    });
    combine(&name, &reports, tol)
}

/// Unitarity of `U_sigma`, the composition rule, idempotence and
/// self-adjointness of `P_c`, and the `N = 2` / `N >= 3` complement facts.
pub fn permutation_algebra(opts: SuiteOptions, dim: usize, n: usize, trials: usize, tol: f64) -> Vec<CheckReport> {
    let tag = format!("d{dim}n{n}");
    let group = match symmetric_group(n) {
        Ok(g) => g,
        Err(e) => return vec![CheckReport::error(format!("permutation.{tag}"), tol, e.to_string())],
    };
    let per_trial = opts.exec.map_range(trials, |t| -> Result<[f64; 4]> {
        let mut rng = random::trial_rng(opts.seed, stream::PERMUTATION, t as u32);
        let a = random::tensor(&mut rng, dim, n, 2);
        let b = random::tensor(&mut rng, dim, n, 2);
        let base = tensor_inner(&a, &b)?;
        let mut unitary = 0.0_f64;
        for sigma in group {
            let (ua, ub) = (apply_permutation(sigma, &a)?, apply_permutation(sigma, &b)?);
            unitary = unitary.max((tensor_inner(&ua, &ub)? - base).norm());
        }
        let sigma = &group[rng.random_range(0..group.len())];
        let tau = &group[rng.random_range(0..group.len())];
        let lhs = apply_permutation(tau, &apply_permutation(sigma, &a)?)?;
        let rhs = apply_permutation(&sigma.compose(tau)?, &a)?;
        let composition = lhs.max_abs_diff(&rhs)?;
        let (mut idem, mut adjoint) = (0.0_f64, 0.0_f64);
        for c in SymmetrizerKind::BOTH {
            let pa = projector(c, &a)?;
            idem = idem.max(projector(c, &pa)?.max_abs_diff(&pa)?);
            let pb = projector(c, &b)?;
            adjoint = adjoint.max((tensor_inner(&pa, &b)? - tensor_inner(&a, &pb)?).norm());
        }
        Ok([unitary, composition, idem, adjoint])
    });
    let names = ["unitarity", "composition", "idempotence", "self_adjoint"];
    let mut out: Vec<CheckReport> = names
        .iter()
        .enumerate()
        .map(|(k, prop)| {
            let reports: Vec<CheckReport> = per_trial
                .iter()
                .map(|r| match r {
                    Ok(v) => CheckReport::measured(*prop, v[k], tol, ""),
                    Err(e) => CheckReport::error(*prop, tol, e.to_string()),
                })
                .collect();
            combine(&format!("permutation.{prop}.{tag}"), &reports, tol)
        })
        .collect();
    if n >= 2 && dim >= 2 {
        out.push(complement_check(dim, n, tol));
    }
    out
}

/// `N = 2`: `P_sym + P_antisym = I`. `N >= 3`: the ranks leave a nonzero
/// mixed-symmetry complement.
pub fn complement_check(dim: usize, n: usize, tol: f64) -> CheckReport {
    let name = format!("permutation.complement.d{dim}n{n}");
    let run = || -> Result<(f64, String, f64)> {
        let ps = projector_matrix(SymmetrizerKind::Sym, dim, n)?;
        let pa = projector_matrix(SymmetrizerKind::Antisym, dim, n)?;
        let len = ps.nrows();
        if n == 2 {
            let r = max_norm(&(&ps + &pa - DMatrix::<Cplx>::identity(len, len)));
            Ok((r, format!("||P_sym + P_antisym - I||_max = {r:.3e}"), tol))
        } else {
            let (rs, ra) = (projector_rank(&ps), projector_rank(&pa));
            let deficit = len as f64 - (rs + ra) as f64;
            // Pass iff deficit >= 1.
            Ok(((1.0 - deficit).max(0.0), format!("rank sym {rs} + rank antisym {ra} vs {len}: deficit {deficit}"), 0.0))
        }
    };
    match run() {
        Ok((r, detail, t)) => CheckReport::measured(name, r, t, detail),
        Err(e) => CheckReport::error(name, tol, e.to_string()),
    }
}

/// Definitional `f(P_c phi)` against the representation shortcut, and the
/// explicit permuted-product form for product functionals.
pub fn dual_projector_consistency(
    opts: SuiteOptions,
    dim: usize,
    n: usize,
    functionals: usize,
    probes: usize,
    tol: f64,
) -> Vec<CheckReport> {
    let tag = format!("d{dim}n{n}");
    let results = opts.exec.map_range(functionals, |t| -> Result<(f64, f64)> {
        let mut rng = random::trial_rng(opts.seed, stream::DUAL_PROJECTOR, t as u32);
        let kind = random::kind(&mut rng);
        let terms = rng.random_range(1..=3);
        let f = random::functional(&mut rng, kind, dim, n, terms);
        let singles: Vec<Functional> = (0..n)
            .map(|_| Functional::new(kind, TensorVector::from_vector(&random::vector(&mut rng, dim))))
            .collect();
        let probes = random_probes(&mut rng, dim, n, probes);
        let group = symmetric_group(n)?;
        let norm = 1.0 / group.len() as f64;
        let mut product = singles[0].clone();
        for g in &singles[1..] {
            product = product.tensor(g)?;
        }
        let (mut shortcut, mut explicit) = (0.0_f64, 0.0_f64);
        for c in SymmetrizerKind::BOTH {
            let fp = dual_projector(c, &f)?;
            let gp = dual_projector(c, &product)?;
            // (1/N!) sum_sigma c(sigma) f_sigma(1) (x) ... (x) f_sigma(N)
            let mut sum = Functional::zero(kind, dim, n)?;
            for sigma in group {
                let mut term = singles[sigma.image(0)].clone();
                for k in 1..n {
                    term = term.tensor(&singles[sigma.image(k)])?;
                }
                sum = sum.add(&term.scale(Cplx::new(norm * c.character(sigma), 0.0)))?;
            }
            for phi in &probes {
                let projected = projector(c, phi)?;
                shortcut = shortcut.max((fp.eval(phi)? - f.eval(&projected)?).norm());
                explicit = explicit.max((gp.eval(phi)? - sum.eval(phi)?).norm());
            }
        }
        Ok((shortcut, explicit))
    });
    let fold = |name: &str, pick: fn(&(f64, f64)) -> f64| {
        let reports: Vec<_> = results
            .iter()
            .map(|r| match r {
                Ok(v) => CheckReport::measured(name, pick(v), tol, ""),
                Err(e) => CheckReport::error(name, tol, e.to_string()),
            })
            .collect();
        combine(&format!("dual_projector.{name}.{tag}"), &reports, tol)
    };
    vec![fold("shortcut", |v| v.0), fold("product_form", |v| v.1)]
}

/// All spectral checks on one composite observable.
pub fn spectral_model(
    opts: SuiteOptions,
    a: &CompositeObservable,
    vectors: usize,
    probes: usize,
    tol: f64,
    stream_id: u32,
) -> Vec<CheckReport> {
    let sd = match spectral_decompose(a) {
        Ok(sd) => sd,
        Err(e) => return vec![CheckReport::error("spectral.decompose", tol, e.to_string())],
    };
    spectral_checks(opts, a, &sd, vectors, probes, tol, stream_id)
}

fn spectral_checks(
    opts: SuiteOptions,
    a: &CompositeObservable,
    sd: &SpectralDecomposition,
    vectors: usize,
    probes: usize,
    tol: f64,
    stream_id: u32,
) -> Vec<CheckReport> {
    let (d, n) = (a.dim(), a.arity());
    let mut rng = random::trial_rng(opts.seed, stream::SPECTRAL_PROBES, stream_id);
    let mut out = Vec::new();

    let spectrum = sd.spectrum();
    let sumset = sd.factor_sumset();
    let sumset_residual = if spectrum.len() == sumset.len() {
        spectrum.iter().zip(&sumset).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    out.push(CheckReport::measured(
        "spectral.sumset",
        sumset_residual,
        0.0,
        format!("{} distinct values", spectrum.len()),
    ));
    out.push(dense_eigenvalue_check(sd, tol));

    let phis: Vec<_> = (0..vectors).map(|_| random_probes(&mut rng, d, n, 1).remove(0)).collect();
    let psis: Vec<_> = (0..vectors).map(|_| random_probes(&mut rng, d, n, 1).remove(0)).collect();
    let recon = opts.exec.map(&phis, |phi| -> Result<f64> {
        let back = reconstruct(sd, &expand_ket(sd, phi)?)?;
        Ok(back.sub(phi)?.norm())
    });
    let recon_reports: Vec<_> = recon
        .into_iter()
        .map(|r| measured_or_error("spectral.reconstruction", tol, r, ""))
        .collect();
    out.push(combine("spectral.reconstruction", &recon_reports, tol));

    let pairs: Vec<_> = phis.iter().zip(&psis).collect();
    let parseval = opts.exec.map(&pairs, |(phi, psi)| parseval_check(sd, phi, psi, tol));
    out.push(combine("spectral.parseval", &parseval, tol));

    out.push(completeness_check(sd, tol));
    out.push(orthonormality_check(sd, tol));
    out.push(equal_sum_label_check(sd, tol));
    let probes = random_probes(&mut rng, d, n, probes);
    out.push(eigenequation_check(sd, a, &probes, tol));
    out
}

/// Composite spectrum against a direct dense diagonalization of `A`.
pub fn dense_eigenvalue_check(sd: &SpectralDecomposition, tol: f64) -> CheckReport {
    let eig = nalgebra::SymmetricEigen::new(sd.operator().matrix().clone());
    let mut dense: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let mut sums: Vec<f64> = sd.pairs().iter().map(|p| p.lambda_sum).collect();
    sums.sort_by(f64::total_cmp);
    let r = dense.iter().zip(&sums).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    CheckReport::measured("spectral.dense_eigenvalues", r, tol, format!("{} eigenvalues", sums.len()))
}

/// Random factor-observable models; every other model repeats one factor
/// observable so that equal sums with distinct labels occur.
pub fn random_models(opts: SuiteOptions, count: usize, max_dim: usize, max_factors: usize) -> Vec<CompositeObservable> {
    (0..count)
        .map(|m| {
            let mut rng = random::trial_rng(opts.seed, stream::SPECTRAL_MODELS, m as u32);
            let d = rng.random_range(2..=max_dim.max(2));
            let n = rng.random_range(1..=max_factors.max(1));
            let ops = if m % 2 == 0 {
                (0..n).map(|k| random::factor_observable(&mut rng, &format!("A{}", k + 1), d)).collect()
            } else {
                let op = random::factor_observable(&mut rng, "A", d);
                vec![op; n]
            };
            compose_observable(ops).expect("random models are valid")
        })
        .collect()
}

/// The spectral suite over many random models, folded per check name.
pub fn spectral_random(opts: SuiteOptions, models: &[CompositeObservable], vectors: usize, probes: usize, tol: f64) -> Vec<CheckReport> {
    let per_model = opts.exec.map_range(models.len(), |m| {
        spectral_model(SuiteOptions { exec: Exec::Sequential, ..opts }, &models[m], vectors, probes, tol, m as u32)
    });
    fold_by_name(&per_model)
}

fn fold_by_name(per_trial: &[Vec<CheckReport>]) -> Vec<CheckReport> {
    let mut names: Vec<String> = Vec::new();
    for r in per_trial.iter().flatten() {
        if !names.contains(&r.name) {
            names.push(r.name.clone());
        }
    }
    names
        .iter()
        .map(|name| {
            let reports: Vec<CheckReport> = per_trial.iter().flatten().filter(|r| &r.name == name).cloned().collect();
            let tol = reports[0].tolerance;
            combine(name, &reports, tol)
        })
        .collect()
}

/// Two-path check of the factorwise extension relation for random
/// `terms`-term functionals of both kinds.
pub fn extension(opts: SuiteOptions, a: &CompositeObservable, functionals: usize, terms: usize, probes: usize, tol: f64) -> Vec<CheckReport> {
    let (d, n) = (a.dim(), a.arity());
    let model1 = ModelConfig::new(d, 1).expect("factor space is valid");
    [FunctionalKind::Bra, FunctionalKind::Ket]
        .into_iter()
        .map(|kind| {
            let salt = if kind == FunctionalKind::Bra { 0 } else { 1 << 20 };
            let reports = opts.exec.map_range(functionals, |t| {
                let mut rng = random::trial_rng(opts.seed, stream::EXTENSION, salt + t as u32);
                let f_terms: Vec<Vec<Functional>> = (0..terms)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let k = make_ket(&model1, &random::vector(&mut rng, d)).expect("dimension matches");
                                if kind == FunctionalKind::Bra { k.conjugate() } else { k }
                            })
                            .collect()
                    })
                    .collect();
                let probes = random_probes(&mut rng, d, n, probes);
                check_extension_relation(a, &f_terms, &probes, tol)
            });
            combine(&format!("extension.two_path.{}", kind.as_str()), &reports, tol)
        })
        .collect()
}

/// Random Hermitian `B` commuting with `A`: even trials are real polynomials
/// in `A`, odd trials real polynomials in the embedded factor observables.
pub fn random_commuting<R: Rng>(rng: &mut R, a: &CompositeObservable, trial: usize) -> HermitianOperator {
    let (d, n) = (a.dim(), a.arity());
    let id = HermitianOperator::identity(d, n).expect("valid space");
    let mut coeff = || rng.random_range(-1.0..1.0);
    let m = if trial.is_multiple_of(2) {
        let a1 = a.dense().matrix();
        let a2 = a1 * a1;
        let a3 = &a2 * a1;
        id.matrix() * Cplx::new(coeff(), 0.0) + a1 * Cplx::new(coeff(), 0.0) + a2 * Cplx::new(coeff(), 0.0) + a3 * Cplx::new(coeff(), 0.0)
    } else {
        let factors: Vec<_> = (0..n).map(|k| a.embedded_factor(k).matrix().clone()).collect();
        let mut m = id.matrix() * Cplx::new(coeff(), 0.0);
        for f in &factors {
            m += f * Cplx::new(coeff(), 0.0) + (f * f) * Cplx::new(coeff(), 0.0);
        }
        if n >= 2 {
            m += (&factors[0] * &factors[1]) * Cplx::new(coeff(), 0.0);
        }
        m
    };
    // Products of commuting Hermitian matrices are Hermitian up to rounding;
    // symmetrize so validation sees an exactly Hermitian matrix.
    let m = (&m + m.adjoint()) * Cplx::new(0.5, 0.0);
    HermitianOperator::new(d, n, m, 1e-9).expect("hermitian by construction")
}

pub fn lemma(opts: SuiteOptions, a: &CompositeObservable, trials: usize, probes: usize, tol: f64) -> Vec<CheckReport> {
    let sd = match spectral_decompose(a) {
        Ok(sd) => sd,
        Err(e) => return vec![CheckReport::error("lemma.commuting", tol, e.to_string())],
    };
    let (d, n) = (a.dim(), a.arity());
    let reports = opts.exec.map_range(trials, |t| {
        let mut rng = random::trial_rng(opts.seed, stream::LEMMA, t as u32);
        let b = random_commuting(&mut rng, a, t);
        let probes = random_probes(&mut rng, d, n, probes);
        match crate::spectral::lemma_commuting_check(a, &b, &sd, &probes, tol) {
            Ok(r) => r,
            Err(e) => CheckReport::error("lemma.commuting", tol, e.to_string()),
        }
    });
    let mut out = vec![combine("lemma.commuting", &reports, tol)];

    // Negative control: a generic Hermitian B must be rejected. A scalar A
    // commutes with everything, so there is nothing to reject.
    let a_m = a.dense().matrix();
    let len = a_m.nrows();
    let shift = a_m.trace() / Cplx::new(len as f64, 0.0);
    let scalar = max_norm(&(a_m - DMatrix::<Cplx>::identity(len, len) * shift)) <= tol;
    if !scalar {
        let mut rng = random::trial_rng(opts.seed, stream::LEMMA, u32::MAX);
        let b = random::hermitian_operator(&mut rng, d, n);
        let probe = random_probes(&mut rng, d, n, 1);
        let name = "lemma.noncommuting_rejected";
        out.push(match crate::spectral::lemma_commuting_check(a, &b, &sd, &probe, tol) {
            Err(ModelError::NonCommuting { norm, .. }) => {
                CheckReport::measured(name, 0.0, 0.0, format!("rejected: ||[A,B]||_max = {norm:.6e}"))
            }
            Err(e) => CheckReport::error(name, 0.0, e.to_string()),
            Ok(_) => CheckReport::measured(name, 1.0, 0.0, "non-commuting B was accepted"),
        });
    }
    out
}

/// Identical factors: `[A, P_c] = 0`, the symmetrized eigen-functionals
/// satisfy the eigenequations, and match the explicit permuted-label form.
/// Unequal factors: negative control requiring `||[A, P_sym]|| > 1e-6`.
pub fn symmetrization(opts: SuiteOptions, a: &CompositeObservable, probes: usize, tols: Tolerances) -> Vec<CheckReport> {
    if !a.identical_factors(tols.exact) {
        let name = "symmetrization.negative_control";
        return vec![match projector_commutator(a, SymmetrizerKind::Sym) {
            Ok(norm) => CheckReport::measured(
                name,
                (NEGATIVE_CONTROL_MIN - norm).max(0.0),
                0.0,
                format!("unequal factors: ||[A,P_sym]||_max = {norm:.6e} (required > {NEGATIVE_CONTROL_MIN:e})"),
            ),
            Err(e) => CheckReport::error(name, 0.0, e.to_string()),
        }];
    }
    let sd = match spectral_decompose(a) {
        Ok(sd) => sd,
        Err(e) => return vec![CheckReport::error("symmetrization", tols.residual, e.to_string())],
    };
    let (d, n) = (a.dim(), a.arity());
    let mut rng = random::trial_rng(opts.seed, stream::SYMMETRIZATION, 0);
    let probes = random_probes(&mut rng, d, n, probes);
    let mut out = Vec::new();
    for c in SymmetrizerKind::BOTH {
        let cname = format!("symmetrization.commutator.{}", c.as_str());
        out.push(match projector_commutator(a, c) {
            Ok(norm) => CheckReport::measured(cname, norm, tols.exact, "||[A,P_c]||_max"),
            Err(e) => CheckReport::error(cname, tols.exact, e.to_string()),
        });
        out.push(match symmetrized_eigenequation_check(a, &sd, c, &probes, tols.residual) {
            Ok(r) => r,
            Err(e) => CheckReport::error(format!("symmetrization.eigenequation.{}", c.as_str()), tols.residual, e.to_string()),
        });
        let ename = format!("symmetrization.explicit_form.{}", c.as_str());
        out.push(measured_or_error(&ename, tols.exact, explicit_form_residual(&sd, c, &probes), "P~_c|l> vs permuted labels"));
    }
    out
}

/// Required commutator for the unequal-factor negative control.
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-6;

/// `P~_c |l_1> (x) ... (x) |l_N>` against `(1/N!) sum_sigma c(sigma) |l_sigma(1)> (x) ... (x) |l_sigma(N)>`.
fn explicit_form_residual(sd: &SpectralDecomposition, c: SymmetrizerKind, probes: &[TensorVector]) -> Result<f64> {
    let n = sd.arity();
    let group = symmetric_group(n)?;
    let norm = 1.0 / group.len() as f64;
    let mut worst = 0.0_f64;
    for (p, pair) in sd.pairs().iter().enumerate() {
        let vecs: Vec<&HilbertVector> =
            pair.factor_indices.iter().zip(sd.factor_bases()).map(|(&j, b)| &b.vectors()[j]).collect();
        let mut explicit = TensorVector::zero(sd.dim(), n)?;
        for sigma in group {
            let permuted: Vec<HilbertVector> = (0..n).map(|k| vecs[sigma.image(k)].clone()).collect();
            explicit = explicit.add(&TensorVector::product(&permuted)?.scale(Cplx::new(norm * c.character(sigma), 0.0)))?;
        }
        let explicit = Functional::new(FunctionalKind::Ket, explicit);
        let sym = symmetrized_eigenvector(sd, p, c)?;
        worst = worst.max(sym.max_eval_diff(&explicit, probes)?);
    }
    Ok(worst)
}
