//! Model files, subcommand bodies and report rendering for the binary.
//!
//! Subcommands return a [`CmdOutput`] instead of printing so they can be
//! driven from tests. Exit codes: 0 all checks pass, 1 a check failed or
//! errored, 2 the model or expression could not be loaded.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::dsl::{self, Binding, Bindings, Value};
use crate::error::ModelError;
use crate::exec::Exec;
use crate::hilbert::{Cplx, HilbertVector, ModelConfig, DEFAULT_TOL};
use crate::observable::{compose_observable, CompositeObservable, FactorObservable};
use crate::report::{fmt_g17, json_str, CheckReport};
use crate::spectral::spectral_decompose;
use crate::suite::{self, SuiteOptions, Tolerances};

/// The model shipped with the binary and used by `demo`.
pub const TWO_QUBIT_MODEL: &str = include_str!("../models/two_qubit.json");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Suite names in their fixed run order.
pub const SUITES: [&str; 7] =
    ["identification", "permutation", "spectral", "extension", "lemma", "symmetrization", "expressions"];

/// Name the composite observable is bound to in expressions, if free.
pub const COMPOSITE_NAME: &str = "A";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("invalid model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    /// Rows of `[re, im]` entries.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedVector {
    pub name: String,
    pub coords: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Scalar([f64; 2]),
    /// Only `"zero"` is accepted: the value must vanish.
    Label(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExpressionEntry {
    Bare(String),
    Checked {
        expr: String,
        #[serde(default)]
        expected: Option<Expected>,
    },
}

impl ExpressionEntry {
    pub fn expr(&self) -> &str {
        match self {
            ExpressionEntry::Bare(e) | ExpressionEntry::Checked { expr: e, .. } => e,
        }
    }

    pub fn expected(&self) -> Option<&Expected> {
        match self {
            ExpressionEntry::Bare(_) => None,
            ExpressionEntry::Checked { expected, .. } => expected.as_ref(),
        }
    }
}

/// On-disk model description.
///
/// The composite observable is built from `composite` (observable names,
/// one per factor) when given; otherwise from `observables` in order when
/// there are exactly `factors` of them, or from a single observable
/// repeated on every factor.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dim: usize,
    pub factors: usize,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub observables: Vec<NamedMatrix>,
    #[serde(default)]
    pub vectors: Vec<NamedVector>,
    #[serde(default)]
    pub composite: Option<Vec<String>>,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub expressions: Vec<ExpressionEntry>,
}

/// A validated model ready for checks and expression evaluation.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub file: ModelFile,
    pub config: ModelConfig,
    pub observables: Vec<FactorObservable>,
    pub composite: Option<CompositeObservable>,
    pub bindings: Bindings,
}

fn cplx(e: [f64; 2]) -> Cplx {
    Cplx::new(e[0], e[1])
}

fn load_matrix(m: &NamedMatrix, dim: usize, tol: f64) -> Result<FactorObservable, LoadError> {
    if m.matrix.len() != dim || m.matrix.iter().any(|row| row.len() != dim) {
        return Err(LoadError::Invalid(format!("observable `{}` must be {dim}x{dim}", m.name)));
    }
    if m.matrix.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(LoadError::Invalid(format!("observable `{}` has a non-finite entry", m.name)));
    }
    let raw = DMatrix::from_fn(dim, dim, |i, j| cplx(m.matrix[i][j]));
    FactorObservable::with_tol(m.name.clone(), raw.clone(), tol)?;
    // Remove asymmetry below the tolerance so later checks see an exactly Hermitian matrix.
    let herm = (&raw + raw.adjoint()) * Cplx::new(0.5, 0.0);
    Ok(FactorObservable::with_tol(m.name.clone(), herm, tol)?)
}

pub fn parse_model(text: &str) -> Result<LoadedModel, LoadError> {
    let file: ModelFile = serde_json::from_str(text)?;
    let tol = file.tol.unwrap_or(DEFAULT_TOL);
    let config = ModelConfig::with_tol(file.dim, file.factors, tol)?;
    let mut bindings = Bindings::new(config);

    let mut observables = Vec::new();
    for m in &file.observables {
        let op = load_matrix(m, file.dim, tol)?;
        bindings.insert(m.name.clone(), Binding::Factor(op.clone()))?;
        observables.push(op);
    }
    for v in &file.vectors {
        if v.coords.len() != file.dim {
            return Err(LoadError::Invalid(format!("vector `{}` must have {} entries", v.name, file.dim)));
        }
        let hv = HilbertVector::new(v.coords.iter().copied().map(cplx).collect())?;
        bindings.insert(v.name.clone(), Binding::Vector(hv))?;
    }

    let chosen: Option<Vec<FactorObservable>> = match &file.composite {
        Some(names) => {
            if names.len() != file.factors {
                return Err(LoadError::Invalid(format!(
                    "`composite` lists {} observables for {} factors",
                    names.len(),
                    file.factors
                )));
            }
            let ops = names
                .iter()
                .map(|n| {
                    observables
                        .iter()
                        .find(|o| o.name() == n)
                        .cloned()
                        .ok_or_else(|| LoadError::Invalid(format!("`composite` names unknown observable `{n}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(ops)
        }
        None if observables.len() == file.factors => Some(observables.clone()),
        None if observables.len() == 1 => Some(vec![observables[0].clone(); file.factors]),
        None if observables.is_empty() => None,
        None => {
            return Err(LoadError::Invalid(format!(
                "{} observables for {} factors; list the factor order in `composite`",
                observables.len(),
                file.factors
            )))
        }
    };
    let composite = chosen.map(compose_observable).transpose()?;
    if let Some(a) = &composite {
        bindings.set_hat(a.clone())?;
        if bindings.get(COMPOSITE_NAME).is_none() {
            bindings.insert(COMPOSITE_NAME, Binding::Composite(a.clone()))?;
        }
    }

    for s in &file.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(LoadError::Invalid(format!("unknown suite `{s}`")));
        }
    }
    for e in &file.expressions {
        if let Some(Expected::Label(l)) = e.expected() {
            if l != "zero" {
                return Err(LoadError::Invalid(format!("unknown expected value `{l}` for `{}`", e.expr())));
            }
        }
    }
    Ok(LoadedModel { file, config, observables, composite, bindings })
}

pub fn load_model(path: &Path) -> Result<LoadedModel, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_model(&text)
}

/// Options shared by `check` and `demo`.
#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub suites: Vec<String>,
    pub tol: Option<f64>,
    pub format: Format,
    pub seed: u64,
    pub exec: Exec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn config_error(message: impl std::fmt::Display) -> Self {
        Self { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Suites to run: the command line wins over the model file; with neither,
/// everything applicable runs.
pub fn select_suites(model: &LoadedModel, requested: &[String]) -> Result<Vec<&'static str>, String> {
    let source: Vec<&str> = if !requested.is_empty() {
        requested.iter().map(String::as_str).collect()
    } else if !model.file.suites.is_empty() {
        model.file.suites.iter().map(String::as_str).collect()
    } else {
        SUITES.iter().copied().filter(|&s| s != "expressions" || !model.file.expressions.is_empty()).collect()
    };
    let mut out = Vec::new();
    for s in source {
        let known = SUITES.iter().find(|&&k| k == s).ok_or_else(|| format!("unknown suite `{s}`"))?;
        if !out.contains(known) {
            out.push(*known);
        }
    }
    out.sort_by_key(|s| SUITES.iter().position(|k| k == s));
    Ok(out)
}

fn needs_composite(name: &str, model: &LoadedModel, tol: f64) -> Option<Vec<CheckReport>> {
    model
        .composite
        .is_none()
        .then(|| vec![CheckReport::error(name, tol, "the model defines no composite observable")])
}

/// Runs one suite against the loaded model.
pub fn run_suite(name: &str, model: &LoadedModel, opts: SuiteOptions, tols: Tolerances) -> Vec<CheckReport> {
    let (d, n) = (model.config.dim(), model.config.factors());
    match name {
        "identification" => vec![suite::identification(opts, d, n, 100, 50, tols.exact)],
        "permutation" => {
            let mut out = suite::permutation_algebra(opts, d, n, 20, tols.exact);
            out.extend(suite::dual_projector_consistency(opts, d, n, 100, 50, tols.exact));
            out
        }
        "spectral" => needs_composite(name, model, tols.residual).unwrap_or_else(|| {
            suite::spectral_model(opts, model.composite.as_ref().unwrap(), 20, 50, tols.residual, 0)
        }),
        "extension" => needs_composite(name, model, tols.residual)
            .unwrap_or_else(|| suite::extension(opts, model.composite.as_ref().unwrap(), 100, 5, 50, tols.residual)),
        "lemma" => needs_composite(name, model, tols.residual)
            .unwrap_or_else(|| suite::lemma(opts, model.composite.as_ref().unwrap(), 20, 50, tols.residual)),
        "symmetrization" => needs_composite(name, model, tols.residual)
            .unwrap_or_else(|| suite::symmetrization(opts, model.composite.as_ref().unwrap(), 50, tols)),
        "expressions" => expression_reports(model, tols.exact),
        other => vec![CheckReport::error(other, tols.residual, "unknown suite")],
    }
}

/// One report per model-file expression: it must evaluate, and match its
/// expected value when one is given.
pub fn expression_reports(model: &LoadedModel, tol: f64) -> Vec<CheckReport> {
    model
        .file
        .expressions
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let name = format!("expressions.{}", i + 1);
            let src = entry.expr();
            let value = match dsl::parse_str(src).and_then(|ast| dsl::evaluate(&ast, &model.bindings)) {
                Ok(v) => v,
                Err(e) => return CheckReport::error(name, tol, format!("{src}: {e}")),
            };
            match entry.expected() {
                None => CheckReport::measured(name, 0.0, tol, format!("{src} = {value}")),
                Some(Expected::Scalar(e)) => match value.as_scalar() {
                    Some(v) => CheckReport::measured(name, (v - cplx(*e)).norm(), tol, format!("{src} = {value}")),
                    None => CheckReport::error(name, tol, format!("{src}: expected a scalar, got {value}")),
                },
                Some(Expected::Label(_)) => {
                    let size = match &value {
                        Value::Scalar(c) => c.norm(),
                        Value::Vector(v) => v.dense().iter().map(|c| c.norm()).fold(0.0, f64::max),
                        Value::Functional(f) => f.rep().dense().iter().map(|c| c.norm()).fold(0.0, f64::max),
                        Value::Operator(_) => f64::NAN,
                    };
                    CheckReport::measured(name, size, tol, format!("{src} = {value}"))
                }
            }
        })
        .collect()
}

fn render_reports(reports: &[CheckReport], format: Format) -> String {
    let mut out = String::new();
    for r in reports {
        match format {
            Format::Json => out.push_str(&r.to_json_line()),
            Format::Text => out.push_str(&r.to_text_line()),
        }
        out.push('\n');
    }
    if format == Format::Text {
        let failed = reports.iter().filter(|r| !r.passed()).count();
        let _ = writeln!(out, "{} checks, {} passed, {} failed", reports.len(), reports.len() - failed, failed);
    }
    out
}

fn run_checks(model: &LoadedModel, opts: &CheckOptions) -> CmdOutput {
    let suites = match select_suites(model, &opts.suites) {
        Ok(s) => s,
        Err(e) => return CmdOutput::config_error(e),
    };
    let tol = opts.tol.or(model.file.tol).unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return CmdOutput::config_error(format!("tolerance must be positive, got {tol}"));
    }
    let tols = Tolerances::from_residual(tol);
    let sopts = SuiteOptions { seed: opts.seed, exec: opts.exec };
    let reports: Vec<CheckReport> = suites.iter().flat_map(|s| run_suite(s, model, sopts, tols)).collect();
    let code = if reports.iter().all(CheckReport::passed) { EXIT_PASS } else { EXIT_FAIL };
    CmdOutput { code, stdout: render_reports(&reports, opts.format), stderr: String::new() }
}

pub fn cmd_check(config: &Path, opts: &CheckOptions) -> CmdOutput {
    match load_model(config) {
        Ok(model) => run_checks(&model, opts),
        Err(e) => CmdOutput::config_error(e),
    }
}

/// Full check run on the bundled two-qubit model.
pub fn cmd_demo(opts: &CheckOptions) -> CmdOutput {
    match parse_model(TWO_QUBIT_MODEL) {
        Ok(model) => run_checks(&model, opts),
        Err(e) => CmdOutput::config_error(e),
    }
}

fn json_f64s(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_g17(x)).collect();
    format!("[{}]", parts.join(","))
}

fn json_usizes(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn json_cplxs(xs: &[Cplx]) -> String {
    let parts: Vec<String> = xs.iter().map(|c| format!("[{},{}]", fmt_g17(c.re), fmt_g17(c.im))).collect();
    format!("[{}]", parts.join(","))
}

/// Eigen-decomposition of the composite observable, one record per line:
/// a header with the spectrum, then each eigenpair in label order.
pub fn spectral_report(model: &LoadedModel, format: Format) -> Result<String, LoadError> {
    let a = model
        .composite
        .as_ref()
        .ok_or_else(|| LoadError::Invalid("the model defines no composite observable".into()))?;
    let sd = spectral_decompose(a)?;
    let mut out = String::new();
    let spectrum = sd.spectrum();
    let degeneracy: Vec<usize> = sd.groups().iter().map(|g| g.pairs.len()).collect();
    match format {
        Format::Json => {
            let _ = writeln!(
                out,
                "{{\"dim\":{},\"factors\":{},\"spectrum\":{},\"degeneracy\":{}}}",
                sd.dim(),
                sd.arity(),
                json_f64s(&spectrum),
                json_usizes(&degeneracy)
            );
        }
        Format::Text => {
            let _ = writeln!(out, "dim {} factors {} spectrum {:?} degeneracy {:?}", sd.dim(), sd.arity(), spectrum, degeneracy);
        }
    }
    for (i, p) in sd.pairs().iter().enumerate() {
        let level = sd.groups().iter().find(|g| g.pairs.contains(&i)).map_or(1, |g| g.pairs.len());
        match format {
            Format::Json => {
                let _ = writeln!(
                    out,
                    "{{\"index\":{i},\"lambdas\":{},\"mult_indices\":{},\"lambda_sum\":{},\"sum_degeneracy\":{level},\"weight\":{},\"vector\":{}}}",
                    json_f64s(&p.lambdas),
                    json_usizes(&p.mult_indices),
                    fmt_g17(p.lambda_sum),
                    fmt_g17(p.weight),
                    json_cplxs(p.rep().dense()),
                );
            }
            Format::Text => {
                let coords: Vec<String> = p.rep().dense().iter().map(|&c| dsl::format_cplx(c)).collect();
                let _ = writeln!(
                    out,
                    "#{i} lambdas {:?} mult {:?} sum {} (x{level}) vector [{}]",
                    p.lambdas,
                    p.mult_indices,
                    p.lambda_sum,
                    coords.join(", ")
                );
            }
        }
    }
    Ok(out)
}

pub fn cmd_spectral(config: &Path, format: Format) -> CmdOutput {
    match load_model(config).and_then(|m| spectral_report(&m, format)) {
        Ok(stdout) => CmdOutput { code: EXIT_PASS, stdout, stderr: String::new() },
        Err(e) => CmdOutput::config_error(e),
    }
}

/// Evaluates one expression against the model's bindings.
pub fn eval_expression(model: &LoadedModel, expr: &str, format: Format) -> CmdOutput {
    let value = match dsl::parse_str(expr).and_then(|ast| dsl::evaluate(&ast, &model.bindings)) {
        Ok(v) => v,
        Err(e) => {
            return CmdOutput { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("{}\n", e.render(expr)) };
        }
    };
    let stdout = match format {
        Format::Text => format!("{value}\n"),
        Format::Json => format!("{}\n", value_json(expr, &value)),
    };
    CmdOutput { code: EXIT_PASS, stdout, stderr: String::new() }
}

fn value_json(expr: &str, value: &Value) -> String {
    let body = match value {
        Value::Scalar(c) => format!("\"kind\":\"scalar\",\"value\":[{},{}]", fmt_g17(c.re), fmt_g17(c.im)),
        Value::Vector(v) => format!("\"kind\":\"vector\",\"factors\":{},\"coords\":{}", v.arity(), json_cplxs(v.dense())),
        Value::Functional(f) => format!(
            "\"kind\":\"{}\",\"factors\":{},\"zero\":{},\"rep\":{}",
            f.kind().as_str(),
            f.arity(),
            f.is_zero(crate::hilbert::EXACT_TOL),
            json_cplxs(f.rep().dense())
        ),
        Value::Operator(_) => format!("\"kind\":\"operator\",\"description\":{}", json_str(&value.to_string())),
    };
    format!("{{\"expr\":{},{body}}}", json_str(expr))
}

pub fn cmd_eval(config: Option<&Path>, expr: &str, format: Format) -> CmdOutput {
    let model = match config {
        Some(path) => load_model(path),
        None => parse_model(TWO_QUBIT_MODEL),
    };
    match model {
        Ok(m) => eval_expression(&m, expr, format),
        Err(e) => CmdOutput::config_error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(suites: &[&str]) -> CheckOptions {
        CheckOptions {
            suites: suites.iter().map(|s| s.to_string()).collect(),
            seed: 42,
            ..CheckOptions::default()
        }
    }

    #[test]
    fn bundled_model_loads() {
        let m = parse_model(TWO_QUBIT_MODEL).unwrap();
        assert_eq!(m.config.dim(), 2);
        assert_eq!(m.config.factors(), 2);
        assert!(m.composite.is_some());
        assert!(m.bindings.get("A").is_some());
    }

    #[test]
    fn non_hermitian_matrix_is_named() {
        let text = r#"{"dim":2,"factors":2,"observables":[{"name":"Bad","matrix":[[[1,0],[1,0]],[[0,0],[1,0]]]}]}"#;
        let e = parse_model(text).unwrap_err();
        assert!(e.to_string().contains("Bad"), "{e}");
    }

    #[test]
    fn load_errors() {
        for text in [
            r#"{"dim":2}"#,
            r#"{"dim":0,"factors":2}"#,
            r#"{"dim":2,"factors":2,"vectors":[{"name":"a","coords":[[1,0]]}]}"#,
            r#"{"dim":2,"factors":2,"vectors":[{"name":"a","coords":[[1,0],[0,0]]},{"name":"a","coords":[[1,0],[0,0]]}]}"#,
            r#"{"dim":2,"factors":2,"vectors":[{"name":"P_sym","coords":[[1,0],[0,0]]}]}"#,
            r#"{"dim":2,"factors":2,"suites":["nope"]}"#,
            r#"{"dim":2,"factors":2,"bogus":1}"#,
            r#"{"dim":2,"factors":3,"observables":[{"name":"X","matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]},{"name":"Z","matrix":[[[1,0],[0,0]],[[0,0],[-1,0]]]}]}"#,
            r#"{"dim":2,"factors":2,"expressions":[{"expr":"<a|a>","expected":"one"}]}"#,
        ] {
            assert!(parse_model(text).is_err(), "{text}");
        }
    }

    #[test]
    fn eval_examples() {
        let m = parse_model(TWO_QUBIT_MODEL).unwrap();
        let out = eval_expression(&m, "P_asym (|a> (x) |a>)", Format::Text);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout, "zero functional\n");
        let out = eval_expression(&m, "<a|a>", Format::Text);
        assert_eq!(out.stdout, "1+0i\n");
        let out = eval_expression(&m, "<a| |", Format::Text);
        assert_eq!(out.code, EXIT_CONFIG);
        assert!(out.stderr.contains("lex error"), "{}", out.stderr);
    }

    #[test]
    fn spectral_sums_in_order() {
        let m = parse_model(TWO_QUBIT_MODEL).unwrap();
        let sd = spectral_decompose(m.composite.as_ref().unwrap()).unwrap();
        let sums: Vec<f64> = sd.pairs().iter().map(|p| p.lambda_sum).collect();
        assert_eq!(sums, vec![-2.0, 0.0, 0.0, 2.0]);
        let text = spectral_report(&m, Format::Json).unwrap();
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn suite_selection() {
        let m = parse_model(TWO_QUBIT_MODEL).unwrap();
        let s = select_suites(&m, &["lemma".into(), "identification".into(), "lemma".into()]).unwrap();
        assert_eq!(s, vec!["identification", "lemma"]);
        assert!(select_suites(&m, &["bogus".into()]).is_err());
        let out = cmd_demo(&opts(&["bogus"]));
        assert_eq!(out.code, EXIT_CONFIG);
    }

    #[test]
    fn unequal_factors_negative_control_passes() {
        let text = r#"{"dim":2,"factors":2,
            "observables":[{"name":"X","matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]},
                           {"name":"Z","matrix":[[[1,0],[0,0]],[[0,0],[-1,0]]]}]}"#;
        let m = parse_model(text).unwrap();
        let out = run_checks(&m, &opts(&["symmetrization"]));
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert!(out.stdout.contains("symmetrization.negative_control"));
    }
}
