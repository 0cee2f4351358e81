//! End-to-end acceptance run: one line per criterion, non-zero exit on any failure.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use braket_rhs::dsl::{evaluate, parse_str};
use braket_rhs::observable::extend_operator;
use braket_rhs::permutation::{enumerate_group, symmetric_group};
use braket_rhs::random;
use braket_rhs::spectral::{spectral_decompose, symmetrized_eigenvector};
use braket_rhs::suite::{self, SuiteOptions, Tolerances};
use braket_rhs::{compose_observable, CheckReport, CompositeObservable, FactorObservable, SymmetrizerKind};
use common::{corpus, Fixture, MALFORMED};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[CheckReport]) -> Outcome {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} residual={:e} tol={:e} {}", r.name, r.residual_or_nan(), r.tolerance, r.detail))
        .collect();
    let worst = reports.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    if failed.is_empty() {
        Outcome { pass: true, detail: format!("{} checks, worst residual {worst:.3e}", reports.len()) }
    } else {
        Outcome { pass: false, detail: failed.join("; ") }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{} [{:.2} s]", out.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {:.0} s", out.detail, limit.as_secs_f64());
        }
    }
    out
}

fn opts() -> SuiteOptions {
    SuiteOptions { seed: random::seed_from_env(), ..SuiteOptions::default() }
}

fn sz_model() -> CompositeObservable {
    let sz = FactorObservable::diagonal("Sz", &[1.0, -1.0]);
    compose_observable(vec![sz.clone(), sz]).unwrap()
}

fn generic_model(seed: u32, d: usize, n: usize, identical: bool) -> CompositeObservable {
    let mut rng = random::trial_rng(opts().seed, 100, seed);
    let ops = if identical {
        vec![random::factor_observable(&mut rng, "B", d); n]
    } else {
        (0..n).map(|k| random::factor_observable(&mut rng, &format!("B{k}"), d)).collect()
    };
    compose_observable(ops).unwrap()
}

fn identification() -> Outcome {
    let reports: Vec<_> = [(2, 2), (2, 3), (3, 2)]
        .into_iter()
        .map(|(d, n)| suite::identification(opts(), d, n, 100, 50, 1e-12))
        .collect();
    from_reports(&reports)
}

fn permutation_algebra() -> Outcome {
    let mut reports = Vec::new();
    for d in 1..=3 {
        for n in 1..=4 {
            reports.extend(suite::permutation_algebra(opts(), d, n, 20, 1e-12));
        }
    }
    // N = 2 complement is exact; N = 3 leaves a mixed-symmetry remainder.
    for d in 2..=3 {
        reports.push(suite::complement_check(d, 2, 0.0));
        reports.push(suite::complement_check(d, 3, 1e-12));
    }
    // Group enumeration up to N = 8: order N!, sign is a homomorphism.
    for n in 1..=8 {
        let g = symmetric_group(n).unwrap();
        let order: usize = (1..=n).product();
        let mut bad = (g.len() != order) as usize;
        bad += (enumerate_group(n).unwrap().as_slice() != g) as usize;
        for (i, s) in g.iter().enumerate().step_by(97) {
            let t = &g[(i * 7919) % g.len()];
            bad += (s.compose(t).unwrap().sign() != s.sign() * t.sign()) as usize;
        }
        reports.push(CheckReport::measured(format!("permutation.group.n{n}"), bad as f64, 0.0, ""));
    }
    from_reports(&reports)
}

fn dual_projector() -> Outcome {
    let reports: Vec<_> = [(2, 2), (2, 3), (3, 2), (2, 4)]
        .into_iter()
        .flat_map(|(d, n)| suite::dual_projector_consistency(opts(), d, n, 100, 50, 1e-12))
        .collect();
    from_reports(&reports)
}

fn spectral_reports() -> Vec<CheckReport> {
    let mut models = suite::random_models(opts(), 20, 3, 3);
    models.push(sz_model());
    suite::spectral_random(opts(), &models, 20, 50, 1e-10)
}

fn spectral(reports: &[CheckReport]) -> Outcome {
    let picked: Vec<_> = reports.iter().filter(|r| r.name != "spectral.eigenequation").cloned().collect();
    let mut out = from_reports(&picked);
    let equal_sum = suite::spectral_model(opts(), &sz_model(), 1, 1, 1e-10, 0)
        .into_iter()
        .find(|r| r.name == "spectral.orthonormality.equal_sum");
    match equal_sum {
        Some(r) if r.passed() && !r.detail.starts_with("0 ") => out.detail = format!("{}; {}", out.detail, r.detail),
        other => {
            out.pass = false;
            out.detail = format!("{}; equal-sum case not exercised: {other:?}", out.detail);
        }
    }
    out
}

fn eigenequations(reports: &[CheckReport]) -> Outcome {
    let picked: Vec<_> = reports.iter().filter(|r| r.name == "spectral.eigenequation").cloned().collect();
    let mut out = from_reports(&picked);
    if picked.is_empty() {
        out.pass = false;
        out.detail = "no eigenequation report".into();
    }
    out
}

fn extension() -> Outcome {
    let models = [sz_model(), generic_model(1, 3, 2, false), generic_model(2, 2, 3, false)];
    let reports: Vec<_> = models.iter().flat_map(|a| suite::extension(opts(), a, 100, 5, 50, 1e-10)).collect();
    from_reports(&reports)
}

fn lemma() -> Outcome {
    let models = [generic_model(3, 3, 2, false), generic_model(4, 2, 3, true), sz_model()];
    let reports: Vec<_> = models.iter().flat_map(|a| suite::lemma(opts(), a, 20, 50, 1e-10)).collect();
    let mut out = from_reports(&reports);
    let rejected = reports.iter().filter(|r| r.name == "lemma.noncommuting_rejected").count();
    if rejected != models.len() {
        out.pass = false;
        out.detail = format!("{}; only {rejected} rejection checks ran", out.detail);
    }
    let norms: Vec<&str> = reports
        .iter()
        .filter(|r| r.name == "lemma.noncommuting_rejected")
        .map(|r| r.detail.as_str())
        .collect();
    out.detail = format!("{}; {}", out.detail, norms.join(", "));
    out
}

fn symmetrization() -> Outcome {
    let tols = Tolerances { exact: 1e-12, residual: 1e-10 };
    let mut reports = Vec::new();
    for a in [sz_model(), generic_model(5, 3, 3, true), generic_model(6, 2, 4, true)] {
        reports.extend(suite::symmetrization(opts(), &a, 50, tols));
    }
    let control = suite::symmetrization(opts(), &generic_model(7, 2, 2, false), 50, tols);
    let control_ok = control.len() == 1 && control[0].name == "symmetrization.negative_control";
    reports.extend(control);

    // Singlet: antisymmetrized (+1, -1) pair of the diag(1, -1) model.
    let a = sz_model();
    let sd = spectral_decompose(&a).unwrap();
    let pair = sd.pairs().iter().position(|p| p.lambdas == [1.0, -1.0]).unwrap();
    let singlet = symmetrized_eigenvector(&sd, pair, SymmetrizerKind::Antisym).unwrap();
    let image = extend_operator(&a, &singlet).unwrap();
    let residual = image.rep().dense().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let norm = singlet.rep().norm();
    reports.push(CheckReport::measured("symmetrization.singlet_eigenvalue", residual, 1e-12, ""));
    reports.push(CheckReport::measured("symmetrization.singlet_nonzero", (0.5 - norm).max(0.0), 0.0, format!("norm {norm}")));

    let mut out = from_reports(&reports);
    if !control_ok {
        out.pass = false;
        out.detail = format!("{}; negative control missing", out.detail);
    }
    out
}

fn dsl() -> Outcome {
    let fx = Fixture::new();
    let cases = corpus(&fx);
    let mut problems = Vec::new();
    let mut worst = 0.0_f64;
    for (src, want) in &cases {
        let ast = match parse_str(src) {
            Ok(a) => a,
            Err(e) => {
                problems.push(format!("{src}: {e}"));
                continue;
            }
        };
        if parse_str(&ast.to_string()).ok().as_ref() != Some(&ast) {
            problems.push(format!("{src}: round trip changed the tree"));
        }
        match evaluate(&ast, &fx.env).map(|v| v.max_diff(want)) {
            Ok(Some(d)) if d <= 1e-12 => worst = worst.max(d),
            Ok(d) => problems.push(format!("{src}: differs from library value ({d:?})")),
            Err(e) => problems.push(format!("{src}: {e}")),
        }
    }
    for src in MALFORMED {
        let caught = std::panic::catch_unwind(|| parse_str(src).and_then(|a| evaluate(&a, &fx.env)).map(|_| ()));
        match caught {
            Ok(Err(e)) if e.span.start <= e.span.end && e.span.start <= src.len() => {}
            Ok(Err(e)) => problems.push(format!("{src:?}: bad span {}", e.span)),
            Ok(Ok(())) => problems.push(format!("{src:?}: accepted")),
            Err(_) => problems.push(format!("{src:?}: panicked")),
        }
    }
    let pass = cases.len() >= 30 && problems.is_empty();
    let detail = if problems.is_empty() {
        format!("{} expressions, worst difference {worst:.3e}; {} malformed inputs rejected", cases.len(), MALFORMED.len())
    } else {
        problems.join("; ")
    };
    Outcome { pass, detail }
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_braket-rhs"))
        .args(args)
        .env(random::SEED_ENV, "42")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn temp_config(tag: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("braket-rhs-acceptance-{}-{tag}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

fn cli() -> Outcome {
    let model = concat!(env!("CARGO_MANIFEST_DIR"), "/models/two_qubit.json");
    let args = ["check", "--config", model, "--format", "json"];
    let (code1, out1) = run_cli(&args);
    let (code2, out2) = run_cli(&args);
    let failing = temp_config(
        "fail",
        r#"{"dim":2,"factors":1,"vectors":[{"name":"a","coords":[[1,0],[0,0]]}],
            "expressions":[{"expr":"<a|a>","expected":[2,0]}]}"#,
    );
    let broken = temp_config(
        "broken",
        r#"{"dim":2,"factors":2,"observables":[{"name":"NotHermitian","matrix":[[[0,0],[1,0]],[[0,0],[0,0]]]}]}"#,
    );
    let (code_fail, _) = run_cli(&["check", "--config", failing.to_str().unwrap()]);
    let (code_broken, _) = run_cli(&["check", "--config", broken.to_str().unwrap()]);
    let _ = std::fs::remove_file(failing);
    let _ = std::fs::remove_file(broken);
    let identical = out1 == out2 && !out1.is_empty();
    let lines_json = String::from_utf8_lossy(&out1)
        .lines()
        .all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok());
    let pass = identical && lines_json && code1 == 0 && code2 == 0 && code_fail == 1 && code_broken == 2;
    Outcome {
        pass,
        detail: format!(
            "byte-identical {identical} ({} bytes), valid json lines {lines_json}, exit codes pass/fail/config = {code1}/{code_fail}/{code_broken}",
            out1.len()
        ),
    }
}

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() {
    let start = Instant::now();
    let spectral_run = spectral_reports();
    let shared = start.elapsed().as_secs_f64();
    let criteria: Vec<Criterion> = vec![
        ("identification of composite and product functionals", Box::new(|| timed(Some(Duration::from_secs(5)), identification))),
        ("permutation algebra", Box::new(|| timed(Some(Duration::from_secs(10)), permutation_algebra))),
        ("dual projector consistency", Box::new(|| timed(None, dual_projector))),
        ("spectral expansions", Box::new(|| {
            let mut out = timed(None, || spectral(&spectral_run));
            out.detail = format!("{} + {shared:.2} s shared with criterion 5", out.detail);
            out
        })),
        ("eigenequations", Box::new(|| timed(None, || eigenequations(&spectral_run)))),
        ("factorwise operator extension", Box::new(|| timed(None, extension))),
        ("commuting-observable lemma", Box::new(|| timed(None, lemma))),
        ("symmetrization", Box::new(|| timed(None, symmetrization))),
        ("expression language", Box::new(|| timed(None, dsl))),
        ("cli determinism and exit codes", Box::new(|| timed(None, cli))),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.into_iter().enumerate() {
        let out = run();
        if !out.pass {
            failures += 1;
        }
        println!("criterion {:>2} [{}] {title}: {}", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
