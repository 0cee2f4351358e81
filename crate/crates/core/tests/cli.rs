use std::path::PathBuf;
use std::process::{Command, Output};

const MODEL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/models/two_qubit.json");

fn run(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braket-rhs"))
        .args(args)
        .env("BRAKET_RHS_SEED", seed)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config(tag: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("braket-rhs-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn json_reports_have_fixed_key_order() {
    let o = run(&["check", "--config", MODEL, "--suite", "identification"], "42");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text.lines().next().unwrap();
    assert!(line.starts_with(r#"{"name":"identification.d2n2","status":"pass","residual":"#), "{line}");
    let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, serde_json::Value>>(line)
        .unwrap()
        .keys()
        .cloned()
        .collect();
    assert_eq!(keys.len(), 5);
}

#[test]
fn sequential_and_parallel_runs_agree_bytewise() {
    let par = run(&["check", "--config", MODEL], "7");
    let seq = run(&["check", "--config", MODEL, "--sequential"], "7");
    assert_eq!(par.status.code(), Some(0));
    assert_eq!(par.stdout, seq.stdout);
}

#[test]
fn seed_changes_randomized_output() {
    let a = run(&["check", "--config", MODEL, "--suite", "identification"], "1");
    let b = run(&["check", "--config", MODEL, "--suite", "identification"], "2");
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn demo_runs_everything_and_passes() {
    let o = run(&["demo", "--format", "text"], "42");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for suite in ["identification", "permutation", "dual_projector", "spectral", "extension", "lemma", "symmetrization", "expressions"] {
        assert!(text.contains(&format!("] {suite}.")), "missing {suite}");
    }
    assert!(text.trim_end().ends_with("0 failed"));
}

#[test]
fn unknown_suite_and_missing_file_are_config_errors() {
    assert_eq!(run(&["check", "--config", MODEL, "--suite", "nope"], "42").status.code(), Some(2));
    assert_eq!(run(&["check", "--config", "/no/such/file.json"], "42").status.code(), Some(2));
    assert_eq!(run(&["check"], "42").status.code(), Some(2));
    assert_eq!(run(&["check", "--config", MODEL, "--tol", "-1"], "42").status.code(), Some(2));
}

#[test]
fn non_hermitian_error_names_the_matrix() {
    let path = config("nonherm", r#"{"dim":2,"factors":1,"observables":[{"name":"Skew","matrix":[[[0,0],[0,1]],[[0,1],[0,0]]]}]}"#);
    let o = run(&["check", "--config", path.to_str().unwrap()], "42");
    let _ = std::fs::remove_file(&path);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Skew"));
}

#[test]
fn spectral_identity_observables_sum_to_factor_count() {
    let path = config("identity", r#"{"dim":2,"factors":3,"observables":[{"name":"I","matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#);
    let o = run(&["spectral", "--config", path.to_str().unwrap()], "42");
    let _ = std::fs::remove_file(&path);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1 + 8);
    for pair in &lines[1..] {
        assert_eq!(pair["lambda_sum"].as_f64(), Some(3.0));
    }
}

#[test]
fn spectral_degenerate_factor_has_multiplicity_labels() {
    let path = config(
        "degenerate",
        r#"{"dim":3,"factors":1,"observables":[{"name":"D","matrix":[[[2,0],[0,0],[0,0]],[[0,0],[2,0],[0,0]],[[0,0],[0,0],[-1,0]]]}]}"#,
    );
    let o = run(&["spectral", "--config", path.to_str().unwrap()], "42");
    let _ = std::fs::remove_file(&path);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let mults: Vec<u64> = lines[1..].iter().map(|p| p["mult_indices"][0].as_u64().unwrap()).collect();
    assert_eq!(mults, vec![1, 1, 2]);
    assert_eq!(lines[0]["degeneracy"], serde_json::json!([1, 2]));
}

#[test]
fn two_qubit_spectral_sums() {
    let o = run(&["spectral", "--config", MODEL], "42");
    let sums: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["lambda_sum"].as_f64().unwrap())
        .collect();
    assert_eq!(sums, vec![-2.0, 0.0, 0.0, 2.0]);
}

#[test]
fn eval_prints_values_and_spanned_errors() {
    let o = run(&["eval", "--config", MODEL, "--expr", "<a|a>"], "42");
    assert_eq!(stdout(&o), "1+0i\n");
    let o = run(&["eval", "--expr", "P_asym (|a> (x) |a>)"], "42");
    assert_eq!(stdout(&o), "zero functional\n");
    let o = run(&["eval", "--expr", "<a| (x) |b"], "42");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("lex error at 8..10"), "{err}");
    let o = run(&["eval", "--expr", "(<l1| (x) <l2|) (A (|p> (x) |q>))", "--format", "json"], "42");
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["kind"], "scalar");
}

#[test]
fn failing_expression_exits_one() {
    let path = config(
        "badexpect",
        r#"{"dim":2,"factors":1,"vectors":[{"name":"a","coords":[[0,1],[0,0]]}],"expressions":[{"expr":"<a|a>","expected":[1,0]},{"expr":"<a|a>","expected":[3,0]}]}"#,
    );
    let o = run(&["check", "--config", path.to_str().unwrap(), "--format", "text"], "42");
    let _ = std::fs::remove_file(&path);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("[PASS ] expressions.1"), "{text}");
    assert!(text.contains("[FAIL ] expressions.2"), "{text}");
}

#[test]
fn unequal_factor_model_passes_as_negative_control() {
    let path = config(
        "unequal",
        r#"{"dim":2,"factors":2,"observables":[
            {"name":"X","matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]},
            {"name":"Z","matrix":[[[1,0],[0,0]],[[0,0],[-1,0]]]}],
          "suites":["symmetrization"]}"#,
    );
    let o = run(&["check", "--config", path.to_str().unwrap()], "42");
    let _ = std::fs::remove_file(&path);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("symmetrization.negative_control"));
}
