use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn qlam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlam"))
        .args(args)
        .env_remove("QLAM_MAX_STEPS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn deutsch_reads_balanced() {
    let o = qlam(&["run", &example("deutsch.lq")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("status: halted\n"));
    let branches: Vec<&str> = out.lines().filter(|l| l.starts_with('(')).collect();
    assert_eq!(branches.len(), 2);
    assert!(branches.iter().all(|l| l.ends_with("#[1, 0]") || l.ends_with("#[1, 1]")), "{out}");
}

#[test]
fn trace_has_one_line_per_step() {
    let o = qlam(&["run", &example("qft3.lq"), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let steps: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("steps: "))
        .unwrap()
        .parse()
        .unwrap();
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("step ")).collect();
    assert_eq!(lines.len(), steps);
    assert!(lines[0].starts_with("step 1: "));
    assert!(lines.iter().any(|l| l.contains("U[cphase(2)]")));
    assert!(lines.last().unwrap().starts_with(&format!("step {steps}: Id at / — ")));
}

#[test]
fn ill_formed_programs_are_rejected() {
    let o = qlam(&["run", "-e", "\\x. [x, x]"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("/  LinearUsedMany  x"));

    let o = qlam(&["check", "-e", "\\y. !(\\!x. y)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "/body  LinearUnderBang  y\n");

    let o = qlam(&["check", &example("teleport.lq")]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "ok\n"));

    let o = qlam(&["check", "--json", "-e", "\\x. 0"]);
    assert_eq!(json(&o)["violations"][0]["kind"], "LinearUsedZero");
}

#[test]
fn parse_errors_exit_one() {
    let o = qlam(&["run", "-e", "(H 0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = qlam(&["run", "no/such/file.lq"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes_follow_status() {
    assert_eq!(qlam(&["run", &example("stuck_discard.lq")]).status.code(), Some(2));
    assert_eq!(qlam(&["run", "--max-steps", "5", &example("qft3.lq")]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_qlam"))
        .args(["run", &example("qft3.lq")])
        .env("QLAM_MAX_STEPS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("steps: 4\n"));
}

#[test]
fn verify_the_corpus() {
    for entry in std::fs::read_dir(examples()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "lq") {
            let o = qlam(&["verify", path.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stdout(&o));
            assert!(stdout(&o).starts_with("agree: "));
        }
    }
    let o = qlam(&["verify", "--model", "i", &example("lambda_i/apply.lq")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("not applicable"));
    assert_eq!(qlam(&["verify", "--max-steps", "1", &example("qft3.lq")]).status.code(), Some(3));
}

fn matrix(v: &Value, key: &str) -> Vec<Vec<f64>> {
    serde_json::from_value(v[key].clone()).unwrap()
}

#[test]
fn density_matrices() {
    let o = qlam(&["density", "--model", "i", "--json", &example("lambda_i/mixed.lq")]);
    let v = json(&o);
    assert_eq!(v["labels"], serde_json::json!(["0", "1"]));
    let re = matrix(&v, "re");
    for (i, row) in re.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let expected = if i == j { 0.5 } else { 0.0 };
            assert!((x - expected).abs() < 1e-12);
        }
    }

    // a λ_q run is pure: tr(ρ²) = 1
    let v = json(&qlam(&["density", "--json", &example("epr.lq")]));
    let (re, im) = (matrix(&v, "re"), matrix(&v, "im"));
    let n = re.len();
    let mut purity = 0.0;
    for i in 0..n {
        for j in 0..n {
            purity += re[i][j] * re[j][i] - im[i][j] * im[j][i];
        }
    }
    assert!((purity - 1.0).abs() < 1e-12);

    let v = json(&qlam(&["density", "--json", "-e", "cnot [1, 0]"]));
    assert_eq!(matrix(&v, "re"), vec![vec![1.0]]);
}

#[test]
fn json_state_schema() {
    let o = qlam(&["run", "--json", &example("epr.lq")]);
    let v = json(&o);
    assert_eq!(v["status"], "halted");
    assert!(v["steps"].as_u64().unwrap() > 0);
    assert_eq!(v["history"].as_array().unwrap().last().unwrap(), "φ");
    let branches = v["branches"].as_array().unwrap();
    let norm: f64 = branches
        .iter()
        .map(|b| b["amp_re"].as_f64().unwrap().powi(2) + b["amp_im"].as_f64().unwrap().powi(2))
        .sum();
    assert!((norm - 1.0).abs() < 1e-12);
    let registers: Vec<&str> = branches.iter().map(|b| b["register"].as_str().unwrap()).collect();
    assert_eq!(registers, ["#[0, 0]", "#[1, 1]"]);
}

#[test]
fn text_output_is_stable() {
    let a = qlam(&["run", &example("qft2.lq")]);
    let b = qlam(&["run", &example("qft2.lq")]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_prints_the_register() {
    let o = qlam(&["reduce", &example("map_double.lq")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("(1.000000,0.000000)  #[8n, 14n, 4n]\n"));
    let o = qlam(&["reduce", "--model", "i", "-e", "apply id banana"]);
    assert!(stdout(&o).ends_with("banana\n"));
}

#[test]
fn repl_keeps_bindings() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_qlam"))
        .arg("repl")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"let two = 2n\nadd two two\nlet bad = \\x. [x, x]\nlet plus = H 0\n[plus, plus]\n:quit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "(1.000000,0.000000)  4n");
    // a binding is copied at each use, so each copy runs its own H
    assert_eq!(lines.len(), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("LinearUsedMany"));
}
