use std::path::PathBuf;
use std::process::{Command, Output};

fn refsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refsat")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("refsat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn compute_prints_the_coefficient() {
    let out = refsat(&["compute", "--family", "B", "--edges", "e2,e3,e4", "--p", "4", "--q", "8", "--r", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mu_line = text.lines().find(|l| l.starts_with("mu")).unwrap();
    let mu: f64 = mu_line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((mu - 1.0346).abs() < 2e-4, "{mu}");
    assert!(text.contains("dim_F     5"));
}

#[test]
fn compute_exit_codes() {
    let invalid = refsat(&["compute", "--family", "B", "--edges", "e1", "--p", "4", "--q", "8", "--r", "16"]);
    assert_eq!(invalid.status.code(), Some(2));
    let ill_posed =
        refsat(&["compute", "--family", "A", "--edges", "e1,e2,e3,e4", "--p", "4", "--q", "5", "--r", "16"]);
    assert_eq!(ill_posed.status.code(), Some(3));
    let unparsable = refsat(&["compute", "--family", "Z", "--p", "4", "--q", "8", "--r", "16"]);
    assert_eq!(unparsable.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv() {
    let output = std::env::temp_dir().join(format!("refsat-cli-{}", std::process::id())).join("out.csv");
    let config = scratch_file(
        "sweep.toml",
        &format!(
            "strategies = [\"double\"]\np_values = [2, 4]\nproblems = [\"E1\", \"C\"]\nrecord_timing = false\noutput = {:?}\n",
            output.display().to_string()
        ),
    );
    let out = refsat(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&output).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("family,edge_class,p,q,r,mu,mu_display,dim_H,dim_V,dim_F,wall_seconds,status"));
    assert!(csv.contains("A,E1,4,8,16,"));
    assert!(csv.contains(",1.0017,"));

    let markdown = scratch_file(
        "md.toml",
        "strategies = [\"double\"]\np_values = [2]\nproblems = [\"F2\"]\nformat = \"markdown\"\n",
    );
    let out = refsat(&["sweep", "--config", markdown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("| family |"));

    let bad = scratch_file("bad.toml", "strategies = [\"double\"]\np_values = [2]\nr_factors = [5]\n");
    assert_eq!(refsat(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(refsat(&["sweep", "--config", "/nonexistent/config.toml"]).status.code(), Some(2));
}

#[test]
fn reproduce_small_columns() {
    let out = refsat(&["reproduce", "--max-p", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 outside tolerance"));
    let strict = refsat(&["reproduce", "--max-p", "4", "--tol", "1e-9"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn patches_verify_reports_every_type() {
    let out = refsat(&["patches", "verify"]);
    let text = stdout(&out);
    for id in 1..=13 {
        assert!(text.lines().any(|l| l.starts_with(&format!("P{id} "))), "P{id} missing");
    }
    for s in ["(a)", "(b)", "(c)", "(d)", "(e)"] {
        assert!(text.lines().any(|l| l.starts_with(s)));
    }
    let all_pass = ["classification", "empty sets", "admissibility", "extensions"]
        .iter()
        .all(|k| text.lines().any(|l| l.starts_with(k) && l.ends_with("PASS")));
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn patches_verify_rejects_corrupted_catalog() {
    let path = scratch_file("broken.txt", "number 1 h 3 1\npatch 1 interior\n#x##\nend\n");
    let out = refsat(&["patches", "verify", "--catalog", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
