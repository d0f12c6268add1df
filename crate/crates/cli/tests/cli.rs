use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wderiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wderiv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn verdict_of(o: &Output, analyzer: &str) -> String {
    let prefix = format!("VERDICT: {analyzer} ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no verdict for {analyzer} in:\n{}", stdout(o)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_derivation_constant_one_passes() {
    let o = wderiv(&["verify-derivation", "--phi", "one", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(verdict_of(&o, "derivation_identity"), "holds");
}

#[test]
fn malformed_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "[grid]\nh = not-a-number\n");
    let o = wderiv(&["--config", &cfg, "verify-derivation"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn unknown_phi_is_usage_error() {
    assert_eq!(wderiv(&["verify-derivation", "--phi", "no-such-phi"]).status.code(), Some(2));
    assert_eq!(wderiv(&["weakstar-report", "--phi", "no-such-phi"]).status.code(), Some(2));
}

#[test]
fn weakstar_report_verdicts() {
    let o = wderiv(&["weakstar-report", "--phi", "wkscts2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(verdict_of(&o, "weakstar_condition_check"), "holds");
    assert_eq!(verdict_of(&wderiv(&["weakstar-report", "--phi", "omega"]), "weakstar_condition_check"), "fails");
    let z = wderiv(&["weakstar-report", "--phi", "zero"]);
    assert_eq!(verdict_of(&z, "weakstar_condition_check"), "holds");
    assert_eq!(verdict_of(&z, "range_c0_check"), "holds");
    let n = wderiv(&["weakstar-report", "--phi", "notwkscts"]);
    assert_eq!(verdict_of(&n, "weakstar_counterexample_check"), "fails");
}

#[test]
fn compactness_report_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p2.cfg", "[weight]\nkind = power\nalpha = 2\n");
    let o = wderiv(&["--config", &cfg, "compactness-report", "--phi", "omega-minus-one"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(verdict_of(&o, "compact_verdict"), "holds-for-D");

    let s = wderiv(&["compactness-report", "--phi", "step"]);
    assert_eq!(verdict_of(&s, "compact_verdict"), "fails");
    assert_eq!(verdict_of(&s, "noncompact_witness_step"), "fails");

    let l = wderiv(&["compactness-report", "--phi", "limit-alpha"]);
    assert_eq!(verdict_of(&l, "compact_verdict"), "fails");
    assert_eq!(verdict_of(&l, "noncompact_witness_limit"), "fails");
    let text = stdout(&l);
    assert!(text.contains("EVIDENCE: norm_distance"));
    assert!(text.contains("EVIDENCE: pairing_residual"));
}

#[test]
fn reproduce_exit_codes() {
    for id in ["wkscts2", "notwkscts", "omega", "omega-minus-one", "step", "limit-alpha"] {
        let o = wderiv(&["reproduce", id]);
        assert_eq!(o.status.code(), Some(0), "{id}:\n{}", stdout(&o));
        assert!(!stdout(&o).contains("MISMATCH"));
    }
    assert_eq!(wderiv(&["reproduce", "nonsense"]).status.code(), Some(2));
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = wderiv(&["verify-derivation", "--seed", "7", "--trials", "4", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let csv = fs::read_to_string(a.join("derivation_identity__residual.csv")).unwrap();
    assert!(csv.starts_with("parameter,value\n"));
    assert_eq!(csv.lines().count(), 5);
    for name in ["report.txt", "derivation_identity__residual.csv", "derivation_identity__budget.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn seed_changes_trials() {
    let dir = tempfile::tempdir().unwrap();
    let read = |seed: &str| {
        let out = dir.path().join(seed);
        wderiv(&["verify-derivation", "--seed", seed, "--trials", "3", "--out", out.to_str().unwrap()]);
        fs::read_to_string(out.join("derivation_identity__budget.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn phi_from_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(dir.path(), "phi.csv", "t,re\n0,0\n50,0\n");
    let o = wderiv(&["weakstar-report", "--phi", &phi, "--h", "0.125", "--tmax", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(verdict_of(&o, "range_c0_check"), "holds");
}

#[test]
fn list_names_every_entry() {
    let text = stdout(&wderiv(&["list"]));
    for id in ["wkscts2", "notwkscts", "omega", "omega-minus-one", "step", "limit-alpha"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{id}:"))), "{id}");
    }
}
