use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourier-ratio")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = bin(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fr_reports_ratio_and_level() {
    let v = json(&["fr", "--system", "dft:4x6", "--signal", "sparse:s=1", "--seed", "5"]);
    assert_eq!(v["command"], "fr");
    assert_eq!(v["result"]["M"], 24);
    assert!((v["result"]["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    // a spike's ratio is 1 up to rounding, which can push the level to 5
    let s = v["result"]["s"].as_u64().unwrap();
    assert!(s == 4 || s == 5, "{s}");
}

#[test]
fn recover_from_all_samples_is_exact() {
    let v = json(&["recover", "--system", "wht:5", "--signal", "rademacher", "--p", "1"]);
    assert!(v["result"]["relative_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn phase_csv_has_fixed_header() {
    let out = bin(&[
        "--format", "csv", "--trials", "3", "phase", "--system", "dft:16", "--signal", "sparse:s=1", "--p", "0.5,1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("system,M,r,p,trials,success_rate,mean_relative_error"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn phase_output_does_not_depend_on_jobs() {
    let args = |jobs: &'static str| {
        bin(&["--jobs", jobs, "--trials", "4", "phase", "--system", "dft:32", "--signal", "sparse:s=2", "--p", "0.3,0.6"])
            .stdout
    };
    assert_eq!(args("1"), args("4"));
}

#[test]
fn localize_rowwise_holds() {
    let v = json(&["localize", "--group", "8x8", "--split", "split=1|2", "--seed", "9"]);
    assert_eq!(v["result"]["holds"], true);
}

#[test]
fn rdcodec_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("f.frd");
    let sig = dir.path().join("g.txt");
    let enc = json(&[
        "rdcodec", "encode", "--system", "haar:64", "--signal", "rademacher", "--eps", "0.2", "--output", path(&desc),
    ]);
    let bytes = std::fs::read(&desc).unwrap();
    assert_eq!(&bytes[..4], b"FRRD");
    assert_eq!(enc["result"]["bytes"].as_u64().unwrap() as usize, bytes.len());
    json(&["rdcodec", "decode", "--input", path(&desc), "--output", path(&sig)]);
    assert!(std::fs::read_to_string(&sig).unwrap().starts_with("group 64"));

    let rt = json(&["rdcodec", "roundtrip", "--system", "haar:64", "--signal", "rademacher", "--eps", "0.2"]);
    assert_eq!(rt["result"]["within_eps"], true);
}

#[test]
fn sqdim_and_erasure_run() {
    let v = json(&["sqdim", "--m", "256", "--tau", "1", "--r", "16"]);
    assert!(v["result"]["log2_bound"].as_f64().unwrap() > 0.0);
    let v = json(&["--trials", "200", "erasure", "--n", "100", "--t", "8"]);
    assert!(v["result"]["exact_prob"].as_f64().unwrap() > 0.9);
}

#[test]
fn config_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "seed = 11\nformat = \"csv\"\n[fr]\nsystem = \"dft:64\"\nsignal = \"harmonic\"\neta = 0.25\n").unwrap();
    let res = bin(&["fr", "--config", path(&cfg), "--out", path(&out)]);
    assert!(res.status.success());
    assert!(res.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().contains("ratio"));
    assert!(text.contains("0.25"));
}

#[test]
fn bad_input_exits_nonzero() {
    let out = bin(&["fr", "--signal", "harmonic"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("system"));

    assert_ne!(bin(&["fr", "--system", "dft:0", "--signal", "harmonic"]).status.code(), Some(0));
    assert_eq!(bin(&["nonsense"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[fr]\nsytem = \"dft:4\"\n").unwrap();
    assert_eq!(bin(&["fr", "--config", path(&cfg)]).status.code(), Some(1));
}
