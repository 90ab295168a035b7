use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use afcsim::cli::{ExperimentConfig, RunReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_afcsim"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_in(sub: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn entries(dir: &Path) -> Vec<String> {
    if !dir.exists() {
        return Vec::new();
    }
    fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect()
}

#[test]
fn print_defaults_parses_back() {
    let o = run(&["--print-defaults"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), ExperimentConfig::default());
}

#[test]
fn empty_config_runs_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "empty.cfg", "");
    let o = run_in("comb", &cfg, &tmp.path().join("out"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: RunReport = serde_json::from_slice(&fs::read(tmp.path().join("out/comb/report.json")).unwrap()).unwrap();
    assert_eq!(report.config, ExperimentConfig::default());
    assert!(report.outputs.iter().all(|p| p.exists()));
}

#[test]
fn identical_runs_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    for sub in ["multiplex", "repeater", "g2"] {
        let cfg = match sub {
            "multiplex" => configs().join("fig4.cfg"),
            "repeater" => configs().join("fig1.cfg"),
            _ => write_cfg(tmp.path(), "g2.cfg", "seed = 5\n[g2]\nn_windows = 200000\n"),
        };
        let a = tmp.path().join(format!("a-{sub}"));
        let b = tmp.path().join(format!("b-{sub}"));
        assert!(run_in(sub, &cfg, &a, &[]).status.success());
        assert!(run_in(sub, &cfg, &b, &[]).status.success());
        let (ca, cb) = (csv_bytes(&a.join(sub)), csv_bytes(&b.join(sub)));
        assert!(!ca.is_empty());
        assert_eq!(ca, cb, "{sub}");
    }
}

#[test]
fn report_replays_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    assert!(run_in("sweep", &configs().join("fig3d.cfg"), &first, &["--seed", "4"]).status.success());
    let report: RunReport = serde_json::from_slice(&fs::read(first.join("sweep/report.json")).unwrap()).unwrap();
    assert_eq!(report.config.decoherence.t2, 1.1e-3);
    let cfg = write_cfg(tmp.path(), "replay.cfg", &report.config.to_toml());
    let second = tmp.path().join("second");
    assert!(run_in("sweep", &cfg, &second, &[]).status.success());
    assert_eq!(csv_bytes(&first.join("sweep")), csv_bytes(&second.join("sweep")));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "g2.cfg", "seed = 11\n[g2]\nn_windows = 3000000\n");
    let one = tmp.path().join("one");
    let many = tmp.path().join("many");
    assert!(run_in("g2", &cfg, &one, &["--threads", "1"]).status.success());
    assert!(run_in("g2", &cfg, &many, &["--threads", "4"]).status.success());
    assert_eq!(csv_bytes(&one.join("g2")), csv_bytes(&many.join("g2")));
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "g2.cfg", "seed = 1\n[g2]\nn_windows = 200000\n");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run_in("g2", &cfg, &a, &["--seed", "99"]).status.success());
    assert!(run_in("g2", &cfg, &b, &[]).status.success());
    assert_ne!(csv_bytes(&a.join("g2")), csv_bytes(&b.join("g2")));
    let report: RunReport = serde_json::from_slice(&fs::read(a.join("g2/report.json")).unwrap()).unwrap();
    assert_eq!(report.seed, 99);
    assert_eq!(report.config.seed, 99);
}

#[test]
fn validation_errors_name_the_key_and_leave_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("comb", "[comb]\nfinesse = 0.5\n", "finesse"),
        ("comb", "[comb]\nfinese = 3\n", "finese"),
        ("g2", "[g2]\nn_windows = 10\n", "n_windows"),
        ("multiplex", "[multiplex.cavity]\nfwhm = -1.0\n", "fwhm"),
        ("repeater", "[repeater.rate]\np = 1.5\n", "p"),
    ];
    for (i, (sub, body, key)) in cases.iter().enumerate() {
        let cfg = write_cfg(tmp.path(), &format!("bad{i}.cfg"), body);
        let o = run_in(sub, &cfg, &out, &[]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{body}: {err}");
        assert!(err.contains(key), "{body}: {err}");
        assert!(entries(&out).is_empty(), "{body} left {:?}", entries(&out));
    }
}

#[test]
fn failed_rerun_keeps_previous_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let good = write_cfg(tmp.path(), "good.cfg", "");
    assert!(run_in("comb", &good, &out, &[]).status.success());
    let before = csv_bytes(&out.join("comb"));
    let bad = write_cfg(tmp.path(), "bad.cfg", "[comb]\nd_peak = -1.0\n");
    assert_eq!(run_in("comb", &bad, &out, &[]).status.code(), Some(2));
    assert_eq!(csv_bytes(&out.join("comb")), before);
    assert_eq!(entries(&out), vec!["comb".to_string()]);
}

#[test]
fn missing_input_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "fit.cfg", "[fit]\ninput = \"nowhere.csv\"\n");
    let out = tmp.path().join("out");
    let o = run_in("fit", &cfg, &out, &[]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(2), "{err}");
    assert!(err.contains("fit.input"), "{err}");
    assert!(entries(&out).is_empty());
}

#[test]
fn shipped_configs_run_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let jobs = [
        ("fig3c.cfg", "comb"),
        ("fig3d.cfg", "sweep"),
        ("fit_fig3d.cfg", "fit"),
        ("fig3a.cfg", "echo-fit"),
        ("fig4.cfg", "multiplex"),
        ("fig1.cfg", "repeater"),
        ("g2_no_memory.cfg", "g2"),
        ("g2_memory.cfg", "g2"),
        ("cavity_f4.cfg", "project"),
    ];
    for (name, sub) in jobs {
        let out = tmp.path().join(name);
        let start = Instant::now();
        let o = run_in(sub, &configs().join(name), &out, &[]);
        let took = start.elapsed();
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(took < Duration::from_secs(60), "{name} took {took:?}");
        let dir = out.join(sub);
        assert!(dir.join("report.json").exists(), "{name}");
        assert!(entries(&dir).iter().any(|f| f.ends_with(".gp")), "{name} has no plot script");
        for (f, bytes) in csv_bytes(&dir) {
            let header = bytes.split(|b| *b == b'\n').next().unwrap();
            assert!(!header.is_empty(), "{name}/{f}");
        }
        assert_eq!(entries(&out), vec![sub.to_string()], "{name} left staging files");
    }
}
