use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::TempDir;

use hubbard_scatter::experiment::config::{Axis, Range, Real, SpinName};
use hubbard_scatter::experiment::ExperimentConfig;

const FIG2_SMALL: &str = r#"
schema_version = 1
experiment = "fig2-fidelity"
sites = 41
interaction = [0.5, 1.0]
interaction_units = "relative-velocity"
alpha = [0.2, 0.3]
time = { start = 8.0, stop = 12.0, step = 0.5 }

[[packets]]
center = 10
momentum = "pi/2"
spin = "up"

[[packets]]
center = 30
momentum = "-pi/2"
spin = "down"
"#;

const CASCADE: &str = r#"
schema_version = 1
experiment = "cascade-1vN"
train_length = [1, 2, 3, 4]
theta = { start = 0.5, stop = 2.5, step = 0.5 }
relative_velocity = 2.0
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hubbard-scatter"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    for (name, text) in [("fig2.toml", FIG2_SMALL), ("cascade.toml", CASCADE)] {
        let cfg = write_config(tmp.path(), name, text);
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        assert!(run(&["run"], &cfg, &a).status.success());
        assert!(run(&["run"], &cfg, &b).status.success());
        let fa = files(&a);
        assert!(fa.iter().any(|(n, _)| n == "summary.csv"));
        assert!(fa.iter().any(|(n, _)| n == "metadata.json"));
        assert_eq!(fa, files(&b));
    }
}

#[test]
fn sweep_matches_run_for_any_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "fig2.toml", FIG2_SMALL);
    let serial = tmp.path().join("serial");
    assert!(run(&["run"], &cfg, &serial).status.success());
    for workers in ["1", "3", "4"] {
        let out = tmp.path().join(format!("w{workers}"));
        assert!(run(&["sweep", "--workers", workers], &cfg, &out).status.success());
        assert_eq!(files(&serial), files(&out), "workers = {workers}");
    }
}

#[test]
fn single_point_sweep_equals_run() {
    let tmp = TempDir::new().unwrap();
    let text = FIG2_SMALL.replace("interaction = [0.5, 1.0]", "interaction = 1.0").replace("alpha = [0.2, 0.3]", "alpha = 0.2");
    let cfg = write_config(tmp.path(), "one.toml", &text);
    let a = tmp.path().join("run");
    let b = tmp.path().join("sweep");
    assert!(run(&["run"], &cfg, &a).status.success());
    assert!(run(&["sweep", "--workers", "4"], &cfg, &b).status.success());
    assert_eq!(files(&a), files(&b));
    let summary = String::from_utf8(fs::read(a.join("summary.csv")).unwrap()).unwrap();
    assert_eq!(summary.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn output_falls_back_to_config() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("from-config");
    let text = format!("{CASCADE}output = {:?}\n", out.to_str().unwrap());
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let status = bin().args(["run", "--config"]).arg(&cfg).output().unwrap().status;
    assert!(status.success());
    assert!(out.join("details.csv").exists());
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let bad = write_config(tmp.path(), "bad.toml", &CASCADE.replace("relative_velocity", "relative_speed"));
    let o = run(&["run"], &bad, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config error"));

    let o = run(&["run"], &tmp.path().join("missing.toml"), &out);
    assert_eq!(o.status.code(), Some(1));

    let unused = write_config(tmp.path(), "unused.toml", &format!("{CASCADE}alpha = 0.1\n"));
    assert_eq!(run(&["run"], &unused, &out).status.code(), Some(1));

    let no_out = write_config(tmp.path(), "noout.toml", CASCADE);
    assert_eq!(bin().args(["run", "--config"]).arg(&no_out).output().unwrap().status.code(), Some(1));

    let cfg = write_config(tmp.path(), "ok.toml", CASCADE);
    assert_eq!(run(&["sweep", "--workers", "0"], &cfg, &out).status.code(), Some(1));
}

#[test]
fn numeric_contract_exits_with_two() {
    let tmp = TempDir::new().unwrap();
    let text = FIG2_SMALL
        .replace("fig2-fidelity", "regime-gallery")
        .replace("interaction = [0.5, 1.0]", "interaction = 1.0")
        .replace("alpha = [0.2, 0.3]", "alpha = 0.2")
        .replace("time = { start = 8.0, stop = 12.0, step = 0.5 }", "time = { start = 0.0, stop = 5.0, step = 5.0 }");
    let cfg = write_config(tmp.path(), "overlap.toml", &text);
    let o = run(&["run"], &cfg, &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selftest_passes() {
    let o = bin().arg("selftest").output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() >= 7);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

fn real() -> impl Strategy<Value = Real> {
    prop_oneof![
        (-3.0f64..3.0).prop_map(Real::Number),
        prop_oneof![Just("pi/2"), Just("-pi/3"), Just("0.25pi"), Just("2*pi/5")].prop_map(|s| Real::Expr(s.into())),
    ]
}

fn axis(lo: f64, hi: f64) -> impl Strategy<Value = Axis> {
    prop_oneof![
        (lo..hi).prop_map(|x| Axis::Scalar(Real::Number(x))),
        proptest::collection::vec((lo..hi).prop_map(Real::Number), 1..5).prop_map(Axis::List),
        (lo..hi, 1usize..6, 0.01f64..0.1).prop_map(|(start, n, step)| Axis::Range(Range {
            start,
            stop: start + step * n as f64,
            step
        })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips_through_toml(
        sites in 11usize..101,
        interaction in axis(-5.0, 5.0),
        alpha in axis(0.1, 0.5),
        k in real(),
        centers in (0.0f64..10.0, 10.0f64..20.0),
        up_first in any::<bool>(),
        hopping in 0.5f64..2.0,
    ) {
        let mut cfg = ExperimentConfig::from_toml_str(FIG2_SMALL).unwrap();
        cfg.sites = Some(sites);
        cfg.interaction = Some(interaction);
        cfg.alpha = Some(alpha);
        cfg.hopping = hopping;
        cfg.packets[0].momentum = k.clone();
        cfg.packets[1].momentum = k;
        cfg.packets[0].center = centers.0;
        cfg.packets[1].center = centers.1;
        if !up_first {
            cfg.packets[0].spin = SpinName::Down;
            cfg.packets[1].spin = SpinName::Up;
        }
        prop_assume!(cfg.validate().is_ok());
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(back.expand().unwrap().len(), cfg.expand().unwrap().len());
    }
}
