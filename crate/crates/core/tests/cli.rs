use dynloc::locality::Verdict;
use dynloc::scenario::{self, Quantization, Scenario, Shape, Theory};
use dynloc::lattice::Topology;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynloc"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dynloc-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn reduced(expect: Verdict) -> Scenario {
    scenario::make(
        "reduced-massive",
        "claim",
        Topology::Circle,
        scenario::REDUCED_NX,
        1.0,
        Theory::Scalar,
        Quantization::None,
        Shape::Centered,
        scenario::Expectation { verdict: expect, gap: None },
    )
}

#[test]
fn builtins_are_named_once_and_state_a_claim() {
    let all = scenario::builtins();
    let names: BTreeSet<_> = all.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names.len(), all.len());
    assert!(all.iter().all(|s| !s.claim.is_empty()));
    for s in &all {
        let text = serde_json::to_string(s).unwrap();
        assert_eq!(&serde_json::from_str::<Scenario>(&text).unwrap(), s);
    }
}

#[test]
fn reduced_runs_are_deterministic() {
    let s = reduced(Verdict::Equal);
    let a = serde_json::to_string(&s.run().unwrap().report).unwrap();
    let b = serde_json::to_string(&s.run().unwrap().report).unwrap();
    assert_eq!(a, b);
}

#[test]
fn current_with_mass_is_rejected() {
    let mut s = reduced(Verdict::Equal);
    s.theory = Theory::Current;
    assert!(s.run().is_err());
}

#[test]
fn run_writes_report_and_exit_code_follows_expectation() {
    let dir = scratch("run");
    let good = dir.join("good.json");
    std::fs::write(&good, serde_json::to_string(&reduced(Verdict::Equal)).unwrap()).unwrap();
    let st = bin().args(["--out", dir.to_str().unwrap(), "run", good.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["reports"][0]["verdict"], "Equal");
    assert!(dir.join("timings.json").exists());

    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&reduced(Verdict::AStrictlyInB)).unwrap()).unwrap();
    let st = bin().args(["--out", dir.to_str().unwrap(), "run", bad.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(1));

    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\"name\": 3}").unwrap();
    let st = bin().args(["--out", dir.to_str().unwrap(), "run", broken.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn suite_subset_and_witness_csv() {
    let dir = scratch("suite");
    let out = bin()
        .args(["--out", dir.to_str().unwrap(), "suite", "--only", "poly-massless-circle,weyl-current-disconnected"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 2);
    assert!(dir.join("poly-massless-circle_witness.csv").exists());
    let st = bin().args(["--out", dir.to_str().unwrap(), "suite", "--only", "nope"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn build_and_show() {
    let dir = scratch("build");
    let cfg = dir.join("spacetime.in.json");
    std::fs::write(&cfg, serde_json::to_string(&scenario::grid(Topology::Line, 16, scenario::static_metric())).unwrap()).unwrap();
    let st = bin().args(["--out", dir.to_str().unwrap(), "build", "--config", cfg.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("metric.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 32 * 16);
    let out = bin().args(["show", "massive-diamond"]).output().unwrap();
    let s: Scenario = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s.name, "massive-diamond");
    let out = bin().arg("show").output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), scenario::builtins().len());
}

#[test]
fn converge_needs_three_levels() {
    let dir = scratch("converge");
    let st = bin().args(["--out", dir.to_str().unwrap(), "converge", "--levels", "16,32"]).status().unwrap();
    assert_eq!(st.code(), Some(2));
}
