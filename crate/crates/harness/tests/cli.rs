//! End-to-end CLI flows in a temp directory.

use std::path::Path;
use std::process::Command;

fn monodag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monodag"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn monodag");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn gen_family(dir: &Path) -> std::path::PathBuf {
    let fam = dir.join("family.json");
    run_ok(monodag().args([
        "gen",
        "pmrs",
        "--N",
        "4",
        "--P",
        "2",
        "--mode",
        "full_box",
        "--out",
        fam.to_str().unwrap(),
    ]));
    fam
}

#[test]
fn gen_hard_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fam = gen_family(dir.path());

    let samples = dir.path().join("samples");
    run_ok(monodag().args([
        "gen",
        "hard",
        "--family",
        fam.to_str().unwrap(),
        "--dist",
        "no",
        "--count",
        "4",
        "--seed",
        "11",
        "--out-dir",
        samples.to_str().unwrap(),
    ]));

    // The bundle (family + samples in one dir) verifies.
    std::fs::copy(&fam, samples.join("family.json")).unwrap();
    let out = run_ok(monodag().args(["verify", samples.to_str().unwrap()]));
    assert!(out.contains("bundle: PASS"), "{out}");

    // Corrupt one witness entry: verification must fail and name the file.
    let data = std::fs::read_to_string(samples.join("family.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&data).unwrap();
    v["witnesses"][0]["w"][0] = serde_json::Value::String("999999".into());
    std::fs::write(samples.join("family.json"), v.to_string()).unwrap();
    let out = monodag()
        .args(["verify", samples.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL]") && text.contains("family.json"), "{text}");
}

#[test]
fn verify_empty_dir_passes_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(monodag().args(["verify", dir.path().to_str().unwrap()]));
    assert!(out.contains("bundle: PASS"));
    let err_out = monodag()
        .args(["verify", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&err_out.stdout).contains("[WARN]"));
}

#[test]
fn test_and_dist_on_generated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let fam = gen_family(dir.path());
    let samples = dir.path().join("s");
    run_ok(monodag().args([
        "gen",
        "hard",
        "--family",
        fam.to_str().unwrap(),
        "--dist",
        "no",
        "--count",
        "1",
        "--seed",
        "3",
        "--out-dir",
        samples.to_str().unwrap(),
    ]));

    // Assemble graph + function files for the tester CLI.
    let fam_data: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    let n0 = fam_data["n0"].as_u64().unwrap() as usize;
    let edges: Vec<(usize, usize)> = fam_data["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            (
                e[0].as_u64().unwrap() as usize,
                e[1].as_u64().unwrap() as usize + n0,
            )
        })
        .collect();
    let graph = dir.path().join("graph.json");
    std::fs::write(
        &graph,
        serde_json::json!({"n": 2 * n0, "edges": edges, "bipartite_left": n0}).to_string(),
    )
    .unwrap();
    let sample: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(samples.join("sample_00000.json")).unwrap(),
    )
    .unwrap();
    let function = dir.path().join("f.json");
    std::fs::write(
        &function,
        serde_json::json!({"values": sample["values"]}).to_string(),
    )
    .unwrap();

    let out = run_ok(monodag().args([
        "test",
        "--tester",
        "mt_tr",
        "--graph",
        graph.to_str().unwrap(),
        "--function",
        function.to_str().unwrap(),
        "--eps",
        "1/10",
        "--seed",
        "5",
    ]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(report["verdict"] == "reject" || report["verdict"] == "accept");
    if report["verdict"] == "reject" {
        assert!(report["witness"].is_array());
    }

    let out = run_ok(monodag().args([
        "dist",
        "--graph",
        graph.to_str().unwrap(),
        "--function",
        function.to_str().unwrap(),
        "--eps",
        "1/10",
    ]));
    let dist: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(dist["distance"].as_u64().unwrap() > 0, "NO sample is far");
    assert_eq!(dist["distance"], dist["certificate_size"]);
}

#[test]
fn experiment_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        serde_json::json!({
            "instance": {"type": "pmrs", "k": 2, "n_side": 3, "shift_cap": 1,
                          "mode": "full_box", "dist": "no"},
            "testers": [{"kind": "mt_tr"}, {"kind": "mt3"}, {"kind": "pair_baseline"}],
            "trials": 10,
            "eps_grid": ["1/10", "1/20"]
        })
        .to_string(),
    )
    .unwrap();
    let out1 = dir.path().join("r1.csv");
    let out2 = dir.path().join("r2.csv");
    for out in [&out1, &out2] {
        run_ok(monodag().args([
            "exp",
            "run",
            "--spec",
            spec.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            out.to_str().unwrap(),
        ]));
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "same spec and seed must give byte-identical reports");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("tester,eps,"));
    assert_eq!(text.lines().count(), 1 + 3 * 2);
}

#[test]
fn regimes_table_emits_csv() {
    let out = run_ok(monodag().args(["exp", "regimes", "--n", "1000000", "--eps", "0.1", "--step", "0.25"]));
    assert!(out.starts_with("c,d,"));
    // 1 <= c <= d <= 2 with step 1/4: 5 + 4 + 3 + 2 + 1 = 15 points.
    assert_eq!(out.lines().count(), 16);
    assert!(out.contains("sqrt_n_over_eps"));
}

#[test]
fn gibbs_model_game_and_stats_flow() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("dfam.json");
    run_ok(monodag().args([
        "gen", "pmrs", "--N", "4", "--P", "2", "--mode", "difference_free", "--out",
        fam.to_str().unwrap(),
    ]));
    let model = dir.path().join("model.json");
    run_ok(monodag().args([
        "gen", "gibbs",
        "--family", fam.to_str().unwrap(),
        "--hidden", "0",
        "--alpha", "1", "--lambda", "1", "--beta", "10", "--gamma", "1",
        "--boxB", "4", "--out", model.to_str().unwrap(),
    ]));

    let out = run_ok(monodag().args([
        "gibbs", "stats",
        "--model", model.to_str().unwrap(),
        "--count", "20", "--seed", "7", "--burn-in", "40", "--thin", "2",
    ]));
    let stats: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(stats["matching_violation_freq"].as_f64().unwrap() > 0.8);

    let out = run_ok(monodag().args([
        "gibbs", "game",
        "--model", model.to_str().unwrap(),
        "--budget", "40", "--seed", "21", "--burn-in", "40", "--games", "3",
    ]));
    let games: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(games.as_array().unwrap().len(), 3);

    let config = dir.path().join("config.json");
    run_ok(monodag().args([
        "gibbs", "sample",
        "--model", model.to_str().unwrap(),
        "--sweeps", "40", "--seed", "3", "--out", config.to_str().unwrap(),
    ]));
    let cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&config).unwrap()).unwrap();
    assert!(cfg["values"].as_array().unwrap().len() > 0);
}
