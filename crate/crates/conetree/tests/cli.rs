use std::process::Command;

fn conetree() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conetree"))
}

#[test]
fn generate_writes_a_space() {
    let out = conetree().args(["generate", "--generator", "interval", "--n", "5"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["format"], "conetree-space-v1");
    assert_eq!(v["generator"]["name"], "interval");
    let out = conetree().args(["generate", "--generator", "circle", "--n", "4", "--matrix"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["distances"][0].as_array().unwrap().len(), 4);
    let out = conetree().args(["generate", "--generator", "circle"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_states_its_caveat() {
    let out = conetree()
        .args(["profile", "--n", "128", "--m", "1", "--tau-steps", "3", "--budget", "4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["caveat"].as_str().unwrap().contains("lower-bound"));
    for e in v["entries"].as_array().unwrap() {
        let c = e["capacity"].as_f64().unwrap();
        assert!(c > 0.0 && c <= 1.0);
    }
}

#[test]
fn pipeline_and_verify_exit_codes() {
    let root = tempfile::tempdir().unwrap();
    let ok = conetree()
        .env("CONETREE_OUT", root.path())
        .args(["pipeline", "--n", "128", "--depth", "3"])
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let dir = root.path().join("circle-n128-r0.125-J3-c2-s0");
    assert!(dir.join("qireport.json").exists());
    let v = conetree().arg("verify").arg(&dir).output().unwrap();
    assert!(v.status.success());
    assert!(String::from_utf8_lossy(&v.stdout).contains("ok   fit"));

    let strict = conetree()
        .env("CONETREE_OUT", root.path())
        .args(["pipeline", "--n", "128", "--depth", "3", "--strict", "-o"])
        .arg(root.path().join("strict"))
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
    let log = std::fs::read_to_string(root.path().join("strict/log.txt")).unwrap();
    assert!(log.contains("[separate]"));
}

#[test]
fn config_file_overrides_flags() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("run.toml");
    let out = root.path().join("run");
    std::fs::write(
        &cfg,
        format!(
            "generator = {{ name = \"tree_boundary\", branching = 2, depth = 6 }}\ncolors = 1\nr = 0.25\ndepth = 3\nout_dir = {:?}\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let run = conetree().args(["pipeline", "--n", "64", "--config"]).arg(&cfg).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let qi: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("qireport.json")).unwrap()).unwrap();
    assert_eq!(qi["config"]["generator"]["name"], "tree_boundary");
    assert_eq!(qi["trees"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_can_name_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "r = 0.125\ndepth = 2\ncolors = 2\n\n[generator]\nname = \"circle\"\nn = 64\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = conetree()
        .args(["pipeline", "--config", path.to_str().unwrap(), "-o", out_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let space: serde_json::Value = serde_json::from_slice(&std::fs::read(out_dir.join("space.json")).unwrap()).unwrap();
    assert_eq!(space["generator"]["n"], 64);

    std::fs::write(&path, "depth = 2\n").unwrap();
    let out = conetree().args(["pipeline", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
