use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_satprecode"))
}

#[test]
fn run_requires_a_seed() {
    let out = bin().args(["run", "--set", "drops=1"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn unknown_config_key_fails() {
    let out = bin().args(["run", "--seed", "1", "--set", "nope=3"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn bundled_modcods_validate() {
    let out = bin().arg("validate-modcods").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("threshold_db,spectral_efficiency_bps_hz"));
    assert!(text.lines().nth(1).unwrap().starts_with("-2.85,"));
}

#[test]
fn schedule_then_precode() {
    let dir = tempfile::tempdir().unwrap();
    let mut channel = String::from("user_id,feed_id,re,im\n");
    for i in 0..6 {
        for j in 0..2 {
            let own = if i % 2 == j { 2.0 } else { 0.3 };
            channel.push_str(&format!("{i},{j},{own},{}\n", 0.1 * (i + j) as f64));
        }
    }
    let h = dir.path().join("h.csv");
    std::fs::write(&h, channel).unwrap();
    let p = dir.path().join("p.csv");
    let out = bin()
        .args(["schedule", "--rho", "1", "--channel"])
        .arg(&h)
        .arg("--out")
        .arg(&p)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let part = std::fs::read_to_string(&p).unwrap();
    assert_eq!(part.lines().count(), 1 + 6);

    let pre = dir.path().join("pre");
    let out = bin()
        .args(["precode", "--set", "algorithm=sra", "--channel"])
        .arg(&h)
        .arg("--partition")
        .arg(&p)
        .arg("--out")
        .arg(&pre)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(pre.join("precoder_0.csv").exists());
    assert!(pre.join("precoder_2.csv").exists());
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = bin()
            .args(["run", "--seed", "5", "--threads", threads])
            .args(["--set", "users_per_beam=2", "--set", "algorithm=sra", "--set", "on_infeasible=skip"])
            .arg("--out")
            .arg(dir.path().join(name))
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join(name).join("per_user.csv")).unwrap()
    };
    assert_eq!(run("a", "1"), run("b", "2"));
}
