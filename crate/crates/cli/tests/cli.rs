use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tproxy(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tproxy"))
        .current_dir(dir)
        .env_remove("TPROXY_SUITE")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = tproxy(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tproxy-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Runs every step for a (2,3) group and returns the working directory.
fn full_flow(name: &str, json: bool) -> PathBuf {
    let dir = scratch(name);
    let d = dir.as_path();
    let mut base = vec!["--insecure-write"];
    if json {
        base.push("--json");
    }
    let run = |args: &[&str]| ok(d, &[base.as_slice(), args].concat());
    run(&["setup", "--suite", "transparent-large", "--seed", "cli", "--out", "params", "--master-out", "master"]);
    for id in ["alice", "p1", "p2", "p3", "bob", "cindy"] {
        run(&["keygen", "--params", "params", "--master", "master", "--identity", id, "--out", id]);
    }
    for i in ["1", "2", "3"] {
        run(&["vss-deal", "--params", "params", "--t", "2", "--n", "3", "--dealer", i, "--seed", i, "--registry", "reg", "--out-dir", "sub"]);
    }
    let ext = if json { "json" } else { "txt" };
    for j in 1..=3 {
        let shares: Vec<String> = (1..=3).map(|i| format!("sub/vss-{i}-to-{j}.{ext}")).collect();
        let (h, out) = (j.to_string(), format!("vss{j}"));
        let mut args = vec!["vss-combine", "--params", "params", "--registry", "reg", "--n", "3", "--holder", &h, "--out", &out, "--shares"];
        args.extend(shares.iter().map(String::as_str));
        run(&args);
    }
    run(&[
        "delegate", "--params", "params", "--key", "alice", "--proxies", "p1,p2,p3", "--t", "2", "--bob", "bob", "--cindy",
        "cindy", "--terms", "pay invoices", "--seed", "w", "--warrant-out", "warrant", "--out", "deleg",
    ]);
    let w = ["--warrant", "warrant", "--delegation", "deleg"];
    for i in ["1", "2", "3"] {
        let key = format!("p{i}");
        run(&[&["proxy-share", "deal", "--params", "params", "--key", &key, "--index", i, "--seed", i, "--registry", "reg", "--out-dir", "sub"][..], &w].concat());
    }
    for j in 1..=3 {
        let shares: Vec<String> = (1..=3).map(|i| format!("sub/proxy-{i}-to-{j}.{ext}")).collect();
        let (h, out) = (j.to_string(), format!("ks{j}"));
        let mut args = vec!["proxy-share", "combine", "--params", "params", "--registry", "reg", "--holder", &h, "--out", &out];
        args.extend(w);
        args.push("--shares");
        args.extend(shares.iter().map(String::as_str));
        run(&args);
    }
    run(&[
        &["sign", "--params", "params", "--registry", "reg", "--message", "pay 12", "--out", "sig"][..],
        &w,
        &["--keys", "p1", "p3", "--vss-shares", "vss1", "vss3", "--key-shares", "ks1", "ks3"],
    ]
    .concat());
    dir
}

fn verify(dir: &Path, sig: &str, key: &str) -> Output {
    tproxy(dir, &["verify", "--params", "params", "--registry", "reg", "--signature", sig, "--key", key])
}

#[test]
fn artifact_workflow_accepts_for_both_verifiers() {
    for json in [false, true] {
        let dir = full_flow(if json { "json" } else { "text" }, json);
        for v in ["bob", "cindy"] {
            let out = verify(&dir, "sig", v);
            assert_eq!(out.status.code(), Some(0));
            assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("{v}: accept"));
        }
        let named = tproxy(&dir, &["verify", "--params", "params", "--registry", "reg", "--signature", "sig", "--key", "p2", "--peer", "bob"]);
        assert_eq!(named.status.code(), Some(1));
        fs::remove_dir_all(&dir).unwrap();
    }
}

#[test]
fn flipped_signature_bytes_are_rejected() {
    let dir = full_flow("flip", false);
    let sig = fs::read(dir.join("sig")).unwrap();
    let mut rejected = 0;
    for k in (0..sig.len()).step_by(7) {
        let mut bad = sig.clone();
        bad[k] ^= 0x01;
        fs::write(dir.join("bad"), &bad).unwrap();
        let out = verify(&dir, "bad", "bob");
        let stdout = String::from_utf8_lossy(&out.stdout);
        if out.status.code() == Some(1) {
            assert!(stdout.starts_with("bob: reject ("), "{stdout}");
            rejected += 1;
        } else {
            // flipping case or spacing can leave the parsed value intact
            assert_eq!(out.status.code(), Some(0), "{stdout}");
        }
    }
    assert!(rejected > sig.len() / 14);
    let report = tproxy(&dir, &["verify", "--params", "params", "--registry", "reg", "--signature", "sig", "--key", "bob", "--report", "rep"]);
    assert!(report.status.success());
    let rep = fs::read_to_string(dir.join("rep")).unwrap();
    assert!(rep.starts_with("kind = report\nversion = 1\n") && rep.contains("decision = accept"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn secrets_need_the_insecure_flag() {
    let dir = scratch("secret");
    let out = tproxy(&dir, &["setup", "--seed", "x", "--out", "params", "--master-out", "master"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("master").exists());
    ok(&dir, &["setup", "--seed", "x", "--out", "params"]);
    assert!(fs::read_to_string(dir.join("params")).unwrap().contains("backend = transparent"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_artifact_versions_are_refused() {
    let dir = scratch("version");
    ok(&dir, &["--insecure-write", "setup", "--seed", "x", "--out", "params", "--master-out", "master"]);
    let text = fs::read_to_string(dir.join("params")).unwrap().replace("version = 1", "version = 7");
    fs::write(dir.join("params"), text).unwrap();
    let out = tproxy(&dir, &["--insecure-write", "keygen", "--params", "params", "--master", "master", "--identity", "a", "--out", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version 7"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn demo_exit_codes() {
    let dir = scratch("demo");
    let out = tproxy(&dir, &["demo", "--t", "2", "--n", "3", "--suite", "transparent", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "bob: accept\ncindy: accept\n");
    assert_eq!(tproxy(&dir, &["demo", "--t", "4", "--n", "3"]).status.code(), Some(2));
    assert_eq!(tproxy(&dir, &["demo", "--t", "2", "--n", "3", "--fault", "bad-vss-subshare@proxy-2"]).status.code(), Some(3));
    let reject = tproxy(&dir, &["demo", "--t", "3", "--n", "5", "--suite", "transparent-large", "--fault", "small-quorum@proxy-3"]);
    assert_eq!(reject.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&reject.stdout).contains("bob: reject (pairing-inequality)"));
    assert_eq!(tproxy(&dir, &["demo", "--t", "2", "--n", "3", "--fault", "bogus@bob"]).status.code(), Some(2));
    assert_eq!(tproxy(&dir, &["frobnicate"]).status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suite_comes_from_the_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_tproxy"))
        .current_dir(&dir)
        .env("TPROXY_SUITE", "transparent-large")
        .args(["setup", "--seed", "e", "--out", "params"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(fs::read_to_string(dir.join("params")).unwrap().contains("q = 2305843009213697249"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn demo_config_file_and_audit() {
    let dir = scratch("audit");
    fs::write(dir.join("run.toml"), "t = 3\nn = 4\nsuite = \"transparent-large\"\nseed = 9\nsigners = [1, 2, 4]\n").unwrap();
    let out = ok(&dir, &["demo", "--config", "run.toml", "--transcript", "tr.jsonl"]);
    assert_eq!(out, "bob: accept\ncindy: accept\n");
    assert!(ok(&dir, &["audit", "--transcript", "tr.jsonl"]).starts_with("audit: no violations"));
    let mut tr = fs::read_to_string(dir.join("tr.jsonl")).unwrap();
    tr.push_str("{\"event\":\"hold\",\"party\":\"alice\",\"secret\":{\"kind\":\"proxy-key-share\",\"holder\":2}}\n");
    fs::write(dir.join("tr.jsonl"), tr).unwrap();
    let audit = tproxy(&dir, &["audit", "--transcript", "tr.jsonl"]);
    assert_eq!(audit.status.code(), Some(1), "{}", String::from_utf8_lossy(&audit.stderr));
    assert!(String::from_utf8_lossy(&audit.stdout).contains("violation: alice held SK_P2"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tampered_sub_share_aborts_naming_the_dealer() {
    let dir = full_flow("abort", false);
    let path = dir.join("sub/vss-2-to-1.txt");
    let text = fs::read_to_string(&path).unwrap();
    let value = text.lines().find_map(|l| l.strip_prefix("value = ")).unwrap().to_string();
    let mut bytes = hex::decode(&value).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&path, text.replace(&value, &hex::encode(bytes))).unwrap();
    fs::copy(dir.join("reg"), dir.join("reg2")).unwrap();
    let reg = fs::read_to_string(dir.join("reg2")).unwrap();
    let reg: String = reg.lines().filter(|l| !l.starts_with("U/1 ")).map(|l| format!("{l}\n")).collect();
    fs::write(dir.join("reg2"), reg).unwrap();
    let out = tproxy(
        &dir,
        &[
            "--insecure-write", "vss-combine", "--params", "params", "--registry", "reg2", "--n", "3", "--holder", "1",
            "--out", "again", "--shares", "sub/vss-1-to-1.txt", "sub/vss-2-to-1.txt", "sub/vss-3-to-1.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dealer 2"));
    fs::remove_dir_all(&dir).unwrap();
}
