use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const RPSF_PARAMS: &str = r#"{"scheme": "rpsf", "rpsf": {"m": 16, "q": 12289, "kappa": 4}}"#;
const AOS_PARAMS: &str = r#"{"scheme": "aos", "aos": {"vertices": 12, "edge_density": 0.6, "lambda_r": 128, "kappa": 4}}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.file("rpsf.json", RPSF_PARAMS);
        ws.file("aos.json", AOS_PARAMS);
        ws.file("msg", "attack at dawn");
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn file(&self, name: &str, content: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, content).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_ringforge"))
            .current_dir(self.dir.path())
            .env_remove("RINGFORGE_SEED")
            .args(args)
            .output()
            .unwrap()
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    fn json(&self, args: &[&str]) -> Value {
        let out = self.run(args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_slice(&out.stdout).unwrap()
    }

    fn keygen(&self, params: &str, prefix: &str, seed: &str) {
        assert_eq!(self.code(&["--seed", seed, "keygen", "--params", params, "--out", prefix]), 0);
    }
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap()
}

#[test]
fn rpsf_sign_verify_round_trip() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "a", "1");
    ws.keygen("rpsf.json", "b", "2");
    let sign = ["--seed", "3", "sign", "--params", "rpsf.json", "--sk", "a.sk", "--ring", "a.pk", "b.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    assert_eq!(&read(&ws.path("sig"))[..4], b"RFS1");
    let out = ws.run(&["verify", "--params", "rpsf.json", "--ring", "a.pk", "b.pk", "--message", "msg", "--sig", "sig"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "accept");
}

#[test]
fn permuted_ring_order_still_verifies() {
    let ws = Workspace::new();
    for (p, s) in [("a", "1"), ("b", "2"), ("c", "3")] {
        ws.keygen("rpsf.json", p, s);
    }
    let sign = ["sign", "--params", "rpsf.json", "--sk", "b.sk", "--ring", "a.pk", "b.pk", "c.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    let verify = ["verify", "--params", "rpsf.json", "--ring", "c.pk", "a.pk", "b.pk", "--message", "msg", "--sig", "sig"];
    assert_eq!(ws.code(&verify), 0);
}

#[test]
fn tampered_message_is_rejected() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "a", "1");
    let sign = ["sign", "--params", "rpsf.json", "--sk", "a.sk", "--ring", "a.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    ws.file("msg2", "attack at dusk");
    let verify = ["verify", "--params", "rpsf.json", "--ring", "a.pk", "--message", "msg2", "--sig", "sig"];
    let out = ws.run(&verify);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "reject");
}

#[test]
fn aos_sign_verify_round_trip() {
    let ws = Workspace::new();
    ws.keygen("aos.json", "a", "1");
    ws.keygen("aos.json", "b", "2");
    let sign = ["sign", "--params", "aos.json", "--sk", "b.sk", "--ring", "a.pk", "b.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    assert_eq!(&read(&ws.path("sig"))[..4], b"RFA1");
    let verify = ["verify", "--params", "aos.json", "--ring", "b.pk", "a.pk", "--message", "msg", "--sig", "sig"];
    assert_eq!(ws.code(&verify), 0);
}

#[test]
fn keygen_is_deterministic_under_seed() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "x", "42");
    ws.keygen("rpsf.json", "y", "42");
    ws.keygen("rpsf.json", "z", "43");
    assert_eq!(read(&ws.path("x.sk")), read(&ws.path("y.sk")));
    assert_eq!(read(&ws.path("x.pk")), read(&ws.path("y.pk")));
    assert_ne!(read(&ws.path("x.pk")), read(&ws.path("z.pk")));
}

#[test]
fn seed_falls_back_to_environment() {
    let ws = Workspace::new();
    let run_env = |prefix: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_ringforge"))
            .current_dir(ws.dir.path())
            .env("RINGFORGE_SEED", "7")
            .args(["keygen", "--params", "aos.json", "--out", prefix])
            .status()
            .unwrap();
        assert!(status.success());
    };
    run_env("e1");
    ws.keygen("aos.json", "e2", "7");
    assert_eq!(read(&ws.path("e1.sk")), read(&ws.path("e2.sk")));
}

#[test]
fn corrupt_secret_key_magic_is_format_error() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "a", "1");
    let mut sk = read(&ws.path("a.sk"));
    sk[0] = b'X';
    fs::write(ws.path("a.sk"), sk).unwrap();
    let sign = ["sign", "--params", "rpsf.json", "--sk", "a.sk", "--ring", "a.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 3);
}

#[test]
fn truncated_signature_is_format_error() {
    let ws = Workspace::new();
    ws.keygen("aos.json", "a", "1");
    let sign = ["sign", "--params", "aos.json", "--sk", "a.sk", "--ring", "a.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    let sig = read(&ws.path("sig"));
    fs::write(ws.path("sig"), &sig[..sig.len() - 3]).unwrap();
    let verify = ["verify", "--params", "aos.json", "--ring", "a.pk", "--message", "msg", "--sig", "sig"];
    assert_eq!(ws.code(&verify), 3);
}

#[test]
fn signer_outside_ring_exits_4() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "a", "1");
    ws.keygen("rpsf.json", "b", "2");
    let sign = ["sign", "--params", "rpsf.json", "--sk", "a.sk", "--ring", "b.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 4);
}

#[test]
fn invalid_params_exit_2() {
    let ws = Workspace::new();
    ws.file("bad.json", r#"{"scheme": "rpsf", "rpsf": {"m": 12, "q": 12289, "kappa": 4}}"#);
    assert_eq!(ws.code(&["keygen", "--params", "bad.json", "--out", "k"]), 2);
    ws.file("unknown.json", r#"{"scheme": "rpsf", "rpsf": {"m": 16, "q": 12289, "kappa": 4, "bogus": 1}}"#);
    assert_eq!(ws.code(&["keygen", "--params", "unknown.json", "--out", "k"]), 2);
    ws.file("salt.json", r#"{"scheme": "rpsf", "rpsf": {"m": 16, "q": 12289, "kappa": 4}, "salt_bits": 7}"#);
    assert_eq!(ws.code(&["keygen", "--params", "salt.json", "--out", "k"]), 2);
}

#[test]
fn signature_under_other_params_exits_2() {
    let ws = Workspace::new();
    ws.keygen("rpsf.json", "a", "1");
    let sign = ["sign", "--params", "rpsf.json", "--sk", "a.sk", "--ring", "a.pk", "--message", "msg", "--out", "sig"];
    assert_eq!(ws.code(&sign), 0);
    ws.file("other.json", r#"{"scheme": "rpsf", "rpsf": {"m": 16, "q": 12289, "kappa": 4}, "salt_bits": 64}"#);
    let verify = ["verify", "--params", "other.json", "--ring", "a.pk", "--message", "msg", "--sig", "sig"];
    assert_eq!(ws.code(&verify), 2);
}

#[test]
fn bounds_eval_gandalf_reports_delta_kappa() {
    let ws = Workspace::new();
    ws.file("g.json", r#"{"tau": 1.2, "kappa": 1, "m": 64, "q": 12289}"#);
    let v = ws.json(&["bounds", "eval", "--theorem", "gandalf", "--params", "g.json"]);
    let dk = v["terms"]["delta_kappa"].as_f64().unwrap();
    assert!((dk - 8.1e-3).abs() / 8.1e-3 < 0.01, "{dk}");
    assert_eq!(v["theorem"], "gandalf");
}

#[test]
fn bounds_errors_exit_2() {
    let ws = Workspace::new();
    assert_eq!(ws.code(&["bounds", "eval", "--theorem", "thm99"]), 2);
    ws.file("bad.json", r#"{"adv_col": 3.0}"#);
    assert_eq!(ws.code(&["bounds", "eval", "--theorem", "thm7", "--params", "bad.json"]), 2);
    assert_eq!(ws.code(&["bounds", "sweep", "--theorem", "qcol", "--param", "nope", "--values", "1"]), 2);
}

#[test]
fn bounds_sweep_emits_csv_only_on_request() {
    let ws = Workspace::new();
    ws.file("y.json", r#"{"y_size": 256}"#);
    let out = ws.run(&["bounds", "sweep", "--theorem", "qcol", "--params", "y.json", "--param", "q_h", "--values", "1,2,3", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q_h,collision");
    assert_eq!(lines[3], "3.0,0.703125");
    let v = ws.json(&["bounds", "sweep", "--theorem", "qcol", "--params", "y.json", "--param", "q_h", "--values", "1,2,3"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn anon_with_zero_trials_exits_2() {
    let ws = Workspace::new();
    let args = ["game", "run", "--game", "anon", "--params", "rpsf.json", "--adversary", "random", "--trials", "0"];
    assert_eq!(ws.code(&args), 2);
}

#[test]
fn anon_canary_detects_leaked_bit() {
    let ws = Workspace::new();
    let args = [
        "--seed", "5", "game", "run", "--game", "anon", "--params", "aos.json", "--adversary", "canary", "--trials", "50",
        "--leak-challenge-bit",
    ];
    let v = ws.json(&args);
    assert_eq!(v["wins"], 50);
}

#[test]
fn forgery_games_report_outcomes() {
    let ws = Workspace::new();
    let replay = ws.json(&["game", "run", "--game", "sufcra", "--params", "aos.json", "--adversary", "replay", "--trials", "2"]);
    assert_eq!(replay["wins"], 0);
    let stolen = ws.json(&[
        "game", "run", "--game", "ufcra1", "--params", "aos.json", "--adversary", "stolen-key", "--leak-key", "0",
    ]);
    assert_eq!(stolen["wins"], 1);
    let over = ws.json(&[
        "game", "run", "--game", "sufcra", "--params", "aos.json", "--adversary", "budget-exceeding", "--budget", "1",
    ]);
    assert!(over["results"][0]["protocol_violation"].is_string());
    assert_eq!(ws.code(&["game", "run", "--game", "sufcra", "--params", "aos.json", "--adversary", "nobody"]), 2);
}

#[test]
fn extraction_game_recovers_witnesses() {
    let ws = Workspace::new();
    let v = ws.json(&["game", "run", "--game", "ufnra", "--params", "aos.json", "--adversary", "honest-prover", "--trials", "5"]);
    assert_eq!(v["extractions"], 5);
    let args = ["game", "run", "--game", "ufnra", "--params", "rpsf.json", "--adversary", "honest-prover"];
    assert_eq!(ws.code(&args), 2);
}

#[test]
fn lab_grover_distances_lie_in_band() {
    let ws = Workspace::new();
    ws.file("g.json", r#"{"n_domain": 65536, "eps": 0.001, "q": 5, "trials": 200}"#);
    let v = ws.json(&["--seed", "9", "lab", "grover", "--config", "g.json"]);
    let trials = v["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 200);
    for t in trials {
        let d = t["distance"].as_f64().unwrap();
        assert!(t["band_low"].as_f64().unwrap() <= d && d <= t["band_high"].as_f64().unwrap());
    }
    let again = ws.json(&["--seed", "9", "lab", "grover", "--config", "g.json"]);
    assert_eq!(v, again);
}

#[test]
fn lab_dj_reports_closed_form_and_budget() {
    let ws = Workspace::new();
    ws.file(
        "dj.json",
        r#"{"n": 10, "n_prime": 2, "p": {"a": 0.9, "b": 0.1}, "q": {"a": 0.5, "b": 0.5}, "mc_samples": 200}"#,
    );
    let v = ws.json(&["lab", "dj", "--config", "dj.json"]);
    assert!((v["closed_form"]["ratio"].as_f64().unwrap() - 655.72).abs() < 1e-9);
    assert_eq!(v["monte_carlo"]["z_p"].as_array().unwrap().len(), 200);
    ws.file(
        "big.json",
        r#"{"n": 20, "n_prime": 3, "p": {"a": 0.9, "b": 0.1}, "q": {"a": 0.5, "b": 0.5}, "mc_samples": 2}"#,
    );
    assert_eq!(ws.code(&["lab", "dj", "--config", "big.json"]), 2);
    let out = ws.run(&["lab", "dj", "--config", "dj.json", "--csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("draw,z_p,z_q"));
}

#[test]
fn lab_small_range_and_repro() {
    let ws = Workspace::new();
    ws.file("sr.json", r#"{"r": 2, "dist": {"a": 0.25, "b": 0.25, "c": 0.5}, "domain_size": 16}"#);
    let v = ws.json(&["lab", "small-range", "--config", "sr.json"]);
    assert!(v["distinct_outputs"].as_u64().unwrap() <= 2);
    ws.file("re.json", r#"{"r": 1, "q_dist": {"a": 0.9, "b": 0.1}, "trials": 5000}"#);
    let v = ws.json(&["lab", "repro", "--config", "re.json"]);
    assert_eq!(v["pass"], true);
}

#[test]
fn help_documents_flags() {
    let ws = Workspace::new();
    let out = ws.run(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--seed", "--jobs", "keygen", "sign", "verify", "bounds", "game", "lab"] {
        assert!(text.contains(flag), "{flag}");
    }
}
