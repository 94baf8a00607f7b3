use hodge_virasoro::cli::run_with;
use std::ffi::OsString;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("hodgevir").chain(args.iter().copied()).map(OsString::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hodgevir"));
    c.env_remove("HODGEVIR_CACHE_DIR");
    c
}

#[test]
fn correlator_queries() {
    assert_eq!(run(&["correlator", "--model", "point", "--genus", "2", "--insertions", "tau4"]), (0, "1/1152\n".into(), String::new()));
    let (code, out, _) = run(&["correlator", "--model", "point", "--insertions", "tau0,tau0,tau0"]);
    assert_eq!((code, out.as_str()), (0, "1\n"));
    let (code, out, _) = run(&["correlator", "--model", "p1", "--degree", "2", "--insertions", "tau2(w)"]);
    assert_eq!((code, out.as_str()), (0, "1/4\n"));
    let (code, out, _) = run(&["correlator", "--model", "point", "--genus", "1", "--insertions", "tau0", "--hodge", "ch1"]);
    assert_eq!((code, out.as_str()), (0, "1/24\n"));
}

#[test]
fn spec_examples_pass() {
    let (code, out, _) = run(&["check", "fp", "--model", "point", "--l", "1", "--t-deg", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("fp") && out.contains("PASS"));
    let (code, out, _) = run(&["check", "bracket", "--model", "p1", "--n", "5", "--m", "5"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = run(&["check", "bracket", "--model", "point", "--n", "1", "--m", "-1", "--s-cap", "2"]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["check", "higher_genus", "--model", "point", "--genus", "2", "--k1", "3"]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["check", "bracket", "--bogus"][..],
        &["check", "nope"],
        &["correlator", "--model", "p3", "--insertions", "tau0"],
        &["correlator", "--model", "p1", "--insertions", "tau0"],
        &["correlator", "--model", "point", "--hodge", "ch2"],
        &["check", "higher_genus", "--k1", "2"],
        &["check", "genus1_L1", "--model", "p1"],
        &["suite", "partial"],
        &[],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn failing_check_exits_1_with_report() {
    // The P^1 seed is invisible to every constraint (q-rescaling symmetry).
    let (code, out, _) = run(&["check", "negative_control"]);
    assert_eq!(code, 1);
    assert!(out.contains("seed p1_seed"), "{out}");
    assert!(!out.contains("seed tau0_cubed"), "{out}");
}

#[test]
fn json_report_shape_and_determinism() {
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        let obj = v.as_object_mut().unwrap();
        let keys: Vec<&String> = obj.keys().collect();
        assert_eq!(keys, ["examined", "failures", "id", "params", "status", "wall_ms"]);
        obj.remove("wall_ms");
        v
    };
    let args = ["check", "genus1_L1", "--json"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    let (a, b) = (strip(&a), strip(&b));
    assert_eq!(a, b);
    assert_eq!(a["status"], "pass");
    assert_eq!(a["id"], "genus1_L1");
}

#[test]
fn failure_entries_render_rationals() {
    let (_, out, _) = run(&["check", "negative_control", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "fail");
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let file = dir.path().join("point.cache");
    let d = dir.path().to_str().unwrap();

    let st = bin().args(["--cache-dir", d, "correlator", "--model", "point", "--genus", "2", "--insertions", "tau4"]).output().unwrap();
    assert!(st.status.success());
    assert_eq!(String::from_utf8_lossy(&st.stdout), "1/1152\n");

    let st = bin().args(["--cache-dir", d, "cache", "export", file.to_str().unwrap()]).output().unwrap();
    assert!(st.status.success());
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.lines().count() > 1);

    // import through the environment variable into an empty directory
    let st = bin()
        .env("HODGEVIR_CACHE_DIR", other.path())
        .args(["cache", "import", file.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(std::fs::read_dir(other.path()).unwrap().count() == 1);

    // a cache written for another model is rejected
    let st = bin().env("HODGEVIR_CACHE_DIR", other.path()).args(["cache", "import", "--model", "p1", file.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let bad = dir.path().join("bad.cache");
    std::fs::write(&bad, "garbage header\nnot|a|key\n").unwrap();
    let st = bin().args(["--cache-dir", d, "cache", "import", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn binary_exit_codes() {
    let st = bin().args(["check", "oracle"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let st = bin().args(["check", "oracle", "--frobnicate"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().args(["models"]).output().unwrap();
    assert!(String::from_utf8_lossy(&st.stdout).contains("p1"));
}
