use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gperiods(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gperiods"))
        .args(args)
        .env_remove("GPERIODS_THREADS")
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", dir.to_str().unwrap()]);
    gperiods(&full)
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn gauss_writes_the_standard_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let r = run_in(&out, &["gauss", "--n", "10", "--omega", "3"]);
    assert_eq!(r.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("points.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("index,re,im,color\n0,4.0"));
    assert!(fs::read(out.join("plot.png")).unwrap().starts_with(b"\x89PNG"));
    let meta = json(&fs::read(out.join("meta.json")).unwrap());
    assert_eq!(meta["config"]["command"], "gauss");
    assert_eq!(meta["summary"]["d"], 4);
}

#[test]
fn trivial_orbit_lands_on_the_unit_circle() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run_in(tmp.path(), &["gauss", "--n", "7", "--omega", "1", "--color-mod", "1"]);
    assert!(r.status.success());
    let csv = fs::read_to_string(tmp.path().join("points.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').skip(1).take(2).map(|x| x.parse().unwrap()).collect();
        assert!((f[0].hypot(f[1]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn invalid_parameters_leave_no_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["gauss", "--n", "10", "--omega", "5"],
        &["gauss", "--n", "10", "--omega", "3", "--color-mod", "0"],
        &["superchar", "--n", "10", "--m", "2", "--matrix", "2,0,0,2"],
        &["superchar", "--n", "10", "--m", "2", "--matrix", "1,0,0"],
        &["rcfp", "--field", "5", "--modulus", "25", "--element", "2,1"],
        &["rcfp", "--field", "7", "--modulus", "625", "--element", "5,0"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = tmp.path().join(i.to_string());
        let r = run_in(&out, args);
        assert_eq!(r.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(!out.exists(), "{args:?} created output");
    }
    assert_eq!(gperiods(&["gauss", "--n", "10"]).status.code(), Some(2));
}

#[test]
fn budget_overruns_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let r = run_in(&out, &["superchar", "--n", "1155", "--m", "3", "--matrix", "1,0,0,0,1,0,0,0,1"]);
    assert_eq!(r.status.code(), Some(3));
    assert!(!out.exists());
    let r = run_in(&out, &["rcfp", "--field", "1", "--modulus", "2000", "--element", "3,0"]);
    assert_eq!(r.status.code(), Some(3));
    let r = run_in(&out, &["gd", "--d", "7", "--samples", "300"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_five() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let r = run_in(&file, &["gauss", "--n", "10", "--omega", "3"]);
    assert_eq!(r.status.code(), Some(5));
}

#[test]
fn thread_variable_is_validated() {
    let r = Command::new(env!("CARGO_BIN_EXE_gperiods"))
        .args(["weyl", "--n", "7", "--m", "1", "--matrix", "2", "--v", "0,1"])
        .env("GPERIODS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn weyl_report_fields() {
    for name in ["weyl", "weyl-check"] {
        let r = gperiods(&[name, "--n", "7", "--m", "1", "--matrix", "2", "--v", "0,1"]);
        assert!(r.status.success());
        let report = json(&r.stdout);
        assert_eq!(report["exact"], 0);
        assert_eq!(report["agree"], true);
        assert_eq!(report["alpha"], serde_json::json!([2]));
        assert_eq!(report["d"], 3);
    }
    let r = gperiods(&["weyl", "--n", "7", "--m", "1", "--matrix", "2", "--v", "1,1,1"]);
    assert_eq!(json(&r.stdout)["exact"], 7);
}

#[test]
fn find_element_prints_certificates() {
    let r = gperiods(&["find-element", "--n", "455", "--m", "2", "--d", "3", "--vanish"]);
    assert!(r.status.success());
    let report = json(&r.stdout);
    assert_eq!(report["order"], 3);
    assert_eq!(report["phi_d_vanishes"], true);
    assert_eq!(report["phi_d_residue"], serde_json::json!([0, 0, 0, 0]));
    // no root of Φ_5 in Z/25Z
    let r = gperiods(&["find-element", "--n", "25", "--d", "5", "--vanish"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn frames_accumulate_batches() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["gauss", "--n", "1000", "--omega", "7", "--frames", "300", "--width", "96", "--height", "96"];
    assert!(run_in(tmp.path(), &args).status.success());
    let mut frames: Vec<_> = fs::read_dir(tmp.path().join("frames"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    frames.sort();
    assert_eq!(frames, ["frame_00001.png", "frame_00002.png", "frame_00003.png", "frame_00004.png"]);
    let last = fs::read(tmp.path().join("frames/frame_00004.png")).unwrap();
    assert_eq!(last, fs::read(tmp.path().join("plot.png")).unwrap());
}

#[test]
fn gd_and_torsion_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("gd");
    assert!(run_in(&out, &["gd-image", "--d", "3", "--samples", "50", "--formats", "csv"]).status.success());
    assert_eq!(fs::read_to_string(out.join("points.csv")).unwrap().lines().count(), 2501);
    assert!(!out.join("plot.png").exists());
    let out = tmp.path().join("t");
    let args = ["torsion", "--field", "1", "--modulus", "12", "--coord", "y", "--rescale"];
    assert!(run_in(&out, &args).status.success());
    assert_eq!(fs::read_to_string(out.join("points.csv")).unwrap().lines().count(), 144);
}

#[test]
fn replay_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let args = ["rcfp", "--field", "1", "--modulus", "35", "--element", "4,1", "--color-mod", "5", "--weber"];
    assert!(run_in(&first, &args).status.success());
    let second = tmp.path().join("second");
    let meta = first.join("meta.json");
    let r = run_in(&second, &["replay", "--meta", meta.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["points.csv", "plot.png", "meta.json"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap());
    }
}
