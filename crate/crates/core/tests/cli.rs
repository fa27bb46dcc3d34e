use std::fs;

use dpgon::cli::run;
use dpgon::gonality::{analyze, AnalysisReport};
use dpgon::DivisorClass;

fn dpgon(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dpgon").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn analyze_space_sextic() {
    let (code, out, _) = dpgon(&["analyze", "--class", "6:9;3,3,3,3,3,3"]);
    assert_eq!(code, 0);
    for line in [
        "genus: 10",
        "gonality: 6",
        "clifford index: 3",
        "clifford dimension: 3",
        "exceptional: yes, witness 6:3;1,1,1,1,1,1",
    ] {
        assert!(out.lines().any(|l| l == line), "missing {line:?} in\n{out}");
    }
}

#[test]
fn analyze_genus_two() {
    let (code, out, _) = dpgon(&["analyze", "--class", "8:6;2,2,2,2,2,2,2,2"]);
    assert_eq!(code, 0);
    assert!(out.contains("genus: 2\n"));
    assert!(out.contains("gonality: 2\n"));
    assert!(out.contains("clifford index: undefined"));
}

#[test]
fn validation_failures_exit_one() {
    let (code, _, err) = dpgon(&["analyze", "--class", "1:0;-1"]);
    assert_eq!(code, 1);
    assert!(err.contains("class is not nef"));
    let (code, _, err) = dpgon(&["analyze", "--class", "0:1;"]);
    assert_eq!(code, 1);
    assert!(err.contains("genus"));
    let (code, _, _) = dpgon(&["analyze", "--class", "6:9;3,3,3,3,3,3", "--subfamily", "special"]);
    assert_eq!(code, 1);
}

#[test]
fn parse_failures_exit_two() {
    let (code, _, err) = dpgon(&["analyze", "--class", "8:3;1,1,x,1,1,1,1,1"]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("`x`"), "{err}");
    assert_eq!(dpgon(&["analyze"]).0, 2);
    assert_eq!(dpgon(&["frobnicate"]).0, 2);
    assert_eq!(dpgon(&["curves", "--surface", "9", "--type", "neg1"]).0, 2);
    assert_eq!(dpgon(&["curves", "--surface", "3", "--type", "cubic"]).0, 2);
}

#[test]
fn special_subfamily_pencils() {
    let (code, out, _) = dpgon(&["analyze", "--class", "7:6;2,2,2,2,2,2,2", "--subfamily", "special"]);
    assert_eq!(code, 0);
    let pencils: Vec<_> = out.lines().filter(|l| l.starts_with("pencil")).collect();
    assert_eq!(pencils.len(), 1);
    assert!(pencils[0].contains("b.hyper D=7:3;1,1,1,1,1,1,1 minus length-2 non-very-ample scheme Z2"));
    assert!(pencils[0].ends_with("degree 2"));
}

#[test]
fn json_round_trip() {
    for class in [
        "0:5;",
        "8:9;3,3,3,3,3,3,3,3",
        "6:9;3,3,3,3,3,3",
        "7:6;2,2,2,2,2,2,2",
        "5:7;3,2,2,1,1",
    ] {
        let (code, out, _) = dpgon(&["analyze", "--class", class, "--json"]);
        assert_eq!(code, 0);
        let parsed: AnalysisReport = serde_json::from_str(&out).unwrap();
        let l: DivisorClass = class.parse().unwrap();
        assert_eq!(parsed, analyze(&l).unwrap());
    }
}

#[test]
fn permuted_input_gives_permuted_report() {
    let a: AnalysisReport =
        serde_json::from_str(&dpgon(&["analyze", "--class", "6:7;3,2,2,1,1,0", "--json"]).1).unwrap();
    let b: AnalysisReport =
        serde_json::from_str(&dpgon(&["analyze", "--class", "6:7;0,1,1,2,2,3", "--json"]).1).unwrap();
    let reverse = |d: &DivisorClass| d.permuted(&[5, 4, 3, 2, 1, 0]);
    let mut mapped: Vec<_> = a.gonality.minimal_set.iter().map(|c| reverse(&c.d)).collect();
    mapped.sort();
    let other: Vec<_> = b.gonality.minimal_set.iter().map(|c| c.d).collect();
    assert_eq!(mapped, other);
    assert_eq!(
        (a.gonality.k0, a.gonality.case_tag, a.k_max),
        (b.gonality.k0, b.gonality.case_tag, b.k_max)
    );
    let mut pa: Vec<_> = a
        .pencils_general
        .iter()
        .map(|p| (p.clause.clone(), p.d.map(|d| reverse(&d))))
        .collect();
    let mut pb: Vec<_> = b.pencils_general.iter().map(|p| (p.clause.clone(), p.d)).collect();
    pa.sort();
    pb.sort();
    assert_eq!(pa, pb);
}

#[test]
fn curves_listing() {
    let (code, out, _) = dpgon(&["curves", "--surface", "2", "--type", "neg1"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "class,self_intersection,kdeg\n\"2:0;-1,0\",-1,1\n\"2:0;0,-1\",-1,1\n\"2:1;1,1\",-1,1\n"
    );
    let (code, out, _) = dpgon(&["curves", "--surface", "6", "--type", "sq1", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 72);
    assert_eq!(v["type"], "sq1");
}

#[test]
fn sweep_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s6.csv");
    let (code, out, _) = dpgon(&[
        "sweep",
        "--surface",
        "6",
        "--max-kdeg",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), format!("wrote 370 rows to {}", path.display()));
    let golden = include_str!("golden/sweep_s6_k6.csv");
    assert_eq!(fs::read_to_string(&path).unwrap(), golden);
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (jobs, format) in [("1", "json"), ("3", "json"), ("1", "csv"), ("2", "csv")] {
        let path = dir.path().join(format!("s7-{jobs}.{format}"));
        let args = [
            "sweep",
            "--surface",
            "7",
            "--max-kdeg",
            "6",
            "--out",
            path.to_str().unwrap(),
            "--format",
            format,
            "--jobs",
            jobs,
        ];
        assert_eq!(dpgon(&args).0, 0);
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
    let rows: Vec<AnalysisReport> = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(rows.len() + 1, String::from_utf8_lossy(&outputs[2]).lines().count());
}

#[test]
fn sweep_known_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p7 = dir.path().join("s7.csv");
    assert_eq!(
        dpgon(&[
            "sweep",
            "--surface",
            "7",
            "--max-kdeg",
            "4",
            "--out",
            p7.to_str().unwrap()
        ])
        .0,
        0
    );
    let text = fs::read_to_string(&p7).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("7,\"7:6;2,2,2,2,2,2,2\",3,1,case_I,2,3,")));
    // Degree 3 already holds -2K_8 and -3K_8.
    let p8 = dir.path().join("s8.csv");
    assert_eq!(
        dpgon(&[
            "sweep",
            "--surface",
            "8",
            "--max-kdeg",
            "3",
            "--out",
            p8.to_str().unwrap()
        ])
        .0,
        0
    );
    let text = fs::read_to_string(&p8).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("8,\"8:9;3,3,3,3,3,3,3,3\",4,1,case_III,2,3,")));
    assert!(text
        .lines()
        .any(|l| l.starts_with("8,\"8:6;2,2,2,2,2,2,2,2\",2,0,constant,,2,")));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let (code, out, _) = dpgon(&[
        "sweep",
        "--surface",
        "0",
        "--max-kdeg",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("wrote 0 rows"));
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn failed_sweep_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    // A non-empty directory cannot be replaced by the finished file.
    let target = dir.path().join("taken");
    fs::create_dir(&target).unwrap();
    fs::write(target.join("keep"), "x").unwrap();
    let (code, _, _) = dpgon(&[
        "sweep",
        "--surface",
        "5",
        "--max-kdeg",
        "6",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    let names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["taken"]);
}

#[test]
fn audit_exit_codes() {
    let (code, out, _) = dpgon(&["audit", "--surface", "4", "--max-kdeg", "8"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 discrepancies\n");
    let (code, out, _) = dpgon(&[
        "audit",
        "--surface",
        "6",
        "--max-kdeg",
        "6",
        "--coverage",
        "orbits",
        "--json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "[]");
}

#[test]
fn curve_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // The variable is read at call time; this is the only test touching it.
    std::env::set_var("DPGON_CACHE", dir.path());
    let (code, first, _) = dpgon(&["curves", "--surface", "5", "--type", "conic"]);
    assert_eq!(code, 0);
    let file = dir.path().join("curves-S5.json");
    assert!(file.exists());
    let (_, second, err) = dpgon(&["curves", "--surface", "5", "--type", "conic"]);
    assert_eq!(first, second);
    assert!(err.is_empty());
    fs::write(
        &file,
        "{\"surface\":5,\"neg_curves\":[],\"conic_classes\":[],\"line_pullbacks\":[]}",
    )
    .unwrap();
    let (code, third, err) = dpgon(&["curves", "--surface", "5", "--type", "conic"]);
    std::env::remove_var("DPGON_CACHE");
    assert_eq!(code, 0);
    assert_eq!(first, third);
    assert!(err.contains("ignoring curve cache"));
}
