use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;
use tempfile::TempDir;

use tauttrack::census;
use tauttrack::corpus::random_normal_loop;
use tauttrack::taut::{enumerate_taut, verify_taut, PiPair, TautStructure};
use tauttrack::transverse::{solve_parity, Coorientation};

fn tauttrack(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauttrack"))
        .current_dir(dir)
        .env_remove("TAUTTRACK_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// A corpus written once and shared by the tests that read it.
fn corpus() -> &'static Path {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let o = tauttrack(dir.path(), &["corpus", "generate", "--out", "c", "--max-normal", "40"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        dir
    })
    .path()
}

fn manifest() -> Value {
    serde_json::from_str(&fs::read_to_string(corpus().join("c/manifest.json")).unwrap()).unwrap()
}

/// Triangulation, taut and coorientation files of a manifest diagram entry.
fn files_of(m: &Value, d: &Value) -> (String, String, Option<String>) {
    let t = &m["tris"][d["tri"].as_u64().unwrap() as usize];
    let k = &t["tauts"][d["taut"].as_u64().unwrap() as usize];
    let c = |s: &Value| format!("c/{}", s.as_str().unwrap());
    (c(&t["tri"]), c(&k["taut"]), k["coor"].as_str().map(|s| format!("c/{s}")))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn enumerate_matches_brute_force_on_the_figure_eight() {
    let dir = TempDir::new().unwrap();
    let tri = census::figure_eight();
    write(dir.path(), "m004.tri", &tri.to_text());
    let o = tauttrack(dir.path(), &["taut", "enumerate", "m004.tri", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let listed: Vec<String> =
        json(&o)["structures"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
    let all = [PiPair::P01_23, PiPair::P02_13, PiPair::P03_12];
    let mut oracle = Vec::new();
    for a in all {
        for b in all {
            let cand = TautStructure::new(vec![a, b]);
            if verify_taut(&tri, &cand).unwrap().is_empty() {
                oracle.push(cand.to_text());
            }
        }
    }
    oracle.sort();
    let mut got = listed.clone();
    got.sort();
    assert_eq!(got, oracle);
    assert!(!listed.is_empty());
}

#[test]
fn vertical_refutation_of_a_corpus_diagram() {
    let m = manifest();
    let d = m["diagrams"].as_array().unwrap().iter().find(|d| d["kind"] == "vertical").unwrap();
    let (tri, taut, _) = files_of(&m, d);
    let file = format!("c/{}", d["file"].as_str().unwrap());
    let o = tauttrack(corpus(), &["disk", "refute", &tri, &taut, &file, "--kind", "vertical"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("Vertical parity"), "{}", stdout(&o));
    let o = tauttrack(corpus(), &["disk", "refute", &tri, &taut, &file, "--kind", "vertical", "-v"]);
    assert!(stdout(&o).contains("Vertical parity"), "{}", stdout(&o));
    let o = tauttrack(corpus(), &["disk", "refute", &tri, &taut, &file, "--kind", "vertical", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["status"], "refuted");
    assert_eq!(v["certificate"]["verdict"]["reason"], "parity");
}

#[test]
fn normal_refutations_use_the_boundary_loop_file() {
    let m = manifest();
    let normal: Vec<&Value> = m["diagrams"].as_array().unwrap().iter().filter(|d| d["kind"] == "normal").collect();
    assert!(!normal.is_empty());
    for d in normal.iter().take(10) {
        let (tri, taut, coor) = files_of(&m, d);
        let file = format!("c/{}", d["file"].as_str().unwrap());
        let coor = coor.expect("normal diagrams live on transverse structures");
        let o = tauttrack(corpus(), &["disk", "refute", &tri, &taut, &file, "--kind", "normal", "--coor", &coor, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert_eq!(json(&o)["status"], "refuted");
    }
}

#[test]
fn json_output_is_byte_stable() {
    let m = manifest();
    let d = &m["diagrams"][0];
    let (tri, taut, _) = files_of(&m, d);
    let file = format!("c/{}", d["file"].as_str().unwrap());
    for args in [
        vec!["disk", "audit", &tri, &taut, &file, "--format", "json"],
        vec!["disk", "census", &tri, &file, "--format", "json"],
        vec!["taut", "enumerate", &tri, "--format", "json"],
    ] {
        let a = tauttrack(corpus(), &args);
        let b = tauttrack(corpus(), &args);
        assert_eq!(a.stdout, b.stdout);
        json(&a);
    }
}

#[test]
fn same_seed_gives_the_same_corpus() {
    let dir = TempDir::new().unwrap();
    let o = tauttrack(dir.path(), &["corpus", "generate", "--out", "c", "--max-normal", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let mut files = Vec::new();
    let mut stack = vec![PathBuf::from("c")];
    while let Some(p) = stack.pop() {
        for e in fs::read_dir(dir.path().join(&p)).unwrap() {
            let e = e.unwrap();
            let rel = p.join(e.file_name());
            if e.file_type().unwrap().is_dir() {
                stack.push(rel);
            } else {
                files.push(rel);
            }
        }
    }
    assert!(files.len() > 100);
    for f in files {
        assert_eq!(fs::read(dir.path().join(&f)).unwrap(), fs::read(corpus().join(&f)).unwrap(), "{}", f.display());
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tauttrack"))
        .current_dir(dir.path())
        .env("TAUTTRACK_SEED", "11")
        .args(["corpus", "generate", "--out", "c", "--max-normal", "1", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 11);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let o = tauttrack(dir.path(), &["tri", "validate", "missing.tri"]);
    assert_eq!(o.status.code(), Some(2));
    write(dir.path(), "bad.tri", "tet 0 nonsense\n");
    assert_eq!(tauttrack(dir.path(), &["tri", "validate", "bad.tri"]).status.code(), Some(2));
    assert_eq!(tauttrack(dir.path(), &["taut", "frobnicate"]).status.code(), Some(2));
    write(dir.path(), "m004.tri", &census::figure_eight().to_text());
    write(dir.path(), "short.taut", "taut 0 01|23\n");
    assert_eq!(tauttrack(dir.path(), &["taut", "verify", "m004.tri", "short.taut"]).status.code(), Some(2));
}

#[test]
fn audits_pass_and_fail_with_the_documented_codes() {
    let dir = TempDir::new().unwrap();
    let tri = census::figure_eight();
    write(dir.path(), "m004.tri", &tri.to_text());
    assert_eq!(tauttrack(dir.path(), &["tri", "validate", "m004.tri"]).status.code(), Some(0));
    let taut = enumerate_taut(&tri).remove(0);
    write(dir.path(), "good.taut", &taut.to_text());
    assert_eq!(tauttrack(dir.path(), &["taut", "verify", "m004.tri", "good.taut"]).status.code(), Some(0));
    let bad = TautStructure::new(vec![PiPair::P01_23; 2]);
    if !verify_taut(&tri, &bad).unwrap().is_empty() {
        write(dir.path(), "bad.taut", &bad.to_text());
        assert_eq!(tauttrack(dir.path(), &["taut", "verify", "m004.tri", "bad.taut"]).status.code(), Some(1));
    }
    let coor = solve_parity(&tri, &taut).unwrap();
    write(dir.path(), "good.coor", &coor.to_text(&tri));
    let o = tauttrack(dir.path(), &["transverse", "verify", "m004.tri", "good.taut", "good.coor"]);
    assert_eq!(o.status.code(), Some(0));
    let mut flip = coor.clone();
    flip.signs[0] = -flip.signs[0];
    write(dir.path(), "flip.coor", &flip.to_text(&tri));
    let flipped = tauttrack(dir.path(), &["transverse", "verify", "m004.tri", "good.taut", "flip.coor"]);
    assert_eq!(flipped.status.code(), Some(1), "{}", stdout(&flipped));
}

#[test]
fn raise_lifts_to_the_cover_without_a_coorientation() {
    let dir = TempDir::new().unwrap();
    let (tri, taut) = census::one_tetrahedron()
        .into_iter()
        .flat_map(|t| enumerate_taut(&t).into_iter().map(move |s| (t.clone(), s)))
        .find(|(t, s)| solve_parity(t, s).is_none())
        .expect("a taut structure that is not transverse");
    let normal = (0..50).find_map(|s| random_normal_loop(&tri, &taut, s, 8)).unwrap();
    write(dir.path(), "t.tri", &tri.to_text());
    write(dir.path(), "t.taut", &taut.to_text());
    write(dir.path(), "g.loop", &normal.to_text());
    let o = tauttrack(dir.path(), &["loop", "raise", "t.tri", "t.taut", "g.loop", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["setting"], "double cover");
    assert!(v["lifted_loop"].is_string());
    let o = tauttrack(dir.path(), &["cover", "build", "t.tri", "t.taut", "--out", "cover/t.tri", "--format", "json"]);
    assert_eq!(json(&o)["components"], 1);
    assert!(dir.path().join("cover/t.tri.coor").exists());
    // a coorientation that fails verification is refused, pointing at the cover
    let wrong = Coorientation { signs: vec![1; tri.face_classes().len()] };
    write(dir.path(), "wrong.coor", &wrong.to_text(&tri));
    let o = tauttrack(dir.path(), &["loop", "raise", "t.tri", "t.taut", "g.loop", "--coor", "wrong.coor"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cover build"));
}

#[test]
fn push_up_and_push_min_run_on_corpus_inputs() {
    let m = manifest();
    let loops = m["loops"].as_array().unwrap();
    let l = &loops[0];
    let (tri, taut, coor) = files_of(&m, l);
    let file = format!("c/{}", l["file"].as_str().unwrap());
    let coor = coor.unwrap();
    let raised = json(&tauttrack(corpus(), &["loop", "raise", &tri, &taut, &file, "--coor", &coor, "--format", "json"]));
    assert_eq!(raised["setting"], "given");
    let sites: Vec<usize> = raised["raised"]["arcs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["kind"].as_str().unwrap().starts_with('A'))
        .map(|a| a["lowering"]["indices"][0].as_u64().unwrap() as usize)
        .collect();
    if let Some(site) = sites.first() {
        let o = tauttrack(corpus(), &["loop", "push-up", &tri, &taut, &file, "--coor", &coor, "--site", &site.to_string()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut pushed = 0;
    for d in m["diagrams"].as_array().unwrap().iter().filter(|d| d["kind"] == "general").take(60) {
        let (tri, taut, coor) = files_of(&m, d);
        let Some(coor) = coor else { continue };
        let file = format!("c/{}", d["file"].as_str().unwrap());
        let o = tauttrack(corpus(), &["disk", "push-min", &tri, &taut, &file, "--coor", &coor, "--format", "json"]);
        match o.status.code() {
            Some(0) => {
                let v = json(&o);
                assert_eq!(v["total_q"], 4);
                assert_eq!(v["regions_after"].as_u64().unwrap() + 1, v["regions_before"].as_u64().unwrap());
                pushed += 1;
            }
            Some(1) => {}
            c => panic!("{c:?}: {}", String::from_utf8_lossy(&o.stderr)),
        }
    }
    assert!(pushed > 0);
}
