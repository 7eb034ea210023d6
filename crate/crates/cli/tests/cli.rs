use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crystal-basis")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn basis_pg_first_nonconstant_orbit() {
    let v: Value = serde_json::from_str(&stdout(&["basis", "--dim", "2", "--group", "pg", "--radius", "1"])).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["version"].is_string());
    let o = &v["orbits"][1];
    assert_eq!(o["reference"], serde_json::json!([-1, 0]));
    let members: Vec<(Value, Value)> = o["members"].as_array().unwrap().iter().map(|m| (m["omega"].clone(), m["exponent"].clone())).collect();
    assert_eq!(
        members,
        vec![(serde_json::json!([-1, 0]), "0/1".into()), (serde_json::json!([1, 0]), "0/1".into())]
    );
}

#[test]
fn basis_p1_singletons() {
    let v: Value = serde_json::from_str(&stdout(&["basis", "--group", "p1", "--radius", "1"])).unwrap();
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 9);
    assert!(orbits.iter().all(|o| o["members"].as_array().unwrap().len() == 1));
}

#[test]
fn basis_orders_by_eigenvalue() {
    let v: Value = serde_json::from_str(&stdout(&["basis", "--dim", "3", "--group", "193", "--radius", "2"])).unwrap();
    let keys: Vec<i64> = v["orbits"].as_array().unwrap().iter().map(|o| o["eigenvalue_factor"].as_i64().unwrap()).collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn routing_p1_identity_and_pg_signs() {
    let text = stdout(&["routing", "--group", "p1", "--radius", "2"]);
    let m = crystal_basis::read_mtx(&text).unwrap();
    assert_eq!((m.rows(), m.cols(), m.nnz()), (25, 25, 25));
    let text = stdout(&["routing", "--group", "pg", "--radius", "1"]);
    let m = crystal_basis::read_mtx(&text).unwrap();
    let v: Value = serde_json::from_str(&stdout(&["basis", "--group", "pg", "--radius", "1"])).unwrap();
    assert_eq!(m.rows(), v["orbits"].as_array().unwrap().len());
    assert!(m.entries().iter().all(|e| e.value.im == 0.0 && e.value.re.abs() == 1.0));
}

#[test]
fn routing_is_reproducible() {
    let a = stdout(&["routing", "--dim", "3", "--group", "Fd-3m", "--radius", "3"]);
    let b = stdout(&["routing", "--dim", "3", "--group", "227", "--radius", "3"]);
    assert_eq!(a, b);
}

#[test]
fn encode_examples() {
    let rows = csv_rows(&stdout(&["encode", "--group", "p1", "--radius", "1", "--pos", "0,0"]));
    assert!(rows[0].chunks(2).all(|c| c == [1.0, 0.0]));
    let text = stdout(&["encode", "--group", "pg", "--radius", "3", "--pos", "0.13,0.42", "--pos=-0.13,0.92"]);
    let rows = csv_rows(&text);
    assert!(rows[0].iter().zip(&rows[1]).all(|(a, b)| (a - b).abs() < 1e-9));
    let k = serde_json::from_str::<Value>(&stdout(&["basis", "--group", "pg", "--radius", "3"])).unwrap()["orbits"]
        .as_array()
        .unwrap()
        .len();
    let stacked = stdout(&["encode", "--group", "pg", "--radius", "3", "--pos", "0.1,0.2", "--layout", "stacked"]);
    assert_eq!(csv_rows(&stacked)[0].len(), 2 * k);
    let real = stdout(&["encode", "--group", "pg", "--radius", "3", "--pos", "0.1,0.2", "--layout", "real"]);
    assert_eq!(csv_rows(&real)[0].len(), k);
}

#[test]
fn orbit_dist_examples() {
    let d = |args: &[&str]| stdout(args).trim().parse::<f64>().unwrap();
    assert_eq!(d(&["orbit-dist", "--group", "p6m", "--x1", "0.3,0.2", "--x2", "0.3,0.2"]), 0.0);
    let v = d(&["orbit-dist", "--group", "p1", "--x1", "0,0", "--x2", "0.9,0", "--lattice", "1,0,0,1"]);
    assert!((v - 0.1).abs() < 1e-12);
    let v = d(&["orbit-dist", "--group", "pg", "--x1", "0.1,0.1", "--x2", "0.9,0.6", "--lattice", "1,0,0,1"]);
    assert!(v < 1e-12);
}

#[test]
fn orbit_dist_warns_on_mismatched_cell() {
    let out = run(&["orbit-dist", "--group", "p4", "--x1", "0.1,0.1", "--x2", "0.4,0.6", "--lattice", "1,0,0,2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn graph_examples() {
    let dot = stdout(&["graph", "--group", "pg", "--radius", "2"]);
    for line in dot.lines().filter(|l| l.contains("->")) {
        // sources are labelled by node index; the parity rule is read from the label
        let odd = line.contains("label=\"1/2\"");
        assert_eq!(line.contains("color=red"), odd, "{line}");
        assert_eq!(line.contains("color=blue"), !odd, "{line}");
    }
    for w2 in [-1, 1] {
        let node = dot.lines().find(|l| l.contains(&format!("label=\"(0,{w2})\""))).unwrap();
        assert!(node.contains("fillcolor=gray70"));
    }
    let dot = stdout(&["graph", "--group", "p1", "--radius", "2"]);
    assert!(!dot.contains("->"));
}

#[test]
fn graph_parity_rule() {
    // every glide edge (w1,w2) -> (-w1,w2) carries exponent w2/2
    let dot = stdout(&["graph", "--group", "pg", "--radius", "2"]);
    let label = |i: &str| -> (i32, i32) {
        let l = dot.lines().find(|l| l.trim_start().starts_with(&format!("n{i} ["))).unwrap();
        let s = &l[l.find("(").unwrap() + 1..l.find(")").unwrap()];
        let v: Vec<i32> = s.split(',').map(|x| x.parse().unwrap()).collect();
        (v[0], v[1])
    };
    for line in dot.lines().filter(|l| l.contains("->")) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (src, dst) = (label(&parts[0][1..]), label(&parts[2][1..]));
        assert_eq!(dst, (-src.0, src.1));
        let expected = if src.1.rem_euclid(2) == 1 { "1/2" } else { "0/1" };
        assert!(line.contains(&format!("label=\"{expected}\"")));
    }
}

#[test]
fn sample_examples() {
    let rows = csv_rows(&stdout(&["sample", "--group", "p4m", "--radius", "2", "--basis-index", "0", "--grid", "8"]));
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r[2] == 1.0 && r[3] == 0.0));
    let rows = csv_rows(&stdout(&["sample", "--group", "pg", "--radius", "2", "--basis-index", "1", "--grid", "16"]));
    for r in &rows {
        assert!((r[2] - 2.0 * (std::f64::consts::TAU * r[0]).cos()).abs() < 1e-12);
        assert!(r[3].abs() < 1e-12);
    }
}

#[test]
fn sample_e2_antisymmetric_under_glide() {
    // e2 = e(-1,1) - e(1,1); on the grid the glide maps (i, j) to (-i, j + N/2)
    let v: Value = serde_json::from_str(&stdout(&["basis", "--group", "pg", "--radius", "2"])).unwrap();
    let idx = v["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .position(|o| o["reference"] == serde_json::json!([-1, 1]))
        .unwrap()
        .to_string();
    let n = 16usize;
    let rows = csv_rows(&stdout(&["sample", "--group", "pg", "--radius", "2", "--basis-index", &idx, "--grid", "16"]));
    let at = |i: usize, j: usize| &rows[i * n + j];
    let mut nonzero = false;
    for i in 0..n {
        for j in 0..n {
            let g = at((n - i) % n, (j + n / 2) % n);
            let h = at(i, j);
            assert!((g[2] - h[2]).abs() < 1e-12 && (g[3] - h[3]).abs() < 1e-12);
            // the reflection alone (no shift) flips the sign
            let r = at((n - i) % n, j);
            assert!((r[2] + h[2]).abs() < 1e-12 && (r[3] + h[3]).abs() < 1e-12);
            nonzero |= h[2].abs() > 0.1 || h[3].abs() > 0.1;
        }
    }
    assert!(nonzero);
}

#[test]
fn check_single_group() {
    let out = stdout(&["check", "--group", "Pnma", "--dim", "3", "--radius", "3", "--samples", "10"]);
    assert!(out.contains("Pnma") && out.contains(" ok"));
    let json = stdout(&["check", "--group", "p31m", "--radius", "4", "--samples", "5", "--format", "json"]);
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn groups_file_override() {
    let dir = std::env::temp_dir().join(format!("crystal-basis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("groups.txt");
    std::fs::write(&path, "# custom\n2 1 p1\n2 4 pg -x,y+1/2\n").unwrap();
    let p = path.to_str().unwrap();
    assert!(run(&["basis", "--group", "pg", "--radius", "1", "--groups-file", p]).status.success());
    assert_eq!(run(&["basis", "--group", "p2", "--radius", "1", "--groups-file", p]).status.code(), Some(3));
    std::fs::write(&path, "2 4 pg -x,y+1/2,z\n").unwrap();
    assert_eq!(run(&["basis", "--group", "pg", "--groups-file", p]).status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("crystal-basis-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pg.json");
    let p = path.to_str().unwrap();
    assert!(run(&["basis", "--group", "pg", "--radius", "2", "--output", p]).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout(&["basis", "--group", "pg", "--radius", "2"]));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["basis", "--group", "pg", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--group", "q7"]).status.code(), Some(3));
    assert_eq!(run(&["graph", "--dim", "3", "--group", "P1", "--radius", "60"]).status.code(), Some(4));
    assert_eq!(run(&["orbit-dist", "--group", "pg", "--x1", "0.1", "--x2", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["orbit-dist", "--group", "pg", "--x1", "0,0", "--x2", "0,0", "--lattice", "1,0,2,0"]).status.code(), Some(2));
}
