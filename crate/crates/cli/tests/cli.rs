use std::fs;
use std::path::Path;

use lssd_cli::format::{FormatError, LssdDocument};
use lssd_cli::{load_hadamard, load_oa, run_with, CliError, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use lssd_core::golden::{golden_h4, golden_oa16};
use lssd_core::hadamard_oa::OrthogonalArray;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn lssd(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("lssd").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn kerdock_file(dir: &TempDir) -> String {
    let p = path(dir, "kerdock16.json");
    assert_eq!(
        lssd(&["construct", "kerdock", "--n", "4", "--embedded-family", "--out", &p]).code,
        EXIT_OK
    );
    p
}

#[test]
fn every_construction_verifies() {
    let dir = TempDir::new().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("k.json", vec!["construct", "kerdock", "--n", "4", "--embedded-family"]),
        ("k3.json", vec!["construct", "kerdock", "--n", "4", "--w", "3"]),
        ("bw.json", vec!["construct", "beth-wocjan"]),
        (
            "syl.json",
            vec![
                "construct",
                "beth-wocjan",
                "--oa",
                "builtin:mols:4",
                "--hadamard",
                "builtin:h4",
            ],
        ),
        ("deg.json", vec!["construct", "degenerate", "--v", "5", "--w", "4"]),
    ];
    for (name, mut args) in cases {
        let p = path(&dir, name);
        args.extend(["--out", p.as_str()]);
        let r = lssd(&args);
        assert_eq!(r.code, EXIT_OK, "{name}: {}{}", r.out, r.err);
        let v = lssd(&["verify", &p]);
        assert_eq!(v.code, EXIT_OK, "{name}: {}", v.out);
        assert!(v.out.contains("verified"));
    }
}

#[test]
fn construct_without_out_prints_document() {
    let r = lssd(&["construct", "degenerate", "--v", "3", "--w", "2"]);
    assert_eq!(r.code, EXIT_OK);
    let doc = LssdDocument::parse(&r.out).unwrap();
    assert_eq!((doc.graph.v(), doc.graph.w()), (3, 2));
    assert_eq!(doc.metadata["construction"], "degenerate");
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = kerdock_file(&dir);
    let first = fs::read(&a).unwrap();
    assert_eq!(
        lssd(&["construct", "kerdock", "--n", "4", "--embedded-family", "--out", &a]).code,
        EXIT_OK
    );
    assert_eq!(fs::read(&a).unwrap(), first);
    let doc = LssdDocument::parse(std::str::from_utf8(&first).unwrap()).unwrap();
    assert_eq!(doc.to_json().as_bytes(), first.as_slice());
}

#[test]
fn verify_scheme_prints_tables() {
    let dir = TempDir::new().unwrap();
    let k = kerdock_file(&dir);
    let r = lssd(&["verify", &k, "--scheme"]);
    assert_eq!(r.code, EXIT_OK);
    for needle in ["P (rows", "Q (rows", "L1*", "L3*", "q^1_11 = 0", "scheme verified"] {
        assert!(r.out.contains(needle), "missing {needle}");
    }
    let j = lssd(&["--json", "verify", &k, "--scheme"]);
    let v: Value = serde_json::from_str(&j.out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(
        v["scheme"]["tables"]["P"][1],
        serde_json::json!(["1", "14", "-1", "-14"])
    );
}

#[test]
fn degenerate_scheme_refused() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "d.json");
    lssd(&["construct", "degenerate", "--v", "4", "--w", "3", "--out", &p]);
    let r = lssd(&["verify", &p, "--scheme"]);
    assert_eq!(r.code, EXIT_VIOLATION);
    assert!(r.out.contains("not Q-polynomial"));
}

#[test]
fn malformed_documents_name_the_field() {
    let dir = TempDir::new().unwrap();
    let text = lssd(&["construct", "beth-wocjan"]).out;
    let mut v: Value = serde_json::from_str(&text).unwrap();

    let mut missing = v.clone();
    missing["blocks"].as_object_mut().unwrap().remove("1,3");
    let err = LssdDocument::parse(&missing.to_string()).unwrap_err();
    assert_eq!(err, FormatError::Missing("blocks[1,3]".into()));
    assert!(err.to_string().contains("blocks[1,3]"));

    v["blocks"]["1,2"][4][7] = serde_json::json!(2);
    let err = LssdDocument::parse(&v.to_string()).unwrap_err();
    assert!(matches!(&err, FormatError::Entry { field, row: 4, col: 7, .. } if field == "blocks[1,2]"));

    let p = path(&dir, "bad.json");
    fs::write(&p, v.to_string()).unwrap();
    let r = lssd(&["verify", &p]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("blocks[1,2][4][7] = 2"));

    let mut extra: Value = serde_json::from_str(&text).unwrap();
    extra["blocks"]["2,1"] = extra["blocks"]["1,2"].clone();
    assert_eq!(
        LssdDocument::parse(&extra.to_string()).unwrap_err(),
        FormatError::ExtraBlock("2,1".into())
    );
}

#[test]
fn corrupt_block_fails_verification() {
    let dir = TempDir::new().unwrap();
    let k = kerdock_file(&dir);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&k).unwrap()).unwrap();
    let cell = &mut v["blocks"]["2,5"][0][0];
    *cell = serde_json::json!(1 - cell.as_u64().unwrap());
    fs::write(&k, v.to_string()).unwrap();
    let r = lssd(&["verify", &k]);
    assert_eq!(r.code, EXIT_VIOLATION);
    assert!(r.out.contains("NOT an LSSD"));
}

#[test]
fn screen_and_bounds() {
    let r = lssd(&["screen", "--params", "7,3,1"]);
    assert_eq!(r.code, EXIT_VIOLATION);
    assert!(r.out.contains("s not integral"));
    assert_eq!(lssd(&["screen", "--params", "16,6,2"]).code, EXIT_OK);
    assert_eq!(lssd(&["screen", "--params", "7,3,2"]).code, EXIT_VIOLATION);

    let f = lssd(&["screen", "--family", "21", "--range", "2..6"]);
    assert_eq!(f.code, EXIT_VIOLATION);
    assert!(f.out.contains("summary: never-pass"));
    assert!(f.out.contains("nu not integral"));
    let j = lssd(&["--json", "screen", "--family", "6", "--range", "2..4"]);
    assert_eq!(j.code, EXIT_OK);
    let v: Value = serde_json::from_str(&j.out).unwrap();
    assert_eq!(v["verdict"], "always-pass");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    let b = lssd(&["bounds", "--params", "16,10,6"]);
    assert_eq!(b.code, EXIT_OK);
    assert!(b.out.contains("absolute: w ≤ 8 (q^1_11 = 0)"));
    assert!(b.out.contains("Krein: w ≤ (v−2)s/(2k−v) + 1 = 8"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["screen"],
        vec!["screen", "--params", "1,2"],
        vec!["screen", "--family", "3"],
        vec!["construct", "kerdock", "--frobnicate"],
        vec!["verify", "/nonexistent/graph.json"],
        vec!["construct", "beth-wocjan", "--oa", "builtin:nothing"],
    ] {
        let r = lssd(&args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}");
        assert!(!r.err.is_empty());
    }
    assert_eq!(lssd(&["--help"]).code, EXIT_OK);
}

#[test]
fn derive_pipeline() {
    let dir = TempDir::new().unwrap();
    let bw = path(&dir, "bw.json");
    lssd(&["construct", "beth-wocjan", "--out", &bw]);

    let lines = path(&dir, "lines.json");
    let r = lssd(&["derive", "lines", &bw, "--t", "3", "--out", &lines]);
    assert_eq!(r.code, EXIT_OK, "{}", r.out);
    let g: Value = serde_json::from_str(&fs::read_to_string(&lines).unwrap()).unwrap();
    assert_eq!(
        (g["dim"].as_u64(), g["claimed_rank"].as_u64(), g["scale"].as_u64()),
        (Some(48), Some(18), Some(3))
    );

    let r = lssd(&["--json", "derive", "mub-gram", &bw]);
    let m: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(m["dim"], 48);

    let hdir = dir.path().join("h");
    let r = lssd(&["derive", "hadamards", &bw, "--out", hdir.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    let files: Vec<String> = ["H2.txt", "H3.txt"]
        .iter()
        .map(|f| hdir.join(f).display().to_string())
        .collect();
    let back = path(&dir, "back.json");
    let r = lssd(&["construct", "from-hadamards", &files[0], &files[1], "--out", &back]);
    assert_eq!(r.code, EXIT_OK);
    let a = LssdDocument::parse(&fs::read_to_string(&bw).unwrap()).unwrap();
    let b = LssdDocument::parse(&fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(a.graph, b.graph);

    let deg = path(&dir, "deg.json");
    lssd(&["construct", "degenerate", "--v", "4", "--w", "3", "--out", &deg]);
    let r = lssd(&["derive", "hadamards", &deg, "--out", hdir.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VIOLATION);
    assert!(r.out.contains("refused"));
}

#[test]
fn matrix_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let h = path(&dir, "h4.txt");
    fs::write(&h, golden_h4().to_text()).unwrap();
    assert_eq!(load_hadamard(&h).unwrap(), golden_h4());

    let o = path(&dir, "oa.txt");
    fs::write(&o, golden_oa16().to_text()).unwrap();
    let parsed = load_oa(&o).unwrap();
    assert_eq!((parsed.n(), parsed.cols()), (4, 3));
    assert_eq!(lssd(&["verify-oa", &o]).code, EXIT_OK);

    let mut rows = golden_oa16().rows().to_vec();
    rows[1][2] = rows[0][2];
    fs::write(&o, OrthogonalArray::new(4, 3, rows).unwrap().to_text()).unwrap();
    let r = lssd(&["verify-oa", &o]);
    assert_eq!(r.code, EXIT_VIOLATION);
    assert!(r.out.contains("repeat the pair"));

    fs::write(&h, "2\n++\n+").unwrap();
    assert!(matches!(load_hadamard(&h), Err(CliError::Input(_))));
    assert!(Path::new(&h).exists());
}
