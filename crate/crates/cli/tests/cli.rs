use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn vgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

struct Pipeline {
    dir: TempDir,
}

impl Pipeline {
    fn new() -> Self {
        Pipeline {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> String {
        std::fs::write(self.path(name), text).unwrap();
        self.s(name)
    }

    /// pg(3,p) → V(2, ·) → symplectic hyperplane → reduct.
    fn symplectic_reduct(&self, p: u32) {
        let ps = p.to_string();
        let minus = (p - 1).to_string();
        assert_eq!(
            code(&vgeom(&[
                "build",
                "pg",
                "3",
                &ps,
                "--out",
                &self.s("pg.json")
            ])),
            0
        );
        assert_eq!(
            code(&vgeom(&[
                "veronese",
                "--base",
                &self.s("pg.json"),
                "--level",
                "2",
                "--out",
                &self.s("v.json")
            ])),
            0
        );
        let form = format!(
            r#"{{"p":{p},"matrix":[[0,1,0,0],[{minus},0,0,0],[0,0,0,1],[0,0,{minus},0]]}}"#
        );
        let f = self.write("form.json", &form);
        let o = vgeom(&[
            "hyperplane",
            "--space",
            &self.s("v.json"),
            "--form",
            &f,
            "--out",
            &self.s("h.json"),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = vgeom(&[
            "reduct",
            "--space",
            &self.s("v.json"),
            "--hyperplane",
            &self.s("h.json"),
            "--out",
            &self.s("r.json"),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn build_writes_the_forty_point_space() {
    let t = Pipeline::new();
    assert_eq!(
        code(&vgeom(&[
            "build",
            "pg",
            "3",
            "3",
            "--out",
            &t.s("pg33.json")
        ])),
        0
    );
    let doc = json_file(&t.path("pg33.json"));
    assert_eq!(doc["point_count"], 40);
    assert_eq!(doc["lines"].as_array().unwrap().len(), 130);
    assert_eq!(doc["construction"]["family"], "pg");

    let o = vgeom(&["build", "quadric", "3", "3", "hyperbolic"]);
    assert_eq!(code(&o), 0);
    let q = stdout_json(&o);
    assert_eq!(
        (
            q["point_count"].as_u64(),
            q["lines"].as_array().unwrap().len()
        ),
        (Some(16), 8)
    );
}

#[test]
fn usage_and_input_errors_exit_2() {
    let t = Pipeline::new();
    assert_eq!(code(&vgeom(&["build", "pg", "2", "11"])), 2);
    assert_eq!(code(&vgeom(&["build", "pg", "2", "4"])), 2);
    assert_eq!(code(&vgeom(&["build", "pg", "2", "3", "--frobnicate"])), 2);
    assert_eq!(code(&vgeom(&["verify", "--suite", "nope"])), 2);
    assert_eq!(
        code(&vgeom(&[
            "verify",
            "--suite",
            "construction",
            "--profile",
            "cluster"
        ])),
        2
    );
    let bad = t.write("bad.json", "{not json");
    assert_eq!(
        code(&vgeom(&["veronese", "--base", &bad, "--level", "2"])),
        2
    );
    // stored lines that disagree with the construction are rejected
    let o = vgeom(&["build", "pg", "2", "2"]);
    let mut doc = stdout_json(&o);
    doc["lines"][0] = serde_json::json!([0, 1, 3]);
    let tampered = t.write("tampered.json", &doc.to_string());
    let o = vgeom(&["veronese", "--base", &tampered, "--level", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn named_base_and_labels() {
    let o = vgeom(&["veronese", "--base", "pg(2,2)", "--level", "2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["point_count"], 28);
    assert_eq!(v["lines"].as_array().unwrap().len(), 56);
    // labels carry multisets as [point, multiplicity] pairs
    assert_eq!(v["labels"]["0"], serde_json::json!([[0, 2]]));
}

#[test]
fn symplectic_pipeline_and_recovery() {
    let t = Pipeline::new();
    t.symplectic_reduct(3);
    let h = json_file(&t.path("h.json"));
    assert_eq!(h["points"].as_array().unwrap().len(), 280);
    assert_eq!(h["h"]["[]"], "FULL");
    let r = json_file(&t.path("r.json"));
    assert_eq!(r["point_count"], 540);
    assert_eq!(r["parallel_classes"].as_array().unwrap().len(), 280);

    let o = vgeom(&[
        "recover",
        "--reduct",
        &t.s("r.json"),
        "--check-against",
        &t.s("v.json"),
    ]);
    assert_eq!(code(&o), 0);
    let rec = stdout_json(&o);
    assert_eq!(rec["isomorphism"], true);
    assert_eq!(rec["matches_check_against"], true);
    assert_eq!(rec["points"], 820);

    // at q = 3 the exhaustive scan finds no Net violation
    let o = vgeom(&["verify", "--suite", "net-axiom", "--space", &t.s("r.json")]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["detail"]["exhaustive"], true);
    assert_eq!(v["detail"]["quadrangles"], 59670);
}

#[test]
fn net_axiom_witness_at_q5() {
    let t = Pipeline::new();
    t.symplectic_reduct(5);
    let o = vgeom(&["verify", "--suite", "net-axiom", "--space", &t.s("r.json")]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "FAIL");
    let w = &v["witness"];
    assert!(w["deleted_point"].is_u64());
    assert_eq!(
        w["witness"]["quadrangle"]["sides"]
            .as_array()
            .unwrap()
            .len(),
        4
    );
}

#[test]
fn verify_is_reproducible_and_reports() {
    let t = Pipeline::new();
    let a = vgeom(&["verify", "--suite", "construction", "--profile", "desk"]);
    let b = vgeom(&["verify", "--suite", "construction"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let line = stdout_json(&a);
    assert_eq!(line["claim"], "construction");
    assert!(line.get("runtime_ms").is_none());

    let o = vgeom(&[
        "verify",
        "--suite",
        "characterization",
        "--out",
        &t.s("c.jsonl"),
        "--timings",
    ]);
    assert_eq!(code(&o), 1);
    let rec: Value =
        serde_json::from_str(std::fs::read_to_string(t.path("c.jsonl")).unwrap().trim()).unwrap();
    assert!(rec["runtime_ms"].is_u64());
    assert!(rec["witness"]["unmatched"].is_array());

    let o = vgeom(&["report", "--input", &t.s("c.jsonl")]);
    assert_eq!(code(&o), 1);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(
        table.contains("characterization")
            && table.contains("FAIL")
            && table.contains("0/1 passed")
    );
}

#[test]
fn hyperplanes_from_multilinear_and_polar_forms() {
    let t = Pipeline::new();
    let v = t.s("v3.json");
    assert_eq!(
        code(&vgeom(&[
            "veronese", "--base", "pg(2,3)", "--level", "3", "--out", &v
        ])),
        0
    );
    let f = t.write("det.json", r#"{"p":3,"arity":3,"coeffs":{"0<1<2":1}}"#);
    let o = vgeom(&["hyperplane", "--space", &v, "--form", &f]);
    assert_eq!(code(&o), 0);
    let h = stdout_json(&o);
    assert_eq!(h["points"].as_array().unwrap().len(), 455 - 234);

    let w = t.s("vw.json");
    assert_eq!(
        code(&vgeom(&[
            "veronese", "--base", "w(3,3)", "--level", "2", "--out", &w
        ])),
        0
    );
    let f = t.write(
        "sp.json",
        r#"{"p":3,"matrix":[[0,1,0,0],[2,0,0,0],[0,0,0,1],[0,0,2,0]]}"#,
    );
    let o = vgeom(&["hyperplane", "--space", &w, "--form", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["points"].as_array().unwrap().len(), 280);
}

#[test]
fn leaf_closed_search() {
    let t = Pipeline::new();
    let v = t.s("v.json");
    assert_eq!(
        code(&vgeom(&[
            "veronese", "--base", "ag(1,3)", "--level", "2", "--out", &v
        ])),
        0
    );
    let o = vgeom(&["parallelism-search", "--space", &v, "--mode", "leaf-closed"]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(s["outcome"], "NONE");
    assert_eq!(s["certificate"]["exhausted"], true);
    assert_eq!(s["certificate"]["trail_sha256"].as_str().unwrap().len(), 64);

    // level 1 over AG(2,3) has a parallelism; a tiny budget stops first
    let v1 = t.s("v1.json");
    assert_eq!(
        code(&vgeom(&[
            "veronese", "--base", "ag(2,3)", "--level", "1", "--out", &v1
        ])),
        0
    );
    assert_eq!(
        code(&vgeom(&[
            "parallelism-search",
            "--space",
            &v1,
            "--mode",
            "leaf-closed",
            "--budget",
            "3"
        ])),
        2
    );
    let o = vgeom(&[
        "parallelism-search",
        "--space",
        &v1,
        "--mode",
        "leaf-closed",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout_json(&o)["outcome"]["FOUND"]
            .as_array()
            .unwrap()
            .len(),
        4
    );

    // a projective base has no parallelism to start from
    let vp = t.s("vp.json");
    assert_eq!(
        code(&vgeom(&[
            "veronese", "--base", "pg(2,2)", "--level", "2", "--out", &vp
        ])),
        0
    );
    assert_eq!(
        code(&vgeom(&[
            "parallelism-search",
            "--space",
            &vp,
            "--mode",
            "leaf-closed"
        ])),
        2
    );
}
