use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerdomain")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn put(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

struct Fixture {
    dir: TempDir,
    s: String,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let s =
        put(dir.path(), "s.json", &json!({"schema": 1, "name": "S", "points": ["0", "1"], "preorder": [["0", "1"]]}));
    Fixture { dir, s }
}

impl Fixture {
    fn put(&self, name: &str, v: &Value) -> String {
        put(self.dir.path(), name, v)
    }
}

#[test]
fn space_info_reports_separation() {
    let f = fixture();
    let out = run(&["space", "info", &f.s]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!((&v["T0"], &v["T1"], &v["sober"], &v["opens"]), (&json!(true), &json!(false), &json!(true), &json!(3)));
    assert_eq!(v["open_list"], json!([[], ["1"], ["0", "1"]]));
    assert!(v["checksum"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn indiscrete_space_is_not_t0() {
    let f = fixture();
    let p = f.put("i.json", &json!({"schema": 1, "points": ["a", "b"], "opens": [[], ["a", "b"]]}));
    let v = stdout_json(&run(&["space", "info", &p]));
    assert_eq!(v["T0"], json!(false));
    assert_eq!(v["opens"], json!(2));
}

#[test]
fn validate_reports_axioms() {
    let f = fixture();
    let out = run(&["space", "validate", &f.s]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["valid"], json!(true));
}

#[test]
fn malformed_json_exits_1() {
    let f = fixture();
    let p = f.dir.path().join("bad.json");
    std::fs::write(&p, "{ not json").unwrap();
    let out = run(&["space", "info", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], json!("malformed"));
}

#[test]
fn missing_topology_exits_1() {
    let f = fixture();
    let p = f.put("n.json", &json!({"schema": 1, "points": ["a"]}));
    assert_eq!(run(&["space", "validate", &p]).status.code(), Some(1));
}

#[test]
fn non_union_closed_family_exits_2_with_witness() {
    let f = fixture();
    let p = f.put(
        "u.json",
        &json!({"schema": 1, "points": ["a", "b"], "opens": [[], ["a"], ["b"], ["a", "b"], ["a", "b"]]}),
    );
    let p2 = f
        .put("u2.json", &json!({"schema": 1, "points": ["a", "b", "c"], "opens": [[], ["a"], ["b"], ["a", "b", "c"]]}));
    assert_eq!(run(&["space", "validate", &p]).status.code(), Some(0));
    let out = run(&["space", "validate", &p2]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], json!("axiom"));
    assert_eq!(err["witness"]["axiom"], json!("closed under union"));
}

#[test]
fn non_modular_table_exits_2() {
    let f = fixture();
    let d = f.put("d.json", &json!({"schema": 1, "points": ["a", "b"], "opens": [[], ["a"], ["b"], ["a", "b"]]}));
    let info = stdout_json(&run(&["space", "info", &d]));
    let v = f.put(
        "v.json",
        &json!({"schema": 1, "space": "d.json", "table": {"0": "0", "1": "1", "2": "1", "3": "3"}, "checksum": info["checksum"]}),
    );
    let out = run(&["val", "validate", &v]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["witness"]["axiom"], json!("modular"));
}

#[test]
fn table_without_matching_checksum_is_malformed() {
    let f = fixture();
    let table = json!({"0": "0", "1": "1/3", "2": "1"});
    let none = f.put("a.json", &json!({"schema": 1, "space": "s.json", "table": table}));
    let wrong = f.put("b.json", &json!({"schema": 1, "space": "s.json", "table": table, "checksum": "sha256:00"}));
    assert_eq!(run(&["val", "validate", &none]).status.code(), Some(1));
    assert_eq!(run(&["val", "validate", &wrong]).status.code(), Some(1));
}

#[test]
fn extend_of_infinite_mass_exits_3() {
    let f = fixture();
    let v = f.put("v.json", &json!({"schema": 1, "space": "s.json", "weights": {"1": "inf"}}));
    let out = run(&["val", "extend", &v]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], json!("precondition"));
}

#[test]
fn unknown_suite_exits_5() {
    let out = run(&["laws", "bogus"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stderr_json(&out)["suite"], json!("bogus"));
}

#[test]
fn bad_flag_exits_1() {
    assert_eq!(run(&["laws", "all", "--count", "many"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn supp_of_dirac_is_the_point_closure() {
    let f = fixture();
    let v = f.put("d.json", &json!({"schema": 1, "space": "s.json", "weights": {"1": "1"}}));
    assert_eq!(stdout_json(&run(&["val", "supp", &v])), json!(["0", "1"]));
    let v = f.put("e.json", &json!({"schema": 1, "space": "s.json", "weights": {"0": "1"}}));
    assert_eq!(stdout_json(&run(&["val", "supp", &v])), json!(["0"]));
}

#[test]
fn integrate_running_example() {
    let f = fixture();
    let v = f.put("v.json", &json!({"schema": 1, "space": "s.json", "weights": {"0": "1/2", "1": "1/2"}}));
    let g = f.put("g.json", &json!({"schema": 1, "values": {"0": "1", "1": "2"}}));
    assert_eq!(stdout_json(&run(&["val", "integrate", &v, &g])), json!("3/2"));
}

#[test]
fn non_monotone_function_is_rejected() {
    let f = fixture();
    let v = f.put("v.json", &json!({"schema": 1, "space": "s.json", "weights": {"0": "1"}}));
    let g = f.put("g.json", &json!({"schema": 1, "values": {"0": "2", "1": "1"}}));
    assert_eq!(run(&["val", "integrate", &v, &g]).status.code(), Some(2));
}

#[test]
fn extend_recovers_point_weights() {
    let f = fixture();
    let info = stdout_json(&run(&["space", "info", &f.s]));
    let v = f.put(
        "v.json",
        &json!({"schema": 1, "space": "s.json", "table": {"0": "0", "1": "1/3", "2": "1"}, "checksum": info["checksum"]}),
    );
    let out = run(&["val", "extend", &v]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), r#"{"0":"2/3","1":"1/3"}"#);
}

#[test]
fn hyper_of_sierpinski_is_a_chain() {
    let f = fixture();
    let v = stdout_json(&run(&["space", "hyper", &f.s]));
    assert_eq!(v["closed_sets"], json!([[], ["0"], ["0", "1"]]));
    assert_eq!(v["space"]["points"].as_array().unwrap().len(), 3);
    // A chain on three points relates six ordered pairs, counting reflexive ones.
    assert_eq!(v["space"]["preorder"].as_array().unwrap().len(), 6);
}

#[test]
fn emitted_documents_round_trip() {
    let f = fixture();
    let hyper = stdout_json(&run(&["space", "hyper", &f.s]));
    let h = f.put("h.json", &hyper["space"]);
    let again = stdout_json(&run(&["space", "hyper", &f.s]));
    assert_eq!(again, hyper);
    assert_eq!(run(&["space", "validate", &h]).status.code(), Some(0));

    let prod = stdout_json(&run(&["space", "product", &f.s, &f.s]));
    let p = f.put("p.json", &prod);
    let reread = stdout_json(&run(&["space", "product", &f.s, &f.s]));
    assert_eq!(prod, reread);
    assert_eq!(stdout_json(&run(&["space", "info", &p]))["opens"], json!(6));

    let nu = f.put("n.json", &json!({"schema": 1, "space": "s.json", "weights": {"0": "1/4", "1": "3/4"}}));
    let rho = f.put("r.json", &json!({"schema": 1, "space": "s.json", "weights": {"1": "2"}}));
    let product = stdout_json(&run(&["val", "product", &nu, &rho]));
    let q = f.put("q.json", &product);
    let validated = stdout_json(&run(&["val", "validate", &q]));
    assert_eq!(validated["total"], json!("2"));
    // Re-emitting the product from its own document gives the same JSON.
    let id = f.put(
        "id.json",
        &json!({"schema": 1, "target": product["space"], "assignment": {"(0,0)": "(0,0)", "(0,1)": "(0,1)", "(1,0)": "(1,0)", "(1,1)": "(1,1)"}}),
    );
    let pushed = run(&["val", "push", &q, &id]);
    assert_eq!(pushed.status.code(), Some(0), "{}", String::from_utf8_lossy(&pushed.stderr));
    assert_eq!(stdout_json(&pushed), product);
}

#[test]
fn push_along_a_constant_map() {
    let f = fixture();
    let nu = f.put("n.json", &json!({"schema": 1, "space": "s.json", "weights": {"0": "1/4", "1": "3/4"}}));
    let m = f.put("m.json", &json!({"schema": 1, "target": "s.json", "assignment": {"0": "1", "1": "1"}}));
    let out = stdout_json(&run(&["val", "push", &nu, &m]));
    let back = f.put("b.json", &out);
    assert_eq!(stdout_json(&run(&["val", "extend", &back])), json!({"0": "0", "1": "1"}));
}

#[test]
fn mixture_multiplication() {
    let f = fixture();
    let mix = f.put(
        "x.json",
        &json!({"schema": 1, "space": "s.json", "atoms": [
            {"coefficient": "1/2", "weights": {"0": "1"}},
            {"coefficient": "2", "weights": {"1": "1/4"}}
        ]}),
    );
    let e = f.put("e.json", &stdout_json(&run(&["val", "E", &mix])));
    assert_eq!(stdout_json(&run(&["val", "extend", &e])), json!({"0": "1/2", "1": "1/2"}));
}

#[test]
fn laws_report_counts_instances() {
    let out = run(&["laws", "supp-mult", "--count", "50", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v[0]["suite"], json!("supp-mult"));
    assert_eq!(v[0]["instances"], json!(50));
    assert_eq!(v[0]["failures"], json!([]));
}

#[test]
fn laws_output_is_independent_of_jobs() {
    let strip = |out: Output| {
        let mut v = stdout_json(&out);
        for r in v.as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_time_ms");
        }
        v
    };
    let one = strip(run(&["laws", "all", "--count", "20", "--seed", "5", "--json"]));
    let four = strip(run(&["laws", "all", "--count", "20", "--seed", "5", "--json", "--jobs", "4"]));
    assert_eq!(one, four);
}

#[test]
fn non_transitive_preorder_exits_2() {
    let f = fixture();
    let p = f.put("t.json", &json!({"schema": 1, "points": ["a", "b", "c"], "preorder": [["a", "b"], ["b", "c"]]}));
    let out = run(&["space", "validate", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["witness"]["missing"], json!(["a", "c"]));
}
