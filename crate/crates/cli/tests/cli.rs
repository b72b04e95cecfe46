use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_concavex"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const LOCAL: [&str; 7] = ["--n", "5", "--convex", "3", "--concave", "3", "--max-degree"];

fn local(extra: &[&str]) -> Vec<String> {
    let mut v = vec!["compute".to_string()];
    v.extend(LOCAL.iter().map(|s| s.to_string()));
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn resolved_conifold_json() {
    let o = run(&[
        "compute", "--n", "1", "--concave", "1", "--concave", "1", "--points", "1", "--insert", "H",
        "--max-degree", "4", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bundle"]["n"], 1);
    assert_eq!(v["bundle"]["negatives"], serde_json::json!([1, 1]));
    assert_eq!(v["meta"]["maxDegree"], 4);
    assert_eq!(v["meta"]["pipelineClass"], "CONCAVE2");
    let ks: Vec<&str> = v["invariants"].as_array().unwrap().iter().map(|r| r["K"].as_str().unwrap()).collect();
    assert_eq!(ks, ["1", "1/4", "1/9", "1/16"]);
    let row = &v["invariants"][0];
    assert_eq!(row["insertions"], serde_json::json!([{ "h": 1, "psi": 0 }]));
    assert!(row["eta"].is_null());
}

#[test]
fn two_point_with_eta() {
    let args = local(&["4", "--points", "2", "--insert", "H^2", "--insert", "H^2", "--eta", "--format", "json"]);
    let o = run(&refs(&args));
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["invariants"][0]["K"], "261");
    assert_eq!(v["invariants"][1]["K"], "-141669/2");
    assert_eq!(v["meta"]["etaConvention"], "naive multiple-cover inversion");
    assert_eq!(v["meta"]["pipelineClass"], "MIXED/CONVEX");
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let base = ["3", "--insert", "H^3", "--insert", "tau_1(H^2)", "--eta"];
    let csv = run(&refs(&local(&[&base[..], &["--format", "csv"]].concat())));
    let json = run(&refs(&local(&[&base[..], &["--format", "json"]].concat())));
    let v: Value = serde_json::from_str(&stdout(&json)).unwrap();
    let rows: Vec<(String, String, String)> = v["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["d"].to_string(), r["K"].as_str().unwrap().to_string(), r["eta"].as_str().unwrap().to_string()))
        .collect();
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,insertions,K,eta"));
    let from_csv: Vec<(String, String, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[2].to_string(), f[3].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows, from_csv);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = local(&["5", "--insert", "H^3", "--insert", "tau_2(H)", "--format", "json", "--eta"]);
    let one = run_env(&refs(&args), &[("RAYON_NUM_THREADS", "1")]);
    let many = run_env(&refs(&args), &[("RAYON_NUM_THREADS", "4")]);
    let again = run_env(&refs(&args), &[("RAYON_NUM_THREADS", "4")]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(many.stdout, again.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.csv");
    let p = path.to_str().unwrap();
    let to_file = run(&refs(&local(&["3", "--insert", "H^3", "--format", "csv", "--out", p])));
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let direct = run(&refs(&local(&["3", "--insert", "H^3", "--format", "csv"])));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.conf");
    std::fs::write(
        &path,
        "# local P^5\nn = 5\nconvex = 3\nconcave = 3\npoints = 1\ninsert = H^3\nmax-degree = 2\nformat = csv\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["compute", "--config", p]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "d,insertions,K,eta\n1,H^3,144,\n2,H^3,-15228,\n");
    let o = run(&["compute", "--config", p, "--max-degree", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["invariants"].as_array().unwrap().len(), 3);
    assert_eq!(v["invariants"][2]["K"], "3387832");

    let dumped = run(&["compute", "--config", p, "--max-degree", "3", "--dump-config"]);
    let path2 = dir.path().join("dumped.conf");
    std::fs::write(&path2, &dumped.stdout).unwrap();
    let redumped = run(&["compute", "--config", path2.to_str().unwrap(), "--dump-config"]);
    assert_eq!(dumped.stdout, redumped.stdout);
    assert!(stdout(&dumped).contains("max-degree = 3"));

    std::fs::write(&path, "n = 5\nwidth = 3\n").unwrap();
    assert_eq!(run(&["compute", "--config", p]).status.code(), Some(2));
}

#[test]
fn invalid_input_exits_2() {
    let cases: [&[&str]; 6] = [
        // weight 0 where 1 is required
        &["compute", "--n", "1", "--concave", "1", "--concave", "1", "--insert", "H^0", "--max-degree", "2"],
        // twists do not sum to n+1
        &["compute", "--n", "3", "--convex", "2", "--insert", "H", "--max-degree", "2"],
        // a pole with a single concave summand
        &["compute", "--n", "2", "--concave", "3", "--insert", "H", "--max-degree", "2"],
        // psi on the first of two points
        &["compute", "--n", "5", "--convex", "3", "--concave", "3", "--points", "2", "--insert", "tau_1(H)", "--insert", "H^3"],
        &["compute", "--n", "5", "--convex", "3", "--concave", "3", "--insert", "H^^2"],
        &["compute", "--n", "5", "--convex", "3", "--concave", "3", "--insert", "H^3", "--max-degree", "0"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
    let o = run(&["compute", "--n", "1", "--concave", "1", "--concave", "1", "--insert", "H^0"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("needs 1"));
}

#[test]
fn check_commands() {
    let o = run(&["check", "--oracle"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["check", "--integrality", "--max-degree", "10"]);
    assert!(o.status.success());
    let o = run(&["check", "--n", "4", "--convex", "5", "--max-degree", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS divisor equation"));

    let o = run(&["check", "--golden", "2,3,4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("NOTE table 3 eta"));

    // the printed d=6 row of table 1 carries the opposite sign
    let o = run(&["check", "--golden", "figs"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL table 1 K: 1 of 10 rows differ: d=6"));
    assert!(text.contains("PASS table 1 eta"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("8 of 8 checks passed\n"));
}

#[test]
fn table_layout() {
    let o = run(&refs(&local(&["2", "--insert", "H^3", "--decimal-hint"])));
    let text = stdout(&o);
    assert!(text.starts_with("# O(3)+O(-3) on P^5  class MIXED/CONVEX  reading published  D=2\n"));
    assert!(text.contains("non-authoritative"));
    assert!(text.contains("-15228"));
}
