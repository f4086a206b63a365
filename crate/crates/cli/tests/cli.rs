use std::path::Path;
use std::process::{Command, Output};

fn findeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_findeg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = findeg(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn pi0_counts_classes() {
    let r = json(&["pi0", "--source", "sphere:1", "--target", "em:2,1"]);
    assert_eq!(r["result"]["classes"], 2);
    assert_eq!(r["result"]["representatives"], serde_json::json!(["*", "s1=1"]));
    let r = json(&["pi0", "--source", "point", "--target", "em:2,1"]);
    assert_eq!(r["result"]["classes"], 1);
    let r = json(&["pi0", "--source", "sphere:2", "--target", "em:3,2", "--seed", "9"]);
    assert_eq!(r["result"]["classes"], 3);
    assert_eq!(r["seed"], 9);
    assert!(r["caps"]["maps"].is_number());
}

#[test]
fn exit_codes() {
    let o = findeg(&["pi0", "--source", "sphere:1", "--target", "missing"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
    let o = findeg(&["pi0", "--source", "power:(sphere:1,2)", "--target", "em:3,1", "--caps", "maps=2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(findeg(&["pi0", "--source", "sphere:1"]).status.code(), Some(4));
    assert_eq!(findeg(&["suite", "lemma-99"]).status.code(), Some(4));
    assert_eq!(findeg(&["--caps", "nonsense=1", "suite", "lemma-4"]).status.code(), Some(4));
    assert_eq!(findeg(&["--help"]).status.code(), Some(0));
}

#[test]
fn degree_of_tables() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"values": {"*": 0, "s1=1": 1}}"#);
    let constant = write(dir.path(), "c.json", r#"{"values": {"*": 1, "s1=1": 1}}"#);
    let partial = write(dir.path(), "p.json", r#"{"values": {"*": 1}}"#);
    let pair = ["--source", "sphere:1", "--target", "em:2,1"];
    let run = |file: &str, extra: &[&str]| {
        let mut args = vec!["degree"];
        args.extend(pair);
        args.extend(["--invariant", file]);
        args.extend(extra);
        json(&args)
    };
    let r = run(&id, &[]);
    assert_eq!(r["result"]["degree"], 1);
    assert_eq!(r["result"]["factorization_digest"].as_str().unwrap().len(), 16);
    assert_eq!(run(&constant, &[])["result"]["degree"], 0);
    assert_eq!(run(&id, &["--r-max", "0"])["result"]["degree"], "exceeds r_max");
    let mut args = vec!["degree"];
    args.extend(pair);
    args.extend(["--invariant", partial.as_str()]);
    let o = findeg(&args);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("s1=1"));
}

#[test]
fn separating_two_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sep.json");
    let args = [
        "separate", "--source", "sphere:1", "--target", "em:2,1", "--class1", "*", "--class2", "s1=1", "--out",
        out.to_str().unwrap(),
    ];
    let o = findeg(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degree 1"));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, serde_json::json!({"values": {"*": 0, "s1=1": 1}}));
    // the written table feeds back into `degree`
    let r = json(&["degree", "--source", "sphere:1", "--target", "em:2,1", "--invariant", out.to_str().unwrap()]);
    assert_eq!(r["result"]["degree"], 1);
    let o = findeg(&["separate", "--source", "sphere:1", "--target", "em:2,1", "--class1", "#1", "--class2", "s1=1"]);
    assert_eq!(o.status.code(), Some(4));
    let r = json(&["separate", "--source", "sphere:1", "--target", "em:2,1", "--class1", "#0", "--class2", "#1", "--r-max", "0"]);
    assert_eq!(r["result"]["separated"], false);
}

#[test]
fn crew_files_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let circle = findeg::simplicial::Crew::sphere(1).unwrap().to_file();
    let path = write(dir.path(), "circle.json", &serde_json::to_string(&circle).unwrap());
    let src = format!("file:{path}");
    let r = json(&["pi0", "--source", &src, "--target", "em:3,1"]);
    assert_eq!(r["result"]["classes"], 3);
    let cone = write(dir.path(), "q.json", r#"{"p": 2, "ranks": {"0": 0, "1": 1}, "d": {}}"#);
    let tgt = format!("file:{cone}");
    let r = json(&["pi0", "--source", "sphere:1", "--target", &tgt]);
    assert_eq!(r["result"]["classes"], 2);
    let broken = write(dir.path(), "b.json", r#"{"basepoint": "v", "simplices": {"0": [{"name": "w"}]}}"#);
    let src = format!("file:{broken}");
    assert_eq!(findeg(&["pi0", "--source", &src, "--target", "em:2,1"]).status.code(), Some(4));
}

#[test]
fn suite_reports_are_replayable() {
    let a = findeg(&["suite", "lemma-4", "--seed", "1", "--trials", "50", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["result"]["config"]["seed"], 1);
    assert_eq!(r["result"]["checks"][0]["detail"]["trials"], 50);
    assert_eq!(r["result"]["checks"][0]["detail"]["identity_failures"], 0);
    let b = findeg(&["suite", "lemma-4", "--seed", "1", "--trials", "50", "--format", "json", "--threads", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let c = findeg(&["suite", "lemma-4", "--seed", "2", "--trials", "50", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}
