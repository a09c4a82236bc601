//! End-to-end tests driving the `rvm` binary through every subcommand.

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use quadstore::{SharedStore, GraphStore};

const BIN: &str = env!("CARGO_BIN_EXE_rvm");

const PERSON: &str = r#"
prefix lanl: <http://www.lanl.gov#>;
prefix foaf: <http://xmlns.com/foaf/0.1/>;

foaf:Agent lanl:Person {
  xsd:string foaf:name[1];
  lanl:Person foaf:knows[0..*];

  makeFriend(lanl:Person p) {
    this.foaf:knows =+ p;
  }

  xsd:boolean isFriend(lanl:Person p) {
    return this.foaf:knows =? p;
  }
}
"#;

fn rvm(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn compile_instantiate_invoke_run_query_dump() {
    let dir = tempfile::tempdir().unwrap();
    let neno = dir.path().join("person.neno");
    let api = dir.path().join("api.nq");
    let store = dir.path().join("store.nq");
    write(&neno, PERSON);

    let out = rvm(&["compile", neno.to_str().unwrap(), "-o", api.to_str().unwrap()]);
    assert!(out.status.success(), "compile failed: {}", stderr(&out));
    assert!(std::fs::read_to_string(&api).unwrap().contains("rvm:Class"));

    let out = rvm(&[
        "instantiate",
        "--api",
        api.to_str().unwrap(),
        "--class",
        "<lanl:Person>",
        "--store",
        store.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "instantiate failed: {}", stderr(&out));
    let obj = stdout(&out);
    assert!(obj.starts_with("<urn:uuid:"), "object uri: {obj}");

    let out = rvm(&[
        "invoke",
        "--store",
        store.to_str().unwrap(),
        "--object",
        &obj,
        "--method",
        "makeFriend",
        "--arg",
        "<lanl:josh>",
    ]);
    assert!(out.status.success(), "invoke failed: {}", stderr(&out));
    let machine = stdout(&out);
    assert!(machine.starts_with("<urn:uuid:"), "machine uri: {machine}");

    // no --rvm claims the advertised machine
    let out = rvm(&["run", "--store", store.to_str().unwrap()]);
    assert!(out.status.success(), "run failed: {}", stderr(&out));
    assert_eq!(stdout(&out), "halted");

    // the invocation's side effect is visible to SELECT
    let out = rvm(&[
        "query",
        "--store",
        store.to_str().unwrap(),
        "SELECT ?x WHERE { ?x <foaf:knows> <lanl:josh> }",
    ]);
    assert!(out.status.success(), "query failed: {}", stderr(&out));
    assert_eq!(stdout(&out), obj);

    // a non-void invocation's result is printed after the outcome
    let out = rvm(&[
        "invoke",
        "--store",
        store.to_str().unwrap(),
        "--object",
        &obj,
        "--method",
        "isFriend",
        "--arg",
        "<lanl:josh>",
    ]);
    assert!(out.status.success(), "invoke failed: {}", stderr(&out));
    let out = rvm(&["run", "--store", store.to_str().unwrap(), "--mode", "r-fhat"]);
    assert!(out.status.success(), "run failed: {}", stderr(&out));
    assert_eq!(stdout(&out), "halted\t\"true\"^^<xsd:boolean>");

    // nothing left to run
    let out = rvm(&["run", "--store", store.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no runnable RVM"), "{}", stderr(&out));

    // dump emits canonical N-Quads restricted to the requested graph
    let out = rvm(&[
        "dump",
        "--store",
        store.to_str().unwrap(),
        "--graph",
        &obj,
    ]);
    assert!(out.status.success());
    let graph_term = obj.trim_matches(['<', '>']);
    for line in stdout(&out).lines() {
        assert!(line.ends_with(&format!("<{graph_term}> .")), "stray line: {line}");
    }
}

#[test]
fn migrate_pushes_graph_to_a_running_farm() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store.nq");
    write(
        &store,
        "<ex:a> <ex:p> \"1\"^^<xsd:int> <urn:uuid:cargo> .\n\
         <ex:b> <ex:p> <ex:a> <urn:uuid:cargo> .\n\
         <ex:keep> <ex:p> <ex:keep> <rvm:default> .\n",
    );
    let farm = farm::Farm::start(
        SharedStore::new(GraphStore::new()),
        farm::Config {
            listen: "127.0.0.1:0".into(),
            ..farm::Config::default()
        },
    )
    .unwrap();
    let peer = farm.local_addr().to_string();

    let out = rvm(&[
        "migrate",
        "--store",
        store.to_str().unwrap(),
        "--graph",
        "<urn:uuid:cargo>",
        "--to",
        &peer,
    ]);
    assert!(out.status.success(), "migrate failed: {}", stderr(&out));

    // migrated quads left the local store and arrived at the farm
    let rest = std::fs::read_to_string(&store).unwrap();
    assert!(!rest.contains("urn:uuid:cargo"));
    assert!(rest.contains("<ex:keep>"));
    assert_eq!(farm.store().read().len(), 2);

    // a second push of the same graph is a conflict, reported as a fault
    write(&store, "<ex:a> <ex:p> \"1\"^^<xsd:int> <urn:uuid:cargo> .\n");
    let out = rvm(&[
        "migrate",
        "--store",
        store.to_str().unwrap(),
        "--graph",
        "<urn:uuid:cargo>",
        "--to",
        &peer,
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    farm.stop();
}

#[test]
fn farm_subcommand_serves_until_killed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("farm.conf");
    write(
        &cfg,
        "listen = 127.0.0.1:0\npoll_ms = 10\ncycle_budget = 50\n",
    );
    let mut child = Command::new(BIN)
        .args(["farm", "--config", cfg.to_str().unwrap()])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    assert!(line.starts_with("farm listening on 127.0.0.1:"), "{line}");

    // the advertised endpoint accepts migrations while the farm runs
    let peer = line.trim().rsplit(' ').next().unwrap().to_string();
    let store = dir.path().join("store.nq");
    write(&store, "<ex:a> <ex:p> <ex:b> <urn:uuid:boxcar> .\n");
    let out = rvm(&[
        "migrate",
        "--store",
        store.to_str().unwrap(),
        "--graph",
        "<urn:uuid:boxcar>",
        "--to",
        &peer,
    ]);
    assert!(out.status.success(), "migrate failed: {}", stderr(&out));

    child.kill().unwrap();
    child.wait().unwrap();
}

#[test]
fn user_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.neno");
    let out_file = dir.path().join("out.nq");
    write(&bad, "prefix ex: <http://example.org#>;\nex:T ex:U { junk");
    let out = rvm(&[
        "compile",
        bad.to_str().unwrap(),
        "-o",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let store = dir.path().join("store.nq");
    let out = rvm(&["query", "--store", store.to_str().unwrap(), "FROB ?x"]);
    assert_eq!(out.status.code(), Some(1));

    let out = rvm(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    let out = rvm(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
