use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::process::{Child, Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use serde_json::Value;
use triaxis_core::commands;
use triaxis_core::load_scenario;
use triaxis_core::scenario::to_canonical_string;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn triaxis() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_triaxis"));
    cmd.env_remove("TRIAXIS_SCENARIO").env_remove("RUST_LOG");
    cmd
}

fn run(args: &[&str]) -> Output {
    triaxis().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn frontier_lists_all_incomparable_roles() {
    let o = run(&["--scenario", &path("frontier_incomparable.json"), "frontier"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for role in ["quant_fund", "indie_studio", "field_epidemiology"] {
        assert!(out.contains(role), "{out}");
    }
    assert!(out.contains("no dominated roles"));
}

#[test]
fn infeasible_satisfice_exits_2_with_advice() {
    let o = run(&["--scenario", &path("satisfice_infeasible.json"), "satisfice"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("advice: lower W threshold to 45"), "{}", stdout(&o));
    let err = stderr(&o);
    assert!(err.starts_with("error:infeasible: "), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn infeasible_json_output_is_the_report() {
    let o = run(&["--json", "--scenario", &path("satisfice_infeasible.json"), "satisfice"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["relaxation"]["status"], "advice");
    assert_eq!(v["feasible"], serde_json::json!([]));
}

#[test]
fn score_json_matches_library() {
    let o = run(&["--scenario", &path("reference.json"), "score", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let scenario = load_scenario(&std::fs::read_to_string(fixture("reference.json")).unwrap()).unwrap();
    let expected = to_canonical_string(&commands::score(&scenario)).unwrap();
    assert_eq!(stdout(&o), expected);

    let parsed: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (row, lib) in parsed["rows"].as_array().unwrap().iter().zip(commands::score(&scenario).rows) {
        let got = row["utility"].as_f64().unwrap();
        assert!((got - lib.utility).abs() < 5e-7);
    }
}

#[test]
fn json_output_is_stable() {
    let args = ["--json", "--scenario", &path("reference.json"), "simulate", "--plan", "academia_switch"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scenario_from_environment() {
    let o = triaxis()
        .env("TRIAXIS_SCENARIO", fixture("frontier_incomparable.json"))
        .args(["frontier", "--json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("quant_fund"));

    // the flag wins over the environment
    let o = triaxis()
        .env("TRIAXIS_SCENARIO", fixture("frontier_incomparable.json"))
        .args(["frontier", "--json", "--scenario", &path("reference.json")])
        .output()
        .unwrap();
    assert!(stdout(&o).contains("industry_rnd"));
    assert!(!stdout(&o).contains("quant_fund"));
}

#[test]
fn missing_scenario_is_exit_1() {
    let o = run(&["score"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:validation: scenario:"), "{}", stderr(&o));
}

#[test]
fn unreadable_scenario_is_exit_1() {
    let o = run(&["--scenario", "/nonexistent/scenario.json", "score"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:validation:"));
}

#[test]
fn malformed_scenario_is_a_parse_error() {
    let dir = std::env::temp_dir().join(format!("triaxis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("broken.json");
    std::fs::write(&file, "{\"preferences\": [").unwrap();
    let o = run(&["--scenario", &file.to_string_lossy(), "score"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:parse:"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn unknown_plan_is_a_reference_error() {
    let o = run(&["--scenario", &path("reference.json"), "simulate", "--plan", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:reference:"));
}

#[test]
fn usage_errors() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:usage:"));

    let o = run(&["--scenario", &path("reference.json"), "household", "--template", "merge"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:usage:"));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("satisfice"));
}

#[test]
fn archetypes_need_no_scenario() {
    let o = run(&["archetypes"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("industrial_rnd") || out.contains("IndustrialRnD"), "{out}");
}

#[test]
fn human_tables_for_every_command() {
    let reference = path("reference.json");
    for args in [
        vec!["score"],
        vec!["frontier"],
        vec!["simulate", "--plan", "premature_venture"],
        vec!["satisfice"],
        vec!["strategy"],
        vec!["options", "--specialized", "industry_track", "--generalized", "generalist_track"],
        vec!["household"],
        vec!["household", "--template", "sequential_focus"],
    ] {
        let mut full = vec!["--scenario", reference.as_str()];
        full.extend(&args);
        let o = run(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert!(!stdout(&o).is_empty());
    }
    let o = run(&["--scenario", &reference, "strategy"]);
    assert!(stdout(&o).contains("preferred: sequential"));
    let o = run(&["--scenario", &reference, "simulate", "--plan", "premature_venture"]);
    assert!(stdout(&o).contains("FirstTrap"));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        self.0.kill().ok();
        self.0.wait().ok();
    }
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

fn http(port: u16, request: &str) -> std::io::Result<String> {
    let mut s = TcpStream::connect(("127.0.0.1", port))?;
    s.set_read_timeout(Some(Duration::from_secs(10)))?;
    s.write_all(request.as_bytes())?;
    let mut out = String::new();
    s.read_to_string(&mut out)?;
    Ok(out)
}

fn body_of(response: &str) -> &str {
    response.split_once("\r\n\r\n").map(|(_, b)| b).unwrap_or("")
}

#[test]
fn serve_over_tcp() {
    let port = free_port();
    let _server = Server(
        triaxis()
            .args(["serve", "--port", &port.to_string(), "--scenario", &path("reference.json")])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let deadline = Instant::now() + Duration::from_secs(20);
    let health = loop {
        match http(port, "GET /health HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n") {
            Ok(r) => break r,
            Err(_) if Instant::now() < deadline => sleep(Duration::from_millis(50)),
            Err(e) => panic!("server did not come up: {e}"),
        }
    };
    assert!(health.starts_with("HTTP/1.1 200"), "{health}");
    assert_eq!(body_of(&health), "{\n  \"ok\": true\n}\n");

    // partial body merged over the default scenario
    let partial = r#"{"thresholds": {"w_min": 99, "a_min": 0, "m_min": 0}}"#;
    let req = format!(
        "POST /v1/satisfice HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{partial}",
        partial.len()
    );
    let resp = http(port, &req).unwrap();
    assert!(resp.starts_with("HTTP/1.1 422"), "{resp}");
    let v: Value = serde_json::from_str(body_of(&resp)).unwrap();
    assert_eq!(v["error"]["category"], "infeasible");
}
