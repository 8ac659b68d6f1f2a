//! The `rpn` binary end to end.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn net(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../core/nets/{name}.rpn"))
}

fn rpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpn")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_net(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("rpn-cli-test-{}-{name}.rpn", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn validate_bundled_nets() {
    for name in ["catalysis", "backtrack", "causal", "out_of_order", "transaction"] {
        let o = rpn(&["validate", net(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("ok: net"));
    }
}

#[test]
fn validate_reports_violations() {
    let path = temp_net(
        "bad",
        "net bad { bases: a; places: p, q; transitions: t; arc p -> t { a } arc t -> q { a } initial { p: { a }, q: { a } } }",
    );
    let o = rpn(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("UNIQUE-TOKEN"), "{}", stdout(&o));
    let syntax = temp_net("syntax", "net x { bases a; }");
    let o = rpn(&["validate", syntax.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("SYNTAX"));
}

#[test]
fn run_prints_final_state_json() {
    let o = rpn(&["run", net("catalysis").to_str().unwrap(), "--trace", "t1,t2,~t1:o"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        r#"{"marking":{"u":{"bases":["c"],"bonds":[]},"v":{"bases":[],"bonds":[]},"w":{"bases":[],"bonds":[]},"x":{"bases":[],"bonds":[]},"y":{"bases":["a","b"],"bonds":[["a","b"]]}},"history":{"t1":null,"t2":2}}"#
    );
}

#[test]
fn run_uses_the_default_mode_for_bare_reversals() {
    let file = net("catalysis");
    let o = rpn(&["run", file.to_str().unwrap(), "--trace", "t1,t2,~t1"]);
    assert_eq!(o.status.code(), Some(1), "t1 is not co-enabled after t2");
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOT-ENABLED: action 2 (~t1:co)"));
    let o = rpn(&["run", file.to_str().unwrap(), "--trace", "t1,t2,~t1", "--mode", "o"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        rpn(&["run", net("catalysis").to_str().unwrap(), "--trace", "~t1:zz"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(rpn(&["validate", "/nonexistent/file.rpn"]).status.code(), Some(2));
    assert_eq!(
        rpn(&["explore", net("catalysis").to_str().unwrap(), "--mode", "sideways"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(rpn(&["frobnicate"]).status.code(), Some(2));
    let o = rpn(&[
        "explore",
        net("catalysis").to_str().unwrap(),
        "--mode",
        "o",
        "--check",
        "loop",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explore_with_checks() {
    let o = rpn(&[
        "explore",
        net("out_of_order").to_str().unwrap(),
        "--mode",
        "o",
        "--depth",
        "6",
        "--check",
        "preservation,bonds,homes,literal",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains(": pass")).count(), 4, "{out}");
}

#[test]
fn check_theorems() {
    for (name, theorem) in [
        ("causal", "main"),
        ("catalysis", "second"),
        ("backtrack", "loop"),
        ("causal", "prop4"),
    ] {
        let o = rpn(&[
            "check",
            net(name).to_str().unwrap(),
            "--theorem",
            theorem,
            "--max-len",
            "4",
        ]);
        assert_eq!(o.status.code(), Some(0), "{name} {theorem}: {}", stdout(&o));
    }
}

#[test]
fn step_reads_commands_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rpn"))
        .args(["step", net("catalysis").to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"t1\nt2\n~t1:o\njson\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("marking: u:{c} y:{a, b, a-b}"), "{out}");
    assert!(out.contains(r#""t1":null"#));
}

#[test]
fn serve_answers_over_tcp() {
    use std::io::Read;
    use std::net::{TcpListener, TcpStream};
    use std::time::{Duration, Instant};

    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_rpn"))
        .args(["serve", net("catalysis").to_str().unwrap(), "--port", &port.to_string()])
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => panic!("server did not start: {e}"),
        }
    };
    stream
        .write_all(b"GET /enabled HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(
        response.ends_with(r#"{"forward":["t1"],"bt":[],"co":[],"o":[]}"#),
        "{response}"
    );
}
