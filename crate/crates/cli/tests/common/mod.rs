#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread;

use serde_json::Value;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn sample_config() -> PathBuf {
    repo_root().join("data/sample/config.json")
}

pub fn ggdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggdp"))
        .args(args)
        .env_remove("GGDP_API_BASE")
        .output()
        .expect("binary runs")
}

pub fn run_in(out: &Path, command: &str, extra: &[&str]) -> Output {
    let config = sample_config();
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ggdp(&args)
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Report text with the run timestamp blanked.
pub fn without_timestamp(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v["run"]["timestamp"] = Value::Null;
    serde_json::to_string(&v).unwrap()
}

pub fn schema_errors(report: &Value) -> Vec<String> {
    let schema = read_json(&repo_root().join("schema/report.schema.json"));
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator
        .iter_errors(report)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect()
}

/// Serves canned bodies for paths containing a key; anything else is 404.
pub fn serve(routes: Vec<(&'static str, String)>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() {
                continue;
            }
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
            }
            let target = request_line.split_whitespace().nth(1).unwrap_or("");
            let (status, body) = match routes.iter().find(|(key, _)| target.contains(key)) {
                Some((_, body)) => ("200 OK", body.clone()),
                None => ("404 Not Found", String::from("[]")),
            };
            let _ = write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
        }
    });
    format!("http://{addr}/v2")
}
