mod common;

use std::fs;
use std::path::PathBuf;

use common::{chat_reply, MockServer};
use motionforge::llm::{extract_code, EndpointConfig, LlmClient, LlmError};

const KEY: &str = "sk-test-0123456789abcdef";

fn config(base_url: &str) -> EndpointConfig {
    EndpointConfig { base_url: base_url.to_string(), backoff_ms: 5, max_attempts: 3, timeout_secs: 5, ..Default::default() }
}

#[test]
fn echoed_fenced_script_round_trips() {
    let script = "from motionforge_blender import *\nclear_scene()\n";
    let reply = format!("```python\n{script}```");
    let server = MockServer::scripted(vec![(200, chat_reply(&reply))]);
    let client = LlmClient::with_key(config(&server.base_url), KEY);
    let completion = client.request_completion("A basketball free falls in the air").unwrap();
    assert_eq!(completion.text, reply);
    assert_eq!(completion.attempts.len(), 1);
    assert_eq!(extract_code(&completion.text).unwrap().body, script);

    let reqs = server.join();
    assert_eq!(reqs[0].request_line, "POST /chat/completions HTTP/1.1");
    assert_eq!(reqs[0].header("authorization"), Some(format!("Bearer {KEY}").as_str()));
    let body: serde_json::Value = serde_json::from_slice(&reqs[0].body).unwrap();
    assert_eq!(body["messages"][0]["content"], "A basketball free falls in the air");
    assert_eq!(body["model"], "gpt-4");
}

#[test]
fn transient_failures_are_retried() {
    let server = MockServer::scripted(vec![
        (503, "{}".into()),
        (500, "{}".into()),
        (200, chat_reply("done")),
    ]);
    let client = LlmClient::with_key(config(&server.base_url), KEY);
    let completion = client.request_completion("p").unwrap();
    assert_eq!(completion.text, "done");
    let statuses: Vec<_> = completion.attempts.iter().map(|a| a.status).collect();
    assert_eq!(statuses, [Some(503), Some(500), Some(200)]);
    assert_eq!(server.join().len(), 3);
}

#[test]
fn rate_limit_retried_until_exhausted() {
    let server = MockServer::scripted(vec![(429, "{}".into()), (429, "{}".into()), (429, "{}".into())]);
    let client = LlmClient::with_key(config(&server.base_url), KEY);
    let err = client.request_completion("p").unwrap_err();
    assert!(matches!(err, LlmError::Exhausted { attempts: 3, .. }), "{err:?}");
    assert_eq!(server.join().len(), 3);
}

#[test]
fn auth_failure_is_not_retried() {
    let server = MockServer::scripted(vec![(401, r#"{"error":"bad key"}"#.into())]);
    let client = LlmClient::with_key(config(&server.base_url), KEY);
    assert_eq!(client.request_completion("p").unwrap_err(), LlmError::Auth(401));
    assert_eq!(server.join().len(), 1);
}

#[test]
fn malformed_response() {
    let server = MockServer::scripted(vec![(200, r#"{"choices": []}"#.into())]);
    let client = LlmClient::with_key(config(&server.base_url), KEY);
    assert!(matches!(client.request_completion("p"), Err(LlmError::Malformed(_))));
    server.join();
}

#[test]
fn unreachable_endpoint_exhausts_attempts() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    let client = LlmClient::with_key(EndpointConfig { max_attempts: 2, ..config(&url) }, KEY);
    let err = client.request_completion("p").unwrap_err();
    assert!(matches!(err, LlmError::Exhausted { attempts: 2, .. }), "{err:?}");
}

#[test]
fn logs_never_contain_the_key() {
    let dir = tempfile::tempdir().unwrap();
    // A response that echoes the key back must be redacted too.
    let server = MockServer::scripted(vec![(500, format!("{{\"echo\":\"{KEY}\"}}")), (200, chat_reply(KEY))]);
    let client = LlmClient::with_key(config(&server.base_url), KEY).log_to(dir.path());
    client.request_completion("p").unwrap();
    server.join();
    let files: Vec<PathBuf> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(files.len() >= 3, "{files:?}");
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        assert!(!text.contains(KEY), "{} leaks the key", f.display());
    }
    assert!(!format!("{client:?}").contains(KEY));
}

#[test]
fn fenced_goldens_extract_byte_identical() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for entry in fs::read_dir(dir).unwrap() {
        let golden = fs::read_to_string(entry.unwrap().path()).unwrap();
        for wrapped in [format!("```python\n{golden}```"), format!("Sure.\n\n```\n{golden}```\nLet me know.\n")] {
            assert_eq!(extract_code(&wrapped).unwrap().body, golden);
        }
    }
}
