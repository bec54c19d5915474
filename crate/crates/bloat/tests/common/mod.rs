#![allow(dead_code)]

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};

/// A scripted chat-completions server on a loopback port. Each connection
/// gets its own thread, so slow replies do not block later requests.
pub struct Stub {
    pub url: String,
    pub requests: Arc<Mutex<Vec<Value>>>,
}

impl Stub {
    pub fn request_count(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

/// `reply(n, body)` gets the zero-based arrival number and the parsed
/// request body, and returns a status and response body.
pub fn serve<F>(reply: F) -> Stub
where
    F: Fn(usize, &Value) -> (u16, String) + Send + Sync + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&requests);
    let reply = Arc::new(reply);
    let counter = Arc::new(AtomicUsize::new(0));
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let (reply, seen, counter) = (Arc::clone(&reply), Arc::clone(&seen), Arc::clone(&counter));
            thread::spawn(move || handle(stream, &*reply, &seen, &counter));
        }
    });
    Stub { url, requests }
}

fn handle(stream: TcpStream, reply: &dyn Fn(usize, &Value) -> (u16, String), seen: &Mutex<Vec<Value>>, counter: &AtomicUsize) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body).unwrap();
    let request: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    let n = counter.fetch_add(1, Ordering::SeqCst);
    seen.lock().unwrap().push(request.clone());
    let (status, text) = reply(n, &request);
    let mut stream = stream;
    let head = format!(
        "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        text.len()
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(text.as_bytes());
    let _ = stream.flush();
}

/// A successful completion with `content` as the message.
pub fn completion(content: &str) -> String {
    json!({
        "choices": [{ "index": 0, "message": { "role": "assistant", "content": content }, "finish_reason": "stop" }]
    })
    .to_string()
}

/// The user message of a request.
pub fn prompt(request: &Value) -> String {
    request["messages"][0]["content"].as_str().unwrap_or_default().to_string()
}

/// The document text after the instruction of a bundled template.
pub fn chunk_of(request: &Value) -> String {
    let p = prompt(request);
    match p.split_once(":\n") {
        Some((_, chunk)) => chunk.to_string(),
        None => p,
    }
}

pub fn first_words(text: &str, n: usize) -> String {
    text.split_whitespace().take(n).collect::<Vec<_>>().join(" ")
}

pub fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), &target).unwrap();
        }
    }
}

pub fn fixtures() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}
