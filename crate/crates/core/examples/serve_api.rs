// Starts the HTTP API on an ephemeral port and plays the operator: answers
// the anxiety questions, watches the plan highlight, then stops the session.

use std::time::Duration;

use carebot::service::{router, AppState, ServerConfig};
use serde_json::{json, Value};

#[tokio::main]
async fn main() {
    let state = AppState::new(ServerConfig {
        autocomplete: false,
        ..ServerConfig::default()
    });
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, router(state)).await.unwrap() });
    let http = reqwest::Client::new();
    println!("serving on {base}");

    let created: Value = http.post(format!("{base}/sessions")).send().await.unwrap().json().await.unwrap();
    let id = created["id"].as_str().unwrap().to_string();
    println!("session {id}: {created}");

    for answer in ["medium", "high"] {
        let prompt = loop {
            let v: Value = http.get(format!("{base}/sessions/{id}/prompts")).send().await.unwrap().json().await.unwrap();
            if let Some(p) = v["prompts"].as_array().and_then(|a| a.first()).cloned() {
                break p;
            }
            tokio::time::sleep(Duration::from_millis(20)).await;
        };
        println!("prompt {}: {}  -> {answer}", prompt["id"], prompt["question"]);
        let reply: Value = http
            .post(format!("{base}/sessions/{id}/prompts/{}", prompt["id"].as_str().unwrap()))
            .json(&json!({ "value": answer }))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        println!("  {reply}");
    }

    let plan: Value = http.get(format!("{base}/sessions/{id}/plan")).send().await.unwrap().json().await.unwrap();
    let node = plan["current_node"].as_u64().unwrap() as usize;
    println!("plan highlight: node {node} {}", plan["plan"]["nodes"][node]["action"]);

    let ack: Value = http.post(format!("{base}/sessions/{id}/stop")).send().await.unwrap().json().await.unwrap();
    println!("stop: {ack}");
    let events = http.get(format!("{base}/sessions/{id}/events")).send().await.unwrap().text().await.unwrap();
    let kinds: Vec<&str> = events.lines().filter_map(|l| l.strip_prefix("event: ")).collect();
    println!("event stream: {}", kinds.join(" "));
}
