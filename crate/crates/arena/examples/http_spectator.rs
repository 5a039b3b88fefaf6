//! Start the service on a free port, seat two scripted chefs, and follow the
//! game over the event stream like a spectator would.
//!
//! cargo run -p coord-arena --example http_spectator

use std::sync::Arc;

use coord_arena::server::router;
use coord_arena::session::{SessionManager, SessionSummary};
use futures::StreamExt;
use serde_json::json;

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    tokio::spawn(async move {
        axum::serve(listener, router(Arc::new(SessionManager::default()))).await
    });

    let client = reqwest::Client::new();
    let session: SessionSummary = client
        .post(format!("{base}/sessions"))
        .json(&json!({
            "game": "kitchen",
            "board": "cramped_room",
            "horizon": 120,
            "seats": ["scripted:greedy-kitchen", "scripted:greedy-kitchen"],
        }))
        .send()
        .await?
        .error_for_status()?
        .json()
        .await?;
    println!("session {} on {}", session.id, session.board);

    let mut stream = client
        .get(format!("{base}/sessions/{}/events", session.id))
        .send()
        .await?
        .bytes_stream();
    let mut text = String::new();
    while let Some(chunk) = stream.next().await {
        text.push_str(&String::from_utf8_lossy(&chunk?));
        while let Some(end) = text.find("\n\n") {
            let frame: String = text.drain(..end + 2).collect();
            if let Some(data) = frame.lines().find_map(|l| l.strip_prefix("data:")) {
                let event: serde_json::Value = serde_json::from_str(data.trim())?;
                match event["type"].as_str() {
                    Some("tick") => {}
                    Some("action") => println!(
                        "step {:>3}  seat {}  {}",
                        event["step"], event["seat"], event["label"]
                    ),
                    _ => println!("{event}"),
                }
            }
        }
    }
    Ok(())
}
