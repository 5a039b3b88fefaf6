//! Ask a chat-completions endpoint for one reply, with retries on rate limits.
//!
//! COORD_ARENA_ENDPOINT=http://localhost:8000/v1 COORD_ARENA_MODEL=my-model \
//!     cargo run --example http_backend

use std::time::Duration;

use coord_core::backend::http::{HttpBackend, HttpConfig};
use coord_core::backend::{Backend, ChatMessage};

fn main() -> anyhow::Result<()> {
    let Ok(endpoint) = std::env::var("COORD_ARENA_ENDPOINT") else {
        println!("set COORD_ARENA_ENDPOINT (and optionally COORD_ARENA_MODEL, COORD_ARENA_API_KEY) to try this");
        return Ok(());
    };
    let model = std::env::var("COORD_ARENA_MODEL").unwrap_or_else(|_| "gpt-4o-mini".into());
    let mut cfg = HttpConfig::new(endpoint, model);
    cfg.timeout = Duration::from_secs(30);
    let backend = HttpBackend::new(cfg)?;
    let reply = backend.complete(&[
        ChatMessage::system("Answer with one of the listed actions."),
        ChatMessage::user("Available Actions:\nA. Stay in current Room\nB. Move to Room 2"),
    ])?;
    println!("{} ({} attempt(s))", reply.text, reply.attempts);
    Ok(())
}
