use std::sync::Arc;
use std::time::Duration;

use coord_arena::server::{router, ActionRequest, ErrorBody, EventLog};
use coord_arena::session::{Ack, Event, SessionManager, SessionSummary, Status};
use coord_arena::view::ViewDoc;
use futures::StreamExt;
use reqwest::{Client, StatusCode};
use serde_json::json;

async fn start() -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let manager = Arc::new(SessionManager::new(Duration::from_secs(10)));
    tokio::spawn(async move { axum::serve(listener, router(manager)).await.unwrap() });
    format!("http://{addr}")
}

async fn create(client: &Client, base: &str, body: serde_json::Value) -> reqwest::Response {
    client
        .post(format!("{base}/sessions"))
        .json(&body)
        .send()
        .await
        .unwrap()
}

/// Read SSE frames until `n` events arrived or the server closed the stream.
async fn read_sse(resp: reqwest::Response, n: usize) -> Vec<(u64, String, Event)> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut body = resp.bytes_stream();
    while out.len() < n {
        let Some(chunk) = tokio::time::timeout(Duration::from_secs(20), body.next())
            .await
            .expect("event stream stalled")
        else {
            break;
        };
        buf.push_str(&String::from_utf8_lossy(&chunk.unwrap()));
        while let Some(end) = buf.find("\n\n") {
            let frame: String = buf.drain(..end + 2).collect();
            let (mut id, mut name, mut data) = (None, String::new(), String::new());
            for line in frame.lines() {
                if let Some(v) = line.strip_prefix("id:") {
                    id = Some(v.trim().parse().unwrap());
                } else if let Some(v) = line.strip_prefix("event:") {
                    name = v.trim().to_string();
                } else if let Some(v) = line.strip_prefix("data:") {
                    data.push_str(v.trim_start());
                }
            }
            // Keep-alive comments carry no id.
            if let Some(id) = id {
                out.push((id, name, serde_json::from_str(&data).unwrap()));
            }
        }
    }
    out
}

async fn wait_finished(client: &Client, base: &str, id: &str) -> SessionSummary {
    for _ in 0..400 {
        let s: SessionSummary = client
            .get(format!("{base}/sessions/{id}"))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        if s.status == Status::Finished {
            return s;
        }
        tokio::time::sleep(Duration::from_millis(25)).await;
    }
    panic!("session {id} never finished");
}

#[tokio::test(flavor = "multi_thread")]
async fn human_turn_over_http() {
    let base = start().await;
    let c = Client::new();
    let r = create(
        &c,
        &base,
        json!({"game": "hanabi", "seats": ["human", "scripted:rule-hanabi"], "seed": 5, "names": ["Ana", "Bo"]}),
    )
    .await;
    assert_eq!(r.status(), StatusCode::CREATED);
    let s: SessionSummary = r.json().await.unwrap();
    assert_eq!(s.names, ["Ana", "Bo"]);

    let v: ViewDoc = c
        .get(format!("{base}/sessions/{}/view?seat=0", s.id))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert!(v.can_act);
    let play = v
        .legal
        .iter()
        .find(|a| a.label == "Play my Card 0")
        .unwrap();
    let act = |seat: usize, action: &str| {
        c.post(format!("{base}/sessions/{}/actions", s.id))
            .json(&ActionRequest {
                seat,
                action: action.to_string(),
            })
            .send()
    };
    let ack: Ack = act(0, &play.id).await.unwrap().json().await.unwrap();
    let kinds: Vec<&str> = ack.events.iter().map(|e| e.kind.name()).collect();
    assert_eq!(kinds, ["action", "draw", "turn_change"]);

    let r = act(0, &play.id).await.unwrap();
    assert_eq!(r.status(), StatusCode::CONFLICT);
    let err: ErrorBody = r.json().await.unwrap();
    assert!(
        ["NotYourTurn", "StaleAction"].contains(&err.error.as_str()),
        "{err:?}"
    );

    let r = c
        .get(format!("{base}/sessions/nope/view"))
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
    let err: ErrorBody = r.json().await.unwrap();
    assert_eq!(
        (err.schema_version, err.error.as_str()),
        (1, "UnknownSession")
    );
}

#[tokio::test(flavor = "multi_thread")]
async fn invalid_sessions_are_rejected() {
    let base = start().await;
    let c = Client::new();
    let r = create(
        &c,
        &base,
        json!({"game": "kitchen", "board": "atlantis", "seats": ["human", "scripted:greedy-kitchen"]}),
    )
    .await;
    assert_eq!(r.status(), StatusCode::BAD_REQUEST);
    let err: ErrorBody = r.json().await.unwrap();
    assert_eq!(err.error, "Invalid");
    assert!(err.message.contains("atlantis"), "{}", err.message);
    let list: serde_json::Value = c
        .get(format!("{base}/sessions"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(list["sessions"].as_array().unwrap().len(), 0);
}

#[tokio::test(flavor = "multi_thread")]
async fn event_stream_matches_the_log_and_resumes() {
    let base = start().await;
    let c = Client::new();
    let s: SessionSummary = create(
        &c,
        &base,
        json!({"game": "kitchen", "board": "cramped_room", "horizon": 40,
               "seats": ["scripted:greedy-kitchen", "scripted:greedy-kitchen"], "seed": 1}),
    )
    .await
    .json()
    .await
    .unwrap();
    let full = read_sse(
        c.get(format!("{base}/sessions/{}/events", s.id))
            .send()
            .await
            .unwrap(),
        usize::MAX,
    )
    .await;
    let done = wait_finished(&c, &base, &s.id).await;
    let log: EventLog = c
        .get(format!("{base}/sessions/{}/log", s.id))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(log.events.len() as u64, done.events);
    let streamed: Vec<Event> = full.iter().map(|(_, _, e)| e.clone()).collect();
    assert_eq!(
        streamed, log.events,
        "stream ends after the finishing event"
    );
    for (id, name, e) in &full {
        assert_eq!(*id, e.seq);
        assert_eq!(name, e.kind.name());
    }

    // Resume from a cursor, by query and by header.
    let tail = read_sse(
        c.get(format!("{base}/sessions/{}/events?after=7", s.id))
            .send()
            .await
            .unwrap(),
        usize::MAX,
    )
    .await;
    assert_eq!(tail.first().unwrap().0, 8);
    assert_eq!(tail.len(), log.events.len() - 7);
    let tail = read_sse(
        c.get(format!("{base}/sessions/{}/events", s.id))
            .header("Last-Event-ID", "10")
            .send()
            .await
            .unwrap(),
        usize::MAX,
    )
    .await;
    assert_eq!(tail.first().unwrap().0, 11);
}

async fn play_human_seat(c: &Client, base: &str, id: &str, max_moves: usize) {
    let mut moves = 0;
    for _ in 0..2000 {
        let v: ViewDoc = c
            .get(format!("{base}/sessions/{id}/view?seat=0"))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        if v.status == Status::Finished || moves == max_moves {
            return;
        }
        if v.can_act {
            let r = c
                .post(format!("{base}/sessions/{id}/actions"))
                .json(&ActionRequest {
                    seat: 0,
                    action: v.legal[0].id.clone(),
                })
                .send()
                .await
                .unwrap();
            assert!(r.status().is_success(), "{}", r.text().await.unwrap());
            moves += 1;
        } else {
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
    }
    panic!("human seat never got to finish");
}

#[tokio::test(flavor = "multi_thread")]
async fn reconnecting_subscribers_miss_nothing() {
    let base = start().await;
    let c = Client::new();
    let s: SessionSummary = create(
        &c,
        &base,
        json!({"game": "capture", "seats": ["human", "scripted:greedy-pursuit"], "seed": 2}),
    )
    .await
    .json()
    .await
    .unwrap();
    let url = format!("{base}/sessions/{}/events", s.id);
    let first = tokio::spawn(read_sse(c.get(&url).send().await.unwrap(), 5));
    play_human_seat(&c, &base, &s.id, 3).await;
    // Drop the first connection mid-game.
    let mut seen = tokio::time::timeout(Duration::from_secs(20), first)
        .await
        .unwrap()
        .unwrap();
    assert_eq!(seen.len(), 5);
    let last = seen.last().unwrap().0;

    // Reconnect from the cursor while the game keeps moving.
    let again = c
        .get(&url)
        .header("Last-Event-ID", last.to_string())
        .send()
        .await
        .unwrap();
    let second = tokio::spawn(read_sse(again, usize::MAX));
    play_human_seat(&c, &base, &s.id, usize::MAX).await;
    seen.extend(
        tokio::time::timeout(Duration::from_secs(30), second)
            .await
            .unwrap()
            .unwrap(),
    );

    let seqs: Vec<u64> = seen.iter().map(|(id, _, _)| *id).collect();
    let expect: Vec<u64> = (1..=seqs.len() as u64).collect();
    assert_eq!(seqs, expect);
    assert_eq!(seen.last().unwrap().1, "finished");
    let log: EventLog = c
        .get(format!("{base}/sessions/{}/log", s.id))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(
        seen.into_iter().map(|(_, _, e)| e).collect::<Vec<_>>(),
        log.events
    );
}
