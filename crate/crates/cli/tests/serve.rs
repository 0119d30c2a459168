use std::net::SocketAddr;
use std::time::{Duration, Instant};

use futures_util::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;

use sonoplane_cli::serve::{serve, ServeOptions};
use sonoplane_cli::{bot_params, simulate};
use sonoplane_core::game::TouchEvent;
use sonoplane_core::io::{ConfigDocument, ProtocolMessage, TouchOutcomeKind};
use sonoplane_core::session::SessionReport;

async fn start(doc: ConfigDocument, options: ServeOptions) -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve(listener, doc, options));
    addr
}

struct Transcript {
    messages: Vec<(Instant, ProtocolMessage)>,
}

impl Transcript {
    fn report(&self) -> &SessionReport {
        match self.messages.last() {
            Some((_, ProtocolMessage::End(r))) => r,
            other => panic!("session did not end: {other:?}"),
        }
    }

    fn count(&self, pred: impl Fn(&ProtocolMessage) -> bool) -> usize {
        self.messages.iter().filter(|(_, m)| pred(m)).count()
    }
}

/// Connects, sends `outbound` right away, and records until `end`.
async fn play(addr: SocketAddr, outbound: Vec<String>) -> Transcript {
    let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}")).await.unwrap();
    let (mut tx, mut rx) = ws.split();
    for text in outbound {
        tx.send(Message::text(text)).await.unwrap();
    }
    let mut messages = Vec::new();
    while let Some(msg) = rx.next().await {
        match msg.unwrap() {
            Message::Text(text) => {
                let m = ProtocolMessage::parse(text.as_str()).unwrap();
                let done = matches!(m, ProtocolMessage::End(_));
                messages.push((Instant::now(), m));
                if done {
                    break;
                }
            }
            Message::Close(_) => break,
            _ => {}
        }
    }
    Transcript { messages }
}

fn touches(trace: &[TouchEvent]) -> Vec<String> {
    trace.iter().map(|t| ProtocolMessage::Touch(*t).to_json()).collect()
}

fn fast(seconds: f64, seed: u64) -> ServeOptions {
    ServeOptions {
        duration_s: seconds,
        seed: Some(seed),
        time_scale: 0.25,
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn replayed_bot_trace_matches_the_headless_report() {
    let doc = ConfigDocument::default();
    let headless = simulate(&doc, 20.0, 5, &bot_params(&doc)).unwrap();
    assert!(headless.report.hits > 5);
    let addr = start(doc, fast(20.0, 5)).await;
    let t = play(addr, touches(&headless.touches)).await;
    assert_eq!(t.report(), &headless.report);
    assert_eq!(
        serde_json::to_string(t.report()).unwrap(),
        serde_json::to_string(&headless.report).unwrap()
    );
    assert_eq!(
        t.count(|m| matches!(m, ProtocolMessage::Result(_))),
        headless.touches.len()
    );
    assert!(matches!(t.messages[0].1, ProtocolMessage::Config(_)));
}

#[tokio::test]
async fn second_touch_within_the_lockout_is_rate_limited() {
    let addr = start(ConfigDocument::default(), fast(2.0, 1)).await;
    let trace = [
        TouchEvent { x: 0.5, y: 0.5, t: 0.5 },
        TouchEvent { x: 0.5, y: 0.5, t: 0.9 },
    ];
    let t = play(addr, touches(&trace)).await;
    let outcomes: Vec<TouchOutcomeKind> = t
        .messages
        .iter()
        .filter_map(|(_, m)| match m {
            ProtocolMessage::Result(r) => Some(r.outcome),
            _ => None,
        })
        .collect();
    assert_eq!(outcomes.len(), 2);
    assert_ne!(outcomes[0], TouchOutcomeKind::RateLimited);
    assert_eq!(outcomes[1], TouchOutcomeKind::RateLimited);
    assert_eq!(t.report().rate_limited, 1);
}

#[tokio::test]
async fn idle_client_gets_every_frame_and_a_zero_score() {
    let addr = start(ConfigDocument::default(), fast(1.0, 2)).await;
    let t = play(addr, vec![]).await;
    let frames: Vec<f64> = t
        .messages
        .iter()
        .filter_map(|(_, m)| match m {
            ProtocolMessage::Frame(f) => Some(f.t),
            _ => None,
        })
        .collect();
    assert_eq!(frames.len(), 50);
    assert!(frames.windows(2).all(|w| (w[1] - w[0] - 0.02).abs() < 1e-9));
    let r = t.report();
    assert_eq!((r.hits, r.touches_attempted, r.final_speed_level), (0, 0, 0));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn frame_cadence_jitter_is_within_a_fifth_of_the_period() {
    let options = ServeOptions {
        duration_s: 2.0,
        seed: Some(3),
        time_scale: 1.0,
    };
    let addr = start(ConfigDocument::default(), options).await;
    let t = play(addr, vec![]).await;
    let arrivals: Vec<f64> = {
        let frames: Vec<Instant> = t
            .messages
            .iter()
            .filter(|(_, m)| matches!(m, ProtocolMessage::Frame(_)))
            .map(|(at, _)| *at)
            .collect();
        frames.iter().map(|at| at.duration_since(frames[0]).as_secs_f64()).collect()
    };
    assert_eq!(arrivals.len(), 100);
    let period = 0.02;
    let worst = arrivals
        .windows(2)
        .map(|w| (w[1] - w[0] - period).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.2 * period, "worst inter-frame deviation {worst} s");
}

#[tokio::test]
async fn malformed_messages_get_errors_and_the_session_survives() {
    let addr = start(ConfigDocument::default(), fast(3.0, 4)).await;
    let mut outbound: Vec<String> = [
        "",
        "not json",
        "{}",
        r#"{"type":"touch"}"#,
        r#"{"type":"touch","x":2,"y":0.5,"t":0.1}"#,
        r#"{"type":"frame","t":0,"pitch_hz":440,"amplitude":1,"timbre":0,"waveshape":0}"#,
        r#"{"type":"touch","x":0.5,"y":0.5,"t":1e400}"#,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    outbound.push(ProtocolMessage::Touch(TouchEvent { x: 0.5, y: 0.5, t: 0.6 }).to_json());
    // Stamped before the previous touch: dropped.
    outbound.push(ProtocolMessage::Touch(TouchEvent { x: 0.5, y: 0.5, t: 0.2 }).to_json());
    let t = play(addr, outbound).await;
    assert_eq!(t.count(|m| matches!(m, ProtocolMessage::Error { .. })), 8);
    assert_eq!(t.count(|m| matches!(m, ProtocolMessage::Result(_))), 1);
    assert_eq!(t.report().touches_attempted, 1);
}

#[tokio::test]
async fn client_close_ends_the_session_early() {
    let addr = start(ConfigDocument::default(), fast(300.0, 4)).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}")).await.unwrap();
    let started = Instant::now();
    let mut frames = 0;
    while frames < 5 {
        if let Some(Ok(Message::Text(text))) = ws.next().await {
            if matches!(ProtocolMessage::parse(text.as_str()), Ok(ProtocolMessage::Frame(_))) {
                frames += 1;
            }
        }
    }
    ws.close(None).await.unwrap();
    while let Some(Ok(_)) = ws.next().await {}
    assert!(started.elapsed() < Duration::from_secs(5));
}
