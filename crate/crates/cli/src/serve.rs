//! One game per WebSocket connection.
//!
//! On connect the server sends the `config` message, waits one frame period,
//! then ticks at the game frame rate. Each tick first closes the previous
//! one (applying touches stamped up to its time, answering each with a
//! `result`) and then broadcasts the next `frame`. When the duration elapses,
//! or the client closes, the server sends `end` with the session report.
//!
//! Outbound messages go through a queue drained by a writer task, so a slow
//! client never holds up the simulation clock.

use std::net::SocketAddr;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use log::{debug, warn};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc;
use tokio::time::{interval_at, Instant, MissedTickBehavior};
use tokio_tungstenite::tungstenite::Message;

use sonoplane_core::io::{ConfigDocument, ProtocolError, ProtocolMessage, TouchResultMessage};
use sonoplane_core::session::{Session, SessionError, SessionReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ServeOptions {
    /// Session length in simulated seconds.
    pub duration_s: f64,
    /// Overrides `game.rng_seed` when set.
    pub seed: Option<u64>,
    /// Wall-clock seconds per simulated second.
    pub time_scale: f64,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            duration_s: 300.0,
            seed: None,
            time_scale: 1.0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("websocket: {0}")]
    Socket(#[from] tokio_tungstenite::tungstenite::Error),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("time scale must be positive, got {0}")]
    TimeScale(f64),
}

/// Accepts connections forever, one session task per connection.
pub async fn serve(
    listener: TcpListener,
    doc: ConfigDocument,
    options: ServeOptions,
) -> std::io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        let doc = doc.clone();
        let options = options.clone();
        tokio::spawn(async move {
            match serve_connection(stream, doc, options).await {
                Ok(report) => debug!("{peer}: session over, {} hits", report.hits),
                Err(e) => warn!("{peer}: {e}"),
            }
        });
    }
}

/// Binds `addr` and serves until the process ends.
pub async fn serve_on(
    addr: SocketAddr,
    doc: ConfigDocument,
    options: ServeOptions,
) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    log::info!("listening on ws://{}", listener.local_addr()?);
    serve(listener, doc, options).await
}

/// Runs one session over an accepted TCP stream.
pub async fn serve_connection(
    stream: TcpStream,
    doc: ConfigDocument,
    options: ServeOptions,
) -> Result<SessionReport, ServeError> {
    if !(options.time_scale.is_finite() && options.time_scale > 0.0) {
        return Err(ServeError::TimeScale(options.time_scale));
    }
    let ws = tokio_tungstenite::accept_async(stream).await?;
    let (mut sink, mut inbound) = ws.split();

    let (tx, mut rx) = mpsc::unbounded_channel::<Message>();
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let closing = matches!(msg, Message::Close(_));
            if sink.send(msg).await.is_err() || closing {
                break;
            }
        }
        let _ = sink.close().await;
    });
    let send = |m: &ProtocolMessage| {
        let _ = tx.send(Message::text(m.to_json()));
    };

    let mut game = doc.game.clone();
    if let Some(seed) = options.seed {
        game.rng_seed = seed;
    }
    let mut session = Session::new(game, options.duration_s)?;
    let mut config_msg = doc;
    config_msg.game.rng_seed = session.game().config().rng_seed;
    send(&ProtocolMessage::Config(Box::new(config_msg)));

    let period = Duration::from_secs_f64(session.game().config().frame_period() * options.time_scale);
    let mut ticks = interval_at(Instant::now() + period, period);
    ticks.set_missed_tick_behavior(MissedTickBehavior::Burst);

    loop {
        tokio::select! {
            biased;
            msg = inbound.next() => match msg {
                Some(Ok(Message::Text(text))) => {
                    if let Err(e) = on_text(&mut session, text.as_str()) {
                        warn!("dropped inbound message: {e}");
                        send(&ProtocolMessage::Error { message: e });
                    }
                }
                Some(Ok(Message::Binary(_))) => {
                    send(&ProtocolMessage::Error { message: "binary messages are not understood".into() });
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
            _ = ticks.tick() => {
                if session.tick_open() {
                    for r in session.end_tick()? {
                        send(&ProtocolMessage::Result(TouchResultMessage::from(&r)));
                    }
                }
                match session.begin_tick() {
                    Some(frame) => send(&ProtocolMessage::Frame(frame)),
                    None => break,
                }
            }
        }
    }

    let report = session.report();
    send(&ProtocolMessage::End(report.clone()));
    let _ = tx.send(Message::Close(None));
    drop(tx);
    let _ = writer.await;
    Ok(report)
}

fn on_text(session: &mut Session, text: &str) -> Result<(), String> {
    match ProtocolMessage::parse(text) {
        Ok(ProtocolMessage::Touch(touch)) => session.submit_touch(touch).map_err(|e| e.to_string()),
        Ok(other) => Err(format!("clients may only send touch messages, got {}", kind(&other))),
        Err(ProtocolError::Malformed(e) | ProtocolError::OutOfRange(e)) => Err(e),
    }
}

fn kind(m: &ProtocolMessage) -> &'static str {
    match m {
        ProtocolMessage::Frame(_) => "frame",
        ProtocolMessage::Touch(_) => "touch",
        ProtocolMessage::Result(_) => "result",
        ProtocolMessage::Config(_) => "config",
        ProtocolMessage::End(_) => "end",
        ProtocolMessage::Error { .. } => "error",
    }
}
