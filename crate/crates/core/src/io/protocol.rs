use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ConfigDocument;
use crate::game::{TouchEvent, TouchOutcome};
use crate::session::{SessionReport, TouchResult};
use crate::synth::SoundAttributeFrame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("out-of-range message: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TouchResultMessage {
    pub outcome: TouchOutcomeKind,
    pub score: u32,
    pub speed_level: u32,
    pub t: f64,
}

/// Wire form of [`TouchOutcome`]; points travel in `score`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TouchOutcomeKind {
    Hit,
    Miss,
    RateLimited,
}

impl From<TouchOutcome> for TouchOutcomeKind {
    fn from(o: TouchOutcome) -> Self {
        match o {
            TouchOutcome::Hit { .. } => Self::Hit,
            TouchOutcome::Miss => Self::Miss,
            TouchOutcome::RateLimited => Self::RateLimited,
        }
    }
}

impl From<&TouchResult> for TouchResultMessage {
    fn from(r: &TouchResult) -> Self {
        Self {
            outcome: r.outcome.into(),
            score: r.score,
            speed_level: r.speed_level,
            t: r.t,
        }
    }
}

/// One JSON object per WebSocket text message, tagged by `type`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProtocolMessage {
    Frame(SoundAttributeFrame),
    Touch(TouchEvent),
    Result(TouchResultMessage),
    Config(Box<ConfigDocument>),
    End(SessionReport),
    /// Server diagnostic; the connection stays open.
    Error { message: String },
}

impl ProtocolMessage {
    /// Parses and range-checks one message.
    pub fn parse(text: &str) -> Result<Self, ProtocolError> {
        let msg: Self =
            serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        msg.check()?;
        Ok(msg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("protocol messages serialize")
    }

    /// Range rules of the payload types.
    pub fn check(&self) -> Result<(), ProtocolError> {
        let bad = |m: String| Err(ProtocolError::OutOfRange(m));
        match self {
            Self::Frame(f) => f
                .check_ranges()
                .map_err(|e| ProtocolError::OutOfRange(e.to_string())),
            Self::Touch(t) => {
                let unit = |v: f64| (0.0..=1.0).contains(&v);
                if !(unit(t.x) && unit(t.y)) {
                    bad(format!("touch ({}, {}) outside the unit square", t.x, t.y))
                } else if !t.t.is_finite() || t.t < 0.0 {
                    bad(format!("touch time {} must be finite and non-negative", t.t))
                } else {
                    Ok(())
                }
            }
            Self::Result(r) if !(r.t.is_finite() && r.t >= 0.0) => {
                bad(format!("result time {}", r.t))
            }
            Self::Config(doc) => match doc.violations() {
                v if v.is_empty() => Ok(()),
                v => bad(crate::join_violations(&v)),
            },
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn wire_shapes() {
        let touch = ProtocolMessage::Touch(TouchEvent { x: 0.25, y: 0.5, t: 1.5 });
        assert_eq!(
            serde_json::to_value(&touch).unwrap(),
            json!({"type": "touch", "x": 0.25, "y": 0.5, "t": 1.5})
        );
        let result = ProtocolMessage::Result(TouchResultMessage {
            outcome: TouchOutcomeKind::RateLimited,
            score: 3,
            speed_level: 3,
            t: 2.0,
        });
        assert_eq!(
            serde_json::to_value(&result).unwrap(),
            json!({"type": "result", "outcome": "rate_limited", "score": 3, "speed_level": 3, "t": 2.0})
        );
        let frame = ProtocolMessage::Frame(SoundAttributeFrame {
            t: 0.0,
            pitch_hz: 440.0,
            amplitude: 0.8,
            timbre: 0.5,
            waveshape: 0.5,
            pan: None,
        });
        let v = serde_json::to_value(&frame).unwrap();
        assert_eq!(v["type"], "frame");
        assert!(v.get("pan").is_none());
        let config = ProtocolMessage::Config(Box::default());
        let v = serde_json::to_value(&config).unwrap();
        assert_eq!((v["type"].as_str(), v["version"].as_u64()), (Some("config"), Some(1)));
        for m in [touch, result, frame, config] {
            assert_eq!(ProtocolMessage::parse(&m.to_json()).unwrap(), m);
        }
    }

    #[test]
    fn rejects_bad_messages() {
        for text in [
            "",
            "{}",
            "[]",
            r#"{"type": "teleport"}"#,
            r#"{"type": "touch", "x": 0.5, "y": 0.5}"#,
            r#"{"type": "touch", "x": 0.5, "y": 0.5, "t": 1, "z": 0}"#,
            r#"{"type": "touch", "x": "0.5", "y": 0.5, "t": 1}"#,
        ] {
            assert!(
                matches!(ProtocolMessage::parse(text), Err(ProtocolError::Malformed(_))),
                "{text}"
            );
        }
        for text in [
            r#"{"type": "touch", "x": 1.5, "y": 0.5, "t": 1}"#,
            r#"{"type": "touch", "x": 0.5, "y": 0.5, "t": -1}"#,
            r#"{"type": "frame", "t": 0, "pitch_hz": 440, "amplitude": 2, "timbre": 0, "waveshape": 0}"#,
        ] {
            assert!(
                matches!(ProtocolMessage::parse(text), Err(ProtocolError::OutOfRange(_))),
                "{text}"
            );
        }
    }
}
