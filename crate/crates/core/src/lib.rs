//! Spatial game environments rendered through sound attributes, and stereo
//! game audio rendered as visual strips.
//!
//! - [`synth`]: attribute frames to PCM.
//! - [`mapping`]: positions (global, local, polar) to attribute frames and
//!   back, plus the sonar ping sweep.
//! - [`game`]: the tablet target game.
//! - [`bot`]: a headless player that sees only attribute frames.
//! - [`strips`]: stereo audio to left/right spectral strips and back.
//! - [`session`]: the transport-independent live session.
//! - [`io`]: config documents, WAV, PGM and the wire protocol.

pub mod bot;
pub mod game;
pub mod io;
pub mod mapping;
pub mod session;
pub mod strips;
pub mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use mapping::{MappingSpec, Point2, Pose};
pub use synth::{PcmBuffer, SoundAttributeFrame, SynthConfig};

/// One broken invariant, named by its field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Prefixes the field path with `section.`.
    pub fn within(mut self, section: &str) -> Self {
        self.field = format!("{section}.{}", self.field);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub(crate) fn join_display<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    join_display(v)
}
