use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameConfig;
use crate::mapping::Attribute;
use crate::strips::AnalyzerConfig;
use crate::synth::SynthConfig;
use crate::Violation;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}, at `{field}`: {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported config version {0} (expected {CONFIG_VERSION})")]
    Version(u32),
    #[error("invalid config: {}", crate::join_violations(.0))]
    Invalid(Vec<Violation>),
}

/// Everything a run needs, as one versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub version: u32,
    pub synth: SynthConfig,
    pub game: GameConfig,
    pub analyzer: AnalyzerConfig,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            synth: SynthConfig::default(),
            game: GameConfig::default(),
            analyzer: AnalyzerConfig::default(),
        }
    }
}

impl ConfigDocument {
    /// Every violated invariant, with field paths from the document root.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v: Vec<Violation> = Vec::new();
        if self.version != CONFIG_VERSION {
            v.push(Violation::new(
                "version",
                format!("must be {CONFIG_VERSION}, got {}", self.version),
            ));
        }
        v.extend(self.synth.violations().into_iter().map(|x| x.within("synth")));
        v.extend(self.game.violations().into_iter().map(|x| x.within("game")));
        v.extend(
            self.analyzer
                .violations_at(self.synth.sample_rate)
                .into_iter()
                .map(|x| x.within("analyzer")),
        );
        let (floor, ceil) = (self.synth.pitch_floor_hz, self.synth.pitch_ceil_hz);
        let audible = |hz: f64| hz >= floor && hz <= ceil;
        if let Some(m) = self.game.spec.mapping_of(Attribute::Pitch) {
            if !(audible(m.output_range.lo) && audible(m.output_range.hi)) {
                v.push(Violation::new(
                    "game.spec.dimensions",
                    format!("pitch output range leaves the synth range [{floor}, {ceil}] Hz"),
                ));
            }
        }
        if !audible(self.game.spec.rest.pitch_hz) {
            v.push(Violation::new(
                "game.spec.rest.pitch_hz",
                format!("leaves the synth range [{floor}, {ceil}] Hz"),
            ));
        }
        v
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::Parse {
                field,
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        })?;
        if doc.version != CONFIG_VERSION {
            return Err(ConfigError::Version(doc.version));
        }
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ConfigDocument, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    ConfigDocument::from_json(&text)
}

pub fn save_config(doc: &ConfigDocument, path: impl AsRef<Path>) -> Result<(), ConfigError> {
    let path = path.as_ref();
    fs::write(path, doc.to_json()).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })
}
