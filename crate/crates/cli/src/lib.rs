//! Command implementations behind the `sonoplane` binary, and the live
//! WebSocket session server.

pub mod serve;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use sonoplane_core::bot::{run_headless, BotError, BotParams, HeadlessRun};
use sonoplane_core::io::{ConfigDocument, ConfigError, PgmError, WavError};
use sonoplane_core::session::SessionReport;
use sonoplane_core::strips::{
    analyze, decode_attributes, render_strip_image, DecodedFrame, Raster, Side, StripError,
    StripFrame,
};
use sonoplane_core::synth::{render_for, SynthError};
use sonoplane_core::{PcmBuffer, SoundAttributeFrame};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Strip(#[from] StripError),
    #[error(transparent)]
    Bot(#[from] BotError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit status: 2 for bad input documents, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Who plays while audio is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Player {
    /// Nobody touches; the target wanders for the whole run.
    #[default]
    None,
    /// The headless bot plays.
    Bot,
}

pub fn bot_params(doc: &ConfigDocument) -> BotParams {
    BotParams {
        touch_interval_s: doc.game.touch_min_interval_s,
        ..BotParams::default()
    }
}

pub fn check_seconds(seconds: f64) -> Result<f64, CliError> {
    if seconds.is_finite() && seconds > 0.0 {
        Ok(seconds)
    } else {
        Err(CliError::Usage(format!("--seconds must be positive, got {seconds}")))
    }
}

/// Headless bot session plus its touch trace.
pub fn simulate(
    doc: &ConfigDocument,
    seconds: f64,
    seed: u64,
    params: &BotParams,
) -> Result<HeadlessRun, CliError> {
    Ok(run_headless(&doc.game, Some(params), check_seconds(seconds)?, seed)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn report_json(report: &SessionReport) -> String {
    to_json_text(report)
}

/// Plays `seconds` of game and synthesizes its attribute stream.
pub fn render_audio(
    doc: &ConfigDocument,
    seconds: f64,
    seed: u64,
    player: Player,
) -> Result<(PcmBuffer, Vec<SoundAttributeFrame>), CliError> {
    let seconds = check_seconds(seconds)?;
    let params = bot_params(doc);
    let params = (player == Player::Bot).then_some(&params);
    let run = run_headless(&doc.game, params, seconds, seed)?;
    let pcm = render_for(&run.frames, &doc.synth, seconds)?;
    Ok((pcm, run.frames))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripsOutput {
    pub frames: Vec<StripFrame>,
    pub left: Raster,
    pub right: Raster,
    pub decoded: Vec<DecodedFrame>,
}

/// Analyzes a buffer into strips; mono input is heard in both channels.
pub fn strips(pcm: &PcmBuffer, doc: &ConfigDocument) -> Result<StripsOutput, CliError> {
    let stereo = if pcm.channels() == 1 {
        pcm.to_stereo()?
    } else {
        pcm.clone()
    };
    let frames = analyze(&stereo, &doc.analyzer)?;
    let decoded = decode_attributes(&frames, &doc.game.spec, &doc.analyzer)?;
    Ok(StripsOutput {
        left: render_strip_image(&frames, Side::Left),
        right: render_strip_image(&frames, Side::Right),
        frames,
        decoded,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
