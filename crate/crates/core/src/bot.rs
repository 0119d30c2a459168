//! Headless player that hears the game only through attribute frames.
//!
//! The bot never reads game state. It inverts the mapping on the latest frame
//! to estimate the target position, estimates velocity by a finite difference
//! over a short window, and touches the extrapolated position whenever the
//! rate limit allows.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameConfig, TouchEvent};
use crate::mapping::{as_point, MappingError, MappingSpec, Point2};
use crate::session::{Session, SessionError, SessionReport};
use crate::synth::SoundAttributeFrame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BotError {
    #[error("no frames heard yet")]
    EmptyHistory,
    #[error("the bot plays Cartesian specs only")]
    UnsupportedFrame,
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BotParams {
    /// Extrapolation horizon added to the position estimate.
    pub lead_time_s: f64,
    pub velocity_window_s: f64,
    /// The bot waits this long between its own touches.
    pub touch_interval_s: f64,
    /// Ablation: frames reach the bot with pitch rounded to this many semitones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch_quantization_semitones: Option<f64>,
}

impl Default for BotParams {
    fn default() -> Self {
        Self {
            lead_time_s: 0.0,
            velocity_window_s: 0.2,
            touch_interval_s: 1.0,
            pitch_quantization_semitones: None,
        }
    }
}

/// Rounds a pitch onto an equal-tempered grid anchored at 440 Hz with steps
/// of `semitones`.
pub fn quantize_pitch(pitch_hz: f64, semitones: f64) -> f64 {
    let steps = (12.0 * (pitch_hz / 440.0).log2() / semitones).round();
    440.0 * (steps * semitones / 12.0).exp2()
}

/// Decides whether to touch now, and where.
///
/// `history` is ordered oldest first. Returns `None` while the rate limit
/// since `last_touch` is still running.
pub fn bot_decide(
    history: &[SoundAttributeFrame],
    spec: &MappingSpec,
    now: f64,
    last_touch: Option<f64>,
    params: &BotParams,
) -> Result<Option<TouchEvent>, BotError> {
    let latest = history.last().ok_or(BotError::EmptyHistory)?;
    if last_touch.is_some_and(|last| now - last < params.touch_interval_s) {
        return Ok(None);
    }
    let locate = |f: &SoundAttributeFrame| -> Result<Point2, BotError> {
        as_point(spec.to_position_clamped(f)?).ok_or(BotError::UnsupportedFrame)
    };
    let position = locate(latest)?;

    let horizon = latest.t - params.velocity_window_s - 1e-9;
    let reference = history
        .iter()
        .rev()
        .take_while(|f| f.t >= horizon)
        .last()
        .filter(|f| f.t < latest.t);
    let velocity = match reference {
        Some(old) => {
            let p = locate(old)?;
            let dt = latest.t - old.t;
            Point2::new((position.x - p.x) / dt, (position.y - p.y) / dt)
        }
        None => Point2::ORIGIN,
    };

    let lead = params.lead_time_s;
    Ok(Some(TouchEvent {
        x: (position.x + velocity.x * lead).clamp(0.0, 1.0),
        y: (position.y + velocity.y * lead).clamp(0.0, 1.0),
        t: now,
    }))
}

/// Stateful wrapper around [`bot_decide`] keeping a short frame history.
#[derive(Debug, Clone)]
pub struct Bot {
    spec: MappingSpec,
    params: BotParams,
    history: VecDeque<SoundAttributeFrame>,
    last_touch: Option<f64>,
}

impl Bot {
    pub fn new(spec: MappingSpec, params: BotParams) -> Self {
        Self {
            spec,
            params,
            history: VecDeque::new(),
            last_touch: None,
        }
    }

    pub fn hear(&mut self, mut frame: SoundAttributeFrame) {
        if let Some(step) = self.params.pitch_quantization_semitones {
            frame.pitch_hz = quantize_pitch(frame.pitch_hz, step);
        }
        let keep_after = frame.t - 2.0 * self.params.velocity_window_s - 1.0;
        while self.history.front().is_some_and(|f| f.t < keep_after) {
            self.history.pop_front();
        }
        self.history.push_back(frame);
    }

    pub fn decide(&mut self, now: f64) -> Result<Option<TouchEvent>, BotError> {
        let touch = bot_decide(
            self.history.make_contiguous(),
            &self.spec,
            now,
            self.last_touch,
            &self.params,
        )?;
        if let Some(t) = &touch {
            self.last_touch = Some(t.t);
        }
        Ok(touch)
    }
}

/// Everything a headless run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadlessRun {
    pub report: SessionReport,
    /// Touches in the order they were issued.
    pub touches: Vec<TouchEvent>,
    /// Frames as emitted by the game, before any ablation.
    pub frames: Vec<SoundAttributeFrame>,
}

/// Plays one seeded session with the bot; `seed` overrides `config.rng_seed`.
pub fn run_headless_session(
    config: &GameConfig,
    params: &BotParams,
    duration_s: f64,
    seed: u64,
) -> Result<SessionReport, BotError> {
    run_headless(config, Some(params), duration_s, seed).map(|r| r.report)
}

/// Like [`run_headless_session`] but keeps the touch and frame traces. With
/// `params = None` nobody touches and the target wanders for the whole run.
pub fn run_headless(
    config: &GameConfig,
    params: Option<&BotParams>,
    duration_s: f64,
    seed: u64,
) -> Result<HeadlessRun, BotError> {
    let mut config = config.clone();
    config.rng_seed = seed;
    let mut bot = params.map(|p| Bot::new(config.spec.clone(), p.clone()));
    let mut session = Session::new(config, duration_s)?;
    let mut touches = Vec::new();
    let mut frames = Vec::with_capacity(session.total_ticks() as usize);
    while let Some(frame) = session.begin_tick() {
        frames.push(frame);
        if let Some(bot) = bot.as_mut() {
            bot.hear(frame);
            if let Some(touch) = bot.decide(frame.t)? {
                session.submit_touch(touch)?;
                touches.push(touch);
            }
        }
        session.end_tick()?;
    }
    Ok(HeadlessRun {
        report: session.report(),
        touches,
        frames,
    })
}
