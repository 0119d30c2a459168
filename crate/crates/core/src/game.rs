//! The tablet target game.
//!
//! A single target wanders the unit square along a smooth random path and is
//! continuously sonified through a [`MappingSpec`]. The player touches where
//! they believe the target is; touches register at most once per
//! `touch_min_interval_s`, and every hit respawns the target at a random spot
//! moving faster than before.

use std::f64::consts::{PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::{normalize_angle, CoordinateFrame, FramePoint, MappingSpec, Point2};
use crate::synth::SoundAttributeFrame;
use crate::Violation;

/// Largest accepted simulation step.
pub const MAX_STEP_S: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game config: {}", crate::join_violations(.0))]
    Config(Vec<Violation>),
    #[error("step must lie in (0, {MAX_STEP_S}] s, got {0}")]
    BadStep(f64),
    #[error("touch ({x}, {y}) lies outside the unit square")]
    TouchOutside { x: f64, y: f64 },
    #[error("touch at t = {touch_t} precedes the simulation clock t = {now}")]
    TouchInPast { touch_t: f64, now: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    /// How the target position is heard. Positions are normalized tablet
    /// coordinates in the unit square.
    pub spec: MappingSpec,
    pub hit_radius: f64,
    pub base_speed: f64,
    pub speed_multiplier: f64,
    pub touch_min_interval_s: f64,
    /// Attribute frames per second.
    pub frame_rate: f64,
    /// Diffusion of the heading deviation, rad per sqrt(s).
    pub turn_noise: f64,
    /// Mean-reversion rate of the heading deviation, 1/s.
    pub turn_reversion: f64,
    pub rng_seed: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            spec: MappingSpec::tablet(),
            hit_radius: 0.05,
            base_speed: 0.05,
            speed_multiplier: 1.15,
            touch_min_interval_s: 1.0,
            frame_rate: 50.0,
            turn_noise: 0.8,
            turn_reversion: 0.5,
            rng_seed: 0,
        }
    }
}

impl GameConfig {
    pub fn frame_period(&self) -> f64 {
        1.0 / self.frame_rate
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self
            .spec
            .validate()
            .into_iter()
            .map(|v| Violation::new("spec", v.to_string()))
            .collect();
        if self.spec.frame != CoordinateFrame::GlobalCartesian {
            out.push(Violation::new("spec.frame", "the game needs a global_cartesian frame"));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.hit_radius) {
            out.push(Violation::new("hit_radius", "must be positive"));
        }
        if !positive(self.base_speed) {
            out.push(Violation::new("base_speed", "must be positive"));
        }
        if !(self.speed_multiplier.is_finite() && self.speed_multiplier > 1.0) {
            out.push(Violation::new("speed_multiplier", "must be greater than 1"));
        }
        if !positive(self.touch_min_interval_s) {
            out.push(Violation::new("touch_min_interval_s", "must be positive"));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate >= 1.0 / MAX_STEP_S) {
            out.push(Violation::new(
                "frame_rate",
                format!("must be at least {}", 1.0 / MAX_STEP_S),
            ));
        }
        if !(self.turn_noise.is_finite() && self.turn_noise >= 0.0) {
            out.push(Violation::new("turn_noise", "must be non-negative"));
        }
        if !(self.turn_reversion.is_finite() && self.turn_reversion >= 0.0) {
            out.push(Violation::new("turn_reversion", "must be non-negative"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GameError::Config(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TouchEvent {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TouchOutcome {
    Hit { points: u32 },
    Miss,
    RateLimited,
}

impl TouchOutcome {
    pub fn is_registered(&self) -> bool {
        !matches!(self, Self::RateLimited)
    }
}

/// Full simulation state.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    t: f64,
    target: Point2,
    // Heading = reference + deviation; the deviation is the mean-reverting part.
    heading_ref: f64,
    heading_dev: f64,
    speed: f64,
    speed_level: u32,
    score: u32,
    last_registered_touch_t: Option<f64>,
    rng: ChaCha8Rng,
}

impl GameState {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn target(&self) -> Point2 {
        self.target
    }

    pub fn heading(&self) -> f64 {
        normalize_angle(self.heading_ref + self.heading_dev)
    }

    /// `base_speed * speed_multiplier ^ speed_level`.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn velocity(&self) -> Point2 {
        let (s, c) = (self.heading_ref + self.heading_dev).sin_cos();
        Point2::new(self.speed * c, self.speed * s)
    }

    pub fn speed_level(&self) -> u32 {
        self.speed_level
    }

    pub fn score(&self) -> u32 {
        self.score
    }

    pub fn last_registered_touch_t(&self) -> Option<f64> {
        self.last_registered_touch_t
    }
}

/// A game: configuration plus its single-writer state.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    config: GameConfig,
    state: GameState,
}

/// Starts a game from `config.rng_seed`.
pub fn new_game(config: GameConfig) -> Result<Game, GameError> {
    Game::new(config)
}

impl Game {
    pub fn new(config: GameConfig) -> Result<Self, GameError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let (target, heading) = spawn(&mut rng);
        let state = GameState {
            t: 0.0,
            target,
            heading_ref: heading,
            heading_dev: 0.0,
            speed: config.base_speed,
            speed_level: 0,
            score: 0,
            last_registered_touch_t: None,
            rng,
        };
        Ok(Self { config, state })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    /// Advances the simulation by `dt` seconds.
    pub fn step(&mut self, dt: f64) -> Result<(), GameError> {
        if !(dt > 0.0 && dt <= MAX_STEP_S) {
            return Err(GameError::BadStep(dt));
        }
        let cfg = &self.config;
        let s = &mut self.state;

        // Exact Ornstein-Uhlenbeck update of the heading deviation.
        let noise: f64 = s.rng.sample(StandardNormal);
        let theta = cfg.turn_reversion;
        let (decay, spread) = if theta > 0.0 {
            let decay = (-theta * dt).exp();
            (decay, ((1.0 - decay * decay) / (2.0 * theta)).sqrt())
        } else {
            (1.0, dt.sqrt())
        };
        s.heading_dev = s.heading_dev * decay + cfg.turn_noise * spread * noise;

        let (sin, cos) = (s.heading_ref + s.heading_dev).sin_cos();
        let (x, flip_x) = fold_unit(s.target.x + s.speed * cos * dt);
        let (y, flip_y) = fold_unit(s.target.y + s.speed * sin * dt);
        s.target = Point2::new(x, y);
        if flip_x {
            s.heading_ref = PI - s.heading_ref;
            s.heading_dev = -s.heading_dev;
        }
        if flip_y {
            s.heading_ref = -s.heading_ref;
            s.heading_dev = -s.heading_dev;
        }
        s.heading_ref = normalize_angle(s.heading_ref);
        s.t += dt;
        Ok(())
    }

    /// The target as currently heard.
    pub fn current_attribute_frame(&self) -> SoundAttributeFrame {
        self.config
            .spec
            .to_attributes(FramePoint::Cartesian(self.state.target), self.state.t)
            .expect("game config holds a validated global Cartesian spec")
            .frame
    }

    /// Applies a touch at the current simulation time.
    ///
    /// A touch less than `touch_min_interval_s` after the last registered one
    /// is rate limited and leaves the state untouched. Any other touch
    /// registers, hit or miss.
    pub fn register_touch(&mut self, touch: TouchEvent) -> Result<TouchOutcome, GameError> {
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if !(inside(touch.x) && inside(touch.y)) {
            return Err(GameError::TouchOutside {
                x: touch.x,
                y: touch.y,
            });
        }
        let s = &mut self.state;
        if !(touch.t.is_finite() && touch.t >= s.t - 1e-9) {
            return Err(GameError::TouchInPast {
                touch_t: touch.t,
                now: s.t,
            });
        }
        let now = s.t;
        if let Some(last) = s.last_registered_touch_t {
            if now - last < self.config.touch_min_interval_s {
                return Ok(TouchOutcome::RateLimited);
            }
        }
        s.last_registered_touch_t = Some(now);
        if Point2::new(touch.x, touch.y).distance(s.target) > self.config.hit_radius {
            return Ok(TouchOutcome::Miss);
        }
        s.score += 1;
        s.speed_level += 1;
        s.speed = self.config.base_speed * self.config.speed_multiplier.powi(s.speed_level as i32);
        let (target, heading) = spawn(&mut s.rng);
        s.target = target;
        s.heading_ref = heading;
        s.heading_dev = 0.0;
        Ok(TouchOutcome::Hit { points: 1 })
    }
}

fn spawn(rng: &mut ChaCha8Rng) -> (Point2, f64) {
    let x: f64 = rng.random();
    let y: f64 = rng.random();
    let heading = normalize_angle(rng.random::<f64>() * TAU - PI);
    (Point2::new(x, y), heading)
}

// Reflects a coordinate back into [0, 1]; reports whether the direction flipped.
fn fold_unit(v: f64) -> (f64, bool) {
    if (0.0..=1.0).contains(&v) {
        return (v, false);
    }
    let m = v.rem_euclid(2.0);
    let folded = if m <= 1.0 { m } else { 2.0 - m };
    (folded, v.floor().rem_euclid(2.0) == 1.0)
}
