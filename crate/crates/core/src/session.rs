//! One game session, independent of how frames and touches travel.
//!
//! A session advances in fixed ticks of `1 / frame_rate`. Each tick emits the
//! current attribute frame, applies every queued touch whose timestamp has
//! been reached, then steps the simulation. Touches stamped in the future wait
//! in the queue; touches stamped in the past are applied at the current clock.
//! The same tick order drives the headless bot and the live server, so a
//! `(seed, touch trace)` pair yields the same report either way.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameConfig, GameError, TouchEvent, TouchOutcome};
use crate::mapping::Point2;
use crate::synth::SoundAttributeFrame;

// Tolerance when deciding whether a queued touch is due.
const DUE_SLACK_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("session duration must be positive and finite, got {0}")]
    BadDuration(f64),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("touch at t = {t} precedes an earlier touch at t = {previous}")]
    TimestampRegression { t: f64, previous: f64 },
    #[error("touch ({x}, {y}) lies outside the unit square")]
    TouchOutside { x: f64, y: f64 },
    #[error("touch time {0} is not finite")]
    BadTime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean: f64,
    pub max: f64,
}

/// Outcome counters of a finished (or running) session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionReport {
    pub duration_s: f64,
    pub seed: u64,
    pub touches_attempted: u32,
    pub hits: u32,
    pub misses: u32,
    pub rate_limited: u32,
    /// Distance between touch and true target over registered touches, in
    /// normalized units. `None` when nothing registered.
    pub localization_error: Option<ErrorStats>,
    pub final_speed_level: u32,
}

/// A touch as resolved by the session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TouchResult {
    pub touch: TouchEvent,
    pub outcome: TouchOutcome,
    /// Simulation time at which the touch was applied.
    pub t: f64,
    pub score: u32,
    pub speed_level: u32,
}

#[derive(Debug, Clone)]
pub struct Session {
    game: Game,
    duration_s: f64,
    total_ticks: u64,
    tick: u64,
    in_tick: bool,
    pending: VecDeque<TouchEvent>,
    last_inbound_t: Option<f64>,
    attempted: u32,
    hits: u32,
    misses: u32,
    rate_limited: u32,
    error_sum: f64,
    error_max: f64,
}

impl Session {
    pub fn new(config: GameConfig, duration_s: f64) -> Result<Self, SessionError> {
        if !(duration_s.is_finite() && duration_s > 0.0) {
            return Err(SessionError::BadDuration(duration_s));
        }
        let game = Game::new(config)?;
        let total_ticks = (duration_s * game.config().frame_rate).round().max(1.0) as u64;
        Ok(Self {
            game,
            duration_s,
            total_ticks,
            tick: 0,
            in_tick: false,
            pending: VecDeque::new(),
            last_inbound_t: None,
            attempted: 0,
            hits: 0,
            misses: 0,
            rate_limited: 0,
            error_sum: 0.0,
            error_max: 0.0,
        })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn total_ticks(&self) -> u64 {
        self.total_ticks
    }

    /// True between [`Session::begin_tick`] and [`Session::end_tick`].
    pub fn tick_open(&self) -> bool {
        self.in_tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.total_ticks
    }

    /// Opens the next tick and returns the frame to broadcast, or `None` once
    /// the session is over.
    pub fn begin_tick(&mut self) -> Option<SoundAttributeFrame> {
        if self.is_finished() {
            return None;
        }
        self.in_tick = true;
        Some(self.game.current_attribute_frame())
    }

    /// Queues an inbound touch.
    pub fn submit_touch(&mut self, touch: TouchEvent) -> Result<(), SessionError> {
        if !touch.t.is_finite() {
            return Err(SessionError::BadTime(touch.t));
        }
        let inside = |v: f64| (0.0..=1.0).contains(&v);
        if !(inside(touch.x) && inside(touch.y)) {
            return Err(SessionError::TouchOutside {
                x: touch.x,
                y: touch.y,
            });
        }
        if let Some(previous) = self.last_inbound_t {
            if touch.t < previous {
                return Err(SessionError::TimestampRegression {
                    t: touch.t,
                    previous,
                });
            }
        }
        self.last_inbound_t = Some(touch.t);
        self.pending.push_back(touch);
        Ok(())
    }

    /// Applies due touches and advances the clock by one frame period.
    pub fn end_tick(&mut self) -> Result<Vec<TouchResult>, SessionError> {
        if self.is_finished() {
            return Ok(Vec::new());
        }
        if !self.in_tick {
            self.begin_tick();
        }
        let now = self.game.state().t();
        let mut results = Vec::new();
        while self
            .pending
            .front()
            .is_some_and(|t| t.t <= now + DUE_SLACK_S)
        {
            let touch = self.pending.pop_front().expect("front checked");
            results.push(self.apply(touch, now)?);
        }
        self.game.step(self.game.config().frame_period())?;
        self.tick += 1;
        self.in_tick = false;
        Ok(results)
    }

    fn apply(&mut self, touch: TouchEvent, now: f64) -> Result<TouchResult, SessionError> {
        let target = self.game.state().target();
        let outcome = self.game.register_touch(TouchEvent { t: now, ..touch })?;
        self.attempted += 1;
        match outcome {
            TouchOutcome::Hit { .. } => self.hits += 1,
            TouchOutcome::Miss => self.misses += 1,
            TouchOutcome::RateLimited => self.rate_limited += 1,
        }
        if outcome.is_registered() {
            let err = Point2::new(touch.x, touch.y).distance(target);
            self.error_sum += err;
            self.error_max = self.error_max.max(err);
        }
        let state = self.game.state();
        Ok(TouchResult {
            touch,
            outcome,
            t: now,
            score: state.score(),
            speed_level: state.speed_level(),
        })
    }

    pub fn report(&self) -> SessionReport {
        let registered = self.hits + self.misses;
        SessionReport {
            duration_s: self.duration_s,
            seed: self.game.config().rng_seed,
            touches_attempted: self.attempted,
            hits: self.hits,
            misses: self.misses,
            rate_limited: self.rate_limited,
            localization_error: (registered > 0).then(|| ErrorStats {
                mean: self.error_sum / registered as f64,
                max: self.error_max,
            }),
            final_speed_level: self.game.state().speed_level(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(seconds: f64) -> Session {
        Session::new(GameConfig::default(), seconds).unwrap()
    }

    #[test]
    fn runs_the_expected_number_of_ticks() {
        let mut s = session(2.0);
        let mut frames = 0;
        while let Some(f) = s.begin_tick() {
            assert!((f.t - frames as f64 * 0.02).abs() < 1e-9);
            frames += 1;
            s.end_tick().unwrap();
        }
        assert_eq!(frames, 100);
        assert_eq!(s.end_tick().unwrap(), vec![]);
        let r = s.report();
        assert_eq!((r.touches_attempted, r.hits, r.localization_error), (0, 0, None));
    }

    #[test]
    fn future_touches_wait_for_the_clock() {
        let mut s = session(3.0);
        s.submit_touch(TouchEvent { x: 0.5, y: 0.5, t: 0.5 }).unwrap();
        s.submit_touch(TouchEvent { x: 0.5, y: 0.5, t: 0.9 }).unwrap();
        let mut applied = Vec::new();
        while s.begin_tick().is_some() {
            applied.extend(s.end_tick().unwrap());
        }
        assert_eq!(applied.len(), 2);
        assert!((applied[0].t - 0.5).abs() < 1e-9);
        assert!(applied[0].outcome.is_registered());
        assert_eq!(applied[1].outcome, TouchOutcome::RateLimited);
        let r = s.report();
        assert_eq!(r.touches_attempted, 2);
        assert_eq!(r.rate_limited, 1);
        assert_eq!(r.hits + r.misses, 1);
    }

    #[test]
    fn inbound_validation() {
        let mut s = session(1.0);
        s.submit_touch(TouchEvent { x: 0.1, y: 0.1, t: 0.4 }).unwrap();
        assert!(matches!(
            s.submit_touch(TouchEvent { x: 0.1, y: 0.1, t: 0.3 }),
            Err(SessionError::TimestampRegression { .. })
        ));
        assert!(matches!(
            s.submit_touch(TouchEvent { x: -0.1, y: 0.1, t: 0.5 }),
            Err(SessionError::TouchOutside { .. })
        ));
        assert!(matches!(
            s.submit_touch(TouchEvent { x: 0.1, y: 0.1, t: f64::NAN }),
            Err(SessionError::BadTime(_))
        ));
        assert!(matches!(Session::new(GameConfig::default(), 0.0), Err(SessionError::BadDuration(_))));
    }

    #[test]
    fn late_touch_is_applied_at_the_current_clock() {
        let mut s = session(1.0);
        for _ in 0..10 {
            s.begin_tick();
            s.end_tick().unwrap();
        }
        s.submit_touch(TouchEvent { x: 0.5, y: 0.5, t: 0.0 }).unwrap();
        s.begin_tick();
        let r = s.end_tick().unwrap();
        assert!((r[0].t - 0.2).abs() < 1e-9);
    }
}
