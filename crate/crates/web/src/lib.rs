//! Browser bindings: a live tablet game, tone audition and strip images.
//!
//! Everything crosses the boundary as numbers, strings and typed arrays; the
//! page in `www/` does the drawing and the Web Audio plumbing.

use thiserror::Error;
use wasm_bindgen::prelude::*;

use sonoplane_core::game::{GameConfig, TouchEvent, TouchOutcome};
use sonoplane_core::session::{Session, SessionError};
use sonoplane_core::strips::{analyze, render_strip_image, AnalyzerConfig, Side, StripError};
use sonoplane_core::synth::{render_for, timbre_spectrum, waveshape_spectrum, SynthError};
use sonoplane_core::{PcmBuffer, SoundAttributeFrame, SynthConfig};

/// One tablet game session stepped by the page's timer.
#[wasm_bindgen]
pub struct Demo {
    session: Session,
    frame: Option<SoundAttributeFrame>,
    outcome: String,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64, seconds: f64) -> Result<Demo, JsError> {
        Ok(Self::start(seed, seconds)?)
    }

    /// Milliseconds between frames.
    pub fn frame_period_ms(&self) -> f64 {
        1000.0 / self.session.game().config().frame_rate
    }

    /// Closes the open frame and opens the next; `false` once the session is over.
    pub fn advance(&mut self) -> Result<bool, JsError> {
        Ok(self.step()?)
    }

    /// Touches `(x, y)` in unit-square coordinates, y up, at the current frame.
    pub fn touch(&mut self, x: f64, y: f64) -> Result<(), JsError> {
        Ok(self.submit(x, y)?)
    }

    /// `hit`, `miss`, `rate_limited`, or empty when no touch resolved last frame.
    pub fn last_outcome(&self) -> String {
        self.outcome.clone()
    }

    /// `[t, pitch_hz, amplitude, timbre, waveshape]` of the current frame.
    pub fn frame(&self) -> Vec<f64> {
        self.frame
            .map(|f| vec![f.t, f.pitch_hz, f.amplitude, f.timbre, f.waveshape])
            .unwrap_or_default()
    }

    pub fn score(&self) -> u32 {
        self.session.game().state().score()
    }

    pub fn speed_level(&self) -> u32 {
        self.session.game().state().speed_level()
    }

    /// True target position, for the reveal toggle.
    pub fn target(&self) -> Vec<f64> {
        let p = self.session.game().state().target();
        vec![p.x, p.y]
    }

    pub fn finished(&self) -> bool {
        self.session.is_finished()
    }
}

impl Demo {
    pub fn start(seed: u64, seconds: f64) -> Result<Self, SessionError> {
        let config = GameConfig {
            rng_seed: seed,
            ..GameConfig::default()
        };
        Ok(Self {
            session: Session::new(config, seconds)?,
            frame: None,
            outcome: String::new(),
        })
    }

    pub fn step(&mut self) -> Result<bool, SessionError> {
        self.outcome.clear();
        if self.session.tick_open() {
            if let Some(last) = self.session.end_tick()?.last() {
                self.outcome = match last.outcome {
                    TouchOutcome::Hit { .. } => "hit",
                    TouchOutcome::Miss => "miss",
                    TouchOutcome::RateLimited => "rate_limited",
                }
                .to_string();
            }
        }
        self.frame = self.session.begin_tick();
        Ok(self.frame.is_some())
    }

    pub fn submit(&mut self, x: f64, y: f64) -> Result<(), SessionError> {
        let t = self.session.game().state().t();
        self.session.submit_touch(TouchEvent { x, y, t })
    }
}

/// Relative weights of the first `count` partials, scaled to sum to one, for
/// a periodic oscillator.
pub fn partials(pitch_hz: f64, timbre: f64, waveshape: f64, count: usize) -> Result<Vec<f64>, SynthError> {
    let formants = waveshape_spectrum(waveshape)?;
    let mut w: Vec<f64> = timbre_spectrum(timbre, count)?
        .iter()
        .enumerate()
        .map(|(i, a)| a * formants.gain((i + 1) as f64 * pitch_hz))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

#[wasm_bindgen]
pub fn partial_weights(pitch_hz: f64, timbre: f64, waveshape: f64, count: usize) -> Result<Vec<f32>, JsError> {
    Ok(partials(pitch_hz, timbre, waveshape, count)?
        .into_iter()
        .map(|w| w as f32)
        .collect())
}

pub fn tone(
    pitch_hz: f64,
    amplitude: f64,
    timbre: f64,
    waveshape: f64,
    seconds: f64,
) -> Result<PcmBuffer, SynthError> {
    let frame = SoundAttributeFrame {
        t: 0.0,
        pitch_hz,
        amplitude,
        timbre,
        waveshape,
        pan: None,
    };
    render_for(&[frame], &SynthConfig::default(), seconds)
}

/// Mono samples at [`tone_sample_rate`] Hz.
#[wasm_bindgen]
pub fn render_tone(
    pitch_hz: f64,
    amplitude: f64,
    timbre: f64,
    waveshape: f64,
    seconds: f64,
) -> Result<Vec<f32>, JsError> {
    Ok(tone(pitch_hz, amplitude, timbre, waveshape, seconds)?.into_samples())
}

#[wasm_bindgen]
pub fn tone_sample_rate() -> u32 {
    SynthConfig::default().sample_rate
}

/// Grayscale strip, one column per analysis frame, highest band on top.
#[wasm_bindgen]
pub struct StripImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

#[wasm_bindgen]
impl StripImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> Vec<u8> {
        self.pixels.clone()
    }
}

#[derive(Debug, Error)]
pub enum StripImageError {
    #[error(transparent)]
    Audio(#[from] SynthError),
    #[error(transparent)]
    Analysis(#[from] StripError),
}

/// Strip of mono audio heard in both ears.
pub fn strip_of(samples: &[f32], sample_rate: u32) -> Result<StripImage, StripImageError> {
    let stereo = PcmBuffer::new(samples.to_vec(), sample_rate, 1)?.to_stereo()?;
    let frames = analyze(&stereo, &AnalyzerConfig::default())?;
    let raster = render_strip_image(&frames, Side::Left);
    Ok(StripImage {
        width: raster.width,
        height: raster.height,
        pixels: raster.pixels,
    })
}

#[wasm_bindgen]
pub fn strip_image(samples: &[f32], sample_rate: u32) -> Result<StripImage, JsError> {
    Ok(strip_of(samples, sample_rate)?)
}
