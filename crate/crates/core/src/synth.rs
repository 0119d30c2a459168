//! Attribute-driven additive synthesis.
//!
//! A [`SoundAttributeFrame`] sequence is rendered sample by sample: each
//! attribute is linearly interpolated between frames, passed through a
//! one-pole smoother, and drives a phase-accumulator harmonic stack whose
//! amplitudes come from [`timbre_spectrum`] and whose spectral envelope comes
//! from the two vowel formants returned by [`waveshape_spectrum`].

use std::f64::consts::{FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Violation;

/// Vowel /u/ ("ooh") formant centers in Hz.
pub const OOH_FORMANTS_HZ: (f64, f64) = (350.0, 800.0);
/// Vowel /a/ ("aah") formant centers in Hz.
pub const AAH_FORMANTS_HZ: (f64, f64) = (850.0, 1200.0);
/// Fixed formant bandwidths in Hz.
pub const FORMANT_BANDWIDTHS_HZ: (f64, f64) = (80.0, 120.0);

// Envelope gain far away from both formants.
const ENVELOPE_FLOOR: f64 = 0.25;
const SECOND_FORMANT_WEIGHT: f64 = 0.7;
// Harmonics fade out linearly from this fraction of the cutoff up to the cutoff.
const TAPER_START: f64 = 0.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("{what} = {value} is outside {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("frame sequence is empty")]
    EmptySequence,
    #[error("frame {index} at t = {t} does not come strictly after the previous frame")]
    Unordered { index: usize, t: f64 },
    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<SynthError>,
    },
    #[error("invalid synth config: {}", crate::join_violations(.0))]
    Config(Vec<Violation>),
    #[error("expected a {expected} buffer, got {channels} channel(s)")]
    Channels { expected: &'static str, channels: u16 },
    #[error("invalid PCM buffer: {0}")]
    Buffer(String),
}

/// One instant of the five sound attributes driving synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoundAttributeFrame {
    /// Seconds since session start.
    pub t: f64,
    pub pitch_hz: f64,
    /// Linear gain in `[0, 1]`.
    pub amplitude: f64,
    /// `0` is thin/pure, `1` is thick/brassy.
    pub timbre: f64,
    /// `0` is "ooh", `1` is "aah".
    pub waveshape: f64,
    /// `-1` is full left. Absent for monaural output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pan: Option<f64>,
}

impl SoundAttributeFrame {
    /// Range checks that do not depend on a [`SynthConfig`].
    pub fn check_ranges(&self) -> Result<(), SynthError> {
        check_finite_nonneg("t", self.t)?;
        if !(self.pitch_hz.is_finite() && self.pitch_hz > 0.0) {
            return Err(SynthError::Domain {
                what: "pitch_hz",
                value: self.pitch_hz,
                range: "(0, inf)",
            });
        }
        check_unit("amplitude", self.amplitude)?;
        check_unit("timbre", self.timbre)?;
        check_unit("waveshape", self.waveshape)?;
        if let Some(pan) = self.pan {
            check_pan(pan)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub sample_rate: u32,
    pub channels: u16,
    pub pitch_floor_hz: f64,
    pub pitch_ceil_hz: f64,
    pub max_harmonics: usize,
    /// One-pole smoothing time constant for every attribute path.
    pub ramp_ms: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sample_rate: 48_000,
            channels: 1,
            pitch_floor_hz: 110.0,
            pitch_ceil_hz: 3520.0,
            max_harmonics: 16,
            ramp_ms: 10.0,
        }
    }
}

impl SynthConfig {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.sample_rate < 8000 {
            out.push(Violation::new("sample_rate", "must be at least 8000"));
        }
        if !matches!(self.channels, 1 | 2) {
            out.push(Violation::new("channels", "must be 1 or 2"));
        }
        if !(self.pitch_floor_hz.is_finite() && self.pitch_floor_hz > 0.0) {
            out.push(Violation::new("pitch_floor_hz", "must be positive"));
        }
        if !(self.pitch_ceil_hz.is_finite() && self.pitch_floor_hz < self.pitch_ceil_hz) {
            out.push(Violation::new(
                "pitch_ceil_hz",
                "must be greater than pitch_floor_hz",
            ));
        }
        if self.max_harmonics == 0 {
            out.push(Violation::new("max_harmonics", "must be at least 1"));
        }
        if !(self.ramp_ms.is_finite() && self.ramp_ms >= 0.0) {
            out.push(Violation::new("ramp_ms", "must be a non-negative number"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SynthError::Config(v))
        }
    }
}

/// Floating-point PCM, interleaved when stereo.
#[derive(Debug, Clone, PartialEq)]
pub struct PcmBuffer {
    samples: Vec<f32>,
    sample_rate: u32,
    channels: u16,
}

impl PcmBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32, channels: u16) -> Result<Self, SynthError> {
        if channels == 0 {
            return Err(SynthError::Buffer("channel count must be positive".into()));
        }
        if sample_rate == 0 {
            return Err(SynthError::Buffer("sample rate must be positive".into()));
        }
        if !samples.len().is_multiple_of(channels as usize) {
            return Err(SynthError::Buffer(format!(
                "{} samples is not a multiple of {channels} channels",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(SynthError::Buffer(format!(
                "sample {i} = {} exceeds unit magnitude",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            channels,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    /// Number of sample frames (samples per channel).
    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    pub fn duration_s(&self) -> f64 {
        self.frames() as f64 / self.sample_rate as f64
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// De-interleaved copy of one channel.
    pub fn channel(&self, index: usize) -> Vec<f32> {
        self.samples
            .iter()
            .skip(index)
            .step_by(self.channels as usize)
            .copied()
            .collect()
    }

    /// Copies a mono buffer into both channels of a stereo buffer.
    pub fn to_stereo(&self) -> Result<Self, SynthError> {
        apply_gains(self, 1.0, 1.0)
    }
}

/// Harmonic amplitudes `a_1..a_K` for a timbre value, normalized to unit energy.
///
/// The fundamental carries weight `1`, harmonic `k >= 2` carries
/// `timbre * k^-(4 - 3 timbre)`: timbre `0` is a pure sine and timbre `1`
/// has the `1/k` sawtooth-like rolloff.
pub fn timbre_spectrum(timbre: f64, max_harmonics: usize) -> Result<Vec<f64>, SynthError> {
    check_unit("timbre", timbre)?;
    if max_harmonics == 0 {
        return Err(SynthError::Domain {
            what: "max_harmonics",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut amps = vec![0.0; max_harmonics];
    fill_timbre(timbre, &mut amps);
    Ok(amps)
}

fn fill_timbre(timbre: f64, amps: &mut [f64]) {
    let exponent = 4.0 - 3.0 * timbre;
    let mut energy = 0.0;
    for (i, a) in amps.iter_mut().enumerate() {
        let k = (i + 1) as f64;
        *a = if i == 0 { 1.0 } else { timbre * k.powf(-exponent) };
        energy += *a * *a;
    }
    let norm = energy.sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
}

/// Two-formant spectral envelope for one waveshape value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormantPair {
    pub f1_hz: f64,
    pub f2_hz: f64,
    pub bw1_hz: f64,
    pub bw2_hz: f64,
}

impl FormantPair {
    /// Envelope gain at `freq_hz`; resonance peaks sit on a constant floor.
    pub fn gain(&self, freq_hz: f64) -> f64 {
        ENVELOPE_FLOOR
            + resonance(freq_hz, self.f1_hz, self.bw1_hz)
            + SECOND_FORMANT_WEIGHT * resonance(freq_hz, self.f2_hz, self.bw2_hz)
    }
}

fn resonance(freq: f64, center: f64, bandwidth: f64) -> f64 {
    let x = (freq - center) / (0.5 * bandwidth);
    1.0 / (1.0 + x * x).sqrt()
}

/// Linear interpolation between the "ooh" and "aah" formant pairs.
pub fn waveshape_spectrum(waveshape: f64) -> Result<FormantPair, SynthError> {
    check_unit("waveshape", waveshape)?;
    Ok(formants_unchecked(waveshape))
}

fn formants_unchecked(w: f64) -> FormantPair {
    FormantPair {
        f1_hz: lerp(OOH_FORMANTS_HZ.0, AAH_FORMANTS_HZ.0, w),
        f2_hz: lerp(OOH_FORMANTS_HZ.1, AAH_FORMANTS_HZ.1, w),
        bw1_hz: FORMANT_BANDWIDTHS_HZ.0,
        bw2_hz: FORMANT_BANDWIDTHS_HZ.1,
    }
}

/// Renders `[first.t, last.t]` of the frame sequence.
pub fn render(frames: &[SoundAttributeFrame], config: &SynthConfig) -> Result<PcmBuffer, SynthError> {
    let span = match (frames.first(), frames.last()) {
        (Some(first), Some(last)) => last.t - first.t,
        _ => return Err(SynthError::EmptySequence),
    };
    render_for(frames, config, span)
}

/// Renders `duration_s` seconds starting at the first frame; the last frame
/// is held if the duration runs past it.
pub fn render_for(
    frames: &[SoundAttributeFrame],
    config: &SynthConfig,
    duration_s: f64,
) -> Result<PcmBuffer, SynthError> {
    config.validate()?;
    check_frames(frames, config)?;
    check_finite_nonneg("duration_s", duration_s)?;

    let fs = config.sample_rate as f64;
    let n = (duration_s * fs).round() as usize;
    let channels = config.channels as usize;
    let mut out = Vec::with_capacity(n * channels);

    let mut voice = Voice::new(config, &frames[0]);
    let mut cursor = 0;
    let t0 = frames[0].t;
    for i in 0..n {
        let t = t0 + i as f64 / fs;
        while cursor + 1 < frames.len() && frames[cursor + 1].t <= t {
            cursor += 1;
        }
        let target = interpolate(frames, cursor, t);
        let sample = voice.tick(&target);
        if channels == 1 {
            out.push(sample as f32);
        } else {
            let (l, r) = pan_gains(voice.pan);
            out.push((sample * l) as f32);
            out.push((sample * r) as f32);
        }
    }
    PcmBuffer::new(out, config.sample_rate, config.channels)
}

/// Constant-power stereo placement of a mono buffer.
pub fn apply_pan(mono: &PcmBuffer, pan: f64) -> Result<PcmBuffer, SynthError> {
    check_pan(pan)?;
    let (l, r) = pan_gains(pan);
    apply_gains(mono, l, r)
}

/// `(left, right)` gains with `left^2 + right^2 = 1`.
pub fn pan_gains(pan: f64) -> (f64, f64) {
    let angle = (pan + 1.0) * FRAC_PI_4;
    (angle.cos(), angle.sin())
}

fn apply_gains(mono: &PcmBuffer, left: f64, right: f64) -> Result<PcmBuffer, SynthError> {
    if mono.channels != 1 {
        return Err(SynthError::Channels {
            expected: "mono",
            channels: mono.channels,
        });
    }
    let samples = mono
        .samples
        .iter()
        .flat_map(|&s| [(s as f64 * left) as f32, (s as f64 * right) as f32])
        .collect();
    PcmBuffer::new(samples, mono.sample_rate, 2)
}

fn check_frames(frames: &[SoundAttributeFrame], config: &SynthConfig) -> Result<(), SynthError> {
    if frames.is_empty() {
        return Err(SynthError::EmptySequence);
    }
    for (index, f) in frames.iter().enumerate() {
        let wrap = |e: SynthError| SynthError::Frame {
            index,
            source: Box::new(e),
        };
        f.check_ranges().map_err(wrap)?;
        if f.pitch_hz < config.pitch_floor_hz || f.pitch_hz > config.pitch_ceil_hz {
            return Err(wrap(SynthError::Domain {
                what: "pitch_hz",
                value: f.pitch_hz,
                range: "[pitch_floor_hz, pitch_ceil_hz]",
            }));
        }
        if index > 0 && f.t <= frames[index - 1].t {
            return Err(SynthError::Unordered { index, t: f.t });
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
struct Params {
    pitch: f64,
    amplitude: f64,
    timbre: f64,
    waveshape: f64,
    pan: f64,
}

impl Params {
    fn of(f: &SoundAttributeFrame) -> Self {
        Self {
            pitch: f.pitch_hz,
            amplitude: f.amplitude,
            timbre: f.timbre,
            waveshape: f.waveshape,
            pan: f.pan.unwrap_or(0.0),
        }
    }
}

fn interpolate(frames: &[SoundAttributeFrame], cursor: usize, t: f64) -> Params {
    let a = Params::of(&frames[cursor]);
    let Some(next) = frames.get(cursor + 1) else {
        return a;
    };
    let b = Params::of(next);
    let u = ((t - frames[cursor].t) / (next.t - frames[cursor].t)).clamp(0.0, 1.0);
    Params {
        pitch: lerp(a.pitch, b.pitch, u),
        amplitude: lerp(a.amplitude, b.amplitude, u),
        timbre: lerp(a.timbre, b.timbre, u),
        waveshape: lerp(a.waveshape, b.waveshape, u),
        pan: lerp(a.pan, b.pan, u),
    }
}

struct Voice {
    sample_rate: f64,
    cutoff_hz: f64,
    coeff: f64,
    pitch: f64,
    amplitude: f64,
    timbre: f64,
    waveshape: f64,
    pan: f64,
    phase: f64,
    amps: Vec<f64>,
}

impl Voice {
    fn new(config: &SynthConfig, first: &SoundAttributeFrame) -> Self {
        let fs = config.sample_rate as f64;
        let tau = config.ramp_ms / 1000.0;
        let coeff = if tau > 0.0 {
            1.0 - (-1.0 / (tau * fs)).exp()
        } else {
            1.0
        };
        let p = Params::of(first);
        Self {
            sample_rate: fs,
            cutoff_hz: fs / 4.0,
            coeff,
            pitch: p.pitch,
            amplitude: p.amplitude,
            timbre: p.timbre,
            waveshape: p.waveshape,
            pan: p.pan,
            phase: 0.0,
            amps: vec![0.0; config.max_harmonics],
        }
    }

    fn tick(&mut self, target: &Params) -> f64 {
        let c = self.coeff;
        self.pitch += c * (target.pitch - self.pitch);
        self.amplitude += c * (target.amplitude - self.amplitude);
        self.timbre += c * (target.timbre - self.timbre);
        self.waveshape += c * (target.waveshape - self.waveshape);
        self.pan += c * (target.pan - self.pan);

        fill_timbre(self.timbre, &mut self.amps);
        let formants = formants_unchecked(self.waveshape);

        // sin(k*phase) by the Chebyshev recurrence.
        let (s1, c1) = self.phase.sin_cos();
        let two_cos = 2.0 * c1;
        let (mut prev, mut cur) = (0.0, s1);
        let mut acc = 0.0;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let freq = (i + 1) as f64 * self.pitch;
            let w = a * formants.gain(freq) * self.taper(freq);
            if w == 0.0 && freq >= self.cutoff_hz {
                break;
            }
            acc += w * cur;
            norm += w;
            let next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }
        let out = if norm > 0.0 {
            self.amplitude * acc / norm
        } else {
            0.0
        };

        self.phase += TAU * self.pitch / self.sample_rate;
        if self.phase >= TAU {
            self.phase -= TAU;
        }
        out.clamp(-1.0, 1.0)
    }

    fn taper(&self, freq: f64) -> f64 {
        let start = TAPER_START * self.cutoff_hz;
        if freq <= start {
            1.0
        } else if freq >= self.cutoff_hz {
            0.0
        } else {
            (self.cutoff_hz - freq) / (self.cutoff_hz - start)
        }
    }
}

fn lerp(a: f64, b: f64, u: f64) -> f64 {
    a + (b - a) * u
}

fn check_unit(what: &'static str, value: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SynthError::Domain {
            what,
            value,
            range: "[0, 1]",
        })
    }
}

fn check_pan(pan: f64) -> Result<(), SynthError> {
    if (-1.0..=1.0).contains(&pan) {
        Ok(())
    } else {
        Err(SynthError::Domain {
            what: "pan",
            value: pan,
            range: "[-1, 1]",
        })
    }
}

fn check_finite_nonneg(what: &'static str, value: f64) -> Result<(), SynthError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(SynthError::Domain {
            what,
            value,
            range: "[0, inf)",
        })
    }
}
