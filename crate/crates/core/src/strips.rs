//! Stereo audio as two vertical visual strips.
//!
//! Each channel is cut into Hann-windowed frames at the strip frame rate,
//! transformed, and pooled into log-spaced bands. Band magnitude is mapped to
//! dB relative to a full-scale sine and then to `[0, 1]` between `floor_db`
//! and 0 dBFS.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::{Attribute, MappingSpec};
use crate::synth::PcmBuffer;
use crate::Violation;

/// Spectrum oversampling applied by zero-padding each window.
pub const ZERO_PAD: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StripError {
    #[error("invalid analyzer config: {}", crate::join_violations(.0))]
    Config(Vec<Violation>),
    #[error("analysis needs stereo input, got {0} channel(s)")]
    NotStereo(u16),
    #[error("empty audio buffer")]
    Empty,
    #[error("band regions overlap")]
    OverlappingRegions,
    #[error("band region [{lo_hz}, {hi_hz}] Hz holds no band center")]
    EmptyRegion { lo_hz: f64, hi_hz: f64 },
    #[error("strip frames disagree on band count")]
    Ragged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzerConfig {
    pub bands: usize,
    pub min_hz: f64,
    pub max_hz: f64,
    pub frame_rate: f64,
    /// Samples per analysis window; `None` rounds `sample_rate / frame_rate`
    /// up to a power of two.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    pub floor_db: f64,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self {
            bands: 64,
            min_hz: 100.0,
            max_hz: 8000.0,
            frame_rate: 30.0,
            window: None,
            floor_db: -60.0,
        }
    }
}

impl AnalyzerConfig {
    /// Rules that hold regardless of sample rate.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.bands < 8 {
            v.push(Violation::new("bands", format!("must be at least 8, got {}", self.bands)));
        }
        if !(self.min_hz.is_finite() && self.min_hz > 0.0) {
            v.push(Violation::new("min_hz", format!("must be positive, got {}", self.min_hz)));
        }
        if !(self.max_hz.is_finite() && self.max_hz > self.min_hz) {
            v.push(Violation::new("max_hz", format!("must exceed min_hz, got {}", self.max_hz)));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            v.push(Violation::new(
                "frame_rate",
                format!("must be positive, got {}", self.frame_rate),
            ));
        }
        if let Some(w) = self.window {
            if w < 16 {
                v.push(Violation::new("window", format!("must be at least 16 samples, got {w}")));
            }
        }
        if !(self.floor_db.is_finite() && self.floor_db < 0.0) {
            v.push(Violation::new(
                "floor_db",
                format!("must be negative, got {}", self.floor_db),
            ));
        }
        v
    }

    /// All rules, including the Nyquist limit at `sample_rate`.
    pub fn violations_at(&self, sample_rate: u32) -> Vec<Violation> {
        let mut v = self.violations();
        let nyquist = f64::from(sample_rate) / 2.0;
        if self.max_hz.is_finite() && self.max_hz * self.band_ratio().sqrt() > nyquist {
            v.push(Violation::new(
                "max_hz",
                format!("top band edge exceeds Nyquist ({nyquist} Hz)"),
            ));
        }
        if self.frame_rate.is_finite() && self.frame_rate > f64::from(sample_rate) {
            v.push(Violation::new("frame_rate", "exceeds the sample rate"));
        }
        v
    }

    pub fn validate(&self) -> Result<(), StripError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(StripError::Config(v))
        }
    }

    pub fn window_len(&self, sample_rate: u32) -> usize {
        self.window.unwrap_or_else(|| {
            ((f64::from(sample_rate) / self.frame_rate).ceil() as usize).next_power_of_two()
        })
    }

    pub fn hop(&self, sample_rate: u32) -> f64 {
        f64::from(sample_rate) / self.frame_rate
    }

    fn band_ratio(&self) -> f64 {
        (self.max_hz / self.min_hz).powf(1.0 / (self.bands.max(2) - 1) as f64)
    }

    /// Log-spaced band centers from `min_hz` to `max_hz`.
    pub fn band_centers(&self) -> Vec<f64> {
        let ratio = self.band_ratio();
        (0..self.bands)
            .map(|i| self.min_hz * ratio.powi(i as i32))
            .collect()
    }

    /// `bands + 1` edges at geometric midpoints between centers.
    pub fn band_edges(&self) -> Vec<f64> {
        let half = self.band_ratio().sqrt();
        let centers = self.band_centers();
        let mut edges: Vec<f64> = centers.iter().map(|c| c / half).collect();
        edges.push(centers[centers.len() - 1] * half);
        edges
    }

    /// Index of the band whose edges enclose `hz`.
    pub fn band_of(&self, hz: f64) -> Option<usize> {
        let edges = self.band_edges();
        edges.windows(2).position(|e| hz >= e[0] && hz < e[1])
    }

    fn intensity(&self, magnitude_fs: f64) -> f64 {
        if magnitude_fs <= 0.0 {
            return 0.0;
        }
        let db = 20.0 * magnitude_fs.log10();
        ((db - self.floor_db) / -self.floor_db).clamp(0.0, 1.0)
    }

    /// Linear power relative to full scale; zero at or below the floor.
    pub fn power_of(&self, intensity: f64) -> f64 {
        if intensity <= 0.0 {
            0.0
        } else {
            10f64.powf((intensity - 1.0) * -self.floor_db / 10.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripFrame {
    /// Window center, seconds.
    pub t: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Band intensities of a whole stereo buffer.
pub fn analyze(stereo: &PcmBuffer, config: &AnalyzerConfig) -> Result<Vec<StripFrame>, StripError> {
    if stereo.channels() != 2 {
        return Err(StripError::NotStereo(stereo.channels()));
    }
    if stereo.is_empty() {
        return Err(StripError::Empty);
    }
    let fs = stereo.sample_rate();
    let v = config.violations_at(fs);
    if !v.is_empty() {
        return Err(StripError::Config(v));
    }
    let left = stereo.channel(0);
    let right = stereo.channel(1);
    let mut analyzer = ChannelAnalyzer::new(config, fs);

    let n = analyzer.window.len();
    let hop = config.hop(fs);
    let len = left.len();
    let count = if len < n {
        1
    } else {
        let mut k = 0;
        while ((k as f64 * hop).round() as usize) + n <= len {
            k += 1;
        }
        k
    };
    Ok((0..count)
        .map(|k| {
            let start = (k as f64 * hop).round() as usize;
            StripFrame {
                t: (start as f64 + n as f64 / 2.0) / f64::from(fs),
                left: analyzer.bands(&left, start),
                right: analyzer.bands(&right, start),
            }
        })
        .collect())
}

struct ChannelAnalyzer<'a> {
    config: &'a AnalyzerConfig,
    window: Vec<f64>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buffer: Vec<Complex<f64>>,
    /// Inclusive-exclusive bin span per band; empty spans fall back to
    /// interpolation at the center.
    spans: Vec<(usize, usize)>,
    centers_bin: Vec<f64>,
    scale: f64,
}

impl<'a> ChannelAnalyzer<'a> {
    fn new(config: &'a AnalyzerConfig, fs: u32) -> Self {
        let n = config.window_len(fs);
        let padded = n * ZERO_PAD;
        let window = (0..n)
            .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
            .collect();
        let bin_hz = f64::from(fs) / padded as f64;
        let edges = config.band_edges();
        let spans = edges
            .windows(2)
            .map(|e| {
                let lo = (e[0] / bin_hz).ceil() as usize;
                let hi = ((e[1] / bin_hz).ceil() as usize).min(padded / 2 + 1);
                (lo, hi.max(lo))
            })
            .collect();
        let centers_bin = config.band_centers().iter().map(|c| c / bin_hz).collect();
        Self {
            config,
            window,
            fft: FftPlanner::new().plan_fft_forward(padded),
            buffer: vec![Complex::default(); padded],
            spans,
            centers_bin,
            scale: n as f64 / 4.0,
        }
    }

    fn bands(&mut self, samples: &[f32], start: usize) -> Vec<f64> {
        self.buffer.fill(Complex::default());
        for (i, w) in self.window.iter().enumerate() {
            let s = samples.get(start + i).copied().unwrap_or(0.0);
            self.buffer[i] = Complex::new(f64::from(s) * w, 0.0);
        }
        self.fft.process(&mut self.buffer);
        let mag = |k: usize| self.buffer[k].norm() / self.scale;
        self.spans
            .iter()
            .zip(&self.centers_bin)
            .map(|(&(lo, hi), &c)| {
                let m = if hi > lo {
                    (lo..hi).map(mag).fold(0.0, f64::max)
                } else {
                    let k = c.floor() as usize;
                    let frac = c - k as f64;
                    mag(k) * (1.0 - frac) + mag(k + 1) * frac
                };
                self.config.intensity(m)
            })
            .collect()
    }
}

/// Hypothesized frequency span of one source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRegion {
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl BandRegion {
    pub fn new(lo_hz: f64, hi_hz: f64) -> Self {
        Self { lo_hz, hi_hz }
    }

    /// `center / spread ..= center * spread`.
    pub fn around(center_hz: f64, spread: f64) -> Self {
        Self::new(center_hz / spread, center_hz * spread)
    }

    fn bands(&self, config: &AnalyzerConfig) -> Vec<usize> {
        config
            .band_centers()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= self.lo_hz && c <= self.hi_hz)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Contrast between the peaks of two regions and the dip between them, in
/// `[0, 1]`.
///
/// Band power is averaged over time and summed over both channels. With `P_a`
/// and `P_b` the strongest band of each region and `P_v` the weakest band
/// from one peak to the other, the score is
/// `(P_a + P_b - 2 P_v) / (P_a + P_b + 2 P_v)`. Silence scores 0.
pub fn separability(
    frames: &[StripFrame],
    a: BandRegion,
    b: BandRegion,
    config: &AnalyzerConfig,
) -> Result<f64, StripError> {
    config.validate()?;
    let (a, b) = if a.lo_hz <= b.lo_hz { (a, b) } else { (b, a) };
    if a.hi_hz >= b.lo_hz {
        return Err(StripError::OverlappingRegions);
    }
    let bands_a = a.bands(config);
    let bands_b = b.bands(config);
    for (r, bands) in [(a, &bands_a), (b, &bands_b)] {
        if bands.is_empty() {
            return Err(StripError::EmptyRegion {
                lo_hz: r.lo_hz,
                hi_hz: r.hi_hz,
            });
        }
    }
    let power = mean_power(frames, config)?;
    let peak = |bands: &[usize]| {
        bands
            .iter()
            .copied()
            .max_by(|&i, &j| power[i].total_cmp(&power[j]).then(j.cmp(&i)))
            .expect("region is non-empty")
    };
    let (pa, pb) = (peak(&bands_a), peak(&bands_b));
    let inside = power[pa] + power[pb];
    let valley = power[pa..=pb].iter().copied().fold(f64::INFINITY, f64::min);
    let cross = 2.0 * valley;
    if inside + cross <= 0.0 {
        return Ok(0.0);
    }
    Ok(((inside - cross) / (inside + cross)).clamp(0.0, 1.0))
}

fn mean_power(frames: &[StripFrame], config: &AnalyzerConfig) -> Result<Vec<f64>, StripError> {
    let mut power = vec![0.0; config.bands];
    for f in frames {
        if f.left.len() != config.bands || f.right.len() != config.bands {
            return Err(StripError::Ragged);
        }
        for (i, p) in power.iter_mut().enumerate() {
            *p += config.power_of(f.left[i]) + config.power_of(f.right[i]);
        }
    }
    let n = frames.len().max(1) as f64;
    Ok(power.into_iter().map(|p| p / n).collect())
}

/// Pitch and level recovered from one strip frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodedFrame {
    pub t: f64,
    pub pitch_hz: f64,
    /// Root of the summed band power over both channels; relative units.
    pub amplitude: f64,
}

/// Pitch and level of each non-silent strip frame.
///
/// The fundamental is the lowest local band peak within 0.25 intensity of the
/// strongest band inside the pitch output range of `spec` (widened by 10%),
/// refined by a power-weighted log-frequency centroid over a major third on
/// either side. Silent frames yield nothing.
pub fn decode_attributes(
    frames: &[StripFrame],
    spec: &MappingSpec,
    config: &AnalyzerConfig,
) -> Result<Vec<DecodedFrame>, StripError> {
    config.validate()?;
    let range = spec
        .mapping_of(Attribute::Pitch)
        .map(|m| m.output_range)
        .unwrap_or_else(|| Attribute::Pitch.default_output());
    let (lo, hi) = (range.lo.min(range.hi) / 1.1, range.lo.max(range.hi) * 1.1);
    let centers = config.band_centers();
    let search: Vec<usize> = (0..config.bands)
        .filter(|&i| centers[i] >= lo && centers[i] <= hi)
        .collect();

    let mut out = Vec::new();
    for f in frames {
        if f.left.len() != config.bands || f.right.len() != config.bands {
            return Err(StripError::Ragged);
        }
        let power: Vec<f64> = (0..config.bands)
            .map(|i| config.power_of(f.left[i]) + config.power_of(f.right[i]))
            .collect();
        let total: f64 = power.iter().sum();
        if total <= 0.0 {
            continue;
        }
        let level: Vec<f64> = f.left.iter().zip(&f.right).map(|(l, r)| l.max(*r)).collect();
        let Some(&top) = search
            .iter()
            .max_by(|&&i, &&j| level[i].total_cmp(&level[j]))
        else {
            continue;
        };
        if level[top] <= 0.0 {
            continue;
        }
        let is_peak = |i: usize| {
            let left = i == 0 || level[i] >= level[i - 1];
            let right = i + 1 == level.len() || level[i] >= level[i + 1];
            left && right
        };
        let fundamental = search
            .iter()
            .copied()
            .find(|&i| is_peak(i) && level[i] >= level[top] - 0.25)
            .unwrap_or(top);
        let f0 = centers[fundamental];
        let (mut wsum, mut lsum) = (0.0, 0.0);
        for (i, &c) in centers.iter().enumerate() {
            if c >= f0 / 1.25 && c <= f0 * 1.25 {
                wsum += power[i];
                lsum += power[i] * c.ln();
            }
        }
        let pitch_hz = if wsum > 0.0 { (lsum / wsum).exp() } else { f0 };
        out.push(DecodedFrame {
            t: f.t,
            pitch_hz,
            amplitude: total.sqrt(),
        });
    }
    Ok(out)
}

/// 8-bit grayscale image, row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// One column per frame, one row per band, highest band on top.
pub fn render_strip_image(frames: &[StripFrame], side: Side) -> Raster {
    let height = frames.first().map_or(0, |f| f.left.len());
    let width = frames.len();
    let mut pixels = vec![0u8; width * height];
    for (x, f) in frames.iter().enumerate() {
        let column = match side {
            Side::Left => &f.left,
            Side::Right => &f.right,
        };
        for (band, &v) in column.iter().enumerate().take(height) {
            let y = height - 1 - band;
            pixels[y * width + x] = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    Raster {
        width,
        height,
        pixels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(fs: u32, seconds: f64, hz: f64, amp: f64, left: bool, right: bool) -> PcmBuffer {
        let n = (seconds * f64::from(fs)) as usize;
        let mut s = Vec::with_capacity(2 * n);
        for i in 0..n {
            let v = (amp * (2.0 * PI * hz * i as f64 / f64::from(fs)).sin()) as f32;
            s.push(if left { v } else { 0.0 });
            s.push(if right { v } else { 0.0 });
        }
        PcmBuffer::new(s, fs, 2).unwrap()
    }

    #[test]
    fn default_window_and_hop() {
        let c = AnalyzerConfig::default();
        assert_eq!(c.window_len(48_000), 2048);
        assert_eq!(c.window_len(44_100), 2048);
        assert_eq!(c.hop(48_000), 1600.0);
        let centers = c.band_centers();
        assert_eq!(centers.len(), 64);
        assert!((centers[0] - 100.0).abs() < 1e-9 && (centers[63] - 8000.0).abs() < 1e-6);
    }

    #[test]
    fn silence_is_dark() {
        let pcm = PcmBuffer::new(vec![0.0; 2 * 48_000], 48_000, 2).unwrap();
        let frames = analyze(&pcm, &AnalyzerConfig::default()).unwrap();
        assert_eq!(frames.len(), 29);
        assert!(frames.iter().all(|f| f.left.iter().chain(&f.right).all(|&v| v == 0.0)));
        let img = render_strip_image(&frames, Side::Left);
        assert!(img.pixels.iter().all(|&p| p == 0));
        assert!(decode_attributes(&frames, &MappingSpec::tablet(), &AnalyzerConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn left_tone_peaks_in_its_band_and_spares_the_right() {
        let c = AnalyzerConfig::default();
        let frames = analyze(&tone(48_000, 1.0, 440.0, 1.0, true, false), &c).unwrap();
        let band = c.band_of(440.0).unwrap();
        for f in &frames {
            let peak = (0..c.bands).max_by(|&i, &j| f.left[i].total_cmp(&f.left[j])).unwrap();
            assert_eq!(peak, band);
            assert!(f.left[band] > 0.99);
            assert!(f.right.iter().all(|&v| v == 0.0));
        }
        let img = render_strip_image(&frames, Side::Left);
        assert_eq!((img.width, img.height), (frames.len(), 64));
        assert!(img.get(0, 63 - band) >= 250);
    }

    #[test]
    fn doubling_amplitude_adds_six_db() {
        let c = AnalyzerConfig::default();
        let band = c.band_of(1000.0).unwrap();
        let at = |amp| analyze(&tone(48_000, 0.5, 1000.0, amp, true, true), &c).unwrap()[3].left[band];
        let gain_db = (at(0.5) - at(0.25)) * 60.0;
        assert!((gain_db - 6.0206).abs() < 0.5, "{gain_db}");
    }

    #[test]
    fn input_errors() {
        let c = AnalyzerConfig::default();
        let mono = PcmBuffer::new(vec![0.0; 100], 48_000, 1).unwrap();
        assert_eq!(analyze(&mono, &c), Err(StripError::NotStereo(1)));
        let empty = PcmBuffer::new(vec![], 48_000, 2).unwrap();
        assert_eq!(analyze(&empty, &c), Err(StripError::Empty));
        let short = PcmBuffer::new(vec![0.0; 20], 48_000, 2).unwrap();
        assert_eq!(analyze(&short, &c).unwrap().len(), 1);
        let low_rate = PcmBuffer::new(vec![0.0; 2000], 8_000, 2).unwrap();
        assert!(matches!(analyze(&low_rate, &c), Err(StripError::Config(_))));
        let bad = AnalyzerConfig { bands: 4, floor_db: 3.0, ..c };
        assert_eq!(bad.violations().len(), 2);
    }

    #[test]
    fn separability_fixtures() {
        let c = AnalyzerConfig::default();
        let (a, b) = (BandRegion::around(300.0, 1.2), BandRegion::around(1200.0, 1.2));
        let mixed = {
            let x = tone(48_000, 1.0, 300.0, 0.4, true, true);
            let y = tone(48_000, 1.0, 1200.0, 0.4, true, true);
            let s = x.samples().iter().zip(y.samples()).map(|(p, q)| p + q).collect();
            PcmBuffer::new(s, 48_000, 2).unwrap()
        };
        let frames = analyze(&mixed, &c).unwrap();
        assert!(separability(&frames, a, b, &c).unwrap() >= 0.9);

        let single = analyze(&tone(48_000, 1.0, 300.0, 0.4, true, false), &c).unwrap();
        assert!(separability(&single, a, b, &c).unwrap() >= 0.95);

        // Two neighbouring regions straddling one tone see no contrast.
        let one = analyze(&tone(48_000, 1.0, 440.0, 0.5, true, true), &c).unwrap();
        let band = c.band_of(440.0).unwrap();
        let centers = c.band_centers();
        let lo = BandRegion::new(centers[band] * 0.999, centers[band] * 1.001);
        let hi = BandRegion::new(centers[band + 1] * 0.999, centers[band + 1] * 1.001);
        assert!(separability(&one, lo, hi, &c).unwrap() < 0.05);

        let silent = analyze(&PcmBuffer::new(vec![0.0; 96_000], 48_000, 2).unwrap(), &c).unwrap();
        assert_eq!(separability(&silent, a, b, &c).unwrap(), 0.0);
        assert_eq!(
            separability(&frames, a, BandRegion::new(330.0, 2000.0), &c),
            Err(StripError::OverlappingRegions)
        );
        assert!(matches!(
            separability(&frames, a, BandRegion::new(1000.0, 1001.0), &c),
            Err(StripError::EmptyRegion { .. })
        ));
    }

    #[test]
    fn decodes_pure_tone_pitch() {
        let c = AnalyzerConfig::default();
        for hz in [220.0, 261.6, 330.0, 440.0, 523.3, 700.0, 880.0] {
            let frames = analyze(&tone(48_000, 0.3, hz, 0.5, true, true), &c).unwrap();
            let d = decode_attributes(&frames, &MappingSpec::tablet(), &c).unwrap();
            assert!(!d.is_empty());
            for e in d {
                assert!((e.pitch_hz / hz - 1.0).abs() < 0.03, "{hz}: {}", e.pitch_hz);
            }
        }
    }

    #[test]
    fn image_orientation() {
        let frames: Vec<StripFrame> = (0..10)
            .map(|i| {
                let mut left = vec![0.0; 64];
                left[0] = 1.0;
                StripFrame { t: i as f64, left, right: vec![0.5; 64] }
            })
            .collect();
        let img = render_strip_image(&frames, Side::Left);
        assert_eq!((img.width, img.height), (10, 64));
        assert_eq!(img.get(4, 63), 255);
        assert_eq!(img.get(4, 0), 0);
        assert!(render_strip_image(&frames, Side::Right).pixels.iter().all(|&p| p == 128));
    }
}
