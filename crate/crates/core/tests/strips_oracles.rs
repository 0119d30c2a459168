use std::f64::consts::TAU;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sonoplane_core::strips::{
    analyze, decode_attributes, render_strip_image, separability, AnalyzerConfig, BandRegion, Side,
    StripFrame, ZERO_PAD,
};
use sonoplane_core::synth::{apply_pan, render_for};
use sonoplane_core::{MappingSpec, PcmBuffer, SoundAttributeFrame, SynthConfig};

const FS: u32 = 48_000;

fn stereo(mono: &[f32]) -> PcmBuffer {
    let s = mono.iter().flat_map(|&x| [x, x]).collect();
    PcmBuffer::new(s, FS, 2).unwrap()
}

fn sine(hz: f64, amplitude: f64, seconds: f64) -> Vec<f32> {
    let n = (seconds * f64::from(FS)) as usize;
    (0..n)
        .map(|i| (amplitude * (TAU * hz * i as f64 / f64::from(FS)).sin()) as f32)
        .collect()
}

fn intensity(magnitude_fs: f64, floor_db: f64) -> f64 {
    if magnitude_fs <= 0.0 {
        return 0.0;
    }
    ((20.0 * magnitude_fs.log10() - floor_db) / -floor_db).clamp(0.0, 1.0)
}

// Band intensities of one window by a direct (naive) DFT at the padded bin
// frequencies inside each band.
fn direct_bands(samples: &[f32], start: usize, config: &AnalyzerConfig) -> Vec<f64> {
    let n = config.window_len(FS);
    let padded = n * ZERO_PAD;
    let bin_hz = f64::from(FS) / padded as f64;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let w = 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos();
            f64::from(samples[start + i]) * w
        })
        .collect();
    let magnitude = |k: usize| {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, v) in x.iter().enumerate() {
            let phase = TAU * (k * i % padded) as f64 / padded as f64;
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        (re * re + im * im).sqrt() / (n as f64 / 4.0)
    };
    config
        .band_edges()
        .windows(2)
        .map(|e| {
            let lo = (e[0] / bin_hz).ceil() as usize;
            let hi = (e[1] / bin_hz).ceil() as usize;
            let peak = (lo..hi).map(magnitude).fold(0.0, f64::max);
            intensity(peak, config.floor_db)
        })
        .collect()
}

#[test]
fn white_noise_matches_a_direct_transform() {
    let config = AnalyzerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let noise: Vec<f32> = (0..FS / 4).map(|_| rng.random_range(-1.0f32..=1.0)).collect();
    let frames = analyze(&stereo(&noise), &config).unwrap();
    let hop = config.hop(FS);
    let checked = frames.len().min(4);
    let (mut ours, mut direct, mut count) = (0.0, 0.0, 0);
    for (k, f) in frames.iter().take(checked).enumerate() {
        let start = (k as f64 * hop).round() as usize;
        let reference = direct_bands(&noise, start, &config);
        for (a, b) in f.left.iter().zip(&reference) {
            ours += a;
            direct += b;
            count += 1;
        }
        assert_eq!(f.left, f.right);
    }
    let (ours, direct) = (ours / count as f64, direct / count as f64);
    assert!(direct > 0.5, "noise should be loud: {direct}");
    assert!((ours - direct).abs() <= 0.1, "analyzer {ours} vs direct {direct}");
}

#[test]
fn tone_lights_one_row_at_its_band() {
    let config = AnalyzerConfig::default();
    let frames = analyze(&stereo(&sine(440.0, 1.0, 0.5)), &config).unwrap();
    let band = config.band_of(440.0).unwrap();
    for f in &frames {
        let top = (0..config.bands).max_by(|&i, &j| f.left[i].total_cmp(&f.left[j])).unwrap();
        assert_eq!(top, band);
        assert!((f.left[band] - 1.0).abs() < 0.02, "{}", f.left[band]);
    }
    let image = render_strip_image(&frames, Side::Left);
    let row = config.bands - 1 - band;
    let brightest = (0..image.height)
        .max_by_key(|&y| (0..image.width).map(|x| u32::from(image.get(x, y))).sum::<u32>())
        .unwrap();
    assert_eq!(brightest, row);
    assert!((0..image.width).all(|x| image.get(x, row) >= 250));
}

#[test]
fn left_only_tone_leaves_the_right_strip_dark() {
    let config = AnalyzerConfig::default();
    let mono = PcmBuffer::new(sine(440.0, 0.9, 0.5), FS, 1).unwrap();
    let frames = analyze(&apply_pan(&mono, -1.0).unwrap(), &config).unwrap();
    let right_max = frames.iter().flat_map(|f| f.right.iter().copied()).fold(0.0, f64::max);
    assert!(right_max < 0.05, "{right_max}");
    let band = config.band_of(440.0).unwrap();
    assert!(frames.iter().all(|f| f.left[band] > 0.9));
}

fn sum(a: &[f32], b: &[f32]) -> Vec<f32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn analyzed(mono: &[f32]) -> Vec<StripFrame> {
    analyze(&stereo(mono), &AnalyzerConfig::default()).unwrap()
}

#[test]
fn separability_fixtures() {
    let config = AnalyzerConfig::default();
    let two = analyzed(&sum(&sine(300.0, 0.4, 0.5), &sine(1200.0, 0.4, 0.5)));
    let score = separability(&two, BandRegion::around(300.0, 1.19), BandRegion::around(1200.0, 1.19), &config).unwrap();
    assert!(score >= 0.9, "{score}");

    let one = analyzed(&sine(300.0, 0.8, 0.5));
    let score = separability(&one, BandRegion::around(300.0, 1.19), BandRegion::around(1200.0, 1.19), &config).unwrap();
    assert!(score >= 0.95, "{score}");

    let same = separability(&one, BandRegion::new(250.0, 299.0), BandRegion::new(301.0, 360.0), &config).unwrap();
    assert!(same < 0.1, "{same}");
}

#[test]
fn decoded_energy_rises_with_amplitude() {
    let config = AnalyzerConfig::default();
    let spec = MappingSpec::tablet();
    let synth = SynthConfig::default();
    let levels: Vec<f64> = (0..9).map(|i| 0.2 + 0.1 * f64::from(i)).collect();
    let energy: Vec<f64> = levels
        .iter()
        .map(|&a| {
            let frame = SoundAttributeFrame { t: 0.0, pitch_hz: 440.0, amplitude: a, timbre: 0.4, waveshape: 0.5, pan: None };
            let pcm = render_for(&[frame], &synth, 0.5).unwrap();
            let decoded = decode_attributes(&analyzed(pcm.samples()), &spec, &config).unwrap();
            assert!(decoded.iter().all(|d| (d.pitch_hz / 440.0 - 1.0).abs() <= 0.03));
            decoded.iter().map(|d| d.amplitude).sum::<f64>() / decoded.len() as f64
        })
        .collect();
    assert!(energy.windows(2).all(|w| w[1] > w[0]), "{energy:?}");
}
