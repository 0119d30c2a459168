use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sonoplane_core::io::{decode_pgm, read_wav, ConfigDocument};
use sonoplane_core::session::SessionReport;
use sonoplane_core::strips::DecodedFrame;
use sonoplane_core::SoundAttributeFrame;

fn sonoplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonoplane"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn default_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shipped_config_is_the_default_document() {
    let text = std::fs::read_to_string(default_config()).unwrap();
    assert_eq!(ConfigDocument::from_json(&text).unwrap(), ConfigDocument::default());
    let out = sonoplane(&["validate", "--config", s(&default_config())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_rejects_broken_config_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut doc = ConfigDocument::default();
    doc.game.speed_multiplier = 0.9;
    std::fs::write(&path, doc.to_json()).unwrap();
    let out = sonoplane(&["validate", "--config", s(&path)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("game.speed_multiplier"));

    std::fs::write(&path, "{\"version\": 1,").unwrap();
    let out = sonoplane(&["validate", "--config", s(&path)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = sonoplane(&["validate", "--config", s(&dir.path().join("missing.json"))]);
    assert!(!out.status.success());
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let report = dir.path().join(name);
        let out = sonoplane(&[
            "simulate", "--config", s(&default_config()), "--seconds", "30", "--seed", seed,
            "--report", s(&report),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(report).unwrap()
    };
    let a = run("a.json", "11");
    let b = run("b.json", "11");
    let c = run("c.json", "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let report: SessionReport = serde_json::from_slice(&a).unwrap();
    assert_eq!(report.seed, 11);
    assert_eq!(report.hits + report.misses + report.rate_limited, report.touches_attempted);
    assert!(report.hits > 0);
}

#[test]
fn simulate_rejects_bad_seconds() {
    let dir = tempfile::tempdir().unwrap();
    let out = sonoplane(&[
        "simulate", "--config", s(&default_config()), "--seconds", "0", "--seed", "1",
        "--report", s(&dir.path().join("r.json")),
    ]);
    assert!(!out.status.success());
}

// Commanded pitch at `t`, linear between frames.
fn pitch_at(frames: &[SoundAttributeFrame], t: f64) -> f64 {
    let i = frames.partition_point(|f| f.t <= t).clamp(1, frames.len() - 1);
    let (a, b) = (&frames[i - 1], &frames[i]);
    let u = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
    a.pitch_hz + u * (b.pitch_hz - a.pitch_hz)
}

#[test]
fn render_then_strips_recovers_the_pitch_trace() {
    let dir = tempfile::tempdir().unwrap();
    let wav = dir.path().join("game.wav");
    let frames_path = dir.path().join("frames.json");
    let out = sonoplane(&[
        "render-audio", "--config", s(&default_config()), "--seconds", "8", "--seed", "3",
        "--out", s(&wav), "--frames", s(&frames_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pcm = read_wav(&wav).unwrap();
    assert_eq!((pcm.sample_rate(), pcm.channels(), pcm.frames()), (48_000, 1, 8 * 48_000));

    let strips_dir = dir.path().join("strips");
    let out = sonoplane(&[
        "strips", "--in", s(&wav), "--config", s(&default_config()), "--out-dir", s(&strips_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let frames: Vec<SoundAttributeFrame> =
        serde_json::from_str(&std::fs::read_to_string(frames_path).unwrap()).unwrap();
    let decoded: Vec<DecodedFrame> =
        serde_json::from_str(&std::fs::read_to_string(strips_dir.join("decoded.json")).unwrap()).unwrap();
    assert!(decoded.len() >= 230);
    for d in &decoded {
        let want = pitch_at(&frames, d.t);
        assert!((d.pitch_hz / want - 1.0).abs() <= 0.03, "t={} decoded {} want {want}", d.t, d.pitch_hz);
    }
    let left = decode_pgm(&std::fs::read(strips_dir.join("left.pgm")).unwrap()).unwrap();
    let right = decode_pgm(&std::fs::read(strips_dir.join("right.pgm")).unwrap()).unwrap();
    assert_eq!((left.width, left.height), (decoded.len(), 64));
    assert_eq!(left, right);
}

#[test]
fn strips_reports_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = sonoplane(&[
        "strips", "--in", s(&dir.path().join("none.wav")), "--config", s(&default_config()),
        "--out-dir", s(dir.path()),
    ]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}
