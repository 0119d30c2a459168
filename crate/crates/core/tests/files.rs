use std::io::ErrorKind;

use sonoplane_core::io::{
    decode_pgm, load_config, read_wav, save_config, write_pgm, write_wav, ConfigDocument,
    ConfigError, WavError,
};
use sonoplane_core::strips::Raster;
use sonoplane_core::PcmBuffer;

#[test]
fn config_survives_a_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    let mut doc = ConfigDocument::default();
    doc.game.hit_radius = 0.0731;
    doc.game.rng_seed = u64::MAX;
    doc.analyzer.floor_db = -72.125;
    save_config(&doc, &path).unwrap();
    assert_eq!(load_config(&path).unwrap(), doc);

    let missing = dir.path().join("missing.json");
    assert!(matches!(load_config(&missing), Err(ConfigError::Io { .. })));
}

#[test]
fn wav_file_round_trip_within_one_lsb() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tone.wav");
    let samples: Vec<f32> = (0..9600).map(|i| ((i as f32) * 0.013).sin() * 0.9).collect();
    let pcm = PcmBuffer::new(samples.clone(), 48_000, 2).unwrap();
    write_wav(&pcm, &path).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 44 + 2 * 9600);
    let back = read_wav(&path).unwrap();
    assert_eq!((back.sample_rate(), back.channels()), (48_000, 2));
    let lsb = 1.0 / f32::from(i16::MAX);
    assert!(back.samples().iter().zip(&samples).all(|(a, b)| (a - b).abs() <= lsb));

    match read_wav(dir.path().join("none.wav")) {
        Err(WavError::Io(e)) => assert_eq!(e.kind(), ErrorKind::NotFound),
        other => panic!("{other:?}"),
    }
}

#[test]
fn pgm_file_decodes_to_the_same_raster() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strip.pgm");
    let raster = Raster {
        width: 3,
        height: 2,
        pixels: vec![0, 64, 128, 192, 255, 7],
    };
    write_pgm(&raster, &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P5"));
    assert_eq!(decode_pgm(&bytes).unwrap(), raster);
}
