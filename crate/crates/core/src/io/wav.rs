use std::fs::File;
use std::io::{BufReader, BufWriter, Cursor, Read, Seek, Write};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use thiserror::Error;

use crate::synth::PcmBuffer;

const FULL_SCALE: f32 = i16::MAX as f32;

#[derive(Debug, Error)]
pub enum WavError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed WAV: {0}")]
    Malformed(String),
    #[error("unsupported WAV encoding: {0}")]
    Unsupported(String),
    #[error("invalid audio: {0}")]
    Buffer(String),
}

impl From<hound::Error> for WavError {
    fn from(e: hound::Error) -> Self {
        match e {
            hound::Error::IoError(io) => WavError::Io(io),
            hound::Error::Unsupported => WavError::Unsupported("not integer PCM".into()),
            other => WavError::Malformed(other.to_string()),
        }
    }
}

/// Writes 16-bit little-endian PCM; samples are clamped to `[-1, 1]`.
pub fn encode_wav<W: Write + Seek>(buffer: &PcmBuffer, out: W) -> Result<(), WavError> {
    let spec = WavSpec {
        channels: buffer.channels(),
        sample_rate: buffer.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut w = WavWriter::new(out, spec)?;
    {
        let mut w16 = w.get_i16_writer(buffer.samples().len() as u32);
        for &s in buffer.samples() {
            w16.write_sample((s.clamp(-1.0, 1.0) * FULL_SCALE).round() as i16);
        }
        w16.flush()?;
    }
    w.finalize()?;
    Ok(())
}

// Reader-side I/O failures are reported as damaged input.
fn read_error(e: hound::Error) -> WavError {
    match e {
        hound::Error::IoError(io) => WavError::Malformed(format!("truncated data ({io})")),
        other => other.into(),
    }
}

/// Reads 16-bit integer PCM; anything else is [`WavError::Unsupported`].
pub fn decode_wav<R: Read>(input: R) -> Result<PcmBuffer, WavError> {
    let reader = WavReader::new(input).map_err(read_error)?;
    let spec = reader.spec();
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(WavError::Unsupported(format!(
            "{:?} at {} bits",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f32::from(v) / FULL_SCALE))
        .collect::<Result<Vec<f32>, _>>()
        .map_err(read_error)?;
    PcmBuffer::new(samples, spec.sample_rate, spec.channels)
        .map_err(|e| WavError::Buffer(e.to_string()))
}

pub fn write_wav(buffer: &PcmBuffer, path: impl AsRef<Path>) -> Result<(), WavError> {
    let mut out = BufWriter::new(File::create(path)?);
    encode_wav(buffer, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<PcmBuffer, WavError> {
    decode_wav(BufReader::new(File::open(path)?))
}

/// In-memory WAV bytes.
pub fn wav_bytes(buffer: &PcmBuffer) -> Result<Vec<u8>, WavError> {
    let mut cursor = Cursor::new(Vec::new());
    encode_wav(buffer, &mut cursor)?;
    Ok(cursor.into_inner())
}
