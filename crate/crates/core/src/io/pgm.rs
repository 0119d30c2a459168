use std::path::Path;

use thiserror::Error;

use crate::strips::Raster;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed PGM: {0}")]
    Malformed(&'static str),
}

/// Binary PGM (P5), maxval 255.
pub fn encode_pgm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend_from_slice(&raster.pixels);
    out
}

pub fn write_pgm(raster: &Raster, path: impl AsRef<Path>) -> Result<(), PgmError> {
    std::fs::write(path, encode_pgm(raster))?;
    Ok(())
}

/// Reads a P5 image with maxval 255.
pub fn decode_pgm(bytes: &[u8]) -> Result<Raster, PgmError> {
    let mut pos = 0;
    let mut token = || -> Result<&[u8], PgmError> {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(PgmError::Malformed("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        Ok(&bytes[start..pos])
    };
    if token()? != b"P5" {
        return Err(PgmError::Malformed("not a binary PGM"));
    }
    let mut number = || -> Result<usize, PgmError> {
        std::str::from_utf8(token()?)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::Malformed("bad header number"))
    };
    let width = number()?;
    let height = number()?;
    if number()? != 255 {
        return Err(PgmError::Malformed("maxval must be 255"));
    }
    let start = pos + 1;
    let len = width
        .checked_mul(height)
        .ok_or(PgmError::Malformed("image too large"))?;
    let pixels = bytes
        .get(start..)
        .filter(|rest| rest.len() == len)
        .ok_or(PgmError::Malformed("pixel data length mismatch"))?
        .to_vec();
    Ok(Raster {
        width,
        height,
        pixels,
    })
}
