//! Binary 8-bit PGM (`P5`, maxval 255).

use std::fs;
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

fn to_byte(v: f64) -> u8 {
    // round half up, then clamp
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Header fields and the offset of the first pixel byte.
fn parse_header(bytes: &[u8]) -> Result<(usize, usize, usize)> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format("not a binary PGM (expected magic P5)"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments before each field
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::format("truncated PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format("malformed PGM header field"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("PGM header value out of range"))?;
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format("missing separator after PGM maxval")),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::format(format!("unsupported maxval {maxval}, need 255")));
    }
    if width == 0 || height == 0 {
        return Err(Error::format("PGM dimensions must be positive"));
    }
    Ok((width, height, pos))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let (width, height, start) = parse_header(bytes)?;
    let len = width
        .checked_mul(height)
        .ok_or_else(|| Error::format("PGM dimensions overflow"))?;
    let raster = bytes
        .get(start..start + len)
        .ok_or_else(|| Error::format(format!("truncated PGM raster: need {len} bytes")))?;
    GrayImage::new(
        width,
        height,
        raster.iter().map(|&b| f64::from(b) / 255.0).collect(),
    )
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.pixels().iter().map(|&v| to_byte(v)));
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(image))?;
    Ok(())
}
