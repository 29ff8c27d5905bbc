//! Binary codebook files.
//!
//! Layout, little-endian, no padding:
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `CDBK` |
//! | 4     | format version (`u32`, currently 1) |
//! | 4     | `dim` (`u32`) |
//! | 4     | `rate_bits` (`u32`) |
//! | 8·M·dim | codewords, codeword-major, `f64` |

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::codebook::{Codebook, MAX_RATE_BITS};
use crate::error::{Error, Result};
use crate::signal::Signal;

pub const MAGIC: &[u8; 4] = b"CDBK";
pub const VERSION: u32 = 1;

const HEADER_LEN: usize = 16;

pub fn write_codebook<W: Write>(codebook: &Codebook, mut w: W) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * codebook.size() * codebook.dim());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(codebook.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&codebook.rate_bits().to_le_bytes());
    for c in codebook.codewords() {
        for v in c.as_slice() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_codebook<R: Read>(mut r: R) -> Result<Codebook> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse(&bytes)
}

pub fn save_codebook(codebook: &Codebook, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write_codebook(codebook, std::io::BufWriter::new(file))
}

pub fn load_codebook(path: impl AsRef<Path>) -> Result<Codebook> {
    parse(&fs::read(path)?)
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn parse(bytes: &[u8]) -> Result<Codebook> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(format!(
            "codebook file too short for header: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::format("bad magic, expected CDBK"));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::format(format!("unsupported format version {version}")));
    }
    let dim = u32_at(bytes, 8) as usize;
    let rate_bits = u32_at(bytes, 12);
    if dim == 0 {
        return Err(Error::format("dim must be at least 1"));
    }
    if rate_bits == 0 || rate_bits > MAX_RATE_BITS {
        return Err(Error::format(format!("unsupported rate_bits {rate_bits}")));
    }
    let payload = &bytes[HEADER_LEN..];
    let row = 8 * dim;
    if !payload.len().is_multiple_of(row) {
        return Err(Error::format(format!(
            "payload of {} bytes is not a whole number of {dim}-dim codewords",
            payload.len()
        )));
    }
    let count = payload.len() / row;
    let expected = 1usize << rate_bits;
    if count != expected {
        return Err(Error::format(format!(
            "rate_bits {rate_bits} requires {expected} codewords, file holds {count}"
        )));
    }
    let codewords = payload
        .chunks_exact(row)
        .map(|chunk| {
            let values = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            Signal::new(values).map_err(|e| Error::format(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Codebook::new(rate_bits, codewords).map_err(|e| Error::format(e.to_string()))
}
