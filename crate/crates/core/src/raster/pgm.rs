//! Binary PGM (P5) reader and writer, 8 or 16 bits per sample.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::BandImage;
use crate::error::{Error, Result};

/// Clips to `[0, 2^depth - 1]` and rounds half up.
pub fn clip_round(value: f64, depth: u32) -> u16 {
    let max = ((1u32 << depth) - 1) as f64;
    (value.clamp(0.0, max) + 0.5).floor().min(max) as u16
}

fn check_depth(depth: u32) -> Result<()> {
    match depth {
        8 | 16 => Ok(()),
        other => Err(Error::UnsupportedDepth(other)),
    }
}

/// Encodes a band as P5 with `maxval = 2^depth - 1`. In-memory data is not modified.
pub fn write_pgm(band: &BandImage, depth: u32) -> Result<Vec<u8>> {
    check_depth(depth)?;
    let maxval = (1u32 << depth) - 1;
    let mut out = format!("P5\n{} {}\n{}\n", band.width(), band.height(), maxval).into_bytes();
    out.reserve(band.len() * if depth == 8 { 1 } else { 2 });
    for &v in band.data() {
        let q = clip_round(v, depth);
        if depth == 8 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    Ok(out)
}

pub fn save_band(band: &BandImage, path: &Path, depth: u32) -> Result<()> {
    let bytes = write_pgm(band, depth)?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

fn parse_header(bytes: &[u8], path: &Path) -> Result<Header> {
    let bad = |reason: &str| Error::Format { path: path.to_path_buf(), reason: reason.to_string() };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | None) {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a decimal header field"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header field out of range"))?;
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        _ => return Err(bad("missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedDepth(maxval as u32));
    }
    Ok(Header { width: width as usize, height: height as usize, maxval: maxval as u32, data_offset: pos })
}

pub fn read_pgm(path: &Path) -> Result<BandImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header = parse_header(&bytes, path)?;
    let n = header.width * header.height;
    let raster = &bytes[header.data_offset..];
    let data: Vec<f64> = if header.maxval > 255 {
        if raster.len() < 2 * n {
            return Err(Error::Format { path: path.to_path_buf(), reason: "truncated 16-bit raster".into() });
        }
        raster.chunks_exact(2).take(n).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64).collect()
    } else {
        if raster.len() < n {
            return Err(Error::Format { path: path.to_path_buf(), reason: "truncated 8-bit raster".into() });
        }
        raster[..n].iter().map(|&b| b as f64).collect()
    };
    BandImage::new(header.width, header.height, data)
}
