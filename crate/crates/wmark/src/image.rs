//! Grayscale images plus binary PGM (P5) and PBM (P4) file I/O.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad {format} header: {reason}")]
    BadHeader { format: &'static str, reason: String },
    #[error("image dimensions {width}x{height} are invalid")]
    BadDimensions { width: usize, height: usize },
}

/// An 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(ImageError::BadDimensions { width, height });
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage { width, height, pixels: vec![value; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Clamped read used by filters with symmetric edge handling.
    pub fn get_reflect(&self, x: isize, y: isize) -> u8 {
        let xr = reflect(x, self.width);
        let yr = reflect(y, self.height);
        self.pixels[yr * self.width + xr]
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<Self, ImageError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        Self::decode_pgm(&data)
    }

    pub fn decode_pgm(data: &[u8]) -> Result<Self, ImageError> {
        let bad = |reason: &str| ImageError::BadHeader { format: "PGM", reason: reason.into() };
        let mut pos = 0;
        if data.get(..2) != Some(b"P5") {
            return Err(bad("missing P5 magic"));
        }
        pos += 2;
        let width = next_header_int(data, &mut pos).ok_or_else(|| bad("missing width"))?;
        let height = next_header_int(data, &mut pos).ok_or_else(|| bad("missing height"))?;
        let maxval = next_header_int(data, &mut pos).ok_or_else(|| bad("missing maxval"))?;
        if maxval != 255 {
            return Err(bad("only maxval 255 is supported"));
        }
        pos += 1; // single whitespace after maxval
        let expected = width * height;
        let pixels = data.get(pos..pos + expected).ok_or_else(|| bad("truncated pixel data"))?;
        GrayImage::new(width, height, pixels.to_vec())
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<(), ImageError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.encode_pgm())?;
        Ok(())
    }

    pub fn encode_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

fn reflect(i: isize, len: usize) -> usize {
    let len = len as isize;
    let mut i = i;
    if i < 0 {
        i = -i - 1;
    }
    if i >= len {
        i = 2 * len - 1 - i;
    }
    i.clamp(0, len - 1) as usize
}

/// A bilevel image with one 0/1 byte per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitImage {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<u8>,
}

impl BitImage {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(ImageError::BadDimensions { width, height });
        }
        Ok(BitImage { width, height, bits })
    }

    pub fn from_bits(width: usize, height: usize, flat: &[u8]) -> Result<Self, ImageError> {
        Self::new(width, height, flat.iter().map(|&b| b & 1).collect())
    }

    pub fn read_pbm(path: impl AsRef<Path>) -> Result<Self, ImageError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        Self::decode_pbm(&data)
    }

    /// P4: bits packed MSB-first, each row padded to a whole byte. A set
    /// bit means black and maps to 1.
    pub fn decode_pbm(data: &[u8]) -> Result<Self, ImageError> {
        let bad = |reason: &str| ImageError::BadHeader { format: "PBM", reason: reason.into() };
        let mut pos = 0;
        if data.get(..2) != Some(b"P4") {
            return Err(bad("missing P4 magic"));
        }
        pos += 2;
        let width = next_header_int(data, &mut pos).ok_or_else(|| bad("missing width"))?;
        let height = next_header_int(data, &mut pos).ok_or_else(|| bad("missing height"))?;
        pos += 1;
        let row_bytes = width.div_ceil(8);
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            let row = data
                .get(pos + y * row_bytes..pos + (y + 1) * row_bytes)
                .ok_or_else(|| bad("truncated bitmap data"))?;
            for x in 0..width {
                bits.push(row[x / 8] >> (7 - x % 8) & 1);
            }
        }
        BitImage::new(width, height, bits)
    }

    pub fn write_pbm(&self, path: impl AsRef<Path>) -> Result<(), ImageError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.encode_pbm())?;
        Ok(())
    }

    pub fn encode_pbm(&self) -> Vec<u8> {
        let mut out = format!("P4\n{} {}\n", self.width, self.height).into_bytes();
        let row_bytes = self.width.div_ceil(8);
        for y in 0..self.height {
            let mut row = vec![0u8; row_bytes];
            for x in 0..self.width {
                if self.bits[y * self.width + x] & 1 != 0 {
                    row[x / 8] |= 1 << (7 - x % 8);
                }
            }
            out.extend_from_slice(&row);
        }
        out
    }
}

/// Procedural grayscale test cover: low-frequency waves plus mild
/// texture, kept away from the 0/255 rails so clamping stays out of
/// play. Deterministic in the seed.
pub fn synthetic_cover(width: usize, height: usize, seed: u64) -> GrayImage {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let fx = x as f64 / width as f64;
            let fy = y as f64 / height as f64;
            let v = 128.0
                + 55.0 * (6.0 * fx + phase).sin() * (4.5 * fy).cos()
                + 25.0 * (17.0 * (fx + fy)).sin()
                + rng.gen_range(-6.0..6.0);
            pixels.push(v.round().clamp(16.0, 239.0) as u8);
        }
    }
    GrayImage { width, height, pixels }
}

/// Reads the next ASCII integer from a PNM header, skipping whitespace
/// and `#` comments.
fn next_header_int(data: &[u8], pos: &mut usize) -> Option<usize> {
    loop {
        match data.get(*pos)? {
            b'#' => {
                while data.get(*pos)? != &b'\n' {
                    *pos += 1;
                }
            }
            c if c.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
    let start = *pos;
    while data.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    std::str::from_utf8(&data[start..*pos]).ok()?.parse().ok()
}
