//! Robustness attack battery: adaptive Wiener and median filtering,
//! Gaussian noise and blur, rotation, a JPEG-equivalent quantization
//! round trip, and a halve-then-restore resize.
//!
//! Every attack maps an image to an image of the same dimensions with
//! values in [0, 255]. Seeded attacks are bit-reproducible.

use crate::dct::{dct2_block, idct2_block, BLOCK};
use crate::image::GrayImage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AttackError {
    #[error("cannot parse attack spec {0:?}")]
    BadSpec(String),
    #[error("resize attack needs even dimensions, got {0}x{1}")]
    OddDimensions(usize, usize),
}

/// A single attack with its parameters; round-trips through the CLI
/// string grammar ("wiener3x3", "noise:var=0.01", "rotate:deg=2",
/// "rotate:deg=2,realign", "jpeg:q=70", "resize:half", ...).
#[derive(Debug, Clone, PartialEq)]
pub enum AttackSpec {
    Wiener3x3,
    Median3x3,
    GaussianNoise { variance: f64 },
    GaussianFilter { sigma: f64 },
    Rotate { degrees: f64, realign: bool },
    JpegLike { quality: u8 },
    ResizeHalfBack,
}

impl AttackSpec {
    /// Applies the attack. `seed` feeds the noise generator; deterministic
    /// attacks ignore it.
    pub fn apply(&self, img: &GrayImage, seed: u64) -> Result<GrayImage, AttackError> {
        Ok(match *self {
            AttackSpec::Wiener3x3 => wiener3x3(img),
            AttackSpec::Median3x3 => median3x3(img),
            AttackSpec::GaussianNoise { variance } => gaussian_noise(img, variance, seed),
            AttackSpec::GaussianFilter { sigma } => gaussian_filter(img, sigma),
            AttackSpec::Rotate { degrees, realign } => {
                let rotated = rotate(img, degrees);
                if realign {
                    rotate(&rotated, -degrees)
                } else {
                    rotated
                }
            }
            AttackSpec::JpegLike { quality } => jpeg_like(img, quality),
            AttackSpec::ResizeHalfBack => resize_halfback(img)?,
        })
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::Wiener3x3 => write!(f, "wiener3x3"),
            AttackSpec::Median3x3 => write!(f, "median3x3"),
            AttackSpec::GaussianNoise { variance } => write!(f, "noise:var={variance}"),
            AttackSpec::GaussianFilter { sigma } => write!(f, "gauss:sigma={sigma}"),
            AttackSpec::Rotate { degrees, realign } => {
                write!(f, "rotate:deg={degrees}")?;
                if *realign {
                    write!(f, ",realign")?;
                }
                Ok(())
            }
            AttackSpec::JpegLike { quality } => write!(f, "jpeg:q={quality}"),
            AttackSpec::ResizeHalfBack => write!(f, "resize:half"),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AttackError::BadSpec(s.to_string());
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k, p),
            None => (s, ""),
        };
        let param = |key: &str| -> Option<&str> {
            params.split(',').find_map(|p| p.strip_prefix(key)?.strip_prefix('='))
        };
        match kind {
            "wiener3x3" => Ok(AttackSpec::Wiener3x3),
            "median3x3" => Ok(AttackSpec::Median3x3),
            "noise" => {
                let variance: f64 = param("var").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if variance <= 0.0 {
                    return Err(bad());
                }
                Ok(AttackSpec::GaussianNoise { variance })
            }
            "gauss" => {
                let sigma: f64 =
                    param("sigma").map_or(Ok(0.5), |v| v.parse().map_err(|_| bad()))?;
                if sigma <= 0.0 {
                    return Err(bad());
                }
                Ok(AttackSpec::GaussianFilter { sigma })
            }
            "rotate" => {
                let degrees: f64 = param("deg").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if degrees.abs() >= 45.0 {
                    return Err(bad());
                }
                let realign = params.split(',').any(|p| p == "realign");
                Ok(AttackSpec::Rotate { degrees, realign })
            }
            "jpeg" => {
                let quality: u8 = param("q").map_or(Ok(70), |v| v.parse().map_err(|_| bad()))?;
                if !(1..=100).contains(&quality) {
                    return Err(bad());
                }
                Ok(AttackSpec::JpegLike { quality })
            }
            "resize" => {
                if params == "half" || params.is_empty() {
                    Ok(AttackSpec::ResizeHalfBack)
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Adaptive 3x3 Wiener filter; the noise power estimate is the mean of
/// the local variances, matching the usual adaptive formulation.
pub fn wiener3x3(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width, img.height);
    let mut means = vec![0.0f64; w * h];
    let mut vars = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    let v = img.get_reflect(x as isize + dx, y as isize + dy) as f64;
                    sum += v;
                    sum2 += v * v;
                }
            }
            let mean = sum / 9.0;
            means[y * w + x] = mean;
            vars[y * w + x] = (sum2 / 9.0 - mean * mean).max(0.0);
        }
    }
    let noise = vars.iter().sum::<f64>() / vars.len() as f64;
    let mut out = img.clone();
    for i in 0..w * h {
        let v = vars[i];
        let x = img.pixels[i] as f64;
        let filtered =
            if v > noise { means[i] + (v - noise) / v * (x - means[i]) } else { means[i] };
        out.pixels[i] = clamp_u8(filtered);
    }
    out
}

/// 3x3 median filter with symmetric padding.
pub fn median3x3(img: &GrayImage) -> GrayImage {
    let mut out = img.clone();
    for y in 0..img.height {
        for x in 0..img.width {
            let mut window = [0u8; 9];
            let mut i = 0;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    window[i] = img.get_reflect(x as isize + dx, y as isize + dy);
                    i += 1;
                }
            }
            window.sort_unstable();
            out.set(x, y, window[4]);
        }
    }
    out
}

/// Additive Gaussian noise with variance on the normalized [0, 1] scale,
/// i.e. a pixel-domain standard deviation of 255 * sqrt(variance).
pub fn gaussian_noise(img: &GrayImage, variance: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = 255.0 * variance.sqrt();
    let mut out = img.clone();
    for p in out.pixels.iter_mut() {
        *p = clamp_u8(*p as f64 + sigma * standard_normal(&mut rng));
    }
    out
}

/// Box-Muller; two uniforms in, one normal out.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// 3x3 normalized Gaussian blur, separable, symmetric padding.
pub fn gaussian_filter(img: &GrayImage, sigma: f64) -> GrayImage {
    let kernel = gaussian_kernel3(sigma);
    let (w, h) = (img.width, img.height);
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * img.get_reflect(x as isize + k as isize - 1, y as isize) as f64;
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                let yy = reflect_idx(y as isize + k as isize - 1, h);
                acc += kv * tmp[yy * w + x];
            }
            out.pixels[y * w + x] = clamp_u8(acc);
        }
    }
    out
}

fn reflect_idx(i: isize, len: usize) -> usize {
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

pub(crate) fn gaussian_kernel3(sigma: f64) -> [f64; 3] {
    let mut k = [0.0; 3];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - 1.0;
        *v = (-d * d / (2.0 * sigma * sigma)).exp();
    }
    let s: f64 = k.iter().sum();
    for v in k.iter_mut() {
        *v /= s;
    }
    k
}

/// Bilinear rotation about the image center; same output dimensions,
/// out-of-frame samples fill with 0. Rotating by -degrees re-aligns.
pub fn rotate(img: &GrayImage, degrees: f64) -> GrayImage {
    let theta = degrees.to_radians();
    let (sin, cos) = theta.sin_cos();
    let cx = (img.width as f64 - 1.0) / 2.0;
    let cy = (img.height as f64 - 1.0) / 2.0;
    let mut out = GrayImage::filled(img.width, img.height, 0);
    for y in 0..img.height {
        for x in 0..img.width {
            // inverse map the destination pixel into the source
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            let sx = cos * dx + sin * dy + cx;
            let sy = -sin * dx + cos * dy + cy;
            out.set(x, y, bilinear_or_zero(img, sx, sy));
        }
    }
    out
}

fn bilinear_or_zero(img: &GrayImage, x: f64, y: f64) -> u8 {
    if x < 0.0 || y < 0.0 || x > (img.width - 1) as f64 || y > (img.height - 1) as f64 {
        return 0;
    }
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(img.width - 1);
    let y1 = (y0 + 1).min(img.height - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let v = img.get(x0, y0) as f64 * (1.0 - fx) * (1.0 - fy)
        + img.get(x1, y0) as f64 * fx * (1.0 - fy)
        + img.get(x0, y1) as f64 * (1.0 - fx) * fy
        + img.get(x1, y1) as f64 * fx * fy;
    clamp_u8(v)
}

/// ITU-T T.81 luminance quantization table, raster order.
const JPEG_LUMA_QT: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// The quantization table scaled by the conventional quality factor.
pub(crate) fn scaled_luma_qt(quality: u8) -> [f64; 64] {
    let q = quality.clamp(1, 100) as u32;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut table = [0.0; 64];
    for (i, &base) in JPEG_LUMA_QT.iter().enumerate() {
        table[i] = ((base as u32 * scale + 50) / 100).clamp(1, 255) as f64;
    }
    table
}

/// JPEG-equivalent distortion: per-block DCT, quantize with the scaled
/// standard luminance table, dequantize, inverse DCT. No entropy coding;
/// the quantization round trip is what affects extraction. Trailing
/// partial blocks (dimensions not divisible by 8) pass through untouched.
pub fn jpeg_like(img: &GrayImage, quality: u8) -> GrayImage {
    let qt = scaled_luma_qt(quality);
    let mut out = img.clone();
    for by in 0..img.height / BLOCK {
        for bx in 0..img.width / BLOCK {
            let mut px = [0.0f64; 64];
            for y in 0..BLOCK {
                for x in 0..BLOCK {
                    px[y * BLOCK + x] = img.get(bx * BLOCK + x, by * BLOCK + y) as f64;
                }
            }
            let mut coeffs = dct2_block(&px);
            for (c, &q) in coeffs.iter_mut().zip(qt.iter()) {
                *c = (*c / q).round() * q;
            }
            let back = idct2_block(&coeffs);
            for y in 0..BLOCK {
                for x in 0..BLOCK {
                    out.set(bx * BLOCK + x, by * BLOCK + y, clamp_u8(back[y * BLOCK + x]));
                }
            }
        }
    }
    out
}

/// Bilinear downscale to half size, then bilinear upscale back.
pub fn resize_halfback(img: &GrayImage) -> Result<GrayImage, AttackError> {
    if !img.width.is_multiple_of(2) || !img.height.is_multiple_of(2) {
        return Err(AttackError::OddDimensions(img.width, img.height));
    }
    let (hw, hh) = (img.width / 2, img.height / 2);
    let mut half = GrayImage::filled(hw, hh, 0);
    for y in 0..hh {
        for x in 0..hw {
            // bilinear at 2x downscale = 2x2 box average
            let s = img.get(2 * x, 2 * y) as u32
                + img.get(2 * x + 1, 2 * y) as u32
                + img.get(2 * x, 2 * y + 1) as u32
                + img.get(2 * x + 1, 2 * y + 1) as u32;
            half.set(x, y, ((s + 2) / 4) as u8);
        }
    }
    let mut out = GrayImage::filled(img.width, img.height, 0);
    for y in 0..img.height {
        for x in 0..img.width {
            let sx = (x as f64 - 0.5) / 2.0;
            let sy = (y as f64 - 0.5) / 2.0;
            out.set(x, y, bilinear_clamped(&half, sx, sy));
        }
    }
    Ok(out)
}

fn bilinear_clamped(img: &GrayImage, x: f64, y: f64) -> u8 {
    let x = x.clamp(0.0, (img.width - 1) as f64);
    let y = y.clamp(0.0, (img.height - 1) as f64);
    bilinear_or_zero(img, x, y)
}
