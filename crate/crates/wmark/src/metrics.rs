//! Pixel-domain and bit-domain quality measures: MSE, PSNR, NCC, BER.
//!
//! NCC is implemented in its asymmetric normalized-by-reference form,
//! sum(w * w') / sum(w^2). That form scores an all-ones extraction as 1.0
//! against any nonzero reference, so reports always carry BER alongside.

use crate::image::{BitImage, GrayImage};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("bit stream lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("NCC reference watermark is all zero")]
    ZeroReference,
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricError> {
    if a.width != b.width || a.height != b.height {
        return Err(MetricError::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let sum: f64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / (a.width * a.height) as f64)
}

/// 10 log10(255^2 / MSE); `f64::INFINITY` for identical images. File
/// writers serialize the infinite case as the string "inf", never as a
/// float special value.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricError> {
    let e = mse(a, b)?;
    if e == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(10.0 * (255.0f64 * 255.0 / e).log10())
    }
}

/// Normalized correlation of an extracted watermark against the embedded
/// reference, sum(w w') / sum(w^2).
pub fn ncc(reference: &BitImage, extracted: &BitImage) -> Result<f64, MetricError> {
    if reference.width != extracted.width || reference.height != extracted.height {
        return Err(MetricError::DimensionMismatch(
            reference.width,
            reference.height,
            extracted.width,
            extracted.height,
        ));
    }
    let denom: u64 = reference.bits.iter().map(|&w| (w & 1) as u64).sum();
    if denom == 0 {
        return Err(MetricError::ZeroReference);
    }
    let num: u64 =
        reference.bits.iter().zip(&extracted.bits).map(|(&w, &w2)| ((w & w2) & 1) as u64).sum();
    Ok(num as f64 / denom as f64)
}

/// Bit error rate: Hamming distance / length.
pub fn ber(bits: &[u8], reference: &[u8]) -> Result<f64, MetricError> {
    if bits.len() != reference.len() {
        return Err(MetricError::LengthMismatch(bits.len(), reference.len()));
    }
    let errors = bits.iter().zip(reference).filter(|(a, b)| (**a ^ **b) & 1 != 0).count();
    Ok(errors as f64 / bits.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(pixels: Vec<u8>) -> GrayImage {
        GrayImage::new(pixels.len(), 1, pixels).unwrap()
    }

    #[test]
    fn mse_examples() {
        let a = gray(vec![10, 20, 30]);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        let b = gray(vec![11, 21, 31]);
        assert_eq!(mse(&a, &b).unwrap(), 1.0);
        let z = gray(vec![0, 0, 0]);
        let f = gray(vec![255, 255, 255]);
        assert_eq!(mse(&z, &f).unwrap(), 65025.0);
        assert!(mse(&a, &GrayImage::filled(2, 2, 0)).is_err());
    }

    #[test]
    fn psnr_examples() {
        let a = gray(vec![10, 20, 30]);
        let b = gray(vec![11, 21, 31]);
        assert!((psnr(&a, &b).unwrap() - 48.13).abs() < 0.01);
        assert!(psnr(&a, &a).unwrap().is_infinite());
        let z = gray(vec![0; 4]);
        let f = gray(vec![255; 4]);
        assert!(psnr(&z, &f).unwrap().abs() < 1e-12);
    }

    #[test]
    fn psnr_decreases_with_mse() {
        let base = GrayImage::filled(8, 8, 100);
        let mut last = f64::INFINITY;
        for step in [1u8, 2, 5, 10, 40] {
            let distorted = GrayImage::filled(8, 8, 100 + step);
            let p = psnr(&base, &distorted).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ncc_examples_and_asymmetry() {
        let w = BitImage::new(4, 1, vec![1, 0, 1, 0]).unwrap();
        assert_eq!(ncc(&w, &w).unwrap(), 1.0);
        let comp = BitImage::new(4, 1, vec![0, 1, 0, 1]).unwrap();
        assert_eq!(ncc(&w, &comp).unwrap(), 0.0);
        // the asymmetry pitfall is real: all-ones scores a perfect 1.0
        let ones = BitImage::new(4, 1, vec![1, 1, 1, 1]).unwrap();
        assert_eq!(ncc(&w, &ones).unwrap(), 1.0);
        let zero = BitImage::new(4, 1, vec![0; 4]).unwrap();
        assert_eq!(ncc(&zero, &w), Err(MetricError::ZeroReference));
    }

    #[test]
    fn ber_examples() {
        assert_eq!(ber(&[1, 0, 1], &[1, 0, 1]).unwrap(), 0.0);
        assert_eq!(ber(&[0, 1, 0], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(ber(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap(), 0.5);
        assert!(ber(&[1], &[1, 0]).is_err());
    }
}
