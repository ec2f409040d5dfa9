//! Blind digital-image watermarking based on BCH syndrome coding in the
//! 8x8 DCT domain.
//!
//! The watermark bitstream is protected by a systematic BCH code, then
//! hidden block by block as the syndrome of a set of quantized DCT
//! coefficients. Embedding a 2m-bit chunk into a block means finding a
//! flip pattern of weight <= 3 whose syndrome matches the target; root
//! finding for the locator polynomials is done with precomputed lookup
//! tables for the canonical quadratics y^2 + y + i and cubics y^3 + y + i,
//! with an exhaustive Chien-style search kept around as a baseline.
//!
//! Modules:
//! - [`galois`]: GF(2^m) arithmetic on log/antilog tables, m in {4, 5}
//! - [`bch`]: systematic BCH encode / Berlekamp-Massey / Chien decode
//! - [`root_lut`]: quadratic and cubic root lookup tables
//! - [`embedder`]: syndrome-coding flip-pattern search (LUT and Chien)
//! - [`dct`]: orthonormal 8x8 DCT-II pair and zigzag ordering
//! - [`image`]: grayscale PGM and bilevel PBM I/O
//! - [`pipeline`]: full embed/extract orchestration over an image
//! - [`attacks`]: robustness attack battery
//! - [`metrics`]: MSE / PSNR / NCC / BER

pub mod attacks;
pub mod bch;
pub mod dct;
pub mod embedder;
pub mod galois;
pub mod image;
pub mod metrics;
pub mod pipeline;
pub mod root_lut;
