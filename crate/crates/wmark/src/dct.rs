//! Orthonormal 8x8 DCT-II pair plus the zigzag coefficient ordering.
//!
//! Pixels are level-shifted by -128 on the forward transform and shifted
//! back on the inverse, so a flat block at 128 has an all-zero spectrum.

pub const BLOCK: usize = 8;

/// Zigzag index -> raster index within an 8x8 block.
pub const ZIGZAG: [usize; 64] = build_zigzag();

const fn build_zigzag() -> [usize; 64] {
    let mut table = [0usize; 64];
    let mut idx = 0;
    let mut d = 0;
    while d < 15 {
        // walk each anti-diagonal, alternating direction
        let mut i = if d < 8 { 0 } else { d - 7 };
        let max = if d < 8 { d } else { 7 };
        while i <= max {
            let (r, c) = if d % 2 == 0 { (d - i, i) } else { (i, d - i) };
            table[idx] = r * 8 + c;
            idx += 1;
            i += 1;
        }
        d += 1;
    }
    table
}

fn basis() -> [[f64; BLOCK]; BLOCK] {
    let mut m = [[0.0; BLOCK]; BLOCK];
    let norm0 = (1.0 / BLOCK as f64).sqrt();
    let norm = (2.0 / BLOCK as f64).sqrt();
    for (u, row) in m.iter_mut().enumerate() {
        for (x, v) in row.iter_mut().enumerate() {
            let c = if u == 0 { norm0 } else { norm };
            *v = c
                * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / (2.0 * BLOCK as f64))
                    .cos();
        }
    }
    m
}

/// Forward orthonormal DCT-II of an 8x8 pixel block (values row-major),
/// with the -128 level shift applied first.
pub fn dct2_block(pixels: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    // rows
    for r in 0..BLOCK {
        for u in 0..BLOCK {
            let mut acc = 0.0;
            for x in 0..BLOCK {
                acc += b[u][x] * (pixels[r * BLOCK + x] - 128.0);
            }
            tmp[r * BLOCK + u] = acc;
        }
    }
    // columns
    let mut out = [0.0; 64];
    for c in 0..BLOCK {
        for u in 0..BLOCK {
            let mut acc = 0.0;
            for y in 0..BLOCK {
                acc += b[u][y] * tmp[y * BLOCK + c];
            }
            out[u * BLOCK + c] = acc;
        }
    }
    out
}

/// Inverse of [`dct2_block`], including the +128 shift back.
pub fn idct2_block(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    for c in 0..BLOCK {
        for y in 0..BLOCK {
            let mut acc = 0.0;
            for u in 0..BLOCK {
                acc += b[u][y] * coeffs[u * BLOCK + c];
            }
            tmp[y * BLOCK + c] = acc;
        }
    }
    let mut out = [0.0; 64];
    for r in 0..BLOCK {
        for x in 0..BLOCK {
            let mut acc = 0.0;
            for u in 0..BLOCK {
                acc += b[u][x] * tmp[r * BLOCK + u];
            }
            out[r * BLOCK + x] = acc + 128.0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zigzag_is_a_permutation() {
        let mut seen = [false; 64];
        for &i in &ZIGZAG {
            assert!(!seen[i]);
            seen[i] = true;
        }
        assert_eq!(ZIGZAG[0], 0);
        assert_eq!(ZIGZAG[1], 1); // (0,1)
        assert_eq!(ZIGZAG[2], 8); // (1,0)
        assert_eq!(ZIGZAG[63], 63);
    }

    #[test]
    fn constant_blocks() {
        let flat = [128.0; 64];
        let c = dct2_block(&flat);
        assert!(c.iter().all(|&v| v.abs() < 1e-9));
        let bright = [136.0; 64];
        let c = dct2_block(&bright);
        assert!((c[0] - 64.0).abs() < 1e-9);
        assert!(c[1..].iter().all(|&v| v.abs() < 1e-9));
    }

    #[test]
    fn roundtrip_random_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let mut px = [0.0; 64];
            for v in px.iter_mut() {
                *v = rng.gen_range(0.0..255.0);
            }
            let back = idct2_block(&dct2_block(&px));
            for (a, b) in px.iter().zip(&back) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
