//! Acceptance gate: one test per release criterion, each printing a
//! single pass/fail line. Oracles here are implemented independently of
//! the library code they check (brute-force field arithmetic, exhaustive
//! root enumeration, minimum-weight search over explicit subsets).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines even when everything passes.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wmark::attacks::{jpeg_like, rotate, wiener3x3};
use wmark::bch::BchCode;
use wmark::embedder::{ParityCheck, SyndromePair};
use wmark::galois::{BinaryPoly, Element, FieldTables};
use wmark::image::{synthetic_cover, BitImage, GrayImage};
use wmark::metrics::{ber, ncc};
use wmark::pipeline::{EmbeddingParams, WatermarkCodec};
use wmark::root_lut::{solve_cubic, solve_quadratic, RootTables};

/// Runs a criterion body and prints exactly one `[PASS]`/`[FAIL]` line.
fn criterion(number: u32, summary: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("[PASS] criterion {number}: {summary}"),
        Err(_) => println!("[FAIL] criterion {number}: {summary}"),
    }
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
}

/// Schoolbook GF(2)[x] multiply-and-reduce, the reference for `mul`.
fn slow_mul(a: Element, b: Element, primitive_poly: u32, m: u32) -> Element {
    let mut acc: u32 = 0;
    for i in 0..m {
        if b >> i & 1 == 1 {
            acc ^= (a as u32) << i;
        }
    }
    for d in (m..2 * m).rev() {
        if acc >> d & 1 == 1 {
            acc ^= primitive_poly << (d - m);
        }
    }
    acc as Element
}

#[test]
fn criterion_01_field_oracle() {
    criterion(1, "gf_mul and gf_inv match brute force on all pairs, m in {4, 5}", || {
        for m in [4u32, 5] {
            let f = FieldTables::new(m).unwrap();
            let size = 1u16 << m;
            for a in 0..size {
                for b in 0..size {
                    assert_eq!(
                        f.mul(a, b),
                        slow_mul(a, b, f.primitive_poly(), m),
                        "mul mismatch m={m} a={a} b={b}"
                    );
                }
                if a != 0 {
                    let inv = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, inv), 1, "inv mismatch m={m} a={a}");
                }
            }
            assert!(f.inv(0).is_err());
        }
    });
}

#[test]
fn criterion_02_generator_polynomials() {
    criterion(2, "generator polynomials and (n, k, t) match the published table", || {
        let expected: &[(u32, usize, usize, usize, Option<u64>)] = &[
            (4, 1, 15, 11, Some(0b1_0011)),     // x^4 + x + 1
            (4, 2, 15, 7, Some(0b1_1101_0001)), // x^8 + x^7 + x^6 + x^4 + 1
            (4, 3, 15, 5, None),
            (5, 1, 31, 26, None),
            (5, 2, 31, 21, None),
            (5, 3, 31, 16, None),
        ];
        for &(m, t, n, k, g_bits) in expected {
            let code = BchCode::new(FieldTables::new(m).unwrap(), t).unwrap();
            assert_eq!((code.n(), code.k(), code.t()), (n, k, t), "parameters m={m} t={t}");
            if let Some(bits) = g_bits {
                assert_eq!(code.generator().0, bits, "generator m={m} t={t}");
            }
            assert_eq!(
                code.generator().degree(),
                Some((n - k) as u32),
                "generator degree m={m} t={t}"
            );
            // g(x) divides x^n + 1
            let x_n_plus_1 = BinaryPoly(1 << n | 1);
            assert!(code.generator().divides(x_n_plus_1), "g does not divide x^{n} + 1");
        }
    });
}

#[test]
fn criterion_03_ecc_correction() {
    criterion(
        3,
        "ECC corrects every weight-<=2 pattern (15,7) and 10^4 weight-<=3 (31,16)",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xACC3);

            let c15 = BchCode::new(FieldTables::new(4).unwrap(), 2).unwrap();
            let mut patterns: Vec<Vec<usize>> = (0..15).map(|i| vec![i]).collect();
            for i in 0..15 {
                for j in i + 1..15 {
                    patterns.push(vec![i, j]);
                }
            }
            assert_eq!(patterns.len(), 15 + 105);
            for _ in 0..100 {
                let msg: Vec<u8> = (0..7).map(|_| rng.gen_range(0..2u8)).collect();
                let codeword = c15.encode(&msg).unwrap();
                for pattern in &patterns {
                    let mut received = codeword.clone();
                    for &p in pattern {
                        received[p] ^= 1;
                    }
                    let (decoded, fixed) = c15.decode(&received).unwrap();
                    assert_eq!(decoded, msg, "(15,7,2) failed on pattern {pattern:?}");
                    assert_eq!(fixed, pattern.len());
                }
            }

            let c31 = BchCode::new(FieldTables::new(5).unwrap(), 3).unwrap();
            for _ in 0..10_000 {
                let msg: Vec<u8> = (0..16).map(|_| rng.gen_range(0..2u8)).collect();
                let mut received = c31.encode(&msg).unwrap();
                let weight = rng.gen_range(1..=3usize);
                let mut positions = BTreeSet::new();
                while positions.len() < weight {
                    positions.insert(rng.gen_range(0..31usize));
                }
                for &p in &positions {
                    received[p] ^= 1;
                }
                let (decoded, fixed) = c31.decode(&received).unwrap();
                assert_eq!(decoded, msg, "(31,16,3) failed on positions {positions:?}");
                assert_eq!(fixed, weight);
            }
        },
    );
}

/// Exhaustive root set of y^2 + s1 y + s2 (as a sorted set, multiple
/// roots collapsed).
fn quad_roots_exhaustive(f: &FieldTables, s1: Element, s2: Element) -> Vec<Element> {
    let mut roots: Vec<Element> = (0..=f.n() as Element)
        .filter(|&y| f.add(f.mul(y, y), f.add(f.mul(s1, y), s2)) == 0)
        .collect();
    roots.sort_unstable();
    roots
}

/// Exhaustive root set of x^3 + s1 x^2 + s2 x + s3.
fn cubic_roots_exhaustive(f: &FieldTables, s1: Element, s2: Element, s3: Element) -> Vec<Element> {
    let mut roots: Vec<Element> = (0..=f.n() as Element)
        .filter(|&x| {
            let x2 = f.mul(x, x);
            let x3 = f.mul(x2, x);
            f.add(f.add(x3, f.mul(s1, x2)), f.add(f.mul(s2, x), s3)) == 0
        })
        .collect();
    roots.sort_unstable();
    roots
}

#[test]
fn criterion_04_lut_oracle_equivalence() {
    criterion(4, "LUT solvers equal exhaustive root sets (all GF(16), 10^5 GF(32))", || {
        let f16 = FieldTables::new(4).unwrap();
        let t16 = RootTables::build(&f16);
        for s1 in 0..16u16 {
            for s2 in 0..16u16 {
                assert_eq!(
                    solve_quadratic(&f16, &t16, s1, s2),
                    quad_roots_exhaustive(&f16, s1, s2),
                    "quadratic GF(16) s1={s1} s2={s2}"
                );
                for s3 in 0..16u16 {
                    assert_eq!(
                        solve_cubic(&f16, &t16, s1, s2, s3),
                        cubic_roots_exhaustive(&f16, s1, s2, s3),
                        "cubic GF(16) ({s1}, {s2}, {s3})"
                    );
                }
            }
        }

        let f32 = FieldTables::new(5).unwrap();
        let t32 = RootTables::build(&f32);
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);
        for _ in 0..100_000 {
            let (s1, s2, s3) =
                (rng.gen_range(0..32u16), rng.gen_range(0..32u16), rng.gen_range(0..32u16));
            assert_eq!(
                solve_cubic(&f32, &t32, s1, s2, s3),
                cubic_roots_exhaustive(&f32, s1, s2, s3),
                "cubic GF(32) ({s1}, {s2}, {s3})"
            );
            assert_eq!(
                solve_quadratic(&f32, &t32, s1, s2),
                quad_roots_exhaustive(&f32, s1, s2),
                "quadratic GF(32) ({s1}, {s2})"
            );
        }
    });
}

/// Minimum weight over every subset of at most 3 of the n positions
/// whose syndrome equals (s1, s3); None if all of them miss.
fn brute_force_min_weight(f: &FieldTables, s1: Element, s3: Element) -> Option<usize> {
    let n = f.n();
    let syndrome = |positions: &[usize]| -> (Element, Element) {
        let mut a = 0;
        let mut b = 0;
        for &j in positions {
            a ^= f.alpha_pow(j);
            b ^= f.alpha_pow(3 * j);
        }
        (a, b)
    };
    if (s1, s3) == (0, 0) {
        return Some(0);
    }
    for j in 0..n {
        if syndrome(&[j]) == (s1, s3) {
            return Some(1);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if syndrome(&[i, j]) == (s1, s3) {
                return Some(2);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if syndrome(&[i, j, k]) == (s1, s3) {
                    return Some(3);
                }
            }
        }
    }
    None
}

#[test]
fn criterion_05_covering_property() {
    criterion(5, "every m=4 syndrome pair gets a minimum-weight pattern of weight <= 3", || {
        let f = FieldTables::new(4).unwrap();
        let lut = RootTables::build(&f);
        let pc = ParityCheck::new(f.clone());
        for s1 in 0..16u16 {
            for s3 in 0..16u16 {
                let pattern = pc
                    .find_flip_pattern_lut(&lut, SyndromePair { s1, s3 })
                    .unwrap_or_else(|| panic!("no pattern for ({s1}, {s3})"));
                assert!(pattern.weight() <= 3);
                let min = brute_force_min_weight(&f, s1, s3)
                    .unwrap_or_else(|| panic!("oracle found no pattern for ({s1}, {s3})"));
                assert_eq!(pattern.weight(), min, "weight not minimal for ({s1}, {s3})");
                // the pattern actually produces the requested syndrome
                let mut a = 0;
                let mut b = 0;
                for &j in pattern.positions() {
                    a ^= f.alpha_pow(j);
                    b ^= f.alpha_pow(3 * j);
                }
                assert_eq!((a, b), (s1, s3));
            }
        }
    });
}

/// Photograph-like procedural cover: soft vignette, a horizon gradient,
/// a few rounded objects, and fine texture.
fn natural_cover(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..8)
        .map(|_| {
            (
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.1..0.9),
                rng.gen_range(0.05..0.22),
                rng.gen_range(-55.0..55.0),
            )
        })
        .collect();
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let fx = x as f64 / width as f64;
            let fy = y as f64 / height as f64;
            let mut v = 60.0 + 120.0 * fy; // sky-to-ground gradient
            let r2 = (fx - 0.5).powi(2) + (fy - 0.5).powi(2);
            v *= 1.0 - 0.35 * r2; // vignette
            for &(cx, cy, radius, amp) in &blobs {
                let d2 = (fx - cx).powi(2) + (fy - cy).powi(2);
                v += amp * (-d2 / (radius * radius)).exp();
            }
            v += 4.0 * ((57.0 * fx).sin() * (63.0 * fy).cos()); // fine texture
            v += rng.gen_range(-3.0..3.0); // sensor-like noise
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, pixels).unwrap()
}

fn checkerboard_mark(side: usize) -> BitImage {
    let bits: Vec<u8> =
        (0..side * side).map(|i| (i % side / 8 + i / side / 8).is_multiple_of(2) as u8).collect();
    BitImage::new(side, side, bits).unwrap()
}

/// Embed at defaults and hand back (stego after a u8 file round trip,
/// embed PSNR).
fn embed_default(cover: &GrayImage, mark: &BitImage) -> (WatermarkCodec, GrayImage, f64) {
    let codec = WatermarkCodec::new(EmbeddingParams::default()).unwrap();
    let (stego, report) = codec.embed(cover, &mark.bits).unwrap();
    let reloaded = GrayImage::decode_pgm(&stego.encode_pgm()).unwrap();
    (codec, reloaded, report.psnr_db)
}

fn test_covers() -> [(&'static str, GrayImage); 2] {
    [("synthetic", synthetic_cover(512, 512, 7)), ("natural", natural_cover(512, 512, 8))]
}

#[test]
fn criterion_06_blind_round_trip() {
    criterion(6, "blind 64x64 round trip at defaults: BER = 0, NCC = 1.0 after u8 I/O", || {
        let mark = checkerboard_mark(64);
        for (name, cover) in test_covers() {
            let (codec, stego, _) = embed_default(&cover, &mark);
            let (bits, report) = codec.extract(&stego, mark.bits.len()).unwrap();
            assert_eq!(ber(&bits, &mark.bits).unwrap(), 0.0, "{name}: nonzero BER");
            let extracted = BitImage::from_bits(64, 64, &bits).unwrap();
            assert_eq!(ncc(&mark, &extracted).unwrap(), 1.0, "{name}: NCC below 1");
            assert_eq!(report.decode_failures, 0, "{name}");
        }
    });
}

#[test]
fn criterion_07_imperceptibility() {
    criterion(7, "embed PSNR >= 38 dB at defaults", || {
        let mark = checkerboard_mark(64);
        for (name, cover) in test_covers() {
            let (_, _, psnr_db) = embed_default(&cover, &mark);
            assert!(psnr_db >= 38.0, "{name}: embed PSNR {psnr_db:.2} dB below 38 dB");
        }
    });
}

#[test]
fn criterion_08_robustness() {
    criterion(8, "JPEG q=70: NCC >= 0.85 and BER <= 0.10; wiener beats unaligned rotation", || {
        let mark = checkerboard_mark(64);
        for (name, cover) in test_covers() {
            let (codec, stego, _) = embed_default(&cover, &mark);

            let score = |img: &GrayImage| -> (f64, f64) {
                let (bits, _) = codec.extract(img, mark.bits.len()).unwrap();
                let extracted = BitImage::from_bits(64, 64, &bits).unwrap();
                (ncc(&mark, &extracted).unwrap(), ber(&bits, &mark.bits).unwrap())
            };

            let (jpeg_ncc, jpeg_ber) = score(&jpeg_like(&stego, 70));
            assert!(jpeg_ncc >= 0.85, "{name}: JPEG q=70 NCC {jpeg_ncc:.4} < 0.85");
            assert!(jpeg_ber <= 0.10, "{name}: JPEG q=70 BER {jpeg_ber:.4} > 0.10");

            let (wiener_ncc, _) = score(&wiener3x3(&stego));
            let (rotate_ncc, _) = score(&rotate(&stego, 2.0));
            assert!(
                wiener_ncc >= rotate_ncc,
                "{name}: wiener NCC {wiener_ncc:.4} < unaligned 2-degree rotation NCC {rotate_ncc:.4}"
            );
        }
    });
}

#[test]
fn criterion_09_lut_speedup() {
    criterion(9, "LUT flip search >= 2x faster than Chien, 100% weight agreement, < 60 s", || {
        let start = Instant::now();
        let f = FieldTables::new(5).unwrap();
        let lut = RootTables::build(&f);
        let pc = ParityCheck::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(0xACC9);
        let syndromes: Vec<SyndromePair> = (0..100_000)
            .map(|_| SyndromePair { s1: rng.gen_range(0..32), s3: rng.gen_range(0..32) })
            .collect();

        // batch timings so each estimate sits well above timer resolution
        let time = |mut search: Box<dyn FnMut(SyndromePair) -> Option<usize>>| -> (f64, Vec<Option<usize>>) {
            let mut weights = Vec::with_capacity(syndromes.len());
            let mut batch_ns = Vec::new();
            for batch in syndromes.chunks(256) {
                let t = Instant::now();
                for &s in batch {
                    weights.push(search(s));
                }
                batch_ns.push(t.elapsed().as_nanos() as f64 / batch.len() as f64);
            }
            batch_ns.sort_by(|a, b| a.total_cmp(b));
            (batch_ns[batch_ns.len() / 2], weights)
        };

        let (lut_median, lut_weights) =
            time(Box::new(|s| pc.find_flip_pattern_lut(&lut, s).map(|p| p.weight())));
        let (chien_median, chien_weights) =
            time(Box::new(|s| pc.find_flip_pattern_chien(s).map(|p| p.weight())));

        assert_eq!(lut_weights, chien_weights, "weight disagreement between searches");
        assert!(
            chien_median >= 2.0 * lut_median,
            "LUT median {lut_median:.1} ns vs Chien {chien_median:.1} ns: speedup {:.2}x < 2x",
            chien_median / lut_median
        );
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs() < 60, "criterion took {elapsed:?}, budget is 60 s");
    });
}

#[test]
fn criterion_10_deterministic_evaluation() {
    criterion(10, "two evaluate runs with one seed emit byte-identical CSV", || {
        let dir = std::env::temp_dir().join(format!("wmark-acceptance-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cover_path = dir.join("cover.pgm");
        let mark_path = dir.join("mark.pbm");
        synthetic_cover(512, 512, 7).write_pgm(&cover_path).unwrap();
        checkerboard_mark(64).write_pbm(&mark_path).unwrap();

        let run = |out: &std::path::Path| {
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_wmark"))
                .args(["evaluate", "--cover"])
                .arg(&cover_path)
                .arg("--mark")
                .arg(&mark_path)
                .args([
                    "--attack",
                    "jpeg:q=70,noise:var=0.01,rotate:deg=2,realign,wiener3x3,resize:half",
                    "--seed",
                    "31337",
                    "--report",
                ])
                .arg(out)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(out).unwrap()
        };
        let first = run(&dir.join("run1.csv"));
        let second = run(&dir.join("run2.csv"));
        assert!(!first.is_empty());
        assert_eq!(first, second, "evaluate CSV differs between identical runs");
        std::fs::remove_dir_all(&dir).ok();
    });
}
