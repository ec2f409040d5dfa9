//! Command-line front end: embed, extract, attack, evaluate, bench, and
//! tables.
//!
//! Exit codes: 0 success, 1 file I/O, 2 capacity or configuration,
//! 3 internal invariant violation.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wmark::attacks::{AttackError, AttackSpec};
use wmark::bch::BchCode;
use wmark::embedder::{ParityCheck, SyndromePair};
use wmark::galois::FieldTables;
use wmark::image::{synthetic_cover, BitImage, GrayImage, ImageError};
use wmark::metrics::{ber, ncc, psnr};
use wmark::pipeline::{EmbeddingParams, FlipSearch, PipelineError, WatermarkCodec};
use wmark::root_lut::RootTables;

#[derive(Parser)]
#[command(
    name = "wmark",
    version,
    about = "Blind DCT-domain image watermarking with syndrome coding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a binary watermark into a grayscale cover image.
    Embed {
        #[command(flatten)]
        params: ParamArgs,
        /// Cover image (PGM, P5).
        #[arg(long)]
        cover: PathBuf,
        /// Watermark bitmap (PBM, P4).
        #[arg(long)]
        mark: PathBuf,
        /// Output stego image (PGM, P5).
        #[arg(long)]
        out: PathBuf,
        /// Write the key=value report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Blindly extract a watermark from a stego image.
    Extract {
        #[command(flatten)]
        params: ParamArgs,
        /// Stego image (PGM, P5).
        #[arg(long)]
        stego: PathBuf,
        /// Watermark width in pixels.
        #[arg(long)]
        mark_width: usize,
        /// Watermark height in pixels.
        #[arg(long)]
        mark_height: usize,
        /// Output watermark bitmap (PBM, P4).
        #[arg(long)]
        out: PathBuf,
        /// Write the key=value report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply one attack to an image and write the result.
    Attack {
        /// Input image (PGM, P5).
        #[arg(long)]
        input: PathBuf,
        /// Attack spec, e.g. "wiener3x3", "noise:var=0.01",
        /// "rotate:deg=2,realign", "jpeg:q=70", "resize:half".
        #[arg(long)]
        attack: String,
        /// Seed for stochastic attacks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output image (PGM, P5).
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed, attack, extract, and score across a grid of attacks (CSV).
    Evaluate {
        #[command(flatten)]
        params: ParamArgs,
        /// Cover image (PGM, P5).
        #[arg(long)]
        cover: PathBuf,
        /// Watermark bitmap (PBM, P4).
        #[arg(long)]
        mark: PathBuf,
        /// Comma-separated attack specs; repeatable. A bare "realign"
        /// segment binds to the rotate spec before it.
        #[arg(long = "attack")]
        attacks: Vec<String>,
        /// Seed for stochastic attacks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time the lookup-table flip search against the Chien-search
    /// baseline (CSV).
    Bench {
        /// Field degree of the embedding code.
        #[arg(long, default_value_t = 5)]
        m: u32,
        /// Random syndromes per method; at least 10000.
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Seed for the syndrome stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print supported BCH code parameters (n, k, t, rate, t/n).
    Tables {
        /// Restrict to one field degree.
        #[arg(long)]
        m: Option<u32>,
        /// Restrict to one error-correction capability.
        #[arg(long)]
        t: Option<usize>,
    },
}

/// Embedding parameters shared by embed, extract, and evaluate.
#[derive(Args, Clone)]
struct ParamArgs {
    /// Field degree of the embedding code.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(4..=5))]
    m: u32,
    /// ECC protection code as n,k,t.
    #[arg(long, value_parser = parse_ecc, default_value = "31,16,3")]
    ecc: (usize, usize, usize),
    /// Quantization step in luminance units.
    #[arg(long, default_value_t = EmbeddingParams::default().delta)]
    delta: f64,
    /// Key seed for the slot and block-order permutations.
    #[arg(long, default_value_t = 0)]
    key: u64,
}

impl ParamArgs {
    fn to_params(&self) -> EmbeddingParams {
        let defaults = EmbeddingParams::default();
        let band = if self.m == defaults.m {
            defaults.band
        } else {
            // smaller field: the default band already holds enough slots
            defaults.band.into_iter().take(64).collect()
        };
        EmbeddingParams { m: self.m, ecc: self.ecc, delta: self.delta, key: self.key, band }
    }
}

fn parse_ecc(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected n,k,t".into());
    }
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse()).collect();
    let nums = nums.map_err(|_| format!("cannot parse {s:?} as n,k,t"))?;
    Ok((nums[0], nums[1], nums[2]))
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<ImageError> for CliError {
    fn from(e: ImageError) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Field(_) | PipelineError::Bch(_) => CliError::internal(e.to_string()),
            _ => CliError::config(e.to_string()),
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        CliError::config(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Embed { params, cover, mark, out, report } => {
            cmd_embed(&params.to_params(), &cover, &mark, &out, report.as_deref())
        }
        Command::Extract { params, stego, mark_width, mark_height, out, report } => cmd_extract(
            &params.to_params(),
            &stego,
            mark_width,
            mark_height,
            &out,
            report.as_deref(),
        ),
        Command::Attack { input, attack, seed, out } => {
            let spec: AttackSpec = attack.parse()?;
            let img = GrayImage::read_pgm(&input)?;
            let attacked = spec.apply(&img, seed)?;
            attacked.write_pgm(&out)?;
            Ok(())
        }
        Command::Evaluate { params, cover, mark, attacks, seed, report } => {
            let grid = parse_attack_grid(&attacks)?;
            cmd_evaluate(&params.to_params(), &cover, &mark, &grid, seed, report.as_deref())
        }
        Command::Bench { m, trials, seed, report } => cmd_bench(m, trials, seed, report.as_deref()),
        Command::Tables { m, t } => cmd_tables(m, t),
    }
}

fn write_report(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(e.to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_embed(
    params: &EmbeddingParams,
    cover: &std::path::Path,
    mark: &std::path::Path,
    out: &std::path::Path,
    report: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let cover = GrayImage::read_pgm(cover)?;
    let mark = BitImage::read_pbm(mark)?;
    let codec = WatermarkCodec::new(params.clone())?;
    let (stego, er) = codec.embed(&cover, &mark.bits)?;
    stego.write_pgm(out)?;
    let mut text = er.to_key_values(params);
    let _ = writeln!(text, "mark_size={}x{}", mark.width, mark.height);
    write_report(&text, report)
}

fn cmd_extract(
    params: &EmbeddingParams,
    stego: &std::path::Path,
    mark_width: usize,
    mark_height: usize,
    out: &std::path::Path,
    report: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if mark_width == 0 || mark_height == 0 {
        return Err(CliError::config("watermark dimensions must be positive"));
    }
    let stego = GrayImage::read_pgm(stego)?;
    let codec = WatermarkCodec::new(params.clone())?;
    let (bits, xr) = codec.extract(&stego, mark_width * mark_height)?;
    let mark = BitImage::from_bits(mark_width, mark_height, &bits)
        .map_err(|e| CliError::internal(e.to_string()))?;
    mark.write_pbm(out)?;
    let mut text = xr.to_key_values(params);
    let _ = writeln!(text, "mark_size={mark_width}x{mark_height}");
    write_report(&text, report)
}

/// Splits repeated/comma-joined attack flags into specs. Rotate's
/// "realign" modifier contains no '=' and re-attaches to the segment
/// before it, so "rotate:deg=2,realign,jpeg:q=70" parses as two specs.
fn parse_attack_grid(raw: &[String]) -> Result<Vec<AttackSpec>, CliError> {
    let mut joined: Vec<String> = Vec::new();
    for arg in raw {
        for seg in arg.split(',') {
            let seg = seg.trim();
            if seg.is_empty() {
                continue;
            }
            if seg == "realign" {
                match joined.last_mut() {
                    Some(prev) => {
                        prev.push_str(",realign");
                        continue;
                    }
                    None => return Err(CliError::config("realign needs a rotate spec before it")),
                }
            }
            joined.push(seg.to_string());
        }
    }
    joined.iter().map(|s| s.parse::<AttackSpec>().map_err(CliError::from)).collect()
}

/// One CSV row per attack; metric formatting is fixed-precision so runs
/// with the same seed are byte-identical. A failing attack leaves "err"
/// in its metric columns instead of aborting the grid.
fn cmd_evaluate(
    params: &EmbeddingParams,
    cover: &std::path::Path,
    mark: &std::path::Path,
    grid: &[AttackSpec],
    seed: u64,
    report: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let cover = GrayImage::read_pgm(cover)?;
    let mark = BitImage::read_pbm(mark)?;
    let codec = WatermarkCodec::new(params.clone())?;
    let (stego, _) = codec.embed(&cover, &mark.bits)?;

    let mut csv = String::from("attack,psnr_db,ncc,ber,ecc_corrections\n");
    for spec in grid {
        let row = evaluate_row(&codec, &stego, &mark, spec, seed);
        match row {
            Ok((p, n, b, c)) => {
                let p = if p.is_finite() { format!("{p:.4}") } else { "inf".to_string() };
                let _ = writeln!(csv, "{spec},{p},{n:.6},{b:.6},{c}");
            }
            Err(e) => {
                eprintln!("attack {spec} failed: {}", e.message);
                let _ = writeln!(csv, "{spec},err,err,err,err");
            }
        }
    }
    write_report(&csv, report)
}

fn evaluate_row(
    codec: &WatermarkCodec,
    stego: &GrayImage,
    mark: &BitImage,
    spec: &AttackSpec,
    seed: u64,
) -> Result<(f64, f64, f64, usize), CliError> {
    let attacked = spec.apply(stego, seed)?;
    let p = psnr(stego, &attacked).map_err(|e| CliError::internal(e.to_string()))?;
    let (bits, xr) = codec.extract(&attacked, mark.bits.len())?;
    let extracted = BitImage::from_bits(mark.width, mark.height, &bits)
        .map_err(|e| CliError::internal(e.to_string()))?;
    let n = ncc(mark, &extracted).map_err(|e| CliError::config(e.to_string()))?;
    let b = ber(&bits, &mark.bits).map_err(|e| CliError::internal(e.to_string()))?;
    Ok((p, n, b, xr.ecc_corrections))
}

/// Times both flip searches over a shared random syndrome stream.
/// Per-call latency is estimated from fixed-size call batches; median
/// and p99 are taken over batch means.
fn cmd_bench(
    m: u32,
    trials: usize,
    seed: u64,
    report: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if trials < 10_000 {
        return Err(CliError::config(format!("trials must be at least 10000, got {trials}")));
    }
    let field = FieldTables::new(m).map_err(|e| CliError::config(e.to_string()))?;
    let build_start = Instant::now();
    let lut = RootTables::build(&field);
    let build_ms = build_start.elapsed().as_secs_f64() * 1e3;
    let pc = ParityCheck::new(field.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = 1u16 << m;
    let syndromes: Vec<SyndromePair> = (0..trials)
        .map(|_| SyndromePair { s1: rng.gen_range(0..size), s3: rng.gen_range(0..size) })
        .collect();

    let (lut_stats, lut_weights) =
        time_batches(&syndromes, |s| pc.find_flip_pattern_lut(&lut, *s).map(|p| p.weight()));
    let (chien_stats, chien_weights) =
        time_batches(&syndromes, |s| pc.find_flip_pattern_chien(*s).map(|p| p.weight()));
    let agree = lut_weights.iter().zip(&chien_weights).filter(|(a, b)| a == b).count();
    let agreement_pct = 100.0 * agree as f64 / trials as f64;

    let cover = synthetic_cover(256, 256, seed);
    let payload: Vec<u8> = (0..2048).map(|_| rng.gen_range(0..2u8)).collect();
    let ecc = match m {
        4 => (15, 7, 2),
        _ => (31, 16, 3),
    };
    let params = EmbeddingParams { m, ecc, key: seed, ..EmbeddingParams::default() };
    let codec = WatermarkCodec::new(params)?;
    // untimed warm-up so thread-pool startup is not charged to one method
    let _ = embed_throughput(&codec, &cover, &payload, FlipSearch::Lut)?;
    let lut_tp = embed_throughput(&codec, &cover, &payload, FlipSearch::Lut)?;
    let chien_tp = embed_throughput(&codec, &cover, &payload, FlipSearch::Chien)?;

    let mut csv = String::from(
        "method,table_build_ms,median_ns,p99_ns,weight_agreement_pct,embed_blocks_per_s\n",
    );
    let _ = writeln!(
        csv,
        "lut,{build_ms:.3},{:.1},{:.1},{agreement_pct:.2},{lut_tp:.0}",
        lut_stats.0, lut_stats.1
    );
    let _ = writeln!(
        csv,
        "chien,0.000,{:.1},{:.1},{agreement_pct:.2},{chien_tp:.0}",
        chien_stats.0, chien_stats.1
    );
    write_report(&csv, report)
}

const BENCH_BATCH: usize = 64;

fn time_batches<F>(syndromes: &[SyndromePair], mut f: F) -> ((f64, f64), Vec<Option<usize>>)
where
    F: FnMut(&SyndromePair) -> Option<usize>,
{
    let mut weights = Vec::with_capacity(syndromes.len());
    let mut per_call_ns = Vec::with_capacity(syndromes.len() / BENCH_BATCH + 1);
    for batch in syndromes.chunks(BENCH_BATCH) {
        let t = Instant::now();
        for s in batch {
            weights.push(f(s));
        }
        per_call_ns.push(t.elapsed().as_nanos() as f64 / batch.len() as f64);
    }
    per_call_ns.sort_by(|a, b| a.total_cmp(b));
    let median = per_call_ns[per_call_ns.len() / 2];
    let p99 = per_call_ns[(per_call_ns.len() - 1).min(per_call_ns.len() * 99 / 100)];
    ((median, p99), weights)
}

fn embed_throughput(
    codec: &WatermarkCodec,
    cover: &GrayImage,
    payload: &[u8],
    search: FlipSearch,
) -> Result<f64, CliError> {
    let t = Instant::now();
    let (_, report) = codec.embed_with(cover, payload, search)?;
    Ok(report.blocks_used as f64 / t.elapsed().as_secs_f64())
}

fn cmd_tables(m_filter: Option<u32>, t_filter: Option<usize>) -> Result<(), CliError> {
    let combos: Vec<(u32, usize)> = [(4u32, 1usize), (4, 2), (4, 3), (5, 1), (5, 2), (5, 3)]
        .into_iter()
        .filter(|(m, t)| m_filter.is_none_or(|f| f == *m) && t_filter.is_none_or(|f| f == *t))
        .collect();
    if combos.is_empty() {
        return Err(CliError::config(format!(
            "unsupported parameters: m = {m_filter:?}, t = {t_filter:?} (m in {{4, 5}}, t in 1..=3)"
        )));
    }
    println!("{:>2} {:>3} {:>3} {:>2} {:>6} {:>6}", "m", "n", "k", "t", "R", "t/n");
    for (m, t) in combos {
        let field = FieldTables::new(m).map_err(|e| CliError::internal(e.to_string()))?;
        let code = BchCode::new(field, t).map_err(|e| CliError::config(e.to_string()))?;
        println!(
            "{:>2} {:>3} {:>3} {:>2} {:>6.3} {:>6.3}",
            m,
            code.n(),
            code.k(),
            code.t(),
            code.k() as f64 / code.n() as f64,
            code.t() as f64 / code.n() as f64
        );
    }
    Ok(())
}
