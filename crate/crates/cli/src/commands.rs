use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cdenoise::bounds::{union_bound_pe, worst_case_union_bound};
use cdenoise::codec::{
    build_random_codebook, codebook_distortion, lloyd_codebook, load_codebook, save_codebook,
};
use cdenoise::imagelab::{decode_pgm, extract_patches, patch_denoise, psnr, read_pgm, write_pgm};
use cdenoise::rdp::{dp_function, gaussian_mmse_reference, DpParams};
use cdenoise::sim::{empirical_pe, run_denoise_trials, Source, TrialConfig};
use cdenoise::Signal;

use crate::samples::read_samples;
use crate::CliError;

pub const TRIALS_CSV_HEADER: &str = "trial,err_norm,dist_norm,upper,violated,decode_error";
pub const PE_CSV_HEADER: &str = "empirical_pe,wilson_low,wilson_high,union_bound,worst_case_bound";
pub const DP_CSV_HEADER: &str = "P,D";

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Random,
    Lloyd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SourceKind {
    Codewords,
    Samples,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Sample file (one signal per line) or binary PGM image.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rate: u32,
    #[arg(long, value_enum, default_value_t = Method::Lloyd)]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Patch side, required for PGM input.
    #[arg(long)]
    patch: Option<usize>,
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum, default_value_t = SourceKind::Codewords)]
    source: SourceKind,
    /// Clean-sample pool for `--source samples`.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Include the per-trial array in JSON output.
    #[arg(long)]
    per_trial: bool,
}

#[derive(Debug, Args)]
pub struct PeArgs {
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Squared norm of the distortion vector d.
    #[arg(long, default_value_t = 0.0)]
    dp: f64,
    /// File holding the direction of d (one line).
    #[arg(long)]
    direction: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("params").required(true).args(["dstar", "gaussian_ref"])))]
pub struct DpCurveArgs {
    #[arg(long, requires = "pstar")]
    dstar: Option<f64>,
    #[arg(long, requires = "dstar")]
    pstar: Option<f64>,
    /// Derive (D*, P*) from source std s and noise std sigma.
    #[arg(long, num_args = 2, value_names = ["S", "SIGMA"], conflicts_with_all = ["dstar", "pstar"])]
    gaussian_ref: Option<Vec<f64>>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Right end of the perception grid; defaults to 2 P* (1 when P* = 0).
    #[arg(long)]
    pmax: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DenoiseImageArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    codebook: PathBuf,
    #[arg(long)]
    patch: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    #[arg(long)]
    out: PathBuf,
    /// Clean reference for PSNR reporting.
    #[arg(long)]
    clean: Option<PathBuf>,
}

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    emit(&(text + "\n"))
}

fn is_pgm(path: &Path) -> Result<bool, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(bytes.starts_with(b"P5") || bytes.starts_with(b"P2"))
}

pub fn codebook_build(args: BuildArgs) -> Result<(), CliError> {
    let samples = if is_pgm(&args.input)? {
        let k = args
            .patch
            .ok_or_else(|| CliError::Usage("--patch is required for PGM input".into()))?;
        let bytes = fs::read(&args.input)?;
        let image = decode_pgm(&bytes)?;
        extract_patches(&image, k, args.stride)?.signals
    } else {
        read_samples(&args.input)?
    };
    let (codebook, iterations) = match args.method {
        Method::Random => (build_random_codebook(&samples, args.rate, args.seed)?, 0),
        Method::Lloyd => {
            let res = lloyd_codebook(&samples, args.rate, args.iters, args.tol, args.seed)?;
            let n = res.distortion_history.len();
            (res.codebook, n)
        }
    };
    let training_distortion = codebook_distortion(&codebook, &samples)?;
    save_codebook(&codebook, &args.out)?;
    emit_json(&json!({
        "dim": codebook.dim(),
        "rate_bits": codebook.rate_bits(),
        "training_distortion": training_distortion,
        "method": match args.method { Method::Random => "random", Method::Lloyd => "lloyd" },
        "iterations": iterations,
        "n_samples": samples.len(),
    }))
}

pub fn verify_bounds(args: VerifyArgs) -> Result<(), CliError> {
    if !(args.eta > 0.0 && args.eta < 1.0) {
        return Err(CliError::Usage(format!("--eta must lie in (0, 1), got {}", args.eta)));
    }
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let codebook = load_codebook(&args.codebook)?;
    let pool;
    let source = match args.source {
        SourceKind::Codewords => Source::Codewords,
        SourceKind::Samples => {
            let path = args
                .samples
                .as_ref()
                .ok_or_else(|| CliError::Usage("--source samples needs --samples".into()))?;
            pool = read_samples(path)?;
            Source::Samples(&pool)
        }
    };
    let config = TrialConfig {
        codebook: &codebook,
        sigma: args.sigma,
        eta: args.eta,
        n_trials: args.trials,
        master_seed: args.seed,
        source,
    };
    let report = run_denoise_trials(&config)?;
    if report.guarantee_prob == 0.0 {
        eprintln!(
            "warning: vacuous guarantee: eta * R = {} <= 2, the envelope holds with probability >= 0",
            args.eta * f64::from(codebook.rate_bits())
        );
    }
    match args.format {
        Format::Csv => {
            let mut text = String::from(TRIALS_CSV_HEADER);
            text.push('\n');
            for t in &report.trials {
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    t.trial, t.err_norm, t.dist_norm, t.upper, t.violated, t.decode_error
                ));
            }
            emit(&text)
        }
        Format::Json => {
            let mut value = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
            let obj = value.as_object_mut().expect("report serializes to an object");
            obj.insert("vacuous".into(), Value::Bool(report.guarantee_prob == 0.0));
            if !args.per_trial {
                obj.remove("trials");
            }
            emit_json(&value)
        }
    }
}

pub fn pe(args: PeArgs) -> Result<(), CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let codebook = load_codebook(&args.codebook)?;
    let direction = match &args.direction {
        Some(path) => {
            let mut rows = read_samples(path)?;
            if rows.len() != 1 {
                return Err(CliError::Io(format!(
                    "{}: expected one direction line, found {}",
                    path.display(),
                    rows.len()
                )));
            }
            rows.pop()
        }
        None => None,
    };
    let estimate = empirical_pe(&codebook, direction.as_ref(), args.dp, args.sigma, args.trials, args.seed)?;
    let d = match &direction {
        Some(dir) if args.dp > 0.0 => dir.unit()?.scale(args.dp.sqrt())?,
        _ => Signal::zeros(codebook.dim())?,
    };
    let union_bound = union_bound_pe(&codebook, &d, args.sigma)?;
    let worst_case_bound = worst_case_union_bound(&codebook, args.dp, args.sigma)?;
    match args.format {
        Format::Csv => emit(&format!(
            "{PE_CSV_HEADER}\n{},{},{},{},{}\n",
            estimate.estimate, estimate.wilson_low, estimate.wilson_high, union_bound, worst_case_bound
        )),
        Format::Json => emit_json(&json!({
            "empirical_pe": estimate.estimate,
            "wilson_low": estimate.wilson_low,
            "wilson_high": estimate.wilson_high,
            "union_bound": union_bound,
            "worst_case_bound": worst_case_bound,
            "errors": estimate.errors,
            "trials": estimate.trials,
            "sigma": args.sigma,
            "dp": args.dp,
            "master_seed": args.seed,
            "generator": cdenoise::rng::GENERATOR_NAME,
        })),
    }
}

pub fn dp_curve(args: DpCurveArgs) -> Result<(), CliError> {
    let params = match (&args.gaussian_ref, args.dstar, args.pstar) {
        (Some(v), _, _) => gaussian_mmse_reference(v[0], v[1])?,
        (None, Some(d), Some(p)) => DpParams::new(d, p)?,
        _ => return Err(CliError::Usage("give --dstar and --pstar, or --gaussian-ref".into())),
    };
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let pmax = args.pmax.unwrap_or(if params.p_star() > 0.0 { 2.0 * params.p_star() } else { 1.0 });
    if !(pmax.is_finite() && pmax > 0.0) {
        return Err(CliError::Usage(format!("--pmax must be positive, got {pmax}")));
    }
    let mut text = String::from(DP_CSV_HEADER);
    text.push('\n');
    let last = (args.points - 1) as f64;
    for i in 0..args.points {
        let p = i as f64 / last * pmax;
        text.push_str(&format!("{p},{}\n", dp_function(params, p)?));
    }
    emit(&text)
}

/// PSNR as a JSON number, or the string "inf" for identical images.
fn psnr_value(db: f64) -> Value {
    if db.is_infinite() {
        Value::String("inf".into())
    } else {
        json!(db)
    }
}

pub fn denoise_image(args: DenoiseImageArgs) -> Result<(), CliError> {
    let noisy = read_pgm(&args.input)?;
    let codebook = load_codebook(&args.codebook)?;
    if codebook.dim() != args.patch * args.patch {
        return Err(CliError::Usage(format!(
            "codebook dimension {} does not match --patch {} (needs {})",
            codebook.dim(),
            args.patch,
            args.patch * args.patch
        )));
    }
    let denoised = patch_denoise(&noisy, &codebook, args.patch, args.stride)?;
    write_pgm(&denoised, &args.out)?;
    if let Some(clean_path) = &args.clean {
        let clean = read_pgm(clean_path)?;
        // PSNR of what was written, after 8-bit quantization
        let written = read_pgm(&args.out)?;
        emit_json(&json!({
            "width": denoised.width(),
            "height": denoised.height(),
            "psnr_noisy": psnr_value(psnr(&clean, &noisy)?),
            "psnr_denoised": psnr_value(psnr(&clean, &written)?),
        }))?;
    }
    Ok(())
}
