//! Command-line front end: instance validation, spectrum export, read-out
//! queries, noise sweeps.
//!
//! Exit codes are a stable contract: 0 success, 1 usage or I/O error,
//! 2 domain error (failed feasibility check, aliasing, invalid instance).
//! Every `--out` file gets a sibling `<out>.manifest.json` recording the
//! resolved configuration, the seed and a digest of the bytes written, so
//! identical invocations are checkable byte-for-byte. Seeds default to a
//! fixed constant, not entropy: reproducibility first.
//!
//! Numeric text output uses fixed decimal places (volts to six, kilohertz to
//! three); data files use shortest-roundtrip floats. Both are byte-stable.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::network::sample_collective_state;
use crate::noise::{noisy_cascade_with, snr_measured, NoiseSpec, SweepRow};
use crate::oracle::full_count_table;
use crate::problem::{capacity, encode, validate, InstanceFile, MachineConfig, SubsetSumInstance};
use crate::readout::{
    read_pair, read_pair_from_spectrum, read_pair_from_state, widened_rate, ReadoutMode,
};
use crate::spectrum::{dft_spectrum, exact_spectrum, Spectrum};

/// Fixed default seed; runs are reproducible unless a seed is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "memssp",
    version,
    about = "Memprocessor-network subset-sum machine simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance against the hardware feasibility inequalities.
    Validate(ValidateArgs),
    /// Compute the spectrum of the collective state and export it.
    Spectrum(SpectrumArgs),
    /// Run read-out queries for one or more targets.
    Solve(SolveArgs),
    /// Sweep predicted vs. measured SNR over sizes and noise variances.
    NoiseSweep(NoiseSweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Instrument limits; defaults mirror the bench hardware (1 uHz resolution,
/// 20 MHz generator bandwidth, 10 MHz multipliers, 1e5 samples).
#[derive(Debug, Args, Serialize)]
struct HardwareArgs {
    #[arg(long, default_value_t = 1e-6)]
    gen_resolution_hz: f64,
    #[arg(long, default_value_t = 20e6)]
    gen_bandwidth_hz: f64,
    #[arg(long, default_value_t = 10e6)]
    amp_max_freq_hz: f64,
    #[arg(long, default_value_t = 100_000)]
    max_samples: u64,
}

impl HardwareArgs {
    fn config(&self, f0_hz: f64) -> MachineConfig {
        MachineConfig {
            f0_hz,
            gen_resolution_hz: self.gen_resolution_hz,
            gen_bandwidth_hz: self.gen_bandwidth_hz,
            amp_max_freq_hz: self.amp_max_freq_hz,
            max_samples: self.max_samples,
        }
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Instance JSON file: {"elements": [...], "f0_hz": ..., "targets": [...]}
    instance: PathBuf,
    #[command(flatten)]
    hardware: HardwareArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: SpectrumMode,
    /// Sample count for sampled mode; defaults to the exact rate 2A+1.
    #[arg(long)]
    samples: Option<usize>,
    /// Export file; `.json` extension selects JSON, anything else CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumMode {
    Exact,
    Sampled,
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Target sum; repeatable. Falls back to the instance file's "targets".
    #[arg(long = "target")]
    targets: Vec<i64>,
    #[arg(long, value_enum, default_value_t = SolveMode::Exact)]
    mode: SolveMode,
    /// Per-sample noise power for noisy mode.
    #[arg(long, default_value_t = 0.0)]
    variance: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the report to this file (same format as stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    Exact,
    Sampled,
    Noisy,
}

#[derive(Debug, Args)]
struct NoiseSweepArgs {
    /// Network sizes to sweep; each uses the built-in synthetic instance
    /// (first n odd magnitudes, alternating signs: +1, -3, +5, ...).
    #[arg(long = "n-list", value_delimiter = ',', default_value = "2,4,6,8")]
    n_list: Vec<usize>,
    #[arg(long = "variance-list", value_delimiter = ',', default_value = "1e-4")]
    variance_list: Vec<f64>,
    #[arg(long)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sweep this instance file instead of the synthetic family.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    f0_hz: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Solve(args) => cmd_solve(args),
        Command::NoiseSweep(args) => cmd_noise_sweep(args),
    }
}

fn load_instance(path: &Path) -> Result<(InstanceFile, SubsetSumInstance)> {
    let text = fs::read_to_string(path)?;
    let file = InstanceFile::parse(&text)?;
    if file.f0_hz <= 0.0 || file.f0_hz.is_nan() {
        return Err(Error::NonPositiveConfig {
            field: "f0_hz",
            value: file.f0_hz,
        });
    }
    let instance = file.instance()?;
    Ok((file, instance))
}

// ---------------------------------------------------------------------------
// run manifests

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    version: String,
    seed: u64,
    config: serde_json::Value,
    outputs: Vec<OutputDigest>,
}

#[derive(Debug, Serialize)]
struct OutputDigest {
    path: String,
    sha256: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `<out>.manifest.json` next to an output file, digesting the bytes
/// just written.
fn write_manifest(
    out_path: &Path,
    command: &str,
    seed: u64,
    config: serde_json::Value,
) -> Result<()> {
    let bytes = fs::read(out_path)?;
    let manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config,
        outputs: vec![OutputDigest {
            path: out_path.display().to_string(),
            sha256: hex(&Sha256::digest(&bytes)),
        }],
    };
    let mut manifest_path = out_path.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    let mut doc = serde_json::to_string_pretty(&manifest)?;
    doc.push('\n');
    fs::write(PathBuf::from(manifest_path), doc)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// validate

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let (file, instance) = load_instance(&args.instance)?;
    let config = args.hardware.config(file.f0_hz);
    config.validate_fields()?;
    let report = validate(&instance, &config);

    match args.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Format::Text => {
            println!(
                "{:<22} {:>6} {:>16}  constraint",
                "check", "pass", "margin_hz"
            );
            for check in &report.checks {
                println!(
                    "{:<22} {:>6} {:>16.6e}  {}",
                    check.name,
                    if check.pass { "ok" } else { "FAIL" },
                    check.margin_hz,
                    check.constraint
                );
            }
            println!("overall: {}", if report.all_pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(if report.all_pass { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Debug, Serialize)]
struct SpectrumSummary {
    n: u32,
    f0_hz: f64,
    band: [i64; 2],
    harmonics: usize,
    nonzero_harmonics: usize,
    total_count: u64,
    max_imag: Option<f64>,
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<i32> {
    let (file, instance) = load_instance(&args.instance)?;
    let spectrum = match args.mode {
        SpectrumMode::Exact => exact_spectrum(&instance)?,
        SpectrumMode::Sampled => {
            let assignment = encode(&instance, &MachineConfig::bench(file.f0_hz));
            let samples = args
                .samples
                .unwrap_or((2 * capacity(&instance) + 1) as usize);
            let state = sample_collective_state(&assignment, samples)?;
            dft_spectrum(&state)?
        }
    };

    let summary = summarize(&spectrum, file.f0_hz);
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        Format::Text => println!(
            "n={} band=[{},{}] harmonics={} nonzero={} total_count={}{}",
            summary.n,
            summary.band[0],
            summary.band[1],
            summary.harmonics,
            summary.nonzero_harmonics,
            summary.total_count,
            match summary.max_imag {
                Some(v) => format!(" max_imag={v:.3e}"),
                None => String::new(),
            }
        ),
    }

    if let Some(out) = &args.out {
        export_spectrum(&spectrum, file.f0_hz, out)?;
        let config = serde_json::json!({
            "instance": args.instance.display().to_string(),
            "elements": file.elements,
            "f0_hz": file.f0_hz,
            "mode": format!("{:?}", args.mode).to_lowercase(),
            "samples": args.samples,
        });
        write_manifest(out, "spectrum", DEFAULT_SEED, config)?;
    }
    Ok(0)
}

fn summarize(spectrum: &Spectrum, f0_hz: f64) -> SpectrumSummary {
    let harmonics: Vec<_> = spectrum.harmonics().collect();
    SpectrumSummary {
        n: spectrum.n(),
        f0_hz,
        band: [
            -(spectrum.neg_extent() as i64),
            spectrum.pos_extent() as i64,
        ],
        harmonics: harmonics.len(),
        nonzero_harmonics: harmonics.iter().filter(|h| h.count > 0).count(),
        total_count: harmonics.iter().map(|h| h.count).sum(),
        max_imag: spectrum.max_imag(),
    }
}

fn export_spectrum(spectrum: &Spectrum, f0_hz: f64, out: &Path) -> Result<()> {
    let mut buf = Vec::new();
    if out.extension().is_some_and(|ext| ext == "json") {
        crate::spectrum::write_spectrum_json(spectrum, f0_hz, &mut buf)?;
    } else {
        crate::spectrum::write_spectrum_csv(spectrum, &mut buf)?;
    }
    fs::write(out, buf)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// solve

#[derive(Debug, Serialize)]
struct SolveRow {
    s: i64,
    shift_khz: f64,
    v_dc_up: f64,
    v_dc_down: f64,
    v_s: f64,
    v_minus_s: f64,
    count_s: u64,
    count_minus_s: u64,
    oracle_count_s: u64,
    oracle_count_minus_s: u64,
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let (file, instance) = load_instance(&args.instance)?;
    let targets = if args.targets.is_empty() {
        file.targets.clone().unwrap_or_default()
    } else {
        args.targets.clone()
    };
    if targets.is_empty() {
        eprintln!("error: no targets; pass --target or add \"targets\" to the instance file");
        return Ok(1);
    }
    let config = MachineConfig::bench(file.f0_hz);
    let oracle = full_count_table(&instance)?;

    let results = match args.mode {
        SolveMode::Exact => {
            let spectrum = exact_spectrum(&instance)?;
            targets
                .iter()
                .map(|&s| read_pair_from_spectrum(&spectrum, s))
                .collect::<Vec<_>>()
        }
        SolveMode::Sampled => targets
            .iter()
            .map(|&s| read_pair(&instance, &config, s, ReadoutMode::Sampled))
            .collect::<Result<Vec<_>>>()?,
        SolveMode::Noisy => {
            // one noisy machine serves every target: a grid wide enough for
            // the largest shift stays exact for the smaller ones
            let assignment = encode(&instance, &config);
            let widest = targets.iter().copied().max_by_key(|s| s.unsigned_abs());
            let rate = widened_rate(capacity(&instance), widest.unwrap_or(0))?;
            let spec = NoiseSpec::white(args.variance, args.seed);
            let realization = spec.realize(instance.n(), rate, 0)?;
            let state = noisy_cascade_with(&assignment, &realization)?;
            targets
                .iter()
                .map(|&s| read_pair_from_state(&state, s))
                .collect::<Result<Vec<_>>>()?
        }
    };

    let rows: Vec<SolveRow> = results
        .iter()
        .map(|r| SolveRow {
            s: r.target_s,
            shift_khz: r.target_s.unsigned_abs() as f64 * file.f0_hz / 1000.0,
            v_dc_up: r.v_dc_up,
            v_dc_down: r.v_dc_down,
            v_s: r.v_s,
            v_minus_s: r.v_minus_s,
            count_s: r.count_s,
            count_minus_s: r.count_minus_s,
            oracle_count_s: oracle.count(r.target_s),
            oracle_count_minus_s: r.target_s.checked_neg().map_or(0, |neg| oracle.count(neg)),
        })
        .collect();

    let rendered = render_solve(&rows, args.format)?;
    print!("{rendered}");
    if let Some(out) = &args.out {
        fs::write(out, rendered.as_bytes())?;
        let config = serde_json::json!({
            "instance": args.instance.display().to_string(),
            "elements": file.elements,
            "f0_hz": file.f0_hz,
            "mode": format!("{:?}", args.mode).to_lowercase(),
            "targets": targets,
            "variance": args.variance,
            "format": format!("{:?}", args.format).to_lowercase(),
        });
        write_manifest(out, "solve", args.seed, config)?;
    }
    Ok(0)
}

fn render_solve(rows: &[SolveRow], format: Format) -> Result<String> {
    let mut text = String::new();
    match format {
        Format::Json => {
            text.push_str(&serde_json::to_string_pretty(rows)?);
            text.push('\n');
        }
        Format::Text => {
            text.push_str(&format!(
                "{:>6} {:>12} {:>12} {:>12} {:>10} {:>10} {:>8} {:>9} {:>9} {:>10}\n",
                "|s|",
                "f_shift_khz",
                "v_dc_up_v",
                "v_dc_down_v",
                "v_s",
                "v_minus_s",
                "count_s",
                "count_-s",
                "oracle_s",
                "oracle_-s"
            ));
            for row in rows {
                text.push_str(&format!(
                    "{:>6} {:>12.3} {:>12.6} {:>12.6} {:>10.6} {:>10.6} {:>8} {:>9} {:>9} {:>10}\n",
                    row.s.unsigned_abs(),
                    row.shift_khz,
                    row.v_dc_up,
                    row.v_dc_down,
                    row.v_s,
                    row.v_minus_s,
                    row.count_s,
                    row.count_minus_s,
                    row.oracle_count_s,
                    row.oracle_count_minus_s
                ));
            }
        }
    }
    Ok(text)
}

// ---------------------------------------------------------------------------
// noise sweep

fn cmd_noise_sweep(args: NoiseSweepArgs) -> Result<i32> {
    if args.runs == 0 {
        eprintln!("error: --runs must be at least 1");
        return Ok(1);
    }
    for &variance in &args.variance_list {
        if variance <= 0.0 || variance.is_nan() {
            eprintln!("error: variances must be positive, got {variance}");
            return Ok(1);
        }
    }

    let file_instance = match &args.instance {
        Some(path) => Some(load_instance(path)?),
        None => None,
    };

    let mut rows = Vec::new();
    let sizes: Vec<usize> = match &file_instance {
        Some((_, instance)) => vec![instance.n()],
        None => args.n_list.clone(),
    };
    for &n in &sizes {
        let (instance, f0) = match &file_instance {
            Some((file, instance)) => (instance.clone(), file.f0_hz),
            None => (SubsetSumInstance::alternating_odd(n)?, args.f0_hz),
        };
        let config = MachineConfig::bench(f0);
        for &variance in &args.variance_list {
            let spec = NoiseSpec::white(variance, args.seed);
            let report = snr_measured(&instance, &config, &spec, args.runs)?;
            rows.push(SweepRow {
                n,
                variance,
                snr_predicted: report.predicted_snr.expect("variance > 0"),
                snr_measured: report.measured_total_snr,
                runs: args.runs,
            });
        }
    }

    let mut buf = Vec::new();
    crate::noise::write_sweep_csv(&rows, &mut buf)?;
    fs::write(&args.out, &buf)?;
    let config = serde_json::json!({
        "n_list": sizes,
        "variance_list": args.variance_list,
        "runs": args.runs,
        "f0_hz": args.f0_hz,
        "instance": args.instance.as_ref().map(|p| p.display().to_string()),
    });
    write_manifest(&args.out, "noise-sweep", args.seed, config)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(0)
}
