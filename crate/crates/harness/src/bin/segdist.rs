use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use segdist::metrics::{compute_selected, ComputeOptions, EdgePolicy, Outcome};
use segdist::{io::load_mask, preset, Mask, Metric, PRESET_NAMES};
use segdist_harness::{
    bench, compare, gen_dataset, parse_list, parse_spacings, read_results, run_batch, write_comparison,
    write_results, BatchParams, BenchParams, GenParams, HarnessError, Manifest, Result,
};

#[derive(Parser)]
#[command(name = "segdist", version, about = "Distance-based segmentation metrics and variant auditing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset with a manifest.
    Gen(GenArgs),
    /// Evaluate one pair and print JSON.
    Compute(ComputeArgs),
    /// Evaluate a manifest across presets and spacings into a CSV table.
    Batch(BatchArgs),
    /// Summarise deviations of a batch table against a reference preset.
    Compare(CompareArgs),
    /// Time evaluations per pair and preset.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum CropChoice {
    On,
    Off,
    Both,
}

#[derive(Args)]
struct MetricArgs {
    /// Percentile for HDp.
    #[arg(long, default_value_t = 95.0)]
    p: f64,
    /// Tolerance in mm for NSD and BIoU.
    #[arg(long, default_value_t = 2.0)]
    tau: f64,
    /// Empty-mask handling: reloaded, nan or error.
    #[arg(long, default_value = "reloaded")]
    edge_policy: EdgePolicy,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Grid extents, e.g. `64,64` or `32,32,32`.
    #[arg(long, default_value = "64,64")]
    dims: String,
    /// Element spacing in mm; defaults to 1 per axis.
    #[arg(long)]
    spacing: Option<String>,
    /// Perturbation level in [0, 1].
    #[arg(long, default_value_t = 0.3)]
    level: f64,
    /// Fraction of pairs with an empty prediction.
    #[arg(long, default_value_t = 0.0)]
    empty_fraction: f64,
    /// Blob width multiplier; below 1 gives sparse masks.
    #[arg(long, default_value_t = 1.0)]
    blob_scale: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value = "gdm")]
    preset: String,
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, value_enum, default_value = "on")]
    crop: Toggle,
    /// Exit with status 1 if any metric is refused.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated presets; defaults to all.
    #[arg(long, alias = "preset")]
    presets: Option<String>,
    /// Target spacings, e.g. `1,1,1;2,2,2;0.5,0.5,2`; defaults to each pair's own.
    #[arg(long)]
    spacing: Option<String>,
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long, value_enum, default_value = "on")]
    crop: Toggle,
    /// Exit with status 1 if any row failed.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Batch result table.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value = "gdm")]
    reference: String,
    /// Manifest whose tags define strata.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, alias = "preset", default_value = "gdm")]
    presets: String,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, value_enum, default_value = "both")]
    crop: CropChoice,
    #[arg(long, default_value_t = 95.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    tau: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Compute(a) => compute(a),
        Command::Batch(a) => batch(a),
        Command::Compare(a) => cmp(a),
        Command::Bench(a) => run_bench(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(|source| HarnessError::Io {
            path: p.to_path_buf(),
            source,
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_err(path: Option<&Path>) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into()),
        source,
    }
}

fn preset_list(text: Option<&str>) -> Vec<String> {
    match text {
        Some(t) => t.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => PRESET_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let dims: Vec<usize> = parse_list(&a.dims)?
        .into_iter()
        .map(|d| {
            if d.fract() == 0.0 {
                Ok(d as usize)
            } else {
                Err(HarnessError::Invalid(format!("dims must be integers, got {d}")))
            }
        })
        .collect::<Result<_>>()?;
    let spacing = match &a.spacing {
        Some(s) => parse_list(s)?,
        None => vec![1.0; dims.len()],
    };
    let params = GenParams {
        seed: a.seed,
        count: a.count,
        dims,
        spacing,
        level: a.level,
        empty_fraction: a.empty_fraction,
        blob_scale: a.blob_scale,
    };
    let (manifest, stats) = gen_dataset(&params, &a.out)?;
    eprintln!(
        "wrote {} pairs to {} (mean DSC {})",
        manifest.rows.len(),
        a.out.display(),
        stats.mean_dsc.map(|d| d.to_string()).unwrap_or_else(|| "n/a".into())
    );
    Ok(ExitCode::SUCCESS)
}

fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn compute(a: ComputeArgs) -> Result<ExitCode> {
    let mut p = preset::<f64>(&a.preset)?;
    p.config = p
        .config
        .with_p(a.metric.p)
        .with_tau(a.metric.tau)
        .with_edge_policy(a.metric.edge_policy);
    let ref_mask: Mask = load_mask(&a.reference)?;
    let pred_mask: Mask = load_mask(&a.pred)?;
    let wanted: Vec<Metric> = Metric::ALL.into_iter().filter(|&m| p.supports(m)).collect();
    let options = ComputeOptions {
        crop: matches!(a.crop, Toggle::On),
        ..ComputeOptions::default()
    };
    let r = compute_selected(&ref_mask, &pred_mask, &p.config, &wanted, options)?;
    let mut metrics = serde_json::Map::new();
    let mut failed = false;
    for m in wanted {
        let entry = match r.outcome(m) {
            Outcome::Value { value, warning } => json!({
                "value": number(value),
                "warning": warning.map(|w| format!("empty_{w}")),
            }),
            Outcome::Failed { empty } => {
                failed = true;
                json!({ "error": segdist::Error::EmptyInput { metric: m, which: empty }.to_string() })
            }
            Outcome::Unsupported => json!({ "error": "unsupported" }),
        };
        metrics.insert(m.name().to_string(), entry);
    }
    let doc = json!({
        "reference": a.reference.display().to_string(),
        "prediction": a.pred.display().to_string(),
        "preset": p.name,
        "p": a.metric.p,
        "tau": a.metric.tau,
        "edge_policy": a.metric.edge_policy.to_string(),
        "spacing": ref_mask.spacing(),
        "metrics": metrics,
        "stats": r.stats,
    });
    let mut out = output(a.out.as_deref())?;
    let io_err = |source| HarnessError::Io {
        path: a.out.clone().unwrap_or_else(|| "<stdout>".into()),
        source,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    Ok(if failed && a.strict {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn batch(a: BatchArgs) -> Result<ExitCode> {
    let manifest = Manifest::load(&a.manifest)?;
    let params = BatchParams {
        presets: preset_list(a.presets.as_deref()),
        spacings: a.spacing.as_deref().map(parse_spacings).transpose()?.unwrap_or_default(),
        p: a.metric.p,
        tau: a.metric.tau,
        edge_policy: a.metric.edge_policy,
        crop: matches!(a.crop, Toggle::On),
    };
    let rows = run_batch(&manifest, &params)?;
    write_results(&rows, output(a.out.as_deref())?).map_err(csv_err(a.out.as_deref()))?;
    let errors = rows.iter().filter(|r| r.is_error()).count();
    if errors > 0 {
        eprintln!("{errors} of {} rows failed", rows.len());
    }
    Ok(if errors > 0 && a.strict {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmp(a: CompareArgs) -> Result<ExitCode> {
    let rows = read_results(&a.results)?;
    let manifest = a.manifest.as_deref().map(Manifest::load).transpose()?;
    let (comparisons, corrections) = compare(&rows, &a.reference, manifest.as_ref())?;
    write_comparison(&comparisons, corrections, output(a.out.as_deref())?).map_err(csv_err(a.out.as_deref()))?;
    Ok(ExitCode::SUCCESS)
}

fn run_bench(a: BenchArgs) -> Result<ExitCode> {
    let manifest = Manifest::load(&a.manifest)?;
    let params = BenchParams {
        presets: preset_list(Some(&a.presets)),
        repetitions: a.repetitions,
        crop: match a.crop {
            CropChoice::On => vec![true],
            CropChoice::Off => vec![false],
            CropChoice::Both => vec![true, false],
        },
        p: a.p,
        tau: a.tau,
    };
    let rows = bench(&manifest, &params)?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    for r in &rows {
        w.serialize(r).map_err(csv_err(a.out.as_deref()))?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: a.out.clone().unwrap_or_else(|| "<stdout>".into()),
        source,
    })?;
    Ok(ExitCode::SUCCESS)
}
