//! `wixup` command-line driver.
//!
//! Exit codes: 0 on success, 1 when the data cannot be processed, 2 on bad
//! flags or configuration.

mod gen;
mod settings;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wixup::augment::augment;
use wixup::bench::bench_find_intersections;
use wixup::frames::{generate_synthetic, read_from, write_to, Dataset, LabelKind, PointDims};
use wixup::seed::sha256_hex;
use wixup::uda::{run_uda, KnnPredictor};

use settings::{Settings, AUGMENT_KEYS, SELFTRAIN_KEYS};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

#[derive(Parser)]
#[command(name = "wixup", version, about = "Range-profile mixing augmentation for wireless point clouds")]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "WIXUP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Augment a JSONL dataset.
    Augment(AugmentArgs),
    /// Run the self-training loop on a source and a target dataset.
    Selftrain(SelftrainArgs),
    /// Summarize a dataset, or generate a synthetic one.
    Stats(StatsArgs),
    /// Time the crossing search for several window sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = ["wixup", "cga", "stack", "wixup+"])]
    method: Option<String>,
    #[arg(long)]
    scale: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also pair frames across sequence boundaries.
    #[arg(long)]
    cross_sequence: bool,
}

#[derive(Args)]
struct SelftrainArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["random", "cyclic"])]
    pairing: Option<String>,
    #[arg(long)]
    target_train_fraction: Option<f64>,
    /// Neighbours used by the built-in predictor.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the report here, with a provenance sidecar.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    input: Option<PathBuf>,
    /// Preset name, inline `key=value,...` list, or file.
    #[arg(long, requires = "output")]
    gen: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "512,1024,2048")]
    bins: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    points: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Augment(a) => cmd_augment(a),
        Command::Selftrain(a) => cmd_selftrain(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Reads a dataset, returning it with the hex SHA-256 of the file.
fn load(path: &Path) -> anyhow::Result<(Dataset, String)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let dataset = read_from(bytes.as_slice()).with_context(|| format!("parsing {}", path.display()))?;
    Ok((dataset, sha256_hex(&bytes)))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".provenance.json");
    PathBuf::from(name)
}

fn write_provenance(output: &Path, output_bytes: &[u8], body: serde_json::Value) -> anyhow::Result<()> {
    let mut doc = json!({
        "tool": "wixup",
        "version": env!("CARGO_PKG_VERSION"),
        "output": { "path": output.display().to_string(), "sha256": sha256_hex(output_bytes) },
    });
    if let (Some(doc), serde_json::Value::Object(extra)) = (doc.as_object_mut(), body) {
        doc.extend(extra);
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("json value serializes");
    text.push('\n');
    write_bytes(&sidecar_path(output), text.as_bytes())
}

/// Writes to stdout. A closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Data(anyhow::Error::new(e).context("writing to stdout"))),
        _ => Ok(()),
    }
}

fn emit_json(doc: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).expect("json value serializes");
    text.push('\n');
    emit(&text)
}

fn dataset_bytes(dataset: &Dataset) -> Vec<u8> {
    let mut out = Vec::new();
    write_to(dataset, &mut out).expect("writing to memory cannot fail");
    out
}

fn cmd_augment(a: AugmentArgs) -> Result<(), Failure> {
    let settings = Settings::resolve(
        AUGMENT_KEYS,
        true,
        a.config.as_deref(),
        &[
            ("method", a.method),
            ("scale", a.scale.map(|v| v.to_string())),
            ("seed", a.seed.map(|v| v.to_string())),
            ("cross_sequence", a.cross_sequence.then(|| "true".to_string())),
        ],
    )?;
    let cfg = settings.augment_config()?;
    let (input, input_hash) = load(&a.input)?;
    let output = augment(&input, &cfg).context("augmenting")?;
    let bytes = dataset_bytes(&output);
    write_bytes(&a.output, &bytes)?;
    write_provenance(
        &a.output,
        &bytes,
        json!({
            "command": "augment",
            "config": settings.to_json(),
            "input": { "path": a.input.display().to_string(), "sha256": input_hash, "frames": input.len() },
            "frames": output.len(),
        }),
    )?;
    eprintln!("{} frames in, {} frames out", input.len(), output.len());
    Ok(())
}

fn cmd_selftrain(a: SelftrainArgs) -> Result<(), Failure> {
    let settings = Settings::resolve(
        SELFTRAIN_KEYS,
        true,
        a.config.as_deref(),
        &[
            ("seed", a.seed.map(|v| v.to_string())),
            ("pairing", a.pairing),
            ("target_train_fraction", a.target_train_fraction.map(|v| v.to_string())),
            ("k", a.k.map(|v| v.to_string())),
            ("fine_tune_rounds", a.rounds.map(|v| v.to_string())),
        ],
    )?;
    let cfg = settings.uda_config()?;
    let mut predictor = KnnPredictor::new(settings.get("k")?).map_err(|e| Failure::Usage(e.to_string()))?;
    let (source, source_hash) = load(&a.source)?;
    let (target, target_hash) = load(&a.target)?;
    let report = run_uda(&source, &target, &mut predictor, &cfg).context("self-training")?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(&text)?;
    if let Some(path) = &a.output {
        write_bytes(path, text.as_bytes())?;
        write_provenance(
            path,
            text.as_bytes(),
            json!({
                "command": "selftrain",
                "config": settings.to_json(),
                "source": { "path": a.source.display().to_string(), "sha256": source_hash, "frames": source.len() },
                "target": { "path": a.target.display().to_string(), "sha256": target_hash, "frames": target.len() },
            }),
        )?;
    }
    Ok(())
}

fn summary(dataset: &Dataset) -> serde_json::Value {
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for f in dataset.frames() {
        *histogram.entry(f.points.len()).or_default() += 1;
    }
    let (label, dims) = match dataset.meta() {
        None => (serde_json::Value::Null, serde_json::Value::Null),
        Some(m) => (
            match m.label {
                LabelKind::Keypoints { joints } => json!({ "keypoints": joints }),
                LabelKind::Classes { classes } => json!({ "classes": classes }),
            },
            json!(match m.dims {
                PointDims::Three => 3,
                PointDims::Five => 5,
            }),
        ),
    };
    json!({
        "frames": dataset.len(),
        "sequences": dataset.sequences().len(),
        "points": dataset.frames().iter().map(|f| f.points.len()).sum::<usize>(),
        "empty_frames": histogram.get(&0).copied().unwrap_or(0),
        "label": label,
        "dims": dims,
        "point_histogram": histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
    })
}

fn cmd_stats(a: StatsArgs) -> Result<(), Failure> {
    let dataset = match (&a.input, &a.gen) {
        (Some(path), _) => load(path)?.0,
        (None, Some(arg)) => {
            let cfg = gen::parse_generator(arg)?;
            let output = a.output.as_ref().expect("clap requires --output with --gen");
            let dataset = generate_synthetic(&cfg, a.seed).map_err(|e| Failure::Usage(e.to_string()))?;
            let bytes = dataset_bytes(&dataset);
            write_bytes(output, &bytes)?;
            write_provenance(
                output,
                &bytes,
                json!({ "command": "stats --gen", "generator": gen::describe(&cfg), "seed": a.seed, "frames": dataset.len() }),
            )?;
            dataset
        }
        (None, None) => return Err(Failure::Usage("pass --input or --gen".into())),
    };
    emit_json(&summary(&dataset))
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    if a.iters == 0 {
        return Err(Failure::Usage("--iters must be at least 1".into()));
    }
    if a.bins.is_empty() || a.bins.iter().any(|&w| w < 4) {
        return Err(Failure::Usage("--bins needs window sizes of at least 4".into()));
    }
    let results: Vec<_> = a.bins.iter().map(|&w| bench_find_intersections(w, a.points, a.iters, a.seed)).collect();
    let ratios: Vec<f64> = results.windows(2).map(|w| w[1].mean_ns / w[0].mean_ns).collect();
    let doc = json!({ "points": a.points, "iters": a.iters, "seed": a.seed, "results": results, "ratios": ratios });
    emit_json(&doc)
}
