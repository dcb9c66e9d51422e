//! `binembed` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use binembed::complexity::{advise_circulant, advise_gaussian, complexity_report, AdvisorConstants, ComplexityReport};
use binembed::estimators::{estimate_distance, estimate_inner_product, estimate_sq_distance};
use binembed::gaussian::default_lambda;
use binembed::harness::codefile::{load_codes, save_codes, Codes};
use binembed::harness::dataset::{load_dataset, DatasetFormat, DatasetMatrix};
use binembed::harness::manifest::{SketchKind, Sketcher};
use binembed::harness::verify::{error_curve, verify_distance_embedding, verify_inner_product_embedding, CampaignConfig};
use binembed::harness::FORMAT_VERSION;
use binembed::{CirculantSketcher, Error, GaussianSketcher, Result, RowPolicy, XiDistribution};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "binembed", version, about = "Binary embeddings with distance and inner-product estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a dataset and write a code file.
    Embed(EmbedArgs),
    /// Estimate distances or inner products between stored codes.
    Query(QueryArgs),
    /// Covering number and localized Gaussian complexity of a dataset.
    Complexity(ComplexityArgs),
    /// Suggest lambda and m from a complexity report.
    Advise(AdviseArgs),
    /// Run a seeded verification campaign.
    Verify(VerifyArgs),
    /// Median sup distance error across a sweep of m.
    Curve(CurveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Gaussian,
    Circulant,
}

impl From<KindArg> for SketchKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gaussian => SketchKind::Gaussian,
            KindArg::Circulant => SketchKind::Circulant,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(name = "packed_f32")]
    PackedF32,
}

impl From<FormatArg> for DatasetFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => DatasetFormat::Csv,
            FormatArg::PackedF32 => DatasetFormat::PackedF32,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum XiArg {
    Rademacher,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum RowsArg {
    First,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Distance,
    InnerProduct,
}

#[derive(Args)]
struct DatasetArgs {
    /// Dataset file.
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl DatasetArgs {
    fn load(&self) -> Result<DatasetMatrix> {
        load_dataset(&self.dataset, self.format.into())
    }
}

#[derive(Args)]
struct CirculantArgs {
    /// Distribution of the circulant generator.
    #[arg(long, value_enum, default_value = "rademacher")]
    xi: XiArg,
    /// Row subset of the circulant matrix.
    #[arg(long, value_enum, default_value = "first")]
    rows: RowsArg,
}

impl CirculantArgs {
    fn xi(&self) -> XiDistribution {
        match self.xi {
            XiArg::Rademacher => XiDistribution::Rademacher,
            XiArg::Gaussian => XiDistribution::Gaussian,
        }
    }

    fn rows(&self) -> RowPolicy {
        match self.rows {
            RowsArg::First => RowPolicy::FirstM,
            RowsArg::Random => RowPolicy::SeededRandomSubset,
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: KindArg,
    /// Dither half-width. Defaults to a value derived from the dataset radius and --delta.
    #[arg(long)]
    lambda: Option<f64>,
    /// Target accuracy used to pick a default lambda.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Number of bits per branch.
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    circulant: CirculantArgs,
    /// Code file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Code file written by `embed`.
    codes: PathBuf,
    /// Index pairs such as `0,1`.
    #[arg(required = true, value_parser = parse_pair)]
    pairs: Vec<(usize, usize)>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Scale of the covering net and of the localization.
    #[arg(long)]
    epsilon: f64,
    /// Monte-Carlo trials for the Gaussian complexity.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdviseArgs {
    /// Complexity report written by `complexity`.
    report: PathBuf,
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: KindArg,
    /// Dataset radius. Defaults to the radius recorded in the report.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    delta: f64,
    /// Failure probability (circulant only).
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    /// Ambient dimension (circulant only).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    c_lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    c_epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    c_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 1.0)]
    c_r: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, value_enum, default_value = "distance")]
    estimator: EstimatorArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: KindArg,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    delta: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    #[command(flatten)]
    circulant: CirculantArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long)]
    lambda: f64,
    /// Ascending list of bit counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Print a tab-separated table instead of JSON.
    #[arg(long)]
    tsv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad index `{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<()> {
    emit(&serde_json::to_string_pretty(value)?, out)
}

/// Serializes `value` as a JSON object with `format_version` added.
fn versioned(value: impl serde::Serialize) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(map) = &mut v {
        map.insert("format_version".into(), json!(FORMAT_VERSION));
    }
    Ok(v)
}

fn embed(args: EmbedArgs) -> Result<()> {
    let data = args.data.load()?;
    let lambda = match args.lambda {
        Some(l) => l,
        None => default_lambda(data.radius(), args.delta)?,
    };
    let sketcher = match args.kind {
        KindArg::Gaussian => Sketcher::Gaussian(GaussianSketcher::sample(args.seed, args.m, data.n(), lambda)?),
        KindArg::Circulant => Sketcher::Circulant(CirculantSketcher::sample(
            args.seed,
            args.m,
            data.n(),
            lambda,
            args.circulant.xi(),
            args.circulant.rows(),
        )?),
    };
    let manifest = sketcher.manifest();
    let codes = sketcher.embed_dataset(&data)?;
    save_codes(&codes, &manifest, &args.out)?;
    emit_json(
        &json!({
            "format_version": FORMAT_VERSION,
            "manifest": manifest,
            "manifest_hash": manifest.content_hash(),
            "count": codes.len(),
            "out": args.out,
        }),
        None,
    )
}

fn query(args: QueryArgs) -> Result<()> {
    let (codes, manifest) = load_codes(&args.codes)?;
    let params = manifest.params()?;
    let mut results = Vec::with_capacity(args.pairs.len());
    for &(i, j) in &args.pairs {
        if i >= codes.len() || j >= codes.len() {
            return Err(Error::InvalidArgument(format!(
                "pair ({i}, {j}) is out of range for {} codes",
                codes.len()
            )));
        }
        results.push(match &codes {
            Codes::Single(c) => json!({
                "i": i,
                "j": j,
                "distance": estimate_distance(&c[i], &c[j], &params)?,
            }),
            Codes::Dual(c) => json!({
                "i": i,
                "j": j,
                "inner_product": estimate_inner_product(&c[i], &c[j], &params)?,
                "sq_distance": estimate_sq_distance(&c[i], &c[j], &params)?,
            }),
        });
    }
    emit_json(
        &json!({
            "format_version": FORMAT_VERSION,
            "manifest": manifest,
            "manifest_hash": manifest.content_hash(),
            "results": results,
        }),
        args.out.as_deref(),
    )
}

fn complexity(args: ComplexityArgs) -> Result<()> {
    let data = args.data.load()?;
    let report = complexity_report(&data, args.epsilon, args.trials, args.seed)?;
    emit_json(&versioned(report)?, args.out.as_deref())
}

fn advise(args: AdviseArgs) -> Result<()> {
    let report: ComplexityReport = serde_json::from_slice(&fs::read(&args.report)?)?;
    let radius = args.radius.unwrap_or(report.radius);
    let constants = AdvisorConstants {
        c_lambda: args.c_lambda,
        c_epsilon: args.c_epsilon,
        c_alpha: args.c_alpha,
        c1: args.c1,
        c2: args.c2,
        c_r: args.c_r,
    };
    let advice = match args.kind {
        KindArg::Gaussian => advise_gaussian(radius, args.delta, &report, &constants)?,
        KindArg::Circulant => {
            let n = args
                .n
                .ok_or_else(|| Error::InvalidArgument("--n is required for circulant advice".into()))?;
            advise_circulant(radius, args.delta, args.eta, n, &report, &constants)?
        }
    };
    emit_json(&versioned(advice)?, args.out.as_deref())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let data = args.data.load()?;
    let config = CampaignConfig {
        xi_distribution: args.circulant.xi(),
        row_policy: args.circulant.rows(),
        ..CampaignConfig::new(args.lambda, args.m, args.delta, args.seed, args.seeds).with_kind(args.kind.into())
    };
    let report = match args.estimator {
        EstimatorArg::Distance => verify_distance_embedding(&data, &config)?,
        EstimatorArg::InnerProduct => verify_inner_product_embedding(&data, &config)?,
    };
    emit(&report.to_json(), args.out.as_deref())
}

fn curve(args: CurveArgs) -> Result<()> {
    let data = args.data.load()?;
    let curve = error_curve(&data, args.lambda, &args.m, args.seed, args.seeds)?;
    if args.tsv {
        emit(curve.to_tsv().trim_end(), args.out.as_deref())
    } else {
        emit_json(&serde_json::to_value(&curve)?, args.out.as_deref())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Embed(a) => embed(a),
        Command::Query(a) => query(a),
        Command::Complexity(a) => complexity(a),
        Command::Advise(a) => advise(a),
        Command::Verify(a) => verify(a),
        Command::Curve(a) => curve(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
