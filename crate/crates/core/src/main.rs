use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fuzzy_consensus::consensus::{classify, consensus_crisp, consensus_fuzzy_1d, consensus_grid};
use fuzzy_consensus::consensus::{ConsensusResult, DepthMode};
use fuzzy_consensus::curve::{build_curve_with, histogram, smooth_timeseries};
use fuzzy_consensus::curve::{Curve, HistogramSpec, Normalization};
use fuzzy_consensus::error::{Error, Result};
use fuzzy_consensus::estimators::{robustness_report, Psi};
use fuzzy_consensus::gen::{normal_sample, GENERATOR};
use fuzzy_consensus::io::{self, Metadata};
use fuzzy_consensus::measurement::Measurement;
use fuzzy_consensus::survey::{analyze_survey, SurveyOptions};
use fuzzy_consensus::svg::{Plot, DEFAULT_HEIGHT, DEFAULT_WIDTH};

#[derive(Parser)]
#[command(
    name = "fuzzy-consensus",
    version,
    about = "Fuzzy-interval consensus analysis: aggregate membership curves, \
             max-overlap consensus with outlier detection, estimator comparisons",
    after_help = "Every output embeds a metadata header with the tool version, \
                  subcommand, flags and seed. The `gen` command uses a fixed \
                  algorithm (ChaCha8 stream + Box-Muller transform), so seeded \
                  outputs are identical across platforms."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate seeded normally distributed values (ChaCha8 + Box-Muller)
    Gen(GenArgs),
    /// Aggregate membership curve of a value list
    Curve(CurveArgs),
    /// Consensus zones, members and outliers of a measurement set
    Consensus(ConsensusArgs),
    /// Estimator robustness report: clean sample vs contaminated sample
    Report(ReportArgs),
    /// Membership-weighted smoothing of a counted time series
    Timeseries(TimeseriesArgs),
    /// Survey screening: flag respondents who are outliers on most questions
    Survey(SurveyArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Crisp,
    Fuzzy,
    Grid,
}

impl ModeArg {
    fn name(self) -> &'static str {
        match self {
            ModeArg::Crisp => "crisp",
            ModeArg::Fuzzy => "fuzzy",
            ModeArg::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

impl FormatArg {
    fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Svg => "svg",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum NormalizeArg {
    None,
    Weight,
    Area,
}

impl NormalizeArg {
    fn name(self) -> &'static str {
        match self {
            NormalizeArg::None => "none",
            NormalizeArg::Weight => "weight",
            NormalizeArg::Area => "area",
        }
    }

    fn normalization(self) -> Normalization {
        match self {
            NormalizeArg::None => Normalization::None,
            NormalizeArg::Weight => Normalization::Weight,
            NormalizeArg::Area => Normalization::Area,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Number of values to draw
    #[arg(long)]
    n: usize,
    /// Mean of the normal distribution
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Standard deviation of the normal distribution
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// PRNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    /// Values CSV (header `x`)
    input: PathBuf,
    /// Measurement error assigned to every value
    #[arg(long)]
    error: f64,
    /// Ramp width override (defaults to the error itself)
    #[arg(long)]
    ramp: Option<f64>,
    /// Curve normalization
    #[arg(long, value_enum, default_value_t = NormalizeArg::None)]
    normalize: NormalizeArg,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Overlay a histogram with this many bins (SVG only)
    #[arg(long)]
    hist_bins: Option<usize>,
    /// Overlay a reference normal density with this mean (SVG only)
    #[arg(long, requires = "normal_sigma")]
    normal_mu: Option<f64>,
    /// Standard deviation of the reference normal density
    #[arg(long, requires = "normal_mu")]
    normal_sigma: Option<f64>,
    /// SVG width in pixels
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: u32,
    /// SVG height in pixels
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: u32,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConsensusArgs {
    /// Measurements CSV (header `id,x[,y[,z]],e_x[,e_y[,e_z]]`)
    input: PathBuf,
    /// Default error for rows without their own error cells
    #[arg(long)]
    error: Option<f64>,
    /// Consensus algorithm
    #[arg(long, value_enum, default_value_t = ModeArg::Crisp)]
    mode: ModeArg,
    /// Depth below which the result is reported as no-consensus
    #[arg(long, default_value_t = 2.0)]
    min_depth: f64,
    /// Membership a measurement needs on a zone to count as a member (fuzzy mode)
    #[arg(long, default_value_t = 1.0)]
    membership_threshold: f64,
    /// Grid refinement per breakpoint gap (grid mode)
    #[arg(long, default_value_t = 2)]
    resolution: usize,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Clean measurements CSV
    clean: PathBuf,
    /// Contaminated measurements CSV
    contaminated: PathBuf,
    /// Default error for rows without their own error cells
    #[arg(long)]
    error: Option<f64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TimeseriesArgs {
    /// Time-series CSV (header `t,count`)
    input: PathBuf,
    /// Timing uncertainty of each count, in time units
    #[arg(long, default_value_t = 1.0)]
    time_error: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// SVG width in pixels
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: u32,
    /// SVG height in pixels
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: u32,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    /// Survey CSV (header `respondent,<q1>,<q2>,...`)
    input: PathBuf,
    /// Grade uncertainty
    #[arg(long, default_value_t = 1.0)]
    grade_error: f64,
    /// Fraction of out-of-consensus answers above which a respondent is flagged
    #[arg(long, default_value_t = 0.5)]
    flag_threshold: f64,
    /// Minimum answered questions before a respondent can be flagged
    #[arg(long, default_value_t = 3)]
    min_answers: usize,
    /// Depth below which a question has no consensus
    #[arg(long, default_value_t = 2.0)]
    min_depth: f64,
    /// Smallest grade of the scale
    #[arg(long, default_value_t = 1)]
    scale_min: i64,
    /// Largest grade of the scale
    #[arg(long, default_value_t = 7)]
    scale_max: i64,
    /// Verdicts output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-question summary output path (stdout when omitted)
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Curve(args) => cmd_curve(args),
        Cmd::Consensus(args) => cmd_consensus(args),
        Cmd::Report(args) => cmd_report(args),
        Cmd::Timeseries(args) => cmd_timeseries(args),
        Cmd::Survey(args) => cmd_survey(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        if matches!(e, Error::UnsupportedDimension { .. }) {
            eprintln!("hint: retry with --mode grid");
        }
        let code = match e {
            Error::Parse { .. } | Error::InvalidInput(_) | Error::Io(_) => 1,
            Error::UnsupportedDimension { .. } | Error::GridTooLarge { .. } => 2,
            Error::DegenerateScale | Error::Numerical(_) => 3,
        };
        std::process::exit(code);
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let values = normal_sample(args.n, args.mu, args.sigma, args.seed)?;
    let meta = Metadata::new("gen")
        .flag("n", args.n)
        .flag("mu", args.mu)
        .flag("sigma", args.sigma)
        .flag("seed", args.seed)
        .seed(args.seed)
        .note(format!("generator: {GENERATOR}"));
    let mut buf = Vec::new();
    io::write_values_csv(&mut buf, &meta, &values)?;
    emit(&args.out, &buf)
}

fn value_measurements(values: &[f64], error: f64) -> Result<Vec<Measurement>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| Measurement::scalar(format!("v{}", i + 1), v, error))
        .collect()
}

fn normal_density_points(curve: &Curve, mu: f64, sigma: f64) -> Vec<(f64, f64)> {
    let bps = curve.breakpoints();
    if bps.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = (bps[0], bps[bps.len() - 1]);
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    (0..=200)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 200.0;
            let z = (x - mu) / sigma;
            (x, norm * (-0.5 * z * z).exp())
        })
        .collect()
}

fn cmd_curve(args: CurveArgs) -> Result<()> {
    let values = io::read_values_csv(File::open(&args.input)?)?;
    let measurements = value_measurements(&values, args.error)?;
    let curve = build_curve_with(&measurements, args.ramp, args.normalize.normalization())?;

    let mut meta = Metadata::new("curve")
        .note(format!("input: {}", args.input.display()))
        .flag("error", args.error);
    if let Some(ramp) = args.ramp {
        meta = meta.flag("ramp", ramp);
    }
    meta = meta
        .flag("normalize", args.normalize.name())
        .flag("format", args.format.name());

    let mut buf = Vec::new();
    match args.format {
        FormatArg::Csv => io::write_curve_csv(&mut buf, &meta, &curve)?,
        FormatArg::Svg => {
            meta = meta.flag("width", args.width).flag("height", args.height);
            let mut plot = Plot::new(args.width, args.height);
            if let Some(bins) = args.hist_bins {
                meta = meta.flag("hist-bins", bins);
                let hist = histogram(&values, &HistogramSpec { bins, range: None })?;
                let heights = hist.density();
                plot = plot.histogram(&hist, &heights);
            }
            if let (Some(mu), Some(sigma)) = (args.normal_mu, args.normal_sigma) {
                meta = meta.flag("normal-mu", mu).flag("normal-sigma", sigma);
                if sigma <= 0.0 {
                    return Err(Error::invalid("--normal-sigma must be positive"));
                }
                plot = plot.line(
                    format!("normal({mu}, {sigma})"),
                    normal_density_points(&curve, mu, sigma),
                );
            }
            plot = plot.metadata(&meta).curve("aggregate", &curve);
            buf.extend_from_slice(plot.render().as_bytes());
        }
    }
    emit(&args.out, &buf)
}

fn cmd_consensus(args: ConsensusArgs) -> Result<()> {
    let measurements = io::read_measurements_csv(File::open(&args.input)?, args.error)?;
    let mut meta = Metadata::new("consensus").note(format!("input: {}", args.input.display()));
    if let Some(e) = args.error {
        meta = meta.flag("error", e);
    }
    meta = meta
        .flag("mode", args.mode.name())
        .flag("min-depth", args.min_depth);

    let result: ConsensusResult = match args.mode {
        ModeArg::Crisp => consensus_crisp(&measurements)?,
        ModeArg::Fuzzy => {
            meta = meta.flag("membership-threshold", args.membership_threshold);
            consensus_fuzzy_1d(&measurements, args.membership_threshold)?
        }
        ModeArg::Grid => {
            meta = meta.flag("resolution", args.resolution);
            consensus_grid(&measurements, args.resolution, DepthMode::Crisp)?
        }
    };
    let classification = classify(&measurements, &result, args.min_depth);

    let mut buf = Vec::new();
    io::write_consensus_csv(&mut buf, &meta, &measurements, &result, &classification)?;
    emit(&args.out, &buf)
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let clean = io::read_measurements_csv(File::open(&args.clean)?, args.error)?;
    let contaminated = io::read_measurements_csv(File::open(&args.contaminated)?, args.error)?;
    let report = robustness_report(&clean, &contaminated, &Psi::all_defaults())?;

    let mut meta = Metadata::new("report")
        .note(format!("input: {}", args.clean.display()))
        .note(format!("input: {}", args.contaminated.display()));
    if let Some(e) = args.error {
        meta = meta.flag("error", e);
    }
    let mut buf = Vec::new();
    io::write_report_csv(&mut buf, &meta, &report)?;
    emit(&args.out, &buf)
}

fn cmd_timeseries(args: TimeseriesArgs) -> Result<()> {
    let points = io::read_timeseries_csv(File::open(&args.input)?)?;
    let curve = smooth_timeseries(&points, args.time_error)?;

    let mut meta = Metadata::new("timeseries")
        .note(format!("input: {}", args.input.display()))
        .flag("time-error", args.time_error)
        .flag("format", args.format.name());

    let mut buf = Vec::new();
    match args.format {
        FormatArg::Csv => io::write_curve_csv(&mut buf, &meta, &curve)?,
        FormatArg::Svg => {
            meta = meta.flag("width", args.width).flag("height", args.height);
            let plot = Plot::new(args.width, args.height)
                .metadata(&meta)
                .curve("smoothed", &curve);
            buf.extend_from_slice(plot.render().as_bytes());
        }
    }
    emit(&args.out, &buf)
}

fn cmd_survey(args: SurveyArgs) -> Result<()> {
    let table = io::read_survey_csv(File::open(&args.input)?, args.scale_min, args.scale_max)?;
    let options = SurveyOptions {
        grade_error: args.grade_error,
        flag_threshold: args.flag_threshold,
        min_answers: args.min_answers,
        min_depth: args.min_depth,
        ..SurveyOptions::default()
    };
    let analysis = analyze_survey(&table, &options)?;

    let meta = Metadata::new("survey")
        .note(format!("input: {}", args.input.display()))
        .flag("grade-error", args.grade_error)
        .flag("flag-threshold", args.flag_threshold)
        .flag("min-answers", args.min_answers)
        .flag("min-depth", args.min_depth)
        .flag("scale-min", args.scale_min)
        .flag("scale-max", args.scale_max);

    let mut verdicts = Vec::new();
    io::write_verdicts_csv(&mut verdicts, &meta, &analysis.verdicts)?;
    emit(&args.out, &verdicts)?;

    let mut summary = Vec::new();
    io::write_survey_summary_csv(&mut summary, &meta, &analysis)?;
    emit(&args.summary_out, &summary)
}
