//! `depthgof` command-line tool.
//!
//! Exit status: 0 on success, 1 when a test rejects, 2 on usage or data
//! errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use depthgof::datasets;
use depthgof::gof::{run_gof, GofConfig, NullSource};
use depthgof::harness::{run_experiment, write_rows, ExperimentConfig, Profile};
use depthgof::io::{ddplot_svg, read_matrix};
use depthgof::two_sample::{
    ddplot_points, parse_two_sample_stats, two_sample_test, write_ddplot_csv, PvalueMethod,
    TwoSampleConfig, DEFAULT_PERMUTATIONS, DEFAULT_TABLE_REPLICATES,
};
use depthgof::uniformity::parse_stats;
use depthgof::{depth_profile, DataMatrix, DepthKind, Error};

#[derive(Parser)]
#[command(name = "depthgof", version, about = "Depth-based goodness-of-fit and two-sample tests")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Depth of every input row with respect to a reference sample.
    Depth(DepthArgs),
    /// One-sample goodness-of-fit test against a null distribution.
    Gof(GofArgs),
    /// Two-sample test on joint-sample depth ranks.
    Twosample(TwoSampleArgs),
    /// Run a JSON experiment and write rejection rates as CSV.
    Simulate(SimulateArgs),
    /// Depth-depth plot coordinates as CSV or SVG.
    Ddplot(DdplotArgs),
}

#[derive(Args)]
struct DepthArgs {
    /// Points to evaluate (CSV).
    #[arg(long)]
    input: PathBuf,
    /// Reference sample (CSV).
    #[arg(long)]
    reference: PathBuf,
    /// halfspace, zonoid or halfspace-approx=M[@seed].
    #[arg(long, default_value = "halfspace")]
    depth: DepthKind,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    /// Data (CSV).
    data: PathBuf,
    /// Null distribution spec (e.g. `mvnormal:d=2`) or a CSV reference sample.
    #[arg(long)]
    null: String,
    #[arg(long, default_value = "halfspace")]
    depth: DepthKind,
    /// Comma-separated: ks, cvm, ad, ad-literal, gd, gd-classical.
    #[arg(long, default_value = "ks,cvm")]
    stats: String,
    /// Reference sample size N when the null is a distribution.
    #[arg(long, default_value_t = depthgof::gof::DEFAULT_REFERENCE_SIZE)]
    ref_size: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo replicates of the null tables.
    #[arg(long, default_value_t = depthgof::gof::DEFAULT_NULL_REPLICATES)]
    null_replicates: usize,
    /// Also write per-statistic results as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PvalueArg {
    Auto,
    Perm,
    Table,
    Exact,
}

#[derive(Args)]
struct Samples {
    /// First sample (CSV).
    #[arg(long, requires = "y", conflicts_with = "dataset")]
    x: Option<PathBuf>,
    /// Second sample (CSV).
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    /// Bundled data set split into its first two groups (e.g. toothgrowth).
    #[arg(long)]
    dataset: Option<String>,
}

impl Samples {
    fn load(&self) -> Result<(DataMatrix, DataMatrix, String, String), Error> {
        match (&self.x, &self.y, &self.dataset) {
            (Some(x), Some(y), None) => Ok((
                read_matrix(x)?,
                read_matrix(y)?,
                x.display().to_string(),
                y.display().to_string(),
            )),
            (None, None, Some(name)) => {
                let ds = datasets::by_name(name)?;
                let names = ds.group_names();
                if names.len() < 2 {
                    return Err(Error::InvalidArgument(format!("{} has fewer than 2 groups", ds.name)));
                }
                Ok((ds.group(names[0])?, ds.group(names[1])?, names[0].into(), names[1].into()))
            }
            _ => Err(Error::InvalidArgument(
                "give either --x and --y, or --dataset".into(),
            )),
        }
    }
}

#[derive(Args)]
struct TwoSampleArgs {
    #[command(flatten)]
    samples: Samples,
    #[arg(long, default_value = "halfspace")]
    depth: DepthKind,
    /// Comma-separated: ks, cvm, ad.
    #[arg(long, default_value = "ks,cvm,ad")]
    stats: String,
    /// auto uses permutations when depths tie, a rank table otherwise.
    #[arg(long, value_enum, default_value = "auto")]
    pvalue: PvalueArg,
    /// Permutations or rank-table replicates.
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Replicates and reference size; overrides the config.
    #[arg(long)]
    profile: Option<Profile>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the seconds column.
    #[arg(long)]
    omit_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Args)]
struct DdplotArgs {
    #[command(flatten)]
    samples: Samples,
    #[arg(long, default_value = "halfspace")]
    depth: DepthKind,
    #[arg(long, value_enum, default_value = "csv")]
    format: PlotFormat,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn cmd_depth(a: &DepthArgs) -> Result<ExitCode, Error> {
    let input = read_matrix(&a.input)?;
    let reference = read_matrix(&a.reference)?;
    let kind = a.depth.for_dimension(reference.ncols());
    let depths = depth_profile(&input, &reference, kind)?;
    let mut buf = Vec::new();
    depths.write_csv(&mut buf)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_null(s: &str) -> Result<NullSource, Error> {
    let path = Path::new(s);
    if path.is_file() || s.ends_with(".csv") {
        Ok(NullSource::Reference(read_matrix(path)?))
    } else {
        Ok(NullSource::Distribution(s.parse()?))
    }
}

fn decision(reject: bool) -> ExitCode {
    if reject {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_gof(a: &GofArgs) -> Result<ExitCode, Error> {
    let x = read_matrix(&a.data)?;
    let mut cfg = GofConfig::new(parse_null(&a.null)?);
    cfg.depth = a.depth;
    cfg.stats = parse_stats(&a.stats)?;
    cfg.reference_size = a.ref_size;
    cfg.level = a.level;
    cfg.seed = a.seed;
    cfg.null_replicates = a.null_replicates;
    let report = run_gof(&x, &cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        emit(Some(path), &buf)?;
    }
    emit(None, report.to_key_value().as_bytes())?;
    Ok(decision(report.any_reject()))
}

fn cmd_twosample(a: &TwoSampleArgs) -> Result<ExitCode, Error> {
    let (x, y, _, _) = a.samples.load()?;
    let method = match a.pvalue {
        PvalueArg::Auto => PvalueMethod::Auto { b: a.b },
        PvalueArg::Perm => PvalueMethod::Permutation {
            b: a.b.unwrap_or(DEFAULT_PERMUTATIONS),
        },
        PvalueArg::Table => PvalueMethod::RankTable {
            b: a.b.unwrap_or(DEFAULT_TABLE_REPLICATES),
        },
        PvalueArg::Exact => PvalueMethod::ExactEnumeration,
    };
    let cfg = TwoSampleConfig {
        depth: a.depth,
        stats: parse_two_sample_stats(&a.stats)?,
        method,
        level: a.level,
        seed: a.seed,
        ..Default::default()
    };
    let report = two_sample_test(&x, &y, &cfg)?;
    emit(None, report.to_key_value().as_bytes())?;
    Ok(decision(report.any_reject()))
}

fn cmd_simulate(a: &SimulateArgs) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Error::Io(format!("{}: {e}", a.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(p) = a.profile {
        cfg.apply_profile(p);
    }
    let rows = run_experiment(&cfg)?;
    let mut buf = Vec::new();
    write_rows(&rows, a.omit_timing, &mut buf)?;
    emit(a.out.as_deref(), &buf)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ddplot(a: &DdplotArgs) -> Result<ExitCode, Error> {
    let (x, y, xn, yn) = a.samples.load()?;
    let points = ddplot_points(&x, &y, a.depth)?;
    let bytes = match a.format {
        PlotFormat::Csv => {
            let mut buf = Vec::new();
            write_ddplot_csv(&points, &mut buf)?;
            buf
        }
        PlotFormat::Svg => {
            ddplot_svg(&points, &format!("depth in {xn}"), &format!("depth in {yn}")).into_bytes()
        }
    };
    emit(a.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Depth(a) => cmd_depth(a),
        Command::Gof(a) => cmd_gof(a),
        Command::Twosample(a) => cmd_twosample(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Ddplot(a) => cmd_ddplot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
