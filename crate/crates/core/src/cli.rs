//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad input data, 3 bad configuration, 4 internal
//! invariant violation. Point ids and axes are 1-based in every output.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, ClusterSpec, LabeledDataset, MetricRow, PlotRow};
use crate::dataset::Dataset;
use crate::density::{self, DensityParams};
use crate::ensemble::{bagged_report, BaggingConfig};
use crate::error::Error;
use crate::stream::{ShingleScore, StreamConfig, WindowForest};
use crate::tree::AlgorithmKind;

#[derive(Debug, Parser)]
#[command(name = "cutforest", version, about = "Isolation and random cut forest anomaly scoring")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every point of a CSV file with a bagged forest.
    Score(ScoreArgs),
    /// Score a scalar time series read one value per line.
    Stream(StreamArgs),
    /// Report the density measure of a CSV file.
    Density(DensityArgs),
    /// Run a comparison experiment or an AUC sweep over a labeled CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    If,
    Wif,
    Rrcf,
    Wrcf,
}

impl From<Algorithm> for AlgorithmKind {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::If => AlgorithmKind::If,
            Algorithm::Wif => AlgorithmKind::Wif,
            Algorithm::Rrcf => AlgorithmKind::Rrcf,
            Algorithm::Wrcf => AlgorithmKind::Wrcf,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Random seed; a fresh one is drawn and echoed when omitted.
    #[arg(long, env = "CUTFOREST_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (0 uses every core).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Cluster threshold for density-aware splits.
    #[arg(long, default_value_t = 2)]
    pub alpha: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// CSV file, or `-` for standard input.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Wrcf)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    /// Points per tree; defaults to the whole data set.
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    /// One number per line; standard input when omitted.
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algorithm::Rrcf)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 4)]
    pub shingle: usize,
    #[arg(long, default_value_t = 256)]
    pub window: usize,
    #[arg(long, default_value_t = 40)]
    pub forest_size: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    /// CSV file, or `-` for standard input.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// `sine`, `ten-points`, `anomaly-clusters`, `clusters-noise`, or a
    /// labeled CSV file.
    pub experiment: String,
    /// Algorithms to compare; the experiment picks when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algorithm: Vec<Algorithm>,
    /// Iteration counts to sweep.
    #[arg(long, value_delimiter = ',')]
    pub iterations: Vec<usize>,
    /// Sample (tree) sizes to sweep.
    #[arg(long, value_delimiter = ',')]
    pub sample_size: Vec<usize>,
    /// Normalized score above which a point counts as detected.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub forest_size: usize,
    /// Repetitions with seeds derived from `--seed`.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Also write per-point plot data (`x,y,series`) here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Config(String),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Config(_) => 3,
            Self::Invariant(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Invariant(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyDataset | Error::DimensionMismatch { .. } | Error::NonFinite { .. } => Self::Input(e.to_string()),
            Error::AxisOutOfRange { .. } | Error::ConstantProjection | Error::DegenerateBox | Error::InvalidParameter(_) => {
                Self::Config(e.to_string())
            }
            Error::PointNotFound(_) | Error::NodeNotFound(_) | Error::Invariant(_) => Self::Invariant(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Entry point used by the binary.
pub fn main() -> i32 {
    let mut stdin = BufReader::new(io::stdin());
    let mut stdout = io::stdout();
    run(std::env::args_os(), &mut stdin, &mut stdout, &mut io::stderr())
}

/// Parses arguments and runs a subcommand against the given streams.
pub fn run<I, T>(
    args: I,
    stdin: &mut (dyn BufRead + Send),
    stdout: &mut (dyn Write + Send),
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    let common = match &cli.command {
        Command::Score(a) => &a.common,
        Command::Stream(a) => &a.common,
        Command::Density(a) => &a.common,
        Command::Bench(a) => &a.common,
    };
    let result = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))
        .and_then(|pool| pool.install(|| dispatch(&cli.command, stdin, stdout)));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "cutforest: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, stdin: &mut (dyn BufRead + Send), stdout: &mut (dyn Write + Send)) -> CliResult<()> {
    match command {
        Command::Score(a) => cmd_score(a, stdin, stdout),
        Command::Stream(a) => cmd_stream(a, stdin, stdout),
        Command::Density(a) => cmd_density(a, stdin, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
    }
}

fn params(common: &Common) -> CliResult<DensityParams> {
    Ok(DensityParams::new(common.alpha)?)
}

fn seed(common: &Common) -> u64 {
    common.seed.unwrap_or_else(rand::random)
}

/// Runs `f` against the output file, or standard output when none is set.
fn with_output(path: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            f(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn read_all(path: &Path, stdin: &mut dyn BufRead) -> CliResult<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        stdin.read_to_string(&mut text)?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Coordinates and optional labels parsed from CSV text.
///
/// The first row is a header when any field is not a number. A header column
/// named `label` holds 0/1 labels instead of a coordinate. Lines starting
/// with `#` are skipped.
pub fn parse_csv(text: &str) -> CliResult<(Dataset, Option<Vec<bool>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<bool> = Vec::new();
    let mut label_col = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record.iter().map(|f| f.parse::<f64>().ok()).collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            label_col = record.iter().position(|f| f.eq_ignore_ascii_case("label"));
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (col, (value, field)) in parsed.iter().zip(record.iter()).enumerate() {
            let value = value.ok_or_else(|| CliError::Input(format!("line {line}: '{field}' is not a number")))?;
            if !value.is_finite() {
                return Err(CliError::Input(format!("line {line}: '{field}' is not finite")));
            }
            if Some(col) == label_col {
                labels.push(value != 0.0);
            } else {
                row.push(value);
            }
        }
        if rows.first().is_some_and(|first| first.len() != row.len()) {
            return Err(CliError::Input(format!("line {line}: expected {} columns", rows[0].len())));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("no data rows".into()));
    }
    let data = Dataset::new(&rows)?;
    Ok((data, label_col.map(|_| labels)))
}

fn cmd_score(a: &ScoreArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<()> {
    let params = params(&a.common)?;
    let (data, _) = parse_csv(&read_all(&a.input, stdin)?)?;
    let config = BaggingConfig::new(a.algorithm.into(), a.sample_size.unwrap_or(data.len()), a.iterations)
        .with_seed(seed(&a.common))
        .with_params(params);
    let report = bagged_report(&data, &config)?;
    with_output(a.common.output.as_deref(), stdout, |w| match a.common.format {
        Format::Csv => Ok(report.write_csv(w)?),
        Format::Json => Ok(writeln!(w, "{}", serde_json::to_string_pretty(&report.to_json()).map_err(io::Error::other)?)?),
    })
}

fn metadata(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    meta.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    meta
}

fn cmd_stream(a: &StreamArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<()> {
    let kind: AlgorithmKind = a.algorithm.into();
    let seed = seed(&a.common);
    let config = StreamConfig::new(kind, a.shingle, a.window, a.forest_size)
        .with_seed(seed)
        .with_params(params(&a.common)?);
    let mut forest = WindowForest::new(config)?;
    let mut meta = vec![
        ("algorithm", kind.to_string()),
        ("seed", seed.to_string()),
        ("shingle", a.shingle.to_string()),
        ("window", a.window.to_string()),
        ("forest_size", a.forest_size.to_string()),
    ];
    if kind.is_weighted() {
        meta.push(("alpha", a.common.alpha.to_string()));
    }
    let meta = metadata(&meta);

    let mut reader: Box<dyn BufRead + '_> = match &a.input {
        Some(p) if p.as_os_str() != "-" => Box::new(BufReader::new(
            File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        _ => Box::new(stdin),
    };
    let format = a.common.format;
    with_output(a.common.output.as_deref(), stdout, |w| {
        let mut finalized = Vec::new();
        let mut emit = |w: &mut dyn Write, scores: Vec<ShingleScore>| -> io::Result<()> {
            for s in scores {
                match format {
                    Format::Csv => writeln!(w, "{},{}", s.t, s.codisp)?,
                    Format::Json => finalized.push(serde_json::json!({ "t": s.t, "codisp": s.codisp })),
                }
            }
            Ok(())
        };
        if format == Format::Csv {
            for (k, v) in &meta {
                writeln!(w, "# {k}={v}")?;
            }
            writeln!(w, "t,codisp")?;
        }
        let mut line = String::new();
        let mut number = 0;
        let mut values = 0usize;
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            number += 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let x = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("line {number}: '{text}' is not a number")))?;
            values += 1;
            emit(w, forest.push(x)?)?;
            w.flush()?;
        }
        if values < a.shingle {
            return Err(CliError::Config(format!(
                "series of {values} values is shorter than the shingle size {}",
                a.shingle
            )));
        }
        emit(w, forest.finish()?)?;
        if format == Format::Json {
            let doc = serde_json::json!({ "metadata": json_meta(&meta), "scores": finalized });
            writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(io::Error::other)?)?;
        }
        Ok(())
    })
}

fn json_meta(meta: &[(String, String)]) -> serde_json::Map<String, serde_json::Value> {
    meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect()
}

fn cmd_density(a: &DensityArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<()> {
    let p = params(&a.common)?;
    let (data, _) = parse_csv(&read_all(&a.input, stdin)?)?;
    let mut axes = Vec::new();
    for q in 0..crate::dataset::Points::dim(&data) {
        let proj = data.project(q)?;
        let bad = match proj.bad_set_measure(p.alpha) {
            Ok(m) => Some(m),
            Err(Error::ConstantProjection) => None,
            Err(e) => return Err(e.into()),
        };
        axes.push((q + 1, proj.radius()?, proj.mu0()?, bad));
    }
    let mu = density::mu(&data);
    let meta = metadata(&[("points", data.len().to_string()), ("alpha", p.alpha.to_string())]);
    with_output(a.common.output.as_deref(), stdout, |w| match a.common.format {
        Format::Csv => {
            for (k, v) in &meta {
                writeln!(w, "# {k}={v}")?;
            }
            writeln!(w, "axis,epsilon,mu0,bad_set_measure")?;
            for (axis, eps, mu0, bad) in &axes {
                let bad = bad.map_or(String::new(), |b| b.to_string());
                writeln!(w, "{axis},{eps},{mu0},{bad}")?;
            }
            Ok(writeln!(w, "all,,{mu},")?)
        }
        Format::Json => {
            let axes: Vec<serde_json::Value> = axes
                .iter()
                .map(|(axis, eps, mu0, bad)| serde_json::json!({ "axis": axis, "epsilon": eps, "mu0": mu0, "bad_set_measure": bad }))
                .collect();
            let doc = serde_json::json!({ "metadata": json_meta(&meta), "mu": mu, "axes": axes });
            Ok(writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(io::Error::other)?)?)
        }
    })
}

fn kinds_or(a: &BenchArgs, default: &[AlgorithmKind]) -> Vec<AlgorithmKind> {
    if a.algorithm.is_empty() {
        default.to_vec()
    } else {
        a.algorithm.iter().map(|&k| k.into()).collect()
    }
}

fn list_or(values: &[usize], default: &[usize]) -> Vec<usize> {
    if values.is_empty() { default.to_vec() } else { values.to_vec() }
}

fn single(values: &[usize], default: usize, name: &str) -> CliResult<usize> {
    match values {
        [] => Ok(default),
        [v] => Ok(*v),
        _ => Err(CliError::Config(format!("this experiment takes a single {name}"))),
    }
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> CliResult<()> {
    const PAIR: [AlgorithmKind; 2] = [AlgorithmKind::Rrcf, AlgorithmKind::Wrcf];
    let p = params(&a.common)?;
    let seed = seed(&a.common);
    if a.runs == 0 {
        return Err(CliError::Config("runs must be at least 1".into()));
    }
    let mut meta = vec![("experiment", a.experiment.clone()), ("seed", seed.to_string()), ("runs", a.runs.to_string())];
    let (rows, plot): (Vec<MetricRow>, Vec<PlotRow>) = match a.experiment.as_str() {
        "sine" => {
            let kinds = kinds_or(a, &PAIR);
            meta.push(("forest_size", a.forest_size.to_string()));
            let plot = bench::sine_plot(&kinds, &[a.forest_size], p, seed)?;
            let mut rows = Vec::new();
            for &kind in &kinds {
                let name = format!("{kind}_r{}", a.forest_size);
                let mut curve: Vec<&PlotRow> = plot.iter().filter(|r| r.series == name).collect();
                curve.sort_by(|x, y| y.y.total_cmp(&x.y).then(x.x.total_cmp(&y.x)));
                for (rank, r) in curve.iter().take(2).enumerate() {
                    rows.push(MetricRow { algorithm: kind, seed, n: a.forest_size, metric: format!("peak{}_t", rank + 1), value: r.x });
                }
            }
            (rows, plot)
        }
        "ten-points" => {
            let x = bench::ten_point_set();
            let kinds = kinds_or(a, &PAIR);
            let iterations = list_or(&a.iterations, &[10, 10_000]);
            let mut rows = Vec::new();
            for run in 0..a.runs {
                let s = crate::rng::derive_seed(seed, run as u64);
                for &n in &iterations {
                    for &kind in &kinds {
                        let scores = bench::scores_for(&x, &BaggingConfig::new(kind, x.len(), n).with_seed(s).with_params(p))?;
                        rows.extend(scores.iter().enumerate().map(|(i, &v)| MetricRow {
                            algorithm: kind,
                            seed: s,
                            n,
                            metric: format!("score_p{}", i + 1),
                            value: v,
                        }));
                    }
                }
            }
            (rows, Vec::new())
        }
        "anomaly-clusters" | "clusters-noise" => {
            let (spec, default_size, default_threshold, default_iterations) = if a.experiment == "anomaly-clusters" {
                (ClusterSpec::anomaly_clusters(), 10, 0.5, vec![100])
            } else {
                (ClusterSpec::clusters_with_noise(), 20, 0.35, vec![10, 100, 1000])
            };
            let data = bench::gen_gaussian_clusters(&spec, seed)?;
            let kinds = kinds_or(a, &PAIR);
            let size = single(&a.sample_size, default_size, "sample size")?;
            let threshold = a.threshold.unwrap_or(default_threshold);
            let iterations = list_or(&a.iterations, &default_iterations);
            meta.push(("sample_size", size.to_string()));
            meta.push(("threshold", threshold.to_string()));
            let rows = bench::detections_by_iterations(&data, &kinds, &iterations, size, threshold, p, seed, a.runs)?;
            let last = *iterations.last().expect("non-empty");
            let mut plot = bench::score_plot(&data.data, &kinds, last, size, p, seed)?;
            plot.extend(data.data.iter().enumerate().map(|(i, pt)| PlotRow { x: (i + 1) as f64, y: pt[0], series: "coord1".into() }));
            plot.extend(data.data.iter().enumerate().map(|(i, pt)| PlotRow { x: (i + 1) as f64, y: pt[1], series: "coord2".into() }));
            plot.extend(data.labels.iter().enumerate().map(|(i, &l)| PlotRow { x: (i + 1) as f64, y: l as u8 as f64, series: "label".into() }));
            (rows, plot)
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("unknown experiment or unreadable file '{path}': {e}")))?;
            let (data, labels) = parse_csv(&text)?;
            let labels = labels.ok_or_else(|| CliError::Input(format!("{path}: no `label` column")))?;
            let labeled = LabeledDataset::new(data, labels)?;
            let kinds = kinds_or(a, &AlgorithmKind::ALL);
            let sizes = list_or(&a.sample_size, &[32, 64, 128, 256]);
            let iterations = single(&a.iterations, 100, "iteration count")?;
            meta.push(("iterations", iterations.to_string()));
            let rows = bench::auc_by_tree_size(&labeled, &kinds, &sizes, iterations, p, seed, a.runs)?;
            (rows, Vec::new())
        }
    };
    meta.push(("alpha", p.alpha.to_string()));
    let meta = metadata(&meta);
    if let Some(path) = &a.plot {
        with_output(Some(path), stdout, |w| Ok(bench::write_plot(w, &meta, &plot)?))?;
    }
    with_output(a.common.output.as_deref(), stdout, |w| match a.common.format {
        Format::Csv => Ok(bench::write_metrics(w, &meta, &rows)?),
        Format::Json => {
            let doc = serde_json::json!({ "metadata": json_meta(&meta), "rows": rows });
            Ok(writeln!(w, "{}", serde_json::to_string_pretty(&doc).map_err(io::Error::other)?)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], input: &str) -> (i32, String, String) {
        let mut stdin = io::Cursor::new(input.as_bytes().to_vec());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["cutforest"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut stdin, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn csv_header_and_labels() {
        let (d, labels) = parse_csv("x,y,label\n1,2,0\n3,4e0,1\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(labels, Some(vec![false, true]));
        let (d, labels) = parse_csv("# note\n1\n2\n").unwrap();
        assert_eq!((d.len(), labels), (2, None));
        let err = parse_csv("1,2\n3,x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert_eq!(parse_csv("").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn density_of_six_points() {
        let (code, out, _) = run_str(&["density", "-"], "0,0\n1,0\n2,0\n10,0\n11,0\n12,0\n");
        assert_eq!(code, 0);
        let row: Vec<f64> = out.lines().find(|l| l.starts_with("1,")).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(&row[..3], &[1.0, 1.2, 0.5]);
        assert!((row[3] - 4.4).abs() < 1e-12);
        assert!(out.ends_with("all,,0.75,\n"), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["score", "-", "--seed", "1"], "").0, 2);
        assert_eq!(run_str(&["score", "-", "--algorithm", "wif", "--alpha", "1"], "1\n2\n").0, 3);
        assert_eq!(run_str(&["stream", "--shingle", "4", "--window", "1"], "1\n2\n").0, 3);
        assert_eq!(run_str(&["stream", "--shingle", "1", "--window", "1"], "1\nabc\n").0, 2);
        assert_eq!(run_str(&["bench", "no-such-experiment"], "").0, 3);
        assert_eq!(run_str(&["--help"], "").0, 0);
        assert_eq!(run_str(&["score"], "").0, 3);
    }
}
