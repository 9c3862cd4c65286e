//! Command-line front end.
//!
//! [`run`] parses an argv, executes one pipeline, and returns the process
//! exit code: 0 on success, 1 for usage errors (bad flags or parameter
//! values), 2 for data errors (unreadable or malformed inputs). All output
//! is deterministic: the same argv, input files, and seed produce the same
//! bytes.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::clustering::{detect, estimate_sigma, KSpec, MergeSpec, QcParams, SigmaSpec};
use crate::datagen::{generate, ScenarioId, ScenarioParams};
use crate::error::{QcError, Result};
use crate::io::{
    load_air_quality, load_air_quality_raw, load_csv, write_grid, write_report,
    write_scenario_csv, CsvOptions, Loaded, RunReport,
};
use crate::potential::{
    Dataset, GridBounds, KernelWidth, PotentialField, PotentialMode,
};
use crate::preprocess::{pca_fit, pca_project, standardize};

/// Kernel width argument: the literal `auto` or a number.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SigmaArg {
    Auto,
    Fixed(f64),
}

impl FromStr for SigmaArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SigmaArg::Auto);
        }
        s.parse::<f64>()
            .map(SigmaArg::Fixed)
            .map_err(|_| format!("expected `auto` or a number, got {s:?}"))
    }
}

impl SigmaArg {
    fn to_spec(self) -> SigmaSpec {
        match self {
            SigmaArg::Auto => SigmaSpec::default(),
            SigmaArg::Fixed(v) => SigmaSpec::Fixed(v),
        }
    }
}

/// Rectangle argument in the form `xmin,xmax,ymin,ymax`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BoundsArg(GridBounds);

impl FromStr for BoundsArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!(
                "expected xmin,xmax,ymin,ymax (4 numbers), got {} fields",
                parts.len()
            ));
        }
        let mut v = [0.0f64; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse {part:?} as a number"))?;
        }
        Ok(BoundsArg(GridBounds {
            x: (v[0], v[1]),
            y: (v[2], v[3]),
        }))
    }
}

/// Grid size argument: one number for a square grid or `nx,ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ResolutionArg(usize, usize);

impl FromStr for ResolutionArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parse = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("cannot parse {p:?} as a cell count"))
        };
        match s.split_once(',') {
            None => {
                let n = parse(s)?;
                Ok(ResolutionArg(n, n))
            }
            Some((a, b)) => Ok(ResolutionArg(parse(a)?, parse(b)?)),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qc",
    version,
    about = "Quantum clustering outlier detection",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run outlier detection on a CSV dataset and report the results.
    Detect(DetectArgs),
    /// Evaluate the potential on a 2-D grid for external plotting.
    Grid(GridArgs),
    /// Generate a synthetic scenario as CSV with a truth column.
    Gen(GenArgs),
    /// Estimate the kernel width and print the distance histogram.
    Sigma(SigmaArgs),
    /// Run the air-quality pipeline: load, standardize, project to two
    /// principal components, detect.
    Airquality(AirArgs),
}

#[derive(Args, Debug)]
struct DetectArgs {
    /// Input CSV. A header row is detected automatically; a column named
    /// `truth` is treated as ground-truth labels and excluded.
    input: PathBuf,
    /// Kernel width: `auto` estimates it from the distance histogram.
    #[arg(long, default_value = "auto")]
    sigma: SigmaArg,
    /// Clusters smaller than this count are outliers; default is 5% of n.
    #[arg(long)]
    k: Option<usize>,
    /// Settled points closer than this merge into one cluster; default
    /// sigma / 4.
    #[arg(long)]
    merge_radius: Option<f64>,
    /// `direct` descends to potential minima; `inverse` to maxima.
    #[arg(long, default_value = "direct")]
    mode: ModeArg,
    /// Project onto this many principal components before detection.
    #[arg(long, value_name = "M")]
    pca: Option<usize>,
    /// Rescale each column to zero mean and unit spread first.
    #[arg(long)]
    standardize: bool,
    /// Recorded in the report for provenance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq)]
enum ModeArg {
    Direct,
    Inverse,
}

impl From<ModeArg> for PotentialMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Direct => PotentialMode::Direct,
            ModeArg::Inverse => PotentialMode::Inverse,
        }
    }
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Input CSV of points; same format handling as `detect`.
    input: PathBuf,
    /// Kernel width for the evaluation.
    #[arg(long)]
    sigma: f64,
    /// Evaluation rectangle `xmin,xmax,ymin,ymax`; default is the data's
    /// bounding box padded by 3 sigma.
    #[arg(long)]
    bounds: Option<BoundsArg>,
    /// Cells per axis, `n` or `nx,ny`.
    #[arg(long, default_value = "50")]
    resolution: ResolutionArg,
    /// `direct` or `inverse` potential.
    #[arg(long, default_value = "direct")]
    mode: ModeArg,
    /// Output CSV path (`x,y,v` rows).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Scenario id, one of A through F.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON object overriding scenario parameter defaults, for example
    /// `{"blob_n": 400}`.
    #[arg(long)]
    params: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SigmaArgs {
    /// Input CSV; same format handling as `detect`.
    input: PathBuf,
    /// Histogram bin count.
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

#[derive(Args, Debug)]
struct AirArgs {
    /// Path to the UCI air-quality CSV export.
    path: PathBuf,
    /// Kernel width; `auto` estimates it.
    #[arg(long, default_value = "auto")]
    sigma: SigmaArg,
    /// Skip the per-column standardization step.
    #[arg(long)]
    no_standardize: bool,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` and runs one command, returning the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Grid(args) => cmd_grid(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Sigma(args) => cmd_sigma(args),
        Command::Airquality(args) => cmd_airquality(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Usage errors (bad parameter values) exit 1; data errors exit 2.
fn exit_code(e: &QcError) -> i32 {
    match e {
        QcError::InvalidParam { .. } => 1,
        _ => 2,
    }
}

/// Loads a detect/grid/sigma input: sniffs a header row by checking
/// whether the first record is fully numeric, and drops a `truth` column
/// when one is named.
fn load_points(path: &PathBuf) -> Result<Loaded> {
    let base = CsvOptions::default();
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(base.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| QcError::Csv {
            path: path.into(),
            source: e,
        })?;
    let mut first = csv::StringRecord::new();
    let has_row = rdr.read_record(&mut first).map_err(|e| QcError::Csv {
        path: path.into(),
        source: e,
    })?;
    if !has_row {
        return Err(QcError::EmptyInput {
            context: "CSV contains no data rows",
        });
    }
    let numeric = first.iter().all(|c| c.trim().parse::<f64>().is_ok());
    let options = if numeric {
        base
    } else {
        let include: Vec<usize> = first
            .iter()
            .enumerate()
            .filter(|(_, name)| name.trim() != "truth")
            .map(|(i, _)| i)
            .collect();
        CsvOptions {
            has_header: true,
            include: Some(include),
            ..base
        }
    };
    load_csv(path, &options)
}

fn print_summary(report: &RunReport) {
    println!(
        "n={} d={} sigma={} k={} merge_radius={} mode={}",
        report.n, report.d, report.sigma, report.k, report.merge_radius, report.mode
    );
    println!(
        "clusters={} sizes={:?} outliers={}",
        report.cluster_count, report.cluster_sizes, report.outlier_count
    );
    let flagged: Vec<usize> = report
        .points
        .iter()
        .filter(|p| p.outlier)
        .map(|p| p.index)
        .collect();
    println!("flagged={flagged:?}");
    if report.diagnostics.non_converged > 0 {
        println!(
            "note: {} descents hit the iteration budget",
            report.diagnostics.non_converged
        );
    }
    if !report.diagnostics.dropped_columns.is_empty() {
        println!(
            "note: dropped input columns {:?}",
            report.diagnostics.dropped_columns
        );
    }
}

fn finish_detection(
    dataset: &Dataset,
    params: &QcParams,
    seed: u64,
    dropped: Vec<usize>,
    out: Option<&PathBuf>,
) -> Result<()> {
    let det = detect(dataset, params)?;
    let report = RunReport::from_detection(&det, seed, dropped);
    print_summary(&report);
    if let Some(path) = out {
        write_report(&report, path)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let loaded = load_points(&args.input)?;
    let mut dropped = loaded.dropped_columns.clone();
    let mut matrix = loaded.dataset.points().clone();
    if args.standardize {
        let std = standardize(&matrix)?;
        for &i in &std.dropped_columns {
            dropped.push(loaded.kept_columns[i]);
        }
        dropped.sort_unstable();
        matrix = std.matrix;
    }
    if let Some(m) = args.pca {
        let model = pca_fit(&matrix, m)?;
        matrix = pca_project(&model, &matrix)?;
    }
    let dataset = Dataset::new(matrix)?;
    let params = QcParams {
        sigma: args.sigma.to_spec(),
        k: args.k.map_or(KSpec::Auto, KSpec::Fixed),
        merge_radius: args.merge_radius.map_or(MergeSpec::Auto, MergeSpec::Fixed),
        mode: args.mode.into(),
        ..QcParams::default()
    };
    finish_detection(&dataset, &params, args.seed, dropped, args.out.as_ref())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let loaded = load_points(&args.input)?;
    let dataset = loaded.dataset;
    if dataset.d() != 2 {
        return Err(QcError::invalid(
            "input",
            format!("grid evaluation needs 2-D data, got {} columns", dataset.d()),
        ));
    }
    let sigma = KernelWidth::new(args.sigma)?;
    let bounds = match args.bounds {
        Some(BoundsArg(b)) => b,
        None => {
            let pts = dataset.points();
            let pad = 3.0 * sigma.get();
            let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
            for r in 0..pts.nrows() {
                xmin = xmin.min(pts[[r, 0]]);
                xmax = xmax.max(pts[[r, 0]]);
                ymin = ymin.min(pts[[r, 1]]);
                ymax = ymax.max(pts[[r, 1]]);
            }
            GridBounds {
                x: (xmin - pad, xmax + pad),
                y: (ymin - pad, ymax + pad),
            }
        }
    };
    let field = PotentialField::new(&dataset, sigma, args.mode.into());
    let ResolutionArg(nx, ny) = args.resolution;
    let grid = field.potential_grid(bounds, (nx, ny))?;
    write_grid(&grid, &args.out)?;
    println!(
        "grid {}x{} over x in [{}, {}], y in [{}, {}] written to {}",
        nx,
        ny,
        bounds.x.0,
        bounds.x.1,
        bounds.y.0,
        bounds.y.1,
        args.out.display()
    );
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let id: ScenarioId = args
        .scenario
        .parse()
        .map_err(|_| QcError::invalid("scenario", format!("unknown scenario {:?}", args.scenario)))?;
    let params = match &args.params {
        Some(json) => ScenarioParams::from_overrides(id, json)?,
        None => id.default_params(),
    };
    let scenario = generate(id, args.seed, &params)?;
    write_scenario_csv(&scenario, &args.out)?;
    println!(
        "scenario {} seed {}: {} points ({} planted) written to {}",
        id,
        args.seed,
        scenario.dataset.n(),
        scenario.planted_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_sigma(args: SigmaArgs) -> Result<()> {
    let loaded = load_points(&args.input)?;
    let (sigma, hist) = estimate_sigma(&loaded.dataset, args.bins)?;
    println!("sigma: {}", sigma.get());
    println!("bins: {}", hist.counts.len());
    println!("histogram:");
    for (i, count) in hist.counts.iter().enumerate() {
        let mark = if i == hist.mode_bin { " <- mode" } else { "" };
        println!(
            "  [{}, {}) {}{}",
            hist.bin_edges[i],
            hist.bin_edges[i + 1],
            count,
            mark
        );
    }
    Ok(())
}

fn cmd_airquality(args: AirArgs) -> Result<()> {
    let loaded = if args.no_standardize {
        load_air_quality_raw(&args.path)?
    } else {
        load_air_quality(&args.path)?
    };
    println!(
        "loaded {} rows, {} columns ({} cells imputed)",
        loaded.dataset.n(),
        loaded.dataset.d(),
        loaded.imputed_cells
    );
    let model = pca_fit(loaded.dataset.points(), 2)?;
    let shares: Vec<f64> = model.explained_variance_ratio.clone();
    println!("top-2 explained variance ratios: {shares:?}");
    let projected = pca_project(&model, loaded.dataset.points())?;
    let dataset = Dataset::new(projected)?;
    let params = QcParams {
        sigma: args.sigma.to_spec(),
        ..QcParams::default()
    };
    finish_detection(
        &dataset,
        &params,
        0,
        loaded.dropped_columns.clone(),
        args.out.as_ref(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn temp_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn sigma_arg_parses() {
        assert_eq!("auto".parse::<SigmaArg>().unwrap(), SigmaArg::Auto);
        assert_eq!("AUTO".parse::<SigmaArg>().unwrap(), SigmaArg::Auto);
        assert_eq!("1.5".parse::<SigmaArg>().unwrap(), SigmaArg::Fixed(1.5));
        assert!("wide".parse::<SigmaArg>().is_err());
    }

    #[test]
    fn bounds_arg_parses() {
        let b: BoundsArg = "-1,2,-3,4".parse().unwrap();
        assert_eq!(b.0.x, (-1.0, 2.0));
        assert_eq!(b.0.y, (-3.0, 4.0));
        assert!("1,2,3".parse::<BoundsArg>().is_err());
        assert!("a,b,c,d".parse::<BoundsArg>().is_err());
    }

    #[test]
    fn resolution_arg_parses() {
        assert_eq!("40".parse::<ResolutionArg>().unwrap(), ResolutionArg(40, 40));
        assert_eq!("3,9".parse::<ResolutionArg>().unwrap(), ResolutionArg(3, 9));
        assert!("x".parse::<ResolutionArg>().is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["qc", "detect"]), 1, "missing input");
        assert_eq!(run(["qc", "bogus"]), 1, "unknown subcommand");
        assert_eq!(run(["qc", "detect", "x.csv", "--wat"]), 1, "unknown flag");
        assert_eq!(run(["qc", "--help"]), 0);
    }

    #[test]
    fn zero_sigma_is_a_usage_error() {
        let f = temp_csv("0,0\n1,0\n0,1\n");
        let arg = f.path().to_str().unwrap();
        assert_eq!(run(["qc", "detect", arg, "--sigma", "0"]), 1);
    }

    #[test]
    fn missing_input_is_a_data_error() {
        assert_eq!(run(["qc", "detect", "/no/such/input.csv"]), 2);
        assert_eq!(run(["qc", "sigma", "/no/such/input.csv"]), 2);
    }

    #[test]
    fn detect_runs_on_plain_csv() {
        let f = temp_csv("0,0\n0.1,0\n0,0.1\n0.1,0.1\n5,5\n");
        let arg = f.path().to_str().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        assert_eq!(
            run([
                "qc",
                "detect",
                arg,
                "--sigma",
                "0.5",
                "--k",
                "2",
                "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        let report = crate::io::read_report(&out).unwrap();
        assert_eq!(report.n, 5);
        assert!(report.points[4].outlier, "isolated point flagged");
    }

    #[test]
    fn truth_column_is_excluded() {
        let f = temp_csv("x0,x1,truth\n0,0,0\n0.2,0,0\n0,0.2,0\n9,9,1\n");
        let arg = f.path().to_str().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        assert_eq!(
            run([
                "qc", "detect", arg, "--sigma", "1", "--k", "2", "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        let report = crate::io::read_report(&out).unwrap();
        assert_eq!(report.d, 2, "truth column not part of the features");
        assert!(report.points[3].outlier);
    }

    #[test]
    fn gen_then_detect_flags_planted_points() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("a.csv");
        let out = dir.path().join("report.json");
        assert_eq!(
            run([
                "qc",
                "gen",
                "--scenario",
                "A",
                "--seed",
                "1",
                "--out",
                data.to_str().unwrap(),
            ]),
            0
        );
        assert_eq!(
            run([
                "qc",
                "detect",
                data.to_str().unwrap(),
                "--k",
                "5",
                "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        let report = crate::io::read_report(&out).unwrap();
        for p in &report.points[200..] {
            assert!(p.outlier, "planted point {} flagged", p.index);
        }
    }

    #[test]
    fn grid_command_writes_header_and_cells() {
        let f = temp_csv("0,0\n1,1\n");
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("grid.csv");
        assert_eq!(
            run([
                "qc",
                "grid",
                f.path().to_str().unwrap(),
                "--sigma",
                "1",
                "--resolution",
                "4,3",
                "--bounds",
                "0,1,0,1",
                "--out",
                out.to_str().unwrap(),
            ]),
            0
        );
        let text = std::fs::read_to_string(&out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,v");
        assert_eq!(lines.len(), 1 + 12);
    }

    #[test]
    fn gen_rejects_unknown_scenario_as_usage() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        assert_eq!(
            run([
                "qc",
                "gen",
                "--scenario",
                "Z",
                "--out",
                out.to_str().unwrap(),
            ]),
            1
        );
    }
}
