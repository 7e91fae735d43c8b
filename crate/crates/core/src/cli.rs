//! The `rankcurve` command line: fit, rank, check, compare, plotdata.
//!
//! Exit codes: 0 success; 1 a `check` audit found a failing criterion;
//! 2 bad input (unreadable files, malformed data, unknown method, curve and
//! data that do not match); 3 the fit or a ranking method failed.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::baselines::{compare, BaselineMethod, BaselineSpec};
use crate::bezier::{CurveFile, RankingCurve};
use crate::data::{load_table, IndicatorTable, Schema};
use crate::evaluation::{audit_with_trials, BaselinePipeline, RankingPipeline, RpcPipeline, DEFAULT_TRIALS};
use crate::fitting::{rank, FitConfig, FitError, FitOutput, FittedModel};
use crate::plot::PlotBundle;
use crate::ranking::RankingResult;
use crate::reference::elmap_reference;

#[derive(Debug, Parser)]
#[command(name = "rankcurve", version, about = "Unsupervised ranking with a monotone cubic Bézier curve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a ranking curve and write curve, fit report and ranking as JSON.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Score a table with a previously fitted curve.
    Rank {
        #[arg(long)]
        data: PathBuf,
        /// Output of `fit`, or a bare curve file.
        #[arg(long)]
        curve: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Audit a ranking method against the meta-criteria.
    Check {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Rpc)]
        method: Method,
        /// Comma-separated weights for the arithmetic means.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Where the data comes from. Defaults to the data path.
        #[arg(long)]
        provenance: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Rank with several methods side by side, with rank correlations.
    Compare {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Comma-separated; `elmap-reference` joins the bundled published scores.
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<CompareMethod>,
        /// CSV output also writes `<stem>_spearman.csv` and `<stem>_kendall.csv`
        /// next to it. Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write histogram and pair-panel CSVs for plotting.
    Plotdata {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Rpc,
    /// Arithmetic mean of raw, orientation-signed values.
    Arithmetic,
    ArithmeticNormalized,
    /// Geometric mean of raw ratio-scale values.
    Geometric,
    GeometricNormalized,
    Pca,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareMethod {
    Rpc,
    Arithmetic,
    ArithmeticNormalized,
    Geometric,
    GeometricNormalized,
    Pca,
    Entropy,
    ElmapReference,
}

impl Method {
    fn pipeline(self, weights: Option<Vec<f64>>, provenance: String) -> Box<dyn RankingPipeline> {
        let spec = match self {
            Method::Rpc => return Box::new(RpcPipeline::default().with_provenance(provenance)),
            Method::Arithmetic => BaselineSpec::new(BaselineMethod::ArithmeticMean).raw(),
            Method::ArithmeticNormalized => BaselineSpec::new(BaselineMethod::ArithmeticMean),
            Method::Geometric => BaselineSpec::new(BaselineMethod::GeometricMean).raw(),
            Method::GeometricNormalized => BaselineSpec::new(BaselineMethod::GeometricMean),
            Method::Pca => BaselineSpec::new(BaselineMethod::PcaFirstComponent),
            Method::Entropy => BaselineSpec::new(BaselineMethod::EntropyWeight),
        };
        let spec = match weights {
            Some(w) => spec.with_weights(w),
            None => spec,
        };
        Box::new(BaselinePipeline::new(spec).with_provenance(provenance))
    }
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn invalid(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: 2,
        message: message.to_string(),
    }
}

fn failed(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: 3,
        message: message.to_string(),
    }
}

fn fit_error(e: FitError) -> CliError {
    match e {
        FitError::InvalidConfig(_) | FitError::TransformMismatch(_) | FitError::Data(_) => invalid(e),
        _ => failed(e),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code. Diagnostics go to standard error.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Fit {
            data,
            schema,
            out,
            max_iters,
            rel_tol,
            workers,
        } => cmd_fit(&data, &schema, &out, FitConfig {
            max_iters,
            rel_tol,
            workers,
            ..FitConfig::default()
        }),
        Command::Rank {
            data,
            curve,
            out,
            format,
        } => cmd_rank(&data, &curve, out.as_deref(), format),
        Command::Check {
            data,
            schema,
            method,
            weights,
            provenance,
            trials,
            format,
        } => cmd_check(&data, &schema, method, weights, provenance, trials, format),
        Command::Compare {
            data,
            schema,
            methods,
            out,
            format,
        } => cmd_compare(&data, &schema, &methods, out.as_deref(), format),
        Command::Plotdata { data, curve, out } => cmd_plotdata(&data, &curve, &out),
    }
}

fn load(data: &Path, schema: &Path) -> Result<IndicatorTable, CliError> {
    let schema = Schema::load(schema).map_err(invalid)?;
    load_table(data, &schema).map_err(invalid)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `out`, or standard output when `None`.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, bytes),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| invalid(format!("cannot write to standard output: {e}"))),
    }
}

pub fn cmd_fit(data: &Path, schema: &Path, out: &Path, config: FitConfig) -> Result<i32, CliError> {
    config.validate().map_err(invalid)?;
    let table = load(data, schema)?;
    let model = FittedModel::fit(&table, &config).map_err(fit_error)?;
    let json = serde_json::to_string_pretty(&model.output()).expect("fit output serializes");
    write_file(out, json.as_bytes())?;
    let report = &model.report;
    eprintln!(
        "fitted {} items x {} indicators in {} iterations ({}), squared distance {:.6e}, top: {}",
        table.n_items(),
        table.n_indicators(),
        report.iterations,
        if report.converged { "converged" } else { "iteration limit" },
        report.final_distance(),
        model.ranking.top(3).join(", ")
    );
    if !report.all_strictly_monotone() {
        eprintln!("warning: fitted curve is not strictly monotone in every dimension: {:?}", report.monotonicity);
    }
    Ok(0)
}

/// Reads either the JSON written by `fit` or a bare curve file.
pub fn read_curve(path: &Path) -> Result<RankingCurve, CliError> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let file = match serde_json::from_str::<FitOutput>(&text) {
        Ok(out) => out.curve,
        Err(_) => serde_json::from_str::<CurveFile>(&text)
            .map_err(|e| invalid(format!("{} is not a curve file: {e}", path.display())))?,
    };
    let curve = file.into_curve().map_err(invalid)?;
    if curve.transform().is_none() {
        return Err(invalid(format!(
            "{} has no indicator ranges; cannot normalize raw data for it",
            path.display()
        )));
    }
    Ok(curve)
}

fn curve_schema(curve: &RankingCurve) -> Schema {
    curve.transform().expect("checked by read_curve").schema()
}

fn load_for_curve(data: &Path, curve: &RankingCurve) -> Result<IndicatorTable, CliError> {
    load_table(data, &curve_schema(curve)).map_err(|e| invalid(format!("data does not match the curve: {e}")))
}

fn ranking_bytes(r: &RankingResult, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            r.write_csv(&mut buf).expect("in-memory write");
            buf
        }
        Format::Json => {
            let sorted = RankingResult {
                method: r.method.clone(),
                entries: r.sorted().into_iter().cloned().collect(),
            };
            let mut s = serde_json::to_string_pretty(&sorted).expect("ranking serializes");
            s.push('\n');
            s.into_bytes()
        }
    }
}

pub fn cmd_rank(data: &Path, curve: &Path, out: Option<&Path>, format: Format) -> Result<i32, CliError> {
    let curve = read_curve(curve)?;
    let table = load_for_curve(data, &curve)?;
    let ranking = rank(&table, &curve).map_err(fit_error)?;
    emit(out, &ranking_bytes(&ranking, format))?;
    Ok(0)
}

pub fn cmd_check(
    data: &Path,
    schema: &Path,
    method: Method,
    weights: Option<Vec<f64>>,
    provenance: Option<String>,
    trials: usize,
    format: ReportFormat,
) -> Result<i32, CliError> {
    if weights.is_some() && !matches!(method, Method::Arithmetic | Method::ArithmeticNormalized) {
        return Err(invalid("--weights applies to the arithmetic means only"));
    }
    if trials < 1 {
        return Err(invalid("--trials must be at least 1"));
    }
    let table = load(data, schema)?;
    let provenance = provenance.unwrap_or_else(|| data.display().to_string());
    let pipeline = method.pipeline(weights, provenance);
    let report = audit_with_trials(pipeline.as_ref(), &table, trials);
    match format {
        ReportFormat::Text => println!("{report}"),
        ReportFormat::Json => println!("{}", report.to_json()),
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

pub fn cmd_compare(
    data: &Path,
    schema: &Path,
    methods: &[CompareMethod],
    out: Option<&Path>,
    format: Format,
) -> Result<i32, CliError> {
    let table = load(data, schema)?;
    let mut results = Vec::new();
    let mut with_reference = false;
    for m in methods {
        let method = match m {
            CompareMethod::ElmapReference => {
                with_reference = true;
                continue;
            }
            CompareMethod::Rpc => Method::Rpc,
            CompareMethod::Arithmetic => Method::Arithmetic,
            CompareMethod::ArithmeticNormalized => Method::ArithmeticNormalized,
            CompareMethod::Geometric => Method::Geometric,
            CompareMethod::GeometricNormalized => Method::GeometricNormalized,
            CompareMethod::Pca => Method::Pca,
            CompareMethod::Entropy => Method::Entropy,
        };
        let run = method
            .pipeline(None, String::new())
            .run(&table)
            .map_err(|e| failed(format!("{}: {e}", method.to_possible_value().unwrap().get_name())))?;
        results.push(run.ranking);
    }
    if results.is_empty() {
        return Err(invalid("at least one computed method is required besides elmap-reference"));
    }
    let reference = with_reference.then(elmap_reference);
    let cmp = compare(&results, reference.as_ref()).map_err(invalid)?;
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
            s.push('\n');
            emit(out, s.as_bytes())?;
        }
        Format::Csv => {
            let mut table_csv = Vec::new();
            cmp.write_csv(&mut table_csv).expect("in-memory write");
            let mut rho = Vec::new();
            cmp.write_correlations_csv(&mut rho, &cmp.spearman).expect("in-memory write");
            let mut tau = Vec::new();
            cmp.write_correlations_csv(&mut tau, &cmp.kendall).expect("in-memory write");
            match out {
                Some(p) => {
                    write_file(p, &table_csv)?;
                    write_file(&sibling(p, "spearman"), &rho)?;
                    write_file(&sibling(p, "kendall"), &tau)?;
                }
                None => {
                    let mut all = table_csv;
                    all.extend_from_slice(b"\nspearman\n");
                    all.extend(rho);
                    all.extend_from_slice(b"\nkendall\n");
                    all.extend(tau);
                    emit(None, &all)?;
                }
            }
        }
    }
    Ok(0)
}

pub fn cmd_plotdata(data: &Path, curve: &Path, out: &Path) -> Result<i32, CliError> {
    let curve = read_curve(curve)?;
    let table = load_for_curve(data, &curve)?;
    let rows = curve
        .transform()
        .expect("checked by read_curve")
        .apply(&table)
        .map_err(invalid)?;
    let bundle = PlotBundle::build(table.ids(), table.indicator_names(), &rows, &curve);
    let files = bundle
        .write_dir(out)
        .map_err(|e| invalid(format!("cannot write plot data to {}: {e}", out.display())))?;
    eprintln!("wrote {} files to {}", files.len(), out.display());
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_method_is_a_usage_error() {
        let code = run_from(["rankcurve", "check", "--data", "a", "--schema", "b", "--method", "topsis"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("/x/cmp.csv"), "spearman"), PathBuf::from("/x/cmp_spearman.csv"));
    }
}
