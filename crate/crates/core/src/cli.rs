//! Command-line driver.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chrono::{default_form, fit_summary_series, run_approach, Approach, EvaluationRow, ModelForm, ModelSpec};
use crate::error::{Error, Result};
use crate::ingest::{grouping_report, load_dataset, parse_partition_specs, prepare_partition, PartitionSpec, Schema};
use crate::report::{compare, parse_results, write_failures, write_results, ComparisonReport, PairBy};

#[derive(Debug, Parser)]
#[command(name = "timeaware", version, about = "Chronology-respecting effort estimation models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build models per partition and approach and write result files.
    Run(RunArgs),
    /// Paired Wilcoxon comparison of two result files.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// cocomo81 or fp_language
    #[arg(long)]
    pub schema: String,
    /// Partition spec file; without it the whole dataset is one partition named `all`.
    #[arg(long)]
    pub partitions: Option<PathBuf>,
    /// Comma-separated subset of tasa,tamw,loo,mean,median.
    #[arg(long, default_value = "tasa,tamw,loo,mean,median")]
    pub approach: String,
    #[arg(long, default_value_t = crate::statkit::DEFAULT_ALPHA_REMOVE)]
    pub alpha_remove: f64,
    /// `auto` (4/n) or a positive real.
    #[arg(long, default_value = "auto")]
    pub cooks_threshold: String,
    /// Override the model form (cocomo, fp_dummy, fp_size_only).
    #[arg(long)]
    pub form: Option<String>,
    /// Start the moving window one data year after the first, so no window
    /// repeats the accumulated model.
    #[arg(long)]
    pub tamw_drop_oldest: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    /// `window` pairs on (partition, test_year, window_start_year); `year`
    /// pairs every row sharing (partition, test_year).
    #[arg(long, default_value = "window")]
    pub pair_by: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub schema: Schema,
    pub partitions: Option<PathBuf>,
    pub approaches: Vec<Approach>,
    pub form: Option<ModelForm>,
    pub alpha_remove: f64,
    pub cooks_threshold: Option<f64>,
    pub tamw_first_window: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let approaches = parse_approaches(&args.approach)?;
        let cooks_threshold = match args.cooks_threshold.trim() {
            "auto" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("--cooks-threshold must be `auto` or a real, got `{v}`")))?,
            ),
        };
        Ok(RunConfig {
            dataset: args.dataset.clone(),
            schema: args.schema.parse()?,
            partitions: args.partitions.clone(),
            approaches,
            form: args.form.as_deref().map(str::parse).transpose()?,
            alpha_remove: args.alpha_remove,
            cooks_threshold,
            tamw_first_window: usize::from(args.tamw_drop_oldest),
            out: args.out.clone(),
        })
    }
}

pub fn parse_approaches(list: &str) -> Result<Vec<Approach>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let a: Approach = item.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no approach given".into()));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
}

/// Filename-safe form of a partition name.
fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

/// Everything a run produces, keyed by file name, before anything is written.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub rows: Vec<EvaluationRow>,
}

/// Loads, partitions and evaluates; returns the output files in memory.
pub fn execute_run(config: &RunConfig) -> Result<RunOutput> {
    let text = read(&config.dataset)?;
    let data = load_dataset(&text, config.schema)?.with_name(file_stem(&config.dataset));
    let specs = match &config.partitions {
        Some(p) => {
            let specs = parse_partition_specs(&read(p)?)?;
            if specs.is_empty() {
                return Err(Error::Config(format!("{} defines no partitions", p.display())));
            }
            specs
        }
        None => vec![PartitionSpec::full("all")],
    };

    let mut out = RunOutput::default();
    let mut failures = Vec::new();
    for pspec in &specs {
        let (part, exclusions) = prepare_partition(&data, pspec)?;
        let form = config.form.unwrap_or_else(|| default_form(&part));
        let mut spec = ModelSpec::new(form);
        spec.alpha_remove = config.alpha_remove;
        spec.cooks_threshold = config.cooks_threshold;
        let name = slug(&pspec.name);
        log::info!("partition {}: {} records, form {}", pspec.name, part.len(), form.as_str());
        out.files.push((format!("{name}_exclusions.csv"), exclusions.to_csv()));
        out.files.push((format!("{name}_summary.csv"), grouping_report(&data, &part, &pspec.name)));
        for &approach in &config.approaches {
            let rows = run_approach(&part, &pspec.name, approach, &spec, config.tamw_first_window)?;
            let (failed, ok): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r.is_failed());
            for r in &failed {
                log::warn!("{} {} test {}: {}", pspec.name, approach, r.test_year, r.failure.as_deref().unwrap_or(""));
            }
            failures.extend(failed);
            out.files.push((format!("{name}_{approach}.csv"), write_results(&ok)?));
            if approach.fits_model() {
                out.files.push((format!("{name}_{approach}_coefficients.csv"), fit_summary_series(&ok)?.to_csv()));
            }
            out.rows.extend(ok);
        }
    }
    out.files.push(("failures.csv".into(), write_failures(&failures)?));
    Ok(out)
}

/// Runs and writes all output files; nothing is written if any step fails.
pub fn run_command(config: &RunConfig) -> Result<RunOutput> {
    let output = execute_run(config)?;
    fs::create_dir_all(&config.out)?;
    for (name, contents) in &output.files {
        fs::write(config.out.join(name), contents)?;
    }
    Ok(output)
}

pub fn compare_command(a: &Path, b: &Path, pair_by: PairBy) -> Result<ComparisonReport> {
    let rows_a = parse_results(&read(a)?)?;
    let rows_b = parse_results(&read(b)?)?;
    compare(&rows_a, &rows_b, pair_by)
}

/// Parses `args` and runs the chosen command; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => RunConfig::from_args(args).and_then(|c| run_command(&c)).map(|o| {
            println!("wrote {} files to {}", o.files.len(), args.out.display());
        }),
        Command::Compare(args) => args
            .pair_by
            .parse()
            .and_then(|p| compare_command(&args.a, &args.b, p))
            .map(|rep| print!("{}", rep.render())),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
