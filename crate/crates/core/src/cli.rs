//! Command-line front end. Every artifact carries the run configuration and
//! the tool version; identical configurations give byte-identical output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::decompose::decompose;
use crate::enumerate::{oracle_enumerate, total_count, DefectTable, EnumError, EnumValue};
use crate::map::{MapDocument, RootedMap};
use crate::rng::RngHandle;
use crate::sample::{DefaultKernels, Mode, Pipeline, SampleError};
use crate::stats::suites::{cached_mc_table, run_suite, Suite, SuiteParams};
use crate::stats::{mean_var, StatReport, Status, StatsError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TEST_FAILURE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sparsemaps", version, about = "Count and sample rooted maps by their core-kernel decomposition")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Number of rooted maps with n edges, f faces and genus g.
    Count(CountArgs),
    /// Uniform random maps, one JSON document per line.
    Sample(SampleArgs),
    /// Decomposition of a map given as a JSON document.
    Decompose(DecomposeArgs),
    /// Run named statistical suites.
    Verify(VerifyArgs),
    /// Summary statistics of stored samples.
    Stats(StatsArgs),
    /// Build a defect table from the oracle, closed forms and Monte Carlo.
    Table(TableArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShapeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub faces: usize,
    #[arg(long, default_value_t = 0)]
    pub genus: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Defect table (JSON); closed forms only when absent.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Kernel draws per defect when approximate mode builds its own table.
    #[arg(long, default_value_t = 200)]
    pub table_budget: usize,
    #[arg(long, value_enum, default_value_t = SampleFormat::Json)]
    pub format: SampleFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DecomposeArgs {
    /// Map document (JSON); `-` reads stdin.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    pub suite: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub table_budget: usize,
    /// CSV file for the reports.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StatsArgs {
    /// Output of `sample` in JSON format.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TableArgs {
    /// Oracle census size (at most 6).
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Closed forms for every s up to this value.
    #[arg(long, default_value_t = 41)]
    pub s_max: usize,
    /// Genus of an additional Monte Carlo unicellular table.
    #[arg(long, requires_all = ["mc_n", "seed"])]
    pub mc_genus: Option<usize>,
    #[arg(long)]
    pub mc_n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub table_budget: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    /// Map and decomposition documents, one JSON object per line.
    Json,
    /// Graphviz, maps separated by blank lines.
    Dot,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Approximate,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approximate => Mode::Approximate,
        }
    }
}

/// Full configuration of a run, embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub threads: Option<usize>,
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0} of the reports failed")]
    TestFailure(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::TestFailure(_) => EXIT_TEST_FAILURE,
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Regime(_) | EnumError::BudgetExceeded { .. } => CliError::Unsupported(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Unsupported(_) | SampleError::BudgetExceeded(_) => CliError::Unsupported(e.to_string()),
            SampleError::Enum(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Sample(e) => e.into(),
            StatsError::Enum(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Parses `args`, runs the command and returns the exit code. Output goes to
/// `out` unless the command names an output file.
pub fn main_with_args<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let config = RunConfig { tool: "sparsemaps", version: VERSION, threads: cli.threads, command: cli.command.clone() };
    let mut job = move || match &cli.command {
        Command::Count(a) => count(a, &config, out),
        Command::Sample(a) => sample(a, &config, out),
        Command::Decompose(a) => decompose_cmd(a, &config, out),
        Command::Verify(a) => verify(a, &config, out),
        Command::Stats(a) => stats(a, &config, out),
        Command::Table(a) => table(a, &config, out),
    };
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(job),
        None => job(),
    }
}

fn load_table(path: Option<&Path>, s: usize) -> Result<DefectTable, CliError> {
    let mut table = DefectTable::closed_forms(s.max(3));
    if let Some(p) = path {
        let loaded = DefectTable::load(p)?;
        table.merge(&loaded)?;
    }
    Ok(table)
}

fn config_json(config: &RunConfig) -> serde_json::Value {
    serde_json::to_value(config).expect("config serializes")
}

/// Writes to the named file, or to `out`.
fn emit(path: Option<&Path>, out: &mut (dyn Write + Send), text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn count(a: &CountArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let ShapeArgs { n, faces: f, genus: g } = a.shape;
    let table = load_table(a.table.as_deref(), f + 2 * g)?;
    let value = total_count(n, f, g, &table)?;
    let text = match a.format {
        Format::Text => format!("{value}\n"),
        Format::Json => {
            let v = match &value {
                EnumValue::Exact(x) => json!({ "exact": x.to_string() }),
                EnumValue::Log { ln, rel_err } => json!({ "ln": ln, "rel_err": rel_err }),
            };
            let provenance: Vec<_> = DefectTable::relevant_defects(n, f, g)
                .into_iter()
                .filter_map(|d| table.get(f, g, d).map(|e| json!({ "d": d, "provenance": e.provenance })))
                .collect();
            let doc = json!({ "config": config_json(config), "count": v, "table_entries": provenance });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    };
    emit(None, out, &text)
}

fn sample(a: &SampleArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let ShapeArgs { n, faces: f, genus: g } = a.shape;
    let s = f + 2 * g;
    let mode: Mode = a.mode.into();
    let mut table = load_table(a.table.as_deref(), s)?;
    if mode == Mode::Approximate && f == 1 && g >= 1 && a.table.is_none() {
        table.merge(&cached_mc_table(g, n, a.seed, a.table_budget)?)?;
    }
    // Small oracle kernels cover the exact modes that are not unicellular.
    let kernels = if f != 1 && s >= 3 {
        DefaultKernels::with_census(oracle_enumerate(4)?)
    } else {
        DefaultKernels::default()
    };
    if f != 1 && s >= 3 {
        table.merge(&DefectTable::from_census(&oracle_enumerate(4)?))?;
    }
    let pipeline = Pipeline::new(n, f, g, mode, &table, &kernels)?;
    let approximate = pipeline.defect_law().is_some_and(|l| l.approximate);
    let lines: Vec<String> = (0..a.count)
        .into_par_iter()
        .map(|i| -> Result<String, CliError> {
            let mut rng = RngHandle::with_replica(a.seed, i as u64);
            let draw = pipeline.draw(&mut rng)?;
            let dec = draw.decomposition().map(|d| d.to_document());
            let defect = draw.defect;
            let core_edges = draw.core_edges;
            let map = draw.into_map(n)?;
            Ok(match a.format {
                SampleFormat::Json => {
                    let doc = json!({
                        "index": i,
                        "map": map.to_document(),
                        "defect": defect,
                        "core_edges": core_edges,
                        "decomposition": dec,
                        "approximate": approximate,
                    });
                    serde_json::to_string(&doc).unwrap()
                }
                SampleFormat::Dot => map.to_dot(),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut text = String::new();
    match a.format {
        SampleFormat::Json => {
            writeln!(text, "{}", json!({ "config": config_json(config) })).unwrap();
            for l in lines {
                writeln!(text, "{l}").unwrap();
            }
        }
        SampleFormat::Dot => {
            writeln!(text, "// {}", json!({ "config": config_json(config) })).unwrap();
            text.push_str(&lines.join("\n"));
        }
    }
    emit(a.output.as_deref(), out, &text)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn decompose_cmd(a: &DecomposeArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let text = read_input(&a.input)?;
    let doc: MapDocument = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad map document: {e}")))?;
    let map = doc.into_map().map_err(|e| CliError::Usage(e.to_string()))?;
    let dec = decompose(&map).map_err(|e| CliError::Usage(e.to_string()))?;
    let doc = json!({
        "config": config_json(config),
        "defect": dec.defect(),
        "core_edges": dec.core_edges(),
        "kernel_edges": dec.kernel_edges(),
        "decomposition": dec.to_document(),
    });
    emit(a.output.as_deref(), out, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))
}

fn verify(a: &VerifyArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        a.suite.split(',').map(|s| s.parse()).collect::<Result<_, StatsError>>()?
    };
    let params = SuiteParams { n: a.n, s: a.s, samples: a.samples, seed: a.seed, table_budget: a.table_budget };
    let mut reports: Vec<StatReport> = Vec::new();
    for suite in suites {
        reports.extend(run_suite(suite, &params)?);
    }
    let mut summary = String::new();
    for r in &reports {
        writeln!(summary, "{r}").unwrap();
    }
    let failed = reports.iter().filter(|r| r.status == Status::Fail).count();
    writeln!(summary, "{} reports, {failed} failed", reports.len()).unwrap();
    out.write_all(summary.as_bytes())?;
    if let Some(p) = &a.output {
        let mut csv = format!("# {}\n{}\n", json!({ "config": config_json(config) }), StatReport::csv_header());
        for r in &reports {
            writeln!(csv, "{}", r.csv_row()).unwrap();
        }
        std::fs::write(p, csv)?;
    }
    if failed > 0 {
        return Err(CliError::TestFailure(failed));
    }
    Ok(())
}

#[derive(Deserialize)]
struct StoredSample {
    map: MapDocument,
}

fn stats(a: &StatsArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let text = read_input(&a.input)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let v: serde_json::Value =
            serde_json::from_str(line).map_err(|e| CliError::Usage(format!("line {}: {e}", i + 1)))?;
        if v.get("map").is_none() {
            continue;
        }
        let s: StoredSample = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("line {}: {e}", i + 1)))?;
        let map: RootedMap = s.map.into_map().map_err(|e| CliError::Usage(e.to_string()))?;
        let sig = map.euler_signature().map_err(|e| CliError::Usage(e.to_string()))?;
        let (defect, core, kernel) = match decompose(&map) {
            Ok(d) => (d.defect(), d.core_edges(), d.kernel_edges()),
            // Trees have an empty core.
            Err(_) => (0, 0, 0),
        };
        rows.push((sig.edges, sig.faces, sig.genus, defect, core, kernel, map.vertex_count()));
    }
    if rows.is_empty() {
        return Err(CliError::Usage("no samples in input".into()));
    }
    let mut csv = format!("# {}\n", json!({ "config": config_json(config) }));
    csv.push_str("quantity,mean,variance,count\n");
    let columns = ["edges", "faces", "genus", "defect", "core_edges", "kernel_edges", "vertices"];
    for (j, name) in columns.iter().enumerate() {
        let xs: Vec<f64> = rows
            .iter()
            .map(|r| [r.0, r.1, r.2, r.3, r.4, r.5, r.6][j] as f64)
            .collect();
        let (m, v) = mean_var(&xs);
        writeln!(csv, "{name},{m},{v},{}", xs.len()).unwrap();
    }
    emit(a.output.as_deref(), out, &csv)
}

fn table(a: &TableArgs, config: &RunConfig, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let mut t = DefectTable::closed_forms(a.s_max);
    t.merge(&DefectTable::from_census(&oracle_enumerate(a.n_max)?))?;
    if let (Some(g), Some(n), Some(seed)) = (a.mc_genus, a.mc_n, a.seed) {
        t.merge(&cached_mc_table(g, n, seed, a.table_budget)?)?;
    }
    std::fs::write(&a.output, t.to_json())?;
    writeln!(out, "{} entries written to {}", t.len(), a.output.display())?;
    let _ = config;
    Ok(())
}
