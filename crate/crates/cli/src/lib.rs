//! Batch front end: synthetic cohorts, analytics exports and the HTTP service.
//!
//! Analytics commands read `patients.csv` and `ratings.csv` from `--data DIR`
//! and print the same JSON body the HTTP endpoint returns for the same
//! parameters.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use symcohort_core::ingest::{PATIENTS_FILE, RATINGS_FILE};
use symcohort_server::query::{
    ClustersQuery, CorrelationsQuery, FilamentsQuery, HeatmapQuery, Params, PatientQuery, Query, RulesQuery,
};
use symcohort_server::{ApiError, Cohort, ServerConfig};
use symcohort_synth::{generate, SynthConfig, SynthError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "symcohort", version, about = "Longitudinal symptom cohort analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic cohort.
    Synth(SynthArgs),
    /// Mine association rules for one phase.
    Rules(RulesArgs),
    /// Ward clustering and PCA projection at one timepoint.
    Cluster(ClusterArgs),
    /// Filament polylines for one symptom.
    Filaments(FilamentArgs),
    /// Rating-bin heatmap over all symptoms and timepoints.
    Heatmap(HeatmapArgs),
    /// Spearman correlations at one timepoint.
    Correlations(CorrelationArgs),
    /// One patient's record and series.
    Patient(PatientArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 699)]
    pub patients: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    pub high_fraction: f64,
    #[arg(long, default_value_t = 4.5)]
    pub gap: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Directory holding patients.csv and ratings.csv.
    #[arg(long)]
    pub data: PathBuf,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value = "acute")]
    pub phase: String,
    #[arg(long)]
    pub min_support: Option<String>,
    #[arg(long)]
    pub min_lift: Option<String>,
    #[arg(long)]
    pub top_k: Option<String>,
    #[arg(long)]
    pub max_size: Option<String>,
    #[arg(long)]
    pub presence_threshold: Option<String>,
    #[arg(long)]
    pub merge_baseline: bool,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub timepoint: String,
    /// Comma-separated symptom ids; all when omitted.
    #[arg(long)]
    pub symptoms: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
}

#[derive(Debug, Args)]
pub struct FilamentArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub symptom: String,
    #[arg(long, default_value = "individual")]
    pub mode: String,
    /// Comma-separated patient ids; all when omitted.
    #[arg(long)]
    pub patients: Option<String>,
    #[arg(long)]
    pub highlight: Option<String>,
    #[arg(long)]
    pub phase_highlight: Option<String>,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub patient_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorrelationArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub timepoint: String,
    #[arg(long)]
    pub symptom: Option<String>,
}

#[derive(Debug, Args)]
pub struct PatientArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub id: String,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SYMCOHORT_LISTEN", default_value = symcohort_server::config::DEFAULT_LISTEN)]
    pub listen: SocketAddr,
    #[arg(long, env = "SYMCOHORT_DATA")]
    pub data: PathBuf,
    #[arg(long, env = "SYMCOHORT_CACHE_SIZE", default_value_t = symcohort_server::config::DEFAULT_CACHE_ENTRIES)]
    pub cache_size: usize,
    /// Allowed CORS origin; repeatable.
    #[arg(long = "cors-origin", env = "SYMCOHORT_CORS_ORIGINS", value_delimiter = ',')]
    pub cors_origins: Vec<String>,
    #[arg(long, env = "SYMCOHORT_MAX_UPLOAD_BYTES", default_value_t = symcohort_server::config::DEFAULT_MAX_UPLOAD_BYTES)]
    pub max_upload_bytes: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Api(#[from] ApiError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Api(ApiError::Io(_)) | CliError::Io { .. } | CliError::Synth(SynthError::Io(_)) => EXIT_IO,
            CliError::Api(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Api(_) => EXIT_INTERNAL,
            CliError::Synth(_) => EXIT_VALIDATION,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn load_cohort(dir: &Path) -> Result<Cohort, CliError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })
    };
    Ok(Cohort::from_csv(&read(PATIENTS_FILE)?, &read(RATINGS_FILE)?)?)
}

fn params<const N: usize>(pairs: [(&str, Option<&str>); N]) -> Params {
    pairs
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v.to_string())))
        .collect()
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, body).map_err(io_err(path)),
        None => {
            let path = Path::new("<stdout>");
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(io_err(path))?;
            stdout.flush().map_err(io_err(path))
        }
    }
}

/// Builds the analytics query for a command, or `None` for synth and serve.
pub fn query_for(command: &Command) -> Result<Option<Query>, CliError> {
    let q = match command {
        Command::Rules(a) => Query::Rules(RulesQuery::parse(&params([
            ("phase", Some(a.phase.as_str())),
            ("min_support", a.min_support.as_deref()),
            ("min_lift", a.min_lift.as_deref()),
            ("top_k", a.top_k.as_deref()),
            ("max_size", a.max_size.as_deref()),
            ("presence_threshold", a.presence_threshold.as_deref()),
            ("merge_baseline", a.merge_baseline.then_some("true")),
            ("seed", a.seed.as_deref()),
        ]))?),
        Command::Cluster(a) => Query::Clusters(ClustersQuery::parse(&params([
            ("timepoint", Some(a.timepoint.as_str())),
            ("symptoms", a.symptoms.as_deref()),
            ("k", a.k.as_deref()),
        ]))?),
        Command::Filaments(a) => Query::Filaments(FilamentsQuery::parse(&params([
            ("symptom", Some(a.symptom.as_str())),
            ("mode", Some(a.mode.as_str())),
            ("patients", a.patients.as_deref()),
            ("highlight", a.highlight.as_deref()),
            ("phase_highlight", a.phase_highlight.as_deref()),
        ]))?),
        Command::Heatmap(a) => Query::Heatmap(HeatmapQuery::parse(&params([("patient_id", a.patient_id.as_deref())]))?),
        Command::Correlations(a) => Query::Correlations(CorrelationsQuery::parse(&params([
            ("timepoint", Some(a.timepoint.as_str())),
            ("symptom", a.symptom.as_deref()),
        ]))?),
        Command::Patient(a) => Query::Patient(PatientQuery { patient_id: a.id.clone() }),
        Command::Synth(_) | Command::Serve(_) => return Ok(None),
    };
    Ok(Some(q))
}

fn input(command: &Command) -> Option<&Input> {
    match command {
        Command::Rules(a) => Some(&a.input),
        Command::Cluster(a) => Some(&a.input),
        Command::Filaments(a) => Some(&a.input),
        Command::Heatmap(a) => Some(&a.input),
        Command::Correlations(a) => Some(&a.input),
        Command::Patient(a) => Some(&a.input),
        Command::Synth(_) | Command::Serve(_) => None,
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(a) => {
            let cohort = generate(&SynthConfig {
                patients: a.patients,
                seed: a.seed,
                high_fraction: a.high_fraction,
                burden_gap: a.gap,
                noise_sd: a.noise,
                ..SynthConfig::default()
            })?;
            cohort.write_to(&a.out)?;
            Ok(())
        }
        Command::Serve(a) => {
            let config = ServerConfig {
                listen: a.listen,
                data_dir: a.data.clone(),
                cache_entries: a.cache_size,
                cors_origins: a.cors_origins.clone(),
                max_upload_bytes: a.max_upload_bytes,
            };
            let _ = tracing_subscriber::fmt().with_writer(io::stderr).try_init();
            let runtime = tokio::runtime::Runtime::new().map_err(io_err(Path::new("<runtime>")))?;
            runtime.block_on(symcohort_server::serve(config)).map_err(io_err(&a.data))
        }
        command => {
            let query = query_for(command)?.expect("analytics command");
            let input = input(command).expect("analytics command");
            let cohort = load_cohort(&input.data)?;
            let body = match (command, &query) {
                (Command::Rules(a), Query::Rules(q)) if a.format == Format::Csv => q.run_csv(&cohort)?,
                _ => query.run(&cohort)?,
            };
            emit(input.out.as_deref(), &body)
        }
    }
}
