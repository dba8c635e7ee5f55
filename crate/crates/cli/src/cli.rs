//! The `scaffold` command line.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use thiserror::Error;

use scaffold_core::dataset::{ingest, Dataset, Format};
use scaffold_core::diagnostic::{has_errors, Diagnostic};
use scaffold_core::gateway::{generate_validated, open_backend, BackendConfig, GatewayError, GenerationConfig};
use scaffold_core::scaffold::{category_bins, equal_width_bins, validate_set, ScaffoldKind, ScaffoldSet};
use scaffold_core::structure::{build_structure, render_outline};

use crate::service::{self, ServiceConfig, DEFAULT_PORT};

pub const FIXTURES_DIR_VAR: &str = "SCAFFOLD_FIXTURES_DIR";

/// Mock fixtures shipped with the source tree.
pub fn default_fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/mock")
}

#[derive(Parser, Debug)]
#[command(name = "scaffold", version, about = "Generate, validate and render semantic scaffolds for tabular data")]
struct Cli {
    /// Directory holding mock model fixtures ({id}.json).
    #[arg(long, global = true, env = FIXTURES_DIR_VAR)]
    fixtures_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GenerationArgs {
    /// Replay a mock fixture instead of calling the model endpoint.
    #[arg(long, value_name = "FIXTURE")]
    mock: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, value_name = "N")]
    max_repair_attempts: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a CSV or JSON file and print its id and field summary.
    Ingest { file: PathBuf },
    /// Group one field's values into bins.
    Bins {
        file: PathBuf,
        #[arg(long)]
        field: String,
        /// Conventional bins instead of asking the model: K equal-width bins
        /// for numbers and dates, one bin per category otherwise.
        #[arg(long, value_name = "K")]
        k: Option<usize>,
        #[command(flatten)]
        generation: GenerationArgs,
    },
    /// Ask for data highlights.
    Highlights {
        file: PathBuf,
        #[command(flatten)]
        generation: GenerationArgs,
    },
    /// Check a scaffold set against a dataset.
    Validate {
        scaffolds: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Print the navigable outline of a dataset.
    Render {
        file: PathBuf,
        /// Scaffold set files; may be repeated.
        #[arg(long)]
        scaffolds: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Print the structure JSON instead of the outline.
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Keep a JSON snapshot per dataset here and reload it on start.
        #[arg(long)]
        state_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Backend(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Backend(_) => 3,
        }
    }
}

impl From<GatewayError> for Failure {
    fn from(e: GatewayError) -> Self {
        match e {
            GatewayError::UnknownField(_) | GatewayError::Fixture(_) => Failure::Usage(e.to_string()),
            GatewayError::Response(_) => Failure::Invalid(e.to_string()),
            GatewayError::Transport(_) | GatewayError::Auth(_) => Failure::Backend(e.to_string()),
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diagnostics(&mut self, diagnostics: &[Diagnostic]) {
        for d in diagnostics {
            let _ = writeln!(self.err, "{d}");
        }
    }
}

fn load_dataset(path: &Path) -> Result<Dataset, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    ingest(&bytes, Format::from_path(path)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> Result<ScaffoldSet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("values serialize")
}

fn generation_config(args: &GenerationArgs) -> GenerationConfig {
    let mut cfg = match &args.mock {
        Some(id) => GenerationConfig::mock(id.clone()),
        None => GenerationConfig::default(),
    };
    if let Some(model) = &args.model {
        cfg.model = model.clone();
    }
    if let Some(n) = args.max_repair_attempts {
        cfg.max_repair_attempts = n;
    }
    cfg
}

fn generate(
    io: &mut Io,
    d: &Dataset,
    task: ScaffoldKind,
    args: &GenerationArgs,
    fixtures_dir: &Path,
) -> Result<(), Failure> {
    let cfg = generation_config(args);
    if let BackendConfig::Remote { base_url } = &cfg.backend {
        tracing::info!(%base_url, model = %cfg.model, "calling model endpoint");
    }
    let backend = open_backend(&cfg, fixtures_dir)?;
    let generation = generate_validated(backend.as_ref(), d, &task, &cfg)?;
    io.diagnostics(&generation.diagnostics);
    if has_errors(&generation.diagnostics) {
        return Err(Failure::Invalid(format!(
            "no valid scaffold set after {} attempt(s)",
            generation.attempts_used
        )));
    }
    let _ = writeln!(io.out, "{}", pretty(&generation.set));
    Ok(())
}

fn execute(cli: Cli, io: &mut Io) -> Result<(), Failure> {
    let fixtures_dir = cli.fixtures_dir.unwrap_or_else(default_fixtures_dir);
    match cli.command {
        Command::Ingest { file } => {
            let d = load_dataset(&file)?;
            let _ = writeln!(io.out, "{}", pretty(&d.summary_json()));
            Ok(())
        }
        Command::Bins { file, field, k, generation } => {
            let d = load_dataset(&file)?;
            let Some(spec) = d.field(&field) else {
                return Err(Failure::Usage(format!("unknown field {field:?}")));
            };
            match k {
                Some(k) => {
                    let set = if spec.measure.is_continuous() {
                        equal_width_bins(&d, &field, k)
                    } else {
                        category_bins(&d, &field)
                    }
                    .map_err(|e| Failure::Usage(e.to_string()))?;
                    let _ = writeln!(io.out, "{}", pretty(&set));
                    Ok(())
                }
                None => generate(io, &d, ScaffoldKind::Bins { field }, &generation, &fixtures_dir),
            }
        }
        Command::Highlights { file, generation } => {
            let d = load_dataset(&file)?;
            generate(io, &d, ScaffoldKind::Highlights, &generation, &fixtures_dir)
        }
        Command::Validate { scaffolds, data } => {
            let d = load_dataset(&data)?;
            let set = load_set(&scaffolds)?;
            let diagnostics = validate_set(&set, &d);
            io.diagnostics(&diagnostics);
            let _ = writeln!(io.out, "{}", pretty(&diagnostics));
            if has_errors(&diagnostics) {
                return Err(Failure::Invalid(format!("{} has errors", scaffolds.display())));
            }
            Ok(())
        }
        Command::Render { file, scaffolds, depth, json } => {
            let d = load_dataset(&file)?;
            let mut bins = IndexMap::new();
            let mut highlights = None;
            for path in &scaffolds {
                let set = load_set(path)?;
                match &set.kind {
                    ScaffoldKind::Bins { field } => {
                        if bins.insert(field.clone(), set.clone()).is_some() {
                            return Err(Failure::Usage(format!("two bin sets for {field:?}")));
                        }
                    }
                    ScaffoldKind::Highlights if highlights.is_some() => {
                        return Err(Failure::Usage("more than one highlight set".into()))
                    }
                    ScaffoldKind::Highlights => highlights = Some(set),
                }
            }
            let root = build_structure(&d, &bins, highlights.as_ref()).map_err(|e| Failure::Invalid(e.to_string()))?;
            let text = if json { root.to_json() + "\n" } else { render_outline(&root, depth) };
            let _ = io.out.write_all(text.as_bytes());
            Ok(())
        }
        Command::Serve { port, host, state_dir } => {
            let config = ServiceConfig { state_dir, ..ServiceConfig::new(fixtures_dir) };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
            runtime
                .block_on(service::serve(config, SocketAddr::new(host, port)))
                .map_err(|e| Failure::Usage(format!("serve: {e}")))
        }
    }
}

/// Runs the command line and returns the process exit code: 0 success,
/// 1 validation errors, 2 usage or I/O problems, 3 model backend failure.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut io = Io { out, err };
    match execute(cli, &mut io) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(io.err, "error: {f}");
            f.exit_code()
        }
    }
}
