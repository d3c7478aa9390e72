use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use decoherence_lab::commands::{self, CommandError};
use decoherence_lab::config::{evolve_spec, optimize_spec, scenario, sweep_spec, ConfigDocument};
use decoherence_lab::output::{emit, emit_plot_script, read_config, Format, Table};
use decoherence_lab::presets::preset_document;

/// Relative `--out` paths are resolved against this directory when set.
const OUT_DIR_ENV: &str = "DECOHERENCE_LAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "decoherence-lab", version, about = "Circuit-induced decoherence of a capacitively coupled qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Configuration file (plain config, or a CSV/JSON file emitted by this tool).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Also write a matplotlib script next to the output file.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rate budget of the configured circuit.
    Rates,
    /// Photon numbers at ω = ω_q for every reservoir mode.
    Photons,
    /// Density-matrix elements over a detuning × time grid.
    Evolve,
    /// Parameter sweep from a figure preset or a spec file.
    Sweep {
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Search capacitor values that maximize a coherence time.
    Optimize {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Parse the configuration and print the effective values.
    Validate,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::Config(c) => Failure::Usage(c.to_string()),
            CommandError::Numerical(m) => Failure::Numerical(m),
        }
    }
}

impl From<decoherence_lab::ConfigError> for Failure {
    fn from(e: decoherence_lab::ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_document(path: &Path) -> Result<ConfigDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    read_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn out_path(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if out.is_relative() => Path::new(&dir).join(out),
        _ => out.to_path_buf(),
    }
}

/// Layers preset, `--config` and `--spec` documents, then applies flags.
fn effective_document(cli: &Cli) -> Result<ConfigDocument, Failure> {
    let mut user = ConfigDocument::new();
    if let Some(path) = &cli.common.config {
        user.merge(&read_document(path)?);
    }
    let (preset_flag, spec) = match &cli.command {
        Command::Sweep { preset, spec } => (preset.clone(), spec.clone()),
        Command::Optimize { spec } => (None, Some(spec.clone())),
        _ => (None, None),
    };
    if let Some(path) = &spec {
        user.merge(&read_document(path)?);
    }
    let mut doc = ConfigDocument::new();
    if let Command::Sweep { .. } = cli.command {
        let named = preset_flag.clone().or_else(|| {
            user.get("sweep", "preset").filter(|p| *p != "none").map(str::to_string)
        });
        if let Some(id) = named {
            doc = preset_document(&id).map_err(|e| Failure::Usage(e.to_string()))?;
        }
    }
    doc.merge(&user);
    if let Some(id) = &preset_flag {
        doc.set("sweep", "preset", id)?;
    }
    match cli.command {
        Command::Evolve => doc.include_section("evolve"),
        Command::Sweep { .. } => doc.include_section("sweep"),
        Command::Optimize { .. } => doc.include_section("optimize"),
        _ => {}
    }
    if let Some(f) = cli.common.format {
        doc.set("output", "format", match f {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        })?;
    }
    if cli.common.plot {
        doc.set("output", "plot_script", "on")?;
    }
    Ok(doc)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn validate(doc: &ConfigDocument) -> Result<(), Failure> {
    scenario(doc)?;
    if doc.has_section("evolve") {
        evolve_spec(doc)?;
    }
    if doc.has_section("sweep") {
        sweep_spec(doc)?;
    }
    if doc.has_section("optimize") {
        optimize_spec(doc)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let doc = effective_document(cli)?;
    let out = cli.common.out.as_deref().map(out_path);
    let plot = doc.get("output", "plot_script") == Some("on");
    if plot && out.is_none() {
        return Err(Failure::Usage("--plot needs --out".into()));
    }
    let table: Table = match cli.command {
        Command::Validate => {
            validate(&doc)?;
            return write_output(out.as_deref(), &doc.render());
        }
        Command::Rates => commands::rates_table(&doc)?,
        Command::Photons => commands::photons_table(&doc)?,
        Command::Evolve => commands::evolve_table(&doc)?,
        Command::Sweep { .. } => commands::sweep_table(&doc)?,
        Command::Optimize { .. } => commands::optimize_table(&doc)?,
    };
    let format = doc.get("output", "format").and_then(Format::from_name).unwrap_or(Format::Csv);
    let precision = doc.integer("output", "precision").unwrap_or(0);
    write_output(out.as_deref(), &emit(&table, &doc, format, precision))?;
    if let (true, Some(path)) = (plot, &out) {
        let data_file = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let script = emit_plot_script(&table, table.preset.as_deref(), &data_file)
            .map_err(|e| Failure::Usage(e.to_string()))?;
        write_output(Some(&path.with_extension("py")), &script)?;
    }
    if table.all_rows_failed() {
        return Err(Failure::Numerical("every cell of the result is invalid".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
