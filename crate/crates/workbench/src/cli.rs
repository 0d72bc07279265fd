//! `qcwb` command line. Every subcommand prints a JSON document (compact
//! with `--json`) except `synth`, `esp` and `machines list`, which print text
//! unless `--json` is given. Exit status: 0 success, 1 rejected input or
//! runtime failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qcwb_core::catalog::{generate_machine, load_catalog, write_machine, Catalog, MachineProperties, Topology};
use qcwb_core::circuit::{to_openqasm, Circuit};
use qcwb_core::writer::{ConceptualSpec, SnippetDialect};
use qcwb_core::Diagnostics;
use serde::Serialize;

use crate::config::ServiceConfig;
use crate::error::WorkbenchError;
use crate::ops;

#[derive(Debug, Parser)]
#[command(name = "qcwb", version, about = "Quantum circuit workbench")]
struct Cli {
    /// Machine catalog directory [default: $QCWB_CATALOG_DIR or ./machines]
    #[arg(long, global = true, value_name = "DIR")]
    catalog: Option<PathBuf>,
    /// Compact machine-readable JSON output and JSON error reports
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a conceptual spec into a circuit and print generated code
    Synth {
        /// Spec JSON file, or - for stdin
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "openqasm2")]
        dialect: CodeDialect,
    },
    /// Inspect, query and create machine calibration files
    Machines {
        #[command(subcommand)]
        command: MachinesCommand,
    },
    /// Compile a circuit for a machine
    Transpile {
        #[command(flatten)]
        input: CircuitOnMachine,
        /// Print the compiled circuit as OpenQASM 2 instead of JSON
        #[arg(long)]
        qasm: bool,
    },
    /// Estimated success probability per layer of the compiled circuit
    Esp {
        #[command(flatten)]
        input: CircuitOnMachine,
    },
    /// Sample ideal measurement counts
    Simulate {
        /// Circuit JSON or OpenQASM 2 file, or - for stdin
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo error adjustment of ideal counts for a machine
    Adjust {
        #[command(flatten)]
        input: CircuitOnMachine,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results do not depend on this)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Circuit-viewer model: diagrams, provenance, animation frames
    Viewmodel {
        #[command(flatten)]
        input: CircuitOnMachine,
    },
    /// Run the HTTP service
    Serve {
        /// [default: $QCWB_PORT or 8080]
        #[arg(long)]
        port: Option<u16>,
        /// Directory of built web assets to serve at /
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct CircuitOnMachine {
    /// Circuit JSON or OpenQASM 2 file, or - for stdin
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    machine: String,
}

#[derive(Debug, Subcommand)]
enum MachinesCommand {
    /// Names of loaded machines
    List,
    /// Full calibration document of one machine
    Show { name: String },
    /// Resolve property paths, e.g. --path "qubits[0].t1_us"
    Select {
        name: String,
        #[arg(long = "path", required = true)]
        paths: Vec<String>,
    },
    /// Code that replays a property selection
    Snippet {
        name: String,
        #[arg(long = "path", required = true)]
        paths: Vec<String>,
        #[arg(long, value_enum, default_value = "workbench-cli")]
        dialect: SelectionDialect,
    },
    /// Write a synthetic machine into the catalog (or --out)
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        qubits: usize,
        /// line, ring or gridRxC
        #[arg(long)]
        topology: String,
        #[arg(long, default_value_t = 1.0)]
        noise_scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Download a machine document over HTTP into the catalog (or --out)
    Fetch {
        url: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CodeDialect {
    Openqasm2,
    Qiskit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectionDialect {
    WorkbenchCli,
    Qiskit,
}

impl From<SelectionDialect> for SnippetDialect {
    fn from(d: SelectionDialect) -> Self {
        match d {
            SelectionDialect::WorkbenchCli => SnippetDialect::WorkbenchCli,
            SelectionDialect::Qiskit => SnippetDialect::Qiskit,
        }
    }
}

/// Why a command failed after argument parsing.
enum Failure {
    Workbench(WorkbenchError),
    /// Output was already printed; only the exit status signals failure.
    Reported,
}

impl From<WorkbenchError> for Failure {
    fn from(e: WorkbenchError) -> Self {
        Failure::Workbench(e)
    }
}

struct Ctx<'a> {
    config: ServiceConfig,
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        let text = if self.json {
            serde_json::to_string(value)
        } else {
            serde_json::to_string_pretty(value)
        }
        .map_err(|e| WorkbenchError::Internal(e.to_string()))?;
        self.text(&text)
    }

    fn text(&mut self, text: &str) -> Result<(), Failure> {
        writeln!(self.out, "{}", text.trim_end_matches('\n')).map_err(|e| WorkbenchError::Internal(e.to_string()))?;
        Ok(())
    }

    fn warn(&mut self, diagnostics: &Diagnostics) {
        for d in diagnostics.iter() {
            let _ = writeln!(self.err, "{d}");
        }
    }

    fn catalog(&self) -> Result<Catalog, WorkbenchError> {
        Ok(load_catalog(&self.config.catalog_dir)?)
    }

    fn machine(&self, name: &str) -> Result<MachineProperties, WorkbenchError> {
        Ok(self.catalog()?.get(name)?.clone())
    }
}

fn read_input(path: &Path) -> Result<String, WorkbenchError> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| WorkbenchError::Malformed(format!("reading stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| WorkbenchError::Malformed(format!("reading {}: {e}", path.display())))
}

fn read_circuit(path: &Path) -> Result<Circuit, WorkbenchError> {
    ops::parse_circuit_text(&read_input(path)?)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let mut config = match ServiceConfig::from_env() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    if let Some(dir) = cli.catalog {
        config.catalog_dir = dir;
    }
    let json = cli.json;
    let mut ctx = Ctx { config, json, out, err };
    match execute(cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(Failure::Reported) => 1,
        Err(Failure::Workbench(e)) => {
            if json {
                let body = serde_json::to_string(&e.body()).unwrap_or_else(|_| e.to_string());
                let _ = writeln!(ctx.err, "{body}");
            } else {
                let _ = writeln!(ctx.err, "error: {e}");
                for d in e.diagnostics().iter().skip(1) {
                    let _ = writeln!(ctx.err, "  {d}");
                }
            }
            1
        }
    }
}

fn execute(command: Command, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    match command {
        Command::Synth { spec, dialect } => {
            let text = read_input(&spec)?;
            let spec: ConceptualSpec = serde_json::from_str(&text)
                .map_err(|e| WorkbenchError::rejected("schema", format!("schema violation: {e}")))?;
            let result = ops::synthesize_spec(&spec);
            if ctx.json {
                ctx.emit(&result)?;
            } else {
                ctx.warn(&result.diagnostics);
                let key = match dialect {
                    CodeDialect::Openqasm2 => SnippetDialect::Openqasm2,
                    CodeDialect::Qiskit => SnippetDialect::Qiskit,
                };
                if let Some(code) = result.snippets.get(key.name()) {
                    ctx.text(code)?;
                }
            }
            if result.has_errors() {
                return Err(Failure::Reported);
            }
            Ok(())
        }
        Command::Machines { command } => machines(command, ctx),
        Command::Transpile { input, qasm } => {
            let circuit = read_circuit(&input.circuit)?;
            let machine = ctx.machine(&input.machine)?;
            if qasm {
                let (compiled, _) = ops::transpile_with_esp(&circuit, &machine)?;
                ctx.text(&to_openqasm(&compiled.circuit))
            } else {
                let result = ops::transpile_document(&circuit, &machine)?;
                ctx.emit(&result)
            }
        }
        Command::Esp { input } => {
            let circuit = read_circuit(&input.circuit)?;
            let machine = ctx.machine(&input.machine)?;
            let (_, esp) = ops::transpile_with_esp(&circuit, &machine)?;
            if ctx.json {
                return ctx.emit(&esp);
            }
            let mut table = String::from("layer  layerwise        cumulative\n");
            for (i, (l, c)) in esp.layerwise.iter().zip(&esp.cumulative).enumerate() {
                let _ = writeln!(table, "{i:<5}  {l:<15.12}  {c:.12}");
            }
            let _ = write!(table, "final  {:.12}", esp.final_esp());
            ctx.text(&table)
        }
        Command::Simulate { circuit, shots, seed } => {
            let circuit = read_circuit(&circuit)?;
            let counts = ops::simulate(
                &circuit,
                shots.unwrap_or(ctx.config.default_shots),
                seed.unwrap_or(ctx.config.seed),
                &ctx.config.limits,
            )?;
            ctx.emit(&counts)
        }
        Command::Adjust {
            input,
            shots,
            trials,
            seed,
            threads,
        } => {
            let circuit = read_circuit(&input.circuit)?;
            let machine = ctx.machine(&input.machine)?;
            let result = ops::error_adjust(
                &circuit,
                &machine,
                shots.unwrap_or(ctx.config.default_shots),
                trials.unwrap_or(ctx.config.default_trials),
                seed.unwrap_or(ctx.config.seed),
                threads,
                &ctx.config.limits,
            )?;
            ctx.emit(&result)
        }
        Command::Viewmodel { input } => {
            let circuit = read_circuit(&input.circuit)?;
            let machine = ctx.machine(&input.machine)?;
            let vm = crate::viewmodel::build_view_model(&circuit, &machine)?;
            ctx.emit(&vm)
        }
        Command::Serve { port, static_dir } => {
            let mut config = ctx.config.clone();
            if let Some(p) = port {
                config.port = p;
            }
            if static_dir.is_some() {
                config.static_dir = static_dir;
            }
            let _ = writeln!(
                ctx.err,
                "serving on port {} with catalog {}",
                config.port,
                config.catalog_dir.display()
            );
            let runtime = tokio::runtime::Runtime::new().map_err(|e| WorkbenchError::Internal(e.to_string()))?;
            runtime
                .block_on(crate::api::serve(config))
                .map_err(|e| WorkbenchError::Internal(e.to_string()))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Written<'a> {
    name: &'a str,
    path: PathBuf,
}

fn save_machine(ctx: &mut Ctx<'_>, machine: &MachineProperties, out: Option<PathBuf>) -> Result<(), Failure> {
    let dir = out.unwrap_or_else(|| ctx.config.catalog_dir.clone());
    let path = std::fs::create_dir_all(&dir)
        .and_then(|()| write_machine(&dir, machine))
        .map_err(|e| WorkbenchError::Internal(format!("writing into {}: {e}", dir.display())))?;
    if ctx.json {
        ctx.emit(&Written {
            name: &machine.name,
            path,
        })
    } else {
        ctx.text(&path.display().to_string())
    }
}

fn machines(command: MachinesCommand, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    match command {
        MachinesCommand::List => {
            let catalog = ctx.catalog()?;
            for report in catalog.rejected() {
                let _ = writeln!(ctx.err, "skipped {}", report.path.display());
                ctx.warn(&report.diagnostics);
            }
            if ctx.json {
                let summaries: Vec<ops::MachineSummary> = catalog.machines().map(ops::MachineSummary::from).collect();
                ctx.emit(&summaries)
            } else {
                let names: Vec<&str> = catalog.names().collect();
                ctx.text(&names.join("\n"))
            }
        }
        MachinesCommand::Show { name } => {
            let m = ctx.machine(&name)?;
            ctx.emit(&m)
        }
        MachinesCommand::Select { name, paths } => {
            let m = ctx.machine(&name)?;
            let selection = qcwb_core::catalog::select_properties(&m, &paths);
            ctx.emit(&selection)?;
            if selection.has_errors() {
                for e in selection.entries.iter().filter_map(|e| e.error.as_ref()) {
                    let _ = writeln!(ctx.err, "error: {e}");
                }
                return Err(Failure::Reported);
            }
            Ok(())
        }
        MachinesCommand::Snippet { name, paths, dialect } => {
            let m = ctx.machine(&name)?;
            let result = ops::property_snippet(&m, &paths, dialect.into())?;
            if ctx.json {
                ctx.emit(&result)
            } else {
                ctx.text(&result.snippet)
            }
        }
        MachinesCommand::Generate {
            seed,
            qubits,
            topology,
            noise_scale,
            out,
        } => {
            let topology: Topology = topology
                .parse()
                .map_err(|e: qcwb_core::catalog::GenerateError| WorkbenchError::rejected("generate", e.to_string()))?;
            let m = generate_machine(seed, qubits, topology, noise_scale)
                .map_err(|e| WorkbenchError::rejected("generate", e.to_string()))?;
            save_machine(ctx, &m, out)
        }
        MachinesCommand::Fetch { url, out } => {
            let (m, warnings) = crate::remote::fetch_machine_blocking(&url)?;
            ctx.warn(&warnings);
            save_machine(ctx, &m, out)
        }
    }
}
