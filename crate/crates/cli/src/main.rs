use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use fas_cli::presets;
use fas_cli::spec::{ExperimentSpec, OneOrMany, OutputFormat, Scenario, SweepVar};
use fas_cli::{run_experiment, validate_spec, write_csv, write_json, InvalidSpec, RunOptions};
use fas_core::{correlation_mu, Method};

#[derive(Parser)]
#[command(name = "fas", version, about = "Outage probability sweeps for fluid antenna systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config, flags, or both (flags win).
    Run {
        config: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioFlags,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a built-in experiment.
    Preset {
        /// One of: fig1-small, fig2.
        name: String,
        /// Print the preset's config instead of running it.
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Check a config and list every problem with it.
    Validate { config: PathBuf },
    /// Print the spatial correlation factor for an aperture.
    Mu {
        /// Aperture size in wavelengths.
        #[arg(long)]
        aperture: f64,
    },
}

#[derive(Args)]
struct ScenarioFlags {
    /// phi_db, K, M or W.
    #[arg(long)]
    sweep: Option<SweepVar>,
    /// Comma-separated subset of mc, gc, lb, asy.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long = "ports", short = 'M', value_delimiter = ',')]
    ports: Option<Vec<usize>>,
    #[arg(long = "active", short = 'K', value_delimiter = ',')]
    active: Option<Vec<usize>>,
    #[arg(long = "aperture", short = 'W', value_delimiter = ',')]
    aperture: Option<Vec<f64>>,
    #[arg(long = "rate", short = 'R', value_delimiter = ',')]
    rate: Option<Vec<f64>>,
    #[arg(long = "phi-db", value_delimiter = ',', allow_hyphen_values = true)]
    phi_db: Option<Vec<f64>>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct RunFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Worker threads (default: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Omit the timestamp header and wall times so reruns are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
    /// Output file; '-' for stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Directory for output files when no path is given.
    #[arg(long, env = "FAS_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

fn list<T>(v: Option<Vec<T>>) -> Option<OneOrMany<T>> {
    v.map(OneOrMany::Many)
}

fn build_spec(config: Option<&Path>, flags: ScenarioFlags) -> Result<ExperimentSpec> {
    let mut spec = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentSpec::from_toml(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let (Some(sweep), Some(ports), Some(active)) = (flags.sweep, flags.ports.clone(), flags.active.clone())
            else {
                bail!("without a config file, --sweep, --ports and --active are required");
            };
            ExperimentSpec {
                name: "experiment".into(),
                sweep,
                methods: vec![Method::Mc],
                scenario: Scenario {
                    ports: OneOrMany::Many(ports),
                    active: OneOrMany::Many(active),
                    aperture: OneOrMany::One(5.0),
                    rate: OneOrMany::One(5.0),
                    phi_db: OneOrMany::One(10.0),
                },
                mc: Default::default(),
                truncation: Default::default(),
                quadrature: Default::default(),
                output: Default::default(),
            }
        }
    };
    let s = &mut spec.scenario;
    if let Some(v) = list(flags.ports) {
        s.ports = v;
    }
    if let Some(v) = list(flags.active) {
        s.active = v;
    }
    if let Some(v) = list(flags.aperture) {
        s.aperture = v;
    }
    if let Some(v) = list(flags.rate) {
        s.rate = v;
    }
    if let Some(v) = list(flags.phi_db) {
        s.phi_db = v;
    }
    if let Some(v) = flags.sweep {
        spec.sweep = v;
    }
    if let Some(v) = flags.methods {
        spec.methods = v;
    }
    if let Some(v) = flags.name {
        spec.name = v;
    }
    Ok(spec)
}

fn destination(spec: &ExperimentSpec, flags: &RunFlags, format: OutputFormat) -> Option<PathBuf> {
    let explicit = flags.output.clone().or_else(|| spec.output.path.as_ref().map(PathBuf::from));
    match explicit {
        Some(p) if p.as_os_str() == "-" => None,
        Some(p) => Some(p),
        None => flags
            .output_dir
            .as_ref()
            .map(|d| d.join(format!("{}.{}", spec.name, format.extension()))),
    }
}

fn execute(mut spec: ExperimentSpec, flags: RunFlags) -> Result<ExitCode> {
    if let Some(seed) = flags.seed {
        spec.mc.seed = seed;
    }
    if let Some(n) = flags.samples {
        spec.mc.samples = n;
    }
    let format = flags.format.unwrap_or(spec.output.format);
    let opts = RunOptions {
        jobs: flags.jobs,
        wall_time: !flags.no_timestamp,
    };
    let rows = match run_experiment(&spec, opts) {
        Ok(rows) => rows,
        Err(invalid) => {
            eprint!("{invalid}");
            return Ok(ExitCode::from(1));
        }
    };
    for r in rows.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "{} M={} K={} phi_db={} {}: {}",
            r.method,
            r.ports,
            r.active,
            r.phi_db,
            r.status,
            r.error.as_deref().unwrap_or("")
        );
    }
    let header = (!flags.no_timestamp).then(|| {
        format!(
            "fas {} run '{}' at {}",
            env!("CARGO_PKG_VERSION"),
            spec.name,
            chrono::Local::now().to_rfc3339()
        )
    });
    let dest = destination(&spec, &flags, format);
    let sink: Box<dyn Write> = match &dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        OutputFormat::Csv => write_csv(&rows, header.as_deref(), &mut sink)?,
        OutputFormat::Json => write_json(&rows, header.as_deref(), &mut sink)?,
    }
    sink.flush()?;
    if let Some(path) = dest {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(if rows.iter().all(|r| r.is_ok()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run { config, scenario, run } => execute(build_spec(config.as_deref(), scenario)?, run),
        Command::Preset { name, print, run } => {
            if print {
                let text = presets::text(&name).with_context(|| format!("unknown preset '{name}'"))?;
                print!("{text}");
                return Ok(ExitCode::SUCCESS);
            }
            execute(presets::load(&name)?, run)
        }
        Command::Validate { config } => {
            let spec = build_spec(Some(&config), ScenarioFlags::empty())?;
            let violations = validate_spec(&spec);
            if violations.is_empty() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                print!("{}", InvalidSpec(violations));
                Ok(ExitCode::from(1))
            }
        }
        Command::Mu { aperture } => {
            println!("{}", correlation_mu(aperture)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

impl ScenarioFlags {
    fn empty() -> Self {
        Self {
            sweep: None,
            methods: None,
            ports: None,
            active: None,
            aperture: None,
            rate: None,
            phi_db: None,
            name: None,
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
