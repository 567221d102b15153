use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gravlab_cli::{parse_config, run, CliError, Format, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "gravlab",
    version,
    about = "Desk-scale checks of proposed tests of quantum gravity",
    after_help = "Exit codes: 0 success, 1 invalid input, 2 runtime failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario config (JSON); demo parameters are used when omitted
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format (default: json for nogo-verify, csv otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// RNG seed; overrides the config's seed
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Gravcat pair state and entanglement under each mediator model
    GieState,
    /// Negativity and CHSH along a single-axis sweep (t, m, D or Delta)
    GieSweep,
    /// Seeded search for entanglement from a superselected classical mediator
    NogoVerify,
    /// Log-grid scan of the Alice/Bob gedankenexperiment regimes
    GedankenScan,
    /// Segment phases of the COW neutron interferometer
    Cow,
    /// Seeded Page-Geilker Cavendish runs (requires a seed)
    Cavendish,
    /// Non-Gaussianity time series of a condensate under quantum or classical gravity
    GingEvolve,
    /// Newtonian, redshift and Newton-Cartan phase comparison
    NcCheck,
}

impl Command {
    fn scenario(self) -> Scenario {
        match self {
            Command::GieState => Scenario::GieState,
            Command::GieSweep => Scenario::GieSweep,
            Command::NogoVerify => Scenario::NogoVerify,
            Command::GedankenScan => Scenario::GedankenScan,
            Command::Cow => Scenario::Cow,
            Command::Cavendish => Scenario::Cavendish,
            Command::GingEvolve => Scenario::GingEvolve,
            Command::NcCheck => Scenario::NcCheck,
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let scenario = cli.command.scenario();
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut cfg = parse_config(
                &std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
                    path: path.clone(),
                    source,
                })?,
            )?;
            if cfg.scenario != scenario {
                return Err(CliError::schema(format!(
                    "scenario: config is for `{}` but the subcommand is `{scenario}`",
                    cfg.scenario
                )));
            }
            if cli.seed.is_some() {
                cfg.seed = cli.seed;
            }
            cfg
        }
        None => {
            let mut cfg = ScenarioConfig::default_for(scenario);
            cfg.seed = cli.seed;
            cfg
        }
    };
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::schema("--threads: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::schema(format!("--threads: {e}")))?;
    }
    let format = match cli.format {
        Some(OutputFormat::Csv) => Format::Csv,
        Some(OutputFormat::Json) => Format::Json,
        None => gravlab_cli::run::default_format(scenario),
    };
    let table = run(&cfg)?;
    table.emit(format, cfg.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
