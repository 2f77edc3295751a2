use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use affect_cli::{
    cmd_run, cmd_synth, cmd_train, repl_engine, CliError, CliResult, ConfigArgs, Session, TrainArgs, CONFIG_ENV,
};
use affect_core::affect::learning::SgdParams;
use affect_core::regulation::Strategy;
use affect_core::scenario::Scenario;
use affect_core::trace::TraceFormat;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Scenario-driven emotion simulator and weight trainer.
///
/// Exit codes: 0 success, 1 invalid input, 2 runtime failure.
#[derive(Parser)]
#[command(name = "affectsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EngineFlags {
    /// Engine config (TOML).
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Mood compensation strength.
    #[arg(long)]
    alpha: Option<f64>,
    /// Mood update rate.
    #[arg(long)]
    beta: Option<f64>,
}

impl EngineFlags {
    fn args(&self) -> ConfigArgs {
        ConfigArgs {
            config: self.config.clone(),
            strategy: self.strategy.map(Into::into),
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Highest,
    Blended,
    Ethical,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Highest => Strategy::Highest,
            StrategyArg::Blended => Strategy::Blended,
            StrategyArg::Ethical => Strategy::Ethical,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    /// Only the links of the appraisal/emotion association table.
    Occ,
    /// Every variable linked to every emotion.
    Dense,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its trace.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Trace output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        engine: EngineFlags,
    },
    /// Fit link weights to a dataset with SGD.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = SgdParams::default().eta0)]
        eta0: f64,
        /// Learning-rate decay per step.
        #[arg(long, default_value_t = SgdParams::default().decay)]
        decay: f64,
        #[arg(long, default_value_t = SgdParams::default().epochs)]
        epochs: usize,
        /// Shuffle seed.
        #[arg(long, default_value_t = SgdParams::default().seed)]
        seed: u64,
        /// Fraction of trailing samples held out for evaluation.
        #[arg(long, default_value_t = 0.2)]
        holdout: f64,
        #[arg(long, value_enum, default_value = "occ")]
        topology: TopologyArg,
    },
    /// Write a synthetic dataset drawn from a random planted model.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "occ")]
        topology: TopologyArg,
        /// Also write the planted model here.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Interactive session reading commands from stdin.
    Repl {
        /// Take personality, memory and context from this scenario.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

fn repl(scenario: Option<PathBuf>, flags: &EngineFlags) -> CliResult<String> {
    let scenario = scenario.map(|p| Scenario::load(&p)).transpose()?;
    let engine = repl_engine(flags.args().resolve()?, scenario.as_ref())?;
    let mut session = Session::new(engine);
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    println!("type `help` for commands");
    loop {
        print!("> ");
        stdout.flush().ok();
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                return Err(CliError {
                    code: 2,
                    message: format!("reading stdin: {e}"),
                })
            }
        }
        let reply = session.handle(&line);
        if !reply.text.is_empty() {
            println!("{}", reply.text);
        }
        if reply.quit {
            break;
        }
    }
    Ok(String::new())
}

fn dispatch(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            format,
            engine,
        } => {
            let format = match format {
                FormatArg::Csv => TraceFormat::Csv,
                FormatArg::Jsonl => TraceFormat::Jsonl,
            };
            cmd_run(&scenario, &engine.args(), out.as_deref(), format)
        }
        Command::Train {
            dataset,
            out,
            eta0,
            decay,
            epochs,
            seed,
            holdout,
            topology,
        } => cmd_train(&TrainArgs {
            dataset,
            out,
            params: SgdParams {
                eta0,
                decay,
                epochs,
                seed,
            },
            holdout,
            dense: matches!(topology, TopologyArg::Dense),
        }),
        Command::Synth {
            out,
            samples,
            seed,
            topology,
            truth,
        } => cmd_synth(samples, seed, matches!(topology, TopologyArg::Dense), &out, truth.as_deref()),
        Command::Repl { scenario, engine } => repl(scenario, &engine),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(report) => {
            if !report.is_empty() {
                eprintln!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
