//! Command implementations behind the `affectsim` binary.
//!
//! Exit codes: 0 on success, 1 for invalid input (bad files, unscored
//! actions, empty datasets, usage errors), 2 for runtime failures (I/O,
//! diverged training).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use affect_core::affect::learning::{
    dataset_to_csv, holdout_split, load_dataset, planted_dataset, rmse, sgd_train, SgdParams,
};
use affect_core::affect::WeightModel;
use affect_core::config::{EngineConfig, Resources};
use affect_core::engine::{Engine, EventInput};
use affect_core::regulation::{RegulationOutcome, Strategy};
use affect_core::scenario::Scenario;
use affect_core::trace::{trace_to_string, EntryKind, TraceEntry, TraceFormat};
use affect_core::{Emotion, Error};

pub const CONFIG_ENV: &str = "AFFECTSIM_CONFIG";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_validation() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Config file plus command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct ConfigArgs {
    pub config: Option<PathBuf>,
    pub strategy: Option<Strategy>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl ConfigArgs {
    /// Explicit path, else the environment variable, else built-in defaults.
    pub fn resolve(&self) -> CliResult<EngineConfig> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut config = match path {
            Some(p) => EngineConfig::load(&p)?,
            None => EngineConfig::default(),
        };
        if let Some(s) = self.strategy {
            config.strategy = s;
        }
        if let Some(a) = self.alpha {
            config.alpha = a;
        }
        if let Some(b) = self.beta {
            config.beta = b;
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn describe_outcome(o: &RegulationOutcome) -> String {
    match o.emotion {
        None => format!("{}: no active emotion", o.strategy),
        Some(e) if o.label == "blended" => {
            format!("{}: blended @ {:.4} (dominant {e})", o.strategy, o.intensity)
        }
        Some(e) => format!("{}: {e} @ {:.4}", o.strategy, o.intensity),
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub trace: Vec<TraceEntry>,
    pub text: String,
    pub summary: String,
}

/// Runs a scenario and renders its trace. Nothing is written on validation failure.
pub fn run_scenario(scenario: &Scenario, config: EngineConfig, format: TraceFormat) -> CliResult<RunOutput> {
    let resources = config.resources()?;
    let (engine, trace) = scenario.run(config, resources)?;
    let text = trace_to_string(&trace, format);
    let mut summary = format!(
        "{} entries, final tick {}, mood {:.4}",
        trace.len(),
        engine.clock(),
        engine.mood().value()
    );
    if let Some(o) = trace.iter().rev().find_map(|t| t.outcome.as_ref()) {
        write!(summary, "\nfinal state: {}", describe_outcome(o)).unwrap();
    }
    Ok(RunOutput { trace, text, summary })
}

pub fn cmd_run(scenario: &Path, config: &ConfigArgs, out: Option<&Path>, format: TraceFormat) -> CliResult<String> {
    let scenario = Scenario::load(scenario)?;
    let output = run_scenario(&scenario, config.resolve()?, format)?;
    match out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => print!("{}", output.text),
    }
    Ok(output.summary)
}

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub params: SgdParams,
    pub holdout: f64,
    pub dense: bool,
}

pub fn topology(dense: bool) -> WeightModel {
    if dense {
        WeightModel::zeros_dense()
    } else {
        WeightModel::zeros_occ()
    }
}

pub fn cmd_train(args: &TrainArgs) -> CliResult<String> {
    if !(0.0..1.0).contains(&args.holdout) {
        return Err(CliError::usage("--holdout must be in [0, 1)"));
    }
    let data = load_dataset(&args.dataset)?;
    if data.is_empty() {
        return Err(Error::EmptyDataset.into());
    }
    let (train, test) = holdout_split(&data, args.holdout);
    let out = sgd_train(train, topology(args.dense), &args.params)?;
    out.model.save(&args.out)?;
    let mut report = format!(
        "samples {} (train {}, held-out {}), steps {}\ntrain rmse {:.6}",
        data.len(),
        train.len(),
        test.len(),
        out.steps,
        out.loss.sqrt()
    );
    if !test.is_empty() {
        write!(report, "\nheld-out rmse {:.6}", rmse(&out.model, test)).unwrap();
    }
    Ok(report)
}

pub fn cmd_synth(samples: usize, seed: u64, dense: bool, out: &Path, truth: Option<&Path>) -> CliResult<String> {
    let (model, data) = planted_dataset(seed, samples, &topology(dense));
    std::fs::write(out, dataset_to_csv(&data)).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    if let Some(t) = truth {
        model.save(t)?;
    }
    Ok(format!("wrote {} samples to {}", data.len(), out.display()))
}

pub const REPL_HELP: &str = "commands:
  event <source> <action> <target>   process an event at the current tick
  tick [n]                           advance n ticks (default 1)
  state                              intensities, mood and clock
  memory                             dump memory as JSON
  save <path>                        write a state snapshot
  load <path> [force]                restore a snapshot (force: ignore config mismatch)
  help                               this text
  quit                               leave";

/// A line-oriented session over one engine. Every processed entry is kept
/// so a session can be compared against a batch run.
pub struct Session {
    engine: Engine,
    trace: Vec<TraceEntry>,
}

pub struct Reply {
    pub text: String,
    pub quit: bool,
}

impl Reply {
    fn text(text: impl Into<String>) -> Self {
        Reply {
            text: text.into(),
            quit: false,
        }
    }
}

impl Session {
    pub fn new(engine: Engine) -> Self {
        Session {
            engine,
            trace: Vec::new(),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn handle(&mut self, line: &str) -> Reply {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            [] => Reply::text(""),
            ["event", source, action, target] => {
                let entry = self.engine.process_event(&EventInput::new(source, action, target));
                let text = render_event(&entry);
                self.trace.push(entry);
                Reply::text(text)
            }
            ["tick"] => self.ticks(1),
            ["tick", n] => match n.parse::<u64>() {
                Ok(n) => self.ticks(n),
                Err(_) => Reply::text(format!("tick count `{n}` is not a number\n{REPL_HELP}")),
            },
            ["state"] => Reply::text(self.render_state()),
            ["memory"] => Reply::text(self.engine.memory().to_json().trim_end().to_string()),
            ["save", path] => match self.engine.save_state(Path::new(path)) {
                Ok(()) => Reply::text(format!("saved {path}")),
                Err(e) => Reply::text(format!("error: {e}")),
            },
            ["load", path] | ["load", path, "force"] => {
                let force = words.len() == 3;
                match self.engine.load_state(Path::new(path), force) {
                    Ok(()) => Reply::text(format!("loaded {path}")),
                    Err(e) => Reply::text(format!("error: {e}")),
                }
            }
            ["help"] => Reply::text(REPL_HELP),
            ["quit"] | ["exit"] => Reply {
                text: String::new(),
                quit: true,
            },
            _ => Reply::text(format!("unknown command `{}`\n{REPL_HELP}", line.trim())),
        }
    }

    fn ticks(&mut self, n: u64) -> Reply {
        let target = self.engine.clock() + n;
        let entries = self.engine.advance_to(target);
        let text = match entries.last().and_then(|e| e.outcome.as_ref()) {
            Some(o) => format!("tick {target}: {}", describe_outcome(o)),
            None => format!("tick {target}"),
        };
        self.trace.extend(entries);
        Reply::text(text)
    }

    fn render_state(&self) -> String {
        let mut s = format!(
            "tick {}  mood {:.4}\n",
            self.engine.clock(),
            self.engine.mood().value()
        );
        for (e, i) in self.engine.affect().intensities.iter() {
            writeln!(s, "  {:<13}{:.4}", e.name(), i).unwrap();
        }
        s.trim_end().to_string()
    }
}

fn render_event(entry: &TraceEntry) -> String {
    if entry.kind == EntryKind::Rejected {
        return format!("rejected: {}", entry.error.as_deref().unwrap_or("unknown error"));
    }
    let mut s = String::new();
    if let Some(a) = &entry.appraisal {
        writeln!(
            s,
            "appraisal: desirability {:.4}, praiseworthiness {:.4}, appealingness {:.4}, deservingness {:.4}, familiarity {:.4}, unexpectedness {:.4}",
            a.desirability, a.praiseworthiness, a.appealingness, a.deservingness, a.familiarity, a.unexpectedness
        )
        .unwrap();
    }
    let active: Vec<String> = Emotion::ALL
        .iter()
        .filter(|&&e| entry.intensities[e] > 0.0)
        .map(|&e| format!("{e} {:.4}", entry.intensities[e]))
        .collect();
    writeln!(s, "intensities: {}", if active.is_empty() { "none".into() } else { active.join(", ") }).unwrap();
    writeln!(s, "mood: {:.4} -> {:.4}", entry.mood_before, entry.mood_after).unwrap();
    if let Some(o) = &entry.outcome {
        write!(s, "regulated: {}", describe_outcome(o)).unwrap();
    }
    s
}

/// The REPL command lines that reproduce a scenario's event schedule.
pub fn replay_commands(scenario: &Scenario) -> Vec<String> {
    let mut clock = 0;
    let mut lines = Vec::new();
    let mut advance = |to: u64, lines: &mut Vec<String>| {
        if to > clock {
            lines.push(format!("tick {}", to - clock));
            clock = to;
        }
    };
    for e in &scenario.events {
        advance(e.tick, &mut lines);
        lines.push(format!("event {} {} {}", e.source, e.action, e.target));
    }
    if let Some(end) = scenario.end_tick {
        advance(end, &mut lines);
    }
    lines
}

/// Engine for an interactive session, seeded from an optional scenario's
/// personality, memory and context (its events are not replayed).
pub fn repl_engine(config: EngineConfig, scenario: Option<&Scenario>) -> CliResult<Engine> {
    let resources: Resources = config.resources()?;
    let base = Scenario {
        events: Vec::new(),
        end_tick: None,
        ..scenario.cloned().unwrap_or_default()
    };
    Ok(base.engine(config, resources)?)
}
