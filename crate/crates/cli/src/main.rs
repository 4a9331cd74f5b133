//! `evperp` command line: break-even threshold tables, sensitivity sweeps,
//! seeded venue simulations, packaged attack channels, and the channel
//! control matrix.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 invariant
//! violation during a run. Every invocation emits a run manifest naming its
//! outputs and their content hashes: written alongside file outputs, or as a
//! single JSON line on stderr when everything went to stdout. Commands write
//! only the paths the manifest declares.

use clap::{Parser, Subcommand, ValueEnum};
use evperp_core::adversary::AdversaryError;
use evperp_core::config::{self, AttackConfig};
use evperp_core::costbenefit::{sweep_thresholds, threshold, ThresholdResult};
use evperp_core::types::{validate_scenario, ManipulationScenario};
use evperp_core::venue::{
    generate_index_path, run_market, EngineConfig, EngineKind, MarketSpec, RunReport, VenueError,
};
use evperp_core::{matrix, run_bad_debt_shift, run_halt_arbitrage, run_preemption_attack};
use evperp_core::AttackOutcome;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Bumped whenever the shape of any emitted artifact changes.
const ARTIFACT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "evperp",
    version,
    about = "Leveraged event-perpetual analytics and venue simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Break-even leverage thresholds for every scenario in a deck
    Threshold {
        /// Scenario deck ([scenario <label>] sections)
        deck: PathBuf,
        /// Write the rows to this file as well as printing the table
        #[arg(long)]
        out: Option<PathBuf>,
        /// Format of the --out file
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Threshold sensitivity grid over cost, detection, and penalty axes
    Sweep {
        /// Scenario deck ([scenario <label>] sections, axes optional)
        deck: PathBuf,
        /// Scenario label to sweep (default: the first in the deck)
        #[arg(long)]
        scenario: Option<String>,
        /// Override the deck's k_manip axis (comma-separated values)
        #[arg(long, value_delimiter = ',')]
        k_axis: Vec<f64>,
        /// Override the deck's detection-probability axis
        #[arg(long, value_delimiter = ',')]
        p_detected_axis: Vec<f64>,
        /// Override the deck's penalty-factor axis
        #[arg(long, value_delimiter = ',')]
        penalty_axis: Vec<f64>,
        /// Write the grid here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Seeded venue simulation runs with an aggregate summary
    Simulate {
        /// Run file ([market], [engine], [ladder], pool/venue/roster sections)
        config: PathBuf,
        /// Base seed; repetition i runs with seed + i
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds to run
        #[arg(long, default_value_t = 1)]
        reps: u32,
        /// Directory for per-run reports, summary.json, and manifest.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-run artifact: full report (json) or event log (csv)
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Override the configured margin engine
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Override the configured halt window width (0 disables the halt)
        #[arg(long)]
        halt_ticks: Option<u32>,
    },
    /// A packaged attack channel, one seeded execution per repetition
    Attack {
        /// Attack file (venue sections plus one [attack] section)
        config: PathBuf,
        /// Base seed; repetition i runs with seed + i
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds to run
        #[arg(long, default_value_t = 1)]
        reps: u32,
        /// Directory for per-seed outcomes, summary.json, and manifest.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the configured margin engine
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        /// Override the configured halt window width (0 disables the halt)
        #[arg(long)]
        halt_ticks: Option<u32>,
    },
    /// The channel-by-channel leverage control matrix
    Matrix {
        /// Write the matrix here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    E0,
    E2,
}

#[derive(Debug)]
enum CliError {
    /// Bad input, configuration, or parameters: exit code 1.
    Input(String),
    /// A run violated a venue invariant: exit code 2.
    Invariant(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(1),
            CliError::Invariant(_) => ExitCode::from(2),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Invariant(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

fn input(err: impl fmt::Display) -> CliError {
    CliError::Input(err.to_string())
}

impl From<VenueError> for CliError {
    fn from(e: VenueError) -> Self {
        match e {
            VenueError::InvariantViolation(msg) => CliError::Invariant(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<AdversaryError> for CliError {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Venue(VenueError::InvariantViolation(msg)) => {
                CliError::Invariant(msg)
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let requested = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if requested {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Threshold { deck, out, format } => cmd_threshold(&deck, out.as_deref(), format),
        Command::Sweep {
            deck,
            scenario,
            k_axis,
            p_detected_axis,
            penalty_axis,
            out,
            format,
        } => cmd_sweep(
            &deck,
            scenario.as_deref(),
            k_axis,
            p_detected_axis,
            penalty_axis,
            out.as_deref(),
            format,
        ),
        Command::Simulate {
            config,
            seed,
            reps,
            out,
            format,
            engine,
            halt_ticks,
        } => cmd_simulate(&config, seed, reps, out.as_deref(), format, engine, halt_ticks),
        Command::Attack {
            config,
            seed,
            reps,
            out,
            engine,
            halt_ticks,
        } => cmd_attack(&config, seed, reps, out.as_deref(), engine, halt_ticks),
        Command::Matrix { out, format } => cmd_matrix(out.as_deref(), format),
    }
}

// ---------------------------------------------------------------------------
// Run manifest

#[derive(Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    artifact_version: u32,
    command: String,
    config_path: Option<String>,
    seeds: Vec<u64>,
    outputs: Vec<OutputEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects everything a command writes so the closing manifest can name and
/// hash each output. A stdout payload is recorded under the path `-`.
struct Artifacts {
    command: &'static str,
    config_path: Option<String>,
    seeds: Vec<u64>,
    outputs: Vec<OutputEntry>,
}

impl Artifacts {
    fn new(command: &'static str, config_path: Option<&Path>) -> Self {
        Artifacts {
            command,
            config_path: config_path.map(|p| p.display().to_string()),
            seeds: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        fs::write(path, contents).map_err(|e| input(format!("{}: {e}", path.display())))?;
        self.outputs.push(OutputEntry {
            path: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    fn record_stdout(&mut self, payload: &str) {
        self.outputs.push(OutputEntry {
            path: "-".to_string(),
            sha256: sha256_hex(payload.as_bytes()),
        });
    }

    /// Writes the manifest to `path`, or prints it as one JSON line on
    /// stderr when the run produced no files to sit next to.
    fn emit(self, path: Option<&Path>) -> Result<(), CliError> {
        let manifest = RunManifest {
            artifact_version: ARTIFACT_VERSION,
            command: self.command.to_string(),
            config_path: self.config_path,
            seeds: self.seeds,
            outputs: self.outputs,
        };
        match path {
            Some(p) => {
                let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
                fs::write(p, json + "\n").map_err(|e| input(format!("{}: {e}", p.display())))
            }
            None => {
                let line = serde_json::to_string(&manifest).expect("manifest serializes");
                eprintln!("{line}");
                Ok(())
            }
        }
    }
}

/// `grid.csv` gets its manifest at `grid.manifest.json`.
fn manifest_sibling(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// --engine / --halt-ticks overrides

fn override_engine(current: EngineConfig, choice: EngineArg) -> EngineConfig {
    match choice {
        EngineArg::E0 => EngineConfig::static_e0(current.m0),
        // Keep the file's dynamic knobs when it already configures e2;
        // otherwise fall back to the e2 defaults at the file's m0.
        EngineArg::E2 if current.kind == EngineKind::DynamicE2 => current,
        EngineArg::E2 => EngineConfig::dynamic_e2(current.m0),
    }
}

fn override_halt(spec: &MarketSpec, halt_ticks: u32) -> Result<MarketSpec, CliError> {
    Ok(MarketSpec::new(
        spec.resolution_tick,
        halt_ticks,
        spec.outcome,
        spec.terminal_jump_reference,
        spec.event_class,
    )?)
}

// ---------------------------------------------------------------------------
// threshold

#[derive(Serialize)]
struct ThresholdRow {
    label: String,
    k_manip: f64,
    capital: f64,
    pi_yes: f64,
    p_detected: f64,
    penalty_factor: f64,
    l_star: f64,
    l_star_raw: f64,
    cost_term: f64,
    detection_term: f64,
    regime: String,
    always_profitable: bool,
}

impl ThresholdRow {
    fn new(s: &ManipulationScenario, t: &ThresholdResult) -> Self {
        ThresholdRow {
            label: s.label.clone(),
            k_manip: s.k_manip.value(),
            capital: s.capital.value(),
            pi_yes: s.pi_yes.value(),
            p_detected: s.p_detected.value(),
            penalty_factor: s.penalty_factor,
            l_star: t.l_star,
            l_star_raw: t.l_star_raw,
            cost_term: t.cost_term,
            detection_term: t.detection_term,
            regime: t.regime.to_string(),
            always_profitable: t.always_profitable,
        }
    }
}

fn threshold_table(rows: &[ThresholdRow]) -> String {
    let mut out = format!(
        "{:<22} {:>14} {:>14} {:>16}  {:<20} {}\n",
        "label", "l_star", "cost_term", "detection_term", "regime", "flags"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<22} {:>14.6} {:>14.6} {:>16.6}  {:<20} {}\n",
            r.label,
            r.l_star,
            r.cost_term,
            r.detection_term,
            r.regime,
            if r.always_profitable {
                "always-profitable"
            } else {
                ""
            }
        ));
    }
    out
}

fn threshold_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from(
        "label,k_manip,capital,pi_yes,p_detected,penalty_factor,\
         l_star,l_star_raw,cost_term,detection_term,regime,always_profitable\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            csv_field(&r.label),
            r.k_manip,
            r.capital,
            r.pi_yes,
            r.p_detected,
            r.penalty_factor,
            r.l_star,
            r.l_star_raw,
            r.cost_term,
            r.detection_term,
            r.regime,
            r.always_profitable
        ));
    }
    out
}

/// Partial-failure policy: a scenario that fails validation gets its own
/// error on stderr while every valid scenario is still computed and emitted.
/// Any failed row makes the whole invocation an input error (exit 1).
fn cmd_threshold(deck: &Path, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let entries = config::parse_raw_scenarios(&read(deck)?).map_err(input)?;
    let total = entries.len();
    let mut rows = Vec::new();
    let mut row_errors = Vec::new();
    for e in &entries {
        match validate_scenario(&e.raw) {
            Ok(s) => rows.push(ThresholdRow::new(&s, &threshold(&s))),
            Err(err) => row_errors.push(format!(
                "scenario `{}` (line {}): {err}",
                e.raw.label, e.line
            )),
        }
    }

    let table = threshold_table(&rows);
    print!("{table}");
    for err in &row_errors {
        eprintln!("error: {err}");
    }

    let mut artifacts = Artifacts::new("threshold", Some(deck));
    match out {
        Some(path) => {
            let payload = match format {
                Format::Csv => threshold_csv(&rows),
                Format::Json => {
                    serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
                }
            };
            artifacts.write(path, &payload)?;
            artifacts.emit(Some(&manifest_sibling(path)))?;
        }
        None => {
            artifacts.record_stdout(&table);
            artifacts.emit(None)?;
        }
    }

    if row_errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "{} of {total} scenarios failed validation",
            row_errors.len()
        )))
    }
}

// ---------------------------------------------------------------------------
// sweep

fn cmd_sweep(
    deck: &Path,
    scenario: Option<&str>,
    k_axis: Vec<f64>,
    p_detected_axis: Vec<f64>,
    penalty_axis: Vec<f64>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let entries = config::parse_scenarios(&read(deck)?).map_err(input)?;
    let entry = match scenario {
        Some(label) => entries
            .iter()
            .find(|e| e.scenario.label == label)
            .ok_or_else(|| {
                CliError::Input(format!("no scenario labelled `{label}` in {}", deck.display()))
            })?,
        None => &entries[0],
    };

    let mut axes = entry.axes.clone();
    if !k_axis.is_empty() {
        axes.k_manip = k_axis;
    }
    if !p_detected_axis.is_empty() {
        axes.p_detected = p_detected_axis;
    }
    if !penalty_axis.is_empty() {
        axes.penalty_factor = penalty_axis;
    }

    let grid = sweep_thresholds(&entry.scenario, &axes).map_err(input)?;
    let payload = match format {
        Format::Csv => grid.to_csv(),
        Format::Json => serde_json::to_string_pretty(&grid).expect("grid serializes") + "\n",
    };

    let mut artifacts = Artifacts::new("sweep", Some(deck));
    match out {
        Some(path) => {
            artifacts.write(path, &payload)?;
            artifacts.emit(Some(&manifest_sibling(path)))
        }
        None => {
            print!("{payload}");
            artifacts.record_stdout(&payload);
            artifacts.emit(None)
        }
    }
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize)]
struct SimulateSummary {
    runs: usize,
    engine: String,
    resolution_tick: u32,
    halt_ticks: u32,
    final_window_ticks: u32,
    liquidations_total: u64,
    liquidations_final_window: u64,
    liquidations_preempted: u64,
    runs_with_final_window_liquidations: usize,
    bad_debt_total: f64,
    uncovered_bad_debt: f64,
    pool_drawdown_total: f64,
    pool_drawdown_max: f64,
    forced_close_volume: f64,
    mean_realized_terminal_jump: f64,
    conservation_residual_max_abs: f64,
}

fn summarize_runs(reports: &[RunReport]) -> SimulateSummary {
    let first = &reports[0];
    let drawdown = |r: &RunReport| (r.pool_initial - r.pool_final).max(0.0);
    SimulateSummary {
        runs: reports.len(),
        engine: first.engine.to_string(),
        resolution_tick: first.resolution_tick,
        halt_ticks: first.halt_ticks,
        final_window_ticks: first.final_window_ticks,
        liquidations_total: reports.iter().map(|r| r.liquidations_total as u64).sum(),
        liquidations_final_window: reports
            .iter()
            .map(|r| r.liquidations_final_window as u64)
            .sum(),
        liquidations_preempted: reports
            .iter()
            .map(|r| r.liquidations_preempted as u64)
            .sum(),
        runs_with_final_window_liquidations: reports
            .iter()
            .filter(|r| r.liquidations_final_window > 0)
            .count(),
        bad_debt_total: reports.iter().map(|r| r.bad_debt_total).sum(),
        uncovered_bad_debt: reports.iter().map(|r| r.uncovered_bad_debt).sum(),
        pool_drawdown_total: reports.iter().map(drawdown).sum(),
        pool_drawdown_max: reports.iter().map(drawdown).fold(0.0, f64::max),
        forced_close_volume: reports.iter().map(|r| r.forced_close_volume).sum(),
        mean_realized_terminal_jump: reports
            .iter()
            .map(|r| r.realized_terminal_jump)
            .sum::<f64>()
            / reports.len() as f64,
        conservation_residual_max_abs: reports
            .iter()
            .map(|r| r.conservation_residual.abs())
            .fold(0.0, f64::max),
    }
}

fn cmd_simulate(
    config_path: &Path,
    seed: u64,
    reps: u32,
    out: Option<&Path>,
    format: Format,
    engine: Option<EngineArg>,
    halt_ticks: Option<u32>,
) -> Result<(), CliError> {
    if reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".to_string()));
    }
    let mut cfg = config::parse_run_config(&read(config_path)?).map_err(input)?;
    if let Some(halt) = halt_ticks {
        cfg.spec = override_halt(&cfg.spec, halt)?;
    }
    if let Some(choice) = engine {
        cfg.engine = override_engine(cfg.engine, choice);
    }

    let seeds: Vec<u64> = (0..u64::from(reps)).map(|i| seed.wrapping_add(i)).collect();
    // Reports come back in seed order regardless of worker count.
    let reports = seeds
        .par_iter()
        .map(|&s| -> Result<RunReport, CliError> {
            let path = generate_index_path(&cfg.spec, s, cfg.volatility, cfg.start_index)?;
            Ok(run_market(
                &cfg.spec,
                &cfg.engine,
                &cfg.ladder,
                path,
                &cfg.roster,
                cfg.pool.clone(),
                cfg.params.clone(),
                s,
            )?)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summary = summarize_runs(&reports);
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    print!("{summary_json}");

    let mut artifacts = Artifacts::new("simulate", Some(config_path));
    artifacts.seeds = seeds;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for r in &reports {
                match format {
                    Format::Json => {
                        let path = dir.join(format!("run-{:06}.json", r.seed));
                        artifacts.write(&path, &(r.to_json() + "\n"))?;
                    }
                    Format::Csv => {
                        let path = dir.join(format!("run-{:06}.events.csv", r.seed));
                        artifacts.write(&path, &r.events_to_csv())?;
                    }
                }
            }
            artifacts.write(&dir.join("summary.json"), &summary_json)?;
            artifacts.emit(Some(&dir.join("manifest.json")))
        }
        None => {
            artifacts.record_stdout(&summary_json);
            artifacts.emit(None)
        }
    }
}

// ---------------------------------------------------------------------------
// attack

#[derive(Serialize)]
struct AttackSummary {
    channel: String,
    runs: usize,
    channel_absent: bool,
    profitable_runs: usize,
    net_pnl_total: f64,
    net_pnl_mean: f64,
    differential_pnl_mean: Option<f64>,
    counterparty_losses_total: f64,
    pool_drawdown_total: f64,
    uncovered_bad_debt_total: f64,
    preempted_positions: u64,
    forced_close_volume: f64,
    pool_funded_share_mean: Option<f64>,
}

fn mean_of_present(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    if present.is_empty() {
        None
    } else {
        Some(present.iter().sum::<f64>() / present.len() as f64)
    }
}

fn summarize_attacks(outcomes: &[AttackOutcome]) -> AttackSummary {
    let reports: Vec<_> = outcomes.iter().map(|o| &o.attack).collect();
    let n = reports.len();
    AttackSummary {
        channel: reports[0].channel.slug().to_string(),
        runs: n,
        channel_absent: reports.iter().all(|r| r.channel_absent),
        profitable_runs: reports.iter().filter(|r| r.profitable).count(),
        net_pnl_total: reports.iter().map(|r| r.net_pnl).sum(),
        net_pnl_mean: reports.iter().map(|r| r.net_pnl).sum::<f64>() / n as f64,
        differential_pnl_mean: mean_of_present(reports.iter().map(|r| r.differential_pnl)),
        counterparty_losses_total: reports.iter().map(|r| r.counterparty_losses).sum(),
        pool_drawdown_total: reports.iter().map(|r| r.pool_drawdown).sum(),
        uncovered_bad_debt_total: reports.iter().map(|r| r.uncovered_bad_debt).sum(),
        preempted_positions: reports.iter().map(|r| u64::from(r.preempted_positions)).sum(),
        forced_close_volume: reports.iter().map(|r| r.forced_close_volume).sum(),
        pool_funded_share_mean: mean_of_present(reports.iter().map(|r| r.pool_funded_share)),
    }
}

fn cmd_attack(
    config_path: &Path,
    seed: u64,
    reps: u32,
    out: Option<&Path>,
    engine: Option<EngineArg>,
    halt_ticks: Option<u32>,
) -> Result<(), CliError> {
    if reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".to_string()));
    }
    let mut cfg = config::parse_attack_config(&read(config_path)?).map_err(input)?;
    {
        let (spec, eng) = match &mut cfg {
            AttackConfig::Preemption(c) => (&mut c.spec, &mut c.engine),
            AttackConfig::HaltArbitrage(c) => (&mut c.spec, &mut c.engine),
            AttackConfig::BadDebt(c) => (&mut c.spec, &mut c.engine),
        };
        if let Some(halt) = halt_ticks {
            *spec = override_halt(spec, halt)?;
        }
        if let Some(choice) = engine {
            *eng = override_engine(eng.clone(), choice);
        }
    }

    let seeds: Vec<u64> = (0..u64::from(reps)).map(|i| seed.wrapping_add(i)).collect();
    let outcomes = seeds
        .par_iter()
        .map(|&s| -> Result<AttackOutcome, CliError> {
            let outcome = match &cfg {
                AttackConfig::Preemption(c) => run_preemption_attack(c, s),
                AttackConfig::HaltArbitrage(c) => run_halt_arbitrage(c, s),
                AttackConfig::BadDebt(c) => run_bad_debt_shift(c, s),
            }?;
            Ok(outcome)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summary = summarize_attacks(&outcomes);
    let summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    print!("{summary_json}");

    let mut artifacts = Artifacts::new("attack", Some(config_path));
    artifacts.seeds = seeds;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for o in &outcomes {
                let path = dir.join(format!("attack-{:06}.json", o.attack.seed));
                let json = serde_json::to_string_pretty(o).expect("outcome serializes") + "\n";
                artifacts.write(&path, &json)?;
            }
            artifacts.write(&dir.join("summary.json"), &summary_json)?;
            artifacts.emit(Some(&dir.join("manifest.json")))
        }
        None => {
            artifacts.record_stdout(&summary_json);
            artifacts.emit(None)
        }
    }
}

// ---------------------------------------------------------------------------
// matrix

fn cmd_matrix(out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let payload = match format {
        Format::Csv => matrix::to_csv(),
        Format::Json => {
            serde_json::to_string_pretty(matrix::CHANNEL_CONTROL_MATRIX.as_slice())
                .expect("matrix serializes")
                + "\n"
        }
    };
    let mut artifacts = Artifacts::new("matrix", None);
    match out {
        Some(path) => {
            artifacts.write(path, &payload)?;
            artifacts.emit(Some(&manifest_sibling(path)))
        }
        None => {
            print!("{payload}");
            artifacts.record_stdout(&payload);
            artifacts.emit(None)
        }
    }
}
