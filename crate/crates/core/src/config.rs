//! Plain-text configuration files: threshold scenario decks and simulation /
//! attack run setups. The dialect is line-oriented — `[section name]`
//! headers, `key = value` entries, `#` comments — and every parse error
//! carries its line number.

use crate::adversary::{BadDebtConfig, HaltArbConfig, OutcomeDraw, PreemptionConfig};
use crate::costbenefit::SweepAxes;
use crate::types::{validate_scenario, ManipulationScenario, RawScenario, ValidationError};
use crate::venue::{
    AgentSpec, DepthBucket, DepthLadder, EngineConfig, EngineKind, EventClass, MarketSpec,
    Outcome, PoolInit, Side, VenueParams,
};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("section [{section}]: {msg}")]
    Section { section: String, msg: String },
    #[error(transparent)]
    Scenario(#[from] ValidationError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        msg: msg.into(),
    }
}

fn section_err(section: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Section {
        section: section.to_string(),
        msg: msg.into(),
    }
}

/// One `[header]` block with its `key = value` entries.
#[derive(Debug, Clone)]
struct Section {
    header: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    /// First word of the header, e.g. `scenario` in `[scenario A]`.
    fn kind(&self) -> &str {
        self.header.split_whitespace().next().unwrap_or("")
    }

    /// Remainder of the header after the kind.
    fn name(&self) -> &str {
        self.header[self.kind().len()..].trim()
    }

    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn require(&self, key: &str) -> Result<(&str, usize), ConfigError> {
        self.get(key)
            .ok_or_else(|| section_err(&self.header, format!("missing key `{key}`")))
    }

    fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let (v, l) = self.require(key)?;
        v.parse::<f64>()
            .map_err(|_| parse_err(l, format!("`{key}` is not a number: `{v}`")))
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, l)) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| parse_err(l, format!("`{key}` is not a number: `{v}`"))),
        }
    }

    fn u32(&self, key: &str) -> Result<u32, ConfigError> {
        let (v, l) = self.require(key)?;
        v.parse::<u32>()
            .map_err(|_| parse_err(l, format!("`{key}` is not a whole number: `{v}`")))
    }

    fn u32_opt(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, l)) => v
                .parse::<u32>()
                .map(Some)
                .map_err(|_| parse_err(l, format!("`{key}` is not a whole number: `{v}`"))),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some((v, l)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| parse_err(l, format!("`{key}` has a non-number: `{s}`")))
                })
                .collect(),
        }
    }

    /// Errors on any key outside the allowed set, with its line number.
    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for (k, _, l) in &self.entries {
            if !allowed.contains(k.as_str()) {
                return Err(parse_err(*l, format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

/// Splits a file into sections. Keys before any header, duplicate keys in a
/// section, and malformed lines are errors.
fn parse_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unclosed section header"))?
                .trim();
            if header.is_empty() {
                return Err(parse_err(line_no, "empty section header"));
            }
            sections.push(Section {
                header: header.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(line_no, format!("expected `key = value`, got `{line}`")));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(parse_err(line_no, "empty key"));
        }
        let Some(section) = sections.last_mut() else {
            return Err(parse_err(line_no, "key appears before any [section] header"));
        };
        if section.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(parse_err(line_no, format!("duplicate key `{key}`")));
        }
        section.entries.push((key, value, line_no));
    }
    Ok(sections)
}

/// One scenario from a deck, with any sweep axes declared alongside it.
#[derive(Debug, Clone)]
pub struct ScenarioEntry {
    pub scenario: ManipulationScenario,
    pub axes: SweepAxes,
}

impl ScenarioEntry {
    pub fn has_axes(&self) -> bool {
        !(self.axes.k_manip.is_empty()
            && self.axes.p_detected.is_empty()
            && self.axes.penalty_factor.is_empty())
    }
}

/// A deck entry before value validation, with the line its section starts on.
/// Lets a caller validate row by row and keep the good rows when one is bad.
#[derive(Debug, Clone)]
pub struct RawScenarioEntry {
    pub raw: RawScenario,
    pub axes: SweepAxes,
    pub line: usize,
}

/// Parses a scenario deck without validating values: one `[scenario <label>]`
/// section per entry. Structural problems (bad syntax, unknown keys,
/// non-numeric values) still fail the whole file.
pub fn parse_raw_scenarios(text: &str) -> Result<Vec<RawScenarioEntry>, ConfigError> {
    let sections = parse_sections(text)?;
    if sections.is_empty() {
        return Err(parse_err(1, "no [scenario ...] sections found"));
    }
    let mut entries = Vec::new();
    for s in &sections {
        if s.kind() != "scenario" {
            return Err(parse_err(
                s.line,
                format!("expected a [scenario ...] section, got [{}]", s.header),
            ));
        }
        if s.name().is_empty() {
            return Err(parse_err(s.line, "scenario needs a label: [scenario A]"));
        }
        s.reject_unknown(&[
            "k_manip",
            "capital",
            "pi_yes",
            "p_detected",
            "penalty_factor",
            "leverage",
            "k_axis",
            "p_detected_axis",
            "penalty_axis",
        ])?;
        let raw = RawScenario {
            label: s.name().to_string(),
            k_manip: s.f64("k_manip")?,
            capital: s.f64("capital")?,
            pi_yes: s.f64("pi_yes")?,
            p_detected: s.f64("p_detected")?,
            penalty_factor: s.f64("penalty_factor")?,
            leverage: s.f64_opt("leverage")?,
        };
        let axes = SweepAxes {
            k_manip: s.f64_list("k_axis")?,
            p_detected: s.f64_list("p_detected_axis")?,
            penalty_factor: s.f64_list("penalty_axis")?,
        };
        entries.push(RawScenarioEntry {
            raw,
            axes,
            line: s.line,
        });
    }
    Ok(entries)
}

/// Parses a scenario deck and validates every entry; the first invalid entry
/// fails the file.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioEntry>, ConfigError> {
    let mut entries = Vec::new();
    for e in parse_raw_scenarios(text)? {
        entries.push(ScenarioEntry {
            scenario: validate_scenario(&e.raw)?,
            axes: e.axes,
        });
    }
    Ok(entries)
}

/// A fully assembled simulation run: market, margin engine, book, pool,
/// venue tunables, path parameters, and the agent roster.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: MarketSpec,
    pub engine: EngineConfig,
    pub ladder: DepthLadder,
    pub pool: PoolInit,
    pub params: VenueParams,
    pub volatility: f64,
    pub start_index: f64,
    pub roster: Vec<AgentSpec>,
}

fn parse_side(v: &str, line: usize) -> Result<Side, ConfigError> {
    match v {
        "long" => Ok(Side::Long),
        "short" => Ok(Side::Short),
        _ => Err(parse_err(line, format!("side must be long|short, got `{v}`"))),
    }
}

fn parse_outcome(v: &str, line: usize) -> Result<Outcome, ConfigError> {
    match v {
        "yes" => Ok(Outcome::Yes),
        "no" => Ok(Outcome::No),
        _ => Err(parse_err(line, format!("outcome must be yes|no, got `{v}`"))),
    }
}

fn parse_event_class(v: &str, line: usize) -> Result<EventClass, ConfigError> {
    match v {
        "sports" => Ok(EventClass::Sports),
        "politics" => Ok(EventClass::Politics),
        "crypto" => Ok(EventClass::Crypto),
        "macro" => Ok(EventClass::Macro),
        "other" => Ok(EventClass::Other),
        _ => Err(parse_err(
            line,
            format!("event_class must be sports|politics|crypto|macro|other, got `{v}`"),
        )),
    }
}

fn build_market(s: &Section) -> Result<(MarketSpec, f64, f64), ConfigError> {
    s.reject_unknown(&[
        "resolution_tick",
        "halt_ticks",
        "outcome",
        "event_class",
        "terminal_jump_reference",
        "volatility",
        "start_index",
    ])?;
    let (ov, ol) = s.require("outcome")?;
    let outcome = parse_outcome(ov, ol)?;
    let event_class = match s.get("event_class") {
        Some((v, l)) => parse_event_class(v, l)?,
        None => EventClass::Other,
    };
    let spec = MarketSpec::new(
        s.u32("resolution_tick")?,
        s.u32_opt("halt_ticks")?.unwrap_or(0),
        outcome,
        s.f64_opt("terminal_jump_reference")?.unwrap_or(0.5),
        event_class,
    )
    .map_err(|e| section_err(&s.header, e.to_string()))?;
    let volatility = s.f64("volatility")?;
    let start_index = s.f64_opt("start_index")?.unwrap_or(0.5);
    Ok((spec, volatility, start_index))
}

fn build_engine(s: &Section) -> Result<EngineConfig, ConfigError> {
    s.reject_unknown(&[
        "kind", "m0", "alpha", "beta", "gamma", "vol_window", "vol_ref", "ttr_ref",
    ])?;
    let (kind, kl) = s.require("kind")?;
    let m0 = s.f64("m0")?;
    let mut engine = match kind {
        "e0" => EngineConfig::static_e0(m0),
        "e2" => EngineConfig::dynamic_e2(m0),
        _ => return Err(parse_err(kl, format!("kind must be e0|e2, got `{kind}`"))),
    };
    if engine.kind == EngineKind::StaticE0 {
        for key in ["alpha", "beta", "gamma", "vol_window", "vol_ref", "ttr_ref"] {
            if let Some((_, l)) = s.get(key) {
                return Err(parse_err(l, format!("`{key}` only applies to kind = e2")));
            }
        }
        return Ok(engine);
    }
    if let Some(v) = s.f64_opt("alpha")? {
        engine.alpha = v;
    }
    if let Some(v) = s.f64_opt("beta")? {
        engine.beta = v;
    }
    if let Some(v) = s.f64_opt("gamma")? {
        engine.gamma = v;
    }
    if let Some(v) = s.u32_opt("vol_window")? {
        engine.vol_window = v as usize;
    }
    if let Some(v) = s.f64_opt("vol_ref")? {
        engine.vol_ref = v;
    }
    if let Some(v) = s.u32_opt("ttr_ref")? {
        engine.ttr_ref = v;
    }
    engine
        .validate()
        .map_err(|e| section_err(&s.header, e.to_string()))?;
    Ok(engine)
}

fn build_ladder(s: &Section) -> Result<DepthLadder, ConfigError> {
    s.reject_unknown(&["buckets", "boundary_depth_ratio", "boundary_band"])?;
    let (v, l) = s.require("buckets")?;
    let mut buckets = Vec::new();
    for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((w, d)) = part.split_once(':') else {
            return Err(parse_err(
                l,
                format!("bucket must be width_bps:depth, got `{part}`"),
            ));
        };
        let width_bps = w
            .trim()
            .parse::<u32>()
            .map_err(|_| parse_err(l, format!("bucket width is not a whole number: `{w}`")))?;
        let depth = d
            .trim()
            .parse::<f64>()
            .map_err(|_| parse_err(l, format!("bucket depth is not a number: `{d}`")))?;
        buckets.push(DepthBucket { width_bps, depth });
    }
    DepthLadder::new(
        buckets,
        s.f64_opt("boundary_depth_ratio")?.unwrap_or(1.7),
        s.f64_opt("boundary_band")?.unwrap_or(0.1),
    )
    .map_err(|e| section_err(&s.header, e.to_string()))
}

fn build_pool(s: &Section) -> Result<PoolInit, ConfigError> {
    s.reject_unknown(&["fraction_of_open_notional", "balance"])?;
    let frac = s.f64_opt("fraction_of_open_notional")?;
    let bal = s.f64_opt("balance")?;
    match (frac, bal) {
        (Some(f), None) => Ok(PoolInit::FractionOfOpenNotional(f)),
        (None, Some(b)) => Ok(PoolInit::Balance(b)),
        (None, None) => Ok(PoolInit::default()),
        (Some(_), Some(_)) => Err(section_err(
            &s.header,
            "give fraction_of_open_notional or balance, not both",
        )),
    }
}

fn build_params(s: &Section) -> Result<VenueParams, ConfigError> {
    s.reject_unknown(&["spoof_kappa", "final_window_ticks"])?;
    let mut params = VenueParams::default();
    if let Some(v) = s.f64_opt("spoof_kappa")? {
        params.spoof_kappa = v;
    }
    params.final_window_ticks = s.u32_opt("final_window_ticks")?;
    Ok(params)
}

fn build_roster_entry(s: &Section) -> Result<AgentSpec, ConfigError> {
    let name = s.name().to_string();
    if name.is_empty() {
        return Err(parse_err(s.line, "agent sections need a name"));
    }
    match s.kind() {
        "position" => {
            s.reject_unknown(&["side", "notional", "leverage", "open_tick"])?;
            let (sv, sl) = s.require("side")?;
            Ok(AgentSpec::Position {
                name,
                side: parse_side(sv, sl)?,
                notional: s.f64("notional")?,
                leverage: s.f64("leverage")?,
                open_tick: s.u32_opt("open_tick")?.unwrap_or(0),
            })
        }
        "noise" => {
            s.reject_unknown(&["order_size", "prob", "bias"])?;
            Ok(AgentSpec::Noise {
                name,
                order_size: s.f64("order_size")?,
                prob: s.f64("prob")?,
                bias: s.f64_opt("bias")?.unwrap_or(0.0),
            })
        }
        "vol-injector" => {
            s.reject_unknown(&["size", "start_tick", "end_tick"])?;
            Ok(AgentSpec::VolInjector {
                name,
                size: s.f64("size")?,
                start_tick: s.u32("start_tick")?,
                end_tick: s.u32("end_tick")?,
            })
        }
        other => Err(parse_err(
            s.line,
            format!("unknown roster section kind `{other}`"),
        )),
    }
}

/// Parses a simulation run file: `[market]`, `[engine]`, `[ladder]` plus
/// optional `[pool]`, `[venue]`, and roster sections (`[position NAME]`,
/// `[noise NAME]`, `[vol-injector NAME]`).
pub fn parse_run_config(text: &str) -> Result<RunConfig, ConfigError> {
    let sections = parse_sections(text)?;
    let mut market = None;
    let mut engine = None;
    let mut ladder = None;
    let mut pool = PoolInit::default();
    let mut params = VenueParams::default();
    let mut roster = Vec::new();
    for s in &sections {
        match s.kind() {
            "market" => market = Some(build_market(s)?),
            "engine" => engine = Some(build_engine(s)?),
            "ladder" => ladder = Some(build_ladder(s)?),
            "pool" => pool = build_pool(s)?,
            "venue" => params = build_params(s)?,
            "position" | "noise" | "vol-injector" => roster.push(build_roster_entry(s)?),
            "attack" => {
                return Err(parse_err(
                    s.line,
                    "[attack] belongs in an attack file, not a simulation run",
                ))
            }
            other => return Err(parse_err(s.line, format!("unknown section `{other}`"))),
        }
    }
    let (spec, volatility, start_index) =
        market.ok_or_else(|| section_err("market", "section is required"))?;
    let engine = engine.ok_or_else(|| section_err("engine", "section is required"))?;
    let ladder = ladder.ok_or_else(|| section_err("ladder", "section is required"))?;
    Ok(RunConfig {
        spec,
        engine,
        ladder,
        pool,
        params,
        volatility,
        start_index,
        roster,
    })
}

/// A parsed attack file: shared venue setup plus the channel block.
#[derive(Debug, Clone)]
pub enum AttackConfig {
    Preemption(PreemptionConfig),
    HaltArbitrage(HaltArbConfig),
    BadDebt(BadDebtConfig),
}

/// Parses an attack file: the same venue sections as a run file (roster
/// sections are not allowed — attacks script their own agents) plus one
/// `[attack]` section selecting and parameterizing the channel.
pub fn parse_attack_config(text: &str) -> Result<AttackConfig, ConfigError> {
    let sections = parse_sections(text)?;
    let mut market = None;
    let mut engine = None;
    let mut ladder = None;
    let mut pool = PoolInit::default();
    let mut params = VenueParams::default();
    let mut attack = None;
    for s in &sections {
        match s.kind() {
            "market" => market = Some(build_market(s)?),
            "engine" => engine = Some(build_engine(s)?),
            "ladder" => ladder = Some(build_ladder(s)?),
            "pool" => pool = build_pool(s)?,
            "venue" => params = build_params(s)?,
            "attack" => attack = Some(s),
            other => {
                return Err(parse_err(
                    s.line,
                    format!("unknown section `{other}` in an attack file"),
                ))
            }
        }
    }
    let (spec, volatility, start_index) =
        market.ok_or_else(|| section_err("market", "section is required"))?;
    let engine = engine.ok_or_else(|| section_err("engine", "section is required"))?;
    let ladder = ladder.ok_or_else(|| section_err("ladder", "section is required"))?;
    let s = attack.ok_or_else(|| section_err("attack", "section is required"))?;
    let (channel, cl) = s.require("channel")?;
    match channel {
        "pre-emption" => {
            s.reject_unknown(&[
                "channel",
                "victims",
                "victim_notional",
                "victim_leverage",
                "injection_size",
                "injection_start",
                "injection_end",
            ])?;
            Ok(AttackConfig::Preemption(PreemptionConfig {
                spec,
                engine,
                ladder,
                volatility,
                start_index,
                victims: s.u32("victims")?,
                victim_notional: s.f64("victim_notional")?,
                victim_leverage: s.f64("victim_leverage")?,
                injection_size: s.f64("injection_size")?,
                injection_start: s.u32("injection_start")?,
                injection_end: s.u32("injection_end")?,
                pool,
                params,
            }))
        }
        "halt-arbitrage" => {
            s.reject_unknown(&[
                "channel",
                "position_side",
                "position_notional",
                "position_leverage",
                "push_budget",
                "push_window",
            ])?;
            let (sv, sl) = s.require("position_side")?;
            Ok(AttackConfig::HaltArbitrage(HaltArbConfig {
                spec,
                engine,
                ladder,
                volatility,
                start_index,
                position_side: parse_side(sv, sl)?,
                position_notional: s.f64("position_notional")?,
                position_leverage: s.f64("position_leverage")?,
                push_budget: s.f64("push_budget")?,
                push_window: s.u32("push_window")?,
                pool,
                params,
            }))
        }
        "bad-debt-shifting" => {
            s.reject_unknown(&[
                "channel",
                "believed_yes",
                "outcome_draw",
                "notional",
                "manipulator_leverage",
                "counterparty_leverage",
            ])?;
            let outcome_draw = match s.get("outcome_draw") {
                None | Some(("fixed", _)) => OutcomeDraw::Fixed,
                Some(("from-belief", _)) => OutcomeDraw::FromBelief,
                Some((v, l)) => {
                    return Err(parse_err(
                        l,
                        format!("outcome_draw must be fixed|from-belief, got `{v}`"),
                    ))
                }
            };
            Ok(AttackConfig::BadDebt(BadDebtConfig {
                spec,
                engine,
                ladder,
                volatility,
                start_index,
                believed_yes: s.f64("believed_yes")?,
                outcome_draw,
                notional: s.f64("notional")?,
                manipulator_leverage: s.f64("manipulator_leverage")?,
                counterparty_leverage: s.f64("counterparty_leverage")?,
                pool,
                params,
            }))
        }
        other => Err(parse_err(
            cl,
            format!(
                "channel must be pre-emption|halt-arbitrage|bad-debt-shifting, got `{other}`"
            ),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DECK: &str = "\
# exploratory deck
[scenario A]
k_manip = 10000          # fixed cost of the play
capital = 100000
pi_yes = 0.45
p_detected = 0.2
penalty_factor = 3
leverage = 10

[scenario B]
k_manip = 50000
capital = 100000
pi_yes = 0.40
p_detected = 0.35
penalty_factor = 20
k_axis = 10000, 50000, 100000
p_detected_axis = 0.1, 0.35
penalty_axis = 5, 20
";

    #[test]
    fn scenario_deck_round_trips() {
        let entries = parse_scenarios(DECK).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].scenario.label, "A");
        assert_eq!(entries[0].scenario.k_manip.value(), 10_000.0);
        assert_eq!(entries[0].scenario.leverage.unwrap().value(), 10.0);
        assert!(!entries[0].has_axes());
        assert!(entries[1].has_axes());
        assert_eq!(entries[1].axes.k_manip.len(), 3);
        assert_eq!(entries[1].axes.penalty_factor, vec![5.0, 20.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "[scenario A]\nk_manip = ten\n";
        match parse_scenarios(bad) {
            Err(ConfigError::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("k_manip"));
            }
            other => panic!("expected a line-tagged parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = "[scenario A]\nk_manip = 1\ncapital = 2\npi_yes = 0.5\n\
p_detected = 0.1\npenalty_factor = 1\ntypo_key = 3\n";
        match parse_scenarios(bad) {
            Err(ConfigError::Parse { line, msg }) => {
                assert_eq!(line, 7);
                assert!(msg.contains("typo_key"));
            }
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_orphan_keys_are_rejected() {
        let dup = "[scenario A]\nk_manip = 1\nk_manip = 2\n";
        assert!(matches!(
            parse_scenarios(dup),
            Err(ConfigError::Parse { line: 3, .. })
        ));
        let orphan = "k_manip = 1\n";
        assert!(matches!(
            parse_scenarios(orphan),
            Err(ConfigError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn invalid_scenario_values_fail_validation() {
        let bad = "[scenario A]\nk_manip = 1\ncapital = 2\npi_yes = 1.5\n\
p_detected = 0.1\npenalty_factor = 1\n";
        assert!(matches!(
            parse_scenarios(bad),
            Err(ConfigError::Scenario(_))
        ));
    }

    const RUN: &str = "\
[market]
resolution_tick = 60
halt_ticks = 5
outcome = yes
event_class = politics
volatility = 0.01

[engine]
kind = e2
m0 = 0.05
alpha = 1.0
vol_ref = 0.002

[ladder]
buckets = 50:100, 150:500, 300:5000

[pool]
fraction_of_open_notional = 0.1

[venue]
spoof_kappa = 0.1

[position alice]
side = long
notional = 1000
leverage = 8

[noise churn-1]
order_size = 40
prob = 0.7

[vol-injector pump]
size = 200
start_tick = 10
end_tick = 30
";

    #[test]
    fn run_config_assembles_all_sections() {
        let cfg = parse_run_config(RUN).unwrap();
        assert_eq!(cfg.spec.resolution_tick, 60);
        assert_eq!(cfg.spec.halt_ticks, 5);
        assert_eq!(cfg.engine.kind, EngineKind::DynamicE2);
        assert_eq!(cfg.engine.vol_ref, 0.002);
        assert_eq!(cfg.roster.len(), 3);
        assert_eq!(cfg.roster[0].name(), "alice");
        assert!(matches!(cfg.roster[2], AgentSpec::VolInjector { .. }));
        assert_eq!(cfg.volatility, 0.01);
        assert_eq!(cfg.start_index, 0.5);
    }

    #[test]
    fn missing_required_section_is_an_error() {
        let no_engine = "[market]\nresolution_tick = 10\noutcome = no\nvolatility = 0\n\
[ladder]\nbuckets = 50:100\n";
        match parse_run_config(no_engine) {
            Err(ConfigError::Section { section, .. }) => assert_eq!(section, "engine"),
            other => panic!("expected missing-engine error, got {other:?}"),
        }
    }

    #[test]
    fn e0_engine_rejects_dynamic_knobs() {
        let bad = "[engine]\nkind = e0\nm0 = 0.05\nalpha = 1.0\n";
        let sections = parse_sections(bad).unwrap();
        match build_engine(&sections[0]) {
            Err(ConfigError::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("alpha"));
            }
            other => panic!("expected alpha rejection, got {other:?}"),
        }
    }

    const ATTACK: &str = "\
[market]
resolution_tick = 80
halt_ticks = 6
outcome = no
volatility = 0.005

[engine]
kind = e0
m0 = 0.05

[ladder]
buckets = 50:100, 150:500, 300:5000

[attack]
channel = halt-arbitrage
position_side = long
position_notional = 2000
position_leverage = 4
push_budget = 25
push_window = 3
";

    #[test]
    fn attack_config_selects_the_channel() {
        match parse_attack_config(ATTACK).unwrap() {
            AttackConfig::HaltArbitrage(cfg) => {
                assert_eq!(cfg.spec.halt_ticks, 6);
                assert_eq!(cfg.push_window, 3);
                assert_eq!(cfg.position_side, Side::Long);
            }
            other => panic!("expected halt-arbitrage, got {other:?}"),
        }
    }

    #[test]
    fn attack_file_rejects_roster_sections() {
        let bad = format!("{ATTACK}\n[position bob]\nside = long\nnotional = 1\nleverage = 2\n");
        assert!(matches!(
            parse_attack_config(&bad),
            Err(ConfigError::Parse { .. })
        ));
    }
}
