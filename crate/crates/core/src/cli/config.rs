//! Line-oriented `key = value` run configuration with `[section]` headers.
//!
//! ```text
//! [run]
//! seed = 7
//!
//! [far-field]
//! command = dyadic-sweep
//! n = 3
//! q = 4
//! R = 2^3..2^9
//! ```
//!
//! `[run]` holds global settings; every other section is one experiment, run in
//! document order and identified by its section name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::dyadic::{Dyadic, DyadicRange};
use crate::error::{Error, Result};
use crate::extension::Term;
use crate::profile::{ProfileShape, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    BesselCheck,
    ExtensionEval,
    DyadicSweep,
    Schur,
    LorentzCheck,
    HyCheck,
    WeightedBessel,
    Band,
    GlobalCheck,
    Report,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::BesselCheck,
        Command::ExtensionEval,
        Command::DyadicSweep,
        Command::Schur,
        Command::LorentzCheck,
        Command::HyCheck,
        Command::WeightedBessel,
        Command::Band,
        Command::GlobalCheck,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::BesselCheck => "bessel-check",
            Command::ExtensionEval => "extension-eval",
            Command::DyadicSweep => "dyadic-sweep",
            Command::Schur => "schur",
            Command::LorentzCheck => "lorentz-check",
            Command::HyCheck => "hy-check",
            Command::WeightedBessel => "weighted-bessel",
            Command::Band => "band",
            Command::GlobalCheck => "global-check",
            Command::Report => "report",
        }
    }

    /// Keys accepted besides `command`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::BesselCheck => &["n", "R", "tolerance"],
            Command::ExtensionEval => &["n", "profile", "t", "r", "tolerance"],
            Command::DyadicSweep => &[
                "n",
                "p",
                "q",
                "R",
                "profile",
                "term",
                "expected_slope",
                "tolerance",
                "mode",
                "truncation_tol",
                "radial_rel_tol",
            ],
            Command::Schur => &["n", "p", "q", "range", "expect"],
            Command::LorentzCheck => &["p", "q", "p2", "q2", "trials", "pieces", "tolerance"],
            Command::HyCheck => &["p", "trials", "count", "recorded_max"],
            Command::WeightedBessel => &["n", "q", "s", "r_max", "scale", "tolerance", "expect"],
            Command::Band => &[
                "n",
                "p",
                "q",
                "delta",
                "expected_slope",
                "tolerance",
                "cutoff_margin",
            ],
            Command::GlobalCheck => &["n", "p", "q", "M", "mass_decay", "bound"],
            Command::Report => &["input"],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Command::BesselCheck | Command::ExtensionEval => &["n"],
            Command::DyadicSweep => &["n", "q", "R"],
            Command::Schur | Command::WeightedBessel => &["n", "q"],
            Command::Band => &["n", "q", "delta"],
            Command::GlobalCheck => &["n", "q"],
            Command::LorentzCheck | Command::HyCheck => &["p"],
            Command::Report => &["input"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

/// Radial profile named in a config; all live on `[1, 2]` except bands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileSpec {
    Constant,
    Power(f64),
    Bump,
    Band(f64),
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match *self {
            ProfileSpec::Constant => Ok(RadialProfile::unit_constant()),
            ProfileSpec::Power(k) => RadialProfile::new(ProfileShape::Power(k), (1.0, 2.0)),
            ProfileSpec::Bump => RadialProfile::new(ProfileShape::SmoothBump, (1.0, 2.0)),
            ProfileSpec::Band(d) => RadialProfile::band_indicator(d),
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> std::result::Result<f64, String> {
            a.ok_or_else(|| format!("profile '{name}' needs a parameter, e.g. {name}:2"))?
                .parse::<f64>()
                .map_err(|e| format!("bad profile parameter: {e}"))
        };
        match name {
            "constant" if arg.is_none() => Ok(ProfileSpec::Constant),
            "bump" if arg.is_none() => Ok(ProfileSpec::Bump),
            "power" => Ok(ProfileSpec::Power(number(arg)?)),
            "band" => Ok(ProfileSpec::Band(number(arg)?)),
            _ => Err(format!(
                "unknown profile '{s}' (constant, power:k, bump, band:delta)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeMode {
    /// `|slope - expected| <= tolerance`.
    TwoSided,
    /// `slope <= expected + tolerance`.
    Upper,
}

impl FromStr for SlopeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "two-sided" => Ok(SlopeMode::TwoSided),
            "upper" => Ok(SlopeMode::Upper),
            _ => Err(format!("unknown mode '{s}' (two-sided, upper)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Convergent,
    Divergent,
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "convergent" => Ok(Expectation::Convergent),
            "divergent" => Ok(Expectation::Divergent),
            _ => Err(format!("unknown expectation '{s}' (convergent, divergent)")),
        }
    }
}

/// One experiment section. Keys that a command does not use stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub command: Command,
    pub line: usize,
    /// Raw entries, echoed into the summary.
    pub params: BTreeMap<String, String>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub p2: Option<f64>,
    pub q2: Option<f64>,
    pub r_range: Option<DyadicRange>,
    pub m_levels: Option<Vec<Dyadic>>,
    pub delta_range: Option<DyadicRange>,
    pub profile: ProfileSpec,
    pub term: Term,
    pub mode: Option<SlopeMode>,
    pub expect: Option<Expectation>,
    pub expected_slope: Option<f64>,
    pub tolerance: Option<f64>,
    pub truncation_tol: Option<f64>,
    pub radial_rel_tol: Option<f64>,
    pub trials: Option<usize>,
    pub pieces: Option<usize>,
    pub count: Option<usize>,
    pub range: Option<u32>,
    pub s: Option<f64>,
    pub r_max: Option<f64>,
    pub scale: Option<f64>,
    pub t: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub mass_decay: Option<f64>,
    pub bound: Option<f64>,
    pub recorded_max: Option<f64>,
    pub cutoff_margin: Option<i32>,
    pub input: Option<PathBuf>,
}

impl ExperimentConfig {
    fn empty(id: String, command: Command, line: usize) -> Self {
        Self {
            id,
            command,
            line,
            params: BTreeMap::new(),
            n: None,
            p: None,
            q: None,
            p2: None,
            q2: None,
            r_range: None,
            m_levels: None,
            delta_range: None,
            profile: ProfileSpec::Constant,
            term: Term::Full,
            mode: None,
            expect: None,
            expected_slope: None,
            tolerance: None,
            truncation_tol: None,
            radial_rel_tol: None,
            trials: None,
            pieces: None,
            count: None,
            range: None,
            s: None,
            r_max: None,
            scale: None,
            t: None,
            radii: None,
            mass_decay: None,
            bound: None,
            recorded_max: None,
            cutoff_margin: None,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: Option<usize>,
    pub experiments: Vec<ExperimentConfig>,
    /// Unknown keys skipped outside strict mode.
    pub warnings: Vec<String>,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Config {
        line,
        message: message.into(),
    })
}

/// `2^k`, `2^-k` or a plain number that is an exact power of two.
fn parse_dyadic(s: &str) -> std::result::Result<Dyadic, String> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        return exp
            .parse::<i32>()
            .map(Dyadic)
            .map_err(|_| format!("bad dyadic exponent in '{s}'"));
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    Dyadic::from_value(x).map_err(|_| format!("{s} is not dyadic"))
}

fn parse_dyadic_range(s: &str) -> std::result::Result<DyadicRange, String> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_dyadic(a)?, parse_dyadic(b)?),
        None => {
            let d = parse_dyadic(s)?;
            (d, d)
        }
    };
    DyadicRange::new(lo.0, hi.0).map_err(|e| e.to_string())
}

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|e| format!("bad list entry '{}': {e}", x.trim()))
        })
        .collect()
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number")),
    }
}

fn positive(x: f64) -> std::result::Result<f64, String> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{x} must be positive"))
    }
}

fn apply_key(
    exp: &mut ExperimentConfig,
    key: &str,
    value: &str,
) -> std::result::Result<(), String> {
    let int = |v: &str| {
        v.parse::<usize>()
            .map_err(|_| format!("'{v}' is not a nonnegative integer"))
    };
    match key {
        "n" => exp.n = Some(int(value)?),
        "p" => exp.p = Some(parse_number(value)?),
        "q" => exp.q = Some(parse_number(value)?),
        "p2" => exp.p2 = Some(parse_number(value)?),
        "q2" => exp.q2 = Some(parse_number(value)?),
        "R" => {
            exp.r_range =
                Some(parse_dyadic_range(value).map_err(|e| format!("R must be dyadic: {e}"))?);
        }
        "delta" => {
            let range =
                parse_dyadic_range(value).map_err(|e| format!("delta must be dyadic: {e}"))?;
            if range.hi > 0 {
                return Err("delta must not exceed 1".into());
            }
            exp.delta_range = Some(range);
        }
        "M" => {
            let ranges = value
                .split(',')
                .map(parse_dyadic_range)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| format!("M must be dyadic: {e}"))?;
            exp.m_levels = Some(ranges.iter().flat_map(|r| r.iter()).collect());
        }
        "profile" => exp.profile = value.parse()?,
        "term" => exp.term = value.parse().map_err(|e: Error| e.to_string())?,
        "mode" => exp.mode = Some(value.parse()?),
        "expect" => exp.expect = Some(value.parse()?),
        "expected_slope" => exp.expected_slope = Some(parse_number(value)?),
        "tolerance" => exp.tolerance = Some(positive(parse_number(value)?)?),
        "truncation_tol" => exp.truncation_tol = Some(positive(parse_number(value)?)?),
        "radial_rel_tol" => exp.radial_rel_tol = Some(positive(parse_number(value)?)?),
        "trials" => exp.trials = Some(int(value)?),
        "pieces" => exp.pieces = Some(int(value)?),
        "count" => exp.count = Some(int(value)?),
        "range" => {
            exp.range = Some(
                value
                    .parse()
                    .map_err(|_| format!("'{value}' is not a range length"))?,
            )
        }
        "s" => exp.s = Some(positive(parse_number(value)?)?),
        "r_max" => exp.r_max = Some(positive(parse_number(value)?)?),
        "scale" => exp.scale = Some(positive(parse_number(value)?)?),
        "t" => exp.t = Some(parse_number(value)?),
        "r" => exp.radii = Some(parse_list::<f64>(value)?),
        "mass_decay" => exp.mass_decay = Some(parse_number(value)?),
        "bound" => exp.bound = Some(positive(parse_number(value)?)?),
        "recorded_max" => exp.recorded_max = Some(positive(parse_number(value)?)?),
        "cutoff_margin" => {
            exp.cutoff_margin = Some(
                value
                    .parse()
                    .map_err(|_| format!("'{value}' is not an integer"))?,
            )
        }
        "input" => exp.input = Some(PathBuf::from(value)),
        _ => unreachable!("key table and parser disagree on '{key}'"),
    }
    Ok(())
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() || content.starts_with(';') {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(line, format!("unterminated section header '{content}'"));
            };
            let name = name.trim();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return err(line, format!("bad section name '{name}'"));
            }
            if sections.iter().any(|s| s.name == name) {
                return err(line, format!("duplicate section [{name}]"));
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(line, format!("expected 'key = value', found '{content}'"));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return err(line, format!("empty key or value in '{content}'"));
        }
        let Some(section) = sections.last_mut() else {
            return err(line, "key outside of any section");
        };
        if section.entries.iter().any(|e| e.0 == key) {
            return err(line, format!("duplicate key '{key}' in [{}]", section.name));
        }
        section
            .entries
            .push((key.to_string(), value.to_string(), line));
    }
    Ok(sections)
}

/// Parses and validates a configuration; in strict mode unknown keys are errors.
pub fn parse_config(text: &str, strict: bool) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    for section in split_sections(text)? {
        if section.name == "run" {
            for (key, value, line) in &section.entries {
                match key.as_str() {
                    "seed" => {
                        config.seed = value.parse().map_err(|_| Error::Config {
                            line: *line,
                            message: format!("seed '{value}' is not a nonnegative integer"),
                        })?
                    }
                    "workers" => match value.parse::<usize>() {
                        Ok(w) if w > 0 => config.workers = Some(w),
                        _ => {
                            return err(
                                *line,
                                format!("workers '{value}' must be a positive integer"),
                            )
                        }
                    },
                    _ if strict => return err(*line, format!("unknown key '{key}' in [run]")),
                    _ => config
                        .warnings
                        .push(format!("line {line}: ignored unknown key '{key}' in [run]")),
                }
            }
            continue;
        }
        let Some((_, command, cmd_line)) = section.entries.iter().find(|e| e.0 == "command") else {
            return err(
                section.line,
                format!("section [{}] has no command", section.name),
            );
        };
        let command: Command = command.parse().map_err(|m| Error::Config {
            line: *cmd_line,
            message: m,
        })?;
        let mut exp = ExperimentConfig::empty(section.name.clone(), command, section.line);
        for (key, value, line) in &section.entries {
            if key == "command" {
                continue;
            }
            if !command.keys().contains(&key.as_str()) {
                if strict {
                    return err(*line, format!("unknown key '{key}' for {command}"));
                }
                config.warnings.push(format!(
                    "line {line}: ignored unknown key '{key}' for {command}"
                ));
                continue;
            }
            apply_key(&mut exp, key, value).map_err(|m| Error::Config {
                line: *line,
                message: m,
            })?;
            exp.params.insert(key.clone(), value.clone());
        }
        for key in command.required() {
            if !exp.params.contains_key(*key) {
                return err(
                    section.line,
                    format!("[{}] is missing required key '{key}'", section.name),
                );
            }
        }
        validate(&exp)?;
        config.experiments.push(exp);
    }
    Ok(config)
}

fn validate(exp: &ExperimentConfig) -> Result<()> {
    let line = exp.line;
    if let Some(n) = exp.n {
        if n < 2 {
            return err(line, format!("[{}]: n = {n} must be at least 2", exp.id));
        }
    }
    if let Some(p) = exp.p {
        if !(p >= 1.0) {
            return err(line, format!("[{}]: p = {p} must be at least 1", exp.id));
        }
    }
    if let Some(q) = exp.q {
        if !(q > 0.0) {
            return err(line, format!("[{}]: q = {q} must be positive", exp.id));
        }
    }
    if exp.command == Command::DyadicSweep && exp.term != Term::Full {
        if let Some(r) = exp.r_range {
            if r.lo < 1 {
                return err(
                    line,
                    format!("[{}]: the {} term needs R >= 2", exp.id, exp.term),
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = "\
[run]
seed = 3

[far]  # far field
command = dyadic-sweep
n = 3
p = 2
q = 4
R = 2^3..2^9
profile = constant
";

    #[test]
    fn minimal_sweep() {
        let cfg = parse_config(SWEEP, true).unwrap();
        assert_eq!(cfg.seed, 3);
        let e = &cfg.experiments[0];
        assert_eq!(e.id, "far");
        assert_eq!(e.command, Command::DyadicSweep);
        assert_eq!(e.r_range, Some(DyadicRange { lo: 3, hi: 9 }));
        assert_eq!((e.n, e.p, e.q), (Some(3), Some(2.0), Some(4.0)));
        assert_eq!(e.profile, ProfileSpec::Constant);
    }

    #[test]
    fn non_dyadic_radius() {
        let text = SWEEP.replace("R = 2^3..2^9", "R = 3");
        let e = parse_config(&text, true).unwrap_err();
        assert!(e.to_string().contains("R must be dyadic"), "{e}");
        assert!(matches!(e, Error::Config { line: 9, .. }));
    }

    #[test]
    fn plain_dyadic_values() {
        let text = SWEEP.replace("R = 2^3..2^9", "R = 0.125..8");
        let cfg = parse_config(&text, true).unwrap();
        assert_eq!(
            cfg.experiments[0].r_range,
            Some(DyadicRange { lo: -3, hi: 3 })
        );
    }

    #[test]
    fn schur_at_critical_exponent_is_valid() {
        let cfg = parse_config("[s]\ncommand = schur\nn = 3\nq = 3\n", true).unwrap();
        assert_eq!(cfg.experiments[0].command, Command::Schur);
    }

    #[test]
    fn unknown_keys() {
        let text = SWEEP.replace("profile = constant", "profile = constant\ncolour = blue");
        let e = parse_config(&text, true).unwrap_err();
        assert!(matches!(e, Error::Config { line: 11, .. }), "{e}");
        let cfg = parse_config(&text, false).unwrap();
        assert_eq!(cfg.warnings.len(), 1);
    }

    #[test]
    fn structural_errors() {
        for (text, line) in [
            ("n = 3\n", 1),
            ("[a]\nn = 3\n", 1),
            ("[a]\ncommand = fly\n", 2),
            ("[a]\ncommand = schur\nn = 3\nn = 4\n", 4),
            ("[a]\ncommand = schur\n[a]\n", 3),
            ("[a\n", 1),
            ("[a]\njunk\n", 2),
            ("[a]\ncommand = schur\nn = 3\nq = 4\ntolerance = -1\n", 5),
            (
                "[a]\ncommand = dyadic-sweep\nn = 3\nq = 4\nR = 2^0..2^3\nterm = main\n",
                1,
            ),
        ] {
            match parse_config(text, true) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn empty_document() {
        let cfg = parse_config("# nothing\n\n[run]\n", true).unwrap();
        assert!(cfg.experiments.is_empty());
    }

    #[test]
    fn profiles_and_levels() {
        let cfg = parse_config(
            "[g]\ncommand = global-check\nn = 3\np = 2\nq = 4\nM = 2^0, 8\n\n[b]\ncommand = extension-eval\nn = 2\nprofile = power:1.5\nr = 1, 2.5\n",
            true,
        )
        .unwrap();
        assert_eq!(
            cfg.experiments[0].m_levels,
            Some(vec![Dyadic(0), Dyadic(3)])
        );
        assert_eq!(cfg.experiments[1].profile, ProfileSpec::Power(1.5));
        assert_eq!(cfg.experiments[1].radii, Some(vec![1.0, 2.5]));
        let cfg = parse_config(
            "[g]\ncommand = global-check\nn = 3\nq = 4\nM = 2^-1..2^1, 2^4\n",
            true,
        )
        .unwrap();
        assert_eq!(
            cfg.experiments[0].m_levels,
            Some(vec![Dyadic(-1), Dyadic(0), Dyadic(1), Dyadic(4)])
        );
    }
}
