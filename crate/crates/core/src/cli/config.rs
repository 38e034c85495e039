//! Run configuration: a flat TOML table whose exact scalars are written as
//! `"p/q"` strings (integers are also accepted).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gaudin::GaudinModel;
use crate::kp_verifier::FLOAT_TOLERANCE;
use crate::scalar::{format_rational, parse_rational, q, qi, rational_to_f64, Rational};
use crate::tensor::SectorLabel;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Text(String),
    Float(f64),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rank: Option<usize>,
    sites: Option<usize>,
    twist: Option<Vec<RawScalar>>,
    positions: Option<Vec<RawScalar>>,
    times: Option<usize>,
    degree: Option<usize>,
    samples: Option<usize>,
    points: Option<usize>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    spectrum_tolerance: Option<f64>,
    moment_tolerance: Option<f64>,
    checks: Option<Vec<String>>,
    sector: Option<Vec<usize>>,
    state: Option<usize>,
    window: Option<RawScalar>,
    steps: Option<usize>,
    out: Option<String>,
    float: Option<bool>,
    operators: Option<bool>,
}

/// A configuration problem, with the offending line when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Validated run parameters.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub model: GaudinModel,
    pub rank: usize,
    pub sites: usize,
    pub twist: Vec<String>,
    pub positions: Vec<String>,
    /// Number of explicit times `K`.
    pub times: usize,
    /// Schur truncation degree `D`.
    pub degree: usize,
    pub samples: usize,
    pub points: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub spectrum_tolerance: f64,
    pub moment_tolerance: f64,
    pub checks: Vec<String>,
    pub sector: Option<Vec<usize>>,
    pub state: usize,
    pub window: String,
    #[serde(skip)]
    pub window_value: f64,
    pub steps: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub float: bool,
    pub operators: bool,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: line_of(self.text, key), message: format!("{key}: {}", message.into()) }
    }

    fn scalar(&self, key: &str, v: &RawScalar) -> Result<Rational, ConfigError> {
        match v {
            RawScalar::Int(i) => Ok(qi(*i)),
            RawScalar::Text(s) => parse_rational(s).ok_or_else(|| self.error(key, format!("cannot parse {s:?} as p/q"))),
            RawScalar::Float(f) => Err(self.error(key, format!("{f} is a float; write exact values as \"p/q\""))),
        }
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64, ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(key, format!("tolerance must be positive, got {v}")))
        }
    }
}

impl RunConfig {
    /// `N = 2`, `n = 2`, `k = (2, -1)`, `x = (0, 1)`.
    pub fn default_model() -> Self {
        Self::parse("").expect("default configuration")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { line: None, message: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_at(text, s.start)),
            message: e.message().to_string(),
        })?;
        let src = Source { text };
        let twist = match &raw.twist {
            Some(v) => v.iter().map(|s| src.scalar("twist", s)).collect::<Result<Vec<_>, _>>()?,
            None => vec![qi(2), qi(-1)],
        };
        let positions = match &raw.positions {
            Some(v) => v.iter().map(|s| src.scalar("positions", s)).collect::<Result<Vec<_>, _>>()?,
            None => vec![qi(0), qi(1)],
        };
        if let Some(r) = raw.rank {
            if r != twist.len() {
                return Err(src.error("rank", format!("{r} but twist has {} entries", twist.len())));
            }
        }
        if let Some(n) = raw.sites {
            if n != positions.len() {
                return Err(src.error("sites", format!("{n} but positions has {} entries", positions.len())));
            }
        }
        let key = if raw.twist.is_some() || raw.positions.is_none() { "twist" } else { "positions" };
        let model = GaudinModel::new(twist.len(), twist.clone(), positions.clone()).map_err(|e| {
            let k = if matches!(e, crate::Error::CoincidentPositions(_)) { "positions" } else { key };
            src.error(k, e.to_string())
        })?;
        let window = match &raw.window {
            Some(w) => src.scalar("window", w)?,
            None => q(1, 10),
        };
        if window < qi(0) {
            return Err(src.error("window", "must be nonnegative"));
        }
        let cfg = RunConfig {
            rank: model.rank(),
            sites: model.sites(),
            twist: twist.iter().map(format_rational).collect(),
            positions: positions.iter().map(format_rational).collect(),
            model,
            times: raw.times.unwrap_or(3),
            degree: raw.degree.unwrap_or(4),
            samples: raw.samples.unwrap_or(5),
            points: raw.points.unwrap_or(10),
            seed: raw.seed.unwrap_or(0),
            tolerance: src.positive("tolerance", raw.tolerance.unwrap_or(FLOAT_TOLERANCE))?,
            spectrum_tolerance: src.positive("spectrum_tolerance", raw.spectrum_tolerance.unwrap_or(1e-9))?,
            moment_tolerance: src.positive("moment_tolerance", raw.moment_tolerance.unwrap_or(1e-8))?,
            checks: raw.checks.unwrap_or_default(),
            sector: raw.sector,
            state: raw.state.unwrap_or(0),
            window: format_rational(&window),
            window_value: rational_to_f64(&window),
            steps: raw.steps.unwrap_or(100),
            out: raw.out.map(PathBuf::from),
            float: raw.float.unwrap_or(false),
            operators: raw.operators.unwrap_or(false),
        };
        if let Some(s) = &cfg.sector {
            cfg.sector_label(s).map_err(|m| src.error("sector", m))?;
        }
        Ok(cfg)
    }

    /// Validates `counts` against the model.
    pub fn sector_label(&self, counts: &[usize]) -> Result<SectorLabel, String> {
        if counts.len() != self.rank {
            return Err(format!("{counts:?} has {} entries, N = {}", counts.len(), self.rank));
        }
        SectorLabel::new(counts.to_vec(), self.sites).map_err(|e| e.to_string())
    }

    pub fn set_window(&mut self, text: &str) -> Result<(), String> {
        let w = parse_rational(text).ok_or_else(|| format!("cannot parse window {text:?}"))?;
        if w < qi(0) {
            return Err("window must be nonnegative".into());
        }
        self.window = format_rational(&w);
        self.window_value = rational_to_f64(&w);
        Ok(())
    }
}

/// Parses `a1,...,aN`.
pub fn parse_sector(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("sector entry {s:?} is not a nonnegative integer")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_the_two_site_model() {
        let c = RunConfig::default_model();
        assert_eq!(c.twist, ["2", "-1"]);
        assert_eq!(c.positions, ["0", "1"]);
        assert_eq!(c.window, "1/10");
    }

    #[test]
    fn rationals_survive() {
        let c = RunConfig::parse("twist = [\"3/2\", -1, \"1/3\"]\npositions = [\"0\", \"5/7\"]\nseed = 4\n").unwrap();
        assert_eq!(c.rank, 3);
        assert_eq!(c.twist, ["3/2", "-1", "1/3"]);
        assert_eq!(c.model.positions()[1], q(5, 7));
    }

    #[test]
    fn coincident_positions_point_at_their_line() {
        let e = RunConfig::parse("seed = 1\npositions = [\"1/2\", \"2/4\"]\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("coincident"));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = RunConfig::parse("seed = 1\n\ntwist = [\"1\",\n").unwrap_err();
        assert!(e.line.is_some());
        let e = RunConfig::parse("seed = 1\ncolour = 3\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn floats_and_bad_sectors_are_rejected() {
        assert!(RunConfig::parse("twist = [0.5, 1]").is_err());
        assert!(RunConfig::parse("sector = [2, 1]").is_err());
        assert!(RunConfig::parse("tolerance = -1.0").is_err());
        assert_eq!(parse_sector("2, 1").unwrap(), vec![2, 1]);
        assert!(parse_sector("2,x").is_err());
    }
}
