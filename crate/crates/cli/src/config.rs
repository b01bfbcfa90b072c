//! Run configuration: substitution source plus numeric parameters.

use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use shift2iet::{Alphabet, Fixture, Substitution};

pub const DEFAULT_N_MAX: usize = 120;
pub const DEFAULT_LEVEL: usize = 100;
pub const DEFAULT_GRID: usize = 1000;
pub const DEFAULT_EPSILON: f64 = 0.02;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("rule for {rule:?}, position {position}: letter {letter:?} is not in the alphabet")]
    UnknownLetter {
        rule: char,
        position: usize,
        letter: char,
    },
    #[error("unknown fixture {0:?} (known: thue-morse, fibonacci, tribonacci, tetranacci, rudin-shapiro)")]
    UnknownFixture(String),
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Where the substitution came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Fixture(Fixture),
    Custom,
}

/// Numeric fields that a JSON config may carry; flags override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n_max: Option<usize>,
    pub depth_cap: Option<usize>,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub substitution: Substitution,
    pub source: Source,
    pub n_max: usize,
    pub depth_cap: usize,
    /// Level used for measures, approximants and plots.
    pub n: usize,
    pub grid: usize,
    pub epsilon: f64,
    pub out_dir: PathBuf,
    pub assert_aperiodic: bool,
}

impl RunConfig {
    /// Fills defaults (`n_max = 120`, `depth_cap = n_max / 2`,
    /// `n = min(100, n_max)`) and checks ranges.
    pub fn new(
        substitution: Substitution,
        source: Source,
        params: &Overrides,
        out_dir: PathBuf,
        assert_aperiodic: bool,
    ) -> Result<Self, ConfigError> {
        let n_max = params.n_max.unwrap_or(DEFAULT_N_MAX);
        if n_max < 3 {
            return Err(ConfigError::Invalid(format!(
                "--nmax must be at least 3, got {n_max}"
            )));
        }
        let depth_cap = params.depth_cap.unwrap_or(n_max / 2);
        if depth_cap < 2 || depth_cap >= n_max {
            return Err(ConfigError::Invalid(format!(
                "--depth must lie in [2, {}], got {depth_cap}",
                n_max - 1
            )));
        }
        let n = params.n.unwrap_or(DEFAULT_LEVEL.min(n_max));
        if n < 2 || n > n_max {
            return Err(ConfigError::Invalid(format!(
                "--n must lie in [2, {n_max}], got {n}"
            )));
        }
        let grid = params.grid.unwrap_or(DEFAULT_GRID);
        if grid == 0 {
            return Err(ConfigError::Invalid("--grid must be positive".into()));
        }
        let epsilon = params.epsilon.unwrap_or(DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "--epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            substitution,
            source,
            n_max,
            depth_cap,
            n,
            grid,
            epsilon,
            out_dir,
            assert_aperiodic,
        })
    }

    pub fn fixture(&self) -> Option<Fixture> {
        match self.source {
            Source::Fixture(f) => Some(f),
            Source::Custom => None,
        }
    }

    pub fn label(&self) -> String {
        match self.source {
            Source::Fixture(f) => f.name().to_string(),
            Source::Custom => self.substitution.to_string(),
        }
    }
}

pub fn parse_fixture(name: &str) -> Result<Fixture, ConfigError> {
    name.parse()
        .map_err(|_| ConfigError::UnknownFixture(name.to_string()))
}

/// Accepts a fixture name, inline JSON (anything starting with `{`), or a
/// path to a JSON file.
pub fn parse_config(text_or_path: &str) -> Result<(Substitution, Source, Overrides), ConfigError> {
    let trimmed = text_or_path.trim_start();
    if trimmed.starts_with('{') {
        return parse_json(trimmed);
    }
    if let Ok(f) = trimmed.parse::<Fixture>() {
        return Ok((f.substitution(), Source::Fixture(f), Overrides::default()));
    }
    let path = Path::new(text_or_path);
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text)
}

/// `{"alphabet": ["a", "b"], "rules": {"a": "ab", "b": "a"}, "n_max": 80}`.
/// Without `alphabet`, the order of the rule keys is the alphabet order.
pub fn parse_json(text: &str) -> Result<(Substitution, Source, Overrides), ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| ConfigError::Invalid("config must be a JSON object".into()))?;
    for key in obj.keys() {
        if !["alphabet", "rules", "n_max", "depth_cap", "n", "grid", "epsilon"].contains(&key.as_str()) {
            return Err(ConfigError::Invalid(format!("unknown config key {key:?}")));
        }
    }
    let rules = obj
        .get("rules")
        .and_then(Value::as_object)
        .ok_or_else(|| ConfigError::Invalid("config needs a \"rules\" object".into()))?;
    let letters = match obj.get("alphabet") {
        Some(a) => parse_alphabet(a)?,
        None => rules
            .keys()
            .map(|k| single_char(k, "rule key"))
            .collect::<Result<_, _>>()?,
    };
    let alphabet = Alphabet::new(letters).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let pairs = parse_rules(rules, &alphabet)?;
    let borrowed: Vec<(char, &str)> = pairs.iter().map(|(c, s)| (*c, s.as_str())).collect();
    let sub =
        Substitution::from_rules(alphabet, &borrowed).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let overrides = Overrides {
        n_max: usize_field(obj, "n_max")?,
        depth_cap: usize_field(obj, "depth_cap")?,
        n: usize_field(obj, "n")?,
        grid: usize_field(obj, "grid")?,
        epsilon: obj
            .get("epsilon")
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| ConfigError::Invalid("\"epsilon\" must be a number".into()))
            })
            .transpose()?,
    };
    Ok((sub, Source::Custom, overrides))
}

fn single_char(s: &str, what: &str) -> Result<char, ConfigError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(ConfigError::Invalid(format!(
            "{what} {s:?} must be a single character"
        ))),
    }
}

fn parse_alphabet(v: &Value) -> Result<Vec<char>, ConfigError> {
    let arr = v
        .as_array()
        .ok_or_else(|| ConfigError::Invalid("\"alphabet\" must be an array of letters".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            let s = x
                .as_str()
                .ok_or_else(|| ConfigError::Invalid(format!("alphabet entry {i} is not a string")))?;
            single_char(s, "alphabet entry")
        })
        .collect()
}

fn parse_rules(rules: &Map<String, Value>, alphabet: &Alphabet) -> Result<Vec<(char, String)>, ConfigError> {
    rules
        .iter()
        .map(|(key, image)| {
            let rule = single_char(key, "rule key")?;
            if alphabet.code(rule).is_none() {
                return Err(ConfigError::Invalid(format!(
                    "rule key {rule:?} is not in the alphabet"
                )));
            }
            let image = image
                .as_str()
                .ok_or_else(|| ConfigError::Invalid(format!("rule for {rule:?} must be a string")))?;
            if let Some((position, letter)) = image
                .chars()
                .enumerate()
                .find(|(_, c)| alphabet.code(*c).is_none())
            {
                return Err(ConfigError::UnknownLetter {
                    rule,
                    position,
                    letter,
                });
            }
            Ok((rule, image.to_string()))
        })
        .collect()
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>, ConfigError> {
    obj.get(key)
        .map(|v| {
            v.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| ConfigError::Invalid(format!("{key:?} must be a non-negative integer")))
        })
        .transpose()
}
