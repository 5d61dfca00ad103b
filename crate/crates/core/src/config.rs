//! Flat `key = value` configuration files.
//!
//! Grammar: one `key = value` per line, UTF-8. Everything after `#` is a
//! comment; blank lines are ignored. Keys may appear once. Unknown keys, and
//! keys that do not apply to the chosen pattern kind, are rejected.
//!
//! Pattern config:
//!
//! ```text
//! kind = new          # random | qc | new
//! m = 44              # frequency channels
//! n = 11              # subframes (prime for `new`)
//! k = 0               # channel hop per frame (qc, new); default 0
//! seed = 7            # random only; default 0
//! f = x^2+3x+6        # new only; polynomial text form
//! b = 1,0             # new only; default (1, 0, ..., 0)
//! init = start.txt    # optional, qc/new: one cell index i*n+j per line,
//!                     # line s gives the frame-0 cell of resource s;
//!                     # relative paths resolve against the config file
//! ```
//!
//! Simulation config uses the same frame keys `m`, `n`, the pattern keys
//! prefixed with `pattern.` (`pattern.kind`, `pattern.k`, `pattern.seed`,
//! `pattern.f`, `pattern.b`, `pattern.init`) and:
//!
//! ```text
//! cells = 21                 grid_cols = 7             isd = 500
//! ues_per_cell = 23          frames = 150              seed = 1
//! mode = ideal               # ideal | sinr
//! radius = inf               # ideal mode link range, meters
//! pathloss_exponent = 3.0    reference_loss_db = 40    offset_db = -5
//! tx_power_dbm = 23          noise_dbm = -110          sinr_threshold_db = 0
//! ibe_attenuation_db = 3
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::ff_linalg::{FpVec, LinalgError};
use crate::ff_poly::{FpPoly, PolyError, Prime};
use crate::patterns::{FrameStructure, InitialMap, PatternError, PatternKind, PatternSpec};
use crate::sim::{LinkMode, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("line {line}: invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

/// Parsed `key = value` lines; values are consumed with `take_*` and any
/// leftovers are reported by [`KeyValues::finish`].
#[derive(Debug, Clone)]
pub struct KeyValues {
    entries: Vec<Entry>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                reason: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    reason: "empty key".into(),
                });
            }
            if entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
                used: false,
            });
        }
        Ok(KeyValues { entries })
    }

    /// Raw value and line number.
    pub fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    pub fn take_parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((value, line)) => {
                value
                    .parse::<T>()
                    .map(Some)
                    .map_err(|e| ConfigError::InvalidValue {
                        line,
                        key: key.to_string(),
                        value: value.clone(),
                        reason: e.to_string(),
                    })
            }
        }
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.take_parsed(key)?
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    /// Errors on the first key that was never taken.
    pub fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_iter().find(|e| !e.used) {
            Some(e) => Err(ConfigError::UnknownKey {
                line: e.line,
                key: e.key,
            }),
            None => Ok(()),
        }
    }
}

fn invalid(key: &str, value: &str, line: usize, reason: impl ToString) -> ConfigError {
    ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn read_file(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One cell index per line (`#` comments and blank lines ignored).
pub fn parse_init_map(text: &str, frame: FrameStructure) -> Result<InitialMap, ConfigError> {
    let mut cells = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let v = content.parse::<u32>().map_err(|e| ConfigError::Syntax {
            line: idx + 1,
            reason: format!("`{content}`: {e}"),
        })?;
        cells.push(v);
    }
    Ok(InitialMap::from_cells(frame, cells)?)
}

fn pattern_from(
    kv: &mut KeyValues,
    prefix: &str,
    frame: FrameStructure,
    base_dir: Option<&Path>,
) -> Result<PatternSpec, ConfigError> {
    let key = |k: &str| format!("{prefix}{k}");
    let kind_key = key("kind");
    let (kind, kind_line) = kv
        .take(&kind_key)
        .ok_or_else(|| ConfigError::MissingKey(kind_key.clone()))?;
    let kind = match kind.as_str() {
        "random" => PatternKind::Random {
            seed: kv.take_parsed(&key("seed"))?.unwrap_or(0),
        },
        "qc" => PatternKind::Qc {
            k: kv.take_parsed(&key("k"))?.unwrap_or(0),
        },
        "new" => {
            let k = kv.take_parsed(&key("k"))?.unwrap_or(0);
            let f_key = key("f");
            let (f_text, f_line) = kv
                .take(&f_key)
                .ok_or_else(|| ConfigError::MissingKey(f_key.clone()))?;
            let p = Prime::new(frame.n() as u64)
                .map_err(|_| PatternError::SubframesNotPrime(frame.n() as u64))?;
            let f = FpPoly::parse(p, &f_text)
                .map_err(|e: PolyError| invalid(&f_key, &f_text, f_line, e))?;
            let b = match kv.take(&key("b")) {
                Some((b_text, b_line)) => FpVec::parse(p, &b_text)
                    .map_err(|e: LinalgError| invalid(&key("b"), &b_text, b_line, e))?,
                None => {
                    FpVec::unit(p, f.degree().unwrap_or(0).max(1)).map_err(PatternError::from)?
                }
            };
            PatternKind::New { k, f, b }
        }
        other => {
            return Err(invalid(
                &kind_key,
                other,
                kind_line,
                "expected random, qc or new",
            ));
        }
    };
    let mut spec = PatternSpec::new(frame, kind);
    if let Some((path, line)) = kv.take(&key("init")) {
        if matches!(spec.kind, PatternKind::Random { .. }) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key("init"),
            });
        }
        let full = match base_dir {
            Some(dir) if Path::new(&path).is_relative() => dir.join(&path),
            _ => PathBuf::from(&path),
        };
        spec = spec.with_init(parse_init_map(&read_file(&full)?, frame)?);
    }
    Ok(spec)
}

fn frame_from(kv: &mut KeyValues) -> Result<FrameStructure, ConfigError> {
    let m = kv.require("m")?;
    let n = kv.require("n")?;
    Ok(FrameStructure::new(m, n)?)
}

/// Parses a pattern config. `base_dir` resolves a relative `init` path.
pub fn parse_pattern_config(
    text: &str,
    base_dir: Option<&Path>,
) -> Result<PatternSpec, ConfigError> {
    let mut kv = KeyValues::parse(text)?;
    let frame = frame_from(&mut kv)?;
    let spec = pattern_from(&mut kv, "", frame, base_dir)?;
    kv.finish()?;
    spec.build()?;
    Ok(spec)
}

pub fn load_pattern_config(path: &Path) -> Result<PatternSpec, ConfigError> {
    parse_pattern_config(&read_file(path)?, path.parent())
}

/// `inf` or a number.
struct Meters(f64);

impl FromStr for Meters {
    type Err = std::num::ParseFloatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            Ok(Meters(f64::INFINITY))
        } else {
            s.parse().map(Meters)
        }
    }
}

pub fn parse_sim_config(text: &str, base_dir: Option<&Path>) -> Result<SimConfig, ConfigError> {
    let mut kv = KeyValues::parse(text)?;
    let frame = frame_from(&mut kv)?;
    let pattern = pattern_from(&mut kv, "pattern.", frame, base_dir)?;
    let mut cfg = SimConfig::with_pattern(pattern);
    macro_rules! opt {
        ($key:literal, $field:expr) => {
            if let Some(v) = kv.take_parsed($key)? {
                $field = v;
            }
        };
    }
    opt!("cells", cfg.cells);
    opt!("grid_cols", cfg.grid_cols);
    opt!("isd", cfg.isd);
    opt!("ues_per_cell", cfg.ues_per_cell);
    opt!("pathloss_exponent", cfg.pathloss.exponent);
    opt!("reference_loss_db", cfg.pathloss.reference_loss_db);
    opt!("offset_db", cfg.pathloss.offset_db);
    opt!("tx_power_dbm", cfg.tx_power_dbm);
    opt!("noise_dbm", cfg.noise_dbm);
    opt!("sinr_threshold_db", cfg.sinr_threshold_db);
    opt!("ibe_attenuation_db", cfg.ibe_attenuation_db);
    opt!("frames", cfg.frames);
    opt!("seed", cfg.seed);
    if let Some(Meters(r)) = kv.take_parsed("radius")? {
        cfg.radius = r;
    }
    if let Some((mode, line)) = kv.take("mode") {
        cfg.mode = match mode.as_str() {
            "ideal" => LinkMode::Ideal,
            "sinr" => LinkMode::Sinr,
            other => return Err(invalid("mode", other, line, "expected ideal or sinr")),
        };
    }
    kv.finish()?;
    cfg.pattern.build()?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_sim_config(path: &Path) -> Result<SimConfig, ConfigError> {
    parse_sim_config(&read_file(path)?, path.parent())
}
