//! Run configuration and its text format.
//!
//! ```text
//! # comment
//! case = 1            # 1..=4 or custom
//! [grid]
//! nx = 256
//! [physics]
//! G = 1.0
//! [run]
//! t_end = 0.2
//! [output]
//! dir = out
//! slices = y:4.0, x:2.5
//! ```
//!
//! Keys per section: `grid` nx ny x0 y0 lx ly; `physics` g G lambda K;
//! `run` t_end cfl project_every max_steps; `output` dir snap_every vtk slices;
//! `custom` h_left h_right x_split boundary (copy|reflective). Anything not
//! set keeps the preset default.

use crate::fv2d::Boundary;
use crate::linalg::Vec2;
use crate::model::PhysicalParams;
use crate::presets;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CustomInit {
    pub h_left: f64,
    pub h_right: f64,
    pub x_split: f64,
    pub boundary: Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Case {
    Preset(u8),
    /// Stretched-column dam break along `x`.
    Custom(CustomInit),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(format!("unknown axis '{other}'")),
        }
    }
}

/// Line profile: cells nearest to `axis = at`. `Axis::Y` at 4 is the row through y = 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceSpec {
    pub axis: Axis,
    pub at: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Snapshot every n steps; 0 writes the initial and final state only.
    pub snap_every: usize,
    pub vtk: bool,
    pub slices: Vec<SliceSpec>,
}


#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub case: Case,
    pub params: PhysicalParams,
    pub nx: usize,
    pub ny: usize,
    pub origin: Vec2,
    pub extent: Vec2,
    pub t_end: f64,
    pub cfl: f64,
    pub project_every: usize,
    pub max_steps: usize,
    pub output: OutputSpec,
}

impl SimConfig {
    pub fn preset(id: u8) -> Result<Self, ConfigError> {
        presets::defaults(id).map_err(|e| invalid("case", e.to_string()))
    }

    pub fn with_resolution(mut self, nx: usize, ny: usize) -> Self {
        self.nx = nx;
        self.ny = ny;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params
            .validate()
            .map_err(|e| invalid("physics", e.to_string()))?;
        if self.nx < 2 || self.ny < 2 {
            return Err(invalid("grid", "need at least 2 cells per direction"));
        }
        if !(self.extent[0] > 0.0 && self.extent[1] > 0.0) {
            return Err(invalid("grid", "lx and ly must be positive"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", "must be positive and finite"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid("cfl", format!("{} not in (0, 1]", self.cfl)));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be positive"));
        }
        match &self.case {
            Case::Preset(id) if !(1..=4).contains(id) => {
                return Err(invalid("case", format!("unknown preset {id}")))
            }
            Case::Custom(c) if !(c.h_left > 0.0 && c.h_right > 0.0) => {
                return Err(invalid("custom", "depths must be positive"))
            }
            _ => {}
        }
        for s in &self.output.slices {
            let (lo, len) = match s.axis {
                Axis::X => (self.origin[0], self.extent[0]),
                Axis::Y => (self.origin[1], self.extent[1]),
            };
            if !(s.at >= lo && s.at <= lo + len) {
                return Err(invalid("slices", format!("{} outside the domain", s.at)));
            }
        }
        Ok(())
    }
}

struct Entry<'a> {
    line: usize,
    section: &'a str,
    key: &'a str,
    value: &'a str,
}

fn entries(text: &str) -> Result<Vec<Entry<'_>>, ConfigError> {
    let mut out = Vec::new();
    let mut section = "";
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or(ConfigError::Parse {
                line,
                msg: "unterminated section header".into(),
            })?;
            section = name.trim();
            if !matches!(section, "grid" | "physics" | "run" | "output" | "custom") {
                return Err(ConfigError::Parse {
                    line,
                    msg: format!("unknown section [{section}]"),
                });
            }
            continue;
        }
        let (key, value) = s.split_once('=').ok_or(ConfigError::Parse {
            line,
            msg: format!("expected key = value, got '{s}'"),
        })?;
        out.push(Entry {
            line,
            section,
            key: key.trim(),
            value: value.trim(),
        });
    }
    Ok(out)
}

fn value<T: FromStr>(e: &Entry) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::Parse {
        line: e.line,
        msg: format!("bad value '{}' for {}", e.value, e.key),
    })
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::Parse {
            line: e.line,
            msg: format!("bad boolean '{}'", e.value),
        }),
    }
}

fn parse_slices(e: &Entry) -> Result<Vec<SliceSpec>, ConfigError> {
    let err = |msg: String| ConfigError::Parse { line: e.line, msg };
    e.value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (axis, at) = item
                .split_once(':')
                .ok_or_else(|| err(format!("slice '{item}' is not axis:value")))?;
            Ok(SliceSpec {
                axis: axis.parse().map_err(err)?,
                at: at
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad slice coordinate '{at}'")))?,
            })
        })
        .collect()
}

pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let list = entries(text)?;
    let case_entry = list
        .iter()
        .find(|e| e.section.is_empty() && e.key == "case")
        .ok_or_else(|| invalid("case", "missing"))?;
    let mut cfg = if case_entry.value == "custom" {
        let mut c = SimConfig::preset(1)?;
        c.case = Case::Custom(CustomInit::default());
        c
    } else {
        let id: u8 = value(case_entry)?;
        SimConfig::preset(id)?
    };

    for e in &list {
        let unknown = || ConfigError::Parse {
            line: e.line,
            msg: format!(
                "unknown key '{}'{}",
                e.key,
                if e.section.is_empty() {
                    String::new()
                } else {
                    format!(" in [{}]", e.section)
                }
            ),
        };
        match (e.section, e.key) {
            ("", "case") => {}
            ("grid", "nx") => cfg.nx = value(e)?,
            ("grid", "ny") => cfg.ny = value(e)?,
            ("grid", "x0") => cfg.origin[0] = value(e)?,
            ("grid", "y0") => cfg.origin[1] = value(e)?,
            ("grid", "lx") => cfg.extent[0] = value(e)?,
            ("grid", "ly") => cfg.extent[1] = value(e)?,
            ("physics", "g") => cfg.params.g = value(e)?,
            ("physics", "G") => cfg.params.big_g = value(e)?,
            ("physics", "lambda") => cfg.params.lambda = value(e)?,
            ("physics", "K") => cfg.params.k = value(e)?,
            ("run", "t_end") => cfg.t_end = value(e)?,
            ("run", "cfl") => cfg.cfl = value(e)?,
            ("run", "project_every") => cfg.project_every = value(e)?,
            ("run", "max_steps") => cfg.max_steps = value(e)?,
            ("output", "dir") => cfg.output.dir = Some(PathBuf::from(e.value)),
            ("output", "snap_every") => cfg.output.snap_every = value(e)?,
            ("output", "vtk") => cfg.output.vtk = parse_bool(e)?,
            ("output", "slices") => cfg.output.slices = parse_slices(e)?,
            ("custom", key) => {
                let Case::Custom(c) = &mut cfg.case else {
                    return Err(ConfigError::Parse {
                        line: e.line,
                        msg: "[custom] requires case = custom".into(),
                    });
                };
                match key {
                    "h_left" => c.h_left = value(e)?,
                    "h_right" => c.h_right = value(e)?,
                    "x_split" => c.x_split = value(e)?,
                    "boundary" => {
                        c.boundary = match e.value {
                            "copy" => Boundary::Copy,
                            "reflective" => Boundary::Reflective,
                            other => {
                                return Err(ConfigError::Parse {
                                    line: e.line,
                                    msg: format!("unknown boundary '{other}'"),
                                })
                            }
                        }
                    }
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
