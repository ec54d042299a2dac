//! TOML scenario files, `--set` overrides and solver/bath pairing rules.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bath::{bose_occupation, frequency_comb, BathMode, BathModel};
use crate::error::{Error, Result};
use crate::wavepacket::QGrid;

/// Parse a TOML document after applying `key.path=value` overrides.
pub fn parse_with_overrides<T: DeserializeOwned>(text: &str, overrides: &[String]) -> Result<T> {
    let mut table: toml::Table = text.parse()?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    Ok(toml::Value::Table(table).try_into()?)
}

pub fn load<T: DeserializeOwned>(path: &Path, overrides: &[String]) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_with_overrides(&text, overrides)
}

/// Set a dotted path in a TOML table. The value is read as a TOML literal,
/// falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override `{assignment}` has an empty key")));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Bath section of a scenario file. Occupations may be given directly or
/// through a temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    LinearMarkov {
        gamma: f64,
        nbar: Option<f64>,
        kt: Option<f64>,
    },
    /// Occupation at 2ω.
    QuadraticMarkov {
        gamma: f64,
        nbar: Option<f64>,
        kt: Option<f64>,
    },
    EarlyTime {
        gamma0: f64,
    },
    DiscreteModes {
        modes: Vec<BathMode>,
    },
    /// Evenly spaced modes of equal coupling around `center` (default ω).
    ModeComb {
        center: Option<f64>,
        half_width: f64,
        count: usize,
        coupling: f64,
        kt: f64,
    },
}

fn occupation(nbar: Option<f64>, kt: Option<f64>, freq: f64) -> Result<f64> {
    match (nbar, kt) {
        (Some(_), Some(_)) => Err(Error::Config("give either nbar or kt, not both".into())),
        (Some(n), None) => Ok(n),
        (None, Some(kt)) => bose_occupation(freq, kt),
        (None, None) => Ok(0.0),
    }
}

impl BathConfig {
    pub fn resolve(&self, omega: f64) -> Result<BathModel> {
        let bath = match self {
            BathConfig::LinearMarkov { gamma, nbar, kt } => {
                BathModel::LinearMarkov { gamma: *gamma, nbar: occupation(*nbar, *kt, omega)? }
            }
            BathConfig::QuadraticMarkov { gamma, nbar, kt } => {
                BathModel::QuadraticMarkov { gamma: *gamma, nbar: occupation(*nbar, *kt, 2.0 * omega)? }
            }
            BathConfig::EarlyTime { gamma0 } => BathModel::EarlyTime { gamma0: *gamma0 },
            BathConfig::DiscreteModes { modes } => BathModel::DiscreteModes { modes: modes.clone() },
            BathConfig::ModeComb { center, half_width, count, coupling, kt } => {
                let center = center.unwrap_or(omega);
                if *count < 2 || !(*half_width > 0.0) || *half_width >= center {
                    return Err(Error::Config(format!(
                        "mode comb needs count >= 2 and 0 < half_width < center (got {count}, {half_width}, {center})"
                    )));
                }
                let mut err = None;
                let modes = frequency_comb(center, *half_width, *count, *coupling, |w| {
                    bose_occupation(w, *kt).unwrap_or_else(|e| {
                        err = Some(e);
                        0.0
                    })
                });
                if let Some(e) = err {
                    return Err(e);
                }
                BathModel::DiscreteModes { modes }
            }
        };
        bath.validate(omega)?;
        Ok(bath)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    Coherent {
        alpha: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    Cat {
        alpha: f64,
        #[serde(default)]
        alpha_im: f64,
        #[serde(default)]
        phi: f64,
    },
    Number {
        k: usize,
    },
}

impl InitialConfig {
    pub fn amplitude(&self) -> Option<Complex64> {
        match self {
            InitialConfig::Coherent { alpha, alpha_im } | InitialConfig::Cat { alpha, alpha_im, .. } => {
                Some(Complex64::new(*alpha, *alpha_im))
            }
            InitialConfig::Number { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            InitialConfig::Coherent { .. } => "coherent",
            InitialConfig::Cat { .. } => "cat",
            InitialConfig::Number { .. } => "number",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FockKindName {
    LinearNonRwa,
    LinearRwa,
    QuadraticLindblad,
    QuadraticLiteral,
    TimeDependent,
}

fn default_dim() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    Cumulant,
    Analytic,
    Fock {
        dissipator: FockKindName,
        #[serde(default = "default_dim")]
        dim: usize,
    },
}

impl SolverConfig {
    pub fn label(&self) -> String {
        match self {
            SolverConfig::Cumulant => "cumulant".into(),
            SolverConfig::Analytic => "analytic".into(),
            SolverConfig::Fock { dissipator, .. } => {
                let v = serde_json::to_value(dissipator).expect("unit enum serializes");
                format!("fock/{}", v.as_str().unwrap_or_default())
            }
        }
    }
}

fn default_points() -> usize {
    400
}

fn default_frames() -> usize {
    11
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Number of density frames written, evenly spread over the grid.
    #[serde(default = "default_frames")]
    pub frames: usize,
}

fn default_omega() -> f64 {
    1.0
}

/// A free-form scenario for `run <config>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub bath: BathConfig,
    pub initial: InitialConfig,
    pub solver: SolverConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub q_grid: QGrid,
}

/// Check that the selected solver can run this bath and initial state.
pub fn check_pairing(bath: &BathModel, initial: &InitialConfig, solver: &SolverConfig) -> Result<()> {
    let reject = |why: &str| {
        Err(Error::Config(format!(
            "solver `{}` cannot run bath `{}` with a {} initial state: {why}",
            solver.label(),
            bath.kind_name(),
            initial.kind_name()
        )))
    };
    match solver {
        SolverConfig::Cumulant => {
            if matches!(bath, BathModel::QuadraticMarkov { .. }) {
                return reject("the two-quantum bath has no Gaussian cumulant description; use a fock quadratic dissipator");
            }
            if matches!(initial, InitialConfig::Number { .. }) {
                return Err(crate::cumulant::require_gaussian("a number state"));
            }
        }
        SolverConfig::Analytic => match (bath, initial) {
            (BathModel::LinearMarkov { .. }, InitialConfig::Coherent { .. } | InitialConfig::Cat { .. }) => {}
            (BathModel::EarlyTime { .. }, InitialConfig::Coherent { .. }) => {}
            (BathModel::EarlyTime { .. }, InitialConfig::Cat { .. }) => {
                return reject("the closed-form interference term needs a linear Markov bath")
            }
            (_, InitialConfig::Number { .. }) => return reject("closed forms exist only for coherent and cat states"),
            _ => return reject("closed forms exist only for linear Markov and early-time baths"),
        },
        SolverConfig::Fock { dissipator, dim } => {
            if *dim < 2 {
                return Err(Error::Config(format!("fock dim must be >= 2, got {dim}")));
            }
            if let InitialConfig::Number { k } = initial {
                if k >= dim {
                    return Err(Error::Config(format!("number state {k} needs dim > {k}, got {dim}")));
                }
            }
            let ok = match dissipator {
                FockKindName::LinearNonRwa | FockKindName::LinearRwa => matches!(bath, BathModel::LinearMarkov { .. }),
                FockKindName::QuadraticLindblad | FockKindName::QuadraticLiteral => {
                    matches!(bath, BathModel::QuadraticMarkov { .. })
                }
                FockKindName::TimeDependent => matches!(bath, BathModel::DiscreteModes { .. }),
            };
            if !ok {
                let need = match dissipator {
                    FockKindName::LinearNonRwa | FockKindName::LinearRwa => "linear_markov",
                    FockKindName::QuadraticLindblad | FockKindName::QuadraticLiteral => "quadratic_markov",
                    FockKindName::TimeDependent => "discrete_modes or mode_comb",
                };
                return reject(&format!("this dissipator needs a {need} bath"));
            }
        }
    }
    Ok(())
}

impl ScenarioConfig {
    /// Resolve and validate; returns the bath ready for the solvers.
    pub fn validate(&self) -> Result<BathModel> {
        if self.id.is_empty() || !self.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::Config(format!("scenario id `{}` must be non-empty [A-Za-z0-9_-]", self.id)));
        }
        if !(self.omega > 0.0) {
            return Err(Error::Config(format!("omega must be > 0, got {}", self.omega)));
        }
        self.time.validate()?;
        QGrid::new(self.q_grid.min, self.q_grid.max, self.q_grid.points)?;
        let bath = self.bath.resolve(self.omega)?;
        check_pairing(&bath, &self.initial, &self.solver)?;
        Ok(bath)
    }
}

impl TimeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Config(format!("time span must be > 0, got {}", self.t_end)));
        }
        if self.points < 2 {
            return Err(Error::Config(format!("time grid needs >= 2 points, got {}", self.points)));
        }
        if self.frames > self.points {
            return Err(Error::Config(format!("{} frames requested from {} time points", self.frames, self.points)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(0.0, self.t_end, self.points)
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
}

/// `count` indices spread evenly over `0..len`, endpoints included.
pub fn frame_indices(len: usize, count: usize) -> Vec<usize> {
    match count {
        0 => Vec::new(),
        1 => vec![0],
        _ => {
            let mut v: Vec<usize> = (0..count)
                .map(|i| ((i as f64) * (len - 1) as f64 / (count - 1) as f64).round() as usize)
                .collect();
            v.dedup();
            v
        }
    }
}
