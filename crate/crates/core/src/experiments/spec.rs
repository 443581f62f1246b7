use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsm::ExerciseSchedule;
use crate::models::{ModelParams, Preset, PutPayoff};
use crate::simulation::{Scheme, TimeGrid};

/// Either a named preset or explicit parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Preset(Preset),
    Params(ModelParams),
}

impl ModelSpec {
    pub fn params(&self) -> ModelParams {
        match self {
            ModelSpec::Preset(p) => p.params(),
            ModelSpec::Params(p) => *p,
        }
    }
}

/// `"american"` (every grid point) or `{ dates = n }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExerciseSpec {
    American,
    Dates { dates: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawExercise {
    Style(String),
    Dates { dates: usize },
}

impl Serialize for ExerciseSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            ExerciseSpec::American => RawExercise::Style("american".into()),
            ExerciseSpec::Dates { dates } => RawExercise::Dates { dates },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExerciseSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawExercise::deserialize(d)? {
            RawExercise::Style(s) if s == "american" => Ok(ExerciseSpec::American),
            RawExercise::Style(s) => Err(serde::de::Error::custom(format!(
                "unknown exercise style `{s}` (expected \"american\" or {{ dates = n }})"
            ))),
            RawExercise::Dates { dates } => Ok(ExerciseSpec::Dates { dates }),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DateMapping {
    /// Steps must be a multiple of the date count.
    #[default]
    Exact,
    /// Dates snap to the nearest grid index.
    Nearest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReferenceSpec {
    Fixed { source: String, prices: Vec<f64> },
    Generated { generate: GeneratedReference },
}

/// High-resolution run used as a self-generated reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedReference {
    #[serde(default = "euler")]
    pub scheme: Scheme,
    pub n_steps: usize,
}

fn euler() -> Scheme {
    Scheme::Euler
}

fn default_runs() -> usize {
    20
}

/// One experiment: a model, a scheme, a grid and a list of spot or strike cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: ModelSpec,
    pub scheme: Scheme,
    pub n_paths: usize,
    pub n_steps: usize,
    pub maturity: f64,
    pub exercise: ExerciseSpec,
    #[serde(default)]
    pub date_mapping: DateMapping,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spot: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strikes: Option<Vec<f64>>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
}

/// One priced option within an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub label: String,
    pub spot: f64,
    pub strike: f64,
}

/// Path-count divisor and run cap applied to catalog experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunScale {
    pub path_divisor: usize,
    pub max_runs: Option<usize>,
}

impl RunScale {
    /// Runs exactly as specified.
    pub const FULL: RunScale = RunScale {
        path_divisor: 1,
        max_runs: None,
    };

    /// Desk scale: a tenth of the paths and at most ten runs.
    pub const DESK: RunScale = RunScale {
        path_divisor: 10,
        max_runs: Some(10),
    };

    /// `factor <= 1` is full scale; larger factors divide the path count and cap runs at ten.
    pub fn from_factor(factor: usize) -> Self {
        if factor <= 1 {
            Self::FULL
        } else {
            RunScale {
                path_divisor: factor,
                max_runs: Some(10),
            }
        }
    }
}

impl ExperimentSpec {
    pub fn scaled(&self, scale: RunScale) -> Self {
        let mut s = self.clone();
        s.n_paths = (s.n_paths / scale.path_divisor.max(1)).max(1);
        if let Some(cap) = scale.max_runs {
            s.runs = s.runs.min(cap);
        }
        s
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Config {
            experiment: self.name.clone(),
            message: message.into(),
        }
    }

    pub fn model_params(&self) -> Result<ModelParams> {
        self.model
            .params()
            .validate()
            .map_err(|e| self.err(e.to_string()))
    }

    pub fn cases(&self) -> Result<Vec<Case>> {
        let preset = match &self.model {
            ModelSpec::Preset(p) => Some(*p),
            ModelSpec::Params(_) => None,
        };
        let cases: Vec<Case> = match (&self.spots, &self.strikes) {
            (Some(spots), None) => {
                let strike = self
                    .strike
                    .or(preset.map(|p| p.strike()))
                    .ok_or_else(|| self.err("`spots` needs a `strike`"))?;
                spots
                    .iter()
                    .map(|&s| Case {
                        label: format!("S0={s}"),
                        spot: s,
                        strike,
                    })
                    .collect()
            }
            (None, Some(strikes)) => {
                let spot = self.spot.unwrap_or_else(|| self.model.params().s0());
                strikes
                    .iter()
                    .map(|&k| Case {
                        label: format!("K={k}"),
                        spot,
                        strike: k,
                    })
                    .collect()
            }
            (None, None) => {
                let spot = self.spot.unwrap_or_else(|| self.model.params().s0());
                let strike = self
                    .strike
                    .or(preset.map(|p| p.strike()))
                    .ok_or_else(|| self.err("missing `strike`"))?;
                vec![Case {
                    label: format!("S0={spot}"),
                    spot,
                    strike,
                }]
            }
            (Some(_), Some(_)) => return Err(self.err("give either `spots` or `strikes`, not both")),
        };
        if cases.is_empty() {
            return Err(self.err("no cases"));
        }
        for c in &cases {
            if !(c.spot.is_finite() && c.spot > 0.0) {
                return Err(self.err(format!("spot must be positive, got {}", c.spot)));
            }
            PutPayoff::new(c.strike).map_err(|e| self.err(e.to_string()))?;
        }
        Ok(cases)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.maturity, self.n_steps).map_err(|e| self.err(e.to_string()))
    }

    pub fn schedule(&self) -> Result<ExerciseSchedule> {
        let grid = self.grid()?;
        let sched = match (self.exercise, self.date_mapping) {
            (ExerciseSpec::American, _) => Ok(ExerciseSchedule::american(grid)),
            (ExerciseSpec::Dates { dates }, DateMapping::Exact) => {
                ExerciseSchedule::bermudan(grid, dates)
            }
            (ExerciseSpec::Dates { dates }, DateMapping::Nearest) => {
                ExerciseSchedule::bermudan_nearest(grid, dates)
            }
        };
        sched.map_err(|e| self.err(e.to_string()))
    }

    /// Checks every invariant and returns the resolved cases.
    pub fn validate(&self) -> Result<Vec<Case>> {
        if self.runs == 0 {
            return Err(self.err("runs must be at least 1"));
        }
        if self.n_paths == 0 {
            return Err(self.err("n_paths must be at least 1"));
        }
        self.model_params()?;
        self.schedule()?;
        let cases = self.cases()?;
        match &self.reference {
            Some(ReferenceSpec::Fixed { prices, .. }) if prices.len() != cases.len() => {
                return Err(self.err(format!(
                    "{} reference prices for {} cases",
                    prices.len(),
                    cases.len()
                )));
            }
            Some(ReferenceSpec::Generated { generate }) if generate.n_steps == 0 => {
                return Err(self.err("reference n_steps must be positive"));
            }
            _ => {}
        }
        Ok(cases)
    }
}
