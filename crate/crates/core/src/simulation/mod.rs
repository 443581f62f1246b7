//! Path generation on a uniform time grid.
//!
//! Two schemes are provided for both models:
//!
//! * [`Scheme::Aes`]: the variance is drawn exactly from its scaled noncentral
//!   chi-squared transition and the log-price update substitutes the variance
//!   increment for the correlated stochastic integral.
//! * [`Scheme::Euler`]: truncated Euler for the variance,
//!   `v' = (v + kappa (nu_bar - v) dt + gamma sqrt(v dt) Z)^+`, and log-Euler
//!   for the asset with Cholesky-correlated normals.
//!
//! Per step, every scheme consumes its variance draws first (factor 1, then
//! factor 2) and the asset normals afterwards. Path `i` always uses the stream
//! `(seed, i)`, so a [`PathSet`] does not depend on the worker count.

mod aes;
mod cir;
mod euler;
mod paths;

pub use aes::{AesDoubleHestonCoefficients, AesHestonCoefficients};
pub use cir::{cir_exact_step, cir_transition_params, CirStepper, CirTransition};
pub use paths::PathSet;

use serde::{Deserialize, Serialize};

use crate::distributions::RngStream;
use crate::error::{Error, Result};
use crate::models::{DoubleHestonParams, HestonParams, ModelParams};

/// Uniform grid `t_i = i * dt`, `i = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    maturity: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(maturity: f64, steps: usize) -> Result<Self> {
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::Grid(format!("maturity must be positive, got {maturity}")));
        }
        if steps == 0 {
            return Err(Error::Grid("at least one time step is required".into()));
        }
        Ok(Self {
            maturity,
            steps,
            dt: maturity / steps as f64,
        })
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, index: usize) -> f64 {
        if index == self.steps {
            self.maturity
        } else {
            index as f64 * self.dt
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Aes,
    Euler,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Aes => "aes",
            Scheme::Euler => "euler",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "aes" => Ok(Scheme::Aes),
            "euler" => Ok(Scheme::Euler),
            other => Err(format!("unknown scheme `{other}` (expected aes or euler)")),
        }
    }
}

/// Log-price and variance state of one path.
#[derive(Clone, Copy, Debug)]
pub(crate) struct State {
    pub x: f64,
    pub v: [f64; 2],
}

/// One step of a path scheme.
pub(crate) trait Kernel: Sync {
    fn factors(&self) -> usize;
    fn advance(&self, stream: &mut RngStream, state: &mut State) -> Result<()>;
}

pub fn simulate_aes_heston(
    params: &HestonParams,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    simulate(&ModelParams::Heston(*params), Scheme::Aes, grid, n_paths, seed)
}

pub fn simulate_aes_double_heston(
    params: &DoubleHestonParams,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    simulate(&ModelParams::DoubleHeston(*params), Scheme::Aes, grid, n_paths, seed)
}

pub fn simulate_euler_heston(
    params: &HestonParams,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    simulate(&ModelParams::Heston(*params), Scheme::Euler, grid, n_paths, seed)
}

pub fn simulate_euler_double_heston(
    params: &DoubleHestonParams,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    simulate(&ModelParams::DoubleHeston(*params), Scheme::Euler, grid, n_paths, seed)
}

/// Simulates and stores every grid column.
pub fn simulate(
    model: &ModelParams,
    scheme: Scheme,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    let all: Vec<usize> = (0..=grid.steps()).collect();
    simulate_observed(model, scheme, grid, n_paths, seed, &all)
}

/// Simulates on the full grid but stores only the listed grid columns (plus
/// the initial and terminal columns, which are always kept).
pub fn simulate_observed(
    model: &ModelParams,
    scheme: Scheme,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    observe: &[usize],
) -> Result<PathSet> {
    let model = model.validate()?;
    if n_paths == 0 {
        return Err(Error::Grid("at least one path is required".into()));
    }
    let dt = grid.dt();
    match (model, scheme) {
        (ModelParams::Heston(p), Scheme::Aes) => {
            let k = aes::HestonKernel::new(&p, dt)?;
            paths::drive(&k, grid, n_paths, seed, p.s0, [p.v0, 0.0], observe)
        }
        (ModelParams::Heston(p), Scheme::Euler) => {
            let k = euler::HestonKernel::new(&p, dt);
            paths::drive(&k, grid, n_paths, seed, p.s0, [p.v0, 0.0], observe)
        }
        (ModelParams::DoubleHeston(p), Scheme::Aes) => {
            let k = aes::DoubleHestonKernel::new(&p, dt)?;
            let v0 = [p.factor1.v0, p.factor2.v0];
            paths::drive(&k, grid, n_paths, seed, p.s0, v0, observe)
        }
        (ModelParams::DoubleHeston(p), Scheme::Euler) => {
            let k = euler::DoubleHestonKernel::new(&p, dt);
            let v0 = [p.factor1.v0, p.factor2.v0];
            paths::drive(&k, grid, n_paths, seed, p.s0, v0, observe)
        }
    }
}
