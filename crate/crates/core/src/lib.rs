//! Monte Carlo pricing of Bermudan and American puts under the Heston and
//! double Heston stochastic volatility models.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`]: per-path random streams and the gamma, Poisson and
//!   noncentral chi-squared samplers.
//! * [`models`]: parameter bundles, validation, the put payoff and presets.
//! * [`simulation`]: almost-exact (AES) and truncated Euler path generators.
//! * [`lsm`]: Longstaff-Schwartz backward induction.
//! * [`experiments`]: declarative multi-run experiments and CSV/JSON reports.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod lsm;
pub mod models;
pub mod simulation;

pub use error::{Error, Result, ValidationErrors, Violation};
pub use lsm::{lsm_price, BasisSpec, ExerciseSchedule, LsmResult};
pub use models::{CirFactor, DoubleHestonParams, HestonParams, ModelKind, ModelParams, Preset, PutPayoff};
pub use simulation::{simulate, PathSet, Scheme, TimeGrid};
