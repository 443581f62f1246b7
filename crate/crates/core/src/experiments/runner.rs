use std::collections::HashMap;
use std::time::Instant;

use log::{debug, info};

use super::report::{ExperimentReport, ReportRow, ScheduleRecord};
use super::spec::{Case, DateMapping, ExperimentSpec, ReferenceSpec};
use crate::error::{Error, Result};
use crate::lsm::lsm_price;
use crate::models::PutPayoff;
use crate::simulation::{simulate, simulate_observed, Scheme};

/// Offset added to the base seed for generated references so that they never
/// share streams with the runs they are compared against.
pub const REFERENCE_SEED_OFFSET: u64 = 500_000;

/// Per-case statistics across runs.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseStats {
    pub case: Case,
    pub prices: Vec<f64>,
    pub elapsed: Vec<f64>,
    pub memory_bytes: u64,
}

impl CaseStats {
    pub fn mean(&self) -> f64 {
        self.prices.iter().sum::<f64>() / self.prices.len() as f64
    }

    pub fn std(&self) -> f64 {
        let n = self.prices.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.prices.iter().map(|p| (p - m) * (p - m)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Output of a high-resolution reference run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRun {
    pub prices: Vec<f64>,
    pub run_std: Vec<f64>,
    pub n_steps: usize,
    pub exercise_indices: Vec<usize>,
}

/// Memoises generated references shared by several experiments.
#[derive(Default)]
pub struct ReferenceCache {
    entries: HashMap<String, ReferenceRun>,
}

fn price_cases(spec: &ExperimentSpec, store_all: bool) -> Result<(Vec<CaseStats>, Vec<usize>)> {
    let cases = spec.validate()?;
    let model = spec.model_params()?;
    let grid = spec.grid()?;
    let schedule = spec.schedule()?;

    let mut spots: Vec<f64> = Vec::new();
    for c in &cases {
        if !spots.iter().any(|s| s.to_bits() == c.spot.to_bits()) {
            spots.push(c.spot);
        }
    }

    let mut stats: Vec<CaseStats> = cases
        .iter()
        .map(|c| CaseStats {
            case: c.clone(),
            prices: Vec::with_capacity(spec.runs),
            elapsed: Vec::with_capacity(spec.runs),
            memory_bytes: 0,
        })
        .collect();

    for run in 0..spec.runs {
        let seed = spec.base_seed.wrapping_add(run as u64);
        for &spot in &spots {
            let m = model.with_spot(spot);
            let started = Instant::now();
            let paths = if store_all {
                simulate(&m, spec.scheme, &grid, spec.n_paths, seed)
            } else {
                simulate_observed(&m, spec.scheme, &grid, spec.n_paths, seed, schedule.indices())
            }
            .map_err(|e| Error::Config {
                experiment: spec.name.clone(),
                message: e.to_string(),
            })?;
            let sim_seconds = started.elapsed().as_secs_f64();
            for st in stats.iter_mut().filter(|s| s.case.spot.to_bits() == spot.to_bits()) {
                let payoff = PutPayoff::new(st.case.strike).map_err(crate::Error::from)?;
                let res = lsm_price(&paths, &payoff, &schedule, m.r())?;
                st.prices.push(res.price);
                st.elapsed.push(sim_seconds + res.elapsed_seconds);
                st.memory_bytes = res.memory_bytes;
                debug!(
                    "{} run {run} {}: {:.6} ({:.2}s)",
                    spec.name, st.case.label, res.price, sim_seconds + res.elapsed_seconds
                );
            }
        }
    }
    Ok((stats, schedule.indices().to_vec()))
}

/// High-resolution run whose per-case means serve as reference prices.
pub fn generate_reference_prices(spec: &ExperimentSpec) -> Result<ReferenceRun> {
    if spec.scheme != Scheme::Euler {
        return Err(Error::Config {
            experiment: spec.name.clone(),
            message: "reference generation requires the euler scheme".into(),
        });
    }
    info!(
        "{}: generating reference with {} steps, {} paths x {} runs",
        spec.name, spec.n_steps, spec.n_paths, spec.runs
    );
    let (stats, indices) = price_cases(spec, false)?;
    Ok(ReferenceRun {
        prices: stats.iter().map(CaseStats::mean).collect(),
        run_std: stats.iter().map(CaseStats::std).collect(),
        n_steps: spec.n_steps,
        exercise_indices: indices,
    })
}

/// The experiment that produces `spec`'s generated reference, if it has one.
pub fn reference_spec(spec: &ExperimentSpec) -> Option<ExperimentSpec> {
    match &spec.reference {
        Some(ReferenceSpec::Generated { generate }) => {
            let mut r = spec.clone();
            r.name = format!("{}-reference", spec.name);
            r.scheme = generate.scheme;
            r.n_steps = generate.n_steps;
            r.date_mapping = DateMapping::Nearest;
            r.base_seed = spec.base_seed.wrapping_add(REFERENCE_SEED_OFFSET);
            r.reference = None;
            Some(r)
        }
        _ => None,
    }
}

fn cache_key(spec: &ExperimentSpec) -> String {
    format!(
        "{:?}|{:?}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}|{}",
        spec.model,
        spec.scheme,
        spec.n_steps,
        spec.maturity,
        spec.exercise,
        spec.date_mapping,
        spec.spot,
        spec.strike,
        spec.spots,
        spec.strikes,
        spec.n_paths,
        spec.runs,
        spec.base_seed
    )
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_cached(spec, &mut ReferenceCache::default())
}

pub fn run_experiment_cached(
    spec: &ExperimentSpec,
    cache: &mut ReferenceCache,
) -> Result<ExperimentReport> {
    spec.validate()?;
    info!(
        "{}: {} {} steps, {} paths x {} runs",
        spec.name,
        spec.scheme.name(),
        spec.n_steps,
        spec.n_paths,
        spec.runs
    );

    let mut record = ScheduleRecord {
        experiment: spec.name.clone(),
        n_steps: spec.n_steps,
        exercise_indices: Vec::new(),
        reference_n_steps: None,
        reference_indices: None,
    };
    let references: Option<Vec<f64>> = match (&spec.reference, reference_spec(spec)) {
        (Some(ReferenceSpec::Fixed { prices, .. }), _) => Some(prices.clone()),
        (_, Some(rspec)) => {
            let key = cache_key(&rspec);
            let run = match cache.entries.get(&key) {
                Some(r) => r.clone(),
                None => {
                    let r = generate_reference_prices(&rspec)?;
                    cache.entries.insert(key, r.clone());
                    r
                }
            };
            record.reference_n_steps = Some(run.n_steps);
            record.reference_indices = Some(run.exercise_indices.clone());
            Some(run.prices)
        }
        _ => None,
    };

    let (stats, indices) = price_cases(spec, true)?;
    record.exercise_indices = indices;

    let rows = stats
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let mean = st.mean();
            let ref_price = references.as_ref().map(|r| r[i]);
            ReportRow {
                experiment: spec.name.clone(),
                case: st.case.label.clone(),
                scheme: spec.scheme.name().to_string(),
                n_steps: spec.n_steps,
                n_paths: spec.n_paths,
                runs: spec.runs,
                mean_price: mean,
                run_std: st.std(),
                ref_price,
                rel_error: ref_price.map(|r| (mean - r).abs() / r),
                elapsed_s: st.elapsed.iter().sum::<f64>() / st.elapsed.len() as f64,
                memory_bytes: st.memory_bytes,
            }
        })
        .collect();

    Ok(ExperimentReport {
        name: spec.name.clone(),
        rows,
        schedules: vec![record],
    })
}
