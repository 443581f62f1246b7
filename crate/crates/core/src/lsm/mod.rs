//! Longstaff-Schwartz least-squares Monte Carlo.
//!
//! Cashflows start at the maturity payoff. Walking the exercise dates
//! backwards, the realised cashflows of in-the-money paths (payoff strictly
//! positive) are discounted to the current date and regressed on the basis;
//! a path exercises when its payoff is at least the fitted continuation value.
//! Fitted values only drive the decision: the realised payoff is what
//! propagates. There is no exercise decision at t = 0.

mod basis;
mod regression;
mod schedule;

pub use basis::{build_features, BasisSpec, CrossSection};
pub use regression::{regress_continuation, RANK_TOLERANCE};
pub use schedule::ExerciseSchedule;

use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelKind, PutPayoff};
use crate::simulation::PathSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsmResult {
    pub price: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub elapsed_seconds: f64,
    pub memory_bytes: u64,
}

/// Price plus the grid index at which each path stopped.
#[derive(Clone, Debug)]
pub struct LsmOutcome {
    pub result: LsmResult,
    pub exercise_steps: Vec<usize>,
}

pub fn lsm_price(
    paths: &PathSet,
    payoff: &PutPayoff,
    schedule: &ExerciseSchedule,
    r: f64,
) -> Result<LsmResult> {
    Ok(lsm_price_detailed(paths, payoff, schedule, r, &default_basis(paths))?.result)
}

pub fn default_basis(paths: &PathSet) -> BasisSpec {
    let kind = if paths.factors() == 2 {
        ModelKind::DoubleHeston
    } else {
        ModelKind::Heston
    };
    BasisSpec::new(kind)
}

pub fn lsm_price_detailed(
    paths: &PathSet,
    payoff: &PutPayoff,
    schedule: &ExerciseSchedule,
    r: f64,
    basis: &BasisSpec,
) -> Result<LsmOutcome> {
    let started = Instant::now();
    let grid = paths.grid();
    if schedule.grid() != grid {
        return Err(Error::Schedule(
            "exercise schedule was built for a different time grid".into(),
        ));
    }
    if let Some(&k) = schedule.indices().iter().find(|&&k| !paths.has_step(k)) {
        return Err(Error::Schedule(format!("grid step {k} is not stored in the path set")));
    }
    if basis.model_kind == ModelKind::DoubleHeston && paths.factors() != 2 {
        return Err(Error::Schedule("two-factor basis needs two-factor paths".into()));
    }

    let n = paths.n_paths();
    let m = grid.steps();
    let mut cash: Vec<f64> = paths.asset(m).iter().map(|&s| payoff.value(s)).collect();
    let mut stop = vec![m; n];

    let mut itm = Vec::with_capacity(n);
    let (mut a, mut v1, mut v2, mut y) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &k in schedule.indices().iter().rev().skip(1) {
        let asset = paths.asset(k);
        let var1 = paths.variance_1(k);
        let var2 = paths.variance_2(k);
        let t_k = grid.time(k);

        itm.clear();
        itm.extend((0..n).filter(|&i| payoff.value(asset[i]) > 0.0));
        if itm.is_empty() {
            continue;
        }
        a.clear();
        v1.clear();
        v2.clear();
        y.clear();
        for &i in &itm {
            a.push(asset[i]);
            v1.push(var1[i]);
            if let Some(var2) = var2 {
                v2.push(var2[i]);
            }
            y.push(cash[i] * (-r * (grid.time(stop[i]) - t_k)).exp());
        }
        let cs = CrossSection {
            asset: &a,
            variance_1: &v1,
            variance_2: var2.map(|_| v2.as_slice()),
        };
        let x = build_features(&cs, payoff.strike(), basis);
        let beta = match regress_continuation(&x, &DVector::from_column_slice(&y)) {
            Ok(beta) => beta,
            Err(Error::EmptyRegression) => continue,
            Err(e) => return Err(e),
        };
        let fitted = &x * beta;
        for (row, &i) in itm.iter().enumerate() {
            let h = payoff.value(asset[i]);
            if h >= fitted[row] {
                cash[i] = h;
                stop[i] = k;
            }
        }
    }

    let discounted: Vec<f64> = (0..n)
        .map(|i| cash[i] * (-r * grid.time(stop[i])).exp())
        .collect();
    let (price, std_error) = mean_and_std_error(&discounted);
    Ok(LsmOutcome {
        result: LsmResult {
            price,
            std_error,
            n_paths: n,
            n_steps: m,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            memory_bytes: paths.memory_bytes(),
        },
        exercise_steps: stop,
    })
}

/// Sample mean and its standard error `s / sqrt(n)`.
pub(crate) fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}
