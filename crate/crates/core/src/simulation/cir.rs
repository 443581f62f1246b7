//! Exact transition of the square-root (CIR) variance process.
//!
//! Over a step of length `dt`, `v(t + dt) = c_bar * chi2(dof, kappa_bar)` with
//!
//! ```text
//! c_bar     = gamma^2 (1 - exp(-kappa dt)) / (4 kappa)
//! kappa_bar = 4 kappa exp(-kappa dt) v(t) / (gamma^2 (1 - exp(-kappa dt)))
//! dof       = 4 kappa nu_bar / gamma^2
//! ```

use crate::distributions::{sample_noncentral_chisq, NoncentralChiSqParams, RngStream};
use crate::error::{Error, Result};
use crate::models::CirFactor;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirTransition {
    pub c_bar: f64,
    pub kappa_bar: f64,
    pub dof: f64,
}

pub fn cir_transition_params(
    kappa: f64,
    gamma: f64,
    nu_bar: f64,
    dt: f64,
    v_current: f64,
) -> Result<CirTransition> {
    CirStepper::new(kappa, gamma, nu_bar, dt)?.transition(v_current)
}

/// One exact CIR step: `c_bar * chi2(dof, kappa_bar)`. Never negative.
pub fn cir_exact_step(stream: &mut RngStream, transition: &CirTransition) -> Result<f64> {
    let p = NoncentralChiSqParams::new(transition.dof, transition.kappa_bar)?;
    Ok(transition.c_bar * sample_noncentral_chisq(stream, &p))
}

/// Transition constants that depend only on the factor and the step length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirStepper {
    c_bar: f64,
    /// `kappa_bar / v`.
    noncentrality_per_unit: f64,
    dof: f64,
}

impl CirStepper {
    pub fn new(kappa: f64, gamma: f64, nu_bar: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Grid(format!("time step must be positive, got {dt}")));
        }
        let g2 = gamma * gamma;
        let decay = (-kappa * dt).exp();
        let one_minus = -(-kappa * dt).exp_m1();
        Ok(Self {
            c_bar: g2 * one_minus / (4.0 * kappa),
            noncentrality_per_unit: 4.0 * kappa * decay / (g2 * one_minus),
            dof: 4.0 * kappa * nu_bar / g2,
        })
    }

    pub fn for_factor(factor: &CirFactor, dt: f64) -> Result<Self> {
        Self::new(factor.kappa, factor.gamma, factor.nu_bar, dt)
    }

    pub fn transition(&self, v_current: f64) -> Result<CirTransition> {
        if !(v_current.is_finite() && v_current >= 0.0) {
            return Err(Error::Sampler(format!(
                "variance must be non-negative, got {v_current}"
            )));
        }
        Ok(CirTransition {
            c_bar: self.c_bar,
            kappa_bar: self.noncentrality_per_unit * v_current,
            dof: self.dof,
        })
    }

    #[inline]
    pub fn step(&self, stream: &mut RngStream, v_current: f64) -> Result<f64> {
        cir_exact_step(stream, &self.transition(v_current)?)
    }
}
