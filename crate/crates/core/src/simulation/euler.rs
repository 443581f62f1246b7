use super::{Kernel, State};
use crate::distributions::{sample_standard_normal, RngStream};
use crate::error::Result;
use crate::models::{CirFactor, DoubleHestonParams, HestonParams};

/// Truncated Euler variance update; the positive part is applied to the whole update.
#[inline]
pub(crate) fn truncated_euler_variance(f: &CirFactor, v: f64, dt: f64, z: f64) -> f64 {
    (v + f.kappa * (f.nu_bar - v) * dt + f.gamma * (v * dt).sqrt() * z).max(0.0)
}

pub(crate) struct HestonKernel {
    factor: CirFactor,
    r: f64,
    rho: f64,
    rho_bar: f64,
    dt: f64,
}

impl HestonKernel {
    pub fn new(p: &HestonParams, dt: f64) -> Self {
        Self {
            factor: p.variance_factor(),
            r: p.r,
            rho: p.rho,
            rho_bar: (1.0 - p.rho * p.rho).sqrt(),
            dt,
        }
    }
}

impl Kernel for HestonKernel {
    fn factors(&self) -> usize {
        1
    }

    #[inline]
    fn advance(&self, stream: &mut RngStream, s: &mut State) -> Result<()> {
        let zv = sample_standard_normal(stream);
        let zx = sample_standard_normal(stream);
        let v = s.v[0];
        let dt = self.dt;
        s.v[0] = truncated_euler_variance(&self.factor, v, dt, zv);
        s.x += (self.r - 0.5 * v) * dt + (v * dt).sqrt() * (self.rho * zv + self.rho_bar * zx);
        Ok(())
    }
}

pub(crate) struct DoubleHestonKernel {
    f1: CirFactor,
    f2: CirFactor,
    r: f64,
    rho_13: f64,
    rho_24: f64,
    rho_13_bar: f64,
    rho_24_bar: f64,
    dt: f64,
}

impl DoubleHestonKernel {
    pub fn new(p: &DoubleHestonParams, dt: f64) -> Self {
        Self {
            f1: p.factor1,
            f2: p.factor2,
            r: p.r,
            rho_13: p.rho_13,
            rho_24: p.rho_24,
            rho_13_bar: (1.0 - p.rho_13 * p.rho_13).sqrt(),
            rho_24_bar: (1.0 - p.rho_24 * p.rho_24).sqrt(),
            dt,
        }
    }
}

impl Kernel for DoubleHestonKernel {
    fn factors(&self) -> usize {
        2
    }

    #[inline]
    fn advance(&self, stream: &mut RngStream, s: &mut State) -> Result<()> {
        let zv1 = sample_standard_normal(stream);
        let zv2 = sample_standard_normal(stream);
        let z1 = sample_standard_normal(stream);
        let z2 = sample_standard_normal(stream);
        let [v1, v2] = s.v;
        let dt = self.dt;
        s.v = [
            truncated_euler_variance(&self.f1, v1, dt, zv1),
            truncated_euler_variance(&self.f2, v2, dt, zv2),
        ];
        s.x += (self.r - 0.5 * (v1 + v2)) * dt
            + (v1 * dt).sqrt() * (self.rho_13 * zv1 + self.rho_13_bar * z1)
            + (v2 * dt).sqrt() * (self.rho_24 * zv2 + self.rho_24_bar * z2);
        Ok(())
    }
}
