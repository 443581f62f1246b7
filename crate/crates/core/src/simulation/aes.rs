use super::cir::CirStepper;
use super::{Kernel, State};
use crate::distributions::{sample_standard_normal, RngStream};
use crate::error::Result;
use crate::models::{DoubleHestonParams, HestonParams};

/// Log-price coefficients of the single-factor scheme:
/// `x' = x + c0 + c1 v + c2 v' + sqrt(c3 v) Z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AesHestonCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AesHestonCoefficients {
    pub fn new(p: &HestonParams, dt: f64) -> Self {
        let a = p.rho / p.gamma;
        Self {
            c0: (p.r - a * p.kappa * p.nu_bar) * dt,
            c1: (a * p.kappa - 0.5) * dt - a,
            c2: a,
            c3: (1.0 - p.rho * p.rho) * dt,
        }
    }
}

/// Log-price coefficients of the two-factor scheme:
/// `x' = x + c0 + c1 v1 + c2 v2 + c3 v1' + c4 v2' + sqrt(c5 v1) Z1 + sqrt(c6 v2) Z2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AesDoubleHestonCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
}

impl AesDoubleHestonCoefficients {
    pub fn new(p: &DoubleHestonParams, dt: f64) -> Self {
        let (f1, f2) = (&p.factor1, &p.factor2);
        let a1 = p.rho_13 / f1.gamma;
        let a2 = p.rho_24 / f2.gamma;
        Self {
            c0: (p.r - a1 * f1.kappa * f1.nu_bar - a2 * f2.kappa * f2.nu_bar) * dt,
            c1: (a1 * f1.kappa - 0.5) * dt - a1,
            c2: (a2 * f2.kappa - 0.5) * dt - a2,
            c3: a1,
            c4: a2,
            c5: (1.0 - p.rho_13 * p.rho_13) * dt,
            c6: (1.0 - p.rho_24 * p.rho_24) * dt,
        }
    }
}

pub(crate) struct HestonKernel {
    cir: CirStepper,
    c: AesHestonCoefficients,
}

impl HestonKernel {
    pub fn new(p: &HestonParams, dt: f64) -> Result<Self> {
        Ok(Self {
            cir: CirStepper::for_factor(&p.variance_factor(), dt)?,
            c: AesHestonCoefficients::new(p, dt),
        })
    }
}

impl Kernel for HestonKernel {
    fn factors(&self) -> usize {
        1
    }

    #[inline]
    fn advance(&self, stream: &mut RngStream, s: &mut State) -> Result<()> {
        let v = s.v[0];
        let v_next = self.cir.step(stream, v)?;
        let z = sample_standard_normal(stream);
        let c = &self.c;
        s.x += c.c0 + c.c1 * v + c.c2 * v_next + (c.c3 * v).sqrt() * z;
        s.v[0] = v_next;
        Ok(())
    }
}

pub(crate) struct DoubleHestonKernel {
    cir1: CirStepper,
    cir2: CirStepper,
    c: AesDoubleHestonCoefficients,
}

impl DoubleHestonKernel {
    pub fn new(p: &DoubleHestonParams, dt: f64) -> Result<Self> {
        Ok(Self {
            cir1: CirStepper::for_factor(&p.factor1, dt)?,
            cir2: CirStepper::for_factor(&p.factor2, dt)?,
            c: AesDoubleHestonCoefficients::new(p, dt),
        })
    }
}

impl Kernel for DoubleHestonKernel {
    fn factors(&self) -> usize {
        2
    }

    #[inline]
    fn advance(&self, stream: &mut RngStream, s: &mut State) -> Result<()> {
        let [v1, v2] = s.v;
        let n1 = self.cir1.step(stream, v1)?;
        let n2 = self.cir2.step(stream, v2)?;
        let z1 = sample_standard_normal(stream);
        let z2 = sample_standard_normal(stream);
        let c = &self.c;
        s.x += c.c0
            + c.c1 * v1
            + c.c2 * v2
            + c.c3 * n1
            + c.c4 * n2
            + (c.c5 * v1).sqrt() * z1
            + (c.c6 * v2).sqrt() * z2;
        s.v = [n1, n2];
        Ok(())
    }
}
