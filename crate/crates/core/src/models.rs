//! Model parameter bundles, validation, payoff and named parameter presets.

use serde::{Deserialize, Serialize};

use crate::error::{ValidationErrors, Violation};

/// Strict Feller inequality `2 kappa nu_bar > gamma^2`.
pub fn feller_holds(kappa: f64, nu_bar: f64, gamma: f64) -> bool {
    2.0 * kappa * nu_bar > gamma * gamma
}

/// Single-factor Heston parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub s0: f64,
    pub v0: f64,
    pub r: f64,
    pub kappa: f64,
    pub nu_bar: f64,
    pub gamma: f64,
    pub rho: f64,
}

/// One square-root variance factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirFactor {
    pub v0: f64,
    pub kappa: f64,
    pub nu_bar: f64,
    pub gamma: f64,
}

impl CirFactor {
    pub fn feller_holds(&self) -> bool {
        feller_holds(self.kappa, self.nu_bar, self.gamma)
    }

    /// Conditional mean of the variance after `t` years, started at `v`.
    pub fn conditional_mean(&self, v: f64, t: f64) -> f64 {
        let e = (-self.kappa * t).exp();
        v * e + self.nu_bar * (1.0 - e)
    }

    /// Conditional variance of the variance after `t` years, started at `v`.
    pub fn conditional_variance(&self, v: f64, t: f64) -> f64 {
        let e = (-self.kappa * t).exp();
        let g2 = self.gamma * self.gamma;
        v * g2 * e * (1.0 - e) / self.kappa
            + self.nu_bar * g2 * (1.0 - e) * (1.0 - e) / (2.0 * self.kappa)
    }

    fn check(&self, suffix: &str, out: &mut Vec<Violation>) {
        positive(&format!("v0{suffix}"), self.v0, out);
        positive(&format!("kappa{suffix}"), self.kappa, out);
        positive(&format!("nu_bar{suffix}"), self.nu_bar, out);
        positive(&format!("gamma{suffix}"), self.gamma, out);
    }
}

impl HestonParams {
    pub fn variance_factor(&self) -> CirFactor {
        CirFactor {
            v0: self.v0,
            kappa: self.kappa,
            nu_bar: self.nu_bar,
            gamma: self.gamma,
        }
    }

    pub fn feller_holds(&self) -> bool {
        feller_holds(self.kappa, self.nu_bar, self.gamma)
    }

    pub fn validate(self) -> Result<Self, ValidationErrors> {
        let mut out = Vec::new();
        positive("s0", self.s0, &mut out);
        finite("r", self.r, &mut out);
        self.variance_factor().check("", &mut out);
        correlation("rho", self.rho, &mut out);
        finish(self, out)
    }
}

/// Two-factor (double) Heston parameters. Factor `j` drives the asset through
/// its own Brownian motion, correlated only with that factor's variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleHestonParams {
    pub s0: f64,
    pub r: f64,
    pub factor1: CirFactor,
    pub factor2: CirFactor,
    pub rho_13: f64,
    pub rho_24: f64,
}

impl DoubleHestonParams {
    pub fn validate(self) -> Result<Self, ValidationErrors> {
        let mut out = Vec::new();
        positive("s0", self.s0, &mut out);
        finite("r", self.r, &mut out);
        self.factor1.check("_1", &mut out);
        self.factor2.check("_2", &mut out);
        correlation("rho_13", self.rho_13, &mut out);
        correlation("rho_24", self.rho_24, &mut out);
        finish(self, out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Heston,
    DoubleHeston,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelParams {
    Heston(HestonParams),
    DoubleHeston(DoubleHestonParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Heston(_) => ModelKind::Heston,
            ModelParams::DoubleHeston(_) => ModelKind::DoubleHeston,
        }
    }

    pub fn s0(&self) -> f64 {
        match self {
            ModelParams::Heston(p) => p.s0,
            ModelParams::DoubleHeston(p) => p.s0,
        }
    }

    pub fn r(&self) -> f64 {
        match self {
            ModelParams::Heston(p) => p.r,
            ModelParams::DoubleHeston(p) => p.r,
        }
    }

    pub fn with_spot(mut self, s0: f64) -> Self {
        match &mut self {
            ModelParams::Heston(p) => p.s0 = s0,
            ModelParams::DoubleHeston(p) => p.s0 = s0,
        }
        self
    }

    pub fn validate(self) -> Result<Self, ValidationErrors> {
        match self {
            ModelParams::Heston(p) => p.validate().map(ModelParams::Heston),
            ModelParams::DoubleHeston(p) => p.validate().map(ModelParams::DoubleHeston),
        }
    }

    /// Names of the variance factors that violate the Feller condition.
    pub fn feller_warnings(&self) -> Vec<&'static str> {
        match self {
            ModelParams::Heston(p) if !p.feller_holds() => vec!["variance"],
            ModelParams::Heston(_) => vec![],
            ModelParams::DoubleHeston(p) => {
                let mut w = Vec::new();
                if !p.factor1.feller_holds() {
                    w.push("variance factor 1");
                }
                if !p.factor2.feller_holds() {
                    w.push("variance factor 2");
                }
                w
            }
        }
    }
}

impl From<HestonParams> for ModelParams {
    fn from(p: HestonParams) -> Self {
        ModelParams::Heston(p)
    }
}

impl From<DoubleHestonParams> for ModelParams {
    fn from(p: DoubleHestonParams) -> Self {
        ModelParams::DoubleHeston(p)
    }
}

/// European-style put payoff `(K - s)^+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PutPayoff {
    strike: f64,
}

impl PutPayoff {
    pub fn new(strike: f64) -> Result<Self, ValidationErrors> {
        let mut out = Vec::new();
        positive("strike", strike, &mut out);
        finish(Self { strike }, out)
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        (self.strike - s).max(0.0)
    }
}

pub fn put_payoff(p: &PutPayoff, s: f64) -> f64 {
    p.value(s)
}

/// Built-in parameter sets together with their option strike and maturity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Positive correlation, Feller condition satisfied.
    FellerHolding,
    /// Negative correlation, Feller condition violated.
    FellerViolating,
    /// Two-factor set with both factors violating the Feller condition.
    DoubleHestonZhang,
}

impl Preset {
    pub const ALL: [Preset; 3] = [
        Preset::FellerHolding,
        Preset::FellerViolating,
        Preset::DoubleHestonZhang,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FellerHolding => "feller-holding",
            Preset::FellerViolating => "feller-violating",
            Preset::DoubleHestonZhang => "double-heston-zhang",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn params(&self) -> ModelParams {
        match self {
            Preset::FellerHolding => ModelParams::Heston(HestonParams {
                s0: 10.0,
                v0: 0.0625,
                r: 0.1,
                kappa: 5.0,
                nu_bar: 0.16,
                gamma: 0.9,
                rho: 0.1,
            }),
            Preset::FellerViolating => ModelParams::Heston(HestonParams {
                s0: 100.0,
                v0: 0.0348,
                r: 0.04,
                kappa: 1.15,
                nu_bar: 0.0348,
                gamma: 0.39,
                rho: -0.64,
            }),
            Preset::DoubleHestonZhang => ModelParams::DoubleHeston(DoubleHestonParams {
                s0: 61.9,
                r: 0.03,
                factor1: CirFactor {
                    v0: 0.2,
                    kappa: 0.9,
                    nu_bar: 0.1,
                    gamma: 0.1,
                },
                factor2: CirFactor {
                    v0: 0.49,
                    kappa: 1.2,
                    nu_bar: 0.15,
                    gamma: 0.2,
                },
                rho_13: -0.5,
                rho_24: -0.5,
            }),
        }
    }

    pub fn strike(&self) -> f64 {
        match self {
            Preset::FellerHolding => 10.0,
            Preset::FellerViolating => 100.0,
            Preset::DoubleHestonZhang => 61.9,
        }
    }

    pub fn maturity(&self) -> f64 {
        0.25
    }
}

fn positive(field: &str, x: f64, out: &mut Vec<Violation>) {
    if !(x.is_finite() && x > 0.0) {
        out.push(Violation::new(field, format!("{field} must be positive")));
    }
}

fn finite(field: &str, x: f64, out: &mut Vec<Violation>) {
    if !x.is_finite() {
        out.push(Violation::new(field, format!("{field} must be finite")));
    }
}

fn correlation(field: &str, x: f64, out: &mut Vec<Violation>) {
    if !(-1.0..=1.0).contains(&x) {
        out.push(Violation::new(field, format!("{field} must lie in [-1,1]")));
    }
}

fn finish<T>(value: T, out: Vec<Violation>) -> Result<T, ValidationErrors> {
    if out.is_empty() {
        Ok(value)
    } else {
        Err(ValidationErrors(out))
    }
}
