//! Seeded sampling primitives.
//!
//! Every path owns an [`RngStream`] keyed by `(seed, stream_id)`. The stream is
//! a ChaCha8 generator whose key is derived from the seed and whose 64-bit
//! stream selector is the path index, so the numbers a path sees never depend
//! on how many other paths were simulated before it or on which worker ran it.
//!
//! The noncentral chi-squared sampler uses the Poisson mixture
//! `chi2(dof, lambda) = Gamma((dof + 2N) / 2, 2)` with `N ~ Poisson(lambda / 2)`,
//! which is exact for every `dof > 0`, including `dof < 1`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};

/// Largest Poisson mixing rate (`lambda / 2`) accepted by the noncentral sampler.
pub const MAX_POISSON_MIXING_RATE: f64 = 1.0e9;

/// Reproducible random stream for one path.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Degrees of freedom and noncentrality of a noncentral chi-squared law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoncentralChiSqParams {
    dof: f64,
    noncentrality: f64,
}

impl NoncentralChiSqParams {
    pub fn new(dof: f64, noncentrality: f64) -> Result<Self> {
        if !(dof.is_finite() && dof > 0.0) {
            return Err(Error::Sampler(format!(
                "degrees of freedom must be positive and finite, got {dof}"
            )));
        }
        if !(noncentrality.is_finite() && noncentrality >= 0.0) {
            return Err(Error::Sampler(format!(
                "noncentrality must be non-negative and finite, got {noncentrality}"
            )));
        }
        if noncentrality / 2.0 > MAX_POISSON_MIXING_RATE {
            return Err(Error::Sampler(format!(
                "noncentrality {noncentrality} exceeds the supported range; is the time step mis-scaled?"
            )));
        }
        Ok(Self { dof, noncentrality })
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn noncentrality(&self) -> f64 {
        self.noncentrality
    }

    pub fn mean(&self) -> f64 {
        self.dof + self.noncentrality
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.dof + 4.0 * self.noncentrality
    }
}

pub fn sample_standard_normal(stream: &mut RngStream) -> f64 {
    StandardNormal.sample(stream)
}

/// One `Gamma(shape, scale)` draw. Shapes below one are boosted through
/// `Gamma(shape + 1) * U^(1/shape)`.
pub fn sample_gamma(stream: &mut RngStream, shape: f64, scale: f64) -> Result<f64> {
    if !(shape.is_finite() && shape > 0.0) {
        return Err(Error::Sampler(format!("gamma shape must be positive, got {shape}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Sampler(format!("gamma scale must be positive, got {scale}")));
    }
    Ok(gamma_unchecked(stream, shape, scale))
}

#[inline]
fn gamma_unchecked(stream: &mut RngStream, shape: f64, scale: f64) -> f64 {
    // Arguments are validated by the callers; `Gamma::new` cannot fail here.
    Gamma::new(shape, scale)
        .expect("validated gamma parameters")
        .sample(stream)
}

pub fn sample_poisson(stream: &mut RngStream, rate: f64) -> Result<u64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Sampler(format!(
            "poisson rate must be non-negative and finite, got {rate}"
        )));
    }
    Ok(poisson_unchecked(stream, rate))
}

#[inline]
fn poisson_unchecked(stream: &mut RngStream, rate: f64) -> u64 {
    if rate == 0.0 {
        return 0;
    }
    let k: f64 = Poisson::new(rate)
        .expect("validated poisson rate")
        .sample(stream);
    k as u64
}

pub fn sample_noncentral_chisq(stream: &mut RngStream, p: &NoncentralChiSqParams) -> f64 {
    let n = poisson_unchecked(stream, 0.5 * p.noncentrality);
    gamma_unchecked(stream, 0.5 * p.dof + n as f64, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = RngStream::new(1, 0);
        let mut b = RngStream::new(1, 0);
        let x = sample_standard_normal(&mut a);
        let y = sample_standard_normal(&mut b);
        assert_eq!(x.to_bits(), y.to_bits());
        assert_eq!(a.counter(), b.counter());
    }

    #[test]
    fn distinct_streams_differ() {
        let a: Vec<u64> = {
            let mut s = RngStream::new(7, 0);
            (0..8).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = RngStream::new(7, 1);
            (0..8).map(|_| s.next_u64()).collect()
        };
        assert_ne!(a, b);
    }

    #[test]
    fn standard_normal_moments() {
        let mut s = RngStream::new(11, 3);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_standard_normal(&mut s)).collect();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 4e-3, "mean {m}");
        assert!((v - 1.0).abs() < 6e-3, "variance {v}");
    }

    #[test]
    fn gamma_means() {
        let mut s = RngStream::new(5, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_gamma(&mut s, 2.0, 3.0).unwrap())
            .collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 6.0).abs() < 0.013, "mean {m}");

        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_gamma(&mut s, 0.5, 2.0).unwrap())
            .collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 1.0).abs() < 0.005, "mean {m}");
    }

    #[test]
    fn small_shape_gamma_is_non_negative() {
        let mut s = RngStream::new(5, 1);
        for _ in 0..200_000 {
            assert!(sample_gamma(&mut s, 0.5262, 2.0).unwrap() >= 0.0);
        }
    }

    #[test]
    fn gamma_rejects_bad_arguments() {
        let mut s = RngStream::new(0, 0);
        assert!(sample_gamma(&mut s, 0.0, 1.0).is_err());
        assert!(sample_gamma(&mut s, 1.0, -1.0).is_err());
        assert!(sample_gamma(&mut s, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn poisson_degenerate_and_moments() {
        let mut s = RngStream::new(9, 0);
        assert_eq!(sample_poisson(&mut s, 0.0).unwrap(), 0);
        assert!(sample_poisson(&mut s, -1.0).is_err());
        assert!(sample_poisson(&mut s, f64::INFINITY).is_err());

        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_poisson(&mut s, 4.0).unwrap() as f64)
            .collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.006, "mean {m}");

        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| sample_poisson(&mut s, 1000.0).unwrap() as f64)
            .collect();
        let (_, v) = mean_var(&xs);
        assert!((v - 1000.0).abs() < 5.0, "variance {v}");
    }

    #[test]
    fn noncentral_params_validation() {
        assert!(NoncentralChiSqParams::new(0.0, 1.0).is_err());
        assert!(NoncentralChiSqParams::new(1.0, -0.1).is_err());
        assert!(NoncentralChiSqParams::new(1.0, 2.0 * MAX_POISSON_MIXING_RATE + 10.0).is_err());
        assert!(NoncentralChiSqParams::new(1.0525, 0.0).is_ok());
    }

    #[test]
    fn central_case_mean() {
        let p = NoncentralChiSqParams::new(3.9506, 0.0).unwrap();
        let mut s = RngStream::new(21, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_noncentral_chisq(&mut s, &p)).collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 3.9506).abs() < 0.01, "mean {m}");
    }

    #[test]
    fn noncentral_mean() {
        let p = NoncentralChiSqParams::new(1.0525, 2.5).unwrap();
        let mut s = RngStream::new(22, 0);
        let xs: Vec<f64> = (0..1_000_000).map(|_| sample_noncentral_chisq(&mut s, &p)).collect();
        let (m, _) = mean_var(&xs);
        assert!((m - 3.5525).abs() < 0.01, "mean {m}");
        assert!(xs.iter().all(|&x| x >= 0.0));
    }
}
