//! Closed-form density of `z = y / w` for jointly Gaussian `(y, w)`,
//! the tangent of a direction estimated from two noisy observations.

use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// True displacements, their noise and correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionNoiseParams {
    pub mu_y: f64,
    pub mu_w: f64,
    pub sigma_y: f64,
    pub sigma_w: f64,
    pub rho: f64,
}

impl DirectionNoiseParams {
    /// Unit noise and no correlation, with `mu_y = mu_z * mu_w`.
    pub fn unit(mu_y: f64, mu_w: f64) -> Self {
        Self {
            mu_y,
            mu_w,
            sigma_y: 1.0,
            sigma_w: 1.0,
            rho: 0.0,
        }
    }

    pub fn mu_z(&self) -> f64 {
        self.mu_y / self.mu_w
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma_y > 0.0
            && self.sigma_w > 0.0
            && self.rho.abs() < 1.0
            && self.mu_y.is_finite()
            && self.mu_w.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Numeric(format!("invalid direction-noise parameters {self:?}")))
        }
    }
}

/// Standard normal CDF.
fn phi(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Density of `z = y / w` at `z`.
pub fn direction_noise_pdf(z: f64, p: &DirectionNoiseParams) -> Result<f64> {
    p.validate()?;
    let DirectionNoiseParams {
        mu_y,
        mu_w,
        sigma_y: sy,
        sigma_w: sw,
        rho,
    } = *p;
    let r = (z * z / (sy * sy) - 2.0 * rho * z / (sy * sw) + 1.0 / (sw * sw)).sqrt();
    let g = mu_y * z / (sy * sy) - rho * (mu_y + mu_w * z) / (sy * sw) + mu_w / (sw * sw);
    let alpha = mu_w * mu_w / (sw * sw) + mu_y * mu_y / (sy * sy) - 2.0 * rho * mu_y * mu_w / (sw * sy);
    let beta = (1.0 - rho * rho).sqrt();

    let ratio = g / (beta * r);
    let exponent = (g * g - alpha * r * r) / (2.0 * beta * beta * r * r);
    let first = g * exponent.exp() / ((2.0 * PI).sqrt() * sw * sy * r.powi(3)) * (phi(ratio) - phi(-ratio));
    let second = beta * (-alpha / (2.0 * beta * beta)).exp() / (PI * sw * sy * r * r);
    let density = first + second;
    if density.is_finite() {
        Ok(density)
    } else {
        Err(Error::Numeric(format!("density at z = {z} is not finite")))
    }
}

/// Integral of the density over `[lo, hi]`.
pub fn pdf_integral(p: &DirectionNoiseParams, lo: f64, hi: f64) -> Result<f64> {
    p.validate()?;
    let f = |z: f64| direction_noise_pdf(z, p).unwrap_or(f64::NAN);
    let v = super::quadrature::integrate(f, lo, hi, &[p.mu_z(), 0.0], 64, 1e-6);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numeric("density integral is not finite".into()))
    }
}

/// Largest absolute difference between a histogram density of `samples`
/// Monte Carlo ratios and the bin-averaged closed-form density, over
/// `bins` bins of width `bin_width` starting at `lo`.
pub fn pdf_histogram_deviation(
    p: &DirectionNoiseParams,
    samples: usize,
    lo: f64,
    bin_width: f64,
    bins: usize,
    seed: u64,
) -> Result<f64> {
    use rand::Rng;
    use rand_distr::StandardNormal;

    p.validate()?;
    let mut rng = super::rng(seed, 3);
    let mut counts = vec![0usize; bins];
    let tail = (1.0 - p.rho * p.rho).sqrt();
    for _ in 0..samples {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let y = p.mu_y + p.sigma_y * a;
        let w = p.mu_w + p.sigma_w * (p.rho * a + tail * b);
        let k = ((y / w - lo) / bin_width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    let f = |z: f64| direction_noise_pdf(z, p).unwrap_or(f64::NAN);
    let mut worst: f64 = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let a = lo + bin_width * k as f64;
        let expected = super::quadrature::integrate(f, a, a + bin_width, &[], 1, 1e-10) / bin_width;
        let observed = c as f64 / (samples as f64 * bin_width);
        worst = worst.max((observed - expected).abs());
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(Error::Numeric("histogram comparison is not finite".into()))
    }
}
