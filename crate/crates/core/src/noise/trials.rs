//! Monte Carlo trials and closed forms for velocity noise and its
//! accumulation over frames without observations.

use rand::Rng;
use rand_distr::StandardNormal;

use super::rng;

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Variance of a speed computed by finite difference of two positions
/// `delta_t` frames apart, each with i.i.d. noise `sigma`: `2 sigma^2 / delta_t^2`.
pub fn velocity_noise_variance(sigma: f64, delta_t: f64) -> f64 {
    2.0 * sigma * sigma / (delta_t * delta_t)
}

/// Position variance after `frames` steps driven only by a finite-difference
/// velocity with the noise above (one-frame difference): `2 T^2 sigma^2`.
pub fn simplified_accumulation_variance(sigma: f64, frames: u32) -> f64 {
    let t = f64::from(frames);
    2.0 * t * t * sigma * sigma
}

/// Position variance after `frames` unobserved steps, summing the position
/// and velocity variances step by step: `(T+1) s_u + T(T+1)/2 s_udot`.
pub fn general_accumulation_variance(var_u: f64, var_udot: f64, frames: u32) -> f64 {
    let t = f64::from(frames);
    (t + 1.0) * var_u + 0.5 * t * (t + 1.0) * var_udot
}

/// The step-by-step variance propagation behind
/// [`general_accumulation_variance`]: starting from `(var_u, var_udot)`,
/// each step adds the current velocity variance plus `var_u` to the
/// position and `var_udot` to the velocity.
pub fn marginal_variance_recursion(var_u: f64, var_udot: f64, frames: u32) -> f64 {
    let (mut pu, mut pv) = (var_u, var_udot);
    for _ in 0..frames {
        pu += pv + var_u;
        pv += var_udot;
    }
    pu
}

/// Exact position variance of the random-walk velocity model
/// `u += u_dot + w_u, u_dot += w_udot`, including the position/velocity
/// covariance that [`general_accumulation_variance`] leaves out:
/// `s_u + T q_u + T^2 s_udot + q_udot T(T-1)(2T-1)/6` with `q = s`.
pub fn exact_accumulation_variance(var_u: f64, var_udot: f64, frames: u32) -> f64 {
    let t = f64::from(frames);
    (t + 1.0) * var_u + t * t * var_udot + var_udot * t * (t - 1.0) * (2.0 * t - 1.0) / 6.0
}

/// Share of position-sourced over velocity-sourced noise in
/// [`general_accumulation_variance`]. With the default SORT process noise
/// (1 and 0.01) this is `200 / T`.
pub fn position_velocity_ratio(var_u: f64, var_udot: f64, frames: u32) -> f64 {
    let t = f64::from(frames);
    ((t + 1.0) * var_u) / (0.5 * t * (t + 1.0) * var_udot)
}

/// Sample variance of `(u_{t+dt} - u_t) / dt` with both positions carrying
/// i.i.d. noise `sigma`.
pub fn velocity_variance_trial(sigma: f64, delta_t: u32, trials: usize, seed: u64) -> f64 {
    let mut rng = rng(seed, 1);
    let dt = f64::from(delta_t);
    let speeds: Vec<f64> = (0..trials)
        .map(|_| {
            let u0 = sigma * normal(&mut rng);
            let u1 = sigma * normal(&mut rng);
            (u1 - u0) / dt
        })
        .collect();
    sample_variance(&speeds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccumulationMode {
    /// The anchor position is exact; the one-frame finite-difference velocity
    /// error is extrapolated for `T` frames.
    Simplified,
    /// Position and velocity both start noisy and both gain process noise
    /// every frame, as in the filter's predict step.
    General,
}

/// Sample variance of the position error after `frames` steps without
/// observations.
pub fn accumulation_trial(
    mode: AccumulationMode,
    sigma_u: f64,
    sigma_udot: f64,
    frames: u32,
    trials: usize,
    seed: u64,
) -> f64 {
    let mut rng = rng(seed, 2);
    let t = f64::from(frames);
    let errors: Vec<f64> = (0..trials)
        .map(|_| match mode {
            AccumulationMode::Simplified => {
                let speed = sigma_u * normal(&mut rng) - sigma_u * normal(&mut rng);
                t * speed
            }
            AccumulationMode::General => {
                let mut u = sigma_u * normal(&mut rng);
                let mut u_dot = sigma_udot * normal(&mut rng);
                for _ in 0..frames {
                    u += u_dot + sigma_u * normal(&mut rng);
                    u_dot += sigma_udot * normal(&mut rng);
                }
                u
            }
        })
        .collect();
    sample_variance(&errors)
}
