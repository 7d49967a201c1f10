//! The full battery of noise-model checks, as report rows.

use super::pdf::{pdf_histogram_deviation, pdf_integral, DirectionNoiseParams};
use super::trials::*;
use crate::error::Result;

/// One analytic-versus-empirical comparison; `pass` iff
/// `|analytic - empirical| <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub parameter: String,
    pub analytic: f64,
    pub empirical: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(parameter: impl Into<String>, analytic: f64, empirical: f64, tolerance: f64) -> Self {
        let pass = (analytic - empirical).abs() <= tolerance;
        Self {
            parameter: parameter.into(),
            analytic,
            empirical,
            tolerance,
            pass,
        }
    }

    pub fn csv_header() -> &'static str {
        "parameter,analytic,empirical,tolerance,pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.9},{:.9},{:.9},{}",
            self.parameter, self.analytic, self.empirical, self.tolerance, self.pass
        )
    }
}

/// `(mu_y, mu_w)` for the four direction-density configurations, with
/// `mu_z = mu_y / mu_w` in {0.1, 0.5, 2, 5} and unit noise.
pub const PDF_CONFIGS: [(f64, f64); 4] = [(0.3, 3.0), (1.5, 3.0), (6.0, 3.0), (20.0, 4.0)];

pub const TRIALS: usize = 100_000;
pub const PDF_SAMPLES: usize = 1_000_000;

/// Runs every check with the given seed.
pub fn noise_check(seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for dt in [1u32, 2, 4] {
        let analytic = velocity_noise_variance(1.0, f64::from(dt));
        let empirical = velocity_variance_trial(1.0, dt, TRIALS, seed);
        rows.push(CheckRow::new(
            format!("velocity_variance[dt={dt}]"),
            analytic,
            empirical,
            0.05 * analytic,
        ));
    }

    let analytic = simplified_accumulation_variance(1.0, 10);
    let empirical = accumulation_trial(AccumulationMode::Simplified, 1.0, 0.0, 10, TRIALS, seed);
    rows.push(CheckRow::new(
        "simplified_accumulation[T=10]",
        analytic,
        empirical,
        0.1 * analytic,
    ));

    for t in [1u32, 5, 10] {
        let closed = general_accumulation_variance(1.0, 0.01, t);
        rows.push(CheckRow::new(
            format!("general_accumulation_recursion[T={t}]"),
            closed,
            marginal_variance_recursion(1.0, 0.01, t),
            1e-9,
        ));
        rows.push(CheckRow::new(
            format!("position_velocity_ratio[T={t}]"),
            200.0 / f64::from(t),
            position_velocity_ratio(1.0, 0.01, t),
            1e-9,
        ));
        let exact = exact_accumulation_variance(1.0, 0.01, t);
        let empirical = accumulation_trial(AccumulationMode::General, 1.0, 0.1, t, TRIALS, seed);
        rows.push(CheckRow::new(
            format!("general_accumulation_mc[T={t}]"),
            exact,
            empirical,
            0.05 * exact,
        ));
    }

    for (mu_y, mu_w) in PDF_CONFIGS {
        let p = DirectionNoiseParams::unit(mu_y, mu_w);
        let mu_z = p.mu_z();
        rows.push(CheckRow::new(
            format!("pdf_integral[mu_z={mu_z}]"),
            1.0,
            pdf_integral(&p, -100.0, 100.0)?,
            1e-3,
        ));
        let dev = pdf_histogram_deviation(&p, PDF_SAMPLES, mu_z - 4.0, 0.05, 160, seed)?;
        rows.push(CheckRow::new(
            format!("pdf_histogram_sup_deviation[mu_z={mu_z}]"),
            0.0,
            dev,
            0.02,
        ));
    }
    Ok(rows)
}
