//! Synthetic scenes and numerical checks of the noise models behind the
//! observation-centric design: finite-difference velocity noise, error
//! growth without observations, and the density of the direction estimate.

mod check;
mod pdf;
pub mod quadrature;
mod scene;
mod suite;
mod trials;

pub use check::{noise_check, CheckRow, PDF_CONFIGS};
pub use pdf::{direction_noise_pdf, pdf_histogram_deviation, pdf_integral, DirectionNoiseParams};
pub use scene::{generate_scene, Motion, Scene, ScenePlan, TargetPlan};
pub use suite::{
    ablation_plan, ablation_suite, crossing_plan, throughput_plan, ABLATION_SCENES, CROSSING_RECOVERY_FRAME,
};
pub use trials::{
    accumulation_trial, exact_accumulation_variance, general_accumulation_variance, marginal_variance_recursion,
    position_velocity_ratio, sample_variance, simplified_accumulation_variance, velocity_noise_variance,
    velocity_variance_trial, AccumulationMode,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the lab: ChaCha with 8 rounds, seeded
/// from a `u64` and split into independent streams by purpose.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
