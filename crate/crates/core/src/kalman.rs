//! Constant-velocity Kalman filter over the 7-dimensional box state
//! `[u, v, s, r, u_dot, v_dot, s_dot]`, with the observation-centric
//! re-update used to repair a track after an occlusion.

use nalgebra::{SMatrix, SVector};

use crate::bbox::BBox;
use crate::error::{Error, Result};

pub type Vector7 = SVector<f64, 7>;
pub type Vector4 = SVector<f64, 4>;
pub type Matrix7 = SMatrix<f64, 7, 7>;
pub type Matrix4 = SMatrix<f64, 4, 4>;
pub type Matrix4x7 = SMatrix<f64, 4, 7>;

/// Full filter state: center `(u, v)`, area `s`, aspect ratio `r` and the
/// rates of change of `u`, `v`, `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub u: f64,
    pub v: f64,
    pub s: f64,
    pub r: f64,
    pub u_dot: f64,
    pub v_dot: f64,
    pub s_dot: f64,
}

impl StateVector {
    pub fn from_vector(x: &Vector7) -> Self {
        Self {
            u: x[0],
            v: x[1],
            s: x[2],
            r: x[3],
            u_dot: x[4],
            v_dot: x[5],
            s_dot: x[6],
        }
    }

    pub fn to_vector(&self) -> Vector7 {
        Vector7::from([self.u, self.v, self.s, self.r, self.u_dot, self.v_dot, self.s_dot])
    }

    /// Lifts an observation to a state with zero velocity.
    pub fn from_observation(z: &Observation) -> Self {
        Self {
            u: z.u,
            v: z.v,
            s: z.s,
            r: z.r,
            u_dot: 0.0,
            v_dot: 0.0,
            s_dot: 0.0,
        }
    }
}

/// The measured part of the state: center, area and aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub u: f64,
    pub v: f64,
    pub s: f64,
    pub r: f64,
}

impl Observation {
    pub fn to_vector(&self) -> Vector4 {
        Vector4::new(self.u, self.v, self.s, self.r)
    }

    pub fn from_vector(z: &Vector4) -> Self {
        Self {
            u: z[0],
            v: z[1],
            s: z[2],
            r: z[3],
        }
    }

    pub fn to_box(&self) -> Result<BBox> {
        state_to_box(&StateVector::from_observation(self))
    }
}

/// Converts a corner-form box to `(u, v, s, r)`.
pub fn box_to_observation(b: &BBox) -> Result<Observation> {
    b.validate()?;
    let (w, h) = (b.width(), b.height());
    Ok(Observation {
        u: b.x1 + w / 2.0,
        v: b.y1 + h / 2.0,
        s: w * h,
        r: w / h,
    })
}

/// Converts a state back to a corner-form box. The area and aspect ratio
/// must be positive; callers clamp or discard states that violate this.
pub fn state_to_box(x: &StateVector) -> Result<BBox> {
    if !(x.s > 0.0 && x.r > 0.0 && x.s.is_finite() && x.r.is_finite()) {
        return Err(Error::InvalidState { area: x.s, ratio: x.r });
    }
    let w = (x.s * x.r).sqrt();
    let h = x.s / w;
    Ok(BBox::new(x.u - w / 2.0, x.v - h / 2.0, x.u + w / 2.0, x.v + h / 2.0))
}

/// Noise configuration of the filter, as diagonals.
///
/// The process noise default is the value commonly used by SORT
/// implementations; the observation noise and initial covariance follow the
/// same reference implementation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub initial_covariance: [f64; 7],
    pub process_noise: [f64; 7],
    pub observation_noise: [f64; 4],
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            initial_covariance: [10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4],
            process_noise: [1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.0001],
            observation_noise: [1.0, 1.0, 10.0, 10.0],
        }
    }
}

/// Model matrices of the linear system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionModel {
    pub transition: Matrix7,
    pub observation: Matrix4x7,
    pub process_noise: Matrix7,
    pub observation_noise: Matrix4,
}

impl MotionModel {
    pub fn new(config: &FilterConfig) -> Self {
        Self {
            transition: transition_matrix(),
            observation: observation_matrix(),
            process_noise: Matrix7::from_diagonal(&Vector7::from(config.process_noise)),
            observation_noise: Matrix4::from_diagonal(&Vector4::from(config.observation_noise)),
        }
    }
}

/// Identity with unit couplings `u <- u_dot`, `v <- v_dot`, `s <- s_dot` (one frame step).
pub fn transition_matrix() -> Matrix7 {
    let mut f = Matrix7::identity();
    f[(0, 4)] = 1.0;
    f[(1, 5)] = 1.0;
    f[(2, 6)] = 1.0;
    f
}

pub fn observation_matrix() -> Matrix4x7 {
    let mut h = Matrix4x7::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

/// Mean, covariance and model of one filter. A plain value: every
/// operation returns a new state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub mean: Vector7,
    pub covariance: Matrix7,
    pub model: MotionModel,
}

impl FilterState {
    /// Initializes at `z` with zero velocity.
    pub fn new(z: &Observation, config: &FilterConfig) -> Self {
        Self {
            mean: StateVector::from_observation(z).to_vector(),
            covariance: Matrix7::from_diagonal(&Vector7::from(config.initial_covariance)),
            model: MotionModel::new(config),
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_vector(&self.mean)
    }

    pub fn to_box(&self) -> Result<BBox> {
        state_to_box(&self.state())
    }

    /// One-frame prediction. If the predicted area would not be positive,
    /// the area rate is zeroed first.
    pub fn predict(&self) -> Self {
        let mut mean = self.mean;
        if mean[2] + mean[6] <= 0.0 {
            mean[6] = 0.0;
        }
        let f = &self.model.transition;
        Self {
            mean: f * mean,
            covariance: f * self.covariance * f.transpose() + self.model.process_noise,
            model: self.model,
        }
    }

    /// Standard measurement update, with the innovation covariance
    /// inverted through its Cholesky factor.
    pub fn update(&self, z: &Observation) -> Result<Self> {
        let h = &self.model.observation;
        let p = &self.covariance;
        let innovation_cov = h * p * h.transpose() + self.model.observation_noise;
        let chol = innovation_cov.cholesky().ok_or(Error::SingularInnovation)?;
        // K = P H^T S^-1, computed as (S^-1 H P)^T since P and S are symmetric.
        let gain = chol.solve(&(h * p)).transpose();
        let residual = z.to_vector() - h * self.mean;
        let mean = self.mean + gain * residual;
        let covariance = (Matrix7::identity() - gain * h) * p;
        Ok(Self {
            mean,
            covariance: symmetrize(&covariance),
            model: self.model,
        })
    }

    /// Uses the prior as the posterior when no observation is available.
    pub fn dummy_update(&self) -> Self {
        *self
    }

    pub fn snapshot(&self, frame: u32) -> FilterSnapshot {
        FilterSnapshot { state: *self, frame }
    }
}

fn symmetrize(m: &Matrix7) -> Matrix7 {
    (m + m.transpose()) * 0.5
}

/// Filter state captured at the frame of the last real observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSnapshot {
    pub state: FilterState,
    pub frame: u32,
}

impl FilterSnapshot {
    /// Rolls back to this snapshot and replays predict/update along the
    /// virtual observations, then predicts to `final_frame` and updates with
    /// the real observation there.
    ///
    /// Frames in the gap without a virtual observation get a dummy update.
    pub fn re_update(
        &self,
        virtual_obs: &[(u32, Observation)],
        final_frame: u32,
        final_obs: &Observation,
    ) -> Result<FilterState> {
        if final_frame <= self.frame {
            return Err(Error::InvalidReplay(format!(
                "final frame {final_frame} is not after snapshot frame {}",
                self.frame
            )));
        }
        let mut state = self.state;
        let mut pending = virtual_obs.iter().peekable();
        for frame in self.frame + 1..final_frame {
            state = state.predict();
            match pending.peek() {
                Some((f, z)) if *f == frame => {
                    state = state.update(z)?;
                    pending.next();
                }
                Some((f, _)) if *f < frame => {
                    return Err(Error::InvalidReplay(format!("virtual frame {f} out of order")));
                }
                _ => state = state.dummy_update(),
            }
        }
        if let Some((f, _)) = pending.next() {
            return Err(Error::InvalidReplay(format!(
                "virtual frame {f} is outside ({}, {final_frame})",
                self.frame
            )));
        }
        state.predict().update(final_obs)
    }
}
