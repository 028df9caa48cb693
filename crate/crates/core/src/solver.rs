//! Integration of single momentum modes from vacuum through the pulse.
//!
//! The stabilized formulation is the default; the ten-component form is kept
//! for cross-validation, since it loses precision when the final occupation
//! is far below one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, PulseField};
use crate::ode::{self, Dopri5Options, OdeError};
use crate::wigner::{rhs_full10, rhs_reduced, ModeContext, WignerState10};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Stabilized occupation-plus-residual system (default).
    Reduced,
    /// Ten-component phase-space system.
    Full10,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: u64,
    pub formulation: Formulation,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 2_000_000,
            formulation: Formulation::Reduced,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(SolverError::InvalidSettings(format!(
                "rel_tol must lie in (0, 1e-3), got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1e-6) {
            return Err(SolverError::InvalidSettings(format!(
                "abs_tol must lie in (0, 1e-6), got {}",
                self.abs_tol
            )));
        }
        if self.max_steps < 10_000 {
            return Err(SolverError::InvalidSettings(format!(
                "max_steps must be at least 1e4, got {}",
                self.max_steps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("solver settings: {0}")]
    InvalidSettings(String),
    #[error("step budget exhausted for mode q = ({:.4}, {:.4}, {:.4}) at t = {t_reached:.4e}", q[0], q[1], q[2])]
    StepBudget { q: [f64; 3], t_reached: f64 },
    #[error("numerical failure for mode q = ({:.4}, {:.4}, {:.4}) at t = {t:.4e}", q[0], q[1], q[2])]
    NonFinite { q: [f64; 3], t: f64 },
    #[error("canonical momentum must be finite")]
    NonFiniteMomentum,
    #[error("sample times must be sorted and inside the integration window")]
    InvalidSamples,
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn map_ode_err(err: OdeError, q: [f64; 3]) -> SolverError {
    match err {
        OdeError::StepBudget { t_reached, .. } => SolverError::StepBudget { q, t_reached },
        OdeError::NonFinite { t } => SolverError::NonFinite { q, t },
        OdeError::InvalidSamples { .. } => SolverError::InvalidSamples,
        OdeError::InvalidSpan { t0, t1 } => SolverError::InvalidSettings(format!(
            "degenerate integration window [{t0}, {t1}]"
        )),
    }
}

/// Initial step guess tied to the fastest dynamical scale:
/// min(1/Omega_max, 1/omega) / 50.
fn initial_step(q: [f64; 3], field: &PulseField) -> f64 {
    let mut scale = 1.0 / field.omega_max_bound(q);
    let omega = field.config().omega;
    if omega > 0.0 {
        scale = scale.min(1.0 / omega);
    }
    scale / 50.0
}

fn ode_options(q: [f64; 3], field: &PulseField, settings: &SolverSettings) -> Dopri5Options {
    Dopri5Options {
        rel_tol: settings.rel_tol,
        abs_tol: settings.abs_tol,
        max_steps: settings.max_steps,
        h_init: Some(initial_step(q, field)),
    }
}

fn check_momentum(q: [f64; 3]) -> Result<(), SolverError> {
    if q.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(SolverError::NonFiniteMomentum)
    }
}

/// Advance one mode from vacuum at the window start to the window end and
/// return the asymptotic occupation f.
pub fn integrate_mode(
    q: [f64; 3],
    field: &PulseField,
    settings: &SolverSettings,
) -> Result<f64, SolverError> {
    settings.validate()?;
    check_momentum(q)?;
    let ctx = ModeContext::new(q, field);
    let window = field.window();
    let opts = ode_options(q, field, settings);

    match settings.formulation {
        Formulation::Reduced => {
            let y = ode::integrate(
                |t, y: &[f64; 10], dy| {
                    let p = ctx.kinetic_momentum(t);
                    rhs_reduced(y, p, field.electric(t), dy);
                },
                window,
                [0.0; 10],
                &opts,
            )
            .map_err(|e| map_ode_err(e, q))?;
            Ok(y[0])
        }
        Formulation::Full10 => {
            let y0 = ctx.vacuum_state(window.0).to_array();
            let y = ode::integrate(
                |t, y: &[f64; 10], dy| {
                    let p = ctx.kinetic_momentum(t);
                    rhs_full10(y, p, dy);
                },
                window,
                y0,
                &opts,
            )
            .map_err(|e| map_ode_err(e, q))?;
            let w = WignerState10::from_array(&y);
            Ok(ctx.distribution(&w, window.1))
        }
    }
}

/// Occupation trace at the requested times (sorted, inside the window) via
/// dense output; the last sample agrees with `integrate_mode` when it falls
/// on the window end.
pub fn integrate_mode_trajectory(
    q: [f64; 3],
    field: &PulseField,
    settings: &SolverSettings,
    sample_times: &[f64],
) -> Result<Vec<(f64, f64)>, SolverError> {
    settings.validate()?;
    check_momentum(q)?;
    let ctx = ModeContext::new(q, field);
    let window = field.window();
    let opts = ode_options(q, field, settings);
    let mut trace = Vec::with_capacity(sample_times.len());

    match settings.formulation {
        Formulation::Reduced => {
            ode::integrate_dense(
                |t, y: &[f64; 10], dy| {
                    let p = ctx.kinetic_momentum(t);
                    rhs_reduced(y, p, field.electric(t), dy);
                },
                window,
                [0.0; 10],
                &opts,
                sample_times,
                |t, y| trace.push((t, y[0])),
            )
            .map_err(|e| map_ode_err(e, q))?;
        }
        Formulation::Full10 => {
            let y0 = ctx.vacuum_state(window.0).to_array();
            ode::integrate_dense(
                |t, y: &[f64; 10], dy| {
                    let p = ctx.kinetic_momentum(t);
                    rhs_full10(y, p, dy);
                },
                window,
                y0,
                &opts,
                sample_times,
                |t, y| {
                    let w = WignerState10::from_array(y);
                    trace.push((t, ctx.distribution(&w, t)));
                },
            )
            .map_err(|e| map_ode_err(e, q))?;
        }
    }
    Ok(trace)
}

/// Integrate the ten-component system from vacuum and return the largest
/// deviation of s^2+|v|^2+|a|^2+|t1|^2 from 4 seen at accepted steps.
/// The formulation in `settings` is ignored; this is a property of the
/// ten-component flow.
pub fn conservation_deviation(
    q: [f64; 3],
    field: &PulseField,
    settings: &SolverSettings,
) -> Result<f64, SolverError> {
    settings.validate()?;
    check_momentum(q)?;
    let ctx = ModeContext::new(q, field);
    let window = field.window();
    let opts = ode_options(q, field, settings);
    let y0 = ctx.vacuum_state(window.0).to_array();
    let mut max_dev: f64 = 0.0;
    ode::integrate_observed(
        |t, y: &[f64; 10], dy| {
            let p = ctx.kinetic_momentum(t);
            rhs_full10(y, p, dy);
        },
        window,
        y0,
        &opts,
        |_, y| {
            let w = WignerState10::from_array(y);
            max_dev = max_dev.max((w.norm_sq() - 4.0).abs());
        },
    )
    .map_err(|e| map_ode_err(e, q))?;
    Ok(max_dev)
}
