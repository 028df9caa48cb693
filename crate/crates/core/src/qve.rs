//! Independent reference solver for linearly polarized fields: the standard
//! three-variable quantum Vlasov system.
//!
//! For a field along x with transverse energy eps^2 = 1 + qy^2 + qz^2,
//! longitudinal momentum p(t) = qx - eA_x(t), Omega^2 = eps^2 + p^2 and
//! pair-creation amplitude W = eE_x eps / Omega^2:
//!
//! ```text
//! df/dt = W u / 2
//! du/dt = W (1 - 2 f) - 2 Omega v
//! dv/dt = 2 Omega u
//! ```
//!
//! This tracks the occupation of one spin state (f <= 1); both spins
//! contribute identically for a linearly polarized field, so the returned
//! occupation is 2 f, directly comparable with the spin-summed phase-space
//! result. The right-hand side shares no code with the phase-space module,
//! which is the point: agreement between the two is evidence, not tautology.

use thiserror::Error;

use crate::field::PulseField;
use crate::ode::{self, Dopri5Options};
use crate::solver::{SolverError, SolverSettings};

#[derive(Debug, Clone, Error)]
pub enum QveError {
    #[error("quantum Vlasov reference requires delta = 0, got {delta}")]
    UnsupportedPolarization { delta: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Asymptotic spin-summed occupation of mode q from the quantum Vlasov
/// system. Rejects any field with delta != 0.
pub fn integrate_qve(
    q: [f64; 3],
    field: &PulseField,
    settings: &SolverSettings,
) -> Result<f64, QveError> {
    let delta = field.config().delta;
    if delta != 0.0 {
        return Err(QveError::UnsupportedPolarization { delta });
    }
    settings.validate()?;
    if !q.iter().all(|c| c.is_finite()) {
        return Err(QveError::Solver(SolverError::NonFiniteMomentum));
    }

    let eps_sq = 1.0 + q[1] * q[1] + q[2] * q[2];
    let eps = eps_sq.sqrt();
    let window = field.window();
    let mut scale = 1.0 / field.omega_max_bound(q);
    if field.config().omega > 0.0 {
        scale = scale.min(1.0 / field.config().omega);
    }
    let opts = Dopri5Options {
        rel_tol: settings.rel_tol,
        abs_tol: settings.abs_tol,
        max_steps: settings.max_steps,
        h_init: Some(scale / 50.0),
    };

    let y = ode::integrate(
        |t, y: &[f64; 3], dy| {
            let a = field.potential_clamped(t);
            let p = q[0] - a[0];
            let om_sq = eps_sq + p * p;
            let om = om_sq.sqrt();
            let w = field.electric(t)[0] * eps / om_sq;
            dy[0] = 0.5 * w * y[1];
            dy[1] = w * (1.0 - 2.0 * y[0]) - 2.0 * om * y[2];
            dy[2] = 2.0 * om * y[1];
        },
        window,
        [0.0; 3],
        &opts,
    )
    .map_err(|e| match e {
        ode::OdeError::StepBudget { t_reached, .. } => SolverError::StepBudget { q, t_reached },
        ode::OdeError::NonFinite { t } => SolverError::NonFinite { q, t },
        other => SolverError::InvalidSettings(other.to_string()),
    })?;

    Ok(2.0 * y[0])
}
