//! Electron–positron pair creation from vacuum in spatially homogeneous,
//! time-dependent, elliptically polarized electric fields.
//!
//! Each canonical momentum mode evolves independently under a small ODE
//! system; asymptotic occupations are collected over momentum grids into
//! spectra, plane densities, and parameter scans.
//!
//! Units are natural with the electron mass as the base: momenta in units of
//! m, times in 1/m, frequencies in m. Field strength enters only through the
//! ratio E/E_cr, so `eE/m^2` and `eA/m` are the dimensionless field and
//! potential used throughout.

pub mod analysis;
pub mod field;
pub mod ode;
pub mod qve;
pub mod solver;
pub mod sweep;
pub mod wigner;

pub(crate) mod vec3;

pub use field::{
    integration_window, FieldConfig, FieldError, PotentialInterpolant, PulseField,
    DEFAULT_ENVELOPE_FLOOR,
};
pub use solver::{
    conservation_deviation, integrate_mode, integrate_mode_trajectory, Formulation,
    SolverError, SolverSettings,
};
pub use sweep::{
    compute_spectrum, number_density_plane, scan, MomentumGrid, ScanAxis, ScanResult,
    SpectrumField, SpectrumMeta, SweepError, SweepOptions,
};
