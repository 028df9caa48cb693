//! Gaussian-envelope elliptically polarized pulse, its vector potential,
//! derived dimensionless parameters, and the finite integration window.
//!
//! The field is
//! `eE(t)/m^2 = (E0/Ecr)/sqrt(1+delta^2) * exp(-t^2/2tau^2) * (cos(wt+phi), delta sin(wt+phi), 0)`
//! in the temporal gauge, so `eA/m = -integral of eE/m^2` with `A(t_start) = 0`.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Envelope value at the window edge; fields below this change occupations
/// by less than the solver tolerances.
pub const DEFAULT_ENVELOPE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum FieldError {
    #[error("field config: {field} {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("time {t:.6e} outside interpolant window [{t0:.6e}, {t1:.6e}]")]
    OutOfWindow { t: f64, t0: f64, t1: f64 },
    #[error("envelope floor must lie in (0, 1), got {floor}")]
    InvalidEnvelopeFloor { floor: f64 },
    #[error("potential interpolant did not reach tolerance {required:.3e} (achieved {achieved:.3e})")]
    InterpolantTolerance { achieved: f64, required: f64 },
}

/// Laser pulse parameters in electron-mass units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Peak strength ratio E0/Ecr.
    pub e0_over_ecr: f64,
    /// Pulse duration tau, units 1/m.
    pub tau: f64,
    /// Carrier frequency omega, units m.
    pub omega: f64,
    /// Carrier-envelope phase, radians.
    pub phi: f64,
    /// Polarization (ellipticity), |delta| <= 1.
    pub delta: f64,
}

impl FieldConfig {
    /// Linearly polarized pulse with phi = 0.
    pub fn new(e0_over_ecr: f64, tau: f64, omega: f64) -> Self {
        Self {
            e0_over_ecr,
            tau,
            omega,
            phi: 0.0,
            delta: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let bad = |field: &'static str, reason: String| FieldError::InvalidConfig { field, reason };
        if !(self.e0_over_ecr > 0.0) || !self.e0_over_ecr.is_finite() {
            return Err(bad("e0_over_ecr", format!("must be > 0, got {}", self.e0_over_ecr)));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(bad("tau", format!("must be > 0, got {}", self.tau)));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(bad("omega", format!("must be >= 0, got {}", self.omega)));
        }
        if !self.phi.is_finite() {
            return Err(bad("phi", format!("must be finite, got {}", self.phi)));
        }
        if !(self.delta.abs() <= 1.0) {
            return Err(bad("delta", format!("must satisfy |delta| <= 1, got {}", self.delta)));
        }
        Ok(())
    }

    /// Amplitude of the x field component, E0/Ecr/sqrt(1+delta^2).
    pub fn peak_component_amplitude(&self) -> f64 {
        self.e0_over_ecr / (1.0 + self.delta * self.delta).sqrt()
    }

    /// Keldysh adiabatic parameter, computed with the peak component
    /// amplitude: gamma = omega sqrt(1+delta^2) / (E0/Ecr).
    pub fn keldysh(&self) -> f64 {
        self.omega * (1.0 + self.delta * self.delta).sqrt() / self.e0_over_ecr
    }

    /// Carrier cycles under the envelope, sigma = omega * tau.
    pub fn sigma(&self) -> f64 {
        self.omega * self.tau
    }

    /// eE(t)/m^2. Total in t; the z component is identically zero.
    #[inline]
    pub fn electric_field(&self, t: f64) -> [f64; 3] {
        let amp = self.peak_component_amplitude() * (-t * t / (2.0 * self.tau * self.tau)).exp();
        let (s, c) = (self.omega * t + self.phi).sin_cos();
        [amp * c, amp * self.delta * s, 0.0]
    }
}

/// Symmetric window (t_start, t_end) with envelope = `envelope_floor` at the
/// edges: t_end = tau * sqrt(2 ln(1/floor)).
pub fn integration_window(cfg: &FieldConfig, envelope_floor: f64) -> Result<(f64, f64), FieldError> {
    if !(envelope_floor > 0.0 && envelope_floor < 1.0) {
        return Err(FieldError::InvalidEnvelopeFloor { floor: envelope_floor });
    }
    let half = cfg.tau * (2.0 * (1.0 / envelope_floor).ln()).sqrt();
    Ok((-half, half))
}

/// Precomputed cubic Hermite interpolant of eA(t)/m on a uniform knot grid.
///
/// Knot values come from cumulative Gauss–Legendre quadrature of -eE/m^2 and
/// knot slopes are the exact analytic -eE(t)/m^2, so the interpolant matches
/// both the value and the derivative at every knot. The knot count is doubled
/// until the midpoint interpolation error beats the tolerance
/// `1e-12 * max(1, e0_over_ecr * tau)` against an independent adaptive
/// Simpson check.
#[derive(Debug, Clone)]
pub struct PotentialInterpolant {
    t0: f64,
    t1: f64,
    dt: f64,
    inv_dt: f64,
    values: Vec<[f64; 3]>,
    slopes: Vec<[f64; 3]>,
    max_norm: f64,
}

impl PotentialInterpolant {
    pub fn build(cfg: &FieldConfig, t_start: f64, t_end: f64) -> Result<Self, FieldError> {
        cfg.validate()?;
        assert!(t_end > t_start, "empty potential window");
        let span = t_end - t_start;
        let tol = 1e-12 * (cfg.e0_over_ecr * cfg.tau).max(1.0);

        let mut scale = cfg.tau.min(span);
        if cfg.omega > 0.0 {
            scale = scale.min(std::f64::consts::TAU / cfg.omega);
        }
        let mut n = ((span / (scale / 16.0)).ceil() as usize).clamp(64, 1 << 22);

        let mut achieved = f64::INFINITY;
        for _ in 0..18 {
            let interp = Self::build_with_intervals(cfg, t_start, t_end, n);
            achieved = interp.worst_midpoint_error(cfg);
            if achieved <= tol {
                return Ok(interp);
            }
            if n >= (1 << 23) {
                break;
            }
            n *= 2;
        }
        Err(FieldError::InterpolantTolerance { achieved, required: tol })
    }

    fn build_with_intervals(cfg: &FieldConfig, t0: f64, t1: f64, n: usize) -> Self {
        let dt = (t1 - t0) / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        // Kahan-compensated cumulative sum of -int E dt.
        let mut sum = [0.0f64; 3];
        let mut comp = [0.0f64; 3];
        values.push([0.0; 3]);
        slopes.push(neg(cfg.electric_field(t0)));
        let mut max_norm: f64 = 0.0;
        for i in 1..=n {
            let a = t0 + (i - 1) as f64 * dt;
            let b = if i == n { t1 } else { t0 + i as f64 * dt };
            let inc = gauss_legendre_15(|t| cfg.electric_field(t), a, b);
            for c in 0..3 {
                let y = -inc[c] - comp[c];
                let t = sum[c] + y;
                comp[c] = (t - sum[c]) - y;
                sum[c] = t;
            }
            values.push(sum);
            slopes.push(neg(cfg.electric_field(b)));
            let nrm = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
            max_norm = max_norm.max(nrm);
        }
        Self {
            t0,
            t1,
            dt,
            inv_dt: 1.0 / dt,
            values,
            slopes,
            max_norm,
        }
    }

    /// Worst-component interpolation error at interval midpoints, with the
    /// midpoint reference integrated from the interval start by adaptive
    /// Simpson quadrature.
    fn worst_midpoint_error(&self, cfg: &FieldConfig) -> f64 {
        let n = self.values.len() - 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let a = self.t0 + i as f64 * self.dt;
            let mid = a + 0.5 * self.dt;
            let inc = adaptive_simpson(|t| cfg.electric_field(t), a, mid, 1e-16);
            let interp = self.eval_clamped(mid);
            for c in 0..3 {
                let reference = self.values[i][c] - inc[c];
                worst = worst.max((interp[c] - reference).abs());
            }
        }
        worst
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t0, self.t1)
    }

    pub fn knot_count(&self) -> usize {
        self.values.len()
    }

    /// Largest |eA|/m over the knots; used to bound the kinetic energy scale.
    pub fn max_norm(&self) -> f64 {
        self.max_norm
    }

    /// eA(t)/m with a window check (small rounding slack at the edges).
    pub fn eval(&self, t: f64) -> Result<[f64; 3], FieldError> {
        let slack = 8.0 * f64::EPSILON * self.t0.abs().max(self.t1.abs()).max(self.t1 - self.t0);
        if t < self.t0 - slack || t > self.t1 + slack {
            return Err(FieldError::OutOfWindow { t, t0: self.t0, t1: self.t1 });
        }
        Ok(self.eval_clamped(t))
    }

    /// Hot-path evaluation; callers guarantee t is inside the window (the
    /// stepper never leaves it by more than rounding dust, which is clamped).
    #[inline]
    pub(crate) fn eval_clamped(&self, t: f64) -> [f64; 3] {
        let x = (t - self.t0) * self.inv_dt;
        let n_iv = self.values.len() - 2;
        let i = (x as usize).min(n_iv); // x >= 0 after clamp below
        let i = if x < 0.0 { 0 } else { i };
        let s = (x - i as f64).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = 3.0 * s2 - 2.0 * s3;
        let h11 = s3 - s2;
        let v0 = &self.values[i];
        let v1 = &self.values[i + 1];
        let m0 = &self.slopes[i];
        let m1 = &self.slopes[i + 1];
        [
            h00 * v0[0] + h01 * v1[0] + self.dt * (h10 * m0[0] + h11 * m1[0]),
            h00 * v0[1] + h01 * v1[1] + self.dt * (h10 * m0[1] + h11 * m1[1]),
            h00 * v0[2] + h01 * v1[2] + self.dt * (h10 * m0[2] + h11 * m1[2]),
        ]
    }

    /// d(eA)/dt of the interpolant (equals -eE exactly at knots).
    pub fn derivative(&self, t: f64) -> Result<[f64; 3], FieldError> {
        self.eval(t)?; // window check
        let x = (t - self.t0) * self.inv_dt;
        let n_iv = self.values.len() - 2;
        let i = if x < 0.0 { 0 } else { (x as usize).min(n_iv) };
        let s = (x - i as f64).clamp(0.0, 1.0);
        let s2 = s * s;
        let dh00 = 6.0 * s2 - 6.0 * s;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = 6.0 * s - 6.0 * s2;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let v0 = &self.values[i];
        let v1 = &self.values[i + 1];
        let m0 = &self.slopes[i];
        let m1 = &self.slopes[i + 1];
        let mut out = [0.0; 3];
        for c in 0..3 {
            out[c] =
                self.inv_dt * (dh00 * v0[c] + dh01 * v1[c]) + dh10 * m0[c] + dh11 * m1[c];
        }
        Ok(out)
    }
}

/// A validated pulse bundled with its integration window and shared
/// read-only potential interpolant. Safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct PulseField {
    cfg: FieldConfig,
    envelope_floor: f64,
    window: (f64, f64),
    interp: PotentialInterpolant,
}

impl PulseField {
    pub fn new(cfg: FieldConfig, envelope_floor: f64) -> Result<Self, FieldError> {
        cfg.validate()?;
        let window = integration_window(&cfg, envelope_floor)?;
        let interp = PotentialInterpolant::build(&cfg, window.0, window.1)?;
        Ok(Self {
            cfg,
            envelope_floor,
            window,
            interp,
        })
    }

    pub fn with_default_floor(cfg: FieldConfig) -> Result<Self, FieldError> {
        Self::new(cfg, DEFAULT_ENVELOPE_FLOOR)
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn envelope_floor(&self) -> f64 {
        self.envelope_floor
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn interpolant(&self) -> &PotentialInterpolant {
        &self.interp
    }

    #[inline]
    pub fn electric(&self, t: f64) -> [f64; 3] {
        self.cfg.electric_field(t)
    }

    pub fn potential(&self, t: f64) -> Result<[f64; 3], FieldError> {
        self.interp.eval(t)
    }

    #[inline]
    pub(crate) fn potential_clamped(&self, t: f64) -> [f64; 3] {
        self.interp.eval_clamped(t)
    }

    /// Kinetic momentum p(t) = q - eA(t)/m.
    pub fn kinetic_momentum(&self, q: [f64; 3], t: f64) -> Result<[f64; 3], FieldError> {
        let a = self.potential(t)?;
        Ok(crate::vec3::sub(&q, &a))
    }

    /// Upper bound on the mode energy over the window, sqrt(1 + (|q|+max|a|)^2).
    pub fn omega_max_bound(&self, q: [f64; 3]) -> f64 {
        let r = crate::vec3::norm(&q) + self.interp.max_norm();
        (1.0 + r * r).sqrt()
    }
}

#[inline]
fn neg(v: [f64; 3]) -> [f64; 3] {
    [-v[0], -v[1], -v[2]]
}

/// 15-point Gauss–Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence (machine-precision, no tables).
fn gl15_nodes() -> &'static ([f64; 15], [f64; 15]) {
    static NODES: OnceLock<([f64; 15], [f64; 15])> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 15usize;
        let mut xs = [0.0; 15];
        let mut ws = [0.0; 15];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_p_dp(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_p_dp(n, x);
            xs[k] = x;
            ws[k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

fn legendre_p_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_legendre_15(f: impl Fn(f64) -> [f64; 3], a: f64, b: f64) -> [f64; 3] {
    let (xs, ws) = gl15_nodes();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; 3];
    for k in 0..15 {
        let v = f(mid + half * xs[k]);
        for c in 0..3 {
            acc[c] += ws[k] * v[c];
        }
    }
    for c in &mut acc {
        *c *= half;
    }
    acc
}

/// Vector-valued adaptive Simpson quadrature (error controlled in max norm).
fn adaptive_simpson(f: impl Fn(f64) -> [f64; 3] + Copy, a: f64, b: f64, tol: f64) -> [f64; 3] {
    fn simpson(fa: &[f64; 3], fm: &[f64; 3], fb: &[f64; 3], h: f64) -> [f64; 3] {
        let mut s = [0.0; 3];
        for c in 0..3 {
            s[c] = h / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
        }
        s
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: impl Fn(f64) -> [f64; 3] + Copy,
        a: f64,
        b: f64,
        fa: [f64; 3],
        fm: [f64; 3],
        fb: [f64; 3],
        whole: [f64; 3],
        tol: f64,
        depth: u32,
    ) -> [f64; 3] {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(&fa, &flm, &fm, m - a);
        let right = simpson(&fm, &frm, &fb, b - m);
        let mut err: f64 = 0.0;
        let mut better = [0.0; 3];
        for c in 0..3 {
            let d = left[c] + right[c] - whole[c];
            err = err.max(d.abs());
            better[c] = left[c] + right[c] + d / 15.0;
        }
        if depth == 0 || err <= 15.0 * tol {
            return better;
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        [l[0] + r[0], l[1] + r[1], l[2] + r[2]]
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(&fa, &fm, &fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 30)
}
