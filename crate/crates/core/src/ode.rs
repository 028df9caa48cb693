//! Embedded Dormand–Prince 5(4) integrator with PI step-size control and
//! fourth-order dense output.
//!
//! The stepper works on fixed-size `[f64; N]` states so mode integrations
//! allocate nothing inside the loop. Error control follows the classic
//! Hairer–Nørsett–Wanner DOPRI5 driver: mixed absolute/relative RMS norm,
//! Lund-stabilized (PI) step factor, FSAL reuse of the last stage.

use thiserror::Error;

#[derive(Debug, Clone)]
pub struct Dopri5Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Budget of attempted (accepted + rejected) steps.
    pub max_steps: u64,
    /// Initial step size; a crude span-based guess is used when absent.
    pub h_init: Option<f64>,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_steps: 2_000_000,
            h_init: None,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum OdeError {
    #[error("step budget of {max_steps} exhausted at t = {t_reached:.6e}")]
    StepBudget { max_steps: u64, t_reached: f64 },
    #[error("state became non-finite at t = {t:.6e}")]
    NonFinite { t: f64 },
    #[error("invalid integration span [{t0}, {t1}]")]
    InvalidSpan { t0: f64, t1: f64 },
    #[error("sample times must be finite, sorted and lie within [{t0}, {t1}]")]
    InvalidSamples { t0: f64, t1: f64 },
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output weights for the 4th-order continuous extension.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step controller (Lund stabilization, dopri5.f defaults).
const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_SHRINK_MAX: f64 = 5.0; // h may shrink by at most 1/5 per step
const FAC_GROW_MAX: f64 = 0.1; // h may grow by at most 10x per step

/// Integrate from `span.0` to `span.1` and return the final state.
pub fn integrate<const N: usize>(
    rhs: impl FnMut(f64, &[f64; N], &mut [f64; N]),
    span: (f64, f64),
    y0: [f64; N],
    opts: &Dopri5Options,
) -> Result<[f64; N], OdeError> {
    drive(rhs, span, y0, opts, &[], &mut |_, _| {}, &mut |_, _| {})
}

/// Integrate and report interpolated states at the sorted `sample_times`.
pub fn integrate_dense<const N: usize>(
    rhs: impl FnMut(f64, &[f64; N], &mut [f64; N]),
    span: (f64, f64),
    y0: [f64; N],
    opts: &Dopri5Options,
    sample_times: &[f64],
    mut on_sample: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N], OdeError> {
    drive(rhs, span, y0, opts, sample_times, &mut on_sample, &mut |_, _| {})
}

/// Integrate and report the exact state at every accepted step (including
/// the initial point). Useful for invariant monitoring without the extra
/// error of dense interpolation.
pub fn integrate_observed<const N: usize>(
    rhs: impl FnMut(f64, &[f64; N], &mut [f64; N]),
    span: (f64, f64),
    y0: [f64; N],
    opts: &Dopri5Options,
    mut on_accept: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N], OdeError> {
    drive(rhs, span, y0, opts, &[], &mut |_, _| {}, &mut on_accept)
}

fn drive<const N: usize>(
    mut rhs: impl FnMut(f64, &[f64; N], &mut [f64; N]),
    span: (f64, f64),
    y0: [f64; N],
    opts: &Dopri5Options,
    samples: &[f64],
    on_sample: &mut dyn FnMut(f64, &[f64; N]),
    on_accept: &mut dyn FnMut(f64, &[f64; N]),
) -> Result<[f64; N], OdeError> {
    let (t0, t1) = span;
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(OdeError::InvalidSpan { t0, t1 });
    }
    let span_len = t1 - t0;
    let time_scale = t0.abs().max(t1.abs()).max(span_len);
    let tiny = 8.0 * f64::EPSILON * time_scale;

    if samples.windows(2).any(|w| !(w[1] >= w[0]))
        || samples.iter().any(|s| !s.is_finite())
        || samples.first().is_some_and(|&s| s < t0 - tiny)
        || samples.last().is_some_and(|&s| s > t1 + tiny)
    {
        return Err(OdeError::InvalidSamples { t0, t1 });
    }

    let mut si = 0;
    while si < samples.len() && samples[si] <= t0 {
        on_sample(samples[si], &y0);
        si += 1;
    }
    on_accept(t0, &y0);
    if span_len == 0.0 {
        while si < samples.len() {
            on_sample(samples[si], &y0);
            si += 1;
        }
        return Ok(y0);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    rhs(t, &y, &mut k1);

    let mut h = opts.h_init.unwrap_or(span_len * 1e-6);
    if !(h > 0.0 && h.is_finite()) {
        h = span_len * 1e-6;
    }
    h = h.min(span_len);

    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut nstep: u64 = 0;

    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];
    let mut yt = [0.0; N];
    let mut ynew = [0.0; N];

    while t1 - t > tiny {
        if nstep >= opts.max_steps {
            return Err(OdeError::StepBudget {
                max_steps: opts.max_steps,
                t_reached: t,
            });
        }
        nstep += 1;
        if h > t1 - t {
            h = t1 - t;
        }

        for i in 0..N {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &yt, &mut k2);
        for i in 0..N {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &yt, &mut k3);
        for i in 0..N {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &yt, &mut k4);
        for i in 0..N {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &yt, &mut k5);
        for i in 0..N {
            yt[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &yt, &mut k6);
        for i in 0..N {
            ynew[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &ynew, &mut k7);

        let mut err_sq = 0.0;
        for i in 0..N {
            let sk = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                    + E7 * k7[i]);
            let r = e / sk;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt();

        if !err.is_finite() {
            // Overflow in a trial stage; shrink hard and retry.
            h *= 0.1;
            last_rejected = true;
            if h <= tiny {
                return Err(OdeError::NonFinite { t });
            }
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            if !ynew.iter().all(|v| v.is_finite()) {
                return Err(OdeError::NonFinite { t: t + h });
            }

            if si < samples.len() && samples[si] <= t + h {
                // Continuous extension over [t, t+h].
                let mut c1 = [0.0; N];
                let mut c2 = [0.0; N];
                let mut c3 = [0.0; N];
                let mut c4 = [0.0; N];
                for i in 0..N {
                    let dy = ynew[i] - y[i];
                    c1[i] = dy;
                    c2[i] = h * k1[i] - dy;
                    c3[i] = dy - h * k7[i] - c2[i];
                    c4[i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                while si < samples.len() && samples[si] <= t + h {
                    let ts = samples[si];
                    let theta = ((ts - t) / h).clamp(0.0, 1.0);
                    let mut u = [0.0; N];
                    for i in 0..N {
                        u[i] = y[i]
                            + theta
                                * (c1[i]
                                    + (1.0 - theta)
                                        * (c2[i] + theta * (c3[i] + (1.0 - theta) * c4[i])));
                    }
                    on_sample(ts, &u);
                    si += 1;
                }
            }

            t += h;
            y = ynew;
            k1 = k7;
            on_accept(t, &y);

            let mut fac = (fac11 / facold.powf(BETA)) / SAFE;
            fac = fac.clamp(FAC_GROW_MAX, FAC_SHRINK_MAX);
            let mut hnew = h / fac;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            facold = err.max(1e-4);
            h = hnew;
        } else {
            h /= (fac11 / SAFE).min(FAC_SHRINK_MAX);
            last_rejected = true;
        }
    }

    // Samples equal to t1 up to rounding dust are reported with the final state.
    while si < samples.len() {
        on_sample(samples[si], &y);
        si += 1;
    }
    Ok(y)
}
