//! State representations and right-hand sides of the per-mode quantum
//! kinetic systems: the ten nontrivial phase-space components (s, v, a, t1)
//! and the numerically stabilized (f, w9) form.
//!
//! With m = 1 and p(t) = q - eA(t), the ten-component system reads
//!
//! ```text
//! ds/dt  =  2 p . t1
//! dv/dt  = -2 p x a - 2 t1
//! da/dt  = -2 p x v
//! dt1/dt = -2 s p + 2 v
//! ```
//!
//! which preserves s^2 + |v|^2 + |a|^2 + |t1|^2 (the generator is
//! skew-symmetric). The stabilized form tracks the occupation f directly
//! together with a nine-component residual w9 = (wv, wa, wt):
//!
//! ```text
//! df/dt  = (eE . wv) / (2 Omega)
//! dwv/dt = -(eE . wv) p / Omega^2 - 2 p x wa - 2 wt + 2 (1 - f) d(e1_v)/dt
//! dwa/dt = -2 p x wv
//! dwt/dt =  2 (wv + (p . wv) p)
//! ```
//!
//! where e1 = (1/Omega, p/Omega, 0, ..., 0) is the unit vacuum direction.
//! The two systems are algebraically equivalent under
//! w = 2(f-1) e1 + F w9 with F = [[-p^T, 0]; I9]; the tests pin the sign
//! conventions by checking exactly that equivalence.

use crate::field::PulseField;
use crate::vec3::{cross, dot};

/// The ten nontrivial phase-space components of one momentum mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerState10 {
    /// Scalar component.
    pub s: f64,
    /// Vector component.
    pub v: [f64; 3],
    /// Axial-vector component.
    pub a: [f64; 3],
    /// Tensor components coupling time and space indices.
    pub t1: [f64; 3],
}

impl WignerState10 {
    /// Vacuum solution at kinetic momentum p: s = -2/Omega, v = -2p/Omega.
    pub fn vacuum(p: [f64; 3]) -> Self {
        let om = omega_energy(p);
        Self {
            s: -2.0 / om,
            v: [-2.0 * p[0] / om, -2.0 * p[1] / om, -2.0 * p[2] / om],
            a: [0.0; 3],
            t1: [0.0; 3],
        }
    }

    /// s^2 + |v|^2 + |a|^2 + |t1|^2; equals 4 along vacuum-seeded evolution.
    pub fn norm_sq(&self) -> f64 {
        self.s * self.s + dot(&self.v, &self.v) + dot(&self.a, &self.a) + dot(&self.t1, &self.t1)
    }

    pub fn to_array(&self) -> [f64; 10] {
        [
            self.s, self.v[0], self.v[1], self.v[2], self.a[0], self.a[1], self.a[2],
            self.t1[0], self.t1[1], self.t1[2],
        ]
    }

    pub fn from_array(y: &[f64; 10]) -> Self {
        Self {
            s: y[0],
            v: [y[1], y[2], y[3]],
            a: [y[4], y[5], y[6]],
            t1: [y[7], y[8], y[9]],
        }
    }
}

/// Stabilized state of one momentum mode: occupation f plus the
/// nine-component residual (wv, wa, wt). Vacuum is all zeros.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedModeState {
    pub f: f64,
    pub wv: [f64; 3],
    pub wa: [f64; 3],
    pub wt: [f64; 3],
}

impl ReducedModeState {
    pub fn to_array(&self) -> [f64; 10] {
        [
            self.f, self.wv[0], self.wv[1], self.wv[2], self.wa[0], self.wa[1], self.wa[2],
            self.wt[0], self.wt[1], self.wt[2],
        ]
    }

    pub fn from_array(y: &[f64; 10]) -> Self {
        Self {
            f: y[0],
            wv: [y[1], y[2], y[3]],
            wa: [y[4], y[5], y[6]],
            wt: [y[7], y[8], y[9]],
        }
    }

    /// Map (f, w9) back to the ten-component state via
    /// w = 2(f-1) e1 + F w9.
    pub fn to_wigner(&self, p: [f64; 3]) -> WignerState10 {
        let e1 = basis_e1_at(p);
        let g = 2.0 * (self.f - 1.0);
        WignerState10 {
            s: g * e1[0] - dot(&p, &self.wv),
            v: [
                g * e1[1] + self.wv[0],
                g * e1[2] + self.wv[1],
                g * e1[3] + self.wv[2],
            ],
            a: self.wa,
            t1: self.wt,
        }
    }
}

/// Total energy Omega(p) = sqrt(1 + |p|^2) in electron-mass units.
#[inline]
pub fn omega_energy(p: [f64; 3]) -> f64 {
    (1.0 + dot(&p, &p)).sqrt()
}

/// Unit vacuum direction e1 = (1/Omega, p/Omega, 0, ..., 0).
pub fn basis_e1_at(p: [f64; 3]) -> [f64; 10] {
    let om = omega_energy(p);
    [
        1.0 / om,
        p[0] / om,
        p[1] / om,
        p[2] / om,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ]
}

/// Time derivative of e1 given dp/dt = eE:
/// scalar slot -(p.eE)/Omega^3, vector slot eE/Omega - p (p.eE)/Omega^3.
pub fn basis_e1_dot_at(p: [f64; 3], e: [f64; 3]) -> [f64; 10] {
    let om2 = 1.0 + dot(&p, &p);
    let om = om2.sqrt();
    let om3 = om2 * om;
    let pe = dot(&p, &e);
    [
        -pe / om3,
        e[0] / om - p[0] * pe / om3,
        e[1] / om - p[1] * pe / om3,
        e[2] / om - p[2] * pe / om3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ]
}

/// Embed a nine-component residual into the ten-component space:
/// F w9 = (-(p . wv), wv, wa, wt).
pub fn embed_residual(w9: &[f64; 9], p: [f64; 3]) -> [f64; 10] {
    let wv = [w9[0], w9[1], w9[2]];
    [
        -dot(&p, &wv),
        w9[0],
        w9[1],
        w9[2],
        w9[3],
        w9[4],
        w9[5],
        w9[6],
        w9[7],
        w9[8],
    ]
}

/// Occupation from a ten-component state:
/// f = 1/2 e1 . (w - w_vac), spin-summed, asymptotically in [0, 2].
pub fn distribution_from_state10(w: &WignerState10, p: [f64; 3]) -> f64 {
    let e1 = basis_e1_at(p);
    let vac = WignerState10::vacuum(p);
    0.5 * ((w.s - vac.s) * e1[0]
        + (w.v[0] - vac.v[0]) * e1[1]
        + (w.v[1] - vac.v[1]) * e1[2]
        + (w.v[2] - vac.v[2]) * e1[3])
}

/// Right-hand side of the stabilized system. Layout:
/// y = [f, wv0, wv1, wv2, wa0, wa1, wa2, wt0, wt1, wt2].
#[inline]
pub fn rhs_reduced(y: &[f64; 10], p: [f64; 3], e: [f64; 3], dy: &mut [f64; 10]) {
    let f = y[0];
    let wv = [y[1], y[2], y[3]];
    let wa = [y[4], y[5], y[6]];
    let wt = [y[7], y[8], y[9]];

    let p_sq = dot(&p, &p);
    let om2 = 1.0 + p_sq;
    let om = om2.sqrt();
    let om3 = om2 * om;

    let e_wv = dot(&e, &wv);
    let p_e = dot(&p, &e);
    let p_wv = dot(&p, &wv);
    let pxwa = cross(&p, &wa);
    let pxwv = cross(&p, &wv);
    let src = 2.0 * (1.0 - f);

    dy[0] = 0.5 * e_wv / om;
    for c in 0..3 {
        let e1dot_v = e[c] / om - p[c] * p_e / om3;
        dy[1 + c] = -p[c] * e_wv / om2 - 2.0 * pxwa[c] - 2.0 * wt[c] + src * e1dot_v;
        dy[4 + c] = -2.0 * pxwv[c];
        dy[7 + c] = 2.0 * (wv[c] + p[c] * p_wv);
    }
}

/// Unsimplified occupation derivative 1/2 (de1/dt) . (F w9); `rhs_reduced`
/// uses the closed form (eE . wv)/(2 Omega). Kept for on-demand cross-checks.
pub fn occupation_rate_unsimplified(y: &[f64; 10], p: [f64; 3], e: [f64; 3]) -> f64 {
    let e1dot = basis_e1_dot_at(p, e);
    let w9 = [y[1], y[2], y[3], y[4], y[5], y[6], y[7], y[8], y[9]];
    let lifted = embed_residual(&w9, p);
    0.5 * (0..10).map(|i| e1dot[i] * lifted[i]).sum::<f64>()
}

/// Right-hand side of the ten-component system. The field enters only
/// through p(t) = q - eA(t). Layout: y = [s, v, a, t1].
#[inline]
pub fn rhs_full10(y: &[f64; 10], p: [f64; 3], dy: &mut [f64; 10]) {
    let s = y[0];
    let v = [y[1], y[2], y[3]];
    let a = [y[4], y[5], y[6]];
    let t1 = [y[7], y[8], y[9]];

    let pxa = cross(&p, &a);
    let pxv = cross(&p, &v);

    dy[0] = 2.0 * dot(&p, &t1);
    for c in 0..3 {
        dy[1 + c] = -2.0 * pxa[c] - 2.0 * t1[c];
        dy[4 + c] = -2.0 * pxv[c];
        dy[7 + c] = -2.0 * s * p[c] + 2.0 * v[c];
    }
}

/// One momentum mode bound to a shared field: the canonical momentum label
/// plus the time-dependent quantities the dynamics needs.
pub struct ModeContext<'a> {
    pub q: [f64; 3],
    pub field: &'a PulseField,
}

impl<'a> ModeContext<'a> {
    pub fn new(q: [f64; 3], field: &'a PulseField) -> Self {
        assert!(q.iter().all(|c| c.is_finite()), "non-finite canonical momentum");
        Self { q, field }
    }

    /// Kinetic momentum p(t) = q - eA(t).
    #[inline]
    pub fn kinetic_momentum(&self, t: f64) -> [f64; 3] {
        let a = self.field.potential_clamped(t);
        crate::vec3::sub(&self.q, &a)
    }

    pub fn vacuum_state(&self, t: f64) -> WignerState10 {
        WignerState10::vacuum(self.kinetic_momentum(t))
    }

    pub fn basis_e1(&self, t: f64) -> [f64; 10] {
        basis_e1_at(self.kinetic_momentum(t))
    }

    pub fn basis_e1_dot(&self, t: f64) -> [f64; 10] {
        basis_e1_dot_at(self.kinetic_momentum(t), self.field.electric(t))
    }

    pub fn distribution(&self, w: &WignerState10, t: f64) -> f64 {
        distribution_from_state10(w, self.kinetic_momentum(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec3(rng: &mut impl Rng, scale: f64) -> [f64; 3] {
        [
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        ]
    }

    #[test]
    fn rest_energy_and_mass_shell_identity() {
        assert_eq!(omega_energy([0.0; 3]), 1.0);
        let p = [0.7228, 0.0, 0.0];
        assert_abs_diff_eq!(omega_energy(p), 1.2338719, epsilon = 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = rand_vec3(&mut rng, 3.0);
            let om = omega_energy(p);
            assert_abs_diff_eq!(om * om - dot(&p, &p), 1.0, epsilon = 1e-12);
            assert!(om >= 1.0);
        }
    }

    #[test]
    fn vacuum_state_values_and_norm() {
        let w = WignerState10::vacuum([0.0; 3]);
        assert_eq!(w.s, -2.0);
        assert_eq!(w.v, [0.0; 3]);
        let w = WignerState10::vacuum([1.0, 0.0, 0.0]);
        let r2 = 2.0f64.sqrt();
        assert_abs_diff_eq!(w.s, -r2, epsilon = 1e-15);
        assert_abs_diff_eq!(w.v[0], -r2, epsilon = 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let w = WignerState10::vacuum(rand_vec3(&mut rng, 2.5));
            assert_abs_diff_eq!(w.norm_sq(), 4.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn basis_e1_is_unit_and_projects_vacuum_to_minus_two() {
        let e1 = basis_e1_at([0.0; 3]);
        assert_eq!(e1[0], 1.0);
        assert_eq!(&e1[1..], &[0.0; 9]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = rand_vec3(&mut rng, 2.0);
            let e1 = basis_e1_at(p);
            let norm: f64 = e1.iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
            let vac = WignerState10::vacuum(p).to_array();
            let proj: f64 = (0..10).map(|i| e1[i] * vac[i]).sum();
            assert_abs_diff_eq!(proj, -2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn e1_is_orthogonal_to_every_embedded_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p = rand_vec3(&mut rng, 2.0);
            let mut w9 = [0.0; 9];
            for x in &mut w9 {
                *x = rng.gen_range(-1.0..1.0);
            }
            let e1 = basis_e1_at(p);
            let lifted = embed_residual(&w9, p);
            let proj: f64 = (0..10).map(|i| e1[i] * lifted[i]).sum();
            assert_abs_diff_eq!(proj, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn e1_dot_vanishes_without_field_and_matches_finite_differences() {
        let p = [0.4, -0.2, 0.9];
        assert_eq!(basis_e1_dot_at(p, [0.0; 3]), [0.0; 10]);
        // p = 0: the vector slot reduces to eE itself.
        let e = [0.02, -0.05, 0.0];
        let d = basis_e1_dot_at([0.0; 3], e);
        assert_eq!(&d[1..4], &e);

        // Finite-difference oracle along p(h) = p - h*(-E) ~ p + h dp/dt.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let step = 1e-5;
        for _ in 0..100 {
            let p = rand_vec3(&mut rng, 1.5);
            let e = rand_vec3(&mut rng, 0.2);
            let d = basis_e1_dot_at(p, e);
            let plus = basis_e1_at([p[0] + step * e[0], p[1] + step * e[1], p[2] + step * e[2]]);
            let minus = basis_e1_at([p[0] - step * e[0], p[1] - step * e[1], p[2] - step * e[2]]);
            for i in 0..10 {
                let fd = (plus[i] - minus[i]) / (2.0 * step);
                assert_abs_diff_eq!(d[i], fd, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn occupation_rate_simplification_matches_projected_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..500 {
            let p = rand_vec3(&mut rng, 2.0);
            let e = rand_vec3(&mut rng, 0.3);
            let mut y = [0.0; 10];
            for x in y.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
            let mut dy = [0.0; 10];
            rhs_reduced(&y, p, e, &mut dy);
            let longhand = occupation_rate_unsimplified(&y, p, e);
            assert_abs_diff_eq!(dy[0], longhand, epsilon = 1e-14);
        }
    }

    #[test]
    fn reduced_rhs_at_vacuum_state() {
        let p = [0.3, -0.8, 0.1];
        let e = [0.1, 0.05, 0.0];
        let y = [0.0; 10];
        let mut dy = [0.0; 10];
        rhs_reduced(&y, p, e, &mut dy);
        assert_eq!(dy[0], 0.0);
        let e1dot = basis_e1_dot_at(p, e);
        for c in 0..3 {
            assert_abs_diff_eq!(dy[1 + c], 2.0 * e1dot[1 + c], epsilon = 1e-15);
            assert_eq!(dy[4 + c], 0.0);
            assert_eq!(dy[7 + c], 0.0);
        }
        // No field: vacuum is stationary in the stabilized variables.
        rhs_reduced(&y, p, [0.0; 3], &mut dy);
        assert_eq!(dy, [0.0; 10]);
    }

    #[test]
    fn reduced_rhs_is_linear_in_the_residual_at_fixed_occupation() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let p = rand_vec3(&mut rng, 1.5);
            let e = rand_vec3(&mut rng, 0.3);
            let f = rng.gen_range(0.0..1.5);
            let mut ya = [0.0; 10];
            let mut yb = [0.0; 10];
            ya[0] = f;
            yb[0] = f;
            for i in 1..10 {
                ya[i] = rng.gen_range(-1.0..1.0);
                yb[i] = rng.gen_range(-1.0..1.0);
            }
            let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let mut ysum = [0.0; 10];
            ysum[0] = f;
            for i in 1..10 {
                ysum[i] = alpha * ya[i] + beta * yb[i];
            }
            let mut da = [0.0; 10];
            let mut db = [0.0; 10];
            let mut ds = [0.0; 10];
            rhs_reduced(&ya, p, e, &mut da);
            rhs_reduced(&yb, p, e, &mut db);
            rhs_reduced(&ysum, p, e, &mut ds);
            // Subtract the f-source before testing superposition.
            let e1dot = basis_e1_dot_at(p, e);
            let src = 2.0 * (1.0 - f);
            for i in 1..10 {
                let s = if (1..4).contains(&i) { src * e1dot[i] } else { 0.0 };
                let lin = alpha * (da[i] - s) + beta * (db[i] - s) + s;
                assert_abs_diff_eq!(ds[i], lin, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn full10_generator_is_skew_symmetric_along_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..200 {
            let p = rand_vec3(&mut rng, 2.0);
            let mut y = [0.0; 10];
            for x in y.iter_mut() {
                *x = rng.gen_range(-2.0..2.0);
            }
            let mut dy = [0.0; 10];
            rhs_full10(&y, p, &mut dy);
            let along: f64 = (0..10).map(|i| y[i] * dy[i]).sum();
            let norm: f64 = y.iter().map(|x| x * x).sum();
            assert!(along.abs() <= 1e-12 * norm, "norm leak {along:.3e}");
        }
    }

    #[test]
    fn full10_vacuum_is_stationary_without_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let p = rand_vec3(&mut rng, 2.0);
            let y = WignerState10::vacuum(p).to_array();
            let mut dy = [0.0; 10];
            rhs_full10(&y, p, &mut dy);
            for d in dy {
                assert_abs_diff_eq!(d, 0.0, epsilon = 1e-14);
            }
        }
        // Pure scalar state with p = 0 is also stationary.
        let y = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut dy = [0.0; 10];
        rhs_full10(&y, [0.0; 3], &mut dy);
        assert_eq!(dy, [0.0; 10]);
    }

    /// The central sign-convention check: pushing the stabilized derivative
    /// through w = 2(f-1) e1 + F w9 must reproduce the ten-component
    /// derivative, d/dt F contributing -(eE . wv) to the scalar slot.
    #[test]
    fn reduced_and_full10_right_hand_sides_are_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..300 {
            let p = rand_vec3(&mut rng, 1.8);
            let e = rand_vec3(&mut rng, 0.25);
            let mut y = [0.0; 10];
            y[0] = rng.gen_range(-0.2..1.8);
            for x in y.iter_mut().skip(1) {
                *x = rng.gen_range(-1.0..1.0);
            }
            let state = ReducedModeState::from_array(&y);

            let w = state.to_wigner(p).to_array();
            let mut dw_full = [0.0; 10];
            rhs_full10(&w, p, &mut dw_full);

            let mut dy = [0.0; 10];
            rhs_reduced(&y, p, e, &mut dy);

            // dw = 2 df e1 + 2(f-1) de1 + dF w9 + F dw9
            let e1 = basis_e1_at(p);
            let e1dot = basis_e1_dot_at(p, e);
            let dw9 = [dy[1], dy[2], dy[3], dy[4], dy[5], dy[6], dy[7], dy[8], dy[9]];
            let lifted_dw9 = embed_residual(&dw9, p);
            let wv = [y[1], y[2], y[3]];
            let mut dw_mapped = [0.0; 10];
            for i in 0..10 {
                dw_mapped[i] = 2.0 * dy[0] * e1[i] + 2.0 * (state.f - 1.0) * e1dot[i] + lifted_dw9[i];
            }
            dw_mapped[0] += -dot(&e, &wv);

            let scale = 1.0 + w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..10 {
                assert!(
                    (dw_mapped[i] - dw_full[i]).abs() <= 1e-10 * scale,
                    "slot {i}: mapped {} vs full {}",
                    dw_mapped[i],
                    dw_full[i]
                );
            }
        }
    }

    #[test]
    fn distribution_recovers_occupation_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..200 {
            let p = rand_vec3(&mut rng, 2.0);
            let vac = WignerState10::vacuum(p);
            assert_abs_diff_eq!(distribution_from_state10(&vac, p), 0.0, epsilon = 1e-14);

            let mut y = [0.0; 10];
            y[0] = rng.gen_range(-0.5..2.0);
            for x in y.iter_mut().skip(1) {
                *x = rng.gen_range(-1.0..1.0);
            }
            let state = ReducedModeState::from_array(&y);
            let w = state.to_wigner(p);
            assert_abs_diff_eq!(distribution_from_state10(&w, p), state.f, epsilon = 1e-13);
        }
        // w = -2 e1 is the f = 0 representative.
        let p = [0.6, 0.1, -0.4];
        let e1 = basis_e1_at(p);
        let w = WignerState10 {
            s: -2.0 * e1[0],
            v: [-2.0 * e1[1], -2.0 * e1[2], -2.0 * e1[3]],
            a: [0.0; 3],
            t1: [0.0; 3],
        };
        assert_abs_diff_eq!(distribution_from_state10(&w, p), 0.0, epsilon = 1e-14);
    }
}
