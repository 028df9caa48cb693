//! Ring-structure probe along qx for the high-frequency case.
use pairgen_core::{FieldConfig, PulseField, SolverSettings};

fn main() {
    let e0 = 0.1 * 2.0f64.sqrt();
    let s = SolverSettings::default();
    for delta in [0.0, 0.9] {
        let cfg = FieldConfig::new(e0, 100.0, 0.5).with_delta(delta);
        let field = PulseField::with_default_floor(cfg).unwrap();
        println!("omega=0.5 delta={delta}, qy=0 axis:");
        let mut best = (0.0, 0.0);
        for i in 0..=60 {
            let qx = 0.55 + 0.005 * i as f64;
            let f = pairgen_core::integrate_mode([qx, 0.0, 0.0], &field, &s).unwrap();
            if f > best.1 { best = (qx, f); }
            if i % 6 == 0 {
                println!("  qx = {qx:+.3}: f = {f:+.4e}");
            }
        }
        println!("  -> axis peak near qx = {:.3} (f = {:.3e})", best.0, best.1);
    }
}
