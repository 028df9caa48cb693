//! Momentum-grid sweeps. (placeholder)
pub struct MomentumGrid;
pub struct SpectrumField;
pub struct SpectrumMeta;
pub struct SweepOptions;
pub enum SweepError {}
pub enum ScanAxis {}
pub struct ScanResult;
pub fn compute_spectrum() {}
pub fn number_density_plane() {}
pub fn scan() {}
