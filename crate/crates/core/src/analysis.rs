//! Spectrum analytics. (placeholder)
