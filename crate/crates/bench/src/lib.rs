//! Benchmark-only crate; the measurements live in `benches/spectral.rs`.
