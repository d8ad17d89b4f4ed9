//! Benchmark-only package; see `benches/suite.rs`.
