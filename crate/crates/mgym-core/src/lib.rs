//! Core engine for benchmarking simulated quantum devices.
//!
//! The crate provides, bottom to top: a small gate-level circuit type with
//! exact simulation backends (dense statevector for general circuits,
//! stabilizer tableau + Pauli-frame sampling for Clifford circuits), device
//! models (topology, depolarizing/readout noise, timing), a family of
//! device benchmarks, score aggregation across benchmarks and devices, a
//! schema-validated result dataset, cross-benchmark analytics, and a
//! dispatch/poll job runtime with cost estimation.

pub mod analytics;
pub mod benchmarks;
pub mod circuit;
pub mod dataset;
pub mod device;
pub mod error;
pub mod graph;
pub mod rng;
pub mod score;
pub mod sim;
pub mod transpile;

pub use benchmarks::BenchmarkKind;
pub use circuit::{Circuit, Gate, GateOp};
pub use device::{Device, DeviceRegistry, DeviceSpec, NoiseModel, Timing, Topology};
pub use error::{CoreError, Result};
pub use score::{ScoreTable, SeriesSpec};
pub use sim::CountsMap;
