//! Multi-programming compiler and evaluation toolchain for small quantum
//! circuits.
//!
//! The pipeline packs queued circuits onto one device with a buffer-aware
//! greedy layout ([`layout`]), merges every round into a device-wide circuit
//! ([`compose`]), simulates the rounds under a crosstalk-scaled stochastic
//! Pauli noise model ([`sim`]) and characterizes devices with RB / SimRB
//! ([`characterization`]).

pub mod benchmarks;
pub mod characterization;
pub mod circuit;
pub mod cli;
pub mod compose;
pub mod hardware;
pub mod layout;
pub mod qasm;
pub mod report;
pub mod sim;

pub use circuit::{Angle, CircuitIR, GateKind, GateOp};
pub use hardware::{HardwareModel, HardwareState};
pub use layout::{physical_distance_layout, BatchPlan, LayoutMap, LayoutOptions};
pub use qasm::{emit_qasm, parse_qasm, Diagnostic, SourceProgram};

/// Version string echoed into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
