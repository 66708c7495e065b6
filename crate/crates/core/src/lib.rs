//! Pulse design and simulation for nonadiabatic, purely geometric single-qubit
//! phase gates driven by two rotating-field loops on a shared Bloch-sphere cone.
//!
//! - [`qmath`]: 2x2 complex algebra and closed-form Pauli exponentials.
//! - [`design`]: forward/inverse solvers for the loop fields and their residual checks.
//! - [`evolve`]: exact and RK4 propagation of a spin under one loop.
//! - [`phases`]: total/dynamic/geometric phase split and a solid-angle estimator.
//! - [`gates`]: the resulting phase gate, its tilted variants and fidelities.
//! - [`io`]: JSON/CSV encodings.

pub mod design;
pub mod error;
pub mod evolve;
pub mod gates;
pub mod io;
pub mod phases;
pub mod qmath;

pub use design::{
    f_of_x, solve_forward, solve_inverse, validate, Branch, LoopField, Polarity, TwoLoopDesign,
    ValidationReport,
};
pub use error::{Error, Result};
pub use evolve::{bloch_vector, evolve, propagator_exact, EvolutionMethod, Trajectory};
pub use gates::{gate_fidelity, ideal_phase_gate, simulated_gate, tilted_gate, GateSpec};
pub use phases::{decompose_two_loop, PhaseDecomposition};
pub use qmath::{CVec2, PauliCoeffs, Unitary2, C64};
