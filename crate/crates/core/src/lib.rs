//! Dense small-register quantum circuits: gate matrices, immersion into an
//! n-qubit register, constructive syntheses with residual certificates, and
//! state-line diagrams.

pub mod circuit;
pub mod diagram;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod random;
pub mod synth;

pub use circuit::{circuit_to_unitary, immerse, simulate, Circuit, CircuitOp, QubitPermutation};
pub use diagram::{
    build_complete_diagram, diagram_to_unitary, mark_information_flow, render, simplify_diagram, Diagram, GateBlock,
    RenderFormat, RenderStyle,
};
pub use error::{Error, Result};
pub use gates::{controlled, gate_matrix, GateKind, TargetPosition};
pub use linalg::{
    align_global_phase, equal_up_to_global_phase, kron, matmul, unitary_sqrt, Complex, ComplexMatrix,
    PhaseAlignment, StateVector,
};
