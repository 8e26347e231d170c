//! Pauli equation in the (momentum ladder × spin) basis.

mod basis;
mod coupling;
mod evolve;
mod integrator;
mod scan;
mod tableau;

pub use basis::{probabilities, LadderBasis, SpinorAmplitudes};
pub use coupling::{coupling_element, spin_element, Coupling, CouplingTerm, Switches};
pub use evolve::{dressing_parameter, evolve, resolve_frame, EvolveOptions, EvolveReport, Frame, PauliSystem};
pub use integrator::{integrate, ComplexSystem, StepOptions, StepStats};
pub use scan::{
    convergence_check, figure4, process_probability, run, skd_scan, ConvergenceReport, Figure4Row, RunSpec, ScanRow,
    ScanScenario,
};
