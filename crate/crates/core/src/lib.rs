//! Finite-element rotordynamics.
//!
//! Shaft–disk–bearing models are assembled into the gyroscopic equations of
//! motion, solved as a complex non-symmetric eigenproblem in state space,
//! classified into forward and backward whirl, swept over spin speed for
//! Campbell diagrams and critical speeds, and turned into receptances by
//! bi-orthogonal modal synthesis.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to double precision.

pub mod assembly;
pub mod campbell;
pub mod element;
pub mod error;
pub mod frf;
pub mod linalg;
pub mod modal;
pub mod model;
pub mod num;
pub mod whirl;

pub use assembly::{assemble, AssembledSystem, DofMap};
pub use campbell::{find_critical_speeds, sweep, CampbellData, CriticalSpeed, ThermalCondition};
pub use element::{bearing_matrices, disk_matrices, shaft_element_matrices, thermal_axial_force, ElementMatrices};
pub use error::{Result, RotorError};
pub use frf::{receptance_direct, receptance_modal, receptance_real_form, FrfMethod, FrfOptions, FrfResult};
pub use modal::{
    extract_modal_params, free_response, free_state_response, linearize, modal_analysis, normalize_biorthogonal, solve_eigen,
    ModalSolution, Mode, StateSpacePair,
};
pub use model::{
    fahrenheit_difference_to_kelvin, hz_to_rad_s, rad_s_to_hz, rad_s_to_rpm, rpm_to_rad_s, validate_model, Bearing, Direction, Disk, DofIndex, MaterialSpec, RotorModel, Segment,
    ThermalLoad, ThermalMode, ValidationReport,
};
pub use num::{Complex, Real};
pub use whirl::{classify_whirl, mac, Whirl};

pub type RotorModel64 = RotorModel<f64>;
pub type RotorModel32 = RotorModel<f32>;
pub type AssembledSystem64 = AssembledSystem<f64>;
pub type StateSpacePair64 = StateSpacePair<f64>;
pub type ModalSolution64 = ModalSolution<f64>;
pub type CampbellData64 = CampbellData<f64>;
pub type FrfResult64 = FrfResult<f64>;
pub type Complex64 = Complex<f64>;
