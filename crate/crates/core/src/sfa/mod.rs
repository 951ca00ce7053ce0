//! Single-emitter strong-field kernels.

pub mod grids;
pub mod kernels;
pub mod medium;
pub mod pulse;

pub use grids::{GridSpec, MomentumGrid, RecollisionFilter, SfaGrids, SigmaMethod, TimeGrid};
pub use kernels::{
    action_phase, continuum_amplitude, cumulative_trapezoid, ionization_kernel, mode_displacement_au, pulse_fields,
    windowed_sum, DisplacementStep, PulseFields, SlidingWindow, Trajectory,
};
pub use medium::{to_solid, transition_dipole, DipoleLaw, MediumAu, MediumKind, MediumModel};
pub use pulse::{Envelope, LaserPulse};
