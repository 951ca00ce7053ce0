//! Two-mode sideband/squeezed-vacuum state, its marginals and projections.

mod coupling;
mod joint;
mod projection;
mod state;
mod wigner;

pub use coupling::{sideband_coupling, SidebandCoupling};
pub use joint::{
    joint_amplitude, joint_distribution, joint_log_amplitude, joint_probability, marginal_distribution,
    marginal_probability, MarginalValue, Method, EXACT_R_LIMIT, TAIL_TOLERANCE,
};
pub use projection::{photon_added_form, project_on_n, project_on_q, PhotonAddedForm, MAX_STATE_DIM};
pub use state::SingleModeState;
pub use wigner::{wigner, wigner_at, PhotonAddedWigner, WignerField, WignerGrid};
