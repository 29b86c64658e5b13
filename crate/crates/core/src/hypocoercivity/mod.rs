//! The quadratic functional `Φ`, its parameter recipes, Crank–Nicolson
//! evolution of `u_t = −H_ε u`, and the self-adjoint lower bounds behind `η`.

mod evolve;
mod functional;
mod lemmas;
mod params;

pub use evolve::{decay_horizon, evolve, gaussian_state, verify_decay, DecayCheck, DecayTrace, EvolveOptions, DECAY_CSV_HEADER};
pub use functional::{norm_sq, phi_upper, phi_value};
pub use lemmas::{elem_consistency, hat_h_scaling, operator_envelope, semigroup_norms, ElemReport, EnvelopeFit, HatForm, HatScaling};
pub use params::{beta_profile_check, make_params, model_catalog, BetaProfile, Coefficient, GroundEnergyConstant, HypoParams, RecipeTag};
