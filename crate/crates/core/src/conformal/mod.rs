//! Stereographic projection, the dilation family `φ_{P,t}`, the pushforward
//! `T_φ v = (v∘φ)|det dφ|^{(n−2σ)/(2n)}` and the decomposition of the unit
//! critical-norm sphere into a centred part and a conformal parameter.

mod decompose;
mod map;

pub use decompose::{
    center_and_normalize, center_of_mass, decompose_fn, decompose_varpi, mu_eta_solve,
    NormalizedPair,
};
pub use map::{
    phi_apply, phi_differential, pushforward_fn, pushforward_t, stereo_lift, stereo_project,
    ConformalParam, Pushforward,
};
