//! Constrained minimization of the `P_σ` energy, Euler–Lagrange multipliers,
//! the Kazdan–Warner residual, the quadratic form `Q` and explorers for the
//! Aubin-type inequalities. Harmonic-transform based, `S^2` only.

mod aubin;
mod identities;
mod quadratic;
mod solver;

pub use aubin::{aubin_explore, aubin_sobolev_explore, AubinConfig, AubinReport, SliceProjection};
pub use identities::{
    gram_matrix, kw_residual, kw_scale, kw_vector, multiplier_solve, tangential_gradient,
};
pub use quadratic::{expansion_check_e, quadratic_form_q, ExpansionCheck};
pub use solver::{
    continuation_to_critical, minimize_from, minimize_subcritical, solver_grid, SolutionRecord,
    SolutionSummary, SolverConfig, Symmetry,
};
