//! Finite-dimensional degree machinery: the moment map
//! `G(P,t) = ⨍ K∘φ_{P,t}(x) x dx`, its gradient form `A(P,t)`, the Brouwer
//! degree of `G` on spheres in the ball, model curvatures with prescribed
//! critical points, and the index count.

mod brouwer;
mod model;
mod moment;
mod triangulation;

pub use brouwer::{brouwer_degree, map_degree, DegreeMethod, DegreeResult};
pub use model::{index_count, CriticalPointModel, IndexCount, ModelK};
pub use moment::{a_map, g_map, omega_decay_scan, MomentRule, OmegaRow};
pub use triangulation::{Triangulation, TriangulationDescriptor};
