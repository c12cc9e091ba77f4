//! Normal surface theory, the Thurston norm, and virtual fibering certificates
//! for triangulated 3-manifolds.
//!
//! The library models a compact orientable 3-manifold as a gluing table of
//! tetrahedra, enumerates vertex normal surfaces of the matching-equation cone
//! exactly, minimizes complexity over homology classes, pinches surfaces to
//! branched surfaces with guts decompositions, builds finite abelian covers,
//! certifies RFRS towers for right-angled Coxeter groups, and runs a
//! guts-complexity descent that semi-decides whether a homology class becomes
//! fibered in a tower of finite covers.

pub mod norm;
pub mod normal;
pub mod perm;
pub mod dd;
pub mod homology;
pub mod snf;
pub mod spine;
pub mod surface;
pub mod tri;

pub use norm::{
    chi_minus, norm_ball_with, norm_of_class, norm_of_class_with, FaceMarking, NormBall,
    NormBallShape, NormError, NormFace, TautCandidate, TautVerdict, Value, DEFAULT_SUM_DEPTH,
};
pub use normal::{DiskKind, DiskTypeIndex, MatchingSystem, NormalCoordinates, NormalError};
pub use perm::Perm4;
pub use dd::{
    enumerate_admissible_vertex_surfaces, enumerate_admissible_vertex_surfaces_with_budget,
    enumerate_vertex_surfaces, enumerate_vertex_surfaces_with_budget, VertexSurface,
    DEFAULT_RAY_BUDGET,
};
pub use homology::{homology, HomologyProfile, TruncatedComplex};
pub use spine::{dual_spine, presentation, DualSpine, FundamentalPresentation, LoopStep, SpineError};
pub use surface::{
    surface_topology, surface_topology_with, ClassContext, Surface, SurfaceComponent,
    SurfaceTopology,
};
pub use tri::{BoundaryComponent, Gluing, TriError, Triangulation, VertexKind};
