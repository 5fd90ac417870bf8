//! Narrow-phase convex collision detection and distance computation.
//!
//! Three solvers share the same support-function machinery:
//!
//! * vanilla Frank-Wolfe with exact line-search ([`solvers::solve_fw`]),
//! * GJK, i.e. fully-corrective Frank-Wolfe over a simplex of support points
//!   ([`solvers::solve_gjk`]),
//! * Nesterov-accelerated GJK, which smooths the sequence of support
//!   directions with a momentum term and falls back to vanilla GJK once the
//!   momentum iterate reaches a fixed point ([`solvers::solve_nesterov_gjk`]).
//!
//! Support functions follow the *minimizing* convention throughout:
//! `support(d)` returns a point of the shape minimizing `<x, d>`.
//!
//! The [`benchgen`] and [`bench`] modules regenerate randomized benchmark
//! suites (ellipsoids, cubes, convex meshes at controlled separation
//! distances) and implement the timing protocol used by the CLI.

pub mod bench;
pub mod benchgen;
mod error;
pub mod hull;
pub mod minkowski;
pub mod obj;
pub mod shapes;
pub mod simplex;
pub mod solvers;

pub use error::{Error, Result};
pub use minkowski::{duality_gap, CollisionPair, SupportPair};
pub use shapes::{ConvexMesh, ConvexShape, Cuboid, Ellipsoid, Pose, Sphere, SupportResult};
pub use simplex::Simplex;
pub use solvers::{solve, Algorithm, Mode, QueryResult, SolverConfig, Status, TraceStep};

/// Double-precision 3-vector used for points and directions.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Double-precision 3×3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
