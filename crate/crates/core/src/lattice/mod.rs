//! Integer geometry: primitive directions, kernel lattices, tangent facets
//! and rotated direction functions.

pub mod basis;
pub mod directions;
pub mod frame;
pub mod pointset;
pub mod primes;

pub use basis::{
    height_vectors, kernel_basis, reduce_basis, shortest_vector_at_least, HeightData, KernelData, LatticeBasis,
    ReducedBasis,
};
pub use directions::{
    in_n_lambda, in_n_lambda_prime, n_lambda_prime_set, n_lambda_set, nearest_direction, primitive_points,
    DirectionParams, NearestDirection, Radius,
};
pub use frame::{
    build_frame, rotate_direction, slice_coordinates, slice_frame, support_tangent, tangency_gap, tangent_contains,
    DirKind, DirectionFunction, LatticeFrame, SliceFrame, Tangent,
};
pub use pointset::PointSet;
pub use primes::{is_prime, largest_prime_leq};
