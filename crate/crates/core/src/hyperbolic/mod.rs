//! Isometries of the hyperbolic plane and 3-space in the upper half-space
//! models: distances, classification, axes, horoballs and tangent directions.

mod exact;
mod geometry;
mod isometry;
mod point;

pub use exact::ExactIsometry;
pub use geometry::{
    axis, dist_to_axis, dist_to_geodesic, elliptic_data, parabolic_data, parabolic_fixed_point, point_at,
    rotation_at_fixed_point, tangent_angle, BoundaryPoint, Horoball, ParabolicData,
};
pub use isometry::{fold_angle, Classification, Isometry2, Isometry3, IsometryKind, DET_TOL, PARABOLIC_BAND};
pub use point::{dist_h2, dist_h3, UH2Point, UH3Point};
