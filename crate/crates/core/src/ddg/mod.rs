//! Discrete differential geometry: curvature measures, exact derivatives of
//! mesh primitives, curvature vectors, the cotangent Laplacian, face
//! gradients and geodesic distance.

pub mod curvature;
pub mod geodesic;
pub mod gradient;
pub mod laplacian;
pub mod primitives;
pub mod sparse;
pub mod vectors;

pub use curvature::{edge_mean_curvature, vertex_gaussian_curvature, vertex_mean_curvature, MeanCurvature};
pub use geodesic::{geodesic_distance, geodesic_distance_dijkstra};
pub use gradient::face_surface_gradient;
pub use laplacian::cotan_laplacian;
pub use sparse::CsrMatrix;
pub use vectors::CurvatureVectors;
