use rayon::prelude::*;

use crate::mesh::{Geometry, HalfedgeMesh};

/// Per-vertex integrated and pointwise mean curvature.
#[derive(Clone, Debug)]
pub struct MeanCurvature {
    pub integrated: Vec<f64>,
    pub pointwise: Vec<f64>,
}

/// Steiner edge mean curvature `l * theta / 2`; zero on boundary edges.
pub fn edge_mean_curvature(geom: &Geometry) -> Vec<f64> {
    geom.edge_length.iter().zip(&geom.dihedral).map(|(l, t)| 0.5 * l * t).collect()
}

/// Half the sum of edge mean curvature over each vertex's incident edges,
/// and its ratio with the dual area.
pub fn vertex_mean_curvature(mesh: &HalfedgeMesh, geom: &Geometry) -> MeanCurvature {
    let integrated: Vec<f64> = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            if !mesh.vertex_alive(v) {
                return 0.0;
            }
            mesh.outgoing(v)
                .map(|h| {
                    let e = h >> 1;
                    0.25 * geom.edge_length[e] * geom.dihedral[e]
                })
                .sum()
        })
        .collect();
    let pointwise = integrated
        .iter()
        .zip(&geom.vertex_area)
        .map(|(&h, &a)| if a > 0.0 { h / a } else { 0.0 })
        .collect();
    MeanCurvature { integrated, pointwise }
}

/// Angle defect: `2 pi - sum of angles` inside, `pi - sum` on the boundary.
pub fn vertex_gaussian_curvature(mesh: &HalfedgeMesh, geom: &Geometry) -> Vec<f64> {
    use std::f64::consts::PI;
    (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            if !mesh.vertex_alive(v) {
                return 0.0;
            }
            let sum: f64 = mesh
                .outgoing(v)
                .filter(|&h| !mesh.is_boundary_halfedge(h))
                .map(|h| geom.corner_angle_at_tail(mesh, h))
                .sum();
            if mesh.is_boundary_vertex(v) {
                PI - sum
            } else {
                2.0 * PI - sum
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{icosphere, flat_hex_patch};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn tetrahedron_edge_curvature() {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let pos = vec![
            crate::Vec3::new(s, s, s),
            crate::Vec3::new(s, -s, -s),
            crate::Vec3::new(-s, s, -s),
            crate::Vec3::new(-s, -s, s),
        ];
        let m = HalfedgeMesh::from_triangles(4, &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]).unwrap();
        let g = Geometry::new(&m, &pos);
        for h in edge_mean_curvature(&g) {
            assert_relative_eq!(h, 0.955316, epsilon = 1e-6);
        }
    }

    #[test]
    fn icosphere_total_curvatures() {
        let (m, p) = icosphere(4, 1.0).unwrap();
        let g = Geometry::new(&m, &p);
        let total_edges: f64 = edge_mean_curvature(&g).iter().sum();
        let hv = vertex_mean_curvature(&m, &g);
        let total_vertices: f64 = hv.integrated.iter().sum();
        assert_relative_eq!(total_edges, total_vertices, epsilon = 1e-10);
        assert!((total_edges - 4.0 * PI).abs() < 0.01);
        let k: f64 = vertex_gaussian_curvature(&m, &g).iter().sum();
        assert!((k - 4.0 * PI).abs() < 1e-9 * m.n_vertices() as f64);
    }

    #[test]
    fn flat_patch_interior_is_flat() {
        let (m, p) = flat_hex_patch(1.0, 4).unwrap();
        let g = Geometry::new(&m, &p);
        let h = vertex_mean_curvature(&m, &g);
        let k = vertex_gaussian_curvature(&m, &g);
        for v in 0..m.n_vertices() {
            assert_eq!(h.integrated[v], 0.0);
            if !m.is_boundary_vertex(v) {
                assert!(k[v].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_corner_defect() {
        let pos: Vec<crate::Vec3> = (0..8)
            .map(|i| crate::Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let tris: Vec<[usize; 3]> = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        let m = HalfedgeMesh::from_triangles(8, &tris).unwrap();
        let g = Geometry::new(&m, &pos);
        for k in vertex_gaussian_curvature(&m, &g) {
            assert_relative_eq!(k, PI / 2.0, epsilon = 1e-12);
        }
    }
}
