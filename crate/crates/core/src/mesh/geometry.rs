//! Geometric primitives of an embedded mesh: lengths, angles, dihedral
//! angles, areas, normals, dual areas and enclosed volume.

use nalgebra::Vector3;
use rayon::prelude::*;

use super::halfedge::{twin, HalfedgeMesh, INVALID};
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Default relative tolerance for boundary loop planarity.
pub const DEFAULT_PLANARITY_TOL: f64 = 1e-8;

/// Cached per-element measurements of one configuration.
///
/// Per-halfedge arrays use the halfedge's own face; boundary halfedges hold
/// zeros. The dihedral angle is positive on convex folds.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub edge_length: Vec<f64>,
    pub dihedral: Vec<f64>,
    pub face_area: Vec<f64>,
    pub face_normal: Vec<Vec3>,
    /// Angle at the corner opposite each halfedge.
    pub opposite_angle: Vec<f64>,
    /// Cotangent of `opposite_angle`.
    pub opposite_cot: Vec<f64>,
    /// Barycentric dual area: one third of the incident face areas.
    pub vertex_area: Vec<f64>,
    pub degenerate_faces: Vec<usize>,
}

impl Geometry {
    pub fn new(mesh: &HalfedgeMesh, pos: &[Vec3]) -> Self {
        let nf = mesh.n_faces();
        let faces: Vec<(f64, Vec3)> = (0..nf)
            .into_par_iter()
            .map(|f| {
                if !mesh.face_alive(f) {
                    return (0.0, Vec3::zeros());
                }
                let [a, b, c] = mesh.face_vertices(f);
                let n = (pos[b] - pos[a]).cross(&(pos[c] - pos[a]));
                let norm = n.norm();
                let unit = if norm > 0.0 { n / norm } else { Vec3::zeros() };
                (0.5 * norm, unit)
            })
            .collect();
        let (face_area, face_normal): (Vec<f64>, Vec<Vec3>) = faces.into_iter().unzip();
        let degenerate_faces: Vec<usize> =
            (0..nf).filter(|&f| mesh.face_alive(f) && !(face_area[f] > 0.0)).collect();
        if !degenerate_faces.is_empty() {
            log::warn!("{} degenerate face(s), first {}", degenerate_faces.len(), degenerate_faces[0]);
        }

        let edge_length: Vec<f64> = (0..mesh.n_edges())
            .into_par_iter()
            .map(|e| {
                if !mesh.edge_alive(e) {
                    return 0.0;
                }
                let [a, b] = mesh.edge_vertices(e);
                (pos[b] - pos[a]).norm()
            })
            .collect();

        let dihedral: Vec<f64> = (0..mesh.n_edges())
            .into_par_iter()
            .map(|e| {
                if !mesh.edge_alive(e) || mesh.is_boundary_edge(e) {
                    return 0.0;
                }
                let h = 2 * e;
                let n1 = face_normal[mesh.face(h).unwrap()];
                let n2 = face_normal[mesh.face(twin(h)).unwrap()];
                let dir = (pos[mesh.head(h)] - pos[mesh.tail(h)]) / edge_length[e];
                dihedral_from_normals(&n1, &n2, &dir)
            })
            .collect();

        let corners: Vec<(f64, f64)> = (0..mesh.n_halfedges())
            .into_par_iter()
            .map(|h| {
                if mesh.tail(h) == INVALID || mesh.is_boundary_halfedge(h) {
                    return (0.0, 0.0);
                }
                let o = mesh.tail(mesh.prev(h));
                let u = pos[mesh.tail(h)] - pos[o];
                let w = pos[mesh.head(h)] - pos[o];
                let s = u.cross(&w).norm();
                let d = u.dot(&w);
                (s.atan2(d), d / s)
            })
            .collect();
        let (opposite_angle, opposite_cot): (Vec<f64>, Vec<f64>) = corners.into_iter().unzip();

        let vertex_area: Vec<f64> = (0..mesh.n_vertices())
            .into_par_iter()
            .map(|v| {
                if !mesh.vertex_alive(v) {
                    return 0.0;
                }
                mesh.vertex_faces(v).map(|f| face_area[f]).sum::<f64>() / 3.0
            })
            .collect();

        Geometry {
            edge_length,
            dihedral,
            face_area,
            face_normal,
            opposite_angle,
            opposite_cot,
            vertex_area,
            degenerate_faces,
        }
    }

    /// Interior angle of the face of `h` at `tail(h)`.
    #[inline]
    pub fn corner_angle_at_tail(&self, mesh: &HalfedgeMesh, h: usize) -> f64 {
        self.opposite_angle[mesh.next(h)]
    }

    pub fn total_area(&self) -> f64 {
        self.face_area.iter().sum()
    }
}

/// Signed angle between two face normals about the shared edge direction
/// `dir`, where `dir` runs along the halfedge owned by the first face.
#[inline]
pub fn dihedral_from_normals(n1: &Vec3, n2: &Vec3, dir: &Vec3) -> f64 {
    n1.cross(n2).dot(dir).atan2(n1.dot(n2))
}

/// Sum of face areas.
pub fn total_area(mesh: &HalfedgeMesh, pos: &[Vec3]) -> f64 {
    (0..mesh.n_faces())
        .filter(|&f| mesh.face_alive(f))
        .map(|f| {
            let [a, b, c] = mesh.face_vertices(f);
            0.5 * (pos[b] - pos[a]).cross(&(pos[c] - pos[a])).norm()
        })
        .sum()
}

/// Signed enclosed volume. Open meshes are closed by a planar fan over each
/// boundary loop; loops must be planar to within `planarity_tol` relative to
/// their size.
pub fn enclosed_volume(mesh: &HalfedgeMesh, pos: &[Vec3], planarity_tol: f64) -> Result<f64> {
    let mut v: f64 = (0..mesh.n_faces())
        .filter(|&f| mesh.face_alive(f))
        .map(|f| {
            let [a, b, c] = mesh.face_vertices(f);
            pos[a].dot(&pos[b].cross(&pos[c])) / 6.0
        })
        .sum();
    for (li, lp) in mesh.boundary_loops().iter().enumerate() {
        check_loop_planarity(mesh, pos, lp, planarity_tol).map_err(|deviation| Error::NonPlanarBoundary {
            loop_index: li,
            deviation,
        })?;
        let c = loop_centroid(mesh, pos, lp);
        for &h in lp {
            v += pos[mesh.tail(h)].dot(&pos[mesh.head(h)].cross(&c)) / 6.0;
        }
    }
    Ok(v)
}

/// Exact gradient of [`enclosed_volume`] with respect to every vertex,
/// including the planar closing fans of open meshes.
pub fn volume_gradient(mesh: &HalfedgeMesh, pos: &[Vec3]) -> Vec<Vec3> {
    let mut g: Vec<Vec3> = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            if !mesh.vertex_alive(v) {
                return Vec3::zeros();
            }
            mesh.outgoing(v)
                .filter(|&h| !mesh.is_boundary_halfedge(h))
                .map(|h| pos[mesh.head(h)].cross(&pos[mesh.tail(mesh.prev(h))]) / 6.0)
                .sum()
        })
        .collect();
    for lp in mesh.boundary_loops() {
        let c = loop_centroid(mesh, pos, lp);
        let mut gc = Vec3::zeros();
        for &h in lp {
            let (a, b) = (mesh.tail(h), mesh.head(h));
            g[a] += pos[b].cross(&c) / 6.0;
            g[b] += c.cross(&pos[a]) / 6.0;
            gc += pos[a].cross(&pos[b]) / 6.0;
        }
        let share = gc / lp.len() as f64;
        for &h in lp {
            g[mesh.tail(h)] += share;
        }
    }
    g
}

/// Area of the planar polygon spanned by a boundary loop.
pub fn loop_planar_area(mesh: &HalfedgeMesh, pos: &[Vec3], lp: &[usize]) -> f64 {
    let c = loop_centroid(mesh, pos, lp);
    let mut n = Vec3::zeros();
    for &h in lp {
        n += (pos[mesh.tail(h)] - c).cross(&(pos[mesh.head(h)] - c));
    }
    0.5 * n.norm()
}

pub fn loop_centroid(mesh: &HalfedgeMesh, pos: &[Vec3], lp: &[usize]) -> Vec3 {
    lp.iter().map(|&h| pos[mesh.tail(h)]).sum::<Vec3>() / lp.len() as f64
}

/// Returns the relative out-of-plane deviation on failure.
fn check_loop_planarity(mesh: &HalfedgeMesh, pos: &[Vec3], lp: &[usize], tol: f64) -> std::result::Result<(), f64> {
    let c = loop_centroid(mesh, pos, lp);
    // Newell normal
    let mut n = Vec3::zeros();
    for &h in lp {
        let (p, q) = (pos[mesh.tail(h)] - c, pos[mesh.head(h)] - c);
        n += p.cross(&q);
    }
    let size = lp.iter().map(|&h| (pos[mesh.tail(h)] - c).norm()).fold(0.0, f64::max);
    if n.norm() == 0.0 || size == 0.0 {
        return Ok(());
    }
    let n = n.normalize();
    let dev = lp.iter().map(|&h| (pos[mesh.tail(h)] - c).dot(&n).abs()).fold(0.0, f64::max) / size;
    if dev <= tol {
        Ok(())
    } else {
        Err(dev)
    }
}

/// Angle-weighted unit normal at `v`.
pub fn vertex_normal_angle_weighted(mesh: &HalfedgeMesh, geom: &Geometry, v: usize) -> Result<Vec3> {
    let mut n = Vec3::zeros();
    for h in mesh.outgoing(v) {
        if let Some(f) = mesh.face(h) {
            n += geom.corner_angle_at_tail(mesh, h) * geom.face_normal[f];
        }
    }
    let norm = n.norm();
    if norm > 0.0 && norm.is_finite() {
        Ok(n / norm)
    } else {
        Err(Error::ZeroNormal(v))
    }
}

/// Area-weighted integrated vertex normal, `(1/3) sum A_f n_f`; equals the
/// volume gradient of a closed mesh.
pub fn vertex_integrated_normal(mesh: &HalfedgeMesh, geom: &Geometry, v: usize) -> Vec3 {
    mesh.vertex_faces(v).map(|f| geom.face_area[f] * geom.face_normal[f]).sum::<Vec3>() / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn regular_tetrahedron() -> (HalfedgeMesh, Vec<Vec3>) {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        let pos = vec![
            Vec3::new(s, s, s),
            Vec3::new(s, -s, -s),
            Vec3::new(-s, s, -s),
            Vec3::new(-s, -s, s),
        ];
        let tris = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        (HalfedgeMesh::from_triangles(4, &tris).unwrap(), pos)
    }

    pub(crate) fn unit_cube() -> (HalfedgeMesh, Vec<Vec3>) {
        let pos: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let tris: Vec<[usize; 3]> = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        (HalfedgeMesh::from_triangles(8, &tris).unwrap(), pos)
    }

    #[test]
    fn tetrahedron_measures() {
        let (m, p) = regular_tetrahedron();
        let g = Geometry::new(&m, &p);
        let expected = std::f64::consts::PI - (1.0f64 / 3.0).acos();
        for e in 0..m.n_edges() {
            assert_relative_eq!(g.edge_length[e], 1.0, epsilon = 1e-12);
            assert_relative_eq!(g.dihedral[e], expected, epsilon = 1e-12);
        }
        assert_relative_eq!(total_area(&m, &p), 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(enclosed_volume(&m, &p, 1e-8).unwrap(), 2f64.sqrt() / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn cube_area_volume_and_orientation() {
        let (m, p) = unit_cube();
        assert_relative_eq!(total_area(&m, &p), 6.0, epsilon = 1e-12);
        assert_relative_eq!(enclosed_volume(&m, &p, 1e-8).unwrap(), 1.0, epsilon = 1e-12);
        let flipped: Vec<[usize; 3]> = m.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        let mf = HalfedgeMesh::from_triangles(8, &flipped).unwrap();
        assert_relative_eq!(enclosed_volume(&mf, &p, 1e-8).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn cube_corner_normal() {
        let (m, p) = unit_cube();
        let g = Geometry::new(&m, &p);
        let n = vertex_normal_angle_weighted(&m, &g, 7).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(n, Vec3::new(s, s, s), epsilon = 1e-12);
        let n0 = vertex_normal_angle_weighted(&m, &g, 0).unwrap();
        assert_relative_eq!(n0, Vec3::new(-s, -s, -s), epsilon = 1e-12);
    }

    #[test]
    fn right_triangle_angles() {
        let m = HalfedgeMesh::from_triangles(3, &[[0, 1, 2]]).unwrap();
        let p = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        let g = Geometry::new(&m, &p);
        assert_relative_eq!(g.face_area[0], 0.5);
        let h01 = m.find_halfedge(0, 1).unwrap();
        let h12 = m.find_halfedge(1, 2).unwrap();
        assert_relative_eq!(g.corner_angle_at_tail(&m, h01), std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        assert_relative_eq!(g.corner_angle_at_tail(&m, h12), std::f64::consts::FRAC_PI_4, epsilon = 1e-14);
    }

    #[test]
    fn coplanar_diamond_is_flat() {
        let m = HalfedgeMesh::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let p = vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let g = Geometry::new(&m, &p);
        assert!(g.dihedral.iter().all(|&d| d == 0.0));
        assert_relative_eq!(g.vertex_area.iter().sum::<f64>(), g.total_area(), epsilon = 1e-15);
        assert_relative_eq!(enclosed_volume(&m, &p, 1e-8).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn non_planar_loop_is_rejected() {
        let m = HalfedgeMesh::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let p = vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 0.3), Vec3::new(0.0, 1.0, 0.0)];
        assert!(matches!(enclosed_volume(&m, &p, 1e-8), Err(Error::NonPlanarBoundary { .. })));
    }

    #[test]
    fn volume_gradient_matches_finite_differences() {
        let m = HalfedgeMesh::from_triangles(5, &[[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]]).unwrap();
        let p = vec![
            Vec3::new(0.1, -0.05, 0.6),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.1, 1.1, 0.0),
            Vec3::new(-0.9, 0.2, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
        ];
        let g = volume_gradient(&m, &p);
        let h = 1e-6;
        for v in 0..5 {
            for k in 0..3 {
                let mut q = p.clone();
                q[v][k] += h;
                let up = enclosed_volume(&m, &q, 1.0).unwrap();
                q[v][k] -= 2.0 * h;
                let dn = enclosed_volume(&m, &q, 1.0).unwrap();
                assert_relative_eq!((up - dn) / (2.0 * h), g[v][k], epsilon = 1e-8);
            }
        }
        assert!(g.iter().sum::<Vec3>().norm() < 1e-14);
    }

    #[test]
    fn pyramid_apex_normal_is_axis() {
        let n = 6;
        let mut p = vec![Vec3::new(0.0, 0.0, 0.7)];
        for k in 0..n {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            p.push(Vec3::new(t.cos(), t.sin(), 0.0));
        }
        let tris: Vec<[usize; 3]> = (0..n).map(|k| [0, 1 + k, 1 + (k + 1) % n]).collect();
        let m = HalfedgeMesh::from_triangles(n + 1, &tris).unwrap();
        let g = Geometry::new(&m, &p);
        let nv = vertex_normal_angle_weighted(&m, &g, 0).unwrap();
        assert_relative_eq!(nv, Vec3::z(), epsilon = 1e-12);
    }
}
