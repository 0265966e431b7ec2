//! Closed-form gradients of edge lengths, face areas and dihedral angles
//! with respect to vertex positions.

use crate::mesh::halfedge::twin;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

/// Gradient of `|r_i - r_j|` with respect to `r_i`.
#[inline]
pub fn grad_length(ri: &Vec3, rj: &Vec3) -> Vec3 {
    (ri - rj) / (ri - rj).norm()
}

/// Gradient of the area of the counterclockwise face `(a, b, c)` with
/// respect to `r_a`, given its unit normal.
#[inline]
pub fn grad_face_area(n: &Vec3, rb: &Vec3, rc: &Vec3) -> Vec3 {
    0.5 * n.cross(&(rc - rb))
}

/// Gradient of the area of face `(a, b, c)` with respect to `r_a`, computed
/// from positions alone.
pub fn grad_face_area_at(ra: &Vec3, rb: &Vec3, rc: &Vec3) -> Vec3 {
    let n = (rb - ra).cross(&(rc - ra));
    let norm = n.norm();
    if norm == 0.0 {
        return Vec3::zeros();
    }
    grad_face_area(&(n / norm), rb, rc)
}

/// Gradients of the dihedral angle of an interior edge.
///
/// For halfedge `h = i -> j` with `k` opposite in `face(h)` and `l` opposite
/// in `face(twin(h))`, returns the vertices `[i, j, k, l]` and the gradient
/// with respect to each. Boundary edges return `None`.
pub fn dihedral_gradients(mesh: &HalfedgeMesh, geom: &Geometry, h: usize) -> Option<([usize; 4], [Vec3; 4])> {
    let t = twin(h);
    let (f1, f2) = (mesh.face(h)?, mesh.face(t)?);
    let (i, j) = (mesh.tail(h), mesh.head(h));
    let k = mesh.tail(mesh.prev(h));
    let l = mesh.tail(mesh.prev(t));
    let (n1, n2) = (geom.face_normal[f1], geom.face_normal[f2]);
    let len = geom.edge_length[h >> 1];
    // cotangents of the angles at i and j within each face
    let cot_j1 = geom.opposite_cot[mesh.prev(h)];
    let cot_i1 = geom.opposite_cot[mesh.next(h)];
    let cot_j2 = geom.opposite_cot[mesh.next(t)];
    let cot_i2 = geom.opposite_cot[mesh.prev(t)];
    let gi = (cot_j1 * n1 + cot_j2 * n2) / len;
    let gj = (cot_i1 * n1 + cot_i2 * n2) / len;
    let gk = -len / (2.0 * geom.face_area[f1]) * n1;
    let gl = -len / (2.0 * geom.face_area[f2]) * n2;
    Some(([i, j, k, l], [gi, gj, gk, gl]))
}

/// Gradient of the dihedral angle of the edge opposite vertex `tail(prev(h))`
/// in `face(h)`, taken with respect to that opposite vertex. Zero when the
/// edge is a boundary edge.
pub fn grad_dihedral_opposite(mesh: &HalfedgeMesh, geom: &Geometry, h: usize) -> Vec3 {
    match mesh.face(h) {
        Some(f) if !mesh.is_boundary_edge(h >> 1) => {
            -geom.edge_length[h >> 1] / (2.0 * geom.face_area[f]) * geom.face_normal[f]
        }
        _ => Vec3::zeros(),
    }
}
