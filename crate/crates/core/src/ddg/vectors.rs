//! Per-halfedge curvature vectors: the building blocks of the exact bending
//! force. For halfedge `i -> j`, `k` is opposite in its own face and `l` in
//! the twin face; each vector is a gradient with respect to `r_i`.

use rayon::prelude::*;

use super::primitives::{grad_dihedral_opposite, grad_face_area};
use crate::mesh::halfedge::{twin, INVALID};
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

#[derive(Clone, Debug)]
pub struct CurvatureVectors {
    /// Integrated mean-curvature vector `(grad A_ijk + grad A_ilj) / 2`.
    pub mean: Vec<Vec3>,
    /// Gaussian-curvature vector `theta_ij grad l_ij / 2`.
    pub gauss: Vec<Vec3>,
    /// First Schläfli vector `l_ij grad_i theta_ij / 2`.
    pub schlafli1: Vec<Vec3>,
    /// Second Schläfli vector, the `grad_i` variation of the lengths times
    /// dihedral angles of all edges at `j` that depend on `r_i`, halved.
    pub schlafli2: Vec<Vec3>,
}

impl CurvatureVectors {
    pub fn new(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry) -> Self {
        let per_he: Vec<[Vec3; 4]> = (0..mesh.n_halfedges())
            .into_par_iter()
            .map(|h| halfedge_vectors(mesh, pos, geom, h))
            .collect();
        let mut out = CurvatureVectors {
            mean: Vec::with_capacity(per_he.len()),
            gauss: Vec::with_capacity(per_he.len()),
            schlafli1: Vec::with_capacity(per_he.len()),
            schlafli2: Vec::with_capacity(per_he.len()),
        };
        for [m, g, s1, s2] in per_he {
            out.mean.push(m);
            out.gauss.push(g);
            out.schlafli1.push(s1);
            out.schlafli2.push(s2);
        }
        out
    }

    /// Sums a per-halfedge field over the outgoing halfedges of each vertex.
    pub fn accumulate(mesh: &HalfedgeMesh, field: &[Vec3]) -> Vec<Vec3> {
        (0..mesh.n_vertices())
            .into_par_iter()
            .map(|v| {
                if !mesh.vertex_alive(v) {
                    return Vec3::zeros();
                }
                mesh.outgoing(v).map(|h| field[h]).sum()
            })
            .collect()
    }
}

fn halfedge_vectors(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, h: usize) -> [Vec3; 4] {
    let zero = Vec3::zeros();
    if mesh.tail(h) == INVALID {
        return [zero; 4];
    }
    let t = twin(h);
    let e = h >> 1;
    let (i, j) = (mesh.tail(h), mesh.head(h));
    let len = geom.edge_length[e];

    let mut mean = zero;
    if let Some(f1) = mesh.face(h) {
        let k = mesh.tail(mesh.prev(h));
        mean += 0.5 * grad_face_area(&geom.face_normal[f1], &pos[j], &pos[k]);
    }
    if let Some(f2) = mesh.face(t) {
        let l = mesh.tail(mesh.prev(t));
        mean += 0.5 * grad_face_area(&geom.face_normal[f2], &pos[l], &pos[j]);
    }

    let gauss = 0.5 * geom.dihedral[e] * (pos[i] - pos[j]) / len;

    let mut s1 = zero;
    let mut s2 = zero;
    if let (Some(f1), Some(f2)) = (mesh.face(h), mesh.face(t)) {
        let (n1, n2) = (geom.face_normal[f1], geom.face_normal[f2]);
        s1 = 0.5 * (geom.opposite_cot[mesh.prev(h)] * n1 + geom.opposite_cot[mesh.next(t)] * n2);
        s2 = s1;
    }
    // edges j-k and j-l, for which i is the opposite vertex
    let hjk = mesh.next(h);
    if !mesh.is_boundary_halfedge(h) {
        s2 += 0.5 * geom.edge_length[hjk >> 1] * grad_dihedral_opposite(mesh, geom, hjk);
    }
    let hlj = mesh.prev(t);
    if !mesh.is_boundary_halfedge(t) {
        s2 += 0.5 * geom.edge_length[hlj >> 1] * grad_dihedral_opposite(mesh, geom, hlj);
    }
    [mean, gauss, s1, s2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddg::laplacian::cotan_laplacian;
    use crate::io::generators::{icosphere, perturbed};
    use approx::assert_relative_eq;

    #[test]
    fn mean_vector_sums_to_zero_and_matches_cotan_formula() {
        let (m, p) = icosphere(2, 1.0).unwrap();
        let p = perturbed(&p, 0.05, 7);
        let g = Geometry::new(&m, &p);
        let cv = CurvatureVectors::new(&m, &p, &g);
        let acc = CurvatureVectors::accumulate(&m, &cv.mean);
        let total: Vec3 = acc.iter().sum();
        assert!(total.norm() < 1e-12);
        let lap = cotan_laplacian(&m, &g);
        for c in 0..3 {
            let x: Vec<f64> = p.iter().map(|r| r[c]).collect();
            let lx = lap.mul_vec(&x);
            for v in 0..m.n_vertices() {
                assert_relative_eq!(lx[v], acc[v][c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn interior_second_schlafli_matches_cotan_form() {
        let (m, p) = icosphere(2, 1.0).unwrap();
        let p = perturbed(&p, 0.05, 3);
        let g = Geometry::new(&m, &p);
        let cv = CurvatureVectors::new(&m, &p, &g);
        for h in 0..m.n_halfedges() {
            let (f1, f2) = (m.face(h).unwrap(), m.face(twin(h)).unwrap());
            let expect = -0.5 * (g.opposite_cot[h] * g.face_normal[f1] + g.opposite_cot[twin(h)] * g.face_normal[f2]);
            assert_relative_eq!(cv.schlafli2[h], expect, epsilon = 1e-12);
        }
    }
}
