use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

/// Gradient of the piecewise-linear interpolant of `phi` on each face,
/// `(1 / 2A) sum_i phi_i (n x e_i)` with `e_i` the edge opposite corner `i`.
pub fn face_surface_gradient(mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry, phi: &[f64]) -> Result<Vec<Vec3>> {
    if let Some(&f) = geom.degenerate_faces.first() {
        return Err(Error::DegenerateFace(f));
    }
    Ok((0..mesh.n_faces())
        .into_par_iter()
        .map(|f| {
            if !mesh.face_alive(f) {
                return Vec3::zeros();
            }
            let [a, b, c] = mesh.face_vertices(f);
            let u = phi_weighted_edges(&pos[a], &pos[b], &pos[c], phi[a], phi[b], phi[c]);
            geom.face_normal[f].cross(&u) / (2.0 * geom.face_area[f])
        })
        .collect())
}

/// `sum_i phi_i e_i` with `e_a = r_c - r_b` and cyclic; linear in positions.
#[inline]
pub fn phi_weighted_edges(ra: &Vec3, rb: &Vec3, rc: &Vec3, pa: f64, pb: f64, pc: f64) -> Vec3 {
    ra * (pb - pc) + rb * (pc - pa) + rc * (pa - pb)
}
