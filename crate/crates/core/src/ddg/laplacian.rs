use super::sparse::CsrMatrix;
use crate::mesh::{Geometry, HalfedgeMesh};

/// Positive semi-definite cotangent Laplacian.
///
/// Off-diagonal entries are `-w_ij` with `w_ij = (cot a + cot b) / 2` over
/// the angles opposite edge `ij`; rows sum to zero. With this sign, applying
/// the matrix to vertex positions yields the area gradient, which is the
/// vertex-accumulated integrated mean-curvature vector. Negative weights
/// from obtuse angles are kept.
pub fn cotan_laplacian(mesh: &HalfedgeMesh, geom: &Geometry) -> CsrMatrix {
    let mut trip = Vec::with_capacity(4 * mesh.n_edges());
    let mut negative = 0usize;
    for e in 0..mesh.n_edges() {
        if !mesh.edge_alive(e) {
            continue;
        }
        let [i, j] = mesh.edge_vertices(e);
        let w = 0.5 * (geom.opposite_cot[2 * e] + geom.opposite_cot[2 * e + 1]);
        if w < 0.0 {
            negative += 1;
        }
        trip.push((i, j, -w));
        trip.push((j, i, -w));
        trip.push((i, i, w));
        trip.push((j, j, w));
    }
    if negative > 0 {
        log::warn!("cotan Laplacian has {negative} negative edge weight(s)");
    }
    CsrMatrix::from_triplets(mesh.n_vertices(), &trip)
}
