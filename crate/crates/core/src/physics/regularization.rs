//! Weak mesh-quality constraints: springs on edge lengths, face areas and
//! length cross ratios measured against a reference configuration.

use crate::error::{Error, Result};
use crate::mesh::halfedge::twin;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

#[derive(Clone, Debug, PartialEq)]
pub struct Regularization {
    pub k_e: f64,
    pub k_f: f64,
    pub k_c: f64,
    pub ref_lengths: Vec<f64>,
    pub ref_areas: Vec<f64>,
    /// Cross ratio per edge; zero on boundary edges.
    pub ref_cross: Vec<f64>,
}

/// Vertices `[i, j, k, l]` of the diamond around halfedge `2e`.
fn diamond(mesh: &HalfedgeMesh, e: usize) -> Option<[usize; 4]> {
    if mesh.is_boundary_edge(e) || !mesh.edge_alive(e) {
        return None;
    }
    let h = 2 * e;
    Some([mesh.tail(h), mesh.head(h), mesh.tail(mesh.prev(h)), mesh.tail(mesh.prev(twin(h)))])
}

/// `l_il l_jk / (l_ki l_jl)`; invariant under uniform scaling.
pub fn cross_ratio(pos: &[Vec3], [i, j, k, l]: [usize; 4]) -> f64 {
    let d = |a: usize, b: usize| (pos[a] - pos[b]).norm();
    d(i, l) * d(j, k) / (d(k, i) * d(j, l))
}

pub fn cross_ratios(mesh: &HalfedgeMesh, pos: &[Vec3]) -> Vec<f64> {
    (0..mesh.n_edges()).map(|e| diamond(mesh, e).map_or(0.0, |d| cross_ratio(pos, d))).collect()
}

impl Regularization {
    /// Captures the current configuration as the reference.
    pub fn from_reference(mesh: &HalfedgeMesh, pos: &[Vec3], k_e: f64, k_f: f64, k_c: f64) -> Self {
        let g = Geometry::new(mesh, pos);
        Regularization {
            k_e,
            k_f,
            k_c,
            ref_lengths: g.edge_length,
            ref_areas: g.face_area,
            ref_cross: cross_ratios(mesh, pos),
        }
    }

    pub fn is_active(&self) -> bool {
        self.k_e != 0.0 || self.k_f != 0.0 || self.k_c != 0.0
    }

    fn check(&self, mesh: &HalfedgeMesh) -> Result<()> {
        if self.ref_lengths.len() != mesh.n_edges()
            || self.ref_cross.len() != mesh.n_edges()
            || self.ref_areas.len() != mesh.n_faces()
        {
            return Err(Error::MissingReference);
        }
        Ok(())
    }

    pub fn energy(&self, mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry) -> Result<f64> {
        self.check(mesh)?;
        let mut e = 0.0;
        if self.k_e != 0.0 {
            for ed in (0..mesh.n_edges()).filter(|&ed| mesh.edge_alive(ed)) {
                let l0 = self.ref_lengths[ed];
                e += 0.5 * self.k_e * (geom.edge_length[ed] - l0).powi(2) / l0;
            }
        }
        if self.k_f != 0.0 {
            for f in (0..mesh.n_faces()).filter(|&f| mesh.face_alive(f)) {
                let a0 = self.ref_areas[f];
                e += 0.5 * self.k_f * (geom.face_area[f] - a0).powi(2) / a0;
            }
        }
        if self.k_c != 0.0 {
            for ed in 0..mesh.n_edges() {
                if let Some(d) = diamond(mesh, ed) {
                    let c0 = self.ref_cross[ed];
                    e += 0.5 * self.k_c * (cross_ratio(pos, d) - c0).powi(2) / c0;
                }
            }
        }
        Ok(e)
    }

    /// Exact negative gradient of [`Regularization::energy`].
    pub fn forces(&self, mesh: &HalfedgeMesh, pos: &[Vec3], geom: &Geometry) -> Result<Vec<Vec3>> {
        self.check(mesh)?;
        let mut f = vec![Vec3::zeros(); mesh.n_vertices()];
        let push_length = |f: &mut [Vec3], a: usize, b: usize, coeff: f64| {
            let g = (pos[a] - pos[b]) / (pos[a] - pos[b]).norm();
            f[a] -= coeff * g;
            f[b] += coeff * g;
        };
        if self.k_e != 0.0 {
            for ed in (0..mesh.n_edges()).filter(|&ed| mesh.edge_alive(ed)) {
                let [a, b] = mesh.edge_vertices(ed);
                let l0 = self.ref_lengths[ed];
                push_length(&mut f, a, b, self.k_e * (geom.edge_length[ed] - l0) / l0);
            }
        }
        if self.k_f != 0.0 {
            for fa in (0..mesh.n_faces()).filter(|&fa| mesh.face_alive(fa)) {
                let a0 = self.ref_areas[fa];
                let coeff = self.k_f * (geom.face_area[fa] - a0) / a0;
                let vs = mesh.face_vertices(fa);
                let n = geom.face_normal[fa];
                for c in 0..3 {
                    let (a, b, cc) = (vs[c], vs[(c + 1) % 3], vs[(c + 2) % 3]);
                    f[a] -= coeff * 0.5 * n.cross(&(pos[cc] - pos[b]));
                }
            }
        }
        if self.k_c != 0.0 {
            for ed in 0..mesh.n_edges() {
                let Some(d) = diamond(mesh, ed) else { continue };
                let [i, j, k, l] = d;
                let c = cross_ratio(pos, d);
                let c0 = self.ref_cross[ed];
                // d ln(c) = d ln l_il + d ln l_jk - d ln l_ki - d ln l_jl
                let coeff = self.k_c * (c - c0) / c0 * c;
                for (a, b, sign) in [(i, l, 1.0), (j, k, 1.0), (k, i, -1.0), (j, l, -1.0)] {
                    let len = (pos[a] - pos[b]).norm();
                    push_length(&mut f, a, b, sign * coeff / len);
                }
            }
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{icosphere, perturbed};

    #[test]
    fn zero_at_reference_and_scale_invariant_conformality() {
        let (m, p) = icosphere(2, 1.0).unwrap();
        let p = perturbed(&p, 0.05, 5);
        let r = Regularization::from_reference(&m, &p, 1.0, 1.0, 1.0);
        let g = Geometry::new(&m, &p);
        assert_eq!(r.energy(&m, &p, &g).unwrap(), 0.0);
        assert!(r.forces(&m, &p, &g).unwrap().iter().all(|f| f.norm() == 0.0));

        let scaled: Vec<Vec3> = p.iter().map(|x| 1.7 * x).collect();
        let conf = Regularization { k_e: 0.0, k_f: 0.0, ..r.clone() };
        let gs = Geometry::new(&m, &scaled);
        assert!(conf.energy(&m, &scaled, &gs).unwrap() < 1e-25);
        assert!(conf.forces(&m, &scaled, &gs).unwrap().iter().all(|f| f.norm() < 1e-12));
    }

    #[test]
    fn mismatched_reference_is_rejected() {
        let (m, p) = icosphere(1, 1.0).unwrap();
        let (m2, _) = icosphere(2, 1.0).unwrap();
        let r = Regularization::from_reference(&m2, &icosphere(2, 1.0).unwrap().1, 1.0, 0.0, 0.0);
        assert_eq!(r.energy(&m, &p, &Geometry::new(&m, &p)), Err(Error::MissingReference));
    }
}
