//! Boundary conditions as masks over force rows and chemical potentials.

use crate::error::{Error, Result};
use crate::mesh::{HalfedgeMesh, Vec3};

/// How boundary vertices of an open mesh may move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryKind {
    /// No condition; only valid for closed meshes.
    None,
    /// Motion along `axis` is removed on boundary vertices.
    Roller { axis: Vec3 },
    /// Boundary vertices do not move.
    Pinned,
    /// The outermost three vertex rings do not move.
    Fixed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConditions {
    /// Condition per boundary loop; a single entry applies to every loop.
    pub loops: Vec<BoundaryKind>,
    /// When set, boundary protein density is held at this value.
    pub protein_dirichlet: Option<f64>,
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        BoundaryConditions { loops: vec![BoundaryKind::None], protein_dirichlet: None }
    }
}

impl BoundaryConditions {
    pub fn uniform(kind: BoundaryKind) -> Self {
        BoundaryConditions { loops: vec![kind], protein_dirichlet: None }
    }

    fn kind_for(&self, loop_index: usize) -> BoundaryKind {
        match self.loops.len() {
            0 => BoundaryKind::None,
            1 => self.loops[0],
            _ => self.loops.get(loop_index).copied().unwrap_or(BoundaryKind::None),
        }
    }
}

/// Per-vertex constraint resolved from [`BoundaryConditions`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VertexConstraint {
    Free,
    Axis(Vec3),
    Frozen,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    pub shape: Vec<VertexConstraint>,
    pub phi_fixed: Vec<bool>,
}

impl Mask {
    pub fn build(mesh: &HalfedgeMesh, bc: &BoundaryConditions) -> Result<Self> {
        let n = mesh.n_vertices();
        let mut shape = vec![VertexConstraint::Free; n];
        let mut phi_fixed = vec![false; n];
        for (li, lp) in mesh.boundary_loops().iter().enumerate() {
            let kind = bc.kind_for(li);
            let ring: Vec<usize> = lp.iter().map(|&h| mesh.tail(h)).collect();
            match kind {
                BoundaryKind::None => return Err(Error::UnassignedLoop(li)),
                BoundaryKind::Roller { axis } => {
                    let n_axis = axis.try_normalize(0.0).ok_or_else(|| Error::InvalidParams("zero roller axis".into()))?;
                    for &v in &ring {
                        shape[v] = VertexConstraint::Axis(n_axis);
                    }
                }
                BoundaryKind::Pinned => {
                    for &v in &ring {
                        shape[v] = VertexConstraint::Frozen;
                    }
                }
                BoundaryKind::Fixed => {
                    let mut layer = ring.clone();
                    let mut seen = vec![false; n];
                    for _ in 0..3 {
                        let mut next = Vec::new();
                        for &v in &layer {
                            if !seen[v] {
                                seen[v] = true;
                                shape[v] = VertexConstraint::Frozen;
                                next.extend(mesh.vertex_neighbors(v));
                            }
                        }
                        layer = next.into_iter().filter(|&w| !seen[w]).collect();
                    }
                }
            }
            if bc.protein_dirichlet.is_some() {
                for &v in &ring {
                    phi_fixed[v] = true;
                }
            }
        }
        Ok(Mask { shape, phi_fixed })
    }

    pub fn apply_forces(&self, f: &mut [Vec3]) {
        for (fv, c) in f.iter_mut().zip(&self.shape) {
            match c {
                VertexConstraint::Free => {}
                VertexConstraint::Frozen => *fv = Vec3::zeros(),
                VertexConstraint::Axis(a) => {
                    *fv -= fv.dot(a) * a;
                    // exact zero for coordinate axes
                    for k in 0..3 {
                        if a[k].abs() == 1.0 {
                            fv[k] = 0.0;
                        }
                    }
                }
            }
        }
    }

    pub fn apply_potential(&self, mu: &mut [f64]) {
        for (m, &fixed) in mu.iter_mut().zip(&self.phi_fixed) {
            if fixed {
                *m = 0.0;
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.shape.iter().all(|c| *c == VertexConstraint::Free) && !self.phi_fixed.iter().any(|&b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{flat_hex_patch, icosphere, tube};

    #[test]
    fn closed_mesh_mask_is_identity() {
        let (m, _) = icosphere(1, 1.0).unwrap();
        assert!(Mask::build(&m, &BoundaryConditions::default()).unwrap().is_identity());
    }

    #[test]
    fn open_mesh_needs_a_condition() {
        let (m, _) = flat_hex_patch(1.0, 3).unwrap();
        assert_eq!(Mask::build(&m, &BoundaryConditions::default()), Err(Error::UnassignedLoop(0)));
    }

    #[test]
    fn pinned_and_roller() {
        let (m, _) = flat_hex_patch(1.0, 3).unwrap();
        let mask = Mask::build(&m, &BoundaryConditions::uniform(BoundaryKind::Pinned)).unwrap();
        let mut f = vec![Vec3::new(1.0, 2.0, 3.0); m.n_vertices()];
        mask.apply_forces(&mut f);
        for v in 0..m.n_vertices() {
            assert_eq!(f[v] == Vec3::zeros(), m.is_boundary_vertex(v));
        }

        let (m, _) = tube(1.0, 3.0, 12).unwrap();
        let mask = Mask::build(&m, &BoundaryConditions::uniform(BoundaryKind::Roller { axis: Vec3::z() })).unwrap();
        let mut f = vec![Vec3::new(0.3, -0.7, 1.1); m.n_vertices()];
        mask.apply_forces(&mut f);
        for v in 0..m.n_vertices() {
            assert_eq!(f[v].x, 0.3);
            assert_eq!(f[v].y, -0.7);
            assert_eq!(f[v].z == 0.0, m.is_boundary_vertex(v));
        }
    }

    #[test]
    fn fixed_masks_three_rings() {
        let (m, _) = flat_hex_patch(1.0, 5).unwrap();
        let mask = Mask::build(&m, &BoundaryConditions::uniform(BoundaryKind::Fixed)).unwrap();
        // hexagonal rings 5, 4 and 3 are frozen: 6 * (5 + 4 + 3) vertices
        let frozen = mask.shape.iter().filter(|c| **c == VertexConstraint::Frozen).count();
        assert_eq!(frozen, 72);
    }
}
