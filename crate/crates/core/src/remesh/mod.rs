//! Remeshing: Delaunay flips, collapses of skinny triangles, curvature-driven
//! splits and tangential vertex shifting, with a replayable log.

pub mod ops;
pub mod shift;

pub use ops::{apply_op, Fields, MutationLog, MutationOp};
pub use shift::vertex_shift;

use crate::ddg::curvature::edge_mean_curvature;
use crate::error::{Error, Result};
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};
use crate::physics::{Regularization, System};

use ops::{collapse_is_geometric, flip_is_geometric};

#[derive(Clone, Debug, PartialEq)]
pub struct RemeshConfig {
    pub flip: bool,
    pub collapse: bool,
    pub split: bool,
    pub shift: bool,
    /// Collapse the shortest edge of faces whose circumradius over twice
    /// the inradius exceeds this.
    pub aspect_threshold: f64,
    /// Split edges longer than the median whose `|int H| / l` exceeds this.
    pub curvature_threshold: f64,
    /// Split any edge longer than this.
    pub max_edge_length: Option<f64>,
    /// Leave edges touching the boundary to flips only.
    pub protect_boundary: bool,
}

impl Default for RemeshConfig {
    fn default() -> Self {
        RemeshConfig {
            flip: true,
            collapse: true,
            split: true,
            shift: false,
            aspect_threshold: 4.0,
            curvature_threshold: 0.5,
            max_edge_length: None,
            protect_boundary: true,
        }
    }
}

impl RemeshConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.aspect_threshold > 1.0) || !(self.curvature_threshold > 0.0) {
            return Err(Error::InvalidParams("remesh thresholds must be positive (aspect > 1)".into()));
        }
        if self.max_edge_length.is_some_and(|l| !(l > 0.0)) {
            return Err(Error::InvalidParams("max_edge_length must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RemeshReport {
    pub flips: usize,
    pub collapses: usize,
    pub splits: usize,
    pub skipped: usize,
    pub shifted: bool,
    pub protein_before: f64,
    pub protein_after: f64,
}

impl RemeshReport {
    pub fn changed_topology(&self) -> bool {
        self.flips + self.collapses + self.splits > 0
    }
}

/// Circumradius over twice the inradius; one for equilateral triangles.
pub fn aspect_ratio(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let (x, y, z) = ((b - c).norm(), (c - a).norm(), (a - b).norm());
    let area = 0.5 * (b - a).cross(&(c - a)).norm();
    if area == 0.0 {
        return f64::INFINITY;
    }
    let s = 0.5 * (x + y + z);
    x * y * z * s / (8.0 * area * area)
}

/// Whether an interior edge violates the local Delaunay condition: the two
/// angles opposite to it sum to more than pi.
pub fn is_non_delaunay(mesh: &HalfedgeMesh, pos: &[Vec3], e: usize) -> bool {
    let (Some(c), Some(d)) = mesh.opposite_vertices(e) else { return false };
    let [a, b] = mesh.edge_vertices(e);
    let angle = |o: usize| {
        let (u, v) = (pos[a] - pos[o], pos[b] - pos[o]);
        u.cross(&v).norm().atan2(u.dot(&v))
    };
    angle(c) + angle(d) > std::f64::consts::PI + 1e-12
}

fn touches_boundary(mesh: &HalfedgeMesh, e: usize) -> bool {
    let [a, b] = mesh.edge_vertices(e);
    mesh.is_boundary_vertex(a) || mesh.is_boundary_vertex(b)
}

fn protein(mesh: &HalfedgeMesh, fields: &Fields) -> f64 {
    let g = Geometry::new(mesh, &fields.pos);
    g.vertex_area.iter().zip(&fields.phi).map(|(a, p)| a * p).sum()
}

/// One remeshing pass: flips to Delaunay, collapses skinny triangles, splits
/// high-curvature edges, optionally shifts vertices, then compacts. Every
/// operation is appended to `log`; invalid operations are skipped.
pub fn remesh_pass(
    mesh: &mut HalfedgeMesh,
    fields: &mut Fields,
    cfg: &RemeshConfig,
    log: &mut MutationLog,
) -> Result<RemeshReport> {
    cfg.validate()?;
    let mut rep = RemeshReport { protein_before: protein(mesh, fields), ..Default::default() };
    let mut run = |mesh: &mut HalfedgeMesh, fields: &mut Fields, op: MutationOp, rep: &mut RemeshReport| {
        match apply_op(mesh, fields, op) {
            Ok(()) => {
                log.ops.push(op);
                true
            }
            Err(e) => {
                log::debug!("skipped {}: {e}", op.to_line());
                rep.skipped += 1;
                false
            }
        }
    };

    if cfg.flip {
        for _sweep in 0..10 {
            let mut flipped = 0;
            for e in 0..mesh.n_edges() {
                if !mesh.edge_alive(e) {
                    continue;
                }
                if is_non_delaunay(mesh, &fields.pos, e) && flip_is_geometric(mesh, &fields.pos, e) {
                    if run(mesh, fields, MutationOp::Flip(e), &mut rep) {
                        flipped += 1;
                    }
                }
            }
            rep.flips += flipped;
            if flipped == 0 {
                break;
            }
        }
    }

    if cfg.collapse {
        for f in 0..mesh.n_faces() {
            if !mesh.face_alive(f) {
                continue;
            }
            let [a, b, c] = mesh.face_vertices(f);
            if aspect_ratio(&fields.pos[a], &fields.pos[b], &fields.pos[c]) <= cfg.aspect_threshold {
                continue;
            }
            let e = mesh
                .face_halfedges(f)
                .iter()
                .map(|&h| h >> 1)
                .min_by(|&x, &y| {
                    let l = |e: usize| {
                        let [p, q] = mesh.edge_vertices(e);
                        (fields.pos[p] - fields.pos[q]).norm()
                    };
                    l(x).total_cmp(&l(y))
                })
                .unwrap();
            if cfg.protect_boundary && touches_boundary(mesh, e) {
                rep.skipped += 1;
                continue;
            }
            if collapse_is_geometric(mesh, &fields.pos, e) && run(mesh, fields, MutationOp::Collapse(e), &mut rep) {
                rep.collapses += 1;
            } else {
                rep.skipped += 1;
            }
        }
    }

    if cfg.split {
        let geom = Geometry::new(mesh, &fields.pos);
        let hm = edge_mean_curvature(&geom);
        let mut lengths: Vec<f64> = (0..mesh.n_edges()).filter(|&e| mesh.edge_alive(e)).map(|e| geom.edge_length[e]).collect();
        lengths.sort_by(f64::total_cmp);
        let median = lengths.get(lengths.len() / 2).copied().unwrap_or(0.0);
        let candidates: Vec<usize> = (0..mesh.n_edges())
            .filter(|&e| mesh.edge_alive(e))
            .filter(|&e| {
                let l = geom.edge_length[e];
                let curved = hm[e].abs() / l > cfg.curvature_threshold && l > median;
                curved || cfg.max_edge_length.is_some_and(|m| l > m)
            })
            .collect();
        for e in candidates {
            if cfg.protect_boundary && touches_boundary(mesh, e) {
                rep.skipped += 1;
                continue;
            }
            if run(mesh, fields, MutationOp::Split(e), &mut rep) {
                rep.splits += 1;
            }
        }
    }

    if cfg.shift {
        run(mesh, fields, MutationOp::Shift, &mut rep);
        rep.shifted = true;
    }
    run(mesh, fields, MutationOp::Compact, &mut rep);
    mesh.validate().map_err(Error::WouldBreakManifold)?;
    rep.protein_after = protein(mesh, fields);
    Ok(rep)
}

/// Remeshes a system in place. The regularization reference, if any, is
/// re-captured on the new mesh.
pub fn remesh_system(sys: &mut System, cfg: &RemeshConfig, log: &mut MutationLog) -> Result<RemeshReport> {
    let mut fields = Fields {
        pos: std::mem::take(&mut sys.pos),
        phi: std::mem::take(&mut sys.phi),
        extra: sys.external_force.take(),
        tracked: std::mem::take(&mut sys.anchors),
    };
    let result = remesh_pass(&mut sys.mesh, &mut fields, cfg, log);
    sys.pos = fields.pos;
    sys.phi = fields.phi;
    sys.external_force = fields.extra;
    sys.anchors = fields.tracked;
    let rep = result?;
    if rep.changed_topology() || rep.shifted {
        if let Some(r) = &sys.regularization {
            sys.regularization = Some(Regularization::from_reference(&sys.mesh, &sys.pos, r.k_e, r.k_f, r.k_c));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{flat_hex_patch, icosphere, perturbed};
    use crate::mesh::geometry::total_area;

    fn fields(pos: Vec<Vec3>) -> Fields {
        let n = pos.len();
        Fields { pos, phi: vec![0.5; n], extra: None, tracked: vec![] }
    }

    #[test]
    fn delaunay_patch_is_a_fixed_point() {
        let (mut m, p) = flat_hex_patch(1.0, 4).unwrap();
        let mut f = fields(p);
        let cfg = RemeshConfig { collapse: false, split: false, ..Default::default() };
        let rep = remesh_pass(&mut m, &mut f, &cfg, &mut MutationLog::default()).unwrap();
        assert_eq!(rep.flips, 0);
    }

    #[test]
    fn single_non_delaunay_diamond_flips_once() {
        let mut m = HalfedgeMesh::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        // long diagonal 0-2 of a thin rhombus
        let p = vec![Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, -0.3, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.3, 0.0)];
        let cfg = RemeshConfig { collapse: false, split: false, protect_boundary: false, ..Default::default() };
        let mut f = fields(p);
        let rep = remesh_pass(&mut m, &mut f, &cfg, &mut MutationLog::default()).unwrap();
        assert_eq!(rep.flips, 1);
        let again = remesh_pass(&mut m, &mut f, &cfg, &mut MutationLog::default()).unwrap();
        assert_eq!(again.flips, 0);
        assert!(m.find_halfedge(1, 3).is_some() || m.find_halfedge(3, 1).is_some());
    }

    #[test]
    fn splitting_a_face_keeps_planar_area() {
        let (mut m, p) = flat_hex_patch(1.0, 3).unwrap();
        let a0 = total_area(&m, &p);
        let f0 = m.n_faces();
        let mut f = fields(p);
        let mut log = MutationLog::default();
        let interior: Vec<usize> = (0..m.n_edges()).filter(|&e| !m.is_boundary_edge(e)).take(3).collect();
        for e in interior {
            apply_op(&mut m, &mut f, MutationOp::Split(e)).unwrap();
            log.ops.push(MutationOp::Split(e));
        }
        apply_op(&mut m, &mut f, MutationOp::Compact).unwrap();
        assert_eq!(m.n_faces(), f0 + 6);
        assert!((total_area(&m, &f.pos) - a0).abs() < 1e-14);
    }

    #[test]
    fn pass_on_noisy_sphere_is_valid_and_replayable() {
        let (m0, p) = icosphere(3, 1.0).unwrap();
        let p = perturbed(&p, 0.04, 9);
        let (mut m, mut f) = (m0.clone(), fields(p.clone()));
        let mut log = MutationLog::default();
        let cfg = RemeshConfig { shift: true, curvature_threshold: 0.05, ..Default::default() };
        let rep = remesh_pass(&mut m, &mut f, &cfg, &mut log).unwrap();
        assert!(rep.flips > 0);
        assert_eq!(m.euler_characteristic(), 2);
        let (mut m2, mut f2) = (m0, fields(p));
        MutationLog::from_text(&log.to_text()).unwrap().replay(&mut m2, &mut f2).unwrap();
        assert_eq!(m2, m);
        assert_eq!(f2, f);
    }

    #[test]
    fn aspect_ratio_of_equilateral_is_one() {
        let r = aspect_ratio(&Vec3::zeros(), &Vec3::x(), &Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0));
        assert!((r - 1.0).abs() < 1e-12);
    }
}
