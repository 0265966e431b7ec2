use crate::mesh::geometry::vertex_normal_angle_weighted;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

/// Moves every interior vertex toward the area-weighted barycenter of its
/// fan, keeping only the displacement tangent to the angle-weighted normal
/// so that curved surfaces do not shrink. Boundary vertices stay put.
pub fn vertex_shift(mesh: &HalfedgeMesh, pos: &[Vec3]) -> Vec<Vec3> {
    let geom = Geometry::new(mesh, pos);
    (0..mesh.n_vertices())
        .map(|v| {
            if !mesh.vertex_alive(v) || mesh.is_boundary_vertex(v) {
                return pos[v];
            }
            let mut area = 0.0;
            let mut centroid = Vec3::zeros();
            for f in mesh.vertex_faces(v) {
                let [a, b, c] = mesh.face_vertices(f);
                area += geom.face_area[f];
                centroid += geom.face_area[f] * (pos[a] + pos[b] + pos[c]) / 3.0;
            }
            if !(area > 0.0) {
                return pos[v];
            }
            let delta = centroid / area - pos[v];
            match vertex_normal_angle_weighted(mesh, &geom, v) {
                Ok(n) => pos[v] + delta - delta.dot(&n) * n,
                Err(_) => pos[v],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generators::{flat_hex_patch, icosphere, perturbed};

    #[test]
    fn symmetric_fans_do_not_move() {
        let (m, p) = flat_hex_patch(1.0, 3).unwrap();
        let q = vertex_shift(&m, &p);
        for v in 0..m.n_vertices() {
            assert!((q[v] - p[v]).norm() < 1e-14);
        }
    }

    #[test]
    fn flat_patch_smoothing_converges_and_keeps_boundary() {
        let (m, p) = flat_hex_patch(1.0, 5).unwrap();
        let mut q: Vec<Vec3> = perturbed(&p, 0.03, 4).iter().map(|r| Vec3::new(r.x, r.y, 0.0)).collect();
        for v in 0..m.n_vertices() {
            if m.is_boundary_vertex(v) {
                q[v] = p[v];
            }
        }
        let mut last = f64::INFINITY;
        for _ in 0..200 {
            let next = vertex_shift(&m, &q);
            let disp: f64 = next.iter().zip(&q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            for v in 0..m.n_vertices() {
                if m.is_boundary_vertex(v) {
                    assert_eq!(next[v], q[v]);
                }
            }
            assert!(disp <= last * 1.0001 + 1e-15);
            last = disp;
            q = next;
        }
        assert!(last < 1e-8, "final displacement {last}");
    }

    #[test]
    fn sphere_does_not_shrink() {
        let (m, p) = icosphere(3, 1.0).unwrap();
        let mut q = perturbed(&p, 0.01, 2);
        let r0: f64 = q.iter().map(|r| r.norm()).sum::<f64>() / q.len() as f64;
        for _ in 0..20 {
            q = vertex_shift(&m, &q);
        }
        let r1: f64 = q.iter().map(|r| r.norm()).sum::<f64>() / q.len() as f64;
        assert!((r1 - r0).abs() < 2e-3, "{r0} -> {r1}");
    }
}
