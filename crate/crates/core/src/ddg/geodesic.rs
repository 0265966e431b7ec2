//! Geodesic distance by the heat method, with an edge-graph fallback.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::laplacian::cotan_laplacian;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};

const SOLVE_TOL: f64 = 1e-12;

/// Approximate geodesic distance from `sources`.
///
/// One backward-Euler heat step with `t = (mean edge length)^2`, normalized
/// gradient, then a Poisson solve. Falls back to edge-graph distances when
/// a linear solve fails. Sources are at zero and values are nonnegative.
pub fn geodesic_distance(mesh: &HalfedgeMesh, pos: &[Vec3], sources: &[usize]) -> Result<Vec<f64>> {
    if !mesh.is_connected() {
        return Err(Error::DisconnectedComponent);
    }
    if sources.is_empty() {
        return Err(Error::InvalidParams("geodesic distance needs at least one source".into()));
    }
    match heat_method(mesh, pos, sources) {
        Ok(d) => Ok(d),
        Err(e) => {
            log::warn!("heat method failed ({e}); using edge-graph distance");
            geodesic_distance_dijkstra(mesh, pos, sources)
        }
    }
}

fn heat_method(mesh: &HalfedgeMesh, pos: &[Vec3], sources: &[usize]) -> Result<Vec<f64>> {
    let n = mesh.n_vertices();
    let geom = Geometry::new(mesh, pos);
    let live_edges: Vec<f64> = (0..mesh.n_edges()).filter(|&e| mesh.edge_alive(e)).map(|e| geom.edge_length[e]).collect();
    let h = live_edges.iter().sum::<f64>() / live_edges.len() as f64;
    let t = h * h;

    let lap = cotan_laplacian(mesh, &geom);
    let mass = CsrMatrix::identity_scaled(&geom.vertex_area);
    let heat_op = mass.add_scaled(1.0, &lap, t);
    let mut delta = vec![0.0; n];
    for &s in sources {
        delta[s] = 1.0;
    }
    let u = heat_op.solve_spd(&delta, SOLVE_TOL, 20 * n + 100)?;

    // integrated divergence of the normalized negative gradient
    let mut div = vec![0.0; n];
    for f in 0..mesh.n_faces() {
        if !mesh.face_alive(f) {
            continue;
        }
        let vs = mesh.face_vertices(f);
        let [a, b, c] = vs;
        let n_f = geom.face_normal[f];
        let grad = (u[a] * n_f.cross(&(pos[c] - pos[b]))
            + u[b] * n_f.cross(&(pos[a] - pos[c]))
            + u[c] * n_f.cross(&(pos[b] - pos[a])))
            / (2.0 * geom.face_area[f]);
        let gnorm = grad.norm();
        if !(gnorm > 0.0) {
            continue;
        }
        let x = -grad / gnorm;
        for c0 in 0..3 {
            let (i, j, k) = (vs[c0], vs[(c0 + 1) % 3], vs[(c0 + 2) % 3]);
            let cot = |o: usize, p: usize, q: usize| {
                let (u1, u2) = (pos[p] - pos[o], pos[q] - pos[o]);
                u1.dot(&u2) / u1.cross(&u2).norm()
            };
            let cot_k = cot(k, i, j);
            let cot_j = cot(j, k, i);
            div[i] += 0.5 * (cot_k * (pos[j] - pos[i]).dot(&x) + cot_j * (pos[k] - pos[i]).dot(&x));
        }
    }

    // Poisson solve with the first source pinned to zero
    let pin = sources[0];
    let index: Vec<usize> = (0..n).scan(0usize, |next, v| {
        Some(if v == pin || !mesh.vertex_alive(v) { usize::MAX } else { *next += 1; *next - 1 })
    }).collect();
    let m = index.iter().filter(|&&i| i != usize::MAX).count();
    let mut trip = Vec::with_capacity(lap.nnz());
    let mut rhs = vec![0.0; m];
    for v in 0..n {
        if index[v] == usize::MAX {
            continue;
        }
        rhs[index[v]] = -div[v];
        for (c, w) in lap.row(v) {
            if index[c] != usize::MAX {
                trip.push((index[v], index[c], w));
            }
        }
    }
    let reduced = CsrMatrix::from_triplets(m, &trip);
    let sol = reduced.solve_spd(&rhs, SOLVE_TOL, 20 * n + 100)?;
    let mut d: Vec<f64> = (0..n).map(|v| if index[v] == usize::MAX { 0.0 } else { sol[index[v]] }).collect();
    let shift = sources.iter().map(|&s| d[s]).fold(f64::INFINITY, f64::min);
    for x in d.iter_mut() {
        *x = (*x - shift).max(0.0);
    }
    for &s in sources {
        d[s] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::Solve("non-finite geodesic distance".into()));
    }
    Ok(d)
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Shortest edge-path distance from `sources`; an upper bound on geodesic
/// distance.
pub fn geodesic_distance_dijkstra(mesh: &HalfedgeMesh, pos: &[Vec3], sources: &[usize]) -> Result<Vec<f64>> {
    let mut dist = vec![f64::INFINITY; mesh.n_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Item(0.0, s));
    }
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for w in mesh.vertex_neighbors(v) {
            let nd = d + (pos[w] - pos[v]).norm();
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Item(nd, w));
            }
        }
    }
    if (0..mesh.n_vertices()).any(|v| mesh.vertex_alive(v) && !dist[v].is_finite()) {
        return Err(Error::DisconnectedComponent);
    }
    Ok(dist)
}
