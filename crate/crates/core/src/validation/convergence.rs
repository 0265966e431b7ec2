//! Refinement study of discrete measures against the smooth spheroid.

use rayon::prelude::*;

use super::fit::loglog_slope;
use super::quadrature::reference_discrepancy;
use super::spheroid::SpheroidReference;
use crate::ddg::curvature::{vertex_gaussian_curvature, vertex_mean_curvature};
use crate::ddg::laplacian::cotan_laplacian;
use crate::ddg::primitives::dihedral_gradients;
use crate::ddg::vectors::CurvatureVectors;
use crate::error::{Error, Result};
use crate::io::generators::spheroid;
use crate::mesh::geometry::enclosed_volume;
use crate::mesh::{Geometry, HalfedgeMesh, Vec3};
use crate::solver::{l1_field_error, l1_vector_error};

/// Column names shared by [`LevelResult::values`] and the CSV output.
pub const COLUMNS: [&str; 12] = [
    "area", "volume", "total_mean", "total_mean_sq", "total_gauss", "l1_mean", "l1_gauss", "l1_mean_vec",
    "l1_gauss_vec", "l1_lap_mean", "l1_schlafli", "mean_edge",
];

#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub subdivisions: usize,
    pub n_vertices: usize,
    /// Mean edge length over that of the finest level.
    pub h: f64,
    pub mean_edge: f64,
    pub area: f64,
    pub volume: f64,
    pub total_mean: f64,
    pub total_mean_sq: f64,
    /// Gauss-Bonnet deviation; zero up to round-off at every level.
    pub total_gauss: f64,
    pub l1_mean: f64,
    pub l1_gauss: f64,
    pub l1_mean_vec: f64,
    pub l1_gauss_vec: f64,
    /// Cotangent Laplacian of the pointwise mean curvature.
    pub l1_lap_mean: f64,
    /// Dihedral-variation part of the bending force.
    pub l1_schlafli: f64,
}

impl LevelResult {
    fn values(&self) -> [f64; 12] {
        [
            self.area,
            self.volume,
            self.total_mean,
            self.total_mean_sq,
            self.total_gauss,
            self.l1_mean,
            self.l1_gauss,
            self.l1_mean_vec,
            self.l1_gauss_vec,
            self.l1_lap_mean,
            self.l1_schlafli,
            self.mean_edge,
        ]
    }
}

/// Log-log slopes over the finest three levels.
#[derive(Clone, Debug, PartialEq)]
pub struct Slopes {
    pub area: f64,
    pub volume: f64,
    pub total_mean: f64,
    pub total_mean_sq: f64,
    pub l1_mean: f64,
    pub l1_gauss: f64,
    pub l1_mean_vec: f64,
    pub l1_gauss_vec: f64,
    pub l1_lap_mean: f64,
    pub l1_schlafli: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub reference: SpheroidReference,
    pub levels: Vec<LevelResult>,
    pub slopes: Slopes,
}

/// Per-vertex discrete and smooth quantities at one level.
#[derive(Clone, Debug)]
pub struct Pointwise {
    pub pos: Vec<Vec3>,
    pub beta: Vec<f64>,
    pub dual_area: Vec<f64>,
    pub mean: Vec<f64>,
    pub mean_ref: Vec<f64>,
    pub gauss: Vec<f64>,
    pub gauss_ref: Vec<f64>,
    pub mean_vec: Vec<Vec3>,
    pub gauss_vec: Vec<Vec3>,
    pub normal_ref: Vec<Vec3>,
    pub lap_mean: Vec<f64>,
    pub schlafli: Vec<Vec3>,
    pub lap_mean_ref: Vec<f64>,
}

/// `-sum_e (H_a + H_b) / 2 * l_e * grad theta_e`, the part of the force of
/// `sum_i H_i^2 A_i` carried by dihedral-angle variation; its smooth
/// counterpart is `Lap H n A`.
fn schlafli_proxy(mesh: &HalfedgeMesh, geom: &Geometry, h: &[f64]) -> Vec<Vec3> {
    let mut out = vec![Vec3::zeros(); mesh.n_vertices()];
    for e in 0..mesh.n_edges() {
        if !mesh.edge_alive(e) {
            continue;
        }
        if let Some((vs, gs)) = dihedral_gradients(mesh, geom, 2 * e) {
            let w = 0.5 * (h[vs[0]] + h[vs[1]]) * geom.edge_length[e];
            for (v, g) in vs.iter().zip(gs) {
                out[*v] -= w * g;
            }
        }
    }
    out
}

pub fn pointwise(reference: &SpheroidReference, subdivisions: usize) -> Result<(HalfedgeMesh, Pointwise)> {
    let (mesh, pos) = spheroid(subdivisions, reference.a, reference.c)?;
    let geom = Geometry::new(&mesh, &pos);
    let mc = vertex_mean_curvature(&mesh, &geom);
    let gauss = vertex_gaussian_curvature(&mesh, &geom);
    let cv = CurvatureVectors::new(&mesh, &pos, &geom);
    let mean_vec: Vec<Vec3> = CurvatureVectors::accumulate(&mesh, &cv.mean).iter().map(|v| 0.5 * v).collect();
    let gauss_vec = CurvatureVectors::accumulate(&mesh, &cv.gauss);
    let lap_mean: Vec<f64> = cotan_laplacian(&mesh, &geom).mul_vec(&mc.pointwise).iter().map(|x| -x).collect();
    let schlafli = schlafli_proxy(&mesh, &geom, &mc.pointwise);
    let params: Vec<(f64, f64)> = pos.iter().map(|p| reference.parameters(p)).collect();
    let a = &geom.vertex_area;
    let pw = Pointwise {
        beta: params.iter().map(|p| p.0).collect(),
        mean_ref: params.iter().zip(a).map(|(p, a)| reference.mean(p.0) * a).collect(),
        gauss_ref: params.iter().zip(a).map(|(p, a)| reference.gauss(p.0) * a).collect(),
        normal_ref: params.iter().map(|p| reference.normal(p.0, p.1)).collect(),
        lap_mean_ref: params.iter().zip(a).map(|(p, a)| reference.laplacian_of_mean(p.0) * a).collect(),
        dual_area: a.clone(),
        mean: mc.integrated,
        gauss,
        mean_vec,
        gauss_vec,
        lap_mean,
        schlafli,
        pos,
    };
    Ok((mesh, pw))
}

fn level(reference: &SpheroidReference, subdivisions: usize) -> Result<LevelResult> {
    let (mesh, pw) = pointwise(reference, subdivisions)?;
    let geom = Geometry::new(&mesh, &pw.pos);
    let area = geom.total_area();
    let volume = enclosed_volume(&mesh, &pw.pos, 1e-8)?;
    let total_mean: f64 = pw.mean.iter().sum();
    let total_mean_sq: f64 = pw.mean.iter().zip(&pw.dual_area).map(|(h, a)| h * h / a).sum();
    let total_gauss: f64 = pw.gauss.iter().sum();
    let scaled = |s: &[f64]| -> Vec<Vec3> { pw.normal_ref.iter().zip(s).map(|(n, x)| n * *x).collect() };
    let mean_edge = geom.edge_length.iter().sum::<f64>() / geom.edge_length.len() as f64;
    Ok(LevelResult {
        subdivisions,
        n_vertices: mesh.n_vertices(),
        h: mean_edge,
        mean_edge,
        area: (area - reference.area()).abs(),
        volume: (volume - reference.volume()).abs(),
        total_mean: (total_mean - reference.total_mean()).abs(),
        total_mean_sq: (total_mean_sq - reference.total_mean_squared()).abs(),
        total_gauss: (total_gauss - reference.total_gauss()).abs(),
        l1_mean: l1_field_error(&pw.mean, &pw.mean_ref, area)?,
        l1_gauss: l1_field_error(&pw.gauss, &pw.gauss_ref, area)?,
        l1_mean_vec: l1_vector_error(&pw.mean_vec, &scaled(&pw.mean_ref), area)?,
        l1_gauss_vec: l1_vector_error(&pw.gauss_vec, &scaled(&pw.gauss_ref), area)?,
        l1_lap_mean: l1_field_error(&pw.lap_mean, &pw.lap_mean_ref, area)?,
        l1_schlafli: l1_vector_error(&pw.schlafli, &scaled(&pw.lap_mean_ref), area)?,
    })
}

/// Runs the study on the `a = 1, c = 0.5` spheroid at the given icosphere
/// subdivision levels, which must be strictly increasing and at least three.
pub fn spheroid_convergence_study(subdivisions: &[usize]) -> Result<ConvergenceReport> {
    spheroid_convergence_study_with(SpheroidReference::default(), subdivisions)
}

pub fn spheroid_convergence_study_with(reference: SpheroidReference, subdivisions: &[usize]) -> Result<ConvergenceReport> {
    if subdivisions.len() < 3 || subdivisions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams("need at least three strictly increasing levels".into()));
    }
    let gap = reference_discrepancy(&reference);
    if gap > 1e-8 {
        return Err(Error::InvalidParams(format!("closed-form spheroid reference disagrees with quadrature by {gap:e}")));
    }
    let mut levels = subdivisions.par_iter().map(|&s| level(&reference, s)).collect::<Result<Vec<_>>>()?;
    let finest = levels.last().map(|l| l.mean_edge).unwrap_or(1.0);
    for l in &mut levels {
        l.h = l.mean_edge / finest;
    }
    let tail = &levels[levels.len() - 3..];
    let h: Vec<f64> = tail.iter().map(|l| l.h).collect();
    let slope = |f: fn(&LevelResult) -> f64| loglog_slope(&h, &tail.iter().map(f).collect::<Vec<_>>());
    let slopes = Slopes {
        area: slope(|l| l.area),
        volume: slope(|l| l.volume),
        total_mean: slope(|l| l.total_mean),
        total_mean_sq: slope(|l| l.total_mean_sq),
        l1_mean: slope(|l| l.l1_mean),
        l1_gauss: slope(|l| l.l1_gauss),
        l1_mean_vec: slope(|l| l.l1_mean_vec),
        l1_gauss_vec: slope(|l| l.l1_gauss_vec),
        l1_lap_mean: slope(|l| l.l1_lap_mean),
        l1_schlafli: slope(|l| l.l1_schlafli),
    };
    Ok(ConvergenceReport { reference, levels, slopes })
}

impl ConvergenceReport {
    /// One row per level: subdivisions, vertex count, normalized h, then
    /// the absolute deviations and L1 errors named in [`COLUMNS`].
    pub fn to_csv(&self) -> String {
        let mut s = format!("subdivisions,n_vertices,h,{}\n", COLUMNS.join(","));
        for l in &self.levels {
            s.push_str(&format!("{},{},{:?}", l.subdivisions, l.n_vertices, l.h));
            for v in l.values() {
                s.push_str(&format!(",{v:?}"));
            }
            s.push('\n');
        }
        s
    }

    /// Slope table; the biharmonic proxies are reported without a bound.
    pub fn slopes_csv(&self) -> String {
        let s = &self.slopes;
        let rows = [
            ("area", s.area, Some(1.7)),
            ("volume", s.volume, Some(1.7)),
            ("total_mean", s.total_mean, Some(1.7)),
            ("total_mean_sq", s.total_mean_sq, Some(1.7)),
            ("l1_mean", s.l1_mean, Some(1.7)),
            ("l1_gauss", s.l1_gauss, Some(1.7)),
            ("l1_mean_vec", s.l1_mean_vec, Some(1.3)),
            ("l1_gauss_vec", s.l1_gauss_vec, Some(1.3)),
            ("l1_lap_mean", s.l1_lap_mean, None),
            ("l1_schlafli", s.l1_schlafli, None),
        ];
        let mut out = String::from("quantity,slope,required\n");
        for (name, v, req) in rows {
            let r = req.map_or("none".to_string(), |r| format!("{r:?}"));
            out.push_str(&format!("{name},{v:?},{r}\n"));
        }
        out
    }
}

/// Per-vertex comparison at one level, for offline plotting.
pub fn pointwise_csv(reference: &SpheroidReference, subdivisions: usize) -> Result<String> {
    let (_, pw) = pointwise(reference, subdivisions)?;
    let mut s = String::from("x,y,z,beta,dual_area,H,H_ref,K,K_ref,Hvec_n,Kvec_n,lapH,lapH_ref,schlafli_n\n");
    for i in 0..pw.pos.len() {
        let (p, a, n) = (pw.pos[i], pw.dual_area[i], pw.normal_ref[i]);
        let vals = [
            p.x,
            p.y,
            p.z,
            pw.beta[i],
            a,
            pw.mean[i] / a,
            pw.mean_ref[i] / a,
            pw.gauss[i] / a,
            pw.gauss_ref[i] / a,
            pw.mean_vec[i].dot(&n) / a,
            pw.gauss_vec[i].dot(&n) / a,
            pw.lap_mean[i] / a,
            pw.lap_mean_ref[i] / a,
            pw.schlafli[i].dot(&n) / a,
        ];
        let row: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_levels() {
        assert!(spheroid_convergence_study(&[1, 2]).is_err());
        assert!(spheroid_convergence_study(&[1, 3, 2]).is_err());
    }

    #[test]
    fn coarse_study_is_consistent() {
        let r = spheroid_convergence_study(&[1, 2, 3]).unwrap();
        assert_eq!(r.levels.len(), 3);
        assert_eq!(r.levels[2].h, 1.0);
        assert!(r.levels.iter().all(|l| l.total_gauss < 1e-9 * l.n_vertices as f64));
        assert!(r.levels[0].area > r.levels[2].area);
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
