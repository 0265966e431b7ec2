//! Procedural meshes: icosphere, spheroid, cube, tetrahedron, open tube,
//! flat hexagonal patch and a spine-like open surface.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{HalfedgeMesh, Vec3};

pub type MeshAndPositions = (HalfedgeMesh, Vec<Vec3>);

fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let pos = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vec3::new(p[0], p[1], p[2]).normalize())
    .collect();
    let tris = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    (pos, tris)
}

/// One round of 1-to-4 midpoint refinement; `project` places each new
/// midpoint.
fn subdivide(
    pos: &mut Vec<Vec3>,
    tris: Vec<[usize; 3]>,
    project: impl Fn(Vec3) -> Vec3,
) -> Vec<[usize; 3]> {
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let mut next = Vec::with_capacity(tris.len() * 4);
    let mut midpoint = |a: usize, b: usize, pos: &mut Vec<Vec3>| {
        *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
            pos.push(project((pos[a] + pos[b]) * 0.5));
            pos.len() - 1
        })
    };
    for [a, b, c] in tris {
        let ab = midpoint(a, b, pos);
        let bc = midpoint(b, c, pos);
        let ca = midpoint(c, a, pos);
        next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
    }
    next
}

/// Unit-sphere vertices and faces after `subdivisions` rounds of 1-to-4
/// midpoint refinement of the icosahedron.
pub fn icosphere_raw(subdivisions: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let (mut pos, mut tris) = icosahedron();
    for _ in 0..subdivisions {
        tris = subdivide(&mut pos, tris, |p| p.normalize());
    }
    (pos, tris)
}

fn flat_refined(mut pos: Vec<Vec3>, mut tris: Vec<[usize; 3]>, subdivisions: usize) -> Result<MeshAndPositions> {
    for _ in 0..subdivisions {
        tris = subdivide(&mut pos, tris, |p| p);
    }
    Ok((HalfedgeMesh::from_triangles(pos.len(), &tris)?, pos))
}

/// Regular tetrahedron inscribed in the unit sphere, each face refined flat.
pub fn tetrahedron(subdivisions: usize) -> Result<MeshAndPositions> {
    let pos = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|p| Vec3::new(p[0], p[1], p[2]) / 3f64.sqrt())
        .collect();
    flat_refined(pos, vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]], subdivisions)
}

/// Unit cube `[0, 1]^3` with two triangles per face, each refined flat.
pub fn cube(subdivisions: usize) -> Result<MeshAndPositions> {
    let pos = (0..8).map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64)).collect();
    let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
    let tris = quads.iter().flat_map(|[a, b, c, d]| [[*a, *b, *c], [*a, *c, *d]]).collect();
    flat_refined(pos, tris, subdivisions)
}

pub fn icosphere(subdivisions: usize, radius: f64) -> Result<MeshAndPositions> {
    if !(radius > 0.0) || subdivisions > 8 {
        return Err(Error::InvalidParams(format!("icosphere subdivisions {subdivisions}, radius {radius}")));
    }
    let (pos, tris) = icosphere_raw(subdivisions);
    let mesh = HalfedgeMesh::from_triangles(pos.len(), &tris)?;
    Ok((mesh, pos.into_iter().map(|p| p * radius).collect()))
}

/// Spheroid with equatorial semi-axis `a` and polar semi-axis `c`, made by
/// projecting icosphere vertices radially onto the surface.
pub fn spheroid(subdivisions: usize, a: f64, c: f64) -> Result<MeshAndPositions> {
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::InvalidParams(format!("spheroid axes {a}, {c}")));
    }
    let (mesh, unit) = icosphere(subdivisions, 1.0)?;
    let pos = unit.iter().map(|u| radial_to_spheroid(u, a, c)).collect();
    Ok((mesh, pos))
}

pub fn radial_to_spheroid(u: &Vec3, a: f64, c: f64) -> Vec3 {
    let s = ((u.x * u.x + u.y * u.y) / (a * a) + u.z * u.z / (c * c)).sqrt();
    u / s
}

/// Open cylinder along `z` from `0` to `length` with `n_around` vertices per
/// ring; alternate rings are staggered so triangles are close to equilateral.
pub fn tube(radius: f64, length: f64, n_around: usize) -> Result<MeshAndPositions> {
    if !(radius > 0.0 && length > 0.0) || n_around < 3 {
        return Err(Error::InvalidParams(format!("tube radius {radius}, length {length}, n_around {n_around}")));
    }
    let spacing = 2.0 * std::f64::consts::PI * radius / n_around as f64;
    let rings = ((length / (spacing * 3f64.sqrt() / 2.0)).round() as usize).max(1) + 1;
    let mut pos = Vec::with_capacity(rings * n_around);
    for r in 0..rings {
        let z = length * r as f64 / (rings - 1) as f64;
        let offset = if r % 2 == 1 { 0.5 } else { 0.0 };
        for k in 0..n_around {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + offset) / n_around as f64;
            pos.push(Vec3::new(radius * t.cos(), radius * t.sin(), z));
        }
    }
    let id = |r: usize, k: usize| r * n_around + k % n_around;
    let mut tris = Vec::new();
    for r in 0..rings - 1 {
        for k in 0..n_around {
            if r % 2 == 0 {
                tris.push([id(r, k), id(r, k + 1), id(r + 1, k)]);
                tris.push([id(r, k + 1), id(r + 1, k + 1), id(r + 1, k)]);
            } else {
                tris.push([id(r, k), id(r, k + 1), id(r + 1, k + 1)]);
                tris.push([id(r, k), id(r + 1, k + 1), id(r + 1, k)]);
            }
        }
    }
    let mesh = HalfedgeMesh::from_triangles(pos.len(), &tris)?;
    Ok((mesh, pos))
}

/// Flat hexagonal patch in the `xy`-plane with circumradius `radius` and
/// `rings` lattice rings, normals along `+z`.
pub fn flat_hex_patch(radius: f64, rings: usize) -> Result<MeshAndPositions> {
    if !(radius > 0.0) || rings == 0 {
        return Err(Error::InvalidParams(format!("patch radius {radius}, rings {rings}")));
    }
    let n = rings as i64;
    let s = radius / rings as f64;
    let mut index = HashMap::new();
    let mut pos = Vec::new();
    for r in -n..=n {
        for q in -n..=n {
            if (q + r).abs() <= n {
                index.insert((q, r), pos.len());
                pos.push(Vec3::new(s * (q as f64 + r as f64 / 2.0), s * r as f64 * 3f64.sqrt() / 2.0, 0.0));
            }
        }
    }
    let mut tris = Vec::new();
    for r in -n..=n {
        for q in -n..=n {
            for tri in [[(q, r), (q + 1, r), (q, r + 1)], [(q + 1, r), (q + 1, r + 1), (q, r + 1)]] {
                if let (Some(&a), Some(&b), Some(&c)) = (index.get(&tri[0]), index.get(&tri[1]), index.get(&tri[2])) {
                    tris.push([a, b, c]);
                }
            }
        }
    }
    let mesh = HalfedgeMesh::from_triangles(pos.len(), &tris)?;
    Ok((mesh, pos))
}

/// Spine-like open surface: a spherical head of radius `radius` on a
/// narrowed neck, open at the bottom.
pub fn spine(subdivisions: usize, radius: f64) -> Result<MeshAndPositions> {
    let (pos, tris) = icosphere_raw(subdivisions);
    let pos: Vec<Vec3> = pos
        .into_iter()
        .map(|p| {
            let pinch = if p.z < 0.0 { 1.0 - 0.6 * (-p.z).powf(1.5) } else { 1.0 };
            Vec3::new(p.x * pinch, p.y * pinch, p.z) * radius
        })
        .collect();
    let cut = -0.75 * radius;
    let kept: Vec<[usize; 3]> = tris.into_iter().filter(|t| t.iter().all(|&v| pos[v].z > cut)).collect();
    submesh(&pos, &kept)
}

/// Builds a mesh from the referenced subset of `pos`, renumbering vertices
/// in order of first appearance.
pub fn submesh(pos: &[Vec3], tris: &[[usize; 3]]) -> Result<MeshAndPositions> {
    let mut map = vec![usize::MAX; pos.len()];
    let mut new_pos = Vec::new();
    let tris: Vec<[usize; 3]> = tris
        .iter()
        .map(|t| {
            t.map(|v| {
                if map[v] == usize::MAX {
                    map[v] = new_pos.len();
                    new_pos.push(pos[v]);
                }
                map[v]
            })
        })
        .collect();
    let mesh = HalfedgeMesh::from_triangles(new_pos.len(), &tris)?;
    Ok((mesh, new_pos))
}

/// Adds independent uniform noise in `[-amplitude, amplitude]` to every
/// coordinate.
pub fn perturbed(pos: &[Vec3], amplitude: f64, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pos.iter()
        .map(|p| p + Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amplitude)
        .collect()
}
