//! Mutation operations on a mesh with its per-vertex fields, and a log
//! that can be replayed to reproduce a remeshing history.

use crate::error::{Error, Result};
use crate::mesh::halfedge::INVALID;
use crate::mesh::{HalfedgeMesh, Vec3};

use super::shift::vertex_shift;

/// Per-vertex data carried through mutations.
#[derive(Clone, Debug, PartialEq)]
pub struct Fields {
    pub pos: Vec<Vec3>,
    pub phi: Vec<f64>,
    pub extra: Option<Vec<Vec3>>,
    /// Vertex indices followed through collapses and compaction.
    pub tracked: Vec<usize>,
}

/// One logged mutation. Indices refer to the lazily tombstoned mesh as it
/// was when the operation ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationOp {
    Flip(usize),
    Split(usize),
    Collapse(usize),
    Shift,
    Compact,
}

impl MutationOp {
    pub fn to_line(&self) -> String {
        match self {
            MutationOp::Flip(e) => format!("flip {e}"),
            MutationOp::Split(e) => format!("split {e}"),
            MutationOp::Collapse(e) => format!("collapse {e}"),
            MutationOp::Shift => "shift".into(),
            MutationOp::Compact => "compact".into(),
        }
    }

    pub fn parse(line: &str) -> Option<Self> {
        let mut it = line.split_whitespace();
        let op = it.next()?;
        let arg = it.next().map(|s| s.parse::<usize>());
        let out = match (op, arg) {
            ("flip", Some(Ok(e))) => MutationOp::Flip(e),
            ("split", Some(Ok(e))) => MutationOp::Split(e),
            ("collapse", Some(Ok(e))) => MutationOp::Collapse(e),
            ("shift", None) => MutationOp::Shift,
            ("compact", None) => MutationOp::Compact,
            _ => return None,
        };
        it.next().is_none().then_some(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MutationLog {
    pub ops: Vec<MutationOp>,
}

impl MutationLog {
    pub fn to_text(&self) -> String {
        let mut s = String::from("# memddg mutation log v1\n");
        for op in &self.ops {
            s.push_str(&op.to_line());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            ops.push(MutationOp::parse(l).ok_or_else(|| Error::Parse { line: i + 1, message: format!("bad mutation '{l}'") })?);
        }
        Ok(MutationLog { ops })
    }

    /// Re-applies every operation in order.
    pub fn replay(&self, mesh: &mut HalfedgeMesh, fields: &mut Fields) -> Result<()> {
        for op in &self.ops {
            apply_op(mesh, fields, *op)?;
        }
        Ok(())
    }
}

/// Applies one operation with the standard field transfer: splits place the
/// new vertex at the edge midpoint with linearly interpolated fields;
/// collapses merge to the midpoint (or stay on the boundary endpoint) with
/// dual-area weighted fields.
pub fn apply_op(mesh: &mut HalfedgeMesh, fields: &mut Fields, op: MutationOp) -> Result<()> {
    match op {
        MutationOp::Flip(e) => mesh.flip_edge(e),
        MutationOp::Split(e) => {
            let [a, b] = mesh.edge_vertices(e);
            let r = mesh.split_edge(e)?;
            debug_assert_eq!(r.new_vertex, fields.pos.len());
            fields.pos.push(0.5 * (fields.pos[a] + fields.pos[b]));
            fields.phi.push(0.5 * (fields.phi[a] + fields.phi[b]));
            if let Some(x) = fields.extra.as_mut() {
                x.push(0.5 * (x[a] + x[b]));
            }
            Ok(())
        }
        MutationOp::Collapse(e) => {
            let [a, b] = mesh.edge_vertices(e);
            let (wa, wb) = (dual_area(mesh, &fields.pos, a), dual_area(mesh, &fields.pos, b));
            let target = collapse_target(mesh, &fields.pos, e);
            let r = mesh.collapse_edge(e)?;
            let (k, g) = (r.kept, r.removed);
            let (wk, wg) = if k == a { (wa, wb) } else { (wb, wa) };
            let w = wk + wg;
            let (ck, cg) = if w > 0.0 { (wk / w, wg / w) } else { (0.5, 0.5) };
            fields.tracked.iter_mut().filter(|t| **t == g).for_each(|t| *t = k);
            fields.pos[k] = target;
            fields.phi[k] = ck * fields.phi[k] + cg * fields.phi[g];
            if let Some(x) = fields.extra.as_mut() {
                x[k] = ck * x[k] + cg * x[g];
            }
            Ok(())
        }
        MutationOp::Shift => {
            fields.pos = vertex_shift(mesh, &fields.pos);
            Ok(())
        }
        MutationOp::Compact => {
            let map = mesh.compact();
            fields.tracked.iter_mut().for_each(|t| *t = map.vertices[*t]);
            let keep = |v: usize| map.vertices[v] != INVALID;
            let n = map.vertices.len();
            fields.pos = (0..n).filter(|&v| keep(v)).map(|v| fields.pos[v]).collect();
            fields.phi = (0..n).filter(|&v| keep(v)).map(|v| fields.phi[v]).collect();
            if let Some(x) = fields.extra.as_mut() {
                *x = (0..n).filter(|&v| keep(v)).map(|v| x[v]).collect();
            }
            Ok(())
        }
    }
}

fn dual_area(mesh: &HalfedgeMesh, pos: &[Vec3], v: usize) -> f64 {
    mesh.vertex_faces(v)
        .map(|f| {
            let [a, b, c] = mesh.face_vertices(f);
            0.5 * (pos[b] - pos[a]).cross(&(pos[c] - pos[a])).norm()
        })
        .sum::<f64>()
        / 3.0
}

/// Where the merged vertex of a collapse is placed.
pub fn collapse_target(mesh: &HalfedgeMesh, pos: &[Vec3], e: usize) -> Vec3 {
    let [a, b] = mesh.edge_vertices(e);
    match (mesh.is_boundary_vertex(a), mesh.is_boundary_vertex(b), mesh.is_boundary_edge(e)) {
        (true, false, _) => pos[a],
        (false, true, _) => pos[b],
        _ => 0.5 * (pos[a] + pos[b]),
    }
}

/// Whether flipping `e` keeps both new faces non-degenerate and oriented
/// like the diamond.
pub fn flip_is_geometric(mesh: &HalfedgeMesh, pos: &[Vec3], e: usize) -> bool {
    if !mesh.can_flip(e) {
        return false;
    }
    let [a, b] = mesh.edge_vertices(e);
    let (Some(c), Some(d)) = mesh.opposite_vertices(e) else { return false };
    let n = |x: usize, y: usize, z: usize| (pos[y] - pos[x]).cross(&(pos[z] - pos[x]));
    // old faces are (a, b, c) and (b, a, d); new ones (d, b, c) and (a, d, c)
    let avg = n(a, b, c).normalize() + n(b, a, d).normalize();
    let (n0, n1) = (n(d, b, c), n(a, d, c));
    let scale = (pos[a] - pos[b]).norm_squared() * 1e-10;
    n0.dot(&avg) > scale && n1.dot(&avg) > scale
}

/// Whether collapsing `e` keeps every surviving face around the merged
/// vertex non-degenerate and oriented as before.
pub fn collapse_is_geometric(mesh: &HalfedgeMesh, pos: &[Vec3], e: usize) -> bool {
    if !mesh.can_collapse(e) {
        return false;
    }
    let [a, b] = mesh.edge_vertices(e);
    let target = collapse_target(mesh, pos, e);
    for v in [a, b] {
        for f in mesh.vertex_faces(v) {
            let vs = mesh.face_vertices(f);
            if vs.contains(&a) && vs.contains(&b) {
                continue;
            }
            let old = |x: usize| pos[x];
            let new = |x: usize| if x == a || x == b { target } else { pos[x] };
            let no = (old(vs[1]) - old(vs[0])).cross(&(old(vs[2]) - old(vs[0])));
            let nn = (new(vs[1]) - new(vs[0])).cross(&(new(vs[2]) - new(vs[0])));
            if nn.dot(&no) <= 1e-3 * no.norm_squared() {
                return false;
            }
        }
    }
    true
}
