//! ASCII PLY and Wavefront OBJ reading and writing. The protein density
//! travels as a `phi` vertex property in PLY and as `#@phi` comment lines in
//! OBJ, which other readers ignore.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{HalfedgeMesh, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Ply,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("ply") => Ok(MeshFormat::Ply),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::Io(format!("unrecognized mesh extension: {}", path.display()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshData {
    pub mesh: HalfedgeMesh,
    pub pos: Vec<Vec3>,
    pub phi: Option<Vec<f64>>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("invalid {what} '{tok}'")))
}

pub fn read_mesh(path: &Path) -> Result<MeshData> {
    let text = std::fs::read_to_string(path)?;
    match MeshFormat::from_path(path)? {
        MeshFormat::Ply => parse_ply(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

pub fn write_mesh(path: &Path, mesh: &HalfedgeMesh, pos: &[Vec3], phi: Option<&[f64]>) -> Result<()> {
    let text = match MeshFormat::from_path(path)? {
        MeshFormat::Ply => to_ply(mesh, pos, phi),
        MeshFormat::Obj => to_obj(mesh, pos, phi),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn to_ply(mesh: &HalfedgeMesh, pos: &[Vec3], phi: Option<&[f64]>) -> String {
    let tris = mesh.triangles();
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", pos.len());
    s.push_str("property double x\nproperty double y\nproperty double z\n");
    if phi.is_some() {
        s.push_str("property double phi\n");
    }
    let _ = writeln!(s, "element face {}", tris.len());
    s.push_str("property list uchar int vertex_indices\nend_header\n");
    for (v, p) in pos.iter().enumerate() {
        let _ = write!(s, "{:?} {:?} {:?}", p.x, p.y, p.z);
        if let Some(phi) = phi {
            let _ = write!(s, " {:?}", phi[v]);
        }
        s.push('\n');
    }
    for [a, b, c] in tris {
        let _ = writeln!(s, "3 {a} {b} {c}");
    }
    s
}

pub fn parse_ply(text: &str) -> Result<MeshData> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(perr(1, "missing 'ply' magic")),
    }
    let (mut nv, mut nf) = (None, None);
    let mut props: Vec<String> = Vec::new();
    let mut current = "";
    loop {
        let (ln, l) = lines.next().ok_or_else(|| perr(0, "unterminated header"))?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "ascii", _] => {}
            ["format", f, ..] => return Err(perr(ln, format!("unsupported format '{f}'"))),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", "vertex", n] => {
                nv = Some(num::<usize>(Some(n), ln, "vertex count")?);
                current = "vertex";
            }
            ["element", "face", n] => {
                nf = Some(num::<usize>(Some(n), ln, "face count")?);
                current = "face";
            }
            ["element", name, _] => return Err(perr(ln, format!("unsupported element '{name}'"))),
            ["property", "list", ..] if current == "face" => {}
            ["property", _, name] if current == "vertex" => props.push(name.to_string()),
            ["end_header"] => break,
            _ => return Err(perr(ln, format!("unexpected header line '{l}'"))),
        }
    }
    let nv = nv.ok_or_else(|| perr(0, "missing vertex element"))?;
    let nf = nf.ok_or_else(|| perr(0, "missing face element"))?;
    let col = |name: &str| props.iter().position(|p| p == name);
    let (cx, cy, cz) = match (col("x"), col("y"), col("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(perr(0, "vertex element lacks x, y or z")),
    };
    let cphi = col("phi");
    let mut pos = Vec::with_capacity(nv);
    let mut phi = cphi.map(|_| Vec::with_capacity(nv));
    let mut body = lines.filter(|(_, l)| !l.is_empty());
    for _ in 0..nv {
        let (ln, l) = body.next().ok_or_else(|| perr(0, "truncated vertex list"))?;
        let vals: Vec<f64> =
            l.split_whitespace().map(|t| num(Some(t), ln, "vertex value")).collect::<Result<_>>()?;
        if vals.len() != props.len() {
            return Err(perr(ln, format!("expected {} values, found {}", props.len(), vals.len())));
        }
        pos.push(Vec3::new(vals[cx], vals[cy], vals[cz]));
        if let (Some(c), Some(phi)) = (cphi, phi.as_mut()) {
            phi.push(vals[c]);
        }
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = body.next().ok_or_else(|| perr(0, "truncated face list"))?;
        let mut it = l.split_whitespace();
        let k: usize = num(it.next(), ln, "face size")?;
        if k != 3 {
            return Err(perr(ln, format!("only triangles are supported, found a {k}-gon")));
        }
        let t = [num(it.next(), ln, "index")?, num(it.next(), ln, "index")?, num(it.next(), ln, "index")?];
        if it.next().is_some() {
            return Err(perr(ln, "trailing data after face"));
        }
        tris.push(t);
    }
    if let Some((ln, _)) = body.next() {
        return Err(perr(ln, "data after the last face"));
    }
    let mesh = HalfedgeMesh::from_triangles(pos.len(), &tris)?;
    Ok(MeshData { mesh, pos, phi })
}

pub fn to_obj(mesh: &HalfedgeMesh, pos: &[Vec3], phi: Option<&[f64]>) -> String {
    let mut s = String::new();
    for p in pos {
        let _ = writeln!(s, "v {:?} {:?} {:?}", p.x, p.y, p.z);
    }
    if let Some(phi) = phi {
        for v in phi {
            let _ = writeln!(s, "#@phi {v:?}");
        }
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

pub fn parse_obj(text: &str) -> Result<MeshData> {
    let mut pos = Vec::new();
    let mut phi = Vec::new();
    let mut tris = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let ln = i + 1;
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                pos.push(Vec3::new(num(it.next(), ln, "x")?, num(it.next(), ln, "y")?, num(it.next(), ln, "z")?));
            }
            Some("#@phi") => phi.push(num(it.next(), ln, "phi")?),
            Some("f") => {
                let idx: Vec<&str> = it.collect();
                if idx.len() != 3 {
                    return Err(perr(ln, format!("only triangles are supported, found a {}-gon", idx.len())));
                }
                let mut t = [0usize; 3];
                for (slot, tok) in t.iter_mut().zip(idx) {
                    let first = tok.split('/').next().unwrap_or("");
                    let k: i64 = num(Some(first), ln, "face index")?;
                    let n = pos.len() as i64;
                    let v = if k > 0 { k - 1 } else if k < 0 { n + k } else { -1 };
                    if v < 0 || v >= n {
                        return Err(perr(ln, format!("face index {k} out of range")));
                    }
                    *slot = v as usize;
                }
                tris.push(t);
            }
            _ => {}
        }
    }
    let phi = match phi.len() {
        0 => None,
        n if n == pos.len() => Some(phi),
        n => return Err(perr(0, format!("{n} phi values for {} vertices", pos.len()))),
    };
    let mesh = HalfedgeMesh::from_triangles(pos.len(), &tris)?;
    Ok(MeshData { mesh, pos, phi })
}
