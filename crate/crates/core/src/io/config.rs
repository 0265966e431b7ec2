//! Line-oriented configuration files: `[section]` headers and
//! `key = value` pairs. Values are numbers, booleans, quoted strings,
//! `none`, or bracketed number lists. A `preset` key loads a named preset
//! that the remaining keys override one by one.
//!
//! Floats are written in shortest round-trip form, so serializing and
//! re-parsing reproduces a configuration bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::Vec3;
use crate::physics::{BoundaryKind, PressureLaw};
use crate::remesh::RemeshConfig;
use crate::scenario::{make_preset, MeshSpec, ProteinInit, RunConfig};
use crate::solver::Mode;

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Num(f64, bool),
    Bool(bool),
    Str(String),
    None,
    List(Vec<f64>),
}

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    section: String,
    key: String,
    value: Value,
}

fn type_err(line: usize, message: impl Into<String>) -> Error {
    Error::Type { line, message: message.into() }
}

fn parse_value(raw: &str, line: usize) -> Result<Value> {
    let raw = raw.trim();
    if let Some(s) = raw.strip_prefix('"') {
        let s = s.strip_suffix('"').ok_or_else(|| Error::Parse { line, message: "unterminated string".into() })?;
        return Ok(Value::Str(s.to_string()));
    }
    if let Some(s) = raw.strip_prefix('[') {
        let s = s.strip_suffix(']').ok_or_else(|| Error::Parse { line, message: "unterminated list".into() })?;
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| type_err(line, format!("list item '{t}' is not a number"))))
            .collect::<Result<_>>()?;
        return Ok(Value::List(items));
    }
    match raw {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        "none" => return Ok(Value::None),
        "" => return Err(Error::Parse { line, message: "missing value".into() }),
        _ => {}
    }
    let is_int = raw.bytes().all(|b| b.is_ascii_digit() || b == b'-' || b == b'+');
    raw.parse::<f64>()
        .map(|x| Value::Num(x, is_int))
        .map_err(|_| Error::Parse { line, message: format!("cannot read value '{raw}' (strings need quotes)") })
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn tokenize(text: &str) -> Result<Vec<Entry>> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = strip_comment(raw).trim();
        if l.is_empty() {
            continue;
        }
        if let Some(s) = l.strip_prefix('[') {
            let name = s.strip_suffix(']').ok_or_else(|| Error::Parse { line, message: "malformed section header".into() })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse { line, message: "expected 'key = value'".into() })?;
        out.push(Entry { line, section: section.clone(), key: k.trim().to_string(), value: parse_value(v, line)? });
    }
    Ok(out)
}

struct Ctx<'a> {
    e: &'a Entry,
}

impl Ctx<'_> {
    fn f64(&self) -> Result<f64> {
        match self.e.value {
            Value::Num(x, _) if x.is_finite() => Ok(x),
            _ => Err(type_err(self.e.line, format!("'{}' expects a finite number", self.e.key))),
        }
    }
    fn positive(&self) -> Result<f64> {
        let x = self.f64()?;
        if x > 0.0 { Ok(x) } else { Err(type_err(self.e.line, format!("'{}' must be positive, got {x}", self.e.key))) }
    }
    fn nonneg(&self) -> Result<f64> {
        let x = self.f64()?;
        if x >= 0.0 { Ok(x) } else { Err(type_err(self.e.line, format!("'{}' must be nonnegative, got {x}", self.e.key))) }
    }
    fn unit(&self) -> Result<f64> {
        let x = self.f64()?;
        if (0.0..=1.0).contains(&x) { Ok(x) } else { Err(type_err(self.e.line, format!("'{}' must lie in [0, 1], got {x}", self.e.key))) }
    }
    fn opt(&self, inner: fn(&Self) -> Result<f64>) -> Result<Option<f64>> {
        match self.e.value {
            Value::None => Ok(None),
            _ => inner(self).map(Some),
        }
    }
    fn usize(&self) -> Result<usize> {
        match self.e.value {
            Value::Num(x, true) if x >= 0.0 && x <= u32::MAX as f64 => Ok(x as usize),
            _ => Err(type_err(self.e.line, format!("'{}' expects a nonnegative integer", self.e.key))),
        }
    }
    fn u64(&self) -> Result<u64> {
        match self.e.value {
            Value::Num(x, true) if x >= 0.0 && x < 9.007_199_254_740_992e15 => Ok(x as u64),
            _ => Err(type_err(self.e.line, format!("'{}' expects a nonnegative integer", self.e.key))),
        }
    }
    fn bool(&self) -> Result<bool> {
        match self.e.value {
            Value::Bool(b) => Ok(b),
            _ => Err(type_err(self.e.line, format!("'{}' expects true or false", self.e.key))),
        }
    }
    fn str(&self) -> Result<&str> {
        match &self.e.value {
            Value::Str(s) => Ok(s),
            _ => Err(type_err(self.e.line, format!("'{}' expects a quoted string", self.e.key))),
        }
    }
    fn vec3(&self) -> Result<Vec3> {
        match &self.e.value {
            Value::List(v) if v.len() == 3 && v.iter().all(|x| x.is_finite()) => Ok(Vec3::new(v[0], v[1], v[2])),
            _ => Err(type_err(self.e.line, format!("'{}' expects a list of three numbers", self.e.key))),
        }
    }
    fn unknown(&self) -> Error {
        Error::UnknownKey { line: self.e.line, key: format!("{}.{}", self.e.section, self.e.key) }
    }
    fn not_applicable(&self, what: &str) -> Error {
        type_err(self.e.line, format!("'{}' does not apply to {what}", self.e.key))
    }
}

fn mesh_default(kind: &str) -> Option<MeshSpec> {
    Some(match kind {
        "icosphere" => MeshSpec::Icosphere { subdivisions: 3, radius: 1.0 },
        "spheroid" => MeshSpec::Spheroid { subdivisions: 3, a: 1.0, c: 0.5, area: None },
        "tube" => MeshSpec::Tube { radius: 1.0, length: 19.9, n_around: 24 },
        "patch" => MeshSpec::HexPatch { radius: 1.0, rings: 12 },
        "spine" => MeshSpec::Spine { subdivisions: 3, radius: 1.0 },
        "file" => MeshSpec::File { path: String::new() },
        _ => return None,
    })
}

fn set_mesh(cfg: &mut RunConfig, c: &Ctx) -> Result<()> {
    let kind = cfg.mesh.kind();
    match (c.e.key.as_str(), &mut cfg.mesh) {
        ("perturb", _) => cfg.perturb = c.nonneg()?,
        ("subdivisions", MeshSpec::Icosphere { subdivisions, .. })
        | ("subdivisions", MeshSpec::Spheroid { subdivisions, .. })
        | ("subdivisions", MeshSpec::Spine { subdivisions, .. }) => *subdivisions = c.usize()?,
        ("radius", MeshSpec::Icosphere { radius, .. })
        | ("radius", MeshSpec::Tube { radius, .. })
        | ("radius", MeshSpec::HexPatch { radius, .. })
        | ("radius", MeshSpec::Spine { radius, .. }) => *radius = c.positive()?,
        ("a", MeshSpec::Spheroid { a, .. }) => *a = c.positive()?,
        ("c", MeshSpec::Spheroid { c: cc, .. }) => *cc = c.positive()?,
        ("area", MeshSpec::Spheroid { area, .. }) => *area = c.opt(Ctx::positive)?,
        ("length", MeshSpec::Tube { length, .. }) => *length = c.positive()?,
        ("n_around", MeshSpec::Tube { n_around, .. }) => *n_around = c.usize()?,
        ("rings", MeshSpec::HexPatch { rings, .. }) => *rings = c.usize()?,
        ("path", MeshSpec::File { path }) => *path = c.str()?.to_string(),
        ("subdivisions" | "radius" | "a" | "c" | "area" | "length" | "n_around" | "rings" | "path", _) => {
            return Err(c.not_applicable(&format!("mesh kind '{kind}'")))
        }
        _ => return Err(c.unknown()),
    }
    Ok(())
}

fn set(cfg: &mut RunConfig, remesh: &mut (bool, RemeshConfig), c: &Ctx) -> Result<()> {
    let p = &mut cfg.params;
    let s = &mut cfg.solver;
    match (c.e.section.as_str(), c.e.key.as_str()) {
        ("run", "seed") => cfg.seed = c.u64()?,
        ("run", "mode") => s.mode = Mode::parse(c.str()?).ok_or_else(|| type_err(c.e.line, "mode must be dynamics, minimize, coupled or protein"))?,
        ("mesh", _) => set_mesh(cfg, c)?,
        ("physics", "kappa_b") => p.kappa_b = c.positive()?,
        ("physics", "kappa_c") => p.kappa_c = c.f64()?,
        ("physics", "h0_c") => p.h0_c = c.f64()?,
        ("physics", "k_a") => p.k_a = c.nonneg()?,
        ("physics", "area_ref") => p.area_ref = c.opt(Ctx::positive)?,
        ("physics", "tension") => p.tension = c.opt(Ctx::f64)?,
        ("physics", "pressure_law") => {
            p.pressure_law = match c.str()? {
                "off" => PressureLaw::Off,
                "exact" => PressureLaw::Exact,
                "phenomenological" => PressureLaw::Phenomenological,
                _ => return Err(type_err(c.e.line, "pressure_law must be off, exact or phenomenological")),
            }
        }
        ("physics", "k_v") => p.k_v = c.nonneg()?,
        ("physics", "conc_ratio") => p.conc_ratio = c.nonneg()?,
        ("physics", "volume_ref") => p.volume_ref = c.opt(Ctx::positive)?,
        ("physics", "epsilon") => p.epsilon = c.f64()?,
        ("physics", "eta") => p.eta = c.nonneg()?,
        ("physics", "xi") => p.xi = c.positive()?,
        ("physics", "mobility") => p.mobility = c.nonneg()?,
        ("reservoir", "enabled") => cfg.reservoir.enabled = c.bool()?,
        ("reservoir", "area") => cfg.reservoir.area = c.nonneg()?,
        ("reservoir", "volume") => cfg.reservoir.volume = c.nonneg()?,
        ("boundary", "kind") => {
            cfg.boundary = match c.str()? {
                "none" => BoundaryKind::None,
                "roller" => BoundaryKind::Roller { axis: Vec3::z() },
                "pinned" => BoundaryKind::Pinned,
                "fixed" => BoundaryKind::Fixed,
                _ => return Err(type_err(c.e.line, "boundary kind must be none, roller, pinned or fixed")),
            }
        }
        ("boundary", "axis") => match &mut cfg.boundary {
            BoundaryKind::Roller { axis } => {
                let a = c.vec3()?;
                if a.norm() == 0.0 {
                    return Err(type_err(c.e.line, "roller axis must be nonzero"));
                }
                *axis = a;
            }
            _ => return Err(c.not_applicable("a non-roller boundary")),
        },
        ("boundary", "protein_dirichlet") => cfg.protein_dirichlet = c.opt(Ctx::unit)?,
        ("protein", "init") => {
            cfg.protein = match c.str()? {
                "uniform" => ProteinInit::Uniform(0.0),
                "disk" => ProteinInit::GeodesicDisk { center: Vec3::zeros(), radius: 0.5, sharpness: 20.0 },
                _ => return Err(type_err(c.e.line, "protein init must be uniform or disk")),
            }
        }
        ("protein", key) => match (key, &mut cfg.protein) {
            ("phi0", ProteinInit::Uniform(v)) => *v = c.unit()?,
            ("center", ProteinInit::GeodesicDisk { center, .. }) => *center = c.vec3()?,
            ("radius", ProteinInit::GeodesicDisk { radius, .. }) => *radius = c.positive()?,
            ("sharpness", ProteinInit::GeodesicDisk { sharpness, .. }) => *sharpness = c.positive()?,
            ("phi0" | "center" | "radius" | "sharpness", _) => return Err(c.not_applicable("this protein init")),
            _ => return Err(c.unknown()),
        },
        ("solver", "dt") => s.dt = c.positive()?,
        ("solver", "tolerance") => s.tolerance = c.positive()?,
        ("solver", "chem_tolerance") => s.chem_tolerance = c.positive()?,
        ("solver", "max_steps") => s.max_steps = c.usize()?,
        ("solver", "sufficient_decrease") => s.sufficient_decrease = c.positive()?,
        ("solver", "shrink") => s.shrink = c.positive()?,
        ("solver", "max_backtracks") => s.max_backtracks = c.usize()?,
        ("solver", "growth") => s.growth = c.positive()?,
        ("solver", "cg_restart") => s.cg_restart = c.usize()?,
        ("solver", "barrier") => s.barrier = c.nonneg()?,
        ("solver", "remesh_period") => s.remesh_period = c.usize()?,
        ("solver", "output_period") => s.output_period = c.usize()?,
        ("remesh", "enabled") => remesh.0 = c.bool()?,
        ("remesh", "flip") => remesh.1.flip = c.bool()?,
        ("remesh", "collapse") => remesh.1.collapse = c.bool()?,
        ("remesh", "split") => remesh.1.split = c.bool()?,
        ("remesh", "shift") => remesh.1.shift = c.bool()?,
        ("remesh", "aspect_threshold") => remesh.1.aspect_threshold = c.positive()?,
        ("remesh", "curvature_threshold") => remesh.1.curvature_threshold = c.positive()?,
        ("remesh", "max_edge_length") => remesh.1.max_edge_length = c.opt(Ctx::positive)?,
        ("remesh", "protect_boundary") => remesh.1.protect_boundary = c.bool()?,
        ("regularization", "k_edge") => cfg.regularization[0] = c.nonneg()?,
        ("regularization", "k_face") => cfg.regularization[1] = c.nonneg()?,
        ("regularization", "k_conformal") => cfg.regularization[2] = c.nonneg()?,
        _ => return Err(c.unknown()),
    }
    Ok(())
}

/// Parses configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let entries = tokenize(text)?;
    let is = |e: &Entry, s: &str, k: &str| e.section == s && e.key == k;
    let preset = entries.iter().filter(|e| is(e, "run", "preset")).last();
    let mut cfg = match preset {
        Some(e) => make_preset(Ctx { e }.str()?)?,
        None => RunConfig::default(),
    };
    let mesh_kind = entries.iter().filter(|e| is(e, "mesh", "kind")).last();
    match mesh_kind {
        Some(e) => {
            let ctx = Ctx { e };
            let name = ctx.str()?;
            let fresh = mesh_default(name).ok_or_else(|| type_err(e.line, format!("unknown mesh kind '{name}'")))?;
            if fresh.kind() != cfg.mesh.kind() {
                cfg.mesh = fresh;
            }
        }
        None if preset.is_none() => return Err(Error::MissingRequired("mesh.kind".into())),
        None => {}
    }
    let mut remesh = (cfg.remesh.is_some(), cfg.remesh.clone().unwrap_or_default());
    for e in entries.iter().filter(|e| !is(e, "run", "preset") && !is(e, "mesh", "kind")) {
        set(&mut cfg, &mut remesh, &Ctx { e })?;
    }
    cfg.remesh = remesh.0.then_some(remesh.1);
    if let MeshSpec::File { path } = &cfg.mesh {
        if path.is_empty() {
            return Err(Error::MissingRequired("mesh.path".into()));
        }
    }
    cfg.params.validate()?;
    cfg.solver.validate()?;
    if let Some(r) = &cfg.remesh {
        r.validate()?;
    }
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn opt(x: Option<f64>) -> String {
    x.map_or("none".into(), |v| format!("{v:?}"))
}

fn vec3(v: &Vec3) -> String {
    format!("[{:?}, {:?}, {:?}]", v.x, v.y, v.z)
}

/// Writes every key, so the text fully determines the configuration.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::from("# memddg configuration\n");
    let mut out = Vec::new();
    macro_rules! section {
        ($name:expr) => {
            out.push(format!("\n[{}]", $name))
        };
    }
    macro_rules! put {
        ($k:expr, $v:expr) => {
            out.push(format!("{} = {}", $k, $v))
        };
    }
    section!("run");
    if let Some(p) = &cfg.preset {
        put!("preset", format!("\"{p}\""));
    }
    put!("mode", format!("\"{}\"", cfg.solver.mode.name()));
    put!("seed", cfg.seed);
    section!("mesh");
    put!("kind", format!("\"{}\"", cfg.mesh.kind()));
    match &cfg.mesh {
        MeshSpec::Icosphere { subdivisions, radius } => {
            put!("subdivisions", subdivisions);
            put!("radius", format!("{radius:?}"));
        }
        MeshSpec::Spheroid { subdivisions, a, c, area } => {
            put!("subdivisions", subdivisions);
            put!("a", format!("{a:?}"));
            put!("c", format!("{c:?}"));
            put!("area", opt(*area));
        }
        MeshSpec::Tube { radius, length, n_around } => {
            put!("radius", format!("{radius:?}"));
            put!("length", format!("{length:?}"));
            put!("n_around", n_around);
        }
        MeshSpec::HexPatch { radius, rings } => {
            put!("radius", format!("{radius:?}"));
            put!("rings", rings);
        }
        MeshSpec::Spine { subdivisions, radius } => {
            put!("subdivisions", subdivisions);
            put!("radius", format!("{radius:?}"));
        }
        MeshSpec::File { path } => put!("path", format!("\"{path}\"")),
    }
    put!("perturb", format!("{:?}", cfg.perturb));
    let p = &cfg.params;
    section!("physics");
    put!("kappa_b", format!("{:?}", p.kappa_b));
    put!("kappa_c", format!("{:?}", p.kappa_c));
    put!("h0_c", format!("{:?}", p.h0_c));
    put!("k_a", format!("{:?}", p.k_a));
    put!("area_ref", opt(p.area_ref));
    put!("tension", opt(p.tension));
    let law = match p.pressure_law {
        PressureLaw::Off => "off",
        PressureLaw::Exact => "exact",
        PressureLaw::Phenomenological => "phenomenological",
    };
    put!("pressure_law", format!("\"{law}\""));
    put!("k_v", format!("{:?}", p.k_v));
    put!("conc_ratio", format!("{:?}", p.conc_ratio));
    put!("volume_ref", opt(p.volume_ref));
    put!("epsilon", format!("{:?}", p.epsilon));
    put!("eta", format!("{:?}", p.eta));
    put!("xi", format!("{:?}", p.xi));
    put!("mobility", format!("{:?}", p.mobility));
    section!("reservoir");
    put!("enabled", cfg.reservoir.enabled);
    put!("area", format!("{:?}", cfg.reservoir.area));
    put!("volume", format!("{:?}", cfg.reservoir.volume));
    section!("boundary");
    match cfg.boundary {
        BoundaryKind::None => put!("kind", "\"none\""),
        BoundaryKind::Roller { axis } => {
            put!("kind", "\"roller\"");
            put!("axis", vec3(&axis));
        }
        BoundaryKind::Pinned => put!("kind", "\"pinned\""),
        BoundaryKind::Fixed => put!("kind", "\"fixed\""),
    }
    put!("protein_dirichlet", opt(cfg.protein_dirichlet));
    section!("protein");
    match &cfg.protein {
        ProteinInit::Uniform(v) => {
            put!("init", "\"uniform\"");
            put!("phi0", format!("{v:?}"));
        }
        ProteinInit::GeodesicDisk { center, radius, sharpness } => {
            put!("init", "\"disk\"");
            put!("center", vec3(center));
            put!("radius", format!("{radius:?}"));
            put!("sharpness", format!("{sharpness:?}"));
        }
    }
    let so = &cfg.solver;
    section!("solver");
    put!("dt", format!("{:?}", so.dt));
    put!("tolerance", format!("{:?}", so.tolerance));
    put!("chem_tolerance", format!("{:?}", so.chem_tolerance));
    put!("max_steps", so.max_steps);
    put!("sufficient_decrease", format!("{:?}", so.sufficient_decrease));
    put!("shrink", format!("{:?}", so.shrink));
    put!("max_backtracks", so.max_backtracks);
    put!("growth", format!("{:?}", so.growth));
    put!("cg_restart", so.cg_restart);
    put!("barrier", format!("{:?}", so.barrier));
    put!("remesh_period", so.remesh_period);
    put!("output_period", so.output_period);
    section!("remesh");
    put!("enabled", cfg.remesh.is_some());
    if let Some(r) = &cfg.remesh {
        put!("flip", r.flip);
        put!("collapse", r.collapse);
        put!("split", r.split);
        put!("shift", r.shift);
        put!("aspect_threshold", format!("{:?}", r.aspect_threshold));
        put!("curvature_threshold", format!("{:?}", r.curvature_threshold));
        put!("max_edge_length", opt(r.max_edge_length));
        put!("protect_boundary", r.protect_boundary);
    }
    section!("regularization");
    put!("k_edge", format!("{:?}", cfg.regularization[0]));
    put!("k_face", format!("{:?}", cfg.regularization[1]));
    put!("k_conformal", format!("{:?}", cfg.regularization[2]));
    for line in out {
        let _ = writeln!(s, "{line}");
    }
    s
}
