//! Chunked text trajectories with an optional gzip layer, plus the scalar
//! CSV summary written alongside them.
//!
//! Layout:
//!
//! ```text
//! memddg-trajectory 1
//! units length=um force=nN energy=nN*um time=s
//! mutation-log run.mutations
//! config 3
//! | [run]
//! | ...
//! frame 0 t=0.0 vertices=642 faces=1280
//! f 0 1 2
//! ...
//! v 0.1 0.2 0.3 0.5
//! ...
//! s <csv row>
//! frame 1 t=0.01 vertices=642 faces=ref:0
//! ...
//! ```
//!
//! A frame whose connectivity equals the previous frame's writes
//! `faces=ref:k` pointing at the frame that last emitted its face list, so a
//! reader needs nothing beyond the file to reconstruct any frame.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::mpsc::{sync_channel, SyncSender};
use std::thread::JoinHandle;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::mesh::{HalfedgeMesh, Vec3};
use crate::physics::System;
use crate::solver::{l2_residual, norms::l2_scalar};

pub const TRAJECTORY_VERSION: u32 = 1;
pub const UNITS: &str = "length=um force=nN energy=nN*um time=s";
const MAGIC: &str = "memddg-trajectory";

/// One row of the scalar summary.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarRow {
    pub step: usize,
    pub t: f64,
    pub bending: f64,
    pub surface: f64,
    pub pressure: f64,
    pub dirichlet: f64,
    pub adsorption: f64,
    pub regularization: f64,
    pub external: f64,
    pub total: f64,
    pub residual: f64,
    pub chem_residual: f64,
    pub area: f64,
    pub volume: f64,
    pub phi_min: f64,
    pub phi_max: f64,
}

pub const CSV_HEADER: &str = "step,t,bending,surface,pressure,dirichlet,adsorption,regularization,external,total,\
residual,chem_residual,area,volume,phi_min,phi_max";

impl ScalarRow {
    /// Evaluates the summary at the current state. Volume is NaN when it is
    /// undefined, e.g. for a patch with a non-planar boundary.
    pub fn from_system(sys: &System, step: usize, t: f64, barrier: f64) -> Result<Self> {
        let e = sys.energy()?;
        let geom = sys.geometry();
        let residual = l2_residual(&sys.forces()?.net);
        let chem_residual = if sys.params.mobility > 0.0 { l2_scalar(&sys.potentials(barrier)?.net) } else { 0.0 };
        let (area, volume) = match sys.totals(&geom) {
            Ok(t) => (t.area, t.volume),
            Err(_) => (geom.total_area() + sys.reservoir.area(), f64::NAN),
        };
        let phi_min = sys.phi.iter().copied().fold(f64::INFINITY, f64::min);
        let phi_max = sys.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ScalarRow {
            step,
            t,
            bending: e.bending,
            surface: e.surface,
            pressure: e.pressure,
            dirichlet: e.dirichlet,
            adsorption: e.adsorption,
            regularization: e.regularization,
            external: e.external,
            total: e.total,
            residual,
            chem_residual,
            area,
            volume,
            phi_min,
            phi_max,
        })
    }

    fn floats(&self) -> [f64; 15] {
        [
            self.t,
            self.bending,
            self.surface,
            self.pressure,
            self.dirichlet,
            self.adsorption,
            self.regularization,
            self.external,
            self.total,
            self.residual,
            self.chem_residual,
            self.area,
            self.volume,
            self.phi_min,
            self.phi_max,
        ]
    }

    /// Shortest round-tripping representation; locale independent.
    pub fn to_csv(&self) -> String {
        let mut s = self.step.to_string();
        for x in self.floats() {
            s.push(',');
            s.push_str(&format!("{x:?}"));
        }
        s
    }

    pub fn parse_csv(line: &str) -> Option<Self> {
        let mut it = line.trim().split(',');
        let step = it.next()?.parse().ok()?;
        let mut v = [0.0; 15];
        for x in v.iter_mut() {
            *x = it.next()?.parse().ok()?;
        }
        if it.next().is_some() {
            return None;
        }
        Some(ScalarRow {
            step,
            t: v[0],
            bending: v[1],
            surface: v[2],
            pressure: v[3],
            dirichlet: v[4],
            adsorption: v[5],
            regularization: v[6],
            external: v[7],
            total: v[8],
            residual: v[9],
            chem_residual: v[10],
            area: v[11],
            volume: v[12],
            phi_min: v[13],
            phi_max: v[14],
        })
    }

    /// NaN-aware equality, for round-trip checks.
    pub fn same_as(&self, other: &ScalarRow) -> bool {
        self.step == other.step
            && self.floats().iter().zip(other.floats()).all(|(a, b)| a.to_bits() == b.to_bits() || a == &b)
    }
}

/// Writes the scalar CSV with a header line.
pub struct CsvWriter<W: Write> {
    out: W,
}

impl CsvWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        CsvWriter::new(BufWriter::new(File::create(path)?))
    }
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        Ok(CsvWriter { out })
    }

    pub fn write(&mut self, row: &ScalarRow) -> Result<()> {
        writeln!(self.out, "{}", row.to_csv())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn read_csv(text: &str) -> Result<Vec<ScalarRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Parse { line: 1, message: "missing CSV header".into() }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| ScalarRow::parse_csv(l).ok_or_else(|| Error::Parse { line: i + 1, message: "bad CSV row".into() }))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryHeader {
    pub version: u32,
    pub units: String,
    /// Serialized run configuration.
    pub config: String,
    /// Path of the mutation log written next to the trajectory, if any.
    pub mutation_log: Option<String>,
}

impl TrajectoryHeader {
    pub fn new(config: String, mutation_log: Option<String>) -> Self {
        TrajectoryHeader { version: TRAJECTORY_VERSION, units: UNITS.into(), config, mutation_log }
    }
}

/// A fully resolved frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub faces: Vec<[usize; 3]>,
    pub pos: Vec<Vec3>,
    pub phi: Vec<f64>,
    /// Index of the frame whose face list this frame reuses, if it was
    /// written as a back-reference.
    pub topology_ref: Option<usize>,
    pub scalars: Option<ScalarRow>,
}

impl Frame {
    pub fn mesh(&self) -> Result<HalfedgeMesh> {
        HalfedgeMesh::from_triangles(self.pos.len(), &self.faces)
    }
}

/// A frame as handed to the writer; owns its data so it can cross threads.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub t: f64,
    pub faces: Vec<[usize; 3]>,
    pub pos: Vec<Vec3>,
    pub phi: Vec<f64>,
    pub scalars: Option<ScalarRow>,
}

impl FrameData {
    pub fn capture(sys: &System, t: f64, scalars: Option<ScalarRow>) -> Self {
        FrameData { t, faces: sys.mesh.triangles(), pos: sys.pos.clone(), phi: sys.phi.clone(), scalars }
    }
}

pub struct TrajectoryWriter {
    out: Box<dyn Write + Send>,
    frames: usize,
    last_topology: Option<(usize, Vec<[usize; 3]>)>,
    last_t: f64,
}

impl TrajectoryWriter {
    /// Opens `path`, gzip-compressed when it ends in `.gz`.
    pub fn create(path: &Path, header: &TrajectoryHeader) -> Result<Self> {
        let file = BufWriter::new(File::create(path)?);
        let out: Box<dyn Write + Send> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(GzEncoder::new(file, Compression::default()))
        } else {
            Box::new(file)
        };
        Self::new(out, header)
    }

    pub fn new(mut out: Box<dyn Write + Send>, header: &TrajectoryHeader) -> Result<Self> {
        writeln!(out, "{MAGIC} {}", header.version)?;
        writeln!(out, "units {}", header.units)?;
        writeln!(out, "mutation-log {}", header.mutation_log.as_deref().unwrap_or("none"))?;
        let lines: Vec<&str> = header.config.lines().collect();
        writeln!(out, "config {}", lines.len())?;
        for l in lines {
            writeln!(out, "| {l}")?;
        }
        Ok(TrajectoryWriter { out, frames: 0, last_topology: None, last_t: f64::NEG_INFINITY })
    }

    pub fn frames_written(&self) -> usize {
        self.frames
    }

    pub fn write_frame(&mut self, f: &FrameData) -> Result<()> {
        if f.pos.len() != f.phi.len() {
            return Err(Error::LengthMismatch(f.pos.len(), f.phi.len()));
        }
        if f.t < self.last_t {
            return Err(Error::InvalidParams(format!("frame time {} precedes {}", f.t, self.last_t)));
        }
        let k = self.frames;
        let reuse = self.last_topology.as_ref().filter(|(_, faces)| *faces == f.faces).map(|(i, _)| *i);
        let faces = match reuse {
            Some(i) => format!("ref:{i}"),
            None => f.faces.len().to_string(),
        };
        writeln!(self.out, "frame {k} t={:?} vertices={} faces={faces}", f.t, f.pos.len())?;
        if reuse.is_none() {
            for [a, b, c] in &f.faces {
                writeln!(self.out, "f {a} {b} {c}")?;
            }
            self.last_topology = Some((k, f.faces.clone()));
        }
        for (p, phi) in f.pos.iter().zip(&f.phi) {
            writeln!(self.out, "v {:?} {:?} {:?} {:?}", p.x, p.y, p.z, phi)?;
        }
        if let Some(s) = &f.scalars {
            writeln!(self.out, "s {}", s.to_csv())?;
        }
        self.frames += 1;
        self.last_t = f.t;
        Ok(())
    }

    /// Flushes and closes, finishing the gzip stream if there is one.
    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        drop(self.out);
        Ok(())
    }
}

/// Writer running on its own thread behind a bounded queue, so the solver
/// only blocks when `capacity` frames are pending.
pub struct QueuedWriter {
    tx: Option<SyncSender<FrameData>>,
    handle: Option<JoinHandle<Result<usize>>>,
}

impl QueuedWriter {
    pub fn spawn(mut writer: TrajectoryWriter, capacity: usize) -> Self {
        let (tx, rx) = sync_channel::<FrameData>(capacity);
        let handle = std::thread::spawn(move || {
            for f in rx {
                writer.write_frame(&f)?;
            }
            let n = writer.frames_written();
            writer.finish()?;
            Ok(n)
        });
        QueuedWriter { tx: Some(tx), handle: Some(handle) }
    }

    pub fn push(&mut self, frame: FrameData) -> Result<()> {
        let tx = self.tx.as_ref().expect("writer already finished");
        if tx.send(frame).is_err() {
            // The writer thread has exited; its error surfaces in finish().
            return self.finish_inner().and_then(|_| Err(Error::Io("trajectory writer stopped".into())));
        }
        Ok(())
    }

    fn finish_inner(&mut self) -> Result<usize> {
        self.tx.take();
        match self.handle.take() {
            Some(h) => h.join().map_err(|_| Error::Io("trajectory writer panicked".into()))?,
            None => Ok(0),
        }
    }

    /// Drains the queue and returns the number of frames written.
    pub fn finish(mut self) -> Result<usize> {
        self.finish_inner()
    }
}

impl Drop for QueuedWriter {
    fn drop(&mut self) {
        let _ = self.finish_inner();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub header: TrajectoryHeader,
    pub frames: Vec<Frame>,
}

/// Reads a trajectory, transparently decompressing gzip input.
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    drop(file);
    let file = File::open(path)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        parse_trajectory(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        parse_trajectory(BufReader::new(file))
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<'a>(tok: Option<&'a str>, key: &str, line: usize) -> Result<&'a str> {
    tok.and_then(|t| t.strip_prefix(key)).and_then(|t| t.strip_prefix('=')).ok_or_else(|| perr(line, format!("expected {key}=")))
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| perr(line, format!("bad number '{s}'")))
}

struct Cursor<R: BufRead> {
    lines: std::iter::Enumerate<std::io::Lines<R>>,
    pending: Option<(usize, String)>,
}

impl<R: BufRead> Cursor<R> {
    fn next_opt(&mut self) -> Result<Option<(usize, String)>> {
        if let Some(x) = self.pending.take() {
            return Ok(Some(x));
        }
        match self.lines.next() {
            Some((i, l)) => Ok(Some((i + 1, l?))),
            None => Ok(None),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, String)> {
        self.next_opt()?.ok_or_else(|| perr(0, format!("unexpected end of file, expected {what}")))
    }
}

pub fn parse_trajectory<R: BufRead>(reader: R) -> Result<Trajectory> {
    let mut cur = Cursor { lines: reader.lines().enumerate(), pending: None };

    let (ln, l) = cur.next("header")?;
    let version = match l.split_once(' ') {
        Some((MAGIC, v)) => num::<u32>(v.trim(), ln)?,
        _ => return Err(perr(ln, "not a memddg trajectory")),
    };
    if version != TRAJECTORY_VERSION {
        return Err(perr(ln, format!("unsupported version {version}")));
    }
    let (ln, l) = cur.next("units")?;
    let units = l.strip_prefix("units ").ok_or_else(|| perr(ln, "expected units"))?.to_string();
    let (ln, l) = cur.next("mutation-log")?;
    let mutation_log = match l.strip_prefix("mutation-log ").ok_or_else(|| perr(ln, "expected mutation-log"))? {
        "none" => None,
        p => Some(p.to_string()),
    };
    let (ln, l) = cur.next("config")?;
    let n_config: usize = num(l.strip_prefix("config ").ok_or_else(|| perr(ln, "expected config"))?, ln)?;
    let mut config = String::new();
    for _ in 0..n_config {
        let (ln, l) = cur.next("config line")?;
        let body = l.strip_prefix("| ").or_else(|| (l == "|").then_some("")).ok_or_else(|| perr(ln, "bad config line"))?;
        config.push_str(body);
        config.push('\n');
    }
    let header = TrajectoryHeader { version, units, config, mutation_log };

    let mut frames: Vec<Frame> = Vec::new();
    while let Some((ln, l)) = cur.next_opt()? {
        if l.trim().is_empty() {
            continue;
        }
        let mut tok = l.split_whitespace();
        if tok.next() != Some("frame") {
            return Err(perr(ln, "expected frame"));
        }
        let k: usize = num(tok.next().ok_or_else(|| perr(ln, "missing frame index"))?, ln)?;
        if k != frames.len() {
            return Err(perr(ln, format!("frame index {k} out of order")));
        }
        let t: f64 = num(field(tok.next(), "t", ln)?, ln)?;
        let nv: usize = num(field(tok.next(), "vertices", ln)?, ln)?;
        let faces_tok = field(tok.next(), "faces", ln)?;
        if frames.last().is_some_and(|prev| t < prev.t) {
            return Err(perr(ln, "frames out of time order"));
        }
        let (faces, topology_ref) = match faces_tok.strip_prefix("ref:") {
            Some(r) => {
                let i: usize = num(r, ln)?;
                let src = frames
                    .get(i)
                    .filter(|f| f.topology_ref.is_none())
                    .ok_or_else(|| perr(ln, "dangling topology reference"))?;
                (src.faces.clone(), Some(i))
            }
            None => {
                let nf: usize = num(faces_tok, ln)?;
                let mut faces = Vec::with_capacity(nf);
                for _ in 0..nf {
                    let (ln, l) = cur.next("face")?;
                    let v: Vec<&str> = l.split_whitespace().collect();
                    if v.len() != 4 || v[0] != "f" {
                        return Err(perr(ln, "expected face line"));
                    }
                    faces.push([num(v[1], ln)?, num(v[2], ln)?, num(v[3], ln)?]);
                }
                (faces, None)
            }
        };
        let mut pos = Vec::with_capacity(nv);
        let mut phi = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = cur.next("vertex")?;
            let v: Vec<&str> = l.split_whitespace().collect();
            if v.len() != 5 || v[0] != "v" {
                return Err(perr(ln, "expected vertex line"));
            }
            pos.push(Vec3::new(num(v[1], ln)?, num(v[2], ln)?, num(v[3], ln)?));
            phi.push(num(v[4], ln)?);
        }
        let mut scalars = None;
        if let Some((ln, l)) = cur.next_opt()? {
            match l.strip_prefix("s ") {
                Some(row) => scalars = Some(ScalarRow::parse_csv(row).ok_or_else(|| perr(ln, "bad scalar row"))?),
                None => cur.pending = Some((ln, l)),
            }
        }
        frames.push(Frame { t, faces, pos, phi, topology_ref, scalars });
    }
    Ok(Trajectory { header, frames })
}
