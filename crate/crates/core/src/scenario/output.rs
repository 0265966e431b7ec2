//! Running a configuration while writing its trajectory, scalar CSV,
//! mutation log and echoed configuration into a directory.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::{run_config, RunConfig};
use crate::error::Result;
use crate::io::config::serialize_config;
use crate::io::trajectory::{CsvWriter, FrameData, QueuedWriter, ScalarRow, TrajectoryHeader, TrajectoryWriter};
use crate::physics::System;
use crate::solver::{Observer, Progress, TerminationReport};

#[derive(Clone, Debug)]
pub struct OutputOptions {
    pub gzip: bool,
    /// Frames buffered between the solver and the writer thread.
    pub queue_capacity: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { gzip: false, queue_capacity: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct RunFiles {
    pub trajectory: PathBuf,
    pub scalars: PathBuf,
    pub mutations: PathBuf,
    pub config: PathBuf,
}

impl RunFiles {
    pub fn in_dir(dir: &Path, gzip: bool) -> Self {
        RunFiles {
            trajectory: dir.join(if gzip { "trajectory.traj.gz" } else { "trajectory.traj" }),
            scalars: dir.join("scalars.csv"),
            mutations: dir.join("mutations.log"),
            config: dir.join("config.cfg"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub report: TerminationReport,
    pub files: RunFiles,
    pub frames: usize,
}

/// Observer that records every `period`-th step.
pub struct Recorder {
    frames: QueuedWriter,
    csv: CsvWriter<BufWriter<fs::File>>,
    period: usize,
    barrier: f64,
    last: Option<usize>,
    written: usize,
}

impl Recorder {
    fn record(&mut self, sys: &System, step: usize, t: f64) -> Result<()> {
        let row = ScalarRow::from_system(sys, step, t, self.barrier)?;
        self.csv.write(&row)?;
        self.frames.push(FrameData::capture(sys, t, Some(row)))?;
        self.last = Some(step);
        self.written += 1;
        Ok(())
    }
}

impl Observer for Recorder {
    fn observe(&mut self, p: &Progress, sys: &System) -> Result<()> {
        if p.step % self.period == 0 {
            self.record(sys, p.step, p.time)?;
        }
        Ok(())
    }
}

/// Runs `cfg` and writes its outputs into `dir`, which is created if needed.
pub fn run_to_directory(cfg: &RunConfig, dir: &Path, opts: &OutputOptions) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    let files = RunFiles::in_dir(dir, opts.gzip);
    let config_text = serialize_config(cfg);
    fs::write(&files.config, &config_text)?;
    let mut sys = cfg.build_system()?;
    let header = TrajectoryHeader::new(config_text, Some("mutations.log".into()));
    let writer = TrajectoryWriter::create(&files.trajectory, &header)?;
    let mut rec = Recorder {
        frames: QueuedWriter::spawn(writer, opts.queue_capacity.max(1)),
        csv: CsvWriter::create(&files.scalars)?,
        period: cfg.solver.output_period,
        barrier: cfg.solver.barrier,
        last: None,
        written: 0,
    };
    let outcome = run_config(cfg, &mut sys, &mut rec)?;
    if rec.last != Some(outcome.report.steps) {
        rec.record(&sys, outcome.report.steps, outcome.report.time)?;
    }
    rec.csv.finish()?;
    let frames = rec.frames.finish()?;
    fs::write(&files.mutations, outcome.log.to_text())?;
    Ok(RunSummary { report: outcome.report, files, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::trajectory::{read_csv, read_trajectory};
    use crate::scenario::MeshSpec;
    use crate::solver::SolverConfig;

    #[test]
    fn writes_consistent_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            mesh: MeshSpec::Icosphere { subdivisions: 1, radius: 1.0 },
            perturb: 0.02,
            seed: 3,
            solver: SolverConfig { max_steps: 7, output_period: 3, dt: 1e-3, ..Default::default() },
            ..Default::default()
        };
        let s = run_to_directory(&cfg, dir.path(), &OutputOptions::default()).unwrap();
        let traj = read_trajectory(&s.files.trajectory).unwrap();
        let rows = read_csv(&fs::read_to_string(&s.files.scalars).unwrap()).unwrap();
        // steps 0, 3, 6 and the final step 7
        assert_eq!(s.frames, 4);
        assert_eq!(traj.frames.len(), 4);
        assert_eq!(rows.iter().map(|r| r.step).collect::<Vec<_>>(), vec![0, 3, 6, 7]);
        assert_eq!(traj.header.config, fs::read_to_string(&s.files.config).unwrap());
        assert!(rows.windows(2).all(|w| w[1].total <= w[0].total));
    }
}
