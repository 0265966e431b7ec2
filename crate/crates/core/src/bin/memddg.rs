use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use memddg::io::config::read_config;
use memddg::io::mesh_file::{read_mesh, write_mesh};
use memddg::mesh::geometry::{enclosed_volume, total_area, DEFAULT_PLANARITY_TOL};
use memddg::mesh::Geometry;
use memddg::physics::System;
use memddg::remesh::aspect_ratio;
use memddg::scenario::{make_preset, run_to_directory, OutputOptions, RunConfig};
use memddg::solver::{l2_residual, Mode, Reason};
use memddg::validation::convergence::{pointwise_csv, spheroid_convergence_study};
use memddg::validation::taylor::{activate_all_terms, default_eps, taylor_exactness_study};
use memddg::validation::scenario::scenario_assertions;
use memddg::io::trajectory::read_trajectory;
use memddg::{Error, Vec3};

#[derive(Parser)]
#[command(name = "memddg", version, about = "Membrane mechanics and protein dynamics on triangle meshes")]
struct Cli {
    /// Worker threads; falls back to MEMDDG_THREADS, then all cores.
    #[arg(long, global = true, env = "MEMDDG_THREADS")]
    threads: Option<usize>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Exit with status 3 when a validation or scenario check fails.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Source {
    /// Configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the random seed used for mesh perturbation.
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn load(&self) -> memddg::Result<RunConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(p), _) => read_config(p)?,
            (None, Some(name)) => make_preset(name)?,
            (None, None) => return Err(Error::MissingRequired("--config or --preset".into())),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the initial mesh of a configuration (PLY or OBJ by extension).
    Generate {
        #[command(flatten)]
        src: Source,
        /// Mesh path; `.ply` or `.obj`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the energy breakdown of the initial state.
    Energy {
        #[command(flatten)]
        src: Source,
        /// Per-vertex CSV of position, density and curvature.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print per-term force summaries of the initial state.
    Forces {
        #[command(flatten)]
        src: Source,
        /// Per-vertex CSV of every force component.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured solver, writing trajectory and scalar CSV.
    Run {
        #[command(flatten)]
        src: Source,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Gzip the trajectory.
        #[arg(long)]
        gzip: bool,
        /// Frames buffered ahead of the writer.
        #[arg(long, default_value_t = 4)]
        queue: usize,
    },
    /// Like `run`, with the solver forced to energy minimization.
    Minimize {
        #[command(flatten)]
        src: Source,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        gzip: bool,
        #[arg(long, default_value_t = 4)]
        queue: usize,
    },
    /// Taylor-remainder exactness sweep of every force and potential.
    Gradcheck {
        #[command(flatten)]
        src: Source,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep the configured density and coefficients instead of a
        /// heterogeneous density with every term switched on.
        #[arg(long)]
        as_configured: bool,
    },
    /// Spheroid refinement study over icosphere subdivisions 1..=levels.
    Benchmark {
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Output directory for the CSV reports; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate and summarize a mesh file.
    Info { mesh: PathBuf },
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").replace('"', "'")
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("error kind={kind} message=\"{}\"", one_line(message));
    ExitCode::from(1)
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error kind=Usage message=\"{}\"", one_line(first));
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "error" } else { "warn" }))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail("InvalidParams", &e.to_string());
        }
    }
    match dispatch(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) if cli.strict => ExitCode::from(3),
        Ok(Outcome::ChecksFailed) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}

fn say(cli: &Cli, text: &str) {
    if !cli.quiet {
        emit(&format!("{text}\n"));
    }
}

/// Writes to stdout; a closed reader (e.g. `| head`) ends the process quietly.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        fail("Io", &e.to_string());
        std::process::exit(1);
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> memddg::Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> memddg::Result<Outcome> {
    match &cli.cmd {
        Cmd::Generate { src, out } => {
            let sys = src.load()?.build_system()?;
            write_mesh(out, &sys.mesh, &sys.pos, Some(&sys.phi))?;
            say(cli, &format!("wrote {} ({} vertices, {} faces)", out.display(), sys.mesh.n_vertices(), sys.mesh.n_faces()));
            Ok(Outcome::Ok)
        }
        Cmd::Energy { src, out } => {
            let sys = src.load()?.build_system()?;
            let e = sys.energy()?;
            say(
                cli,
                &format!(
                    "bending={:e}\nsurface={:e}\npressure={:e}\ndirichlet={:e}\nadsorption={:e}\nregularization={:e}\nexternal={:e}\ntotal={:e}",
                    e.bending, e.surface, e.pressure, e.dirichlet, e.adsorption, e.regularization, e.external, e.total
                ),
            );
            if let Some(p) = out {
                std::fs::write(p, vertex_dump(&sys))?;
            }
            Ok(Outcome::Ok)
        }
        Cmd::Forces { src, out } => {
            let sys = src.load()?.build_system()?;
            let f = sys.forces()?;
            let terms: [(&str, &[Vec3]); 8] = [
                ("bending", &f.bending),
                ("surface", &f.surface),
                ("pressure", &f.pressure),
                ("line_tension", &f.line_tension),
                ("adsorption", &f.adsorption),
                ("regularization", &f.regularization),
                ("external", &f.external),
                ("net", &f.net),
            ];
            let mut s = String::from("term,l2,max_norm,sum_x,sum_y,sum_z\n");
            for (name, v) in terms {
                let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
                let sum: Vec3 = v.iter().sum();
                let _ = writeln!(s, "{name},{:e},{:e},{:e},{:e},{:e}", l2_residual(v), max, sum.x, sum.y, sum.z);
            }
            say(cli, s.trim_end());
            if let Some(p) = out {
                let mut d = String::from("vertex");
                for (name, _) in terms {
                    let _ = write!(d, ",{name}_x,{name}_y,{name}_z");
                }
                d.push('\n');
                for i in 0..sys.mesh.n_vertices() {
                    let _ = write!(d, "{i}");
                    for (_, v) in terms {
                        let _ = write!(d, ",{:?},{:?},{:?}", v[i].x, v[i].y, v[i].z);
                    }
                    d.push('\n');
                }
                std::fs::write(p, d)?;
            }
            Ok(Outcome::Ok)
        }
        Cmd::Run { src, out, gzip, queue } => run_cmd(cli, src.load()?, out, *gzip, *queue),
        Cmd::Minimize { src, out, gzip, queue } => {
            let mut cfg = src.load()?;
            cfg.solver.mode = Mode::Minimize;
            run_cmd(cli, cfg, out, *gzip, *queue)
        }
        Cmd::Gradcheck { src, out, as_configured } => {
            let cfg = src.load()?;
            let mut sys = cfg.build_system()?;
            if !as_configured {
                sys = activate_all_terms(&sys, cfg.seed)?;
            }
            let rows = taylor_exactness_study(&sys, &default_eps(), cfg.seed)?;
            let mut s = String::from("term,eps,remainder,relative,order,status\n");
            let mut ok = true;
            for r in &rows {
                let status = if r.exact {
                    "exact"
                } else if r.order.is_none() {
                    "disabled"
                } else {
                    "fitted"
                };
                let order = r.order.map_or("none".to_string(), |o| format!("{o:.4}"));
                for i in 0..r.eps.len() {
                    let _ = writeln!(s, "{},{:e},{:e},{:e},{order},{status}", r.term, r.eps[i], r.remainder[i], r.relative[i]);
                }
                ok &= r.passes(1.9, 1e-12);
            }
            write_or_print(out.as_deref(), &s)?;
            Ok(if ok { Outcome::Ok } else { Outcome::ChecksFailed })
        }
        Cmd::Benchmark { levels, out } => {
            if *levels < 3 {
                return Err(Error::InvalidParams("--levels must be at least 3".into()));
            }
            let subdivisions: Vec<usize> = (1..=*levels).collect();
            let report = spheroid_convergence_study(&subdivisions)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("convergence.csv"), report.to_csv())?;
                    std::fs::write(dir.join("slopes.csv"), report.slopes_csv())?;
                    std::fs::write(dir.join("pointwise.csv"), pointwise_csv(&report.reference, *levels)?)?;
                    say(cli, &report.slopes_csv());
                }
                None => emit(&report.to_csv()),
            }
            let s = &report.slopes;
            let ok = [s.area, s.volume, s.total_mean, s.total_mean_sq, s.l1_mean, s.l1_gauss].iter().all(|&x| x >= 1.7)
                && s.l1_mean_vec >= 1.3
                && s.l1_gauss_vec >= 1.3;
            Ok(if ok { Outcome::Ok } else { Outcome::ChecksFailed })
        }
        Cmd::Info { mesh } => {
            let data = read_mesh(mesh)?;
            say(cli, &info(&data.mesh, &data.pos)?);
            Ok(Outcome::Ok)
        }
    }
}

fn run_cmd(cli: &Cli, cfg: RunConfig, out: &Path, gzip: bool, queue: usize) -> memddg::Result<Outcome> {
    let opts = OutputOptions { gzip, queue_capacity: queue };
    let summary = run_to_directory(&cfg, out, &opts)?;
    let r = &summary.report;
    let reason = match &r.reason {
        Reason::Converged => "converged".to_string(),
        Reason::MaxSteps => "max_steps".to_string(),
        Reason::Error(m) => return Err(Error::Solve(m.clone())),
    };
    say(
        cli,
        &format!(
            "reason={reason} steps={} time={:e} residual={:e} chem_residual={:e} frames={} wall={:.3}s",
            r.steps,
            r.time,
            r.residual,
            r.chem_residual,
            summary.frames,
            r.wall_time.as_secs_f64()
        ),
    );
    let traj = read_trajectory(&summary.files.trajectory)?;
    let checks = scenario_assertions(cfg.preset.as_deref().unwrap_or(""), &traj, None);
    let mut text = String::new();
    for c in &checks {
        text.push_str(&c.line());
        text.push('\n');
    }
    std::fs::write(out.join("checks.txt"), &text)?;
    if !text.is_empty() {
        say(cli, text.trim_end());
    }
    Ok(if checks.iter().all(|c| c.passed) { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn vertex_dump(sys: &System) -> String {
    use memddg::ddg::curvature::{vertex_gaussian_curvature, vertex_mean_curvature};
    let geom = sys.geometry();
    let h = vertex_mean_curvature(&sys.mesh, &geom);
    let k = vertex_gaussian_curvature(&sys.mesh, &geom);
    let mut s = String::from("vertex,x,y,z,phi,dual_area,H,K_integrated\n");
    for i in 0..sys.mesh.n_vertices() {
        let p = sys.pos[i];
        let _ = writeln!(s, "{i},{:?},{:?},{:?},{:?},{:?},{:?},{:?}", p.x, p.y, p.z, sys.phi[i], geom.vertex_area[i], h.pointwise[i], k[i]);
    }
    s
}

fn info(mesh: &memddg::HalfedgeMesh, pos: &[Vec3]) -> memddg::Result<String> {
    let geom = Geometry::new(mesh, pos);
    let mut s = String::new();
    let _ = writeln!(s, "vertices={} edges={} faces={}", mesh.n_vertices(), mesh.n_edges(), mesh.n_faces());
    let _ = writeln!(s, "euler_characteristic={}", mesh.euler_characteristic());
    let _ = writeln!(s, "boundary_loops={}", mesh.boundary_loops().len());
    let _ = writeln!(s, "area={:e}", total_area(mesh, pos));
    match enclosed_volume(mesh, pos, DEFAULT_PLANARITY_TOL) {
        Ok(v) => {
            let _ = writeln!(s, "volume={v:e}");
        }
        Err(e) => {
            let _ = writeln!(s, "volume=undefined ({})", e.kind());
        }
    }
    let l = &geom.edge_length;
    let mean = l.iter().sum::<f64>() / l.len() as f64;
    let _ = writeln!(
        s,
        "edge_length min={:e} mean={:e} max={:e}",
        l.iter().copied().fold(f64::INFINITY, f64::min),
        mean,
        l.iter().copied().fold(0.0, f64::max)
    );
    let edges = [1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];
    let mut counts = [0usize; 5];
    for f in 0..mesh.n_faces() {
        let [a, b, c] = mesh.face_vertices(f);
        let q = aspect_ratio(&pos[a], &pos[b], &pos[c]);
        let bin = edges.windows(2).position(|w| q < w[1]).unwrap_or(4);
        counts[bin] += 1;
    }
    let _ = write!(s, "aspect_ratio_histogram");
    for (i, c) in counts.iter().enumerate() {
        let hi = if edges[i + 1].is_finite() { format!("{}", edges[i + 1]) } else { "inf".into() };
        let _ = write!(s, " [{},{hi})={c}", edges[i]);
    }
    Ok(s)
}
