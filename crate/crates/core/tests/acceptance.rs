//! Acceptance criteria. Each criterion prints one `PASS` or `FAIL` line; the
//! process exits nonzero if any fails. Derivative and geometry oracles here
//! are written from positions alone and share no code with the library
//! beyond mesh construction.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use memddg::ddg::curvature::vertex_gaussian_curvature;
use memddg::ddg::laplacian::cotan_laplacian;
use memddg::ddg::primitives::{dihedral_gradients, grad_face_area_at, grad_length};
use memddg::ddg::vectors::CurvatureVectors;
use memddg::io::config::{parse_config, serialize_config};
use memddg::io::generators::{cube, flat_hex_patch, icosphere, perturbed, spheroid, tetrahedron};
use memddg::io::mesh_file::{parse_obj, parse_ply, to_obj, to_ply};
use memddg::io::trajectory::{parse_trajectory, FrameData, TrajectoryHeader, TrajectoryWriter};
use memddg::mesh::geometry::total_area;
use memddg::mesh::halfedge::twin;
use memddg::mesh::Geometry;
use memddg::physics::energy::dirichlet_energy;
use memddg::physics::System;
use memddg::remesh::ops::{apply_op, collapse_is_geometric, flip_is_geometric, Fields, MutationLog, MutationOp};
use memddg::scenario::{make_preset, run_config, RunConfig, PRESET_NAMES};
use memddg::solver::{Mode, Progress, Reason};
use memddg::validation::convergence::spheroid_convergence_study;
use memddg::validation::taylor::{default_eps, randomized_test_system, taylor_exactness_study};
use memddg::{HalfedgeMesh, Vec3};

type Verdict = Result<(bool, String), String>;

fn criterion(id: usize, name: &str, budget: Duration, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok((ok, d)) => (ok, d),
        Err(e) => (false, e),
    };
    let in_time = elapsed <= budget;
    let passed = ok && in_time;
    let timing = format!("{:.2}s of {}s budget", elapsed.as_secs_f64(), budget.as_secs());
    println!(
        "{} [{id:>2}] {name}: {detail} ({timing}{})",
        if passed { "PASS" } else { "FAIL" },
        if in_time { "" } else { ", over budget" }
    );
    passed
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// independent geometry oracles

fn face_area(p: &[Vec3], a: usize, b: usize, c: usize) -> f64 {
    0.5 * (p[b] - p[a]).cross(&(p[c] - p[a])).norm()
}

/// Dihedral of edge `i -> j` between faces `(i, j, k)` and `(j, i, l)`,
/// positive on a convex fold with outward normals.
fn dihedral(p: &[Vec3], [i, j, k, l]: [usize; 4]) -> f64 {
    let n1 = (p[j] - p[i]).cross(&(p[k] - p[i])).normalize();
    let n2 = (p[i] - p[j]).cross(&(p[l] - p[j])).normalize();
    let e = (p[j] - p[i]).normalize();
    n1.cross(&n2).dot(&e).atan2(n1.dot(&n2))
}

fn diamond_of(m: &HalfedgeMesh, h: usize) -> [usize; 4] {
    [m.tail(h), m.head(h), m.tail(m.prev(h)), m.tail(m.prev(twin(h)))]
}

const FD_EPS: [f64; 4] = [4e-3, 2e-3, 1e-3, 5e-4];
/// Errors below this are pure roundoff; no order can be observed.
const FD_FLOOR: f64 = 1e-11;

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Observed order of central differences of `f` in `r_v` against `grad`,
/// or `None` when the error is at roundoff level throughout.
fn fd_order(f: &dyn Fn(&[Vec3]) -> f64, pos: &[Vec3], v: usize, grad: Vec3) -> Option<f64> {
    let errors: Vec<f64> = FD_EPS
        .iter()
        .map(|&e| {
            let mut fd = Vec3::zeros();
            for c in 0..3 {
                let (mut p, mut q) = (pos.to_vec(), pos.to_vec());
                p[v][c] += e;
                q[v][c] -= e;
                fd[c] = (f(&p) - f(&q)) / (2.0 * e);
            }
            (fd - grad).norm()
        })
        .collect();
    if errors.iter().all(|&x| x < FD_FLOOR) {
        None
    } else {
        Some(slope(&FD_EPS, &errors))
    }
}

#[derive(Default)]
struct OrderTally {
    min: f64,
    samples: usize,
    roundoff: usize,
    failures: usize,
}

impl OrderTally {
    fn new() -> Self {
        OrderTally { min: f64::INFINITY, ..Default::default() }
    }

    fn add(&mut self, o: Option<f64>) {
        self.samples += 1;
        match o {
            Some(o) => {
                self.min = self.min.min(o);
                if o < 1.9 {
                    self.failures += 1;
                }
            }
            None => self.roundoff += 1,
        }
    }

    fn summary(&self, name: &str) -> String {
        format!("{name} min_order={:.3} n={} roundoff={}", self.min, self.samples, self.roundoff)
    }
}

fn random_diamond(rng: &mut ChaCha8Rng) -> (HalfedgeMesh, Vec<Vec3>) {
    let base = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.5, 0.8, 0.0),
        Vec3::new(0.5, -0.8, 0.0),
    ];
    let pos: Vec<Vec3> = base
        .iter()
        .map(|b| b + Vec3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(-0.4..0.4)))
        .collect();
    let mesh = HalfedgeMesh::from_triangles(4, &[[0, 1, 2], [1, 0, 3]]).unwrap();
    (mesh, pos)
}

fn dual_area(m: &HalfedgeMesh, p: &[Vec3], v: usize) -> f64 {
    m.vertex_faces(v)
        .map(|f| {
            let [a, b, c] = m.face_vertices(f);
            face_area(p, a, b, c)
        })
        .sum::<f64>()
        / 3.0
}

// ---------------------------------------------------------------------------
// criteria

fn gauss_bonnet() -> Verdict {
    let mut worst = 0.0f64;
    let mut meshes = 0;
    let mut cases: Vec<(String, HalfedgeMesh, Vec<Vec3>)> = Vec::new();
    for s in 0..=5 {
        let (m, p) = icosphere(s, 1.0).map_err(err)?;
        cases.push((format!("icosphere{s}"), m, p));
    }
    for s in 0..=5 {
        let (m, p) = cube(s).map_err(err)?;
        cases.push((format!("cube{s}"), m, p));
        let (m, p) = tetrahedron(s).map_err(err)?;
        cases.push((format!("tetrahedron{s}"), m, p));
    }
    for s in 1..=5 {
        let (m, p) = spheroid(s, 1.0, 0.5).map_err(err)?;
        cases.push((format!("spheroid{s}"), m, p));
    }
    let mut failed = Vec::new();
    for (name, m, p) in &cases {
        let k = vertex_gaussian_curvature(m, &Geometry::new(m, p));
        let dev = (k.iter().sum::<f64>() - 4.0 * PI).abs();
        let tol = 1e-9 * m.n_vertices() as f64;
        worst = worst.max(dev / tol);
        meshes += 1;
        if dev > tol {
            failed.push(name.clone());
        }
    }
    Ok((failed.is_empty(), format!("{meshes} meshes, worst |sum K - 4pi| / (1e-9 |V|) = {worst:.2e}, failing {failed:?}")))
}

fn spheroid_convergence() -> Verdict {
    let r = spheroid_convergence_study(&[2, 3, 4, 5]).map_err(err)?;
    let s = &r.slopes;
    let scalar = [
        ("area", s.area),
        ("volume", s.volume),
        ("int_H", s.total_mean),
        ("int_H2", s.total_mean_sq),
        ("L1_H", s.l1_mean),
        ("L1_K", s.l1_gauss),
    ];
    let vector = [("L1_Hvec", s.l1_mean_vec), ("L1_Kvec", s.l1_gauss_vec)];
    let gauss_ok = r.levels.iter().all(|l| l.total_gauss <= 1e-9);
    let ok = scalar.iter().all(|(_, v)| *v >= 1.7) && vector.iter().all(|(_, v)| *v >= 1.3) && gauss_ok;
    let mut d: Vec<String> = scalar.iter().chain(&vector).map(|(n, v)| format!("{n}={v:.3}")).collect();
    d.push(format!("proxies(lapH={:.2}, schlafli={:.2}, unbounded)", s.l1_lap_mean, s.l1_schlafli));
    d.push(format!("max int_K dev={:.1e}", r.levels.iter().map(|l| l.total_gauss).fold(0.0, f64::max)));
    Ok((ok, format!("slopes {}", d.join(" "))))
}

fn force_exactness() -> Verdict {
    let required = ["f_b", "f_s", "f_p", "f_d", "f_a", "mu_b", "mu_d"];
    let eps = default_eps();
    if eps[0] > 1e-6 || *eps.last().unwrap() < 1e-2 {
        return Err("sweep does not cover [1e-6, 1e-2]".into());
    }
    let mut min_order = f64::INFINITY;
    let mut worst_mu_a = 0.0f64;
    let mut ok = true;
    for seed in [11, 12, 13] {
        let sys = randomized_test_system(2, seed).map_err(err)?;
        let spread = sys.phi.iter().fold(0.0f64, |m, p| m.max((p - 0.5).abs()));
        if spread < 0.2 {
            return Err("density is not heterogeneous".into());
        }
        for row in taylor_exactness_study(&sys, &eps, seed).map_err(err)? {
            if required.contains(&row.term) {
                let o = row.order.unwrap_or(f64::NAN);
                min_order = min_order.min(o);
                ok &= o >= 1.9;
            }
            if row.term == "mu_a" {
                let w = row.relative.iter().fold(0.0f64, |m, r| m.max(*r));
                worst_mu_a = worst_mu_a.max(w);
                ok &= row.exact && w <= 1e-12;
            }
        }
    }
    Ok((ok, format!("3 randomized icospheres, min order {min_order:.3}, worst mu_a relative remainder {worst_mu_a:.1e}")))
}

fn derivative_oracles() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut length = OrderTally::new();
    let mut dih_diag = OrderTally::new();
    let mut dih_off = OrderTally::new();
    let mut area_diag = OrderTally::new();
    let mut area_off = OrderTally::new();
    let mut vecs = [OrderTally::new(), OrderTally::new(), OrderTally::new(), OrderTally::new()];
    let mut value_gap = 0.0f64;

    for _ in 0..100 {
        let (m, p) = random_diamond(&mut rng);
        let g = Geometry::new(&m, &p);
        let h = m.find_halfedge(0, 1).unwrap();
        let d = diamond_of(&m, h);
        value_gap = value_gap.max((g.dihedral[h >> 1] - dihedral(&p, d)).abs());

        length.add(fd_order(&|q| (q[0] - q[1]).norm(), &p, 0, grad_length(&p[0], &p[1])));
        let (vs, gs) = dihedral_gradients(&m, &g, h).unwrap();
        for (slot, (&v, gv)) in vs.iter().zip(gs).enumerate() {
            let o = fd_order(&|q| dihedral(q, d), &p, v, gv);
            if slot < 2 { dih_diag.add(o) } else { dih_off.add(o) }
        }
        // dual area of vertex 0 against its own position and a neighbor's
        for v in 0..4 {
            let grad: Vec3 = m
                .vertex_faces(0)
                .filter(|&f| m.face_vertices(f).contains(&v))
                .map(|f| {
                    let [a, b, c] = m.face_vertices(f);
                    let rot = if v == a { [a, b, c] } else if v == b { [b, c, a] } else { [c, a, b] };
                    grad_face_area_at(&p[rot[0]], &p[rot[1]], &p[rot[2]])
                })
                .sum::<Vec3>()
                / 3.0;
            value_gap = value_gap.max((g.vertex_area[v] - dual_area(&m, &p, v)).abs());
            let o = fd_order(&|q| dual_area(&m, q, 0), &p, v, grad);
            if v == 0 { area_diag.add(o) } else { area_off.add(o) }
        }
    }

    for seed in 0..100 {
        let (m, p) = icosphere(0, 1.0).map_err(err)?;
        let p = perturbed(&p, 0.08, seed);
        let g = Geometry::new(&m, &p);
        let cv = CurvatureVectors::new(&m, &p, &g);
        let center = (seed as usize) % m.n_vertices();
        for h in m.outgoing(center).collect::<Vec<_>>() {
            let d @ [i, j, k, l] = diamond_of(&m, h);
            let theta0 = dihedral(&p, d);
            let len0 = (p[i] - p[j]).norm();
            let jk = diamond_of(&m, m.next(h));
            let lj = diamond_of(&m, m.prev(twin(h)));
            let (ljk, llj) = ((p[j] - p[k]).norm(), (p[l] - p[j]).norm());
            let (fa, fb) = ([i, j, k], [j, i, l]);
            vecs[0].add(fd_order(
                &|q| 0.5 * (face_area(q, fa[0], fa[1], fa[2]) + face_area(q, fb[0], fb[1], fb[2])),
                &p,
                i,
                cv.mean[h],
            ));
            vecs[1].add(fd_order(&|q| 0.5 * theta0 * (q[i] - q[j]).norm(), &p, i, cv.gauss[h]));
            vecs[2].add(fd_order(&|q| 0.5 * len0 * dihedral(q, d), &p, i, cv.schlafli1[h]));
            vecs[3].add(fd_order(
                &|q| 0.5 * (len0 * dihedral(q, d) + ljk * dihedral(q, jk) + llj * dihedral(q, lj)),
                &p,
                i,
                cv.schlafli2[h],
            ));
        }
    }

    let mut all = vec![
        length.summary("grad_l"),
        dih_diag.summary("grad_theta_diag"),
        dih_off.summary("grad_theta_off"),
        area_diag.summary("grad_A_diag"),
        area_off.summary("grad_A_off"),
    ];
    for (t, n) in vecs.iter().zip(["H_vec", "K_vec", "S1_vec", "S2_vec"]) {
        all.push(t.summary(n));
    }
    let failures = [&length, &dih_diag, &dih_off, &area_diag, &area_off].iter().map(|t| t.failures).sum::<usize>()
        + vecs.iter().map(|t| t.failures).sum::<usize>();
    let ok = failures == 0 && value_gap < 1e-12;
    Ok((ok, format!("100 diamonds + 100 fans; {}; value gap {value_gap:.1e}", all.join("; "))))
}

/// Cotangent Dirichlet form `sum_e w_e (phi_i - phi_j)^2` with
/// `w_e = (cot a + cot b) / 2`, from positions only.
fn cotan_form(m: &HalfedgeMesh, p: &[Vec3], phi: &[f64]) -> f64 {
    let cot = |a: usize, b: usize, c: usize| {
        let (u, v) = (p[b] - p[a], p[c] - p[a]);
        u.dot(&v) / u.cross(&v).norm()
    };
    let mut s = 0.0;
    for f in 0..m.n_faces() {
        let [a, b, c] = m.face_vertices(f);
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            // the angle at x faces edge y-z
            s += 0.5 * cot(x, y, z) * (phi[y] - phi[z]).powi(2);
        }
    }
    s
}

fn dirichlet_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst, mut worst_oracle) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let (m, p) = if i % 2 == 0 {
            let (m, p) = icosphere(1 + i % 3, 1.0).map_err(err)?;
            (m, perturbed(&p, 0.05, i as u64))
        } else {
            let (m, p) = flat_hex_patch(1.0, 3 + i % 4).map_err(err)?;
            let p = p.iter().map(|x| x + Vec3::new(0.0, 0.0, rng.gen_range(-0.1..0.1))).collect();
            (m, p)
        };
        let phi: Vec<f64> = (0..m.n_vertices()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let eta = 10f64.powf(rng.gen_range(-4.0..0.0));
        let g = Geometry::new(&m, &p);
        let face = dirichlet_energy(&m, &p, &g, &phi, eta);
        let lap = 0.5 * eta * cotan_laplacian(&m, &g).quadratic_form(&phi);
        let oracle = 0.5 * eta * cotan_form(&m, &p, &phi);
        worst = worst.max((face - lap).abs() / lap.abs());
        worst_oracle = worst_oracle.max((face - oracle).abs() / oracle.abs());
    }
    let ok = worst <= 1e-12 && worst_oracle <= 1e-12;
    Ok((ok, format!("20 meshes, worst relative gap {worst:.1e} (independent cotan sum {worst_oracle:.1e})")))
}

fn rigid_body() -> Verdict {
    let mut cfg = make_preset("vesicle-biconcave").map_err(err)?;
    cfg.solver.mode = Mode::Dynamics;
    cfg.solver.max_steps = 1000;
    cfg.solver.tolerance = f64::MIN_POSITIVE; // never converges early, so all 1000 steps run
    let mut sys = cfg.build_system().map_err(err)?;
    let mut prev = sys.center_of_mass();
    let (mut drift, mut torque, mut steps) = (0.0f64, 0.0f64, 0usize);
    let mut check = |sys: &System| -> memddg::Result<()> {
        let f = sys.forces()?.net;
        let c = sys.center_of_mass();
        let t: Vec3 = sys.pos.iter().zip(&f).map(|(r, f)| (r - c).cross(f)).sum();
        torque = torque.max(t.norm());
        Ok(())
    };
    check(&sys).map_err(err)?;
    let out = run_config(&cfg, &mut sys, &mut |pr: &Progress, s: &System| {
        if pr.step > 0 {
            let c = s.center_of_mass();
            drift = drift.max((c - prev).norm());
            prev = c;
            steps += 1;
            check(s)?;
        }
        Ok(())
    })
    .map_err(err)?;
    let ok = steps == 1000 && drift <= 1e-8 && torque <= 1e-10 && !matches!(out.report.reason, Reason::Error(_));
    Ok((ok, format!("{steps} Euler steps, max COM drift {drift:.1e} um/step, max |torque| {torque:.1e} nN*um")))
}

struct PresetRun {
    reason: Reason,
    residual: f64,
    tolerance: f64,
    steps: usize,
    uphill: usize,
    max_strain: f64,
    axial_dev: f64,
    height: f64,
    phi_range: (f64, f64),
}

fn run_preset(cfg: &RunConfig) -> memddg::Result<PresetRun> {
    let mut sys = cfg.build_system()?;
    let a0 = total_area(&sys.mesh, &sys.pos);
    let (mut uphill, mut max_strain, mut axial_dev) = (0usize, 0.0f64, 0.0f64);
    let mut phi_range = (f64::INFINITY, f64::NEG_INFINITY);
    let out = run_config(cfg, &mut sys, &mut |pr: &Progress, s: &System| {
        for info in [pr.shape, pr.protein].into_iter().flatten() {
            if !(info.energy_after < info.energy_before) {
                uphill += 1;
            }
        }
        max_strain = max_strain.max((total_area(&s.mesh, &s.pos) / a0 - 1.0).abs());
        let (lo, hi) = s.pos.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.z), hi.max(p.z)));
        axial_dev = axial_dev.max((hi - lo - 19.9).abs());
        for &p in &s.phi {
            phi_range = (phi_range.0.min(p), phi_range.1.max(p));
        }
        Ok(())
    })?;
    let height = sys.pos.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
    Ok(PresetRun {
        reason: out.report.reason,
        residual: out.report.residual,
        tolerance: cfg.solver.tolerance,
        steps: out.report.steps,
        uphill,
        max_strain,
        axial_dev,
        height,
        phi_range,
    })
}

fn monotone_descent() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut control_height = None;
    let mut scaffold_height = None;
    for name in PRESET_NAMES {
        let start = Instant::now();
        let cfg = make_preset(name).map_err(err)?;
        let r = run_preset(&cfg).map_err(err)?;
        let secs = start.elapsed().as_secs_f64();
        let mut good = r.uphill == 0 && !matches!(r.reason, Reason::Error(_)) && secs < 300.0;
        let mut note = format!("{name}: {} steps, uphill={}", r.steps, r.uphill);
        if name.starts_with("vesicle") {
            let conv = r.reason == Reason::Converged && r.residual <= r.tolerance;
            good &= conv && r.max_strain < 0.01;
            note += &format!(", residual {:.1e}<=tol {:.0e}: {conv}, strain {:.2}%", r.residual, r.tolerance, 100.0 * r.max_strain);
        }
        if name.starts_with("tube") {
            good &= r.axial_dev <= 1e-12;
            note += &format!(", axial dev {:.1e}", r.axial_dev);
        }
        match name {
            "patch-control" => control_height = Some(r.height),
            "patch-scaffold" => scaffold_height = Some(r.height),
            _ => {}
        }
        if let Reason::Error(e) = &r.reason {
            note += &format!(", error {e}");
        }
        if !good {
            note += " [failed]";
        }
        ok &= good;
        notes.push(note);
    }
    let ratio = scaffold_height.zip(control_height).map_or(f64::NAN, |(s, c)| s / c);
    ok &= ratio >= 2.0;
    notes.push(format!("patch height ratio {ratio:.2}"));
    Ok((ok, notes.join("; ")))
}

fn protein_bounds() -> Verdict {
    let cfg = make_preset("spine-protein").map_err(err)?;
    let r = run_preset(&cfg).map_err(err)?;
    let (lo, hi) = r.phi_range;
    let ok = lo > 0.0 && hi < 1.0 && !matches!(r.reason, Reason::Error(_));
    Ok((ok, format!("{} steps, phi in [{lo:.3e}, {hi:.6}]", r.steps)))
}

fn remeshing_integrity() -> Verdict {
    let (m0, p0) = icosphere(3, 1.0).map_err(err)?;
    let p0 = perturbed(&p0, 0.03, 17);
    let fields0 = Fields { phi: vec![0.5; p0.len()], pos: p0, extra: None, tracked: vec![0] };
    let (mut m, mut f) = (m0.clone(), fields0.clone());
    let target = m.n_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut log = MutationLog::default();
    let (mut applied, mut bad_counts) = (0usize, 0usize);
    let mut attempts = 0usize;
    while applied < 10_000 {
        attempts += 1;
        let e = rng.gen_range(0..m.n_edges());
        let roll = rng.gen_range(0..100);
        let op = if roll == 0 {
            MutationOp::Compact
        } else if roll == 1 {
            MutationOp::Shift
        } else if !m.edge_alive(e) {
            continue;
        } else if roll < 50 {
            if !flip_is_geometric(&m, &f.pos, e) {
                continue;
            }
            MutationOp::Flip(e)
        } else if m.live_vertex_count() < target {
            MutationOp::Split(e)
        } else {
            if !collapse_is_geometric(&m, &f.pos, e) {
                continue;
            }
            MutationOp::Collapse(e)
        };
        apply_op(&mut m, &mut f, op).map_err(|x| format!("{op:?}: {x}"))?;
        log.ops.push(op);
        applied += 1;
        let (v, ed, fa) = (m.live_vertex_count() as i64, m.live_edge_count() as i64, m.live_face_count() as i64);
        if v - ed + fa != 2 || 2 * ed != 3 * fa || m.euler_characteristic() != 2 {
            bad_counts += 1;
        }
        if applied % 500 == 0 {
            m.validate().map_err(|x| format!("after {applied} ops: {x}"))?;
        }
    }
    m.validate().map_err(err)?;
    let (mut m2, mut f2) = (m0, fields0);
    MutationLog::from_text(&log.to_text()).map_err(err)?.replay(&mut m2, &mut f2).map_err(err)?;
    let identical = m2 == m && f2 == f;
    let ok = bad_counts == 0 && identical && m.is_connected();
    Ok((
        ok,
        format!(
            "{applied} ops ({attempts} draws), {} live vertices, count violations {bad_counts}, replay identical: {identical}",
            m.live_vertex_count()
        ),
    ))
}

fn io_round_trips() -> Verdict {
    let (m, p) = icosphere(2, 1.0).map_err(err)?;
    let p = perturbed(&p, 0.05, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let phi: Vec<f64> = (0..p.len()).map(|_| rng.gen::<f64>()).collect();
    let tri = m.triangles();
    let ply = parse_ply(&to_ply(&m, &p, Some(&phi))).map_err(err)?;
    let obj = parse_obj(&to_obj(&m, &p, Some(&phi))).map_err(err)?;
    let mesh_ok = [&ply, &obj].iter().all(|d| d.mesh.triangles() == tri && d.pos == p && d.phi.as_deref() == Some(&phi[..]));

    let mut buf = Vec::new();
    {
        let header = TrajectoryHeader::new("[run]\nseed = 1\n".into(), None);
        let shared = SharedBuf(std::sync::Arc::new(std::sync::Mutex::new(Vec::new())));
        let mut w = TrajectoryWriter::new(Box::new(shared.clone()), &header).map_err(err)?;
        for k in 0..3 {
            let pos: Vec<Vec3> = p.iter().map(|x| x * (1.0 + 0.1 * k as f64)).collect();
            w.write_frame(&FrameData { t: k as f64 * 0.25, faces: tri.clone(), pos, phi: phi.clone(), scalars: None })
                .map_err(err)?;
        }
        w.finish().map_err(err)?;
        buf.extend_from_slice(&shared.0.lock().unwrap());
    }
    let traj = parse_trajectory(&buf[..]).map_err(err)?;
    let traj_ok = traj.frames.len() == 3
        && traj.frames.iter().enumerate().all(|(k, fr)| {
            fr.faces == tri
                && fr.phi == phi
                && fr.t == k as f64 * 0.25
                && fr.pos.iter().zip(&p).all(|(a, b)| *a == b * (1.0 + 0.1 * k as f64))
        })
        && traj.frames[1].topology_ref.is_some();

    let mut config_ok = true;
    for name in PRESET_NAMES {
        let text = serialize_config(&make_preset(name).map_err(err)?);
        let again = serialize_config(&parse_config(&text).map_err(err)?);
        config_ok &= text == again;
    }
    Ok((mesh_ok && traj_ok && config_ok, format!("mesh (ply, obj): {mesh_ok}, trajectory: {traj_ok}, config x{}: {config_ok}", PRESET_NAMES.len())))
}

#[derive(Clone)]
struct SharedBuf(std::sync::Arc<std::sync::Mutex<Vec<u8>>>);

impl std::io::Write for SharedBuf {
    fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(b);
        Ok(b.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "gauss_bonnet_exactness", s(1), gauss_bonnet),
        criterion(2, "spheroid_convergence", s(120), spheroid_convergence),
        criterion(3, "force_exactness", s(60), force_exactness),
        criterion(4, "derivative_primitive_oracles", s(30), derivative_oracles),
        criterion(5, "dirichlet_dual_identity", s(5), dirichlet_identity),
        criterion(6, "rigid_body_cleanliness", s(120), rigid_body),
        criterion(7, "monotone_descent_and_shapes", s(300 * PRESET_NAMES.len() as u64), monotone_descent),
        criterion(8, "protein_bounds", s(120), protein_bounds),
        criterion(9, "remeshing_integrity", s(60), remeshing_integrity),
        criterion(10, "io_round_trips", s(5), io_round_trips),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
