//! Property checks over completed trajectories. Failures are reported, not
//! raised, and nothing here touches simulation state.

use crate::io::trajectory::Trajectory;
use crate::mesh::geometry::total_area;
use crate::mesh::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, passed: value <= limit }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, passed: value >= limit }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {} value={:e} limit={:e}", self.name, self.value, self.limit)
    }
}

fn center(pos: &[Vec3]) -> Vec3 {
    pos.iter().sum::<Vec3>() / pos.len() as f64
}

/// Largest `|area / reference - 1|` over all frames.
pub fn max_areal_strain(traj: &Trajectory, reference_area: f64) -> f64 {
    traj.frames
        .iter()
        .filter_map(|f| f.mesh().ok().map(|m| (total_area(&m, &f.pos) / reference_area - 1.0).abs()))
        .fold(0.0, f64::max)
}

/// Largest center-of-mass displacement per solver step between
/// consecutive frames. Frames without a step count are taken one step apart.
pub fn max_center_drift_per_step(traj: &Trajectory) -> f64 {
    traj.frames
        .windows(2)
        .map(|w| {
            let steps = match (&w[0].scalars, &w[1].scalars) {
                (Some(a), Some(b)) if b.step > a.step => (b.step - a.step) as f64,
                _ => 1.0,
            };
            (center(&w[1].pos) - center(&w[0].pos)).norm() / steps
        })
        .fold(0.0, f64::max)
}

/// Height of the final frame above the initial plane, `max |z|`.
pub fn final_height(traj: &Trajectory) -> f64 {
    traj.frames.last().map_or(0.0, |f| f.pos.iter().map(|p| p.z.abs()).fold(0.0, f64::max))
}

/// Axial extent `max z - min z` of every frame.
pub fn axial_lengths(traj: &Trajectory) -> Vec<f64> {
    traj.frames
        .iter()
        .map(|f| {
            let (lo, hi) = f.pos.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.z), hi.max(p.z)));
            hi - lo
        })
        .collect()
}

/// `(min, max)` of the protein density over the whole trajectory.
pub fn phi_range(traj: &Trajectory) -> (f64, f64) {
    traj.frames
        .iter()
        .flat_map(|f| f.phi.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)))
}

/// Preset-specific checks. Patch-scaffold compares against the control
/// trajectory when one is given.
pub fn scenario_assertions(preset: &str, traj: &Trajectory, control: Option<&Trajectory>) -> Vec<Check> {
    let mut out = Vec::new();
    let closed = traj.frames.first().and_then(|f| f.mesh().ok()).is_some_and(|m| !m.has_boundary());
    if preset.starts_with("vesicle") {
        if let Some(f) = traj.frames.first() {
            // vesicle presets prescribe the initial area as the preferred area
            let a0 = f.mesh().map(|m| total_area(&m, &f.pos)).unwrap_or(f64::NAN);
            out.push(Check::at_most("areal_strain", max_areal_strain(traj, a0), 0.01));
        }
    }
    if closed {
        out.push(Check::at_most("center_drift_per_step", max_center_drift_per_step(traj), 1e-8));
    }
    if preset.starts_with("tube") {
        let worst = axial_lengths(traj).iter().map(|l| (l - 19.9).abs()).fold(0.0, f64::max);
        out.push(Check::at_most("axial_length_deviation", worst, 1e-12));
    }
    if preset == "patch-scaffold" {
        if let Some(c) = control {
            let ratio = final_height(traj) / final_height(c);
            out.push(Check::at_least("height_ratio_vs_control", ratio, 2.0));
        }
    }
    if preset == "spine-protein" || preset.starts_with("bud") {
        let (lo, hi) = phi_range(traj);
        let margin = lo.min(1.0 - hi);
        out.push(Check { name: "phi_strictly_inside".into(), value: margin, limit: 0.0, passed: margin > 0.0 });
    }
    out
}
