//! Serialization of paths, trajectories, residual reports and ensembles.
//!
//! CSV carries series (17 significant digits, exact f64 round-trip), JSON
//! carries metadata and summaries. All formatters return deterministic byte
//! strings: identical inputs give identical output bytes.

use serde::{Deserialize, Serialize};

use crate::attractor::{AttractorEstimate, PullbackEnsemble};
use crate::error::{CoreError, Result};
use crate::grid::GridPath;
use crate::models::StateH;
use crate::noise::{HurstIndex, TwoSidedPath};
use crate::solver::Trajectory;

/// 17 significant digits: exact round-trip for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Companion metadata for a path CSV.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PathManifest {
    pub hurst: f64,
    pub step: f64,
    pub n_past: usize,
    pub n_future: usize,
    pub seed: u64,
}

impl PathManifest {
    pub fn of(path: &TwoSidedPath) -> Self {
        Self {
            hurst: path.hurst().value(),
            step: path.step(),
            n_past: path.n_past(),
            n_future: path.n_future(),
            seed: path.seed(),
        }
    }
}

/// CSV with header `time,omega`, one row per grid point.
pub fn path_to_csv(path: &TwoSidedPath) -> String {
    let mut out = String::from("time,omega\n");
    for k in path.first_index()..=path.last_index() {
        out.push_str(&fmt_f64(path.time_of(k)));
        out.push(',');
        out.push_str(&fmt_f64(path.value(k).unwrap()));
        out.push('\n');
    }
    out
}

/// Rebuild a path from its CSV body and manifest. The anchor invariant
/// (`omega_0 = 0`) is enforced on import.
pub fn path_from_csv(csv: &str, manifest: &PathManifest) -> Result<TwoSidedPath> {
    let mut lines = csv.lines();
    match lines.next() {
        Some("time,omega") => {}
        other => {
            return Err(CoreError::Config(format!(
                "path CSV must start with 'time,omega', got {other:?}"
            )))
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let _time = fields.next();
        let omega = fields
            .next()
            .ok_or_else(|| CoreError::Config(format!("path CSV row {i} lacks an omega field")))?;
        let v: f64 = omega
            .parse()
            .map_err(|e| CoreError::Config(format!("path CSV row {i}: bad float ({e})")))?;
        samples.push(v);
    }
    let expected = manifest.n_past + manifest.n_future + 1;
    if samples.len() != expected {
        return Err(CoreError::Config(format!(
            "path CSV has {} samples, manifest requires {expected}",
            samples.len()
        )));
    }
    TwoSidedPath::from_samples(
        HurstIndex::new(manifest.hurst)?,
        manifest.step,
        manifest.n_past,
        samples,
        manifest.seed,
    )
}

/// Residual report for the Young-calculus diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub operation: String,
    pub window: (f64, f64),
    pub step: f64,
    pub residual: f64,
}

/// CSV `time,normH,normV[,coeff_0..coeff_{d-1}]`.
pub fn trajectory_to_csv(traj: &Trajectory, with_coeffs: bool) -> String {
    let mut out = String::from("time,normH,normV");
    if with_coeffs {
        let dim = traj.states[0].dim();
        for i in 0..dim {
            out.push_str(&format!(",coeff_{i}"));
        }
    }
    out.push('\n');
    for j in 0..traj.len() {
        out.push_str(&fmt_f64(traj.time(j)));
        out.push(',');
        out.push_str(&fmt_f64(traj.norm_h[j]));
        out.push(',');
        out.push_str(&fmt_f64(traj.norm_v[j]));
        if with_coeffs {
            for c in &traj.states[j].coeffs {
                out.push(',');
                out.push_str(&fmt_f64(*c));
            }
        }
        out.push('\n');
    }
    out
}

/// JSON summary of a solve. `energy_slack_max` is the largest pointwise
/// violation of the discrete energy inequality seen along the run
/// (zero when the inequality held everywhere).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub scheme: String,
    pub dt: f64,
    #[serde(rename = "final_normH")]
    pub final_norm_h: f64,
    pub energy_slack_max: f64,
}

impl TrajectorySummary {
    pub fn of(traj: &Trajectory, scheme: &str) -> Self {
        Self {
            scheme: scheme.to_string(),
            dt: traj.dt,
            final_norm_h: *traj.norm_h.last().unwrap(),
            energy_slack_max: (-traj.energy_slack_min).max(0.0),
        }
    }
}

/// JSON export of a pullback ensemble / attractor estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub fiber_time: f64,
    pub pullback_times: Vec<f64>,
    pub semidist_history: Vec<f64>,
    pub diameter: f64,
    pub invariance_gap: Option<f64>,
    pub converged: bool,
}

impl EnsembleReport {
    pub fn of(ensemble: &PullbackEnsemble, estimate: &AttractorEstimate) -> Self {
        Self {
            fiber_time: ensemble.fiber_time,
            pullback_times: ensemble.pullback_times.clone(),
            semidist_history: estimate.semidist_history.clone(),
            diameter: estimate.diameter,
            invariance_gap: estimate.invariance_gap,
            converged: matches!(
                estimate.verdict,
                crate::attractor::ConvergenceVerdict::Converged
            ),
        }
    }
}

/// Point cloud CSV: `point,coeff_0..coeff_{d-1}`.
pub fn cloud_to_csv(points: &[StateH]) -> String {
    let dim = points.first().map(|p| p.dim()).unwrap_or(0);
    let mut out = String::from("point");
    for i in 0..dim {
        out.push_str(&format!(",coeff_{i}"));
    }
    out.push('\n');
    for (idx, p) in points.iter().enumerate() {
        out.push_str(&idx.to_string());
        for c in &p.coeffs {
            out.push(',');
            out.push_str(&fmt_f64(*c));
        }
        out.push('\n');
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
