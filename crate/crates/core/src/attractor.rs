//! Random-dynamical-systems layer: cocycle wrapper, absorbing-radius
//! quadrature, temperedness diagnostics, pullback ensembles and attractor
//! estimates.
//!
//! Pullback semantics: "shift the noise by -T, then evolve T" is realized as
//! "solve on [tau - T, tau] with the single stored two-sided path". On
//! aligned grids the two are the same step sequence, so no noise is ever
//! re-sampled and explicit-scheme cocycle identities hold bit for bit.

use crate::error::{CoreError, Result};
use crate::grid::GridPath;
use crate::models::{Model, ScalarEnvelope, StateH, TripleConstants};
use crate::noise::TwoSidedPath;
use crate::solver::{solve_direct_young, solve_transformed, SolveConfig};

/// Relative tail target for the absorbing-radius quadrature horizon.
const TAIL_TARGET: f64 = 1e-8;
/// The reported tail bound must stay below this fraction of the radius.
const TAIL_INVARIANT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveRoute {
    Direct,
    Transformed,
}

/// Evaluation map `(t >= 0, start, x) -> state at start + t` obtained by
/// solving with the stored path; the numerical cocycle.
pub struct CocycleHandle<'a> {
    pub model: &'a dyn Model,
    pub path: &'a TwoSidedPath,
    pub beta: f64,
    pub cfg: SolveConfig,
    pub route: SolveRoute,
}

impl<'a> CocycleHandle<'a> {
    pub fn new(
        model: &'a dyn Model,
        path: &'a TwoSidedPath,
        beta: f64,
        cfg: SolveConfig,
        route: SolveRoute,
    ) -> Self {
        Self { model, path, beta, cfg, route }
    }

    /// `phi(duration, theta_{start} omega, x)`: solve on
    /// `[start, start + duration]`. Zero duration returns `x` exactly.
    pub fn evolve(&self, start: f64, duration: f64, x: &StateH) -> Result<StateH> {
        if duration < 0.0 {
            return Err(CoreError::Domain(format!("evolution time must be >= 0, got {duration}")));
        }
        if duration == 0.0 {
            return Ok(x.clone());
        }
        let window = (start, start + duration);
        let traj = match self.route {
            SolveRoute::Direct => {
                solve_direct_young(self.model, self.path, self.beta, x, window, &self.cfg)?
            }
            SolveRoute::Transformed => {
                solve_transformed(self.model, self.path, self.beta, x, window, &self.cfg)?
            }
        };
        Ok(traj.final_state().clone())
    }
}

/// `|phi(t+s, omega, x) - phi(s, theta_t omega, phi(t, omega, x))|_H`.
/// Exactly zero for explicit schemes on aligned grids (identical step
/// sequences); bounded by Newton tolerance propagation for implicit ones.
pub fn cocycle_gap(handle: &CocycleHandle, s: f64, t: f64, x: &StateH) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return Err(CoreError::Domain("cocycle times must be nonnegative".into()));
    }
    let whole = handle.evolve(0.0, t + s, x)?;
    let first = handle.evolve(0.0, t, x)?;
    let composed = handle.evolve(t, s, &first)?;
    handle.model.norm_h(&whole.sub(&composed))
}

/// Hausdorff semi-distance `sup_{a in A} inf_{b in B} d(a, b)` under an
/// arbitrary metric. Empty `A` is an error; empty `B` returns the paper's
/// distinguished infinity.
pub fn hausdorff_semidist_with(
    a: &[StateH],
    b: &[StateH],
    dist: impl Fn(&StateH, &StateH) -> Result<f64>,
) -> Result<f64> {
    if a.is_empty() {
        return Err(CoreError::Domain("Hausdorff semi-distance from an empty set".into()));
    }
    if b.is_empty() {
        return Ok(f64::INFINITY);
    }
    let mut sup = 0.0f64;
    for p in a {
        let mut inf = f64::INFINITY;
        for q in b {
            let d = dist(p, q)?;
            if d < inf {
                inf = d;
            }
        }
        if inf > sup {
            sup = inf;
        }
    }
    Ok(sup)
}

/// Hausdorff semi-distance in the model's H-norm.
pub fn hausdorff_semidist(a: &[StateH], b: &[StateH], model: &dyn Model) -> Result<f64> {
    hausdorff_semidist_with(a, b, |p, q| model.norm_h(&p.sub(q)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbingRegime {
    AlphaEqTwo,
    AlphaGtTwo,
    Nonautonomous,
}

/// Absorbing-set radius estimate `R^2 = 1 + integral`, with the truncation
/// horizon actually used and a certified bound on the omitted tail.
#[derive(Debug, Clone, Copy)]
pub struct AbsorbingEstimate {
    pub radius_sq: f64,
    pub truncation_horizon: f64,
    pub tail_bound: f64,
    pub regime: AbsorbingRegime,
}

/// Linear growth envelope `|omega_r| <= c + g |r|` measured on the sampled
/// past of the path; feeds the quadrature tail bound.
fn past_growth_envelope(path: &dyn GridPath) -> (f64, f64) {
    let step = path.step();
    let mut c_env = 0.0f64;
    let mut g_env = 0.0f64;
    for k in path.first_index()..=0 {
        let t = k as f64 * step;
        let v = path.value(k).unwrap_or(0.0).abs();
        if t >= -1.0 {
            c_env = c_env.max(v);
        } else {
            g_env = g_env.max(v / t.abs());
        }
    }
    (c_env, g_env)
}

/// Shared trapezoid quadrature of `weight(r) * exp(-2 beta omega_r + kappa r)`
/// over `[-T, 0]`, with `T` grown until the certified tail falls below
/// `1e-8` of the accumulated value (or the sampled past is exhausted).
fn radius_quadrature(
    path: &dyn GridPath,
    beta: f64,
    kappa: f64,
    weight: impl Fn(f64) -> f64,
    weight_tail_sup: impl Fn(f64) -> f64,
    regime: AbsorbingRegime,
) -> Result<AbsorbingEstimate> {
    if !(kappa > 0.0) {
        return Err(CoreError::Config(format!("decay rate kappa must be positive, got {kappa}")));
    }
    let step = path.step();
    if path.first_index() >= 0 {
        return Err(CoreError::Range("path has no sampled past for the radius quadrature".into()));
    }
    let (c_env, g_env) = past_growth_envelope(path);
    let decay = kappa - 2.0 * beta.abs() * g_env;
    let env_prefactor = (2.0 * beta.abs() * c_env).exp();

    let value_at = |j: i64| -> Result<f64> {
        let r = -(j as f64) * step;
        let w = path.value(-j)?;
        Ok(weight(r) * (-2.0 * beta * w + kappa * r).exp())
    };

    let mut accum = 0.0f64;
    let mut prev = value_at(0)?;
    let mut tail = f64::INFINITY;
    let mut horizon = 0.0f64;
    let max_j = -path.first_index();
    for j in 1..=max_j {
        let cur = value_at(j)?;
        accum += 0.5 * (prev + cur) * step;
        prev = cur;
        horizon = j as f64 * step;
        if decay > 0.0 {
            tail = weight_tail_sup(-horizon) * env_prefactor * (-decay * horizon).exp() / decay;
            if tail <= TAIL_TARGET * (1.0 + accum) {
                break;
            }
        }
    }
    let radius_sq = 1.0 + accum;
    if !(tail < TAIL_INVARIANT * radius_sq) {
        return Err(CoreError::Range(format!(
            "sampled past (horizon {horizon}) cannot certify the radius tail: bound {tail} vs R^2 = {radius_sq}"
        )));
    }
    Ok(AbsorbingEstimate { radius_sq, truncation_horizon: horizon, tail_bound: tail, regime })
}

/// Young-inequality constant absorbing `(K/lambda) |u|_V^2` into
/// `epsilon * e^{beta(alpha-2)omega} |u|_V^alpha + C e^{-2 beta omega}`.
fn young_absorption_constant(k_over_lambda: f64, alpha: f64, epsilon: f64) -> f64 {
    if k_over_lambda == 0.0 {
        return 0.0;
    }
    let q = alpha / (alpha - 2.0);
    ((alpha - 2.0) / alpha) * (epsilon * alpha / 2.0).powf(-2.0 / (alpha - 2.0))
        * k_over_lambda.powf(q)
}

/// Autonomous absorbing radius:
/// `R^2 = 1 + C int_{-T}^0 exp(-2 beta omega_r + kappa r) dr` with
/// `kappa = lambda gamma - K` (alpha = 2) or `lambda (gamma - epsilon)`
/// (alpha > 2, 0 < epsilon < gamma).
pub fn absorbing_radius_autonomous(
    path: &dyn GridPath,
    constants: &TripleConstants,
    beta: f64,
    epsilon: f64,
) -> Result<AbsorbingEstimate> {
    let c = constants;
    if c.alpha == 2.0 {
        if !(c.k_coercive < c.gamma_coercive * c.lambda_embed) {
            return Err(CoreError::Config("alpha = 2 requires K < gamma * lambda".into()));
        }
        let kappa = c.lambda_embed * c.gamma_coercive - c.k_coercive;
        let c_eff = c.c_bound;
        radius_quadrature(path, beta, kappa, |_| c_eff, |_| c_eff, AbsorbingRegime::AlphaEqTwo)
    } else {
        if !(epsilon > 0.0 && epsilon < c.gamma_coercive) {
            return Err(CoreError::Config(format!(
                "alpha > 2 requires 0 < epsilon < gamma, got epsilon = {epsilon}"
            )));
        }
        let kappa = c.lambda_embed * (c.gamma_coercive - epsilon);
        let c_eff = c.c_bound
            + young_absorption_constant(c.k_coercive / c.lambda_embed, c.alpha, epsilon);
        radius_quadrature(path, beta, kappa, |_| c_eff, |_| c_eff, AbsorbingRegime::AlphaGtTwo)
    }
}

/// Nonautonomous pullback absorbing radius at fiber time `tau`:
/// `R^2 = 1 + int exp(-2 beta omega_r + kappa r) |f(r + tau)| dr`
/// (alpha = 2, kappa = c lambda - g), or the alpha > 2 variant with the
/// additive Young constant inside the integrand.
pub fn absorbing_radius_nonautonomous(
    path: &dyn GridPath,
    constants: &TripleConstants,
    beta: f64,
    epsilon: f64,
    tau: f64,
    forcing: &ScalarEnvelope,
) -> Result<AbsorbingEstimate> {
    if !forcing.is_exponentially_integrable() {
        return Err(CoreError::Config(
            "forcing envelope is not exponentially integrable".into(),
        ));
    }
    let c = constants;
    if c.alpha == 2.0 {
        if !(c.k_coercive < c.gamma_coercive * c.lambda_embed) {
            return Err(CoreError::Config("alpha = 2 requires g < c * lambda".into()));
        }
        let kappa = c.lambda_embed * c.gamma_coercive - c.k_coercive;
        let f = forcing;
        radius_quadrature(
            path,
            beta,
            kappa,
            |r| f.eval(r + tau).abs(),
            |upto| f.sup_tail(upto + tau),
            AbsorbingRegime::Nonautonomous,
        )
    } else {
        if !(epsilon > 0.0 && epsilon < c.gamma_coercive) {
            return Err(CoreError::Config(format!(
                "alpha > 2 requires 0 < epsilon < c, got epsilon = {epsilon}"
            )));
        }
        let kappa = c.lambda_embed * (c.gamma_coercive - epsilon);
        let extra = young_absorption_constant(c.k_coercive / c.lambda_embed, c.alpha, epsilon);
        let f = forcing;
        radius_quadrature(
            path,
            beta,
            kappa,
            |r| extra + f.eval(r + tau).abs(),
            |upto| extra + f.sup_tail(upto + tau),
            AbsorbingRegime::Nonautonomous,
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TemperednessEntry {
    pub eta: f64,
    /// False when eta <= 0 (temperedness requires eta > 0).
    pub valid: bool,
    pub crossed: bool,
    pub crossing_time: Option<f64>,
    pub initial: f64,
}

#[derive(Debug, Clone)]
pub struct TemperednessReport {
    pub entries: Vec<TemperednessEntry>,
    pub horizon: f64,
    pub stride: f64,
}

/// For each eta: the sequence `exp(-eta t) R^2(theta_{-t} omega)` over
/// `t = stride, 2 stride, ... <= horizon`; reports whether it decays below
/// `1e-6` of its initial value before the horizon ends.
pub fn temperedness_stat(
    radius_sq_at_shift: &dyn Fn(i64) -> Result<f64>,
    path: &TwoSidedPath,
    etas: &[f64],
    horizon: f64,
    stride: f64,
) -> Result<TemperednessReport> {
    if !(stride > 0.0) || !(horizon >= stride) {
        return Err(CoreError::Domain("temperedness needs 0 < stride <= horizon".into()));
    }
    let stride_steps = crate::grid::index_for(stride, path.step())?;
    if stride_steps <= 0 {
        return Err(CoreError::Domain("stride must be a positive number of grid steps".into()));
    }
    let n_points = (horizon / stride).floor() as i64;
    let mut radii = Vec::with_capacity(n_points as usize);
    for i in 1..=n_points {
        radii.push((i as f64 * stride, radius_sq_at_shift(-i * stride_steps)?));
    }
    let mut entries = Vec::with_capacity(etas.len());
    for &eta in etas {
        if !(eta > 0.0) {
            entries.push(TemperednessEntry {
                eta,
                valid: false,
                crossed: false,
                crossing_time: None,
                initial: f64::NAN,
            });
            continue;
        }
        let initial = (-eta * radii[0].0).exp() * radii[0].1;
        let floor = 1e-6 * initial;
        let mut crossing = None;
        for &(t, r_sq) in &radii {
            if (-eta * t).exp() * r_sq <= floor {
                crossing = Some(t);
                break;
            }
        }
        entries.push(TemperednessEntry {
            eta,
            valid: true,
            crossed: crossing.is_some(),
            crossing_time: crossing,
            initial,
        });
    }
    Ok(TemperednessReport { entries, horizon, stride })
}

/// States at a fixed fiber time obtained by evolving an initial set from
/// increasingly remote pullback times along the same noise realization.
#[derive(Debug, Clone)]
pub struct PullbackEnsemble {
    pub fiber_time: f64,
    pub pullback_times: Vec<f64>,
    pub initial_set: Vec<StateH>,
    pub fibers: Vec<Vec<StateH>>,
}

/// For each depth `T`, solve from `tau - T` to `tau` for every initial
/// point, using the same stored path (pullback = earlier start).
pub fn pullback_evolve(
    handle: &CocycleHandle,
    pullback_times: &[f64],
    initial_set: &[StateH],
    fiber_time: f64,
) -> Result<PullbackEnsemble> {
    if initial_set.is_empty() {
        return Err(CoreError::Domain("pullback needs a nonempty initial set".into()));
    }
    if pullback_times.is_empty() {
        return Err(CoreError::Domain("pullback needs at least one depth".into()));
    }
    for w in pullback_times.windows(2) {
        if w[1] <= w[0] {
            return Err(CoreError::Domain("pullback times must be strictly increasing".into()));
        }
    }
    if pullback_times[0] < 0.0 {
        return Err(CoreError::Domain("pullback times must be nonnegative".into()));
    }
    let mut fibers = Vec::with_capacity(pullback_times.len());
    for &depth in pullback_times {
        let mut fiber = Vec::with_capacity(initial_set.len());
        for (idx, x) in initial_set.iter().enumerate() {
            let state = handle.evolve(fiber_time - depth, depth, x).map_err(|e| {
                CoreError::Config(format!("pullback solve failed at depth {depth}, point {idx}: {e}"))
            })?;
            fiber.push(state);
        }
        fibers.push(fiber);
    }
    Ok(PullbackEnsemble {
        fiber_time,
        pullback_times: pullback_times.to_vec(),
        initial_set: initial_set.to_vec(),
        fibers,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    Converged,
    NotConverged(String),
}

/// Finite point cloud approximating an attractor fiber, with the
/// convergence diagnostics of the pullback sequence that produced it.
#[derive(Debug, Clone)]
pub struct AttractorEstimate {
    pub points: Vec<StateH>,
    pub diameter: f64,
    /// `dist(fiber_i, deepest fiber)` per pullback depth (last entry 0).
    pub semidist_history: Vec<f64>,
    pub verdict: ConvergenceVerdict,
    pub invariance_gap: Option<f64>,
}

/// Deepest-fiber approximation of the attractor with its semidistance
/// history. Accepted when the history is nonincreasing (within tolerance)
/// and its final nontrivial value falls below the tolerance; otherwise a
/// structured "not converged" verdict, never a crash.
pub fn attractor_estimate(
    model: &dyn Model,
    ensemble: &PullbackEnsemble,
    tolerance: f64,
) -> Result<AttractorEstimate> {
    if ensemble.fibers.len() < 2 {
        return Err(CoreError::Domain("attractor estimate needs at least 2 pullback depths".into()));
    }
    let last = ensemble.fibers.last().unwrap();
    let mut history = Vec::with_capacity(ensemble.fibers.len());
    for fiber in &ensemble.fibers {
        history.push(hausdorff_semidist(fiber, last, model)?);
    }
    let mut diameter = 0.0f64;
    for (i, p) in last.iter().enumerate() {
        for q in &last[i + 1..] {
            diameter = diameter.max(model.norm_h(&p.sub(q))?);
        }
    }
    let mut verdict = ConvergenceVerdict::Converged;
    for (i, w) in history.windows(2).enumerate() {
        if w[1] > w[0] + tolerance {
            verdict = ConvergenceVerdict::NotConverged(format!(
                "semidistance history increases at depth index {}: {} -> {}",
                i + 1,
                w[0],
                w[1]
            ));
        }
    }
    let final_value = history[history.len() - 2];
    if matches!(verdict, ConvergenceVerdict::Converged) && final_value >= tolerance {
        verdict = ConvergenceVerdict::NotConverged(format!(
            "deepest nontrivial semidistance {final_value} above tolerance {tolerance}"
        ));
    }
    Ok(AttractorEstimate {
        points: last.clone(),
        diameter,
        semidist_history: history,
        verdict,
        invariance_gap: None,
    })
}

/// Max of the two one-sided semi-distances between
/// `phi(t, omega, estimate points)` and a second estimate computed at the
/// shifted fiber `theta_t omega`.
pub fn attractor_invariance_gap(
    estimate: &AttractorEstimate,
    shifted_estimate: &AttractorEstimate,
    handle: &CocycleHandle,
    fiber_time: f64,
    t: f64,
) -> Result<f64> {
    let mut evolved = Vec::with_capacity(estimate.points.len());
    for p in &estimate.points {
        evolved.push(handle.evolve(fiber_time, t, p)?);
    }
    let fwd = hausdorff_semidist(&evolved, &shifted_estimate.points, handle.model)?;
    let bwd = hausdorff_semidist(&shifted_estimate.points, &evolved, handle.model)?;
    Ok(fwd.max(bwd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Accumulator;
    use crate::models::{LinearModel, ModelId, PmeModel};
    use crate::noise::{HurstIndex, TwoSidedPath};
    use crate::solver::Scheme;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn fbm(step: f64, n_past: usize, n_future: usize, seed: u64) -> TwoSidedPath {
        TwoSidedPath::build(HurstIndex::new(0.75).unwrap(), step, n_past, n_future, seed).unwrap()
    }

    fn zero_path(step: f64, n_past: usize, n_future: usize) -> TwoSidedPath {
        let n = n_past + n_future;
        TwoSidedPath::from_increments(HurstIndex::new(0.75).unwrap(), step, n_past, &vec![0.0; n], 0)
    }

    fn scalar(x: f64) -> StateH {
        StateH::new(ModelId::Linear, vec![x])
    }

    fn euclid(p: &StateH, q: &StateH) -> Result<f64> {
        Ok(p.coeffs
            .iter()
            .zip(&q.coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    #[test]
    fn semidist_axioms() {
        let a = vec![
            StateH::new(ModelId::Pme, vec![0.0, 0.0]),
            StateH::new(ModelId::Pme, vec![1.0, 1.0]),
        ];
        assert_eq!(hausdorff_semidist_with(&a, &a, euclid).unwrap(), 0.0);

        let p = vec![StateH::new(ModelId::Pme, vec![0.0, 0.0])];
        let q = vec![StateH::new(ModelId::Pme, vec![3.0, 4.0])];
        assert_eq!(hausdorff_semidist_with(&p, &q, euclid).unwrap(), 5.0);

        // asymmetry on the line
        let big = vec![
            StateH::new(ModelId::Pme, vec![0.0]),
            StateH::new(ModelId::Pme, vec![10.0]),
        ];
        let small = vec![StateH::new(ModelId::Pme, vec![0.0])];
        assert_eq!(hausdorff_semidist_with(&big, &small, euclid).unwrap(), 10.0);
        assert_eq!(hausdorff_semidist_with(&small, &big, euclid).unwrap(), 0.0);

        assert!(hausdorff_semidist_with(&[], &big, euclid).is_err());
        assert_eq!(hausdorff_semidist_with(&big, &[], euclid).unwrap(), f64::INFINITY);
    }

    #[test]
    fn semidist_triangle_bound_sampled() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..50 {
            let cloud = |rng: &mut ChaCha12Rng| -> Vec<StateH> {
                (0..rng.random_range(1..6usize))
                    .map(|_| {
                        StateH::new(
                            ModelId::Pme,
                            vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                        )
                    })
                    .collect()
            };
            let a = cloud(&mut rng);
            let b = cloud(&mut rng);
            let c = cloud(&mut rng);
            let ab = hausdorff_semidist_with(&a, &b, euclid).unwrap();
            let bc = hausdorff_semidist_with(&b, &c, euclid).unwrap();
            let ac = hausdorff_semidist_with(&a, &c, euclid).unwrap();
            assert!(ac <= ab + bc + 1e-12, "triangle bound broke: {ac} > {ab} + {bc}");
        }
    }

    #[test]
    fn absorbing_radius_closed_form() {
        // beta = 0, C = 1, kappa = 1: R^2 = 1 + int_{-inf}^0 e^r dr = 2.
        let step = 1.0 / 512.0;
        let p = zero_path(step, (40.0 / step) as usize, 1);
        let constants = TripleConstants::new(1.0, 2.0, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let est = absorbing_radius_autonomous(&p, &constants, 0.0, 0.0).unwrap();
        assert!((est.radius_sq - 2.0).abs() < 1e-6, "R^2 = {}", est.radius_sq);
        assert!(est.radius_sq >= 1.0);
        assert!(est.tail_bound < 0.01 * est.radius_sq);
        assert_eq!(est.regime, AbsorbingRegime::AlphaEqTwo);

        // doubling the available past changes the estimate by less than the
        // reported tail bound (positive decaying integrand)
        let p2 = zero_path(step, (80.0 / step) as usize, 1);
        let est2 = absorbing_radius_autonomous(&p2, &constants, 0.0, 0.0).unwrap();
        assert!((est2.radius_sq - est.radius_sq).abs() <= est.tail_bound);
    }

    #[test]
    fn absorbing_radius_alpha_gt_two_epsilon_checks() {
        let step = 1.0 / 64.0;
        let p = zero_path(step, (60.0 / step) as usize, 1);
        let constants = TripleConstants::new(1.0, 4.0, 2.0, 0.5, 0.3, 0.0, 0.0).unwrap();
        // epsilon outside (0, gamma) is a configuration error
        assert!(absorbing_radius_autonomous(&p, &constants, 0.0, 2.5).is_err());
        assert!(absorbing_radius_autonomous(&p, &constants, 0.0, 0.0).is_err());
        let est = absorbing_radius_autonomous(&p, &constants, 0.0, 1.0).unwrap();
        // kappa = lambda (gamma - eps) = 1; C_eff = C + Young(K/lambda):
        // q = 2, C_young = (1/2) (eps*2)^{-1} (K/lambda)^2 = 0.0625
        let c_eff = 0.3 + 0.5 * (1.0f64 / 2.0) * 0.5f64.powi(2);
        assert!((est.radius_sq - (1.0 + c_eff)).abs() < 1e-5, "R^2 = {}", est.radius_sq);
        assert_eq!(est.regime, AbsorbingRegime::AlphaGtTwo);
    }

    #[test]
    fn absorbing_radius_quadrature_refinement_on_fbm() {
        // same realization, coarse quadrature grid = every 4th sample
        let fine_step = 1.0 / 4096.0;
        let horizon = 44.0;
        let n_past = (horizon / fine_step) as usize;
        let p = fbm(fine_step, n_past, 1, 23);
        let coarse_incr: Vec<f64> = (0..n_past / 4)
            .map(|i| {
                let k0 = -(n_past as i64) + 4 * i as i64;
                p.increment(k0, k0 + 4).unwrap()
            })
            .collect();
        let coarse =
            TwoSidedPath::from_increments(p.hurst(), 4.0 * fine_step, n_past / 4, &coarse_incr, 23);
        let constants = TripleConstants::new(1.0, 2.0, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let beta = 0.3;
        let fine_est = absorbing_radius_autonomous(&p, &constants, beta, 0.0).unwrap();
        let coarse_est = absorbing_radius_autonomous(&coarse, &constants, beta, 0.0).unwrap();
        let rel = (fine_est.radius_sq - coarse_est.radius_sq).abs() / fine_est.radius_sq;
        assert!(rel < 1e-4, "quadrature refinement disagreement {rel}");
    }

    #[test]
    fn nonautonomous_radius_closed_forms() {
        let step = 1.0 / 512.0;
        let p = zero_path(step, (40.0 / step) as usize, 1);
        // f constant F, kappa = c lambda - g = 1: R^2 = 1 + F / kappa
        let constants = TripleConstants::new(1.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let f = ScalarEnvelope::Constant(0.8);
        let est =
            absorbing_radius_nonautonomous(&p, &constants, 0.0, 0.0, 3.0, &f).unwrap();
        assert!((est.radius_sq - 1.8).abs() < 1e-6, "R^2 = {}", est.radius_sq);
        assert_eq!(est.regime, AbsorbingRegime::Nonautonomous);

        // f(t) = e^{-|t|}, tau = 0: R^2 = 1 + int e^{2r} dr = 1.5
        let f2 = ScalarEnvelope::ExpAbsDecay { amplitude: 1.0, rate: 1.0 };
        let est2 =
            absorbing_radius_nonautonomous(&p, &constants, 0.0, 0.0, 0.0, &f2).unwrap();
        assert!((est2.radius_sq - 1.5).abs() < 1e-6, "R^2 = {}", est2.radius_sq);

        // non-certified forcing is rejected
        let bad = ScalarEnvelope::ExpGrowth { rate: 1.0 };
        assert!(absorbing_radius_nonautonomous(&p, &constants, 0.0, 0.0, 0.0, &bad).is_err());
    }

    #[test]
    fn temperedness_constant_radius() {
        let step = 0.25;
        let p = zero_path(step, (30.0 / step) as usize, 1);
        let radius = |_shift: i64| -> Result<f64> { Ok(4.0) };
        let report = temperedness_stat(&radius, &p, &[1.0, 2.0, 0.0], 20.0, 1.0).unwrap();
        assert!(report.entries[0].valid && report.entries[0].crossed);
        assert!(report.entries[1].valid && report.entries[1].crossed);
        assert!(!report.entries[2].valid, "eta = 0 must be flagged invalid");
        // geometric decay crosses the 1e-6 floor at t ~ 1 + 6 ln 10 / eta
        let t1 = report.entries[0].crossing_time.unwrap();
        assert!((t1 - (1.0 + 6.0 * 10f64.ln())).abs() <= 1.0, "crossing at {t1}");
    }

    #[test]
    fn pullback_depth_zero_is_identity() {
        let m = LinearModel::new(1.0, 1.0).unwrap();
        let step = 1.0 / 64.0;
        let p = fbm(step, 512, 64, 29);
        let handle = CocycleHandle::new(
            &m,
            &p,
            0.3,
            SolveConfig::new(step, Scheme::TransformImex),
            SolveRoute::Transformed,
        );
        let init = vec![scalar(1.0), scalar(-2.0)];
        let ens = pullback_evolve(&handle, &[0.0, 1.0], &init, 0.0).unwrap();
        assert_eq!(ens.fibers[0], init);
    }

    #[test]
    fn pullback_deterministic_fixed_point() {
        // beta = 0, A(u) = -a u + g: every initial point lands on g/a.
        let m = LinearModel::new(1.0, 2.0).unwrap();
        let step = 1.0 / 256.0;
        let p = zero_path(step, (32.0 / step) as usize, 1);
        let handle = CocycleHandle::new(
            &m,
            &p,
            0.0,
            SolveConfig::new(step, Scheme::TransformImex),
            SolveRoute::Transformed,
        );
        let init: Vec<StateH> = (0..5).map(|i| scalar(i as f64 - 2.0)).collect();
        let ens = pullback_evolve(&handle, &[30.0], &init, 0.0).unwrap();
        for u in &ens.fibers[0] {
            assert!((u.coeffs[0] - 2.0).abs() < 1e-6, "fiber point {}", u.coeffs[0]);
        }
    }

    #[test]
    fn pullback_noisy_linear_matches_quadrature_oracle() {
        // transformed linear fixed point: u*(omega) at time 0 equals
        // g int_{-inf}^0 exp(a r - beta omega_r) dr (z_0 = 1 at the anchor).
        let a = 1.0;
        let g = 1.0;
        let beta = 0.5;
        let m = LinearModel::new(a, g).unwrap();
        let step = 1.0 / 4096.0;
        let depth = 20.0;
        let p = fbm(step, (depth / step) as usize, 1, 31);
        let handle = CocycleHandle::new(
            &m,
            &p,
            beta,
            SolveConfig::new(step, Scheme::TransformImex),
            SolveRoute::Transformed,
        );
        let init: Vec<StateH> = (0..4).map(|i| scalar(2.0 * i as f64 - 3.0)).collect();
        let ens = pullback_evolve(&handle, &[depth], &init, 0.0).unwrap();

        // trapezoid oracle for the pullback limit
        let mut acc = Accumulator::new();
        let n = (depth / step) as i64;
        let mut prev = (a * 0.0 - beta * p.value(0).unwrap()).exp();
        for j in 1..=n {
            let r = -(j as f64) * step;
            let cur = (a * r - beta * p.value(-j).unwrap()).exp();
            acc.add(0.5 * (prev + cur) * step);
            prev = cur;
        }
        let oracle = g * acc.total();
        for u in &ens.fibers[0] {
            let err = (u.coeffs[0] - oracle).abs();
            assert!(err < 1e-3, "pullback fiber {} vs oracle {oracle} (err {err})", u.coeffs[0]);
        }
    }

    #[test]
    fn attractor_estimate_linear_singleton() {
        let m = LinearModel::new(1.0, 1.0).unwrap();
        let step = 1.0 / 1024.0;
        let p = fbm(step, (24.0 / step) as usize, 1, 37);
        let handle = CocycleHandle::new(
            &m,
            &p,
            0.5,
            SolveConfig::new(step, Scheme::TransformImex),
            SolveRoute::Transformed,
        );
        let init: Vec<StateH> = (0..6).map(|i| scalar(1.5 * i as f64 - 4.0)).collect();
        let ens = pullback_evolve(&handle, &[2.0, 5.0, 10.0, 20.0], &init, 0.0).unwrap();
        let est = attractor_estimate(&m, &ens, 1e-3).unwrap();
        assert_eq!(est.verdict, ConvergenceVerdict::Converged, "history {:?}", est.semidist_history);
        assert!(est.diameter < 1e-6, "diameter {}", est.diameter);
        for w in est.semidist_history.windows(2) {
            assert!(w[1] <= w[0], "history not monotone: {:?}", est.semidist_history);
        }
        // repeated depth gives identical fibers and zero semidistance
        let gap = hausdorff_semidist(&ens.fibers[3], &ens.fibers[3], &m).unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn cocycle_gap_explicit_is_bitwise_zero() {
        let m = LinearModel::new(1.0, 0.7).unwrap();
        let step = 1.0 / 128.0;
        let p = fbm(step, 256, 512, 41);
        let handle = CocycleHandle::new(
            &m,
            &p,
            0.4,
            SolveConfig::new(step, Scheme::DirectYoung),
            SolveRoute::Direct,
        );
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = rng.random_range(0..128i64) as f64 * step;
            let t = rng.random_range(0..128i64) as f64 * step;
            let x = scalar(rng.random_range(-2.0..2.0));
            let gap = cocycle_gap(&handle, s, t, &x).unwrap();
            assert_eq!(gap, 0.0, "explicit cocycle gap at s={s}, t={t}");
        }
    }

    #[test]
    fn cocycle_gap_implicit_within_newton_tolerance() {
        let m = PmeModel::new(3.0, 16).unwrap();
        let step = 1.0 / 128.0;
        let p = fbm(step, 128, 512, 43);
        let cfg = SolveConfig::new(step, Scheme::TransformImplicit);
        let handle = CocycleHandle::new(&m, &p, 0.3, cfg, SolveRoute::Transformed);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = rng.random_range(1..64i64) as f64 * step;
            let t = rng.random_range(1..64i64) as f64 * step;
            let x = m.sample_state(&mut rng).scaled(0.4);
            let gap = cocycle_gap(&handle, s, t, &x).unwrap();
            assert!(gap <= 10.0 * cfg.newton_tol, "implicit cocycle gap {gap}");
        }
    }

    #[test]
    fn invariance_gap_zero_shift_identical_estimates() {
        let m = LinearModel::new(1.0, 1.0).unwrap();
        let step = 1.0 / 256.0;
        let p = fbm(step, (22.0 / step) as usize, 64, 47);
        let handle = CocycleHandle::new(
            &m,
            &p,
            0.4,
            SolveConfig::new(step, Scheme::TransformImex),
            SolveRoute::Transformed,
        );
        let init: Vec<StateH> = (0..4).map(|i| scalar(i as f64 - 1.5)).collect();
        let ens = pullback_evolve(&handle, &[5.0, 10.0, 20.0], &init, 0.0).unwrap();
        let est = attractor_estimate(&m, &ens, 1e-3).unwrap();
        let gap = attractor_invariance_gap(&est, &est, &handle, 0.0, 0.0).unwrap();
        assert_eq!(gap, 0.0);
    }
}
