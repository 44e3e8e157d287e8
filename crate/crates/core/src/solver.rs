//! Pathwise time integration of `du = A(t,u) dt + beta u domega`.
//!
//! Two routes:
//! - the direct Young-Euler discretization
//!   `u_{n+1} = u_n + dt A(t_n, u_n) + beta u_n (omega_{n+1} - omega_n)`;
//! - the transform route on `d u~ = z_t A(t, z_t^{-1} u~) dt` with
//!   `z_t = exp(-beta omega_t)` and initial data `u~(t0) = z_{t0} u(t0)`,
//!   mapped back by `u = z^{-1} u~`.
//!
//! Both are deterministic replays: fixed step sequences, no hidden state.
//! Every accepted step logs the pointwise coercivity slack; a violation
//! beyond 1e-8 relative aborts the run.

use crate::error::{CoreError, Result};
use crate::grid::GridPath;
use crate::models::{Model, StateH};
use crate::noise::{holder_seminorm, HolderEstimate};

const BLOWUP_NORM: f64 = 1e12;
const ENERGY_REL_TOL: f64 = 1e-8;
const EXP_ARG_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Explicit Euler (on the original equation for the direct route, on the
    /// transformed equation for the transform route).
    DirectYoung,
    /// Stiff linear part implicit, the rest explicit.
    TransformImex,
    /// Backward Euler with damped Newton.
    TransformImplicit,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    /// Time step; must equal the noise step or an integer refinement of it.
    pub dt: f64,
    pub scheme: Scheme,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl SolveConfig {
    pub fn new(dt: f64, scheme: Scheme) -> Self {
        Self { dt, scheme, newton_tol: 1e-12, newton_max_iter: 50 }
    }
}

/// Time-indexed H-states with per-step norm diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<StateH>,
    pub norm_h: Vec<f64>,
    pub norm_v: Vec<f64>,
    /// Left-Riemann accumulation of `int |u|_V^alpha`.
    pub v_alpha_accum: Vec<f64>,
    /// Most negative pointwise coercivity slack seen along the run.
    pub energy_slack_min: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn final_state(&self) -> &StateH {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        self.time(self.states.len() - 1)
    }
}

/// Noise values on the refined solver grid over `[t0, t1]`. When `dt`
/// subdivides the noise step, intermediate values interpolate the increment
/// linearly — a scheme choice, not a claim about the law of the noise.
/// Values at noise nodes are the node samples bit for bit, so windows that
/// meet at noise nodes compose exactly.
pub fn resample_noise(path: &dyn GridPath, t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    let step = path.step();
    let k0 = path.index_of(t0)?;
    let k1 = path.index_of(t1)?;
    if k1 <= k0 {
        return Err(CoreError::Range(format!("solve window [{t0}, {t1}] is empty or reversed")));
    }
    if !(dt > 0.0) {
        return Err(CoreError::Domain(format!("dt must be positive, got {dt}")));
    }
    let ratio = step / dt;
    let m = ratio.round();
    if (ratio - m).abs() > 1e-9 || m < 1.0 {
        return Err(CoreError::Misaligned(format!(
            "dt = {dt} must divide the noise step {step} (ratio {ratio})"
        )));
    }
    let m = m as i64;
    let n_sub = ((k1 - k0) * m) as usize;
    let mut omega = Vec::with_capacity(n_sub + 1);
    for q in k0..k1 {
        let base = path.value(q)?;
        let incr = path.increment(q, q + 1)?;
        omega.push(base);
        for r in 1..m {
            omega.push(base + (r as f64 / m as f64) * incr);
        }
    }
    omega.push(path.value(k1)?);
    Ok(omega)
}

/// Pointwise coercivity slack at `(t, u)` with the model's stored constants;
/// this is the discrete reading of the energy inequality along the run.
fn coercivity_slack(model: &dyn Model, t: f64, u: &StateH, a_u: &StateH) -> Result<(f64, f64)> {
    let c = model.constants();
    let lhs = 2.0 * model.pairing(a_u, u)?;
    let coercive = c.gamma_coercive * model.norm_v(u)?.powf(c.alpha);
    let lower = c.k_coercive * model.inner_h(u, u)? + model.forcing_f(t);
    let slack = -coercive + lower - lhs;
    let scale = 1.0 + coercive.abs() + lower.abs() + lhs.abs();
    Ok((slack, scale))
}

struct Diagnostics {
    norm_h: Vec<f64>,
    norm_v: Vec<f64>,
    v_alpha_accum: Vec<f64>,
    slack_min: f64,
}

impl Diagnostics {
    fn new() -> Self {
        Self { norm_h: Vec::new(), norm_v: Vec::new(), v_alpha_accum: Vec::new(), slack_min: f64::INFINITY }
    }

    fn push(&mut self, model: &dyn Model, dt: f64, alpha: f64, u: &StateH, t: f64) -> Result<()> {
        let nh = model.norm_h(u)?;
        if !nh.is_finite() || nh > BLOWUP_NORM {
            return Err(CoreError::BlowUp { time: t, norm: nh });
        }
        let nv = model.norm_v(u)?;
        let prev = self.v_alpha_accum.last().copied().unwrap_or(0.0);
        let prev_nv = self.norm_v.last().copied();
        self.norm_h.push(nh);
        self.norm_v.push(nv);
        match prev_nv {
            Some(last) => self.v_alpha_accum.push(prev + dt * last.powf(alpha)),
            None => self.v_alpha_accum.push(0.0),
        }
        Ok(())
    }
}

/// Explicit Young-Euler stepping on the original equation.
pub fn solve_direct_young(
    model: &dyn Model,
    path: &dyn GridPath,
    beta: f64,
    u0: &StateH,
    window: (f64, f64),
    cfg: &SolveConfig,
) -> Result<Trajectory> {
    if !u0.is_finite() {
        return Err(CoreError::Domain("initial state has non-finite entries".into()));
    }
    let omega = resample_noise(path, window.0, window.1, cfg.dt)?;
    let n_steps = omega.len() - 1;
    let alpha = model.constants().alpha;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut diag = Diagnostics::new();
    let mut u = u0.clone();
    diag.push(model, cfg.dt, alpha, &u, window.0)?;
    states.push(u.clone());
    for j in 0..n_steps {
        let t = window.0 + j as f64 * cfg.dt;
        let a_u = model.apply(t, &u)?;
        let (slack, scale) = coercivity_slack(model, t, &u, &a_u)?;
        if slack < -ENERGY_REL_TOL * scale {
            return Err(CoreError::EnergyViolation { time: t, slack: slack / scale });
        }
        diag.slack_min = diag.slack_min.min(slack);
        let noise_factor = beta * (omega[j + 1] - omega[j]);
        let coeffs: Vec<f64> = u
            .coeffs
            .iter()
            .zip(&a_u.coeffs)
            .map(|(ui, ai)| ui + cfg.dt * ai + noise_factor * ui)
            .collect();
        u = StateH::new(u.model, coeffs);
        diag.push(model, cfg.dt, alpha, &u, t + cfg.dt)?;
        states.push(u.clone());
    }
    Ok(Trajectory {
        t0: window.0,
        dt: cfg.dt,
        states,
        norm_h: diag.norm_h,
        norm_v: diag.norm_v,
        v_alpha_accum: diag.v_alpha_accum,
        energy_slack_min: diag.slack_min,
    })
}

fn z_values(beta: f64, omega: &[f64], t0: f64, dt: f64) -> Result<Vec<f64>> {
    omega
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let arg = beta * w;
            if arg.abs() > EXP_ARG_LIMIT {
                Err(CoreError::Overflow { time: t0 + j as f64 * dt, magnitude: arg.abs() })
            } else {
                Ok((-arg).exp())
            }
        })
        .collect()
}

/// Transform-route integration: step `d u~ = z A(t, z^{-1} u~) dt` with the
/// configured scheme, return `u = z^{-1} u~`.
pub fn solve_transformed(
    model: &dyn Model,
    path: &dyn GridPath,
    beta: f64,
    u0: &StateH,
    window: (f64, f64),
    cfg: &SolveConfig,
) -> Result<Trajectory> {
    if !u0.is_finite() {
        return Err(CoreError::Domain("initial state has non-finite entries".into()));
    }
    let omega = resample_noise(path, window.0, window.1, cfg.dt)?;
    let z = z_values(beta, &omega, window.0, cfg.dt)?;
    let n_steps = omega.len() - 1;
    let alpha = model.constants().alpha;

    let mut u_tilde = u0.scaled(z[0]);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut diag = Diagnostics::new();
    let mut u = u_tilde.scaled(1.0 / z[0]);
    diag.push(model, cfg.dt, alpha, &u, window.0)?;
    states.push(u.clone());

    for j in 0..n_steps {
        let t = window.0 + j as f64 * cfg.dt;
        // pointwise coercivity check at the untransformed state
        let a_u = model.apply(t, &u)?;
        let (slack, scale) = coercivity_slack(model, t, &u, &a_u)?;
        if slack < -ENERGY_REL_TOL * scale {
            return Err(CoreError::EnergyViolation { time: t, slack: slack / scale });
        }
        diag.slack_min = diag.slack_min.min(slack);

        u_tilde = match cfg.scheme {
            Scheme::DirectYoung => {
                // explicit Euler on the transformed equation
                let rhs = model.apply(t, &u_tilde.scaled(1.0 / z[j]))?;
                let coeffs: Vec<f64> = u_tilde
                    .coeffs
                    .iter()
                    .zip(&rhs.coeffs)
                    .map(|(ui, ai)| ui + cfg.dt * (z[j] * ai))
                    .collect();
                StateH::new(u_tilde.model, coeffs)
            }
            Scheme::TransformImex => {
                model.transformed_imex_step(t, &u_tilde, cfg.dt, z[j], z[j + 1])?
            }
            Scheme::TransformImplicit => model.transformed_newton_step(
                t + cfg.dt,
                &u_tilde,
                cfg.dt,
                z[j + 1],
                cfg.newton_tol,
                cfg.newton_max_iter,
                j,
            )?,
        };
        if !u_tilde.is_finite() {
            return Err(CoreError::BlowUp { time: t + cfg.dt, norm: f64::INFINITY });
        }
        u = u_tilde.scaled(1.0 / z[j + 1]);
        diag.push(model, cfg.dt, alpha, &u, t + cfg.dt)?;
        states.push(u.clone());
    }
    Ok(Trajectory {
        t0: window.0,
        dt: cfg.dt,
        states,
        norm_h: diag.norm_h,
        norm_v: diag.norm_v,
        v_alpha_accum: diag.v_alpha_accum,
        energy_slack_min: diag.slack_min,
    })
}

/// Sup over grid times of `|u_direct - u_transform|_H` on identical inputs.
/// By the equivalence of the two formulations this gap is pure
/// discretization error and must vanish under refinement.
pub fn equivalence_gap(
    model: &dyn Model,
    path: &dyn GridPath,
    beta: f64,
    u0: &StateH,
    window: (f64, f64),
    cfg: &SolveConfig,
) -> Result<f64> {
    let direct = solve_direct_young(model, path, beta, u0, window, cfg)?;
    let transformed = solve_transformed(model, path, beta, u0, window, cfg)?;
    let mut gap = 0.0f64;
    for (a, b) in direct.states.iter().zip(&transformed.states) {
        gap = gap.max(model.norm_h(&a.sub(b))?);
    }
    Ok(gap)
}

/// Both sides of the pathwise Gronwall bound for two initial conditions:
/// `lhs(t) = |u~1(t) - u~2(t)|_H^2` and
/// `rhs(t) = exp[int_0^t (C + rho(u1) + eta(u2)) ds] * lhs(0)`.
#[derive(Debug, Clone)]
pub struct GronwallCheck {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl GronwallCheck {
    /// True when `lhs <= rhs * (1 + tol)` at every grid time.
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs.iter().zip(&self.rhs).all(|(l, r)| *l <= r * (1.0 + tol))
    }
}

pub fn continuous_dependence_gap(
    model: &dyn Model,
    path: &dyn GridPath,
    beta: f64,
    u0a: &StateH,
    u0b: &StateH,
    window: (f64, f64),
    cfg: &SolveConfig,
) -> Result<GronwallCheck> {
    let traj_a = solve_transformed(model, path, beta, u0a, window, cfg)?;
    let traj_b = solve_transformed(model, path, beta, u0b, window, cfg)?;
    let omega = resample_noise(path, window.0, window.1, cfg.dt)?;
    let z = z_values(beta, &omega, window.0, cfg.dt)?;
    let c_model = model.monotonicity_constant();

    let n = traj_a.states.len();
    let mut times = Vec::with_capacity(n);
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    let mut exponent = 0.0f64;
    let mut lhs0 = 0.0;
    for j in 0..n {
        let t = traj_a.time(j);
        let ut_a = traj_a.states[j].scaled(z[j]);
        let ut_b = traj_b.states[j].scaled(z[j]);
        let diff = ut_a.sub(&ut_b);
        let l = model.inner_h(&diff, &diff)?;
        if j == 0 {
            lhs0 = l;
        }
        times.push(t);
        lhs.push(l);
        rhs.push(exponent.exp() * lhs0);
        // left-Riemann accumulation of the Gronwall integrand
        let integrand =
            c_model + model.rho(&traj_a.states[j])? + model.eta(&traj_b.states[j])?;
        exponent += cfg.dt * integrand;
    }
    Ok(GronwallCheck { times, lhs, rhs })
}

/// Hölder seminorm of `t -> <u(t), v>_H` along a trajectory.
pub fn pairing_holder_estimate(
    model: &dyn Model,
    traj: &Trajectory,
    v: &StateH,
    exponent: f64,
) -> Result<HolderEstimate> {
    if traj.is_empty() {
        return Err(CoreError::Domain("empty trajectory".into()));
    }
    let start_index = crate::grid::index_for(traj.t0, traj.dt)?;
    let mut values = Vec::with_capacity(traj.len());
    for u in &traj.states {
        values.push(model.inner_h(u, v)?);
    }
    let pairing_path = crate::grid::SampledPath::new(start_index, traj.dt, values)?;
    holder_seminorm(&pairing_path, exponent, (traj.t0, traj.final_time()))
}
