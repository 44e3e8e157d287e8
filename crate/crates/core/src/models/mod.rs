//! Discretized Gelfand-triple models and runtime checkers for the locally
//! monotone operator conditions.
//!
//! A model realizes the triple `V ⊆ H ⊆ V*` in finite dimensions: it owns
//! the H inner product, the V norm, an explicit dual norm, the operator
//! `A(t, ·)` in dual coordinates, and the locally bounded functions `eta`,
//! `rho`. The coercivity/growth/monotonicity checkers below turn the
//! structural inequalities into sampled slack statistics: nonnegative slack
//! means the condition holds on the sample with the stored constants.
//!
//! Three concrete models are provided:
//! - [`LinearModel`] — scalar `A(u) = -a u + g`, the analytic workhorse;
//! - [`PmeModel`] — porous medium operator on a 1-D Dirichlet grid with
//!   `H = W^{-1,2}` realized through the inverse discrete Laplacian;
//! - [`NseModel`] — 2-D incompressible Navier-Stokes on the periodic torus,
//!   pseudo-spectral with exact 2/3-rule dealiasing.

mod forcing;
mod linear;
mod nse;
mod pme;

pub use forcing::{CertificateReport, ScalarEnvelope};
pub use linear::LinearModel;
pub use nse::{NseForcing, NseModel};
pub use pme::PmeModel;

use rand::RngCore;

use crate::error::{CoreError, Result};

/// Identifies which model a coefficient vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    Linear,
    Pme,
    Nse,
}

/// Coordinates of a state in the model's discrete H basis. Dual-space
/// representatives (outputs of `apply`) reuse the same container.
#[derive(Debug, Clone, PartialEq)]
pub struct StateH {
    pub model: ModelId,
    pub coeffs: Vec<f64>,
}

impl StateH {
    pub fn new(model: ModelId, coeffs: Vec<f64>) -> Self {
        Self { model, coeffs }
    }

    pub fn zeros(model: ModelId, dim: usize) -> Self {
        Self { model, coeffs: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, s: f64) -> StateH {
        StateH { model: self.model, coeffs: self.coeffs.iter().map(|c| s * c).collect() }
    }

    /// self + a * other, elementwise.
    pub fn add_scaled(&self, a: f64, other: &StateH) -> StateH {
        debug_assert_eq!(self.model, other.model);
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        StateH {
            model: self.model,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &StateH) -> StateH {
        self.add_scaled(-1.0, other)
    }
}

/// The constants of the Gelfand-triple conditions:
/// `lambda_embed` with `lambda |v|_H^2 <= |v|_V^2`, the coercivity exponent
/// `alpha`, the coercivity constants (`gamma`, `K`, `C` — or `c`, `g` and the
/// forcing amplitude in the nonautonomous reading), the growth exponent
/// `varpi` and the uniqueness exponent `vartheta`.
#[derive(Debug, Clone, Copy)]
pub struct TripleConstants {
    pub lambda_embed: f64,
    pub alpha: f64,
    pub gamma_coercive: f64,
    pub k_coercive: f64,
    pub c_bound: f64,
    pub varpi: f64,
    pub vartheta: f64,
}

impl TripleConstants {
    pub fn new(
        lambda_embed: f64,
        alpha: f64,
        gamma_coercive: f64,
        k_coercive: f64,
        c_bound: f64,
        varpi: f64,
        vartheta: f64,
    ) -> Result<Self> {
        if !(lambda_embed > 0.0) {
            return Err(CoreError::Domain(format!("lambda must be positive, got {lambda_embed}")));
        }
        if !(alpha >= 2.0) {
            return Err(CoreError::Domain(format!("alpha must be >= 2, got {alpha}")));
        }
        if !(gamma_coercive > 0.0) {
            return Err(CoreError::Domain(format!(
                "coercivity constant must be positive, got {gamma_coercive}"
            )));
        }
        if k_coercive < 0.0 || c_bound < 0.0 || varpi < 0.0 || vartheta < 0.0 {
            return Err(CoreError::Domain("K, C, varpi, vartheta must be nonnegative".into()));
        }
        if alpha == 2.0 && !(k_coercive < gamma_coercive * lambda_embed) {
            return Err(CoreError::Domain(format!(
                "alpha = 2 requires K < gamma * lambda ({k_coercive} >= {})",
                gamma_coercive * lambda_embed
            )));
        }
        Ok(Self { lambda_embed, alpha, gamma_coercive, k_coercive, c_bound, varpi, vartheta })
    }
}

/// A discretized locally monotone model over a Gelfand triple.
pub trait Model: Send + Sync {
    fn id(&self) -> ModelId;
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn constants(&self) -> &TripleConstants;
    fn is_autonomous(&self) -> bool;

    /// `A(t, u)` as a dual-space representative in the model's coordinates.
    fn apply(&self, t: f64, u: &StateH) -> Result<StateH>;

    fn inner_h(&self, u: &StateH, v: &StateH) -> Result<f64>;

    fn norm_h(&self, u: &StateH) -> Result<f64> {
        Ok(self.inner_h(u, u)?.max(0.0).sqrt())
    }

    fn norm_v(&self, u: &StateH) -> Result<f64>;

    /// Dualization `⟨F, v⟩` between V* and V representatives. In these
    /// finite-dimensional realizations it coincides with the H pairing.
    fn pairing(&self, f: &StateH, v: &StateH) -> Result<f64> {
        self.inner_h(f, v)
    }

    /// `|F|_{V*}` through the model's explicit Riesz-type map.
    fn dual_norm(&self, f: &StateH) -> Result<f64>;

    fn eta(&self, v: &StateH) -> Result<f64>;
    fn rho(&self, v: &StateH) -> Result<f64>;

    /// The scalar `f(t)` of the nonautonomous coercivity condition;
    /// autonomous models return the constant `C`.
    fn forcing_f(&self, t: f64) -> f64;

    /// Stored constant in front of `|v1 - v2|_H^2` in local monotonicity.
    fn monotonicity_constant(&self) -> f64;

    /// Stored constant of the growth condition.
    fn growth_constant(&self) -> f64;

    /// Stored `(C, vartheta)` of the uniqueness condition on `eta + rho`.
    fn uniqueness_constants(&self) -> (f64, f64);

    /// Random H-state with spectral decay exponent 2 in the model's basis.
    fn sample_state(&self, rng: &mut dyn RngCore) -> StateH;

    /// One step of the semi-implicit scheme on the transformed equation
    /// `du/dt = z_t A(t, z_t^{-1} u)`: stiff linear part implicit, the rest
    /// explicit at `(t_n, z_n)`.
    fn transformed_imex_step(
        &self,
        t_n: f64,
        u: &StateH,
        dt: f64,
        z_n: f64,
        z_np1: f64,
    ) -> Result<StateH>;

    /// One backward-Euler step on the transformed equation solved by damped
    /// Newton. Models without a Newton-capable Jacobian reject the scheme.
    fn transformed_newton_step(
        &self,
        _t_np1: f64,
        _u_prev: &StateH,
        _dt: f64,
        _z_np1: f64,
        _tol: f64,
        _max_iter: usize,
        step_index: usize,
    ) -> Result<StateH> {
        let _ = step_index;
        Err(CoreError::Config(format!(
            "{} does not support the fully implicit transformed scheme",
            self.name()
        )))
    }
}

/// Model-specific `(eta, rho)` at a state.
pub fn eta_rho_eval(model: &dyn Model, v: &StateH) -> Result<(f64, f64)> {
    Ok((model.eta(v)?, model.rho(v)?))
}

/// Worst coercivity slack over the sample:
/// `min_v [ -gamma |v|_V^alpha + K |v|_H^2 + f(t) - 2 <A(t,v), v> ]`.
/// Nonnegative means (A3)/(A3') holds on the sample.
pub fn check_coercivity(model: &dyn Model, t: f64, samples: &[StateH]) -> Result<f64> {
    if samples.is_empty() {
        return Err(CoreError::Domain("coercivity check needs a nonempty sample".into()));
    }
    let c = model.constants();
    let mut worst = f64::INFINITY;
    for v in samples {
        let a_v = model.apply(t, v)?;
        let lhs = 2.0 * model.pairing(&a_v, v)?;
        let rhs = -c.gamma_coercive * model.norm_v(v)?.powf(c.alpha)
            + c.k_coercive * model.inner_h(v, v)?
            + model.forcing_f(t);
        worst = worst.min(rhs - lhs);
    }
    Ok(worst)
}

/// Worst growth ratio over the sample:
/// `max_v |A(t,v)|_{V*}^{alpha/(alpha-1)} / [C (f(t) or 1 + |v|_V^alpha)(1 + |v|_H^varpi)]`.
/// At most one means (A4)/(A4') holds with the stored constant.
pub fn check_growth(model: &dyn Model, t: f64, samples: &[StateH]) -> Result<f64> {
    if samples.is_empty() {
        return Err(CoreError::Domain("growth check needs a nonempty sample".into()));
    }
    let c = model.constants();
    let cap = model.growth_constant();
    let mut worst = 0.0f64;
    for v in samples {
        let a_v = model.apply(t, v)?;
        let num = model.dual_norm(&a_v)?.powf(c.alpha / (c.alpha - 1.0));
        let v_part =
            if model.is_autonomous() { 1.0 } else { model.forcing_f(t) } + model.norm_v(v)?.powf(c.alpha);
        let denom = cap * v_part * (1.0 + model.norm_h(v)?.powf(c.varpi));
        let ratio = if denom == 0.0 {
            if num <= 1e-300 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            num / denom
        };
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// Worst local-monotonicity slack over the sampled pairs:
/// `min [(f + eta(v1) + rho(v2)) |v1-v2|_H^2 - 2 <A(t,v1)-A(t,v2), v1-v2>]`
/// with the model's stored monotonicity constant as `f`.
pub fn check_local_monotonicity(
    model: &dyn Model,
    t: f64,
    pairs: &[(StateH, StateH)],
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(CoreError::Domain("monotonicity check needs a nonempty sample".into()));
    }
    let f_const = model.monotonicity_constant();
    let mut worst = f64::INFINITY;
    for (v1, v2) in pairs {
        let w = v1.sub(v2);
        let d_a = model.apply(t, v1)?.sub(&model.apply(t, v2)?);
        let lhs = 2.0 * model.pairing(&d_a, &w)?;
        let rhs = (f_const + model.eta(v1)? + model.rho(v2)?) * model.inner_h(&w, &w)?;
        worst = worst.min(rhs - lhs);
    }
    Ok(worst)
}

/// Hemicontinuity slack: for sampled triples `(v1, v2, v)` the map
/// `s -> <A(t, v1 + s v2), v>` is probed at a small offset; the normalized
/// deviation must fall below a fixed margin. Nonnegative slack means no
/// jump was detected at the probe scale.
pub fn check_hemicontinuity(
    model: &dyn Model,
    t: f64,
    triples: &[(StateH, StateH, StateH)],
) -> Result<f64> {
    if triples.is_empty() {
        return Err(CoreError::Domain("hemicontinuity check needs a nonempty sample".into()));
    }
    const PROBE: f64 = 1e-8;
    const MARGIN: f64 = 1e-3;
    let mut worst = f64::INFINITY;
    for (v1, v2, v) in triples {
        let p0 = model.pairing(&model.apply(t, v1)?, v)?;
        let shifted = v1.add_scaled(PROBE, v2);
        let p1 = model.pairing(&model.apply(t, &shifted)?, v)?;
        let deviation = (p1 - p0).abs() / (1.0 + p0.abs());
        worst = worst.min(MARGIN - deviation);
    }
    Ok(worst)
}

/// Worst slack of the embedding `lambda |v|_H^2 <= |v|_V^2` over the sample.
pub fn check_embedding(model: &dyn Model, samples: &[StateH]) -> Result<f64> {
    if samples.is_empty() {
        return Err(CoreError::Domain("embedding check needs a nonempty sample".into()));
    }
    let lambda = model.constants().lambda_embed;
    let mut worst = f64::INFINITY;
    for v in samples {
        let slack = model.norm_v(v)?.powi(2) - lambda * model.inner_h(v, v)?;
        worst = worst.min(slack);
    }
    Ok(worst)
}

/// Worst slack of the uniqueness condition
/// `eta(v) + rho(v) <= C (1 + |v|_V^alpha)(1 + |v|_H^vartheta)`.
pub fn check_uniqueness_condition(model: &dyn Model, samples: &[StateH]) -> Result<f64> {
    if samples.is_empty() {
        return Err(CoreError::Domain("uniqueness check needs a nonempty sample".into()));
    }
    let alpha = model.constants().alpha;
    let (c, vartheta) = model.uniqueness_constants();
    let mut worst = f64::INFINITY;
    for v in samples {
        let lhs = model.eta(v)? + model.rho(v)?;
        let rhs = c
            * (1.0 + model.norm_v(v)?.powf(alpha))
            * (1.0 + model.norm_h(v)?.powf(vartheta));
        worst = worst.min(rhs - lhs);
    }
    Ok(worst)
}

/// Sample `count` states with a fixed seed.
pub fn sample_states(model: &dyn Model, count: usize, seed: u64) -> Vec<StateH> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    (0..count).map(|_| model.sample_state(&mut rng)).collect()
}

/// Sample `count` state pairs with a fixed seed.
pub fn sample_pairs(model: &dyn Model, count: usize, seed: u64) -> Vec<(StateH, StateH)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (model.sample_state(&mut rng), model.sample_state(&mut rng)))
        .collect()
}
