//! Scalar test model `A(u) = -a u + g` with `H = V = R`.
//!
//! Satisfies the triple conditions with `alpha = 2`, `gamma = a`, `K = 0`,
//! `C = g^2 / a` (complete the square in `2(-au + g)u`). Every quantity has
//! a closed form, which makes this the oracle model for the solver and
//! attractor layers.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoreError, Result};
use crate::models::{Model, ModelId, StateH, TripleConstants};

#[derive(Debug, Clone)]
pub struct LinearModel {
    a: f64,
    g: f64,
    constants: TripleConstants,
    growth_c: f64,
}

impl LinearModel {
    pub fn new(a: f64, g: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(CoreError::Domain(format!("decay rate must be positive, got {a}")));
        }
        let constants = TripleConstants::new(1.0, 2.0, a, 0.0, g * g / a, 0.0, 0.0)?;
        // (g - a u)^2 <= 2 max(a^2, g^2) (1 + u^2); the growth denominator
        // carries another factor (1 + |u|^0) = 2.
        let growth_c = a.max(g.abs()).powi(2).max(1e-12);
        Ok(Self { a, g, constants, growth_c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    fn scalar(u: &StateH) -> f64 {
        u.coeffs[0]
    }
}

impl Model for LinearModel {
    fn id(&self) -> ModelId {
        ModelId::Linear
    }

    fn name(&self) -> &'static str {
        "linear"
    }

    fn dim(&self) -> usize {
        1
    }

    fn constants(&self) -> &TripleConstants {
        &self.constants
    }

    fn is_autonomous(&self) -> bool {
        true
    }

    fn apply(&self, _t: f64, u: &StateH) -> Result<StateH> {
        Ok(StateH::new(ModelId::Linear, vec![-self.a * Self::scalar(u) + self.g]))
    }

    fn inner_h(&self, u: &StateH, v: &StateH) -> Result<f64> {
        Ok(Self::scalar(u) * Self::scalar(v))
    }

    fn norm_v(&self, u: &StateH) -> Result<f64> {
        Ok(Self::scalar(u).abs())
    }

    fn dual_norm(&self, f: &StateH) -> Result<f64> {
        Ok(Self::scalar(f).abs())
    }

    fn eta(&self, _v: &StateH) -> Result<f64> {
        Ok(0.0)
    }

    fn rho(&self, _v: &StateH) -> Result<f64> {
        Ok(0.0)
    }

    fn forcing_f(&self, _t: f64) -> f64 {
        self.constants.c_bound
    }

    fn monotonicity_constant(&self) -> f64 {
        0.0
    }

    fn growth_constant(&self) -> f64 {
        self.growth_c
    }

    fn uniqueness_constants(&self) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> StateH {
        let x: f64 = StandardNormal.sample(&mut *rng);
        StateH::new(ModelId::Linear, vec![x])
    }

    fn transformed_imex_step(
        &self,
        _t_n: f64,
        u: &StateH,
        dt: f64,
        z_n: f64,
        _z_np1: f64,
    ) -> Result<StateH> {
        // Stiff part -a u implicit, forcing z g explicit.
        let v = (Self::scalar(u) + dt * z_n * self.g) / (1.0 + self.a * dt);
        Ok(StateH::new(ModelId::Linear, vec![v]))
    }

    fn transformed_newton_step(
        &self,
        _t_np1: f64,
        u_prev: &StateH,
        dt: f64,
        z_np1: f64,
        _tol: f64,
        _max_iter: usize,
        _step_index: usize,
    ) -> Result<StateH> {
        // Backward Euler has a closed form for the affine operator.
        let v = (Self::scalar(u_prev) + dt * z_np1 * self.g) / (1.0 + self.a * dt);
        Ok(StateH::new(ModelId::Linear, vec![v]))
    }
}
