//! Pathwise Young calculus on the grid.
//!
//! The Young integral of `y` against a driver `x` over `[s, t]` is the
//! left-point Riemann sum over grid cells, accumulated in strictly
//! increasing time order with Neumaier compensation. Left-point sums are the
//! correct discretization in the Young regime (Hölder exponents summing
//! above one) and make the shift identity
//! `int_{t1}^{t2} Y domega = int_{t1-s}^{t2-s} Y_{.+s} d(theta_s omega)`
//! hold term by term, hence exactly in floating point.

use crate::error::{CoreError, Result};
use crate::grid::{Accumulator, GridPath, SampledPath};
use crate::noise::TwoSidedPath;

/// Overflow guard for exp(): |beta * omega| beyond this would leave the
/// double-precision range.
const EXP_ARG_LIMIT: f64 = 700.0;

fn common_step(y: &dyn GridPath, x: &dyn GridPath) -> Result<f64> {
    if y.step() != x.step() {
        return Err(CoreError::Misaligned(format!(
            "integrand step {} differs from driver step {}",
            y.step(),
            x.step()
        )));
    }
    Ok(y.step())
}

fn check_coverage(path: &dyn GridPath, k_lo: i64, k_hi: i64, what: &str) -> Result<()> {
    if k_lo < path.first_index() || k_hi > path.last_index() {
        return Err(CoreError::Range(format!(
            "{what} does not cover [{k_lo}, {k_hi}] (window [{}, {}])",
            path.first_index(),
            path.last_index()
        )));
    }
    Ok(())
}

/// Left-point Young integral of `y` against driver `x` over `[s, t]`.
pub fn young_integral(y: &dyn GridPath, x: &dyn GridPath, s: f64, t: f64) -> Result<f64> {
    let step = common_step(y, x)?;
    let k_s = crate::grid::index_for(s, step)?;
    let k_t = crate::grid::index_for(t, step)?;
    if k_t < k_s {
        return Err(CoreError::Range(format!("integration window [{s}, {t}] is reversed")));
    }
    check_coverage(y, k_s, k_t, "integrand")?;
    check_coverage(x, k_s, k_t, "driver")?;
    let mut acc = Accumulator::new();
    for k in k_s..k_t {
        acc.add(y.value(k)? * x.increment(k, k + 1)?);
    }
    Ok(acc.total())
}

/// Running prefix integrals `I(k) = int_{k0}^{k} y dx` for every grid index
/// in `[k0, k1]`, sharing the single compensated accumulator so the final
/// entry is bitwise the same as `young_integral` over the full window.
pub fn young_prefix(y: &dyn GridPath, x: &dyn GridPath, k0: i64, k1: i64) -> Result<Vec<f64>> {
    check_coverage(y, k0, k1, "integrand")?;
    check_coverage(x, k0, k1, "driver")?;
    common_step(y, x)?;
    let mut out = Vec::with_capacity((k1 - k0 + 1) as usize);
    let mut acc = Accumulator::new();
    out.push(0.0);
    for k in k0..k1 {
        acc.add(y.value(k)? * x.increment(k, k + 1)?);
        out.push(acc.total());
    }
    Ok(out)
}

/// Sewing-lemma bound `C * h_x * h_y * dt^{zeta+xi}` on the one-step Young
/// remainder, with `C = 2 / (1 - 2^{1-(zeta+xi)})`.
pub fn young_remainder_bound(h_x: f64, h_y: f64, dt: f64, zeta: f64, xi: f64) -> Result<f64> {
    let theta = zeta + xi;
    if theta <= 1.0 {
        return Err(CoreError::Domain(format!(
            "Young regime needs zeta + xi > 1, got {zeta} + {xi} = {theta}"
        )));
    }
    if dt < 0.0 {
        return Err(CoreError::Domain(format!("dt must be nonnegative, got {dt}")));
    }
    let c = 2.0 / (1.0 - 2.0f64.powf(1.0 - theta));
    Ok(c * h_x * h_y * dt.powf(theta))
}

/// The exponential transform pair `z_t = exp(-beta omega_t)` and its inverse,
/// sampled over a window.
#[derive(Debug, Clone)]
pub struct ExpCocycle {
    pub beta: f64,
    pub z: SampledPath,
    pub z_inv: SampledPath,
}

/// Pointwise exponentials of `-beta omega` and `+beta omega` over the window.
pub fn exp_transform(beta: f64, path: &dyn GridPath, window: (f64, f64)) -> Result<ExpCocycle> {
    let k_lo = path.index_of(window.0)?;
    let k_hi = path.index_of(window.1)?;
    if k_hi < k_lo {
        return Err(CoreError::Range(format!("window [{}, {}] is reversed", window.0, window.1)));
    }
    check_coverage(path, k_lo, k_hi, "path")?;
    let mut z = Vec::with_capacity((k_hi - k_lo + 1) as usize);
    let mut z_inv = Vec::with_capacity(z.capacity());
    for k in k_lo..=k_hi {
        let arg = beta * path.value(k)?;
        if arg.abs() > EXP_ARG_LIMIT {
            return Err(CoreError::Overflow { time: path.time_of(k), magnitude: arg.abs() });
        }
        z.push((-arg).exp());
        z_inv.push(arg.exp());
    }
    Ok(ExpCocycle {
        beta,
        z: SampledPath::new(k_lo, path.step(), z)?,
        z_inv: SampledPath::new(k_lo, path.step(), z_inv)?,
    })
}

/// Sup-norm residual of the transform SDE `dz = -beta z domega` over the
/// cocycle's window: `sup_t |z_t - z_{t0} + beta * int_{t0}^t z domega|`.
pub fn exp_sde_residual(cocycle: &ExpCocycle, path: &dyn GridPath) -> Result<f64> {
    let k0 = cocycle.z.first_index();
    let k1 = cocycle.z.last_index();
    let prefix = young_prefix(&cocycle.z, path, k0, k1)?;
    let z0 = cocycle.z.value(k0)?;
    let mut worst = 0.0f64;
    for (i, integral) in prefix.iter().enumerate() {
        let zt = cocycle.z.value(k0 + i as i64)?;
        let r = (zt - z0 + cocycle.beta * integral).abs();
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// A path together with its drift/diffusion decomposition
/// `X_t = X_{t0} + Lambda_t + int q domega` (drift holds the running Lambda,
/// diffusion holds the integrand q, both sampled on the same grid).
#[derive(Debug, Clone)]
pub struct DrivenPath {
    pub values: SampledPath,
    pub drift: SampledPath,
    pub diffusion: SampledPath,
}

impl DrivenPath {
    pub fn new(values: SampledPath, drift: SampledPath, diffusion: SampledPath) -> Result<Self> {
        if values.len() != drift.len()
            || values.len() != diffusion.len()
            || values.first_index() != drift.first_index()
            || values.first_index() != diffusion.first_index()
        {
            return Err(CoreError::Domain(
                "drift/diffusion decomposition does not match the sampled path".into(),
            ));
        }
        Ok(Self { values, drift, diffusion })
    }
}

/// Sup-norm residual of the Young product rule
/// `(XY)_t - (XY)_{t0} - int (X dGamma + Y dLambda) - int (Xg + Yq) domega`
/// over the common window of the decomposed paths.
pub fn product_rule_residual(
    x: &DrivenPath,
    y: &DrivenPath,
    driver: &dyn GridPath,
) -> Result<f64> {
    let k0 = x.values.first_index();
    let k1 = x.values.last_index();
    if y.values.first_index() != k0 || y.values.last_index() != k1 {
        return Err(CoreError::Domain("X and Y windows differ".into()));
    }
    check_coverage(driver, k0, k1, "driver")?;

    let xy0 = x.values.value(k0)? * y.values.value(k0)?;
    let mut acc = Accumulator::new();
    let mut worst = 0.0f64;
    for k in k0..=k1 {
        let xy = x.values.value(k)? * y.values.value(k)?;
        let r = (xy - xy0 - acc.total()).abs();
        if r > worst {
            worst = r;
        }
        if k < k1 {
            let xv = x.values.value(k)?;
            let yv = y.values.value(k)?;
            let d_gamma = y.drift.increment(k, k + 1)?;
            let d_lambda = x.drift.increment(k, k + 1)?;
            let d_omega = driver.increment(k, k + 1)?;
            acc.add(xv * d_gamma);
            acc.add(yv * d_lambda);
            acc.add((xv * y.diffusion.value(k)? + yv * x.diffusion.value(k)?) * d_omega);
        }
    }
    Ok(worst)
}

/// `|int_{t1}^{t2} Y domega - int_{t1-s}^{t2-s} Y_{.+s} d(theta_s omega)|`.
/// Zero exactly on aligned grids: both sums run the same f64 operations.
pub fn shift_integral_gap(
    y: &SampledPath,
    path: &TwoSidedPath,
    t1: f64,
    t2: f64,
    s: f64,
) -> Result<f64> {
    let shift_steps = crate::grid::index_for(s, path.step())?;
    let direct = young_integral(y, path, t1, t2)?;
    let view = path.shift(shift_steps);
    let y_shifted = y.reindexed(y.first_index() - shift_steps);
    let shifted = young_integral(&y_shifted, &view, t1 - s, t2 - s)?;
    Ok((direct - shifted).abs())
}
