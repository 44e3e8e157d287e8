//! Uniform-grid paths and the conventions that keep shift and replay
//! identities bit-exact.
//!
//! All times are integer multiples of a common `step`; a path value at grid
//! index `k` lives at time `k * step`. Increments are part of the trait so
//! that a shifted view can delegate to the increments of its base path: the
//! Riemann sums of a shifted integral then consist of exactly the same f64
//! operations as the unshifted one.

use crate::error::{CoreError, Result};

/// Relative slack tolerated when converting a time to a grid index.
const ALIGN_TOL: f64 = 1e-9;

/// A real-valued path sampled on a uniform grid.
pub trait GridPath {
    /// Grid spacing in time units.
    fn step(&self) -> f64;
    /// First valid grid index (inclusive).
    fn first_index(&self) -> i64;
    /// Last valid grid index (inclusive).
    fn last_index(&self) -> i64;
    /// Value at grid index `k` (time `k * step`).
    fn value(&self, k: i64) -> Result<f64>;

    /// Increment over `[k1, k2]`. Shifted views override this so the
    /// subtraction happens on base-path samples, never on re-anchored values.
    fn increment(&self, k1: i64, k2: i64) -> Result<f64> {
        Ok(self.value(k2)? - self.value(k1)?)
    }

    /// Convert a time to its grid index, rejecting misaligned times.
    fn index_of(&self, t: f64) -> Result<i64> {
        index_for(t, self.step())
    }

    fn time_of(&self, k: i64) -> f64 {
        k as f64 * self.step()
    }

    fn contains(&self, k: i64) -> bool {
        k >= self.first_index() && k <= self.last_index()
    }
}

/// Convert `t` to the nearest integer multiple of `step`, erroring when the
/// remainder exceeds `ALIGN_TOL` relative to the step.
pub fn index_for(t: f64, step: f64) -> Result<i64> {
    if !(step > 0.0) {
        return Err(CoreError::Domain(format!("step must be positive, got {step}")));
    }
    let raw = t / step;
    let k = raw.round();
    if (raw - k).abs() > ALIGN_TOL {
        return Err(CoreError::Misaligned(format!(
            "time {t} is not a multiple of step {step} (offset {} steps)",
            raw - k
        )));
    }
    Ok(k as i64)
}

/// A scalar path stored as contiguous samples starting at grid index `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    start: i64,
    step: f64,
    values: Vec<f64>,
}

impl SampledPath {
    pub fn new(start: i64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(CoreError::Domain(format!("step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(CoreError::Domain("sampled path needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(CoreError::Domain(format!("non-finite sample {bad}")));
        }
        Ok(Self { start, step, values })
    }

    /// Sample a closure over grid indices `start..=end`.
    pub fn from_fn(start: i64, end: i64, step: f64, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        if end < start {
            return Err(CoreError::Domain(format!("empty index range {start}..={end}")));
        }
        let values = (start..=end).map(|k| f(k as f64 * step)).collect();
        Self::new(start, step, values)
    }

    /// Copy another grid path over `[k_lo, k_hi]`.
    pub fn from_path(path: &dyn GridPath, k_lo: i64, k_hi: i64) -> Result<Self> {
        if k_hi < k_lo {
            return Err(CoreError::Domain(format!("empty index range {k_lo}..={k_hi}")));
        }
        let mut values = Vec::with_capacity((k_hi - k_lo + 1) as usize);
        for k in k_lo..=k_hi {
            values.push(path.value(k)?);
        }
        Self::new(k_lo, path.step(), values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same samples, re-anchored to start at `start` instead.
    pub fn reindexed(&self, start: i64) -> Self {
        Self { start, step: self.step, values: self.values.clone() }
    }

    /// Pointwise linear combination `a * self + b * other` on the common window.
    pub fn linear_combination(&self, a: f64, other: &SampledPath, b: f64) -> Result<SampledPath> {
        if self.step != other.step {
            return Err(CoreError::Misaligned("step mismatch in linear combination".into()));
        }
        let lo = self.start.max(other.start);
        let hi = self.last_index().min(other.last_index());
        if hi < lo {
            return Err(CoreError::Range("paths share no common window".into()));
        }
        let mut values = Vec::with_capacity((hi - lo + 1) as usize);
        for k in lo..=hi {
            values.push(a * self.value(k)? + b * other.value(k)?);
        }
        SampledPath::new(lo, self.step, values)
    }
}

impl GridPath for SampledPath {
    fn step(&self) -> f64 {
        self.step
    }

    fn first_index(&self) -> i64 {
        self.start
    }

    fn last_index(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    fn value(&self, k: i64) -> Result<f64> {
        if !self.contains(k) {
            return Err(CoreError::Range(format!(
                "index {k} outside sampled window [{}, {}]",
                self.first_index(),
                self.last_index()
            )));
        }
        Ok(self.values[(k - self.start) as usize])
    }
}

/// Neumaier-compensated accumulator. Summation order is the caller's
/// responsibility; replaying the same term sequence is bitwise deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
