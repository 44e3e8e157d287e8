//! Two-sided fractional Brownian motion sample paths.
//!
//! Fractional Gaussian noise (fGn) is generated exactly in law by circulant
//! embedding of its covariance (Davies-Harte); a dense Cholesky factorization
//! of the same covariance serves as the distributional oracle. A two-sided
//! path is one stationary fGn sequence spanning past and future, cumulatively
//! summed and re-anchored so that `omega_0 = 0`. The Wiener shift
//! `(theta_s omega)_t = omega_{t+s} - omega_s` is a zero-copy view whose
//! increments delegate to the base path, which keeps the shift algebra exact
//! in floating point.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{CoreError, Result};
use crate::grid::{index_for, GridPath};

/// Eigenvalues of the circulant embedding below this are a bug, not noise.
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Dense-factorization cap for the exact sampler.
pub const CHOLESKY_MAX_N: usize = 4096;

/// Windows longer than this switch the Hölder seminorm to strided pairs.
const HOLDER_EXHAUSTIVE_LIMIT: usize = 4096;

/// Hurst index, restricted to (1/2, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstIndex(f64);

impl HurstIndex {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.5 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(CoreError::Domain(format!(
                "Hurst index must lie in (1/2, 1), got {value}"
            )))
        }
    }

    /// The degenerate boundary H = 1/2 (independent increments). Only used
    /// as a diagnostic cross-check; the theory itself needs H > 1/2.
    pub fn brownian() -> Self {
        Self(0.5)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Exact autocovariance of unit-step fGn at integer lag `k`:
/// `0.5 * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(h: HurstIndex, k: u64) -> f64 {
    let two_h = 2.0 * h.value();
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

fn standard_normals(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Sample `n` fGn values with covariance `step^{2H} * fgn_autocovariance`
/// by circulant embedding. Identical `(h, n, step, seed)` give identical
/// output bits.
pub fn sample_fgn(h: HurstIndex, n: usize, step: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(CoreError::Domain("fGn length must be >= 1".into()));
    }
    if !(step > 0.0) {
        return Err(CoreError::Domain(format!("step must be positive, got {step}")));
    }
    let scale = step.powf(h.value());
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if n == 1 {
        let z: f64 = StandardNormal.sample(&mut rng);
        return Ok(vec![scale * z]);
    }

    // First row of the 2n circulant extension of the Toeplitz covariance.
    let m = 2 * n;
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| Complex::new(fgn_autocovariance(h, j.min(m - j) as u64), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let mut eigen = Vec::with_capacity(m);
    for (j, v) in row.iter().enumerate() {
        let lam = v.re;
        if lam < EIGENVALUE_FLOOR {
            return Err(CoreError::Factorization(format!(
                "circulant eigenvalue {lam} at index {j} below floor {EIGENVALUE_FLOOR} (n = {n}, H = {})",
                h.value()
            )));
        }
        eigen.push(lam.max(0.0));
    }

    // Hermitian-symmetric Gaussian spectrum with E|a_k|^2 = lambda_k / m.
    let mut spectrum = vec![Complex::new(0.0, 0.0); m];
    spectrum[0] = Complex::new((eigen[0] / m as f64).sqrt() * standard_normals(&mut rng, 1)[0], 0.0);
    for k in 1..n {
        let amp = (eigen[k] / (2.0 * m as f64)).sqrt();
        let u: f64 = StandardNormal.sample(&mut rng);
        let v: f64 = StandardNormal.sample(&mut rng);
        spectrum[k] = Complex::new(amp * u, amp * v);
        spectrum[m - k] = spectrum[k].conj();
    }
    spectrum[n] = Complex::new((eigen[n] / m as f64).sqrt() * standard_normals(&mut rng, 1)[0], 0.0);

    fft.process(&mut spectrum);
    Ok(spectrum[..n].iter().map(|c| scale * c.re).collect())
}

/// Dense Cholesky factor of the unit-step fGn covariance; the correctness
/// oracle for [`sample_fgn`]. Factor once, draw many.
pub struct CholeskyFgn {
    n: usize,
    scale: f64,
    /// Lower-triangular factor, row-major packed: row i holds i+1 entries.
    factor: Vec<f64>,
}

impl CholeskyFgn {
    pub fn new(h: HurstIndex, n: usize, step: f64) -> Result<Self> {
        if n == 0 || n > CHOLESKY_MAX_N {
            return Err(CoreError::Domain(format!(
                "exact sampler supports 1 <= n <= {CHOLESKY_MAX_N}, got {n}"
            )));
        }
        if !(step > 0.0) {
            return Err(CoreError::Domain(format!("step must be positive, got {step}")));
        }
        let cov: Vec<f64> = (0..n).map(|k| fgn_autocovariance(h, k as u64)).collect();
        let mut factor = vec![0.0; n * (n + 1) / 2];
        let row_start = |i: usize| i * (i + 1) / 2;
        for i in 0..n {
            for j in 0..=i {
                let mut s = cov[i - j];
                for k in 0..j {
                    s -= factor[row_start(i) + k] * factor[row_start(j) + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(CoreError::Factorization(format!(
                            "nonpositive Cholesky pivot {s} at row {i}"
                        )));
                    }
                    factor[row_start(i) + j] = s.sqrt();
                } else {
                    factor[row_start(i) + j] = s / factor[row_start(j) + j];
                }
            }
        }
        Ok(Self { n, scale: step.powf(h.value()), factor })
    }

    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let z = standard_normals(&mut rng, self.n);
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let row = &self.factor[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            let mut s = 0.0;
            for (lij, zj) in row.iter().zip(&z) {
                s += lij * zj;
            }
            out.push(self.scale * s);
        }
        out
    }
}

/// One-shot exact-covariance fGn draw (n <= 4096, dense factorization).
pub fn sample_fgn_exact(h: HurstIndex, n: usize, step: f64, seed: u64) -> Result<Vec<f64>> {
    Ok(CholeskyFgn::new(h, n, step)?.sample(seed))
}

/// A sampled fBm realization on a uniform grid spanning negative and
/// positive time, anchored so the value at time zero is exactly zero.
#[derive(Debug, Clone)]
pub struct TwoSidedPath {
    hurst: HurstIndex,
    step: f64,
    n_past: usize,
    n_future: usize,
    samples: Vec<f64>,
    seed: u64,
}

impl TwoSidedPath {
    /// Draw one stationary fGn sequence over the whole window, cumulatively
    /// sum it and re-anchor at time zero. Past and future stay correlated
    /// exactly as fBm requires.
    pub fn build(
        hurst: HurstIndex,
        step: f64,
        n_past: usize,
        n_future: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = n_past + n_future;
        if n == 0 {
            return Err(CoreError::Domain("n_past + n_future must be >= 1".into()));
        }
        let incr = sample_fgn(hurst, n, step, seed)?;
        Ok(Self::from_increments(hurst, step, n_past, &incr, seed))
    }

    /// Assemble a path from externally supplied increments (used by builds
    /// and by tests that inject deterministic paths).
    pub fn from_increments(
        hurst: HurstIndex,
        step: f64,
        n_past: usize,
        increments: &[f64],
        seed: u64,
    ) -> Self {
        let n = increments.len();
        let mut cumsum = Vec::with_capacity(n + 1);
        cumsum.push(0.0);
        let mut s = 0.0;
        for g in increments {
            s += g;
            cumsum.push(s);
        }
        let anchor = cumsum[n_past];
        let samples: Vec<f64> = cumsum.into_iter().map(|v| v - anchor).collect();
        Self { hurst, step, n_past, n_future: n - n_past, samples, seed }
    }

    /// Rebuild from raw samples (CSV import). The anchor invariant is
    /// enforced, not assumed.
    pub fn from_samples(
        hurst: HurstIndex,
        step: f64,
        n_past: usize,
        samples: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        if samples.len() != n_past + 1 && samples.len() <= n_past {
            return Err(CoreError::Domain("sample array shorter than n_past + 1".into()));
        }
        if samples.len() < n_past + 1 {
            return Err(CoreError::Domain("sample array shorter than n_past + 1".into()));
        }
        if samples[n_past] != 0.0 {
            return Err(CoreError::Domain(format!(
                "path must vanish at time zero, got {}",
                samples[n_past]
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(CoreError::Domain(format!("non-finite sample {bad}")));
        }
        let n_future = samples.len() - 1 - n_past;
        Ok(Self { hurst, step, n_past, n_future, samples, seed })
    }

    pub fn hurst(&self) -> HurstIndex {
        self.hurst
    }

    pub fn n_past(&self) -> usize {
        self.n_past
    }

    pub fn n_future(&self) -> usize {
        self.n_future
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// View of the Wiener shift `theta_s` with `s = shift_steps * step`.
    pub fn shift(&self, shift_steps: i64) -> ShiftedPathView<'_> {
        ShiftedPathView { base: self, shift_steps }
    }
}

impl GridPath for TwoSidedPath {
    fn step(&self) -> f64 {
        self.step
    }

    fn first_index(&self) -> i64 {
        -(self.n_past as i64)
    }

    fn last_index(&self) -> i64 {
        self.n_future as i64
    }

    fn value(&self, k: i64) -> Result<f64> {
        if !self.contains(k) {
            return Err(CoreError::Range(format!(
                "index {k} outside path window [{}, {}]",
                self.first_index(),
                self.last_index()
            )));
        }
        Ok(self.samples[(k + self.n_past as i64) as usize])
    }

    fn increment(&self, k1: i64, k2: i64) -> Result<f64> {
        Ok(self.value(k2)? - self.value(k1)?)
    }
}

/// Zero-copy view of a shifted path: value at grid time `t` equals
/// `base(t + s) - base(s)`. Increments delegate to the base path, so
/// integrals against a shifted driver replay the base increments bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedPathView<'a> {
    base: &'a TwoSidedPath,
    shift_steps: i64,
}

impl<'a> ShiftedPathView<'a> {
    pub fn shift_steps(&self) -> i64 {
        self.shift_steps
    }

    pub fn base(&self) -> &'a TwoSidedPath {
        self.base
    }

    /// Composing shifts adds the offsets; the base path is shared.
    pub fn shift(&self, shift_steps: i64) -> ShiftedPathView<'a> {
        ShiftedPathView { base: self.base, shift_steps: self.shift_steps + shift_steps }
    }
}

impl GridPath for ShiftedPathView<'_> {
    fn step(&self) -> f64 {
        self.base.step
    }

    fn first_index(&self) -> i64 {
        self.base.first_index() - self.shift_steps
    }

    fn last_index(&self) -> i64 {
        self.base.last_index() - self.shift_steps
    }

    fn value(&self, k: i64) -> Result<f64> {
        self.base.increment(self.shift_steps, k + self.shift_steps)
    }

    fn increment(&self, k1: i64, k2: i64) -> Result<f64> {
        self.base.increment(k1 + self.shift_steps, k2 + self.shift_steps)
    }
}

/// Free-function form of the shift, range-checking nothing yet: evaluation
/// errors surface when a shifted index leaves the sampled window.
pub fn shift_path(path: &TwoSidedPath, shift_steps: i64) -> ShiftedPathView<'_> {
    path.shift(shift_steps)
}

/// Measured Hölder seminorm over a window.
#[derive(Debug, Clone, Copy)]
pub struct HolderEstimate {
    pub exponent: f64,
    pub seminorm: f64,
    pub window: (f64, f64),
    /// False when the strided-pair shortcut was used; the value is then a
    /// lower bound on the all-pairs seminorm.
    pub exhaustive: bool,
}

/// Maximum of `|omega_t - omega_s| / |t - s|^exponent` over sampled pairs in
/// the window. Windows longer than 4096 samples use pair strides 1, 2, 4, ...
pub fn holder_seminorm(
    path: &dyn GridPath,
    exponent: f64,
    window: (f64, f64),
) -> Result<HolderEstimate> {
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(CoreError::Domain(format!("Hölder exponent must lie in (0,1), got {exponent}")));
    }
    let k_lo = index_for(window.0, path.step())?;
    let k_hi = index_for(window.1, path.step())?;
    if k_hi <= k_lo {
        return Err(CoreError::Range(format!("empty Hölder window [{}, {}]", window.0, window.1)));
    }
    if k_lo < path.first_index() || k_hi > path.last_index() {
        return Err(CoreError::Range("Hölder window leaves the sampled grid".into()));
    }
    let m = (k_hi - k_lo + 1) as usize;
    let values: Vec<f64> = (k_lo..=k_hi).map(|k| path.value(k).unwrap()).collect();
    let step = path.step();
    let mut best = 0.0f64;
    let exhaustive = m <= HOLDER_EXHAUSTIVE_LIMIT;
    if exhaustive {
        for i in 0..m {
            for j in (i + 1)..m {
                let dt = ((j - i) as f64) * step;
                let ratio = (values[j] - values[i]).abs() / dt.powf(exponent);
                if ratio > best {
                    best = ratio;
                }
            }
        }
    } else {
        let mut d = 1usize;
        while d < m {
            let dt = (d as f64) * step;
            let denom = dt.powf(exponent);
            for i in 0..(m - d) {
                let ratio = (values[i + d] - values[i]).abs() / denom;
                if ratio > best {
                    best = ratio;
                }
            }
            d *= 2;
        }
    }
    Ok(HolderEstimate { exponent, seminorm: best, window, exhaustive })
}

/// Ratio series `(t, |omega_t| / |t|)` over grid times with `|t| >= 1`,
/// the numerical proxy for the sublinear growth of the noise.
pub fn growth_ratio(path: &TwoSidedPath) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for k in path.first_index()..=path.last_index() {
        let t = path.time_of(k);
        if t.abs() >= 1.0 {
            let v = path.value(k).unwrap();
            out.push((t, v.abs() / t.abs()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    #[test]
    fn autocovariance_matches_hand_values() {
        let h34 = HurstIndex::new(0.75).unwrap();
        assert_eq!(fgn_autocovariance(h34, 0), 1.0);
        // 0.5 * (2^{1.5} - 2)
        let expected = 0.5 * (2.0f64.powf(1.5) - 2.0);
        assert!((fgn_autocovariance(h34, 1) - expected).abs() < 1e-15);
        assert!((expected - 0.414214).abs() < 1e-6);
        let bm = HurstIndex::brownian();
        assert_eq!(fgn_autocovariance(bm, 1), 0.0);
        assert_eq!(fgn_autocovariance(bm, 7), 0.0);
    }

    #[test]
    fn hurst_domain_is_enforced() {
        assert!(HurstIndex::new(0.4).is_err());
        assert!(HurstIndex::new(0.5).is_err());
        assert!(HurstIndex::new(1.0).is_err());
        assert!(HurstIndex::new(0.75).is_ok());
    }

    #[test]
    fn fgn_is_deterministic_per_seed() {
        let h = HurstIndex::new(0.75).unwrap();
        let a = sample_fgn(h, 512, 1.0, 42).unwrap();
        let b = sample_fgn(h, 512, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_fgn(h, 512, 1.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn brownian_case_has_uncorrelated_increments() {
        let h = HurstIndex::brownian();
        let xs = sample_fgn(h, 1 << 14, 1.0, 7).unwrap();
        let c1 = stats::autocovariance(&xs, 1);
        // var of the lag-1 estimator for white noise is ~ 1/n
        let se = (1.0 / xs.len() as f64).sqrt();
        assert!(c1.abs() < 3.0 * se, "lag-1 autocovariance {c1} exceeds 3 SE {}", 3.0 * se);
    }

    #[test]
    fn monte_carlo_autocovariance_matches_analytic() {
        let h = HurstIndex::new(0.75).unwrap();
        let n = 1 << 14;
        let seeds = 100u64;
        let mut per_seed: Vec<Vec<f64>> = Vec::new();
        for seed in 0..seeds {
            let xs = sample_fgn(h, n, 1.0, 1000 + seed).unwrap();
            per_seed.push((0..=10).map(|k| stats::autocovariance(&xs, k)).collect());
        }
        for k in 0..=10usize {
            let estimates: Vec<f64> = per_seed.iter().map(|v| v[k]).collect();
            let mean = stats::mean(&estimates);
            let se = (stats::variance(&estimates) / seeds as f64).sqrt();
            let truth = fgn_autocovariance(h, k as u64);
            assert!(
                (mean - truth).abs() <= 3.0 * se,
                "lag {k}: estimate {mean} vs analytic {truth}, 3 SE = {}",
                3.0 * se
            );
        }
    }

    #[test]
    fn cholesky_two_point_covariance() {
        let h = HurstIndex::new(0.6).unwrap();
        let chol = CholeskyFgn::new(h, 2, 1.0).unwrap();
        let draws = 100_000u64;
        let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
        for seed in 0..draws {
            let x = chol.sample(seed);
            s00 += x[0] * x[0];
            s01 += x[0] * x[1];
            s11 += x[1] * x[1];
        }
        let n = draws as f64;
        let gamma1 = fgn_autocovariance(h, 1);
        // SE of the covariance estimators is O(1/sqrt(n)).
        let se = 3.0 / n.sqrt() * 2.0;
        assert!((s00 / n - 1.0).abs() < se, "var[0] = {}", s00 / n);
        assert!((s11 / n - 1.0).abs() < se, "var[1] = {}", s11 / n);
        assert!((s01 / n - gamma1).abs() < se, "cov = {} vs {gamma1}", s01 / n);
    }

    #[test]
    fn cholesky_brownian_is_white() {
        let h = HurstIndex::brownian();
        let chol = CholeskyFgn::new(h, 16, 1.0).unwrap();
        let draws = 20_000u64;
        let mut cross = vec![0.0f64; 15];
        for seed in 0..draws {
            let x = chol.sample(seed);
            for k in 1..16 {
                cross[k - 1] += x[0] * x[k];
            }
        }
        let se = 3.0 / (draws as f64).sqrt();
        for (k, c) in cross.iter().enumerate() {
            let est = c / draws as f64;
            assert!(est.abs() < se, "off-diagonal lag {} covariance {est}", k + 1);
        }
    }

    #[test]
    fn two_sided_path_is_anchored_and_deterministic() {
        let h = HurstIndex::new(0.75).unwrap();
        let p = TwoSidedPath::build(h, 0.5, 8, 8, 9).unwrap();
        assert_eq!(p.value(0).unwrap(), 0.0);
        assert_eq!(p.samples().len(), 17);
        let q = TwoSidedPath::build(h, 0.5, 8, 8, 9).unwrap();
        assert_eq!(p.samples(), q.samples());
    }

    #[test]
    fn zero_increments_give_zero_path() {
        let h = HurstIndex::new(0.75).unwrap();
        let p = TwoSidedPath::from_increments(h, 1.0, 3, &[0.0; 6], 0);
        assert!(p.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fbm_variance_law_via_monte_carlo() {
        let h = HurstIndex::new(0.75).unwrap();
        let seeds = 200u64;
        let t_index = 4i64; // step 1.0, so t = 4
        let mut vals = Vec::new();
        for seed in 0..seeds {
            let p = TwoSidedPath::build(h, 1.0, 0, 8, 500 + seed).unwrap();
            vals.push(p.value(t_index).unwrap());
        }
        let second_moment: f64 = vals.iter().map(|v| v * v).sum::<f64>() / seeds as f64;
        let truth = 4.0f64.powf(1.5); // |t|^{2H} = 8
        // SE of the second moment of N(0, 8): sqrt(2/n) * 8
        let se = (2.0 / seeds as f64).sqrt() * truth;
        assert!(
            (second_moment - truth).abs() < 3.0 * se,
            "Var[omega_4] = {second_moment} vs {truth} (3 SE = {})",
            3.0 * se
        );
    }

    #[test]
    fn shift_view_identities() {
        let h = HurstIndex::new(0.75).unwrap();
        let p = TwoSidedPath::build(h, 0.25, 32, 32, 11).unwrap();
        let id = p.shift(0);
        for k in -8..=8 {
            assert_eq!(id.value(k).unwrap(), p.value(k).unwrap());
        }
        // (theta_s omega)_0 = 0 for any s
        for s in [-20i64, -3, 1, 17] {
            assert_eq!(p.shift(s).value(0).unwrap(), 0.0);
        }
    }

    #[test]
    fn shift_composition_adds_offsets() {
        let h = HurstIndex::new(0.75).unwrap();
        let p = TwoSidedPath::build(h, 0.25, 64, 64, 3).unwrap();
        let ab = p.shift(5).shift(-9);
        let direct = p.shift(-4);
        assert_eq!(ab.shift_steps(), -4);
        for k in -16..=16 {
            assert_eq!(ab.value(k).unwrap(), direct.value(k).unwrap());
        }
        // shift by s then -s recovers the base values on the common window
        let back = p.shift(7).shift(-7);
        for k in -16..=16 {
            assert_eq!(back.value(k).unwrap(), p.value(k).unwrap());
        }
    }

    #[test]
    fn holder_seminorm_zero_and_linear_paths() {
        let h = HurstIndex::new(0.75).unwrap();
        let zero = TwoSidedPath::from_increments(h, 0.125, 0, &[0.0; 8], 0);
        let est = holder_seminorm(&zero, 0.5, (0.0, 1.0)).unwrap();
        assert_eq!(est.seminorm, 0.0);

        // omega_t = t on [0,1]: ratio |t-s|^{1/2} maximized at |t-s| = 1
        let linear = TwoSidedPath::from_increments(h, 0.125, 0, &[0.125; 8], 0);
        let est = holder_seminorm(&linear, 0.5, (0.0, 1.0)).unwrap();
        assert!((est.seminorm - 1.0).abs() < 1e-12, "got {}", est.seminorm);
    }

    #[test]
    fn holder_seminorm_rejects_empty_window() {
        let h = HurstIndex::new(0.75).unwrap();
        let p = TwoSidedPath::build(h, 0.5, 4, 4, 1).unwrap();
        assert!(holder_seminorm(&p, 0.5, (1.0, 1.0)).is_err());
    }

    #[test]
    fn holder_seminorm_stable_under_refinement() {
        // Same fBm law sampled at two meshes over [0, 10]; the estimated
        // seminorm at exponent 0.70 should be finite and mesh-stable to 10%.
        let h = HurstIndex::new(0.75).unwrap();
        let fine = TwoSidedPath::build(h, 10.0 / 4096.0, 0, 4096, 77).unwrap();
        let est_fine = holder_seminorm(&fine, 0.70, (0.0, 10.0)).unwrap();
        // Coarse view: every second sample of the same realization.
        let coarse_incr: Vec<f64> = (0..2048)
            .map(|i| {
                fine.value(2 * (i as i64 + 1)).unwrap() - fine.value(2 * i as i64).unwrap()
            })
            .collect();
        let coarse = TwoSidedPath::from_increments(h, 10.0 / 2048.0, 0, &coarse_incr, 77);
        let est_coarse = holder_seminorm(&coarse, 0.70, (0.0, 10.0)).unwrap();
        assert!(est_fine.seminorm.is_finite() && est_fine.seminorm > 0.0);
        let rel = (est_fine.seminorm - est_coarse.seminorm).abs() / est_fine.seminorm;
        assert!(rel < 0.10, "seminorm drifted {rel} under refinement");
    }

    #[test]
    fn growth_ratio_known_paths() {
        let h = HurstIndex::new(0.75).unwrap();
        let zero = TwoSidedPath::from_increments(h, 1.0, 4, &[0.0; 8], 0);
        assert!(growth_ratio(&zero).iter().all(|&(_, r)| r == 0.0));
        let linear = TwoSidedPath::from_increments(h, 1.0, 4, &[1.0; 8], 0);
        assert!(growth_ratio(&linear).iter().all(|&(_, r)| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn growth_ratio_decays_for_fbm() {
        // Median ratio over the last decade should fall below the first
        // decade in at least 95 of 100 seeds (sublinear growth).
        let h = HurstIndex::new(0.75).unwrap();
        let horizon = 1 << 12;
        let mut wins = 0;
        for seed in 0..100u64 {
            let p = TwoSidedPath::build(h, 1.0, 0, horizon, 9000 + seed).unwrap();
            let series = growth_ratio(&p);
            let first: Vec<f64> =
                series.iter().filter(|(t, _)| *t >= 1.0 && *t < 10.0).map(|&(_, r)| r).collect();
            let last: Vec<f64> = series
                .iter()
                .filter(|(t, _)| *t >= horizon as f64 / 10.0)
                .map(|&(_, r)| r)
                .collect();
            if stats::median(&last) < stats::median(&first) {
                wins += 1;
            }
        }
        assert!(wins >= 95, "sublinear growth seen in only {wins}/100 seeds");
    }
}
