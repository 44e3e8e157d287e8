//! 2-D incompressible Navier-Stokes on the periodic torus, pseudo-spectral.
//!
//! `A(t, u) = nu * Lap u + B(u, u) + h(t)` with `B(u, v) = -P[(u . grad) v]`
//! and `P` the Leray projection. States are Fourier coefficients of the two
//! velocity components on an `N x N` mode grid, mean-free and
//! divergence-free; retained modes satisfy `|kx|, |ky| <= kmax` with
//! `kmax = (N-1)/3`, so quadratic products computed on the `N` grid are
//! alias-free after masking (the 2/3 rule) and the energy orthogonality
//! `<B(u,u), u> = 0` holds to rounding.
//!
//! Triple: `V = H^1_div ⊆ H = L^2_div ⊆ V*` with the first Stokes eigenvalue
//! `lambda_1 = 1` on the torus. The paper-level constants are `alpha = 2`,
//! `c = nu / 2`, `g = 0`, `f(t) = C |h(t)|^2`, `eta = 0`,
//! `rho(v) = |v|_{L^4}^4`, `varpi = 2`.

use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{CoreError, Result};
use crate::models::{Model, ModelId, ScalarEnvelope, StateH, TripleConstants};

const DIV_FREE_TOL: f64 = 1e-12;

/// Time-dependent forcing `h(t) = envelope(t) * pattern` with the pattern a
/// fixed divergence-free spectral field.
#[derive(Clone)]
pub struct NseForcing {
    pub envelope: ScalarEnvelope,
    pattern: Vec<Complex<f64>>,
    pattern_h_sq: f64,
}

impl std::fmt::Debug for NseForcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NseForcing")
            .field("envelope", &self.envelope)
            .field("pattern_h_sq", &self.pattern_h_sq)
            .finish()
    }
}

#[derive(Clone)]
pub struct NseModel {
    n: usize,
    nu: f64,
    kmax: i64,
    forcing: Option<NseForcing>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    inv_big: Arc<dyn Fft<f64>>,
    constants: TripleConstants,
    growth_c: f64,
    mono_c: f64,
    uniq_c: f64,
}

impl std::fmt::Debug for NseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NseModel")
            .field("n", &self.n)
            .field("nu", &self.nu)
            .field("kmax", &self.kmax)
            .field("forcing", &self.forcing)
            .finish()
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 - 1 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn grid_index(k: i64, n: usize) -> usize {
    ((k + n as i64) % n as i64) as usize
}

impl NseModel {
    pub fn new(n: usize, nu: f64, forcing: Option<(StateH, ScalarEnvelope)>) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(CoreError::Domain(format!("spectral grid must be even and >= 8, got {n}")));
        }
        if !(nu > 0.0) {
            return Err(CoreError::Domain(format!("viscosity must be positive, got {nu}")));
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let inv_big = planner.plan_fft_inverse(2 * n);
        // f(t) = (2 / (3 nu lambda_1)) |h(t)|_H^2 makes (A3') hold with
        // c = nu/2 by Cauchy-Schwarz + AM-GM; lambda_1 = 1 on the torus.
        let c_f = 2.0 / (3.0 * nu);
        let constants = TripleConstants::new(1.0, 2.0, nu / 2.0, 0.0, c_f, 2.0, 2.0)?;
        let mut model = Self {
            n,
            nu,
            kmax: (n as i64 - 1) / 3,
            forcing: None,
            fwd,
            inv,
            inv_big,
            constants,
            growth_c: 1.0,
            mono_c: 0.0,
            uniq_c: 1.0,
        };
        if let Some((pattern, envelope)) = forcing {
            model.forcing = Some(model.build_forcing(pattern, envelope)?);
        }
        model.calibrate();
        Ok(model)
    }

    fn build_forcing(&self, pattern: StateH, envelope: ScalarEnvelope) -> Result<NseForcing> {
        if pattern.dim() != self.dim() {
            return Err(CoreError::Config("forcing pattern dimension mismatch".into()));
        }
        let (mut p1, mut p2) = self.unpack(&pattern);
        self.mask(&mut p1);
        self.mask(&mut p2);
        self.project(&mut p1, &mut p2);
        let h_sq: f64 = p1.iter().chain(p2.iter()).map(|c| c.norm_sqr()).sum();
        let mut flat = p1;
        flat.extend_from_slice(&p2);
        Ok(NseForcing { envelope, pattern: flat, pattern_h_sq: h_sq })
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    pub fn viscosity(&self) -> f64 {
        self.nu
    }

    fn unpack(&self, u: &StateH) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
        let m = self.n * self.n;
        let mut c1 = Vec::with_capacity(m);
        let mut c2 = Vec::with_capacity(m);
        for i in 0..m {
            c1.push(Complex::new(u.coeffs[2 * i], u.coeffs[2 * i + 1]));
            c2.push(Complex::new(u.coeffs[2 * (m + i)], u.coeffs[2 * (m + i) + 1]));
        }
        (c1, c2)
    }

    fn pack(&self, c1: &[Complex<f64>], c2: &[Complex<f64>]) -> StateH {
        let m = self.n * self.n;
        let mut coeffs = vec![0.0; 4 * m];
        for i in 0..m {
            coeffs[2 * i] = c1[i].re;
            coeffs[2 * i + 1] = c1[i].im;
            coeffs[2 * (m + i)] = c2[i].re;
            coeffs[2 * (m + i) + 1] = c2[i].im;
        }
        StateH::new(ModelId::Nse, coeffs)
    }

    fn check_state(&self, u: &StateH) -> Result<()> {
        if u.model != ModelId::Nse || u.dim() != self.dim() {
            return Err(CoreError::Config(format!(
                "state (model {:?}, dim {}) does not belong to nse(n = {})",
                u.model,
                u.dim(),
                self.n
            )));
        }
        Ok(())
    }

    fn for_each_mode(&self, mut f: impl FnMut(usize, i64, i64)) {
        for row in 0..self.n {
            let ky = wavenumber(row, self.n);
            for col in 0..self.n {
                let kx = wavenumber(col, self.n);
                f(row * self.n + col, kx, ky);
            }
        }
    }

    /// Zero the modes outside the dealias cutoff (and the mean mode).
    fn mask(&self, c: &mut [Complex<f64>]) {
        self.for_each_mode(|i, kx, ky| {
            if kx.abs() > self.kmax || ky.abs() > self.kmax || (kx == 0 && ky == 0) {
                c[i] = Complex::new(0.0, 0.0);
            }
        });
    }

    /// Leray projection `P = I - k k^T / |k|^2` applied in place.
    fn project(&self, c1: &mut [Complex<f64>], c2: &mut [Complex<f64>]) {
        self.for_each_mode(|i, kx, ky| {
            let k2 = (kx * kx + ky * ky) as f64;
            if k2 == 0.0 {
                c1[i] = Complex::new(0.0, 0.0);
                c2[i] = Complex::new(0.0, 0.0);
                return;
            }
            let d = (c1[i] * kx as f64 + c2[i] * ky as f64) / k2;
            c1[i] -= d * kx as f64;
            c2[i] -= d * ky as f64;
        });
    }

    fn divergence_norm(&self, c1: &[Complex<f64>], c2: &[Complex<f64>]) -> f64 {
        let mut s = 0.0;
        self.for_each_mode(|i, kx, ky| {
            s += (c1[i] * kx as f64 + c2[i] * ky as f64).norm_sqr();
        });
        s.sqrt()
    }

    /// In-place 2-D FFT (rows then columns) with the planned direction.
    fn fft2(&self, grid: &mut [Complex<f64>], forward: bool, n: usize) {
        let plan = if forward {
            self.fwd.clone()
        } else if n == self.n {
            self.inv.clone()
        } else {
            self.inv_big.clone()
        };
        debug_assert_eq!(plan.len(), n);
        for row in grid.chunks_exact_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = grid[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                grid[r * n + c] = col[r];
            }
        }
    }

    /// Physical samples of a spectral field (unnormalized inverse transform).
    fn to_physical(&self, c: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let mut grid = c.to_vec();
        self.fft2(&mut grid, false, self.n);
        grid
    }

    /// Dealiased convection `(u . grad) u` in spectral coordinates
    /// (before Leray projection and sign flip).
    fn convection(&self, c1: &[Complex<f64>], c2: &[Complex<f64>]) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
        let m = self.n * self.n;
        let mut d1x = vec![Complex::new(0.0, 0.0); m];
        let mut d1y = vec![Complex::new(0.0, 0.0); m];
        let mut d2x = vec![Complex::new(0.0, 0.0); m];
        let mut d2y = vec![Complex::new(0.0, 0.0); m];
        self.for_each_mode(|i, kx, ky| {
            let ikx = Complex::new(0.0, kx as f64);
            let iky = Complex::new(0.0, ky as f64);
            d1x[i] = ikx * c1[i];
            d1y[i] = iky * c1[i];
            d2x[i] = ikx * c2[i];
            d2y[i] = iky * c2[i];
        });
        let u1 = self.to_physical(c1);
        let u2 = self.to_physical(c2);
        self.fft2(&mut d1x, false, self.n);
        self.fft2(&mut d1y, false, self.n);
        self.fft2(&mut d2x, false, self.n);
        self.fft2(&mut d2y, false, self.n);
        let mut n1 = vec![Complex::new(0.0, 0.0); m];
        let mut n2 = vec![Complex::new(0.0, 0.0); m];
        for i in 0..m {
            n1[i] = Complex::new(u1[i].re * d1x[i].re + u2[i].re * d1y[i].re, 0.0);
            n2[i] = Complex::new(u1[i].re * d2x[i].re + u2[i].re * d2y[i].re, 0.0);
        }
        self.fft2(&mut n1, true, self.n);
        self.fft2(&mut n2, true, self.n);
        let scale = 1.0 / (m as f64);
        for i in 0..m {
            n1[i] *= scale;
            n2[i] *= scale;
        }
        self.mask(&mut n1);
        self.mask(&mut n2);
        (n1, n2)
    }

    /// `B(u, u) = -P[(u . grad) u]`, dealiased, in spectral coordinates.
    fn bilinear(&self, c1: &[Complex<f64>], c2: &[Complex<f64>]) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
        let (mut n1, mut n2) = self.convection(c1, c2);
        self.project(&mut n1, &mut n2);
        for v in n1.iter_mut().chain(n2.iter_mut()) {
            *v = -*v;
        }
        (n1, n2)
    }

    fn forcing_at(&self, t: f64) -> Option<(Vec<Complex<f64>>, Vec<Complex<f64>>)> {
        self.forcing.as_ref().map(|f| {
            let m = self.n * self.n;
            let amp = f.envelope.eval(t);
            let h1 = f.pattern[..m].iter().map(|c| c * amp).collect();
            let h2 = f.pattern[m..].iter().map(|c| c * amp).collect();
            (h1, h2)
        })
    }

    /// `B(u,u)` as a packed state, exposed for the identity tests.
    pub fn bilinear_state(&self, u: &StateH) -> Result<StateH> {
        self.check_state(u)?;
        let (c1, c2) = self.unpack(u);
        let (b1, b2) = self.bilinear(&c1, &c2);
        Ok(self.pack(&b1, &b2))
    }

    /// Set a single mode (and its Hermitian mirror) in a packed state.
    /// Intended for constructing analytic test fields.
    pub fn state_from_modes(
        &self,
        modes: &[((i64, i64), (Complex<f64>, Complex<f64>))],
    ) -> StateH {
        let m = self.n * self.n;
        let mut c1 = vec![Complex::new(0.0, 0.0); m];
        let mut c2 = vec![Complex::new(0.0, 0.0); m];
        for &((kx, ky), (a1, a2)) in modes {
            let i = grid_index(ky, self.n) * self.n + grid_index(kx, self.n);
            let j = grid_index(-ky, self.n) * self.n + grid_index(-kx, self.n);
            c1[i] = a1;
            c2[i] = a2;
            c1[j] = a1.conj();
            c2[j] = a2.conj();
        }
        self.pack(&c1, &c2)
    }

    /// `|v|_{L^4}^4` by exact quadrature on the zero-padded `2N` grid
    /// (the integrand's modes stay below the padded Nyquist).
    fn l4_norm_pow4(&self, c1: &[Complex<f64>], c2: &[Complex<f64>]) -> f64 {
        let big = 2 * self.n;
        let mut g1 = vec![Complex::new(0.0, 0.0); big * big];
        let mut g2 = vec![Complex::new(0.0, 0.0); big * big];
        self.for_each_mode(|i, kx, ky| {
            let j = grid_index(ky, big) * big + grid_index(kx, big);
            g1[j] = c1[i];
            g2[j] = c2[i];
        });
        self.fft2(&mut g1, false, big);
        self.fft2(&mut g2, false, big);
        let mut acc = 0.0;
        for i in 0..big * big {
            let sq = g1[i].re * g1[i].re + g2[i].re * g2[i].re;
            acc += sq * sq;
        }
        acc / (big * big) as f64
    }

    /// Freeze the growth / monotonicity / uniqueness constants on a pilot
    /// sample drawn with a fixed internal seed.
    fn calibrate(&mut self) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0xC0FFEE);
        let alpha = self.constants.alpha;
        let t0 = 0.0;
        let mut growth: f64 = 0.0;
        let mut uniq: f64 = 0.0;
        for _ in 0..256 {
            let v = self.sample_state(&mut rng);
            let a_v = self.apply(t0, &v).expect("pilot states are admissible");
            let num = self.dual_norm(&a_v).unwrap().powf(alpha / (alpha - 1.0));
            let v_pow = self.norm_v(&v).unwrap().powf(alpha);
            let h_norm = self.norm_h(&v).unwrap();
            let denom = (self.forcing_f(t0) + v_pow) * (1.0 + h_norm.powf(self.constants.varpi));
            if denom > 0.0 {
                growth = growth.max(num / denom);
            }
            let c3_denom = (1.0 + v_pow) * (1.0 + h_norm.powf(self.constants.vartheta));
            uniq = uniq.max(self.rho(&v).unwrap() / c3_denom);
        }
        let mut mono: f64 = 0.0;
        for _ in 0..192 {
            let v1 = self.sample_state(&mut rng);
            let v2 = self.sample_state(&mut rng);
            let w = v1.sub(&v2);
            let w_sq = self.inner_h(&w, &w).unwrap();
            if w_sq < 1e-14 {
                continue;
            }
            let d_a = self.apply(t0, &v1).unwrap().sub(&self.apply(t0, &v2).unwrap());
            let lhs = 2.0 * self.pairing(&d_a, &w).unwrap();
            let needed = lhs / w_sq - self.rho(&v2).unwrap();
            mono = mono.max(needed);
        }
        self.growth_c = (1.5 * growth).max(1e-6);
        self.uniq_c = (1.5 * uniq).max(1e-6);
        self.mono_c = 1.5 * mono.max(0.0) + 0.05;
    }
}

impl Model for NseModel {
    fn id(&self) -> ModelId {
        ModelId::Nse
    }

    fn name(&self) -> &'static str {
        "nse"
    }

    fn dim(&self) -> usize {
        4 * self.n * self.n
    }

    fn constants(&self) -> &TripleConstants {
        &self.constants
    }

    fn is_autonomous(&self) -> bool {
        false
    }

    fn apply(&self, t: f64, u: &StateH) -> Result<StateH> {
        self.check_state(u)?;
        let (c1, c2) = self.unpack(u);
        let v_norm = self.norm_v(u)?;
        let div = self.divergence_norm(&c1, &c2);
        if div > DIV_FREE_TOL * v_norm.max(1e-30) {
            return Err(CoreError::Config(format!(
                "state is not divergence-free: |div| = {div} vs {} * |u|_V",
                DIV_FREE_TOL
            )));
        }
        let (mut out1, mut out2) = self.bilinear(&c1, &c2);
        self.for_each_mode(|i, kx, ky| {
            let k2 = (kx * kx + ky * ky) as f64;
            out1[i] -= c1[i] * (self.nu * k2);
            out2[i] -= c2[i] * (self.nu * k2);
        });
        if let Some((h1, h2)) = self.forcing_at(t) {
            for i in 0..out1.len() {
                out1[i] += h1[i];
                out2[i] += h2[i];
            }
        }
        Ok(self.pack(&out1, &out2))
    }

    fn inner_h(&self, u: &StateH, v: &StateH) -> Result<f64> {
        self.check_state(u)?;
        self.check_state(v)?;
        let mut s = 0.0;
        for i in 0..u.coeffs.len() / 2 {
            // Re(a conj(b)) summed over both components and all modes.
            s += u.coeffs[2 * i] * v.coeffs[2 * i] + u.coeffs[2 * i + 1] * v.coeffs[2 * i + 1];
        }
        Ok(s)
    }

    fn norm_v(&self, u: &StateH) -> Result<f64> {
        self.check_state(u)?;
        let (c1, c2) = self.unpack(u);
        let mut s = 0.0;
        self.for_each_mode(|i, kx, ky| {
            let k2 = (kx * kx + ky * ky) as f64;
            s += k2 * (c1[i].norm_sqr() + c2[i].norm_sqr());
        });
        Ok(s.sqrt())
    }

    fn dual_norm(&self, f: &StateH) -> Result<f64> {
        self.check_state(f)?;
        let (c1, c2) = self.unpack(f);
        let mut s = 0.0;
        self.for_each_mode(|i, kx, ky| {
            let k2 = (kx * kx + ky * ky) as f64;
            if k2 > 0.0 {
                s += (c1[i].norm_sqr() + c2[i].norm_sqr()) / k2;
            }
        });
        Ok(s.sqrt())
    }

    fn eta(&self, _v: &StateH) -> Result<f64> {
        Ok(0.0)
    }

    fn rho(&self, v: &StateH) -> Result<f64> {
        self.check_state(v)?;
        let (c1, c2) = self.unpack(v);
        Ok(self.l4_norm_pow4(&c1, &c2))
    }

    fn forcing_f(&self, t: f64) -> f64 {
        match &self.forcing {
            Some(f) => {
                let amp = f.envelope.eval(t);
                self.constants.c_bound * amp * amp * f.pattern_h_sq
            }
            None => 0.0,
        }
    }

    fn monotonicity_constant(&self) -> f64 {
        self.mono_c
    }

    fn growth_constant(&self) -> f64 {
        self.growth_c
    }

    fn uniqueness_constants(&self) -> (f64, f64) {
        (self.uniq_c, self.constants.vartheta)
    }

    fn sample_state(&self, rng: &mut dyn RngCore) -> StateH {
        let m = self.n * self.n;
        let mut c1 = vec![Complex::new(0.0, 0.0); m];
        let mut c2 = vec![Complex::new(0.0, 0.0); m];
        const AMP: f64 = 0.5;
        for row in 0..self.n {
            let ky = wavenumber(row, self.n);
            for col in 0..self.n {
                let kx = wavenumber(col, self.n);
                if kx.abs() > self.kmax || ky.abs() > self.kmax || (kx == 0 && ky == 0) {
                    continue;
                }
                // assign each conjugate pair once, from its canonical half
                if !(ky > 0 || (ky == 0 && kx > 0)) {
                    continue;
                }
                let k2 = (kx * kx + ky * ky) as f64;
                let decay = AMP / k2; // spectral decay exponent 2
                let g: [f64; 4] = [
                    StandardNormal.sample(&mut *rng),
                    StandardNormal.sample(&mut *rng),
                    StandardNormal.sample(&mut *rng),
                    StandardNormal.sample(&mut *rng),
                ];
                let mut a1 = Complex::new(g[0], g[1]) * decay;
                let mut a2 = Complex::new(g[2], g[3]) * decay;
                // project the pair onto the divergence-free subspace
                let d = (a1 * kx as f64 + a2 * ky as f64) / k2;
                a1 -= d * kx as f64;
                a2 -= d * ky as f64;
                let i = row * self.n + col;
                let j = grid_index(-ky, self.n) * self.n + grid_index(-kx, self.n);
                c1[i] = a1;
                c2[i] = a2;
                c1[j] = a1.conj();
                c2[j] = a2.conj();
            }
        }
        self.pack(&c1, &c2)
    }

    fn transformed_imex_step(
        &self,
        t_n: f64,
        u: &StateH,
        dt: f64,
        z_n: f64,
        _z_np1: f64,
    ) -> Result<StateH> {
        self.check_state(u)?;
        // d/dt u~ = nu Lap u~ + z^{-1} B(u~, u~) + z h(t); stiff part solved
        // exactly in spectral coordinates by the implicit Euler division.
        let (c1, c2) = self.unpack(u);
        let (mut b1, mut b2) = self.bilinear(&c1, &c2);
        let z_inv = 1.0 / z_n;
        for v in b1.iter_mut().chain(b2.iter_mut()) {
            *v *= z_inv;
        }
        if let Some((h1, h2)) = self.forcing_at(t_n) {
            for i in 0..b1.len() {
                b1[i] += h1[i] * z_n;
                b2[i] += h2[i] * z_n;
            }
        }
        let mut out1 = vec![Complex::new(0.0, 0.0); c1.len()];
        let mut out2 = vec![Complex::new(0.0, 0.0); c2.len()];
        self.for_each_mode(|i, kx, ky| {
            let k2 = (kx * kx + ky * ky) as f64;
            let denom = 1.0 + self.nu * k2 * dt;
            out1[i] = (c1[i] + b1[i] * dt) / denom;
            out2[i] = (c2[i] + b2[i] * dt) / denom;
        });
        Ok(self.pack(&out1, &out2))
    }
}
