//! Scalar forcing envelopes with exponential-integrability certificates.

use crate::error::{CoreError, Result};

/// Closed-form scalar envelope `f : R -> R` for nonautonomous forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarEnvelope {
    Zero,
    Constant(f64),
    /// `amplitude * exp(-rate * |t|)`, rate > 0.
    ExpAbsDecay { amplitude: f64, rate: f64 },
    /// `exp(rate * |t|)`, rate > 0 — deliberately NOT exponentially
    /// integrable for small eta; exists to exercise the rejection path.
    ExpGrowth { rate: f64 },
}

impl ScalarEnvelope {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarEnvelope::Zero => 0.0,
            ScalarEnvelope::Constant(c) => c,
            ScalarEnvelope::ExpAbsDecay { amplitude, rate } => amplitude * (-rate * t.abs()).exp(),
            ScalarEnvelope::ExpGrowth { rate } => (rate * t.abs()).exp(),
        }
    }

    /// `sup_{r <= upto} |f(r)|`, used for quadrature tail bounds.
    pub fn sup_tail(&self, upto: f64) -> f64 {
        match *self {
            ScalarEnvelope::Zero => 0.0,
            ScalarEnvelope::Constant(c) => c.abs(),
            ScalarEnvelope::ExpAbsDecay { amplitude, rate } => {
                if upto <= 0.0 {
                    amplitude.abs() * (-rate * upto.abs()).exp()
                } else {
                    amplitude.abs()
                }
            }
            ScalarEnvelope::ExpGrowth { .. } => f64::INFINITY,
        }
    }

    /// Whether `int_{-inf}^t |f(r)| e^{eta r} dr` is finite for every
    /// `eta > 0` (closed-form fact per variant).
    pub fn is_exponentially_integrable(&self) -> bool {
        !matches!(self, ScalarEnvelope::ExpGrowth { .. })
    }

    /// Numerical certificate: evaluates the tail integrals over doubling
    /// horizons and reports whether the increments decay. `eta <= 0` entries
    /// are rejected outright (the definition requires eta > 0).
    pub fn certify_exponential_integrability(
        &self,
        etas: &[f64],
        base_horizon: f64,
    ) -> Result<CertificateReport> {
        if etas.is_empty() {
            return Err(CoreError::Domain("certificate needs at least one eta".into()));
        }
        let step = 1.0 / 64.0;
        let mut entries = Vec::with_capacity(etas.len());
        for &eta in etas {
            if !(eta > 0.0) {
                return Err(CoreError::Domain(format!(
                    "exponential integrability requires eta > 0, got {eta}"
                )));
            }
            // Trapezoid of |f(r)| e^{eta r} over [-T, 0] for T, 2T, 4T.
            let mut values = Vec::new();
            for mult in [1.0, 2.0, 4.0] {
                let horizon = base_horizon * mult;
                let n = (horizon / step).ceil() as usize;
                let mut acc = 0.0;
                for i in 0..n {
                    let r0 = -(i as f64 + 1.0) * step;
                    let r1 = -(i as f64) * step;
                    let f0 = self.eval(r0).abs() * (eta * r0).exp();
                    let f1 = self.eval(r1).abs() * (eta * r1).exp();
                    acc += 0.5 * (f0 + f1) * step;
                }
                values.push(acc);
            }
            let grow1 = values[1] - values[0];
            let grow2 = values[2] - values[1];
            // Doubling the horizon must add geometrically less mass.
            let converged = grow2 <= 0.5 * grow1 + 1e-12 * values[2].max(1.0);
            entries.push(CertificateEntry { eta, converged, value: values[2] });
        }
        Ok(CertificateReport { entries })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertificateEntry {
    pub eta: f64,
    pub converged: bool,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub entries: Vec<CertificateEntry>,
}

impl CertificateReport {
    pub fn all_converged(&self) -> bool {
        self.entries.iter().all(|e| e.converged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_envelope_is_exponentially_integrable() {
        let f = ScalarEnvelope::Constant(1.0);
        assert!(f.is_exponentially_integrable());
        let report = f.certify_exponential_integrability(&[0.5, 1.0, 2.0], 20.0).unwrap();
        assert!(report.all_converged());
        // int_{-inf}^0 e^{eta r} dr = 1/eta
        for e in &report.entries {
            assert!((e.value - 1.0 / e.eta).abs() < 1e-3, "eta {}: {}", e.eta, e.value);
        }
    }

    #[test]
    fn zero_eta_is_rejected() {
        let f = ScalarEnvelope::Constant(1.0);
        assert!(f.certify_exponential_integrability(&[0.0], 10.0).is_err());
    }

    #[test]
    fn growing_envelope_fails_certification() {
        let f = ScalarEnvelope::ExpGrowth { rate: 1.0 };
        assert!(!f.is_exponentially_integrable());
        let report = f.certify_exponential_integrability(&[0.5], 10.0).unwrap();
        assert!(!report.all_converged());
    }
}
