//! Work gain of erasure bounded through the conditional von Neumann entropy.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::bounds::{gen_bell_terms, werner2_delta};
use crate::entropy::xlog2x;
use crate::error::{Error, Result};
use crate::states::validate_probabilities;

/// Boltzmann constant in J/K.
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;
pub const ROOM_TEMPERATURE: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoContext {
    pub temperature: f64,
    pub boltzmann: f64,
}

impl Default for ThermoContext {
    fn default() -> Self {
        Self::si(ROOM_TEMPERATURE)
    }
}

impl ThermoContext {
    pub fn si(temperature: f64) -> Self {
        Self {
            temperature,
            boltzmann: BOLTZMANN_SI,
        }
    }

    /// `k = T = 1`.
    pub fn natural() -> Self {
        Self {
            temperature: 1.0,
            boltzmann: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.temperature > 0.0 && self.boltzmann > 0.0 && self.kt().is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "temperature and Boltzmann constant must be positive, got T={}, k={}",
                self.temperature, self.boltzmann
            )))
        }
    }

    pub fn kt(&self) -> f64 {
        self.boltzmann * self.temperature
    }
}

/// A work bound, or the reason its premise fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WorkVerdict {
    Bound { value: f64 },
    OutOfPremise { reason: String },
}

impl WorkVerdict {
    pub fn value(&self) -> Option<f64> {
        match self {
            WorkVerdict::Bound { value } => Some(*value),
            WorkVerdict::OutOfPremise { .. } => None,
        }
    }
}

/// `−S(A|B)·kT·ln 2`, the lower bound on the work gain.
pub fn work_gain_lower(s_cond: f64, ctx: &ThermoContext) -> Result<f64> {
    ctx.validate()?;
    Ok(-s_cond * ctx.kt() * LN_2)
}

/// Two-qubit Werner: `W_g > kT·3δ·ln(2δ)` when FEF > 1/2.
pub fn werner2_work_gain(p: f64, ctx: &ThermoContext) -> Result<WorkVerdict> {
    ctx.validate()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    if (1.0 + 3.0 * p) / 4.0 <= 0.5 {
        return Ok(WorkVerdict::OutOfPremise {
            reason: format!("FEF={} <= 1/2", (1.0 + 3.0 * p) / 4.0),
        });
    }
    let delta = werner2_delta(p);
    Ok(WorkVerdict::Bound {
        value: ctx.kt() * 1.5 * xlog2x(2.0 * delta) * LN_2,
    })
}

/// Generalized Bell-diagonal: `W_g > kT·ln(β/d^{F−1})` when F > 1/d and every non-maximal weight is positive.
pub fn genbell_work_gain(d: usize, probs: &[f64], ctx: &ThermoContext) -> Result<WorkVerdict> {
    ctx.validate()?;
    if d < 2 || probs.len() != d * d {
        return Err(Error::InvalidParameter(format!(
            "expected d >= 2 and d^2 weights, got d={d}, {} weights",
            probs.len()
        )));
    }
    validate_probabilities(probs)?;
    let terms = gen_bell_terms(probs, 2.0);
    let df = d as f64;
    if terms.fef <= 1.0 / df {
        return Ok(WorkVerdict::OutOfPremise {
            reason: format!("FEF={} <= 1/d", terms.fef),
        });
    }
    if !terms.positive {
        return Ok(WorkVerdict::OutOfPremise {
            reason: "a non-maximal weight is zero".into(),
        });
    }
    let ln_q = terms.beta.ln() - (terms.fef - 1.0) * df.ln();
    Ok(WorkVerdict::Bound {
        value: ctx.kt() * ln_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::werner2_cvne;

    #[test]
    fn lower_bound_examples() {
        let n = ThermoContext::natural();
        assert!((work_gain_lower(-1.0, &n).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(work_gain_lower(0.0, &n).unwrap(), 0.0);
        let v = work_gain_lower(werner2_cvne(0.9), &n).unwrap();
        assert!((v - 0.4968163 * LN_2).abs() < 1e-6);
        let bad = ThermoContext {
            temperature: -1.0,
            boltzmann: 1.0,
        };
        assert!(work_gain_lower(0.0, &bad).is_err());
    }

    #[test]
    fn werner_examples() {
        let n = ThermoContext::natural();
        let v = werner2_work_gain(0.9, &n).unwrap().value().unwrap();
        assert!((v + 0.224679).abs() < 1e-6);
        assert_eq!(werner2_work_gain(1.0, &n).unwrap().value(), Some(0.0));
        assert!(matches!(
            werner2_work_gain(0.2, &n).unwrap(),
            WorkVerdict::OutOfPremise { .. }
        ));
    }

    #[test]
    fn genbell_examples() {
        let n = ThermoContext::natural();
        let v = genbell_work_gain(2, &[0.9, 0.05, 0.03, 0.02], &n)
            .unwrap()
            .value()
            .unwrap();
        assert!((v + 0.263909).abs() < 1e-6);
        assert!(genbell_work_gain(2, &[1.0, 0.0, 0.0, 0.0], &n)
            .unwrap()
            .value()
            .is_none());
        assert!(genbell_work_gain(2, &[0.25; 4], &n)
            .unwrap()
            .value()
            .is_none());
    }

    #[test]
    fn bounds_scale_linearly_with_temperature() {
        let a = ThermoContext::si(100.0);
        let b = ThermoContext::si(300.0);
        let wa = werner2_work_gain(0.7, &a).unwrap().value().unwrap();
        let wb = werner2_work_gain(0.7, &b).unwrap().value().unwrap();
        assert!((wb / wa - 3.0).abs() < 1e-12);
    }
}
