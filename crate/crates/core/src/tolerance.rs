use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every operation.
///
/// `eps_zero` decides equality to zero, `eps_rank` decides rank and span
/// membership, `eps_feas` bounds residuals of feasibility solves and
/// distribution-level comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub eps_zero: f64,
    pub eps_rank: f64,
    pub eps_feas: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            eps_zero: 1e-10,
            eps_rank: 1e-9,
            eps_feas: 1e-8,
        }
    }
}

impl ToleranceConfig {
    /// Rejects negative or non-finite thresholds.
    ///
    /// Zero is accepted: every comparison against a tolerance is strict, so a
    /// zero threshold makes the corresponding checks fail instead of the
    /// configuration being refused.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eps_zero", self.eps_zero),
            ("eps_rank", self.eps_rank),
            ("eps_feas", self.eps_feas),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::config(
                    format!("tolerances.{name}"),
                    format!("must be a finite nonnegative number, got {value}"),
                ));
            }
        }
        Ok(())
    }

    /// True when all thresholds are strictly positive and `eps_zero <= eps_feas`.
    pub fn is_nominal(&self) -> bool {
        self.eps_zero > 0.0
            && self.eps_rank > 0.0
            && self.eps_feas > 0.0
            && self.eps_zero <= self.eps_feas
    }

    pub fn with_zero(mut self, eps: f64) -> Self {
        self.eps_zero = eps;
        self
    }

    pub fn with_rank(mut self, eps: f64) -> Self {
        self.eps_rank = eps;
        self
    }

    pub fn with_feas(mut self, eps: f64) -> Self {
        self.eps_feas = eps;
        self
    }
}
