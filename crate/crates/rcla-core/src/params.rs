//! Market model parameters shared by the synthetic generator and the pricing
//! engines. All rates are real (after-inflation), per year.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which drift drives the wealth diffusion.
///
/// `RealWorld` (ν = μ) is the default: it is the drift under which the model
/// reproduces the published reference values. `RiskNeutral` (ν = r) gives the
/// hedging-cost valuation instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMode {
    RiskNeutral,
    RealWorld,
}

impl std::fmt::Display for DriftMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DriftMode::RiskNeutral => write!(f, "risk_neutral"),
            DriftMode::RealWorld => write!(f, "real_world"),
        }
    }
}

impl std::str::FromStr for DriftMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "risk_neutral" => Ok(DriftMode::RiskNeutral),
            "real_world" => Ok(DriftMode::RealWorld),
            other => Err(Error::Invalid(format!(
                "unknown drift mode {other:?} (expected risk_neutral or real_world)"
            ))),
        }
    }
}

/// Diffusion and discounting parameters, in real terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Riskless real rate (1/yr), used for discounting.
    pub r_real: f64,
    /// Real expected return of the underlying index (1/yr).
    pub mu_real: f64,
    /// Volatility (1/sqrt(yr)).
    pub sigma: f64,
    /// Selects the diffusion drift ν: `RealWorld` → μ, `RiskNeutral` → r.
    pub drift_mode: DriftMode,
}

impl MarketParams {
    pub fn new(r_real: f64, mu_real: f64, sigma: f64, drift_mode: DriftMode) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Invalid(format!("sigma must be >= 0, got {sigma}")));
        }
        if !r_real.is_finite() || !mu_real.is_finite() {
            return Err(Error::Invalid("rates must be finite".into()));
        }
        Ok(MarketParams {
            r_real,
            mu_real,
            sigma,
            drift_mode,
        })
    }

    /// The drift ν selected by `drift_mode`.
    pub fn drift(&self) -> f64 {
        match self.drift_mode {
            DriftMode::RiskNeutral => self.r_real,
            DriftMode::RealWorld => self.mu_real,
        }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        MarketParams { sigma, ..self }
    }

    pub fn with_drift_mode(self, drift_mode: DriftMode) -> Self {
        MarketParams { drift_mode, ..self }
    }
}

impl Default for MarketParams {
    /// r = 2.5%, μ = 7%, σ = 20%, real-world drift.
    fn default() -> Self {
        MarketParams {
            r_real: 0.025,
            mu_real: 0.07,
            sigma: 0.20,
            drift_mode: DriftMode::RealWorld,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_follows_mode() {
        let p = MarketParams::default();
        assert_eq!(p.drift(), 0.07);
        assert_eq!(p.with_drift_mode(DriftMode::RiskNeutral).drift(), 0.025);
    }

    #[test]
    fn rejects_negative_sigma() {
        assert!(MarketParams::new(0.025, 0.07, -0.1, DriftMode::RealWorld).is_err());
    }
}
