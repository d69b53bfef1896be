//! RCLA valuation.
//!
//! The contract pays a real lifetime income of `rate_s × notional` per year,
//! commencing at the first-passage time τ of the withdrawal-adjusted wealth
//! diffusion dW = (νW − w)dt + σW dB (W₀ = notional, w the annual income) to
//! zero, provided the annuitant is then alive. Mortality is diversifiable, so
//! the value is
//!
//!   w · E[ 1{τ < T_max} · e^{−rτ} · ₜpₓ(τ) · ā(x+τ) ]
//!
//! with T_max the years to the terminal age of 120. Three engines compute it:
//! a Monte Carlo estimator ([`price_mc`]), an implicit finite-difference solver
//! ([`price_pde`]) and, for σ=0, a closed form ([`price_deterministic`]) that
//! serves as the degenerate oracle for the other two.

mod deterministic;
mod mc;
mod pde;
mod table;

pub use deterministic::price_deterministic;
pub use mc::{price_mc, McConfig};
pub use pde::{price_pde, GridSpec};
pub use table::{gmwb_embedded_value, table2, EngineChoice, Table2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mortality::{GompertzParams, TERMINAL_AGE};
use crate::params::MarketParams;

/// The instrument: purchase age, spending rate and notional. The annual real
/// income if ruin occurs is `rate_s × notional`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RclaContract {
    pub purchase_age: f64,
    pub rate_s: f64,
    pub notional: f64,
}

impl RclaContract {
    pub fn new(purchase_age: f64, rate_s: f64, notional: f64) -> Result<Self> {
        if !(rate_s > 0.0 && rate_s < 1.0) {
            return Err(Error::Invalid(format!(
                "spending rate must lie in (0, 1), got {rate_s}"
            )));
        }
        if !(notional > 0.0) {
            return Err(Error::Invalid(format!(
                "notional must be positive, got {notional}"
            )));
        }
        if !(purchase_age >= 0.0) {
            return Err(Error::Invalid(format!(
                "purchase age must be >= 0, got {purchase_age}"
            )));
        }
        Ok(RclaContract {
            purchase_age,
            rate_s,
            notional,
        })
    }

    pub fn annual_income(&self) -> f64 {
        self.rate_s * self.notional
    }

    /// Deferral horizon: years until the terminal age.
    pub fn max_horizon(&self) -> f64 {
        (TERMINAL_AGE - self.purchase_age).max(0.0)
    }

    /// Initial wealth per unit of annual income, W₀/w = 1/rate_s.
    pub fn normalized_initial_wealth(&self) -> f64 {
        1.0 / self.rate_s
    }
}

/// Which engine produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Mc,
    Pde,
    ClosedForm,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Engine::Mc => write!(f, "mc"),
            Engine::Pde => write!(f, "pde"),
            Engine::ClosedForm => write!(f, "closed_form"),
        }
    }
}

/// Engine-specific diagnostics carried alongside a value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Diagnostics {
    Mc {
        n_paths: u64,
        dt_years: f64,
        seed: u64,
        ruin_fraction: f64,
        simulate_mortality: bool,
    },
    Pde {
        n_space: usize,
        n_age_steps: usize,
        u_max: f64,
        du: f64,
        d_age: f64,
        value_fine: f64,
        value_coarse: f64,
        /// |fine − coarse|, a conservative error estimate for the
        /// extrapolated value.
        richardson_error: f64,
    },
    ClosedForm {
        /// Deterministic ruin time in years, absent when ruin never occurs.
        ruin_time: Option<f64>,
    },
}

/// Full input record echoed into every result so a pricing is reproducible
/// from the result alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub r: f64,
    pub mu: f64,
    pub sigma: f64,
    pub gompertz_m: f64,
    pub gompertz_b: f64,
    pub age: f64,
    pub rate: f64,
    pub notional: f64,
}

impl ParamsEcho {
    pub fn new(contract: &RclaContract, mkt: &MarketParams, g: &GompertzParams) -> Self {
        ParamsEcho {
            r: mkt.r_real,
            mu: mkt.mu_real,
            sigma: mkt.sigma,
            gompertz_m: g.m,
            gompertz_b: g.b,
            age: contract.purchase_age,
            rate: contract.rate_s,
            notional: contract.notional,
        }
    }
}

/// A priced RCLA with engine diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    pub value: f64,
    pub engine: Engine,
    /// Standard error of the estimate (Monte Carlo only).
    pub std_error: Option<f64>,
    pub drift_mode: crate::params::DriftMode,
    pub diagnostics: Diagnostics,
    pub params_echo: ParamsEcho,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    engine: Engine,
    value: f64,
    std_error: Option<f64>,
    n_paths: Option<u64>,
    seed: Option<u64>,
    drift_mode: crate::params::DriftMode,
    params: &'a ParamsEcho,
    diagnostics: &'a Diagnostics,
}

impl PricingResult {
    /// Stable-schema JSON report.
    pub fn to_json(&self) -> String {
        let (n_paths, seed) = match self.diagnostics {
            Diagnostics::Mc { n_paths, seed, .. } => (Some(n_paths), Some(seed)),
            _ => (None, None),
        };
        let doc = ResultJson {
            engine: self.engine,
            value: self.value,
            std_error: self.std_error,
            n_paths,
            seed,
            drift_mode: self.drift_mode,
            params: &self.params_echo,
            diagnostics: &self.diagnostics,
        };
        serde_json::to_string_pretty(&doc).expect("pricing result serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DriftMode;

    #[test]
    fn contract_validation() {
        assert!(RclaContract::new(57.0, 0.07, 100_000.0).is_ok());
        assert!(RclaContract::new(57.0, 0.0, 100_000.0).is_err());
        assert!(RclaContract::new(57.0, 1.0, 100_000.0).is_err());
        assert!(RclaContract::new(57.0, 0.05, 0.0).is_err());
        assert!(RclaContract::new(-1.0, 0.05, 1.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let c = RclaContract::new(57.0, 0.07, 100_000.0).unwrap();
        assert_eq!(c.annual_income(), 7_000.0);
        assert_eq!(c.max_horizon(), 63.0);
        assert!((c.normalized_initial_wealth() - 1.0 / 0.07).abs() < 1e-12);
    }

    #[test]
    fn json_schema_has_stable_field_names() {
        let contract = RclaContract::new(62.0, 0.05, 100_000.0).unwrap();
        let mkt = MarketParams::default();
        let g = GompertzParams::default();
        let result = PricingResult {
            value: 1234.5,
            engine: Engine::ClosedForm,
            std_error: None,
            drift_mode: DriftMode::RealWorld,
            diagnostics: Diagnostics::ClosedForm {
                ruin_time: Some(10.0),
            },
            params_echo: ParamsEcho::new(&contract, &mkt, &g),
        };
        let json = result.to_json();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in [
            "engine",
            "value",
            "std_error",
            "n_paths",
            "seed",
            "drift_mode",
            "params",
            "diagnostics",
        ] {
            assert!(doc.get(key).is_some(), "missing key {key}");
        }
        for key in [
            "r",
            "mu",
            "sigma",
            "gompertz_m",
            "gompertz_b",
            "age",
            "rate",
            "notional",
        ] {
            assert!(doc["params"].get(key).is_some(), "missing params key {key}");
        }
        assert_eq!(doc["engine"], "closed_form");
        assert_eq!(doc["drift_mode"], "real_world");
        assert!(doc["n_paths"].is_null());
    }
}
