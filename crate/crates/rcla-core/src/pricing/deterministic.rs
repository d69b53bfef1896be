//! Closed form for the degenerate σ=0 diffusion.
//!
//! With σ=0 the wealth ODE dW = (νW − w)dt has the explicit solution
//! W(t) = (W₀ − w/ν)e^{νt} + w/ν. If W₀ ≥ w/ν the wealth never falls, so ruin
//! never happens and the contract is worthless. Otherwise it hits zero at
//! τ = (1/ν)·ln((w/ν)/(w/ν − W₀)), and the value is the deterministic payoff
//! e^{−rτ}·ₜpₓ(τ)·w·ā(x+τ). This is the oracle the stochastic engines are
//! cross-checked against.

use crate::error::{Error, Result};
use crate::mortality::{annuity_factor, survival, GompertzParams};
use crate::params::MarketParams;
use crate::pricing::{Diagnostics, Engine, ParamsEcho, PricingResult, RclaContract};

/// Deterministic ruin time for drift ν, income w and initial wealth w0, or
/// `None` when ruin never occurs. ν ≤ 0 always ruins.
pub(crate) fn deterministic_ruin_time(nu: f64, w: f64, w0: f64) -> Option<f64> {
    debug_assert!(w > 0.0 && w0 > 0.0);
    if nu <= 0.0 {
        if nu == 0.0 {
            return Some(w0 / w);
        }
        // integrate dW = (nu W - w)dt exactly: same formula, threshold negative
        let thr = w / nu;
        return Some((thr / (thr - w0)).ln() / nu);
    }
    let thr = w / nu;
    if w0 >= thr {
        None
    } else {
        Some((thr / (thr - w0)).ln() / nu)
    }
}

/// Price the contract under σ=0. Rejects σ ≠ 0.
pub fn price_deterministic(
    contract: &RclaContract,
    mkt: &MarketParams,
    g: &GompertzParams,
) -> Result<PricingResult> {
    if mkt.sigma != 0.0 {
        return Err(Error::Invalid(format!(
            "closed form requires sigma = 0, got {}",
            mkt.sigma
        )));
    }
    let w = contract.annual_income();
    let x = contract.purchase_age;
    let tau = deterministic_ruin_time(mkt.drift(), w, contract.notional);
    let value = match tau {
        Some(t) if t < contract.max_horizon() => {
            (-mkt.r_real * t).exp() * survival(x, t, g) * w * annuity_factor(x + t, mkt.r_real, g)
        }
        _ => 0.0,
    };
    Ok(PricingResult {
        value,
        engine: Engine::ClosedForm,
        std_error: None,
        drift_mode: mkt.drift_mode,
        diagnostics: Diagnostics::ClosedForm { ruin_time: tau },
        params_echo: ParamsEcho::new(contract, mkt, g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DriftMode;
    use approx::assert_relative_eq;

    fn sigma0(nu: f64, r: f64) -> MarketParams {
        MarketParams::new(r, nu, 0.0, DriftMode::RealWorld).unwrap()
    }

    #[test]
    fn ruin_time_matches_log_formula() {
        // nu=0.025, w=7000, W0=100000: threshold 280000, tau = 40 ln(280/180)
        let tau = deterministic_ruin_time(0.025, 7_000.0, 100_000.0).unwrap();
        assert_relative_eq!(tau, 40.0 * (280.0_f64 / 180.0).ln(), max_relative = 1e-12);
        assert_relative_eq!(tau, 17.673310, max_relative = 1e-6);
    }

    #[test]
    fn ruin_time_agrees_with_explicit_ode_integration() {
        // forward-Euler integrate dW = (nu W - w)dt at a tiny step and compare
        let (nu, w, w0) = (0.025, 7_000.0, 100_000.0);
        let dt = 1e-5;
        let mut wealth = w0;
        let mut t = 0.0;
        while wealth > 0.0 {
            wealth += (nu * wealth - w) * dt;
            t += dt;
        }
        let tau = deterministic_ruin_time(nu, w, w0).unwrap();
        assert!((t - tau).abs() < 1e-3, "ode {t} vs closed form {tau}");
    }

    #[test]
    fn no_ruin_at_or_above_threshold() {
        // w/nu = 7000/0.07 = 100000 exactly at the initial wealth
        assert_eq!(deterministic_ruin_time(0.07, 7_000.0, 100_000.0), None);
        let contract = RclaContract::new(57.0, 0.07, 100_000.0).unwrap();
        let result = price_deterministic(&contract, &sigma0(0.07, 0.025), &GompertzParams::default())
            .unwrap();
        assert_eq!(result.value, 0.0);
    }

    #[test]
    fn zero_and_negative_drift_always_ruin() {
        assert_relative_eq!(
            deterministic_ruin_time(0.0, 5.0, 100.0).unwrap(),
            20.0,
            max_relative = 1e-12
        );
        let t = deterministic_ruin_time(-0.02, 5.0, 100.0).unwrap();
        assert!(t > 0.0 && t < 20.0); // negative drift ruins sooner than zero drift
    }

    #[test]
    fn value_composition_at_reference_point() {
        let g = GompertzParams::default();
        let contract = RclaContract::new(57.0, 0.07, 100_000.0).unwrap();
        let result = price_deterministic(&contract, &sigma0(0.025, 0.025), &g).unwrap();
        let tau = 17.673309906; // 40 ln(14/9)
        let expected = (-0.025_f64 * tau).exp()
            * crate::mortality::survival(57.0, tau, &g)
            * 7_000.0
            * crate::mortality::annuity_factor(57.0 + tau, 0.025, &g);
        assert_relative_eq!(result.value, expected, max_relative = 1e-6);
        // frozen from an independent quadrature of the same composition
        assert_relative_eq!(result.value, 38_056.319, max_relative = 1e-4);
    }

    #[test]
    fn extreme_discounting_kills_the_value() {
        let contract = RclaContract::new(57.0, 0.07, 100_000.0).unwrap();
        let mkt = sigma0(0.025, 50.0);
        let result = price_deterministic(&contract, &mkt, &GompertzParams::default()).unwrap();
        assert!(result.value < 1e-6);
    }

    #[test]
    fn rejects_nonzero_sigma() {
        let contract = RclaContract::new(57.0, 0.07, 100_000.0).unwrap();
        let mkt = MarketParams::default();
        assert!(price_deterministic(&contract, &mkt, &GompertzParams::default()).is_err());
    }

    #[test]
    fn ruin_past_terminal_age_is_worthless() {
        // very low income relative to wealth: tau beyond 120 - age
        let contract = RclaContract::new(115.0, 0.011, 100_000.0).unwrap();
        let mkt = sigma0(0.001, 0.025);
        let result = price_deterministic(&contract, &mkt, &GompertzParams::default()).unwrap();
        // tau ~ 90+ years but only 5 remain
        assert_eq!(result.value, 0.0);
    }
}
