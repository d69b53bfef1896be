//! Monte Carlo pricing of the RCLA.
//!
//! Paths evolve the normalized wealth u = W/w (w the annual income) by Euler
//! steps du = (νu − 1)dt + σu·√dt·Z from u₀ = 1/rate_s, with a ruin check every
//! step; the crossing time inside the ruining step is located by linear
//! interpolation of the endpoints. Mortality is diversifiable, so each ruined
//! path contributes the deterministic weight e^{−rτ}·ₜpₓ(τ)·ā(x+τ) rather than
//! a simulated death (an optional mode simulates explicit death times as a
//! variance-for-variance cross-check of that treatment).
//!
//! Reproducibility: path i always draws from ChaCha stream i of the seeded
//! generator, so the estimate is bit-identical regardless of how many threads
//! batches land on; batch partial sums are reduced in fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::mortality::{survival, AnnuityCurve, GompertzParams, TERMINAL_AGE};
use crate::params::MarketParams;
use crate::pricing::{Diagnostics, Engine, ParamsEcho, PricingResult, RclaContract};

/// Monte Carlo engine configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: u64,
    /// Euler step in years; must satisfy 0 < dt <= 1/12.
    pub dt_years: f64,
    pub seed: u64,
    /// Simulate explicit Gompertz death times instead of weighting by survival.
    /// Same expectation, roughly double the variance; off by default.
    pub simulate_mortality: bool,
}

impl McConfig {
    pub const DEFAULT_DT: f64 = 1.0 / 240.0;

    pub fn new(n_paths: u64, dt_years: f64, seed: u64) -> Self {
        assert!(n_paths >= 1, "n_paths must be >= 1");
        assert!(
            dt_years > 0.0 && dt_years <= 1.0 / 12.0,
            "dt must lie in (0, 1/12]"
        );
        McConfig {
            n_paths,
            dt_years,
            seed,
            simulate_mortality: false,
        }
    }

    pub fn with_simulated_mortality(mut self) -> Self {
        self.simulate_mortality = true;
        self
    }
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig::new(200_000, Self::DEFAULT_DT, 1)
    }
}

const BATCH: u64 = 4096;

struct BatchSums {
    sum: f64,
    sum_sq: f64,
    ruined: u64,
}

/// Estimate the contract value by Monte Carlo. Returns the value, its standard
/// error and path diagnostics; identical inputs and seed give identical output.
pub fn price_mc(
    contract: &RclaContract,
    mkt: &MarketParams,
    g: &GompertzParams,
    cfg: &McConfig,
) -> PricingResult {
    let w = contract.annual_income();
    let x = contract.purchase_age;
    let nu = mkt.drift();
    let r = mkt.r_real;
    let t_max = contract.max_horizon();
    let dt = cfg.dt_years;
    let n_steps = (t_max / dt).ceil() as u64;
    let u0 = contract.normalized_initial_wealth();
    let sqrt_dt = dt.sqrt();

    // payoff per $1/yr of income given ruin at tau (diversified mortality)
    let curve = AnnuityCurve::new(x.min(TERMINAL_AGE), 12, r, g);
    let payoff_at = |tau: f64| (-r * tau).exp() * survival(x, tau, g) * curve.value(x + tau);

    let n_batches = cfg.n_paths.div_ceil(BATCH);
    let batches: Vec<BatchSums> = (0..n_batches)
        .into_par_iter()
        .map(|batch| {
            let lo = batch * BATCH;
            let hi = (lo + BATCH).min(cfg.n_paths);
            let mut sums = BatchSums {
                sum: 0.0,
                sum_sq: 0.0,
                ruined: 0,
            };
            for path in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(path);

                // death time first so the shock stream is mode-independent
                let death_time = if cfg.simulate_mortality {
                    let uniform: f64 = rng.random();
                    Some(gompertz_death_time(x, uniform, g).min(t_max))
                } else {
                    None
                };

                let tau = simulate_ruin_time(&mut rng, u0, nu, mkt.sigma, dt, sqrt_dt, n_steps, t_max);

                let payoff = match (tau, death_time) {
                    (Some(tau), None) => payoff_at(tau),
                    (Some(tau), Some(td)) if tau < td => annuity_pv(r, tau, td),
                    _ => 0.0,
                };
                if tau.is_some() {
                    sums.ruined += 1;
                }
                sums.sum += payoff;
                sums.sum_sq += payoff * payoff;
            }
            sums
        })
        .collect();

    // fixed-order reduction keeps the estimate independent of thread count
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut ruined = 0u64;
    for b in &batches {
        sum += b.sum;
        sum_sq += b.sum_sq;
        ruined += b.ruined;
    }

    let n = cfg.n_paths as f64;
    let mean = sum / n;
    let variance = ((sum_sq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
    let std_error = w * (variance / n).sqrt();

    PricingResult {
        value: w * mean,
        engine: Engine::Mc,
        std_error: Some(std_error),
        drift_mode: mkt.drift_mode,
        diagnostics: Diagnostics::Mc {
            n_paths: cfg.n_paths,
            dt_years: dt,
            seed: cfg.seed,
            ruin_fraction: ruined as f64 / n,
            simulate_mortality: cfg.simulate_mortality,
        },
        params_echo: ParamsEcho::new(contract, mkt, g),
    }
}

/// Euler-march one path; returns the ruin time if wealth reaches zero before
/// `t_max`. The crossing inside the ruining step is linearly interpolated.
#[allow(clippy::too_many_arguments)]
fn simulate_ruin_time(
    rng: &mut ChaCha8Rng,
    u0: f64,
    nu: f64,
    sigma: f64,
    dt: f64,
    sqrt_dt: f64,
    n_steps: u64,
    t_max: f64,
) -> Option<f64> {
    let mut u = u0;
    if sigma == 0.0 {
        for k in 0..n_steps {
            let next = u + (nu * u - 1.0) * dt;
            if next <= 0.0 {
                let theta = u / (u - next);
                return Some(cap_tau((k as f64 + theta) * dt, t_max));
            }
            u = next;
        }
        return None;
    }
    for k in 0..n_steps {
        let z: f64 = StandardNormal.sample(rng);
        let next = u + (nu * u - 1.0) * dt + sigma * u * sqrt_dt * z;
        if next <= 0.0 {
            let theta = u / (u - next);
            return Some(cap_tau((k as f64 + theta) * dt, t_max));
        }
        u = next;
    }
    None
}

fn cap_tau(tau: f64, t_max: f64) -> f64 {
    if tau < t_max {
        tau
    } else {
        // the final partial step may interpolate past the horizon
        t_max - f64::EPSILON * t_max
    }
}

/// Inverse-CDF Gompertz death time for an `x`-year-old from a uniform draw.
fn gompertz_death_time(x: f64, uniform: f64, g: &GompertzParams) -> f64 {
    // survival(t) = exp(e^{(x-m)/b} (1 - e^{t/b})) = u  =>
    // t = b ln(1 - ln(u) e^{-(x-m)/b})
    let u = uniform.clamp(f64::MIN_POSITIVE, 1.0);
    g.b * (1.0 - u.ln() * (-(x - g.m) / g.b).exp()).ln()
}

/// Present value at time 0 of $1/yr paid continuously over [tau, td].
fn annuity_pv(r: f64, tau: f64, td: f64) -> f64 {
    if td <= tau {
        return 0.0;
    }
    if r.abs() < 1e-12 {
        td - tau
    } else {
        ((-r * tau).exp() - (-r * td).exp()) / r
    }
}
