//! Finite-difference valuation of the RCLA.
//!
//! Working per $1/yr of income with normalized wealth u = W/w, the value
//! a(u, x) of the contract for an x-year-old satisfies
//!
//!   a_x + ½σ²u²·a_uu + (νu − 1)·a_u − (r + λ(x))·a = 0
//!
//! marching backward in age from a(u, 120) = 0, with a(0, x) = ā(x) (ruin means
//! immediate annuitization) and a(u_max, x) = 0 far afield. The contract value
//! is w·a(1/rate_s, purchase_age).
//!
//! Scheme: implicit Euler in age with a hybrid spatial stencil — central
//! differences for the convection term wherever the implicit matrix stays an
//! M-matrix, one-sided (upwind) differences elsewhere. Refining du and the age
//! step together shows clean first-order convergence, so the engine solves on
//! the requested grid and on a half-resolution grid and returns the Richardson
//! extrapolation 2·fine − coarse; diagnostics carry both raw values and their
//! gap as the error estimate.

use crate::error::{Error, Result};
use crate::mortality::{annuity_factor, hazard, GompertzParams, TERMINAL_AGE};
use crate::params::MarketParams;
use crate::pricing::{Diagnostics, Engine, ParamsEcho, PricingResult, RclaContract};

/// Spatial/age resolution for [`price_pde`]. `n_space` is the target number of
/// spatial intervals on [0, u_max] (at least 200); the actual count is snapped
/// so that the contract's initial state u₀ = 1/rate_s lands exactly on a node
/// of both the fine and the half-resolution grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_space: usize,
    pub steps_per_year: usize,
    /// Spatial truncation override; defaults to max(4/ν, 2/rate_s).
    pub u_max: Option<f64>,
}

impl GridSpec {
    pub fn new(n_space: usize, steps_per_year: usize) -> Self {
        GridSpec {
            n_space,
            steps_per_year,
            u_max: None,
        }
    }

    pub fn with_u_max(mut self, u_max: f64) -> Self {
        self.u_max = Some(u_max);
        self
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(4_000, 24)
    }
}

/// Price the contract with the finite-difference engine.
pub fn price_pde(
    contract: &RclaContract,
    mkt: &MarketParams,
    g: &GompertzParams,
    grid: &GridSpec,
) -> Result<PricingResult> {
    if grid.n_space < 200 {
        return Err(Error::Grid(format!(
            "need at least 200 spatial nodes, got {}",
            grid.n_space
        )));
    }
    if grid.steps_per_year < 2 {
        return Err(Error::Grid(format!(
            "need at least 2 age steps per year, got {}",
            grid.steps_per_year
        )));
    }

    let w = contract.annual_income();
    let nu = mkt.drift();
    let u0 = contract.normalized_initial_wealth();
    let horizon = contract.max_horizon();

    let required_extent = if nu > 0.0 {
        (4.0 / nu).max(2.0 / contract.rate_s)
    } else {
        // without positive drift every state ruins; wealth beyond the horizon's
        // total withdrawals is worthless anyway
        (2.0 / contract.rate_s).max(1.05 * horizon.max(1.0))
    };
    let u_max = grid.u_max.unwrap_or(required_extent);
    if u_max < required_extent - 1e-9 {
        return Err(Error::Grid(format!(
            "u_max {u_max} does not cover the required extent {required_extent}"
        )));
    }

    if horizon <= 0.0 {
        // past the terminal age: nothing to pay
        return Ok(PricingResult {
            value: 0.0,
            engine: Engine::Pde,
            std_error: None,
            drift_mode: mkt.drift_mode,
            diagnostics: Diagnostics::Pde {
                n_space: 0,
                n_age_steps: 0,
                u_max,
                du: 0.0,
                d_age: 0.0,
                value_fine: 0.0,
                value_coarse: 0.0,
                richardson_error: 0.0,
            },
            params_echo: ParamsEcho::new(contract, mkt, g),
        });
    }

    // snap du so u0 is a node index divisible by 4 (stays a node after two halvings)
    let target_du = u_max / grid.n_space as f64;
    let mut k0 = (u0 / target_du).round() as usize;
    k0 = k0.max(4);
    k0 += (4 - k0 % 4) % 4;
    let du = u0 / k0 as f64;
    let mut n = (u_max / du).ceil() as usize;
    n += (4 - n % 4) % 4;

    // age steps, even so the coarse grid can take every other one
    let mut n_age = (horizon * grid.steps_per_year as f64).ceil() as usize;
    n_age += n_age % 2;
    let d_age = horizon / n_age as f64;

    // annuity boundary values at the fine age nodes (age = 120 - j*d_age);
    // the coarse solve reuses every other node, so both grids see identical
    // boundary data
    let boundary: Vec<f64> = (0..=n_age)
        .map(|j| annuity_factor(TERMINAL_AGE - j as f64 * d_age, mkt.r_real, g))
        .collect();

    let fine = solve(n, du, n_age, d_age, &boundary, 1, k0, nu, mkt, g)?;
    let coarse_boundary_stride = 2;
    let coarse = solve(
        n / 2,
        2.0 * du,
        n_age / 2,
        2.0 * d_age,
        &boundary,
        coarse_boundary_stride,
        k0 / 2,
        nu,
        mkt,
        g,
    )?;

    let value = w * (2.0 * fine - coarse).max(0.0);

    Ok(PricingResult {
        value,
        engine: Engine::Pde,
        std_error: None,
        drift_mode: mkt.drift_mode,
        diagnostics: Diagnostics::Pde {
            n_space: n,
            n_age_steps: n_age,
            u_max: n as f64 * du,
            du,
            d_age,
            value_fine: w * fine,
            value_coarse: w * coarse,
            richardson_error: w * (fine - coarse).abs(),
        },
        params_echo: ParamsEcho::new(contract, mkt, g),
    })
}

/// One full backward sweep on an (n+1)-node grid; returns a(u0) at the
/// purchase age, where u0 sits at node `k0`.
#[allow(clippy::too_many_arguments)]
fn solve(
    n: usize,
    du: f64,
    n_age: usize,
    d_age: f64,
    boundary: &[f64],
    boundary_stride: usize,
    k0: usize,
    nu: f64,
    mkt: &MarketParams,
    g: &GompertzParams,
) -> Result<f64> {
    debug_assert!(k0 > 0 && k0 < n);
    let interior = n - 1;
    let purchase_age = TERMINAL_AGE - n_age as f64 * d_age;

    // age-independent stencil weights per interior node
    let mut lo = vec![0.0; interior];
    let mut hi = vec![0.0; interior];
    for i in 1..n {
        let u = i as f64 * du;
        let diff = 0.5 * mkt.sigma * mkt.sigma * u * u;
        let conv = nu * u - 1.0;
        let lo_c = diff / (du * du) - conv / (2.0 * du);
        let hi_c = diff / (du * du) + conv / (2.0 * du);
        if lo_c >= 0.0 && hi_c >= 0.0 {
            lo[i - 1] = lo_c;
            hi[i - 1] = hi_c;
        } else if conv >= 0.0 {
            lo[i - 1] = diff / (du * du);
            hi[i - 1] = diff / (du * du) + conv / du;
        } else {
            lo[i - 1] = diff / (du * du) - conv / du;
            hi[i - 1] = diff / (du * du);
        }
    }

    let mut a = vec![0.0; interior]; // a(u, 120) = 0
    let mut diag = vec![0.0; interior];
    let mut rhs = vec![0.0; interior];
    let mut scratch = vec![0.0; interior];

    for j in 1..=n_age {
        let x_new = TERMINAL_AGE - j as f64 * d_age;
        let reaction = mkt.r_real + hazard(x_new, g);
        let b0 = boundary[j * boundary_stride];

        for i in 0..interior {
            diag[i] = 1.0 + d_age * (lo[i] + hi[i] + reaction);
            rhs[i] = a[i];
        }
        rhs[0] += d_age * lo[0] * b0;
        // far-field Dirichlet 0 adds nothing to the last row

        thomas(&lo, &diag, &hi, &mut rhs, &mut scratch, d_age)?;
        std::mem::swap(&mut a, &mut rhs);
    }

    let value = a[k0 - 1];
    if !value.is_finite() {
        return Err(Error::Convergence(format!(
            "non-finite solution at age {purchase_age}"
        )));
    }
    Ok(value)
}

/// Tridiagonal solve of (I - d_age L): sub-diagonal is `-d_age*lo[i]`, diagonal
/// `diag[i]`, super-diagonal `-d_age*hi[i]`. Solution overwrites `rhs`.
fn thomas(
    lo: &[f64],
    diag: &[f64],
    hi: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
    d_age: f64,
) -> Result<()> {
    let n = diag.len();
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Convergence("singular tridiagonal system".into()));
    }
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = -d_age * hi[i - 1] / beta;
        beta = diag[i] - (-d_age * lo[i]) * scratch[i];
        if beta == 0.0 {
            return Err(Error::Convergence("singular tridiagonal system".into()));
        }
        rhs[i] = (rhs[i] - (-d_age * lo[i]) * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}
