//! Gompertz mortality and the real immediate life annuity factor.
//!
//! Survival follows the Gompertz law with modal age `m` and dispersion `b`:
//! hazard λ(x) = (1/b)·e^{(x−m)/b}, so the t-year survival of an x-year-old is
//! exp(e^{(x−m)/b}·(1 − e^{t/b})). The annuity factor is the price per $1/yr of
//! continuously paid real lifetime income, ∫ e^{−rt}·ₜpₓ dt, truncated at a
//! terminal age of 120 (the tail beyond contributes < 1e-8 at these parameters).

use crate::error::{Error, Result};

/// Integration/terminal age shared by the annuity factor and the pricing engines.
pub const TERMINAL_AGE: f64 = 120.0;

/// Gompertz law parameters: modal age `m` and dispersion `b`, both in years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GompertzParams {
    pub m: f64,
    pub b: f64,
}

impl GompertzParams {
    pub fn new(m: f64, b: f64) -> Result<Self> {
        if !(m > 0.0 && b > 0.0) {
            return Err(Error::Invalid(format!(
                "Gompertz parameters must be positive, got m={m}, b={b}"
            )));
        }
        Ok(GompertzParams { m, b })
    }
}

impl Default for GompertzParams {
    /// m = 87.8, b = 9.5 (unisex).
    fn default() -> Self {
        GompertzParams { m: 87.8, b: 9.5 }
    }
}

/// Probability that an `x`-year-old survives `t` more years.
pub fn survival(x: f64, t: f64, g: &GompertzParams) -> f64 {
    debug_assert!(x >= 0.0 && t >= 0.0);
    (((x - g.m) / g.b).exp() * (1.0 - (t / g.b).exp())).exp()
}

/// Instantaneous mortality hazard at age `x` (1/yr).
pub fn hazard(x: f64, g: &GompertzParams) -> f64 {
    debug_assert!(x >= 0.0);
    ((x - g.m) / g.b).exp() / g.b
}

/// Price of $1/yr of real lifetime income paid continuously to an `x`-year-old,
/// discounted at the real rate `r`. Composite Simpson quadrature at step
/// <= 1/120 year over [0, 120 − x].
pub fn annuity_factor(x: f64, r: f64, g: &GompertzParams) -> f64 {
    let horizon = TERMINAL_AGE - x;
    if horizon <= 0.0 {
        return 0.0;
    }
    let step = 1.0 / 120.0;
    let mut n = (horizon / step).ceil() as usize;
    n += n % 2; // Simpson needs an even interval count
    let h = horizon / n as f64;
    let f = |t: f64| (-r * t).exp() * survival(x, t, g);
    let mut acc = f(0.0) + f(horizon);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(k as f64 * h);
    }
    acc * h / 3.0
}

/// Annuity factors precomputed on a uniform age grid, for fast repeated lookup
/// inside the Monte Carlo engine (linear interpolation between nodes).
#[derive(Debug, Clone)]
pub struct AnnuityCurve {
    min_age: f64,
    step: f64,
    values: Vec<f64>,
}

impl AnnuityCurve {
    /// Tabulate ā(x) from `min_age` to the terminal age at `steps_per_year` nodes/yr.
    pub fn new(min_age: f64, steps_per_year: usize, r: f64, g: &GompertzParams) -> Self {
        assert!(steps_per_year >= 1);
        let n = ((TERMINAL_AGE - min_age) * steps_per_year as f64).ceil() as usize;
        let n = n.max(1);
        let step = (TERMINAL_AGE - min_age) / n as f64;
        let values = (0..=n)
            .map(|k| annuity_factor(min_age + k as f64 * step, r, g))
            .collect();
        AnnuityCurve {
            min_age,
            step,
            values,
        }
    }

    pub fn value(&self, age: f64) -> f64 {
        if age >= TERMINAL_AGE {
            return 0.0;
        }
        let pos = (age - self.min_age) / self.step;
        debug_assert!(pos >= -1e-9, "age {age} below curve start {}", self.min_age);
        let pos = pos.max(0.0);
        let i = (pos as usize).min(self.values.len() - 2);
        let w = pos - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}
