//! The SwP pseudo-index: a total-return index level reduced each month by a
//! fixed, inflation-adjusted systematic withdrawal.
//!
//! Each monthly update grosses the level up by that month's total return, then
//! subtracts the monthly withdrawal (initial level × rate / 12) scaled by
//! cumulative CPI growth since the vintage month. The first month-end level at
//! which the index is ≤ 0 marks ruin; ruin is absorbing and the published level
//! is 0 from then on.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_data::AlignedMarket;
use crate::month::Month;

/// Defines one pseudo-index: vintage month, annual withdrawal rate (fraction of
/// the initial level) and the initial level itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwpConfig {
    vintage: Month,
    rate_s: f64,
    initial_level: f64,
}

impl SwpConfig {
    pub const DEFAULT_INITIAL_LEVEL: f64 = 100.0;

    pub fn new(vintage: Month, rate_s: f64, initial_level: f64) -> Result<Self> {
        if !(rate_s > 0.0 && rate_s < 1.0) {
            return Err(Error::Invalid(format!(
                "withdrawal rate must lie in (0, 1), got {rate_s}"
            )));
        }
        if !(initial_level > 0.0) {
            return Err(Error::Invalid(format!(
                "initial level must be positive, got {initial_level}"
            )));
        }
        Ok(SwpConfig {
            vintage,
            rate_s,
            initial_level,
        })
    }

    /// Vintage and rate with the standard initial level of 100.
    pub fn standard(vintage: Month, rate_s: f64) -> Result<Self> {
        Self::new(vintage, rate_s, Self::DEFAULT_INITIAL_LEVEL)
    }

    pub fn vintage(&self) -> Month {
        self.vintage
    }

    pub fn rate_s(&self) -> f64 {
        self.rate_s
    }

    pub fn initial_level(&self) -> f64 {
        self.initial_level
    }

    /// The fixed monthly withdrawal before inflation scaling.
    pub fn monthly_withdrawal_base(&self) -> f64 {
        self.initial_level * self.rate_s / 12.0
    }
}

/// One monthly index update: gross up by the total return, subtract the
/// inflation-scaled withdrawal. The result may be ≤ 0; the caller interprets
/// that as ruin. No flooring happens here.
pub fn step(
    level: f64,
    gross_return: f64,
    monthly_withdrawal_base: f64,
    cumulative_inflation: f64,
) -> f64 {
    debug_assert!(level > 0.0 && gross_return > 0.0 && cumulative_inflation > 0.0);
    level * gross_return - monthly_withdrawal_base * cumulative_inflation
}

/// One vintage's trajectory at one withdrawal rate.
///
/// `levels[k]` is the month-end level of month `vintage + k` (so `levels[0]`
/// already has one update applied). If `ruin_month` is set, the level at that
/// month and every later month is exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SwpIndexPath {
    config: SwpConfig,
    levels: Vec<f64>,
    ruin_month: Option<Month>,
}

impl SwpIndexPath {
    pub fn config(&self) -> &SwpConfig {
        &self.config
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn ruin_month(&self) -> Option<Month> {
        self.ruin_month
    }

    /// Calendar month of `levels[k]`.
    pub fn month_of(&self, k: usize) -> Month {
        self.config.vintage + k as i32
    }

    pub fn final_level(&self) -> f64 {
        *self.levels.last().expect("paths are never empty")
    }

    pub fn level_at(&self, m: Month) -> Option<f64> {
        let k = m.months_since(self.config.vintage);
        if k < 0 {
            return None;
        }
        self.levels.get(k as usize).copied()
    }

    /// Export as `month,level` CSV, levels with 4 decimal places; ruin and all
    /// later months print `0.0000`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("month,level\n");
        for (k, level) in self.levels.iter().enumerate() {
            out.push_str(&format!("{},{:.4}\n", self.month_of(k), level));
        }
        out
    }

    /// Canonical export file name: `swp_<vintage>_<rate-in-basis-points>.csv`.
    pub fn export_file_name(&self) -> String {
        let bps = (self.config.rate_s * 10_000.0).round() as i64;
        format!("swp_{}_{}.csv", self.config.vintage, bps)
    }
}

/// Run the monthly recursion over the market window. The market must start at
/// the config's vintage month; the path covers the whole window or stops being
/// interesting at ruin (levels stay 0 through the window end).
pub fn build_path(config: &SwpConfig, market: &AlignedMarket) -> Result<SwpIndexPath> {
    if market.start_month() != config.vintage {
        return Err(Error::Coverage(format!(
            "market window starts {} but vintage is {}",
            market.start_month(),
            config.vintage
        )));
    }
    let wd_base = config.monthly_withdrawal_base();
    let mut levels = Vec::with_capacity(market.len());
    let mut ruin_month = None;
    let mut level = config.initial_level;
    let mut cum_inflation = 1.0;

    for (k, (gross, infl)) in market
        .gross_returns()
        .iter()
        .zip(market.inflation_factors())
        .enumerate()
    {
        if ruin_month.is_some() {
            levels.push(0.0);
            continue;
        }
        cum_inflation *= infl;
        level = step(level, *gross, wd_base, cum_inflation);
        if level <= 0.0 {
            ruin_month = Some(config.vintage + k as i32);
            levels.push(0.0);
        } else {
            levels.push(level);
        }
    }

    Ok(SwpIndexPath {
        config: *config,
        levels,
        ruin_month,
    })
}

/// One path per (vintage, rate) pair, vintage-major then rate-minor. Every
/// vintage must lie inside the market window; each path runs from its vintage
/// to the window end. Cells are evaluated in parallel with deterministic order.
pub fn build_family(
    vintages: &[Month],
    rates: &[f64],
    market: &AlignedMarket,
) -> Result<Vec<SwpIndexPath>> {
    let cells: Vec<(Month, f64)> = vintages
        .iter()
        .flat_map(|v| rates.iter().map(move |r| (*v, *r)))
        .collect();
    cells
        .into_par_iter()
        .map(|(vintage, rate)| {
            let config = SwpConfig::standard(vintage, rate)?;
            build_path(&config, &market.starting_at(vintage)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::AlignedMarket;
    use crate::params::{DriftMode, MarketParams};
    use approx::assert_relative_eq;

    fn flat_market(n: usize) -> AlignedMarket {
        // gross factor exactly 1.0 every month, no inflation
        let params = MarketParams::new(0.0, 0.0, 0.0, DriftMode::RiskNeutral).unwrap();
        AlignedMarket::synth_gbm(&params, n, 0)
    }

    fn synth_start() -> Month {
        Month::new(AlignedMarket::SYNTH_START.0, AlignedMarket::SYNTH_START.1).unwrap()
    }

    #[test]
    fn step_worked_example() {
        // 2% gross return, 7% rate on an initial 100, 0.5% inflation in the month
        let v = step(100.0, 1.02, 7.0 / 12.0, 1.005);
        assert_relative_eq!(v, 101.41375, max_relative = 1e-12);
    }

    #[test]
    fn step_identity_and_plain_arithmetic() {
        assert_eq!(step(100.0, 1.0, 0.0, 1.0), 100.0);
        assert_relative_eq!(
            step(1.0, 1.0, 7.0 / 12.0, 1.0),
            1.0 - 7.0 / 12.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn flat_market_at_twelve_percent_ruins_at_month_100() {
        // withdrawal 1.0/month from 100 with no growth: level after k months is 100-k,
        // first non-positive month-end is update 100
        let market = flat_market(120);
        let config = SwpConfig::standard(synth_start(), 0.12).unwrap();
        let path = build_path(&config, &market).unwrap();
        assert_eq!(path.ruin_month(), Some(synth_start() + 99));
        assert_relative_eq!(path.levels()[98], 1.0, max_relative = 1e-9);
        assert_eq!(path.levels()[99], 0.0);
        assert!(path.levels()[100..].iter().all(|l| *l == 0.0));
    }

    #[test]
    fn negligible_withdrawals_track_total_return_growth() {
        let params = MarketParams::new(0.06, 0.06, 0.0, DriftMode::RiskNeutral).unwrap();
        let market = AlignedMarket::synth_gbm(&params, 36, 0);
        let config = SwpConfig::standard(synth_start(), 0.0001).unwrap();
        let path = build_path(&config, &market).unwrap();
        assert_eq!(path.ruin_month(), None);
        let pure_growth = 100.0 * (0.06_f64 * 3.0).exp();
        let rel = (path.final_level() - pure_growth).abs() / pure_growth;
        assert!(rel < 0.005, "final {} vs pure growth {pure_growth}", path.final_level());
    }

    #[test]
    fn inflation_compounds_from_vintage() {
        // constant 1% monthly inflation, flat returns: withdrawal k scales by 1.01^(k+1)
        let start = Month::new(1990, 1).unwrap();
        let returns = crate::market_data::MonthlySeries::new(
            start,
            vec![100.0; 4],
            crate::market_data::SeriesKind::TotalReturnIndex,
        )
        .unwrap();
        let cpi = crate::market_data::MonthlySeries::new(
            start,
            vec![100.0, 101.0, 102.01, 103.0301],
            crate::market_data::SeriesKind::CpiIndex,
        )
        .unwrap();
        let window = crate::market_data::MonthRange::new(start + 1, start + 3).unwrap();
        let market = AlignedMarket::align(&returns, &cpi, window).unwrap();
        let config = SwpConfig::new(start + 1, 0.12, 100.0).unwrap();
        let path = build_path(&config, &market).unwrap();
        let expected0 = 100.0 - 1.0 * 1.01;
        let expected1 = expected0 - 1.0 * 1.01 * 1.01;
        let expected2 = expected1 - 1.0 * 1.01_f64.powi(3);
        assert_relative_eq!(path.levels()[0], expected0, max_relative = 1e-12);
        assert_relative_eq!(path.levels()[1], expected1, max_relative = 1e-12);
        assert_relative_eq!(path.levels()[2], expected2, max_relative = 1e-12);
    }

    #[test]
    fn rate_dominance_until_higher_rate_ruins() {
        let params = MarketParams::default();
        let market = AlignedMarket::synth_gbm(&params, 240, 11);
        let rates = [0.04, 0.06, 0.08];
        let paths: Vec<_> = rates
            .iter()
            .map(|r| {
                build_path(&SwpConfig::standard(synth_start(), *r).unwrap(), &market).unwrap()
            })
            .collect();
        for k in 0..240 {
            assert!(paths[0].levels()[k] >= paths[1].levels()[k]);
            assert!(paths[1].levels()[k] >= paths[2].levels()[k]);
        }
    }

    #[test]
    fn scale_equivariance() {
        let params = MarketParams::default();
        let market = AlignedMarket::synth_gbm(&params, 120, 5);
        let base = build_path(
            &SwpConfig::new(synth_start(), 0.09, 100.0).unwrap(),
            &market,
        )
        .unwrap();
        let scaled = build_path(
            &SwpConfig::new(synth_start(), 0.09, 250.0).unwrap(),
            &market,
        )
        .unwrap();
        assert_eq!(base.ruin_month(), scaled.ruin_month());
        for (a, b) in base.levels().iter().zip(scaled.levels()) {
            assert_relative_eq!(*b, a * 2.5, max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    #[test]
    fn family_is_vintage_major_rate_minor_and_empty_rates_give_empty_family() {
        let params = MarketParams::default();
        let market = AlignedMarket::synth_gbm(&params, 48, 2);
        let v0 = synth_start();
        let vintages = [v0, v0 + 12];
        let rates = [0.05, 0.07];
        let family = build_family(&vintages, &rates, &market).unwrap();
        assert_eq!(family.len(), 4);
        assert_eq!(family[0].config().vintage(), v0);
        assert_eq!(family[0].config().rate_s(), 0.05);
        assert_eq!(family[1].config().vintage(), v0);
        assert_eq!(family[1].config().rate_s(), 0.07);
        assert_eq!(family[2].config().vintage(), v0 + 12);
        assert_eq!(family[2].levels().len(), 36);

        let empty = build_family(&vintages, &[], &market).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn market_not_starting_at_vintage_errors() {
        let market = flat_market(12);
        let config = SwpConfig::standard(synth_start() + 1, 0.05).unwrap();
        assert!(matches!(
            build_path(&config, &market),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn csv_export_prints_four_decimals_and_zero_after_ruin() {
        let market = flat_market(110);
        let config = SwpConfig::standard(synth_start(), 0.12).unwrap();
        let path = build_path(&config, &market).unwrap();
        let csv = path.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "month,level");
        assert_eq!(lines[1], "2000-01,99.0000");
        assert_eq!(lines[100], "2008-04,0.0000");
        assert_eq!(lines.last().unwrap(), &"2009-02,0.0000");
        assert_eq!(path.export_file_name(), "swp_2000-01_1200.csv");
    }

    #[test]
    fn rejects_out_of_range_rate() {
        assert!(SwpConfig::standard(synth_start(), 0.0).is_err());
        assert!(SwpConfig::standard(synth_start(), 1.0).is_err());
        assert!(SwpConfig::new(synth_start(), 0.05, 0.0).is_err());
    }
}
