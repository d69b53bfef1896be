//! Historical ruin analysis: for a grid of vintages and withdrawal rates, when
//! did each pseudo-index first hit zero (if ever, through the data horizon)?

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_data::AlignedMarket;
use crate::month::Month;
use crate::swp_index::{build_path, SwpConfig, SwpIndexPath};

/// Ruin months per (rate, vintage) cell; `None` means no ruin through the
/// horizon. Rows are rates, columns vintages, both in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RuinTable {
    pub rates: Vec<f64>,
    pub vintages: Vec<Month>,
    /// `cells[i][j]` is the ruin month at `rates[i]`, `vintages[j]`.
    pub cells: Vec<Vec<Option<Month>>>,
}

impl RuinTable {
    pub fn cell(&self, rate_idx: usize, vintage_idx: usize) -> Option<Month> {
        self.cells[rate_idx][vintage_idx]
    }

    /// CSV export: first column `rate`, one column per vintage, cells `YYYY-MM`
    /// or empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rate");
        for v in &self.vintages {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
        for (i, rate) in self.rates.iter().enumerate() {
            out.push_str(&format!("{rate}"));
            for j in 0..self.vintages.len() {
                match self.cells[i][j] {
                    Some(m) => out.push_str(&format!(",{m}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Compute the ruin table on `market`, evaluating each vintage from its start
/// through `horizon_end`. A cell is empty when the path never reaches zero by
/// the horizon (which is a statement about the data window, not about never).
pub fn table1(
    market: &AlignedMarket,
    vintages: &[Month],
    rates: &[f64],
    horizon_end: Month,
) -> Result<RuinTable> {
    let slices: Vec<AlignedMarket> = vintages
        .iter()
        .map(|v| market.starting_at(*v)?.ending_at(horizon_end))
        .collect::<Result<_>>()?;

    let cells: Vec<Vec<Option<Month>>> = rates
        .par_iter()
        .map(|rate| {
            vintages
                .iter()
                .zip(&slices)
                .map(|(vintage, slice)| {
                    let config = SwpConfig::standard(*vintage, *rate)?;
                    Ok(build_path(&config, slice)?.ruin_month())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(RuinTable {
        rates: rates.to_vec(),
        vintages: vintages.to_vec(),
        cells,
    })
}

/// Full trajectories for one withdrawal rate across several vintages, for
/// plotting. Each path runs from its vintage to the market window end.
pub fn figure1_data(
    market: &AlignedMarket,
    vintages: &[Month],
    rate: f64,
) -> Result<Vec<SwpIndexPath>> {
    vintages
        .iter()
        .map(|vintage| {
            let config = SwpConfig::standard(*vintage, rate)?;
            build_path(&config, &market.starting_at(*vintage)?)
        })
        .collect()
}

/// Check the structural invariant of a ruin table: within a vintage column,
/// higher rates ruin no later, and once a rate ruins every higher rate does too.
pub fn check_column_monotonicity(table: &RuinTable) -> Result<()> {
    // only meaningful when rates are sorted ascending
    let mut sorted = table.rates.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    if sorted != table.rates {
        return Err(Error::Invalid(
            "rates must be ascending for monotonicity check".into(),
        ));
    }
    for j in 0..table.vintages.len() {
        for i in 1..table.rates.len() {
            match (table.cells[i - 1][j], table.cells[i][j]) {
                (Some(lo), Some(hi)) if hi > lo => {
                    return Err(Error::Invalid(format!(
                        "rate {} ruins at {} after rate {} at {} for vintage {}",
                        table.rates[i],
                        hi,
                        table.rates[i - 1],
                        lo,
                        table.vintages[j]
                    )));
                }
                (Some(lo), None) => {
                    return Err(Error::Invalid(format!(
                        "rate {} ruined ({}) but higher rate {} did not, vintage {}",
                        table.rates[i - 1],
                        lo,
                        table.rates[i],
                        table.vintages[j]
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::AlignedMarket;
    use crate::params::{DriftMode, MarketParams};

    fn synth_start() -> Month {
        Month::new(AlignedMarket::SYNTH_START.0, AlignedMarket::SYNTH_START.1).unwrap()
    }

    #[test]
    fn flat_market_ruins_exactly_100_months_after_each_vintage() {
        let params = MarketParams::new(0.0, 0.0, 0.0, DriftMode::RiskNeutral).unwrap();
        let market = AlignedMarket::synth_gbm(&params, 240, 0);
        let v0 = synth_start();
        let vintages = [v0, v0 + 6, v0 + 24];
        let table = table1(&market, &vintages, &[0.12], market.end_month()).unwrap();
        for (j, v) in vintages.iter().enumerate() {
            assert_eq!(table.cell(0, j), Some(*v + 99));
        }
    }

    #[test]
    fn cells_equal_build_path_ruin_months() {
        let market = AlignedMarket::synth_gbm(&MarketParams::default(), 360, 17);
        let v0 = synth_start();
        let rates = [0.05, 0.08, 0.11];
        let table = table1(&market, &[v0 + 3], &rates, market.end_month()).unwrap();
        for (i, rate) in rates.iter().enumerate() {
            let config = SwpConfig::standard(v0 + 3, *rate).unwrap();
            let path = build_path(&config, &market.starting_at(v0 + 3).unwrap()).unwrap();
            assert_eq!(table.cell(i, 0), path.ruin_month());
        }
        check_column_monotonicity(&table).unwrap();
    }

    #[test]
    fn horizon_trims_the_evaluation() {
        let params = MarketParams::new(0.0, 0.0, 0.0, DriftMode::RiskNeutral).unwrap();
        let market = AlignedMarket::synth_gbm(&params, 240, 0);
        let v0 = synth_start();
        // ruin would occur at v0+99; a horizon before that leaves the cell empty
        let table = table1(&market, &[v0], &[0.12], v0 + 60).unwrap();
        assert_eq!(table.cell(0, 0), None);
    }

    #[test]
    fn empty_vintages_give_empty_figure_data() {
        let market = AlignedMarket::synth_gbm(&MarketParams::default(), 60, 1);
        let paths = figure1_data(&market, &[], 0.07).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn uncovered_vintage_errors() {
        let market = AlignedMarket::synth_gbm(&MarketParams::default(), 60, 1);
        let before = synth_start() - 1;
        assert!(matches!(
            table1(&market, &[before], &[0.05], market.end_month()),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn csv_layout_matches_reference_shape() {
        let params = MarketParams::new(0.0, 0.0, 0.0, DriftMode::RiskNeutral).unwrap();
        let market = AlignedMarket::synth_gbm(&params, 150, 0);
        let v0 = synth_start();
        let table = table1(&market, &[v0, v0 + 12], &[0.04, 0.12], market.end_month()).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rate,2000-01,2001-01");
        assert_eq!(lines[1], "0.04,,"); // 4%/yr on a flat market ruins after 300 months, past the window
        assert_eq!(lines[2], "0.12,2008-04,2009-04");
    }
}
