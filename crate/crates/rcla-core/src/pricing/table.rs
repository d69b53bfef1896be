//! Grid pricing across purchase ages and spending rates, with the immediate
//! life annuity benchmark row, plus the GMWB embedded-guarantee alias.

use crate::error::Result;
use crate::mortality::{annuity_factor, GompertzParams};
use crate::params::MarketParams;
use crate::pricing::{price_mc, price_pde, GridSpec, McConfig, PricingResult, RclaContract};

/// Engine selection with its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineChoice {
    Mc(McConfig),
    Pde(GridSpec),
}

/// Values for every (rate, age) cell at a fixed notional, plus the annuity
/// benchmark row ā(x)×1000 (the price of $1,000/yr of immediate real income).
#[derive(Debug, Clone)]
pub struct Table2 {
    pub ages: Vec<f64>,
    pub rates: Vec<f64>,
    pub notional: f64,
    /// `cells[i][j]` prices rate `rates[i]` at age `ages[j]`.
    pub cells: Vec<Vec<PricingResult>>,
    /// ā(age) × 1000 per age, same order as `ages`.
    pub annuity_row: Vec<f64>,
}

impl Table2 {
    pub fn value(&self, rate_idx: usize, age_idx: usize) -> f64 {
        self.cells[rate_idx][age_idx].value
    }

    /// CSV export mirroring the reference layout: ages as columns, one row per
    /// rate, the annuity factors as the final row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rate");
        for age in &self.ages {
            out.push_str(&format!(",{age}"));
        }
        out.push('\n');
        for (i, rate) in self.rates.iter().enumerate() {
            out.push_str(&format!("{rate}"));
            for j in 0..self.ages.len() {
                out.push_str(&format!(",{:.2}", self.value(i, j)));
            }
            out.push('\n');
        }
        out.push_str("annuity_per_1000");
        for v in &self.annuity_row {
            out.push_str(&format!(",{:.2}", v));
        }
        out.push('\n');
        out
    }
}

/// Standard notional for the published value grid.
pub const TABLE_NOTIONAL: f64 = 100_000.0;

/// Price every (age, rate) cell at a notional of $100,000 with the chosen
/// engine and append the annuity benchmark row.
pub fn table2(
    mkt: &MarketParams,
    g: &GompertzParams,
    ages: &[f64],
    rates: &[f64],
    engine: &EngineChoice,
) -> Result<Table2> {
    let mut cells = Vec::with_capacity(rates.len());
    for rate in rates {
        let mut row = Vec::with_capacity(ages.len());
        for age in ages {
            let contract = RclaContract::new(*age, *rate, TABLE_NOTIONAL)?;
            let result = match engine {
                EngineChoice::Mc(cfg) => price_mc(&contract, mkt, g, cfg),
                EngineChoice::Pde(grid) => price_pde(&contract, mkt, g, grid)?,
            };
            row.push(result);
        }
        cells.push(row);
    }
    let annuity_row = ages
        .iter()
        .map(|age| 1_000.0 * annuity_factor(*age, mkt.r_real, g))
        .collect();
    Ok(Table2 {
        ages: ages.to_vec(),
        rates: rates.to_vec(),
        notional: TABLE_NOTIONAL,
        cells,
        annuity_row,
    })
}

/// Value of the guarantee embedded in a lifetime guaranteed-withdrawal rider:
/// exactly the RCLA on the same age, rate and premium. A withdrawal guarantee
/// decomposes as the systematic withdrawal plan (the client's own money) plus
/// this contingent annuity, so the alias shares every code path with the RCLA
/// pricers by construction.
pub fn gmwb_embedded_value(
    age: f64,
    rate_s: f64,
    premium: f64,
    mkt: &MarketParams,
    g: &GompertzParams,
    engine: &EngineChoice,
) -> Result<f64> {
    let contract = RclaContract::new(age, rate_s, premium)?;
    let result = match engine {
        EngineChoice::Mc(cfg) => price_mc(&contract, mkt, g, cfg),
        EngineChoice::Pde(grid) => price_pde(&contract, mkt, g, grid)?,
    };
    Ok(result.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_in_age_and_rate() {
        let mkt = MarketParams::default();
        let g = GompertzParams::default();
        let engine = EngineChoice::Pde(GridSpec::new(800, 12));
        let t = table2(&mkt, &g, &[50.0, 62.0, 75.0], &[0.04, 0.06], &engine).unwrap();
        // decreasing along age for each rate
        for i in 0..2 {
            assert!(t.value(i, 0) > t.value(i, 1));
            assert!(t.value(i, 1) > t.value(i, 2));
        }
        // increasing along rate for each age
        for j in 0..3 {
            assert!(t.value(0, j) < t.value(1, j));
        }
        // immediate annuity on the same income dominates every cell
        for (i, rate) in t.rates.iter().enumerate() {
            for (j, _) in t.ages.iter().enumerate() {
                let income = rate * TABLE_NOTIONAL;
                let annuity_cost = income * t.annuity_row[j] / 1_000.0;
                assert!(t.value(i, j) < annuity_cost);
            }
        }
    }

    #[test]
    fn gmwb_alias_equals_the_matching_cell() {
        let mkt = MarketParams::default();
        let g = GompertzParams::default();
        let engine = EngineChoice::Pde(GridSpec::new(800, 12));
        let t = table2(&mkt, &g, &[67.0], &[0.05], &engine).unwrap();
        let v = gmwb_embedded_value(67.0, 0.05, TABLE_NOTIONAL, &mkt, &g, &engine).unwrap();
        assert_eq!(v, t.value(0, 0));
    }

    #[test]
    fn csv_layout() {
        let mkt = MarketParams::default();
        let g = GompertzParams::default();
        let engine = EngineChoice::Pde(GridSpec::new(400, 6));
        let t = table2(&mkt, &g, &[57.0, 75.0], &[0.05], &engine).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rate,57,75");
        assert!(lines[1].starts_with("0.05,"));
        assert!(lines[2].starts_with("annuity_per_1000,"));
        assert_eq!(lines.len(), 3);
    }
}
