//! Ingestion, validation and alignment of monthly market series.
//!
//! Input files are two-column CSVs (`month,level`) of index *levels*, one row
//! per consecutive calendar month. Returns are always derived as level ratios,
//! which makes gaps and bad rows detectable at load time.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::month::Month;
use crate::params::MarketParams;

/// What a level series measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    TotalReturnIndex,
    CpiIndex,
}

impl std::fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeriesKind::TotalReturnIndex => write!(f, "total_return_index"),
            SeriesKind::CpiIndex => write!(f, "cpi_index"),
        }
    }
}

/// An inclusive calendar month window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonthRange {
    pub start: Month,
    pub end: Month,
}

impl MonthRange {
    pub fn new(start: Month, end: Month) -> Result<Self> {
        if end < start {
            return Err(Error::Invalid(format!(
                "month range end {end} precedes start {start}"
            )));
        }
        Ok(MonthRange { start, end })
    }

    /// Number of months in the window, inclusive.
    pub fn len(&self) -> usize {
        (self.end.months_since(self.start) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees start <= end
    }

    pub fn contains(&self, m: Month) -> bool {
        self.start <= m && m <= self.end
    }
}

/// A validated series of strictly positive monthly levels with no gaps.
/// Month k of the series is `start_month + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    start_month: Month,
    values: Vec<f64>,
    kind: SeriesKind,
}

impl MonthlySeries {
    pub fn new(start_month: Month, values: Vec<f64>, kind: SeriesKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("series has no observations".into()));
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::Invalid(format!(
                    "level {v} at {} is not strictly positive",
                    start_month + k as i32
                )));
            }
        }
        Ok(MonthlySeries {
            start_month,
            values,
            kind,
        })
    }

    /// Load a series from a `month,level` CSV (ascending consecutive months,
    /// strictly positive levels). Errors name the offending row.
    pub fn load(path: &Path, kind: SeriesKind) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let valid_err = |line: usize, msg: String| Error::Validation {
            path: path.to_path_buf(),
            line,
            msg,
        };

        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(path)
            .map_err(|e| parse_err(0, e.to_string()))?;

        let mut start_month: Option<Month> = None;
        let mut prev_month: Option<Month> = None;
        let mut values = Vec::new();

        for (idx, record) in reader.records().enumerate() {
            let line = idx + 1;
            let record = record.map_err(|e| parse_err(line, e.to_string()))?;
            if line == 1 {
                let hdr: Vec<&str> = record.iter().collect();
                if hdr != ["month", "level"] {
                    return Err(parse_err(
                        1,
                        format!("expected header 'month,level', got {:?}", hdr.join(",")),
                    ));
                }
                continue;
            }
            if record.len() != 2 {
                return Err(parse_err(line, format!("expected 2 fields, got {}", record.len())));
            }
            let month: Month = record[0]
                .parse()
                .map_err(|e: Error| parse_err(line, e.to_string()))?;
            let level: f64 = record[1]
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("bad level {:?}", &record[1])))?;

            if let Some(prev) = prev_month {
                let gap = month.months_since(prev);
                if gap != 1 {
                    return Err(valid_err(
                        line,
                        format!("month {month} does not follow {prev} consecutively"),
                    ));
                }
            } else {
                start_month = Some(month);
            }
            if !level.is_finite() || level <= 0.0 {
                return Err(valid_err(
                    line,
                    format!("level {level} at {month} is not strictly positive"),
                ));
            }
            prev_month = Some(month);
            values.push(level);
        }

        let start = start_month.ok_or_else(|| valid_err(0, "file has no data rows".into()))?;
        MonthlySeries::new(start, values, kind)
    }

    /// Write the series back out in the exact load schema.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::from("month,level\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.start_month + k as i32, v));
        }
        let mut f = fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn start_month(&self) -> Month {
        self.start_month
    }

    pub fn end_month(&self) -> Month {
        self.start_month + (self.values.len() as i32 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees at least one observation
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level_at(&self, m: Month) -> Option<f64> {
        let k = m.months_since(self.start_month);
        if k < 0 {
            return None;
        }
        self.values.get(k as usize).copied()
    }
}

/// Per-month growth factors for a window: `gross_returns[k]` is the total-return
/// growth *during* month `start_month + k` (level at that month over the prior
/// month's level), and `inflation_factors[k]` the CPI growth over the same month.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedMarket {
    start_month: Month,
    gross_returns: Vec<f64>,
    inflation_factors: Vec<f64>,
}

impl AlignedMarket {
    /// Align a total-return series and a CPI series over `window`. Both series
    /// must hold levels from the month before the window through its end.
    pub fn align(
        returns: &MonthlySeries,
        cpi: &MonthlySeries,
        window: MonthRange,
    ) -> Result<Self> {
        let factors = |s: &MonthlySeries, name: &str| -> Result<Vec<f64>> {
            if s.start_month() > window.start.prev() || s.end_month() < window.end {
                return Err(Error::Coverage(format!(
                    "{name} series spans {}..{} but window {}..{} needs levels from {}",
                    s.start_month(),
                    s.end_month(),
                    window.start,
                    window.end,
                    window.start.prev(),
                )));
            }
            let base = window.start.prev().months_since(s.start_month()) as usize;
            let n = window.len();
            Ok((0..n)
                .map(|k| s.values[base + k + 1] / s.values[base + k])
                .collect())
        };

        Ok(AlignedMarket {
            start_month: window.start,
            gross_returns: factors(returns, "total-return")?,
            inflation_factors: factors(cpi, "cpi")?,
        })
    }

    /// Month label attached to synthetic series.
    pub const SYNTH_START: (i32, u32) = (2000, 1);

    /// Deterministic synthetic market: monthly gross real-return factors drawn as
    /// `exp((nu - sigma^2/2)/12 + sigma * Z / sqrt(12))` with ν chosen by the
    /// drift mode, inflation factors pinned to 1 (the series is already real).
    pub fn synth_gbm(params: &MarketParams, n_months: usize, seed: u64) -> Self {
        assert!(n_months >= 1, "n_months must be >= 1");
        assert!(params.sigma >= 0.0, "sigma must be >= 0");
        let nu = params.drift();
        let drift = (nu - 0.5 * params.sigma * params.sigma) / 12.0;
        let vol = params.sigma / 12.0_f64.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gross_returns = (0..n_months)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (drift + vol * z).exp()
            })
            .collect();
        AlignedMarket {
            start_month: Month::new(Self::SYNTH_START.0, Self::SYNTH_START.1).unwrap(),
            gross_returns,
            inflation_factors: vec![1.0; n_months],
        }
    }

    pub fn start_month(&self) -> Month {
        self.start_month
    }

    /// Last month covered by the factor lists.
    pub fn end_month(&self) -> Month {
        self.start_month + (self.gross_returns.len() as i32 - 1)
    }

    pub fn window(&self) -> MonthRange {
        MonthRange {
            start: self.start_month,
            end: self.end_month(),
        }
    }

    pub fn len(&self) -> usize {
        self.gross_returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gross_returns.is_empty()
    }

    pub fn gross_returns(&self) -> &[f64] {
        &self.gross_returns
    }

    pub fn inflation_factors(&self) -> &[f64] {
        &self.inflation_factors
    }

    /// The sub-window starting at `start` (inclusive), same end month.
    pub fn starting_at(&self, start: Month) -> Result<AlignedMarket> {
        let skip = start.months_since(self.start_month);
        if skip < 0 || skip as usize >= self.len() {
            return Err(Error::Coverage(format!(
                "market covers {}..{} which does not start by {start}",
                self.start_month,
                self.end_month()
            )));
        }
        let skip = skip as usize;
        Ok(AlignedMarket {
            start_month: start,
            gross_returns: self.gross_returns[skip..].to_vec(),
            inflation_factors: self.inflation_factors[skip..].to_vec(),
        })
    }

    /// The sub-window ending at `end` (inclusive), same start month.
    pub fn ending_at(&self, end: Month) -> Result<AlignedMarket> {
        let keep = end.months_since(self.start_month) + 1;
        if keep < 1 || keep as usize > self.len() {
            return Err(Error::Coverage(format!(
                "market covers {}..{} which does not extend to {end}",
                self.start_month,
                self.end_month()
            )));
        }
        let keep = keep as usize;
        Ok(AlignedMarket {
            start_month: self.start_month,
            gross_returns: self.gross_returns[..keep].to_vec(),
            inflation_factors: self.inflation_factors[..keep].to_vec(),
        })
    }
}
