//! Quantitative library for systematic-withdrawal (SwP) pseudo-indices and
//! ruin-contingent life annuities (RCLA).
//!
//! An SwP pseudo-index tracks a total-return equity index reduced each month by a
//! fixed, inflation-adjusted systematic withdrawal; it is defined per vintage month
//! and withdrawal rate. An RCLA pays a real lifetime income starting if-and-when
//! such an index first hits zero, provided the annuitant is still alive.
//!
//! The crate is organised around that product:
//!
//! * [`market_data`] — ingestion and alignment of monthly total-return and CPI
//!   level series, plus a seeded synthetic GBM generator for tests.
//! * [`swp_index`] — the monthly index recursion and ruin detection.
//! * [`backtest`] — historical ruin-date tables and trajectory exports.
//! * [`mortality`] — Gompertz survival, hazard and the real life-annuity factor.
//! * [`pricing`] — three cross-checked RCLA valuation engines: Monte Carlo,
//!   finite-difference PDE, and the σ=0 closed form.
//!
//! All quantities in the pricing model are real (inflation-deflated); all series
//! are month-granular with no day-of-month component.

pub mod backtest;
pub mod error;
pub mod market_data;
pub mod month;
pub mod mortality;
pub mod params;
pub mod pricing;
pub mod swp_index;

pub use error::{Error, Result};
pub use market_data::{AlignedMarket, MonthRange, MonthlySeries, SeriesKind};
pub use month::Month;
pub use mortality::GompertzParams;
pub use params::{DriftMode, MarketParams};
pub use pricing::{Engine, GridSpec, McConfig, PricingResult, RclaContract};
