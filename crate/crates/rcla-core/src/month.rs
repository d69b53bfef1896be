//! Calendar month arithmetic. All series in this crate are keyed by whole
//! calendar months; there is deliberately no day-of-month anywhere.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A calendar year-month, stored as a flat month index (`year * 12 + month0`).
///
/// Formats and parses as `YYYY-MM`. Supports offset arithmetic, so
/// `month + 12` is the same month one year later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month(i32);

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::Invalid(format!(
                "month number {month} out of range 1..=12"
            )));
        }
        Ok(Month(year * 12 + month as i32 - 1))
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12)
    }

    /// 1-based month number within the year.
    pub fn month(self) -> u32 {
        (self.0.rem_euclid(12) + 1) as u32
    }

    /// Whole months from `earlier` to `self` (negative if `self` is earlier).
    pub fn months_since(self, earlier: Month) -> i32 {
        self.0 - earlier.0
    }

    pub fn next(self) -> Month {
        Month(self.0 + 1)
    }

    pub fn prev(self) -> Month {
        Month(self.0 - 1)
    }
}

impl std::ops::Add<i32> for Month {
    type Output = Month;
    fn add(self, rhs: i32) -> Month {
        Month(self.0 + rhs)
    }
}

impl std::ops::Sub<i32> for Month {
    type Output = Month;
    fn sub(self, rhs: i32) -> Month {
        Month(self.0 - rhs)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Invalid(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        Month::new(year, month)
    }
}
