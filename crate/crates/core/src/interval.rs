use std::fmt;
use std::ops::RangeInclusive;

/// A range of rows in sorted-suffix order, 1-based and inclusive.
///
/// Empty iff `lo > hi`. Every empty interval produced by this crate is
/// [`Interval::EMPTY`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub const EMPTY: Interval = Interval { lo: 1, hi: 0 };

    /// Builds an interval, normalizing any empty range to [`Interval::EMPTY`].
    pub fn new(lo: usize, hi: usize) -> Self {
        if lo > hi {
            Self::EMPTY
        } else {
            Interval { lo, hi }
        }
    }

    pub fn singleton(row: usize) -> Self {
        Interval { lo: row, hi: row }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Number of rows, which equals the number of occurrences of the pattern.
    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn contains(&self, row: usize) -> bool {
        self.lo <= row && row <= self.hi
    }

    pub fn rows(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("[]")
        } else if self.lo == self.hi {
            write!(f, "[{}]", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}
