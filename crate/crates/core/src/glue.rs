//! Interval concatenation.
//!
//! Given the intervals of `P1` and `P2`, the interval of `P1 P2` is a
//! sub-interval of `P1`'s. For a row `i` of `P1`'s interval let
//! `f(i) = antilocate(locate(i) + |P1|)`, the row of the suffix that follows
//! that occurrence of `P1`. Rows with `f(i)` before `P2`'s interval precede the
//! answer, rows with `f(i)` inside it form the answer, and rows with `f(i)`
//! after it follow the answer. `f` is strictly increasing over a genuine
//! pattern interval, so two binary searches find both endpoints.

use crate::{BwtIndex, Interval};

/// Probe counts for one [`glue_with_stats`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GlueStats {
    pub locate_calls: usize,
    pub antilocate_calls: usize,
    pub comparisons: usize,
}

impl std::ops::AddAssign for GlueStats {
    fn add_assign(&mut self, o: Self) {
        self.locate_calls += o.locate_calls;
        self.antilocate_calls += o.antilocate_calls;
        self.comparisons += o.comparisons;
    }
}

/// `antilocate(locate(row) + shift)` for a 1-based row, with `locate` of the
/// sentinel row read as 0 (the sentinel precedes the text cyclically).
pub fn shifted_row(index: &BwtIndex, row: usize, shift: usize) -> usize {
    shifted0(index, row - 1, shift) + 1
}

fn shifted0(index: &BwtIndex, r0: usize, shift: usize) -> usize {
    let pos = (index.preceding(r0) + shift) % index.rows();
    index.antilocate0(if pos == 0 { index.rows() } else { pos })
}

/// Interval of `P1 P2` from the intervals of `P1` (of length `len_p1`) and `P2`.
///
/// Both inputs must be exact backward-search intervals over `index`; other
/// inputs give unspecified output. An empty input gives an empty result.
pub fn glue(index: &BwtIndex, p1: Interval, len_p1: usize, p2: Interval) -> Interval {
    glue_with_stats(index, p1, len_p1, p2).0
}

pub fn glue_with_stats(
    index: &BwtIndex,
    p1: Interval,
    len_p1: usize,
    p2: Interval,
) -> (Interval, GlueStats) {
    let mut stats = GlueStats::default();
    if p1.is_empty() || p2.is_empty() {
        return (Interval::EMPTY, stats);
    }
    let mut f = |row: usize| {
        stats.locate_calls += 1;
        stats.antilocate_calls += 1;
        stats.comparisons += 1;
        shifted0(index, row - 1, len_p1) + 1
    };
    // Least row with f(row) >= p2.lo, then least row with f(row) > p2.hi.
    let lo = partition_point(p1.lo, p1.hi + 1, |r| f(r) < p2.lo);
    let end = partition_point(lo, p1.hi + 1, |r| f(r) <= p2.hi);
    (Interval::new(lo, end - 1), stats)
}

/// First `i` in `lo..hi` for which `pred` is false, assuming `pred` is true on
/// a prefix of the range and false afterwards.
fn partition_point(mut lo: usize, mut hi: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn miss() -> BwtIndex {
        BwtIndex::build(b"mississippi", 2).unwrap()
    }

    #[test]
    fn glue_i_p() {
        let idx = miss();
        let (iv, stats) =
            glue_with_stats(&idx, Interval::new(2, 5), 1, Interval::new(7, 8));
        assert_eq!(iv, Interval::singleton(3));
        assert!(stats.antilocate_calls <= 8, "{stats:?}");
        assert_eq!(stats.locate_calls, stats.antilocate_calls);
    }

    #[test]
    fn glue_s_s() {
        let idx = miss();
        let s = idx.backward_search(b"s");
        assert_eq!(glue(&idx, s, 1, s), Interval::new(11, 12));
    }

    #[test]
    fn shifted_values_for_i() {
        let idx = miss();
        let f: Vec<usize> = (2..=5).map(|r| shifted_row(&idx, r, 1)).collect();
        assert_eq!(f, vec![1, 8, 11, 12]);
    }

    #[test]
    fn empty_inputs() {
        let idx = miss();
        let p = Interval::new(7, 8);
        assert_eq!(glue(&idx, Interval::EMPTY, 3, p), Interval::EMPTY);
        assert_eq!(glue(&idx, p, 1, Interval::EMPTY), Interval::EMPTY);
        // "pm" does not occur.
        let m = idx.backward_search(b"m");
        assert_eq!(glue(&idx, p, 1, m), Interval::EMPTY);
    }

    #[test]
    fn singleton_uses_two_probes_at_most() {
        let idx = miss();
        let (iv, stats) = glue_with_stats(
            &idx,
            idx.backward_search(b"m"),
            1,
            idx.backward_search(b"iss"),
        );
        assert_eq!(iv, idx.backward_search(b"miss"));
        assert!(stats.antilocate_calls <= 2);
    }

    #[test]
    fn occurrence_at_text_end() {
        // "i" ends the text, so one row of "i" maps to the sentinel row 1.
        let idx = miss();
        let i = idx.backward_search(b"i");
        assert_eq!(shifted_row(&idx, i.lo, 1), 1);
        assert_eq!(glue(&idx, i, 1, idx.backward_search(b"ss")), idx.backward_search(b"iss"));
    }
}
