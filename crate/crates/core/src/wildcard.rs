//! Matching patterns with `?` wildcards.
//!
//! A pattern `P1 ?^w1 P2 ?^w2 ... Pt` is split into its maximal literal
//! sub-patterns. All sub-pattern intervals are found by backward search and
//! the smallest one becomes the pivot. Each pivot occurrence is located once;
//! after that, candidates are extended one sub-pattern at a time, rightward to
//! `Pt` and then leftward to `P1`, by checking whether `antilocate` of the
//! position where the neighbour must start falls inside the neighbour's
//! interval. Candidates never outnumber the pivot's occurrences in exact mode.
//!
//! In exact mode each `?` consumes exactly one character. In flexible mode
//! gap `j` may consume anywhere from 0 to `w_j` characters.
//!
//! Wildcards at either end of the pattern are dropped; reported positions are
//! those of the first literal sub-pattern.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::{BwtIndex, Interval};

pub const WILDCARD: u8 = b'?';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WildcardPattern {
    pub subpatterns: Vec<Vec<u8>>,
    /// `gaps[j]` wildcards sit between `subpatterns[j]` and `subpatterns[j + 1]`.
    pub gaps: Vec<usize>,
}

impl WildcardPattern {
    pub fn parse(pattern: &[u8]) -> Result<Self> {
        let mut subpatterns: Vec<Vec<u8>> = Vec::new();
        let mut gaps = Vec::new();
        for run in pattern.split(|&c| c == WILDCARD) {
            if run.is_empty() {
                if !subpatterns.is_empty() {
                    *gaps.last_mut().unwrap() += 1;
                }
                continue;
            }
            subpatterns.push(run.to_vec());
            gaps.push(1);
        }
        if subpatterns.is_empty() {
            return Err(Error::AllWildcards);
        }
        // Each split boundary after a run counts one wildcard; the entry after
        // the last run collects the trailing wildcards, which are dropped.
        gaps.pop();
        Ok(WildcardPattern { subpatterns, gaps })
    }

    /// Total wildcards between the first and last sub-pattern.
    pub fn total_wildcards(&self) -> usize {
        self.gaps.iter().sum()
    }

    /// Length of a match in exact mode.
    pub fn span_len(&self) -> usize {
        self.subpatterns.iter().map(Vec::len).sum::<usize>() + self.total_wildcards()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WildcardStats {
    /// Index of the sub-pattern with the fewest occurrences (leftmost on ties).
    pub pivot: usize,
    pub pivot_occ: usize,
    /// Largest candidate set held after any extension step.
    pub max_candidates: usize,
    pub locate_calls: usize,
    pub antilocate_calls: usize,
}

/// Start positions of exact matches, ascending.
pub fn match_exact(index: &BwtIndex, wp: &WildcardPattern) -> Vec<usize> {
    match_exact_with_stats(index, wp).0
}

pub fn match_exact_with_stats(index: &BwtIndex, wp: &WildcardPattern) -> (Vec<usize>, WildcardStats) {
    let (spans, stats) = search(index, wp, false);
    (spans.into_iter().map(|(s, _)| s).collect(), stats)
}

/// `(start, end)` spans of flexible matches, ascending and deduplicated.
pub fn match_flexible(index: &BwtIndex, wp: &WildcardPattern) -> Vec<(usize, usize)> {
    match_flexible_with_stats(index, wp).0
}

pub fn match_flexible_with_stats(
    index: &BwtIndex,
    wp: &WildcardPattern,
) -> (Vec<(usize, usize)>, WildcardStats) {
    search(index, wp, true)
}

/// A partial match covering text positions `before + 1 ..= end`.
type Candidate = (usize, usize);

fn search(index: &BwtIndex, wp: &WildcardPattern, flexible: bool) -> (Vec<(usize, usize)>, WildcardStats) {
    let intervals: Vec<Interval> = wp
        .subpatterns
        .iter()
        .map(|p| index.backward_search(p))
        .collect();
    let pivot = (0..intervals.len())
        .min_by_key(|&j| (intervals[j].len(), j))
        .expect("at least one sub-pattern");
    let mut stats = WildcardStats {
        pivot,
        pivot_occ: intervals[pivot].len(),
        ..WildcardStats::default()
    };
    let n = index.len();
    let plen = wp.subpatterns[pivot].len();

    let mut candidates: BTreeSet<Candidate> = intervals[pivot]
        .rows()
        .map(|r| {
            stats.locate_calls += 1;
            let before = index.preceding(r - 1);
            (before, before + plen)
        })
        .collect();
    stats.max_candidates = candidates.len();

    let gap_range = |w: usize| if flexible { 0..=w } else { w..=w };

    let rightward = wp.subpatterns[pivot + 1..]
        .iter()
        .zip(&intervals[pivot + 1..])
        .zip(&wp.gaps[pivot..]);
    for ((sub, &target), &gap) in rightward {
        let len = sub.len();
        let mut grown = BTreeSet::new();
        for &(before, end) in &candidates {
            for g in gap_range(gap) {
                let at = end + g;
                if at + len > n {
                    continue;
                }
                stats.antilocate_calls += 1;
                if target.contains(index.antilocate0(at) + 1) {
                    grown.insert((before, at + len));
                }
            }
        }
        candidates = grown;
        stats.max_candidates = stats.max_candidates.max(candidates.len());
    }

    for prev in (0..pivot).rev() {
        let len = wp.subpatterns[prev].len();
        let target = intervals[prev];
        let mut grown = BTreeSet::new();
        for &(before, end) in &candidates {
            for g in gap_range(wp.gaps[prev]) {
                let Some(at) = before.checked_sub(g + len) else {
                    continue;
                };
                stats.antilocate_calls += 1;
                let pos = if at == 0 { n + 1 } else { at };
                if target.contains(index.antilocate0(pos) + 1) {
                    grown.insert((at, end));
                }
            }
        }
        candidates = grown;
        stats.max_candidates = stats.max_candidates.max(candidates.len());
    }

    let spans = candidates
        .into_iter()
        .map(|(before, end)| (before + 1, end))
        .collect();
    (spans, stats)
}
