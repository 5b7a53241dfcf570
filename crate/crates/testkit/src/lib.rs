//! Brute-force reference implementations.
//!
//! Everything here is deliberately naive: full suffix sorts, character-by-character
//! scans, quadratic LZ77. These functions exist to derive expected values and to
//! cross-check the real index in tests. Nothing in the production crates depends
//! on this crate.
//!
//! Positions and rows are 1-based and inclusive throughout.

use rand::Rng;

/// End-of-text marker, ordered below every byte a text may contain.
pub const SENTINEL: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    SentinelInText,
    EmptyText,
}

/// A row range in sorted-suffix order. Empty iff `lo > hi`; the canonical empty
/// value is `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleInterval {
    pub lo: usize,
    pub hi: usize,
}

impl OracleInterval {
    pub const EMPTY: OracleInterval = OracleInterval { lo: 1, hi: 0 };

    pub fn len(&self) -> usize {
        if self.lo > self.hi {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

/// Text with the sentinel appended, plus its suffixes in sorted order.
#[derive(Debug, Clone)]
pub struct OracleSuffixTable {
    pub text: Vec<u8>,
    /// 1-based start positions, smallest suffix first.
    pub sorted_starts: Vec<usize>,
}

impl OracleSuffixTable {
    pub fn new(text: &[u8]) -> Result<Self, OracleError> {
        if text.contains(&SENTINEL) {
            return Err(OracleError::SentinelInText);
        }
        let mut full = text.to_vec();
        full.push(SENTINEL);
        let mut starts: Vec<usize> = (1..=full.len()).collect();
        starts.sort_by(|&a, &b| full[a - 1..].cmp(&full[b - 1..]));
        Ok(OracleSuffixTable {
            text: full,
            sorted_starts: starts,
        })
    }

    /// Suffix beginning at row `row` (1-based).
    pub fn suffix(&self, row: usize) -> &[u8] {
        &self.text[self.sorted_starts[row - 1] - 1..]
    }

    pub fn rows(&self) -> usize {
        self.sorted_starts.len()
    }

    /// Text position of the character preceding the suffix at `row`; the
    /// sentinel (position n+1) precedes the suffix starting at 1.
    pub fn locate(&self, row: usize) -> usize {
        let start = self.sorted_starts[row - 1];
        if start == 1 {
            self.text.len()
        } else {
            start - 1
        }
    }

    /// Row whose preceding character sits at text position `pos`.
    pub fn antilocate(&self, pos: usize) -> usize {
        (1..=self.rows())
            .find(|&r| self.locate(r) == pos)
            .expect("position in 1..=n+1")
    }

    pub fn interval(&self, pattern: &[u8]) -> OracleInterval {
        let rows: Vec<usize> = (1..=self.rows())
            .filter(|&r| self.suffix(r).starts_with(pattern))
            .collect();
        match (rows.first(), rows.last()) {
            (Some(&lo), Some(&hi)) => {
                debug_assert_eq!(hi - lo + 1, rows.len());
                OracleInterval { lo, hi }
            }
            _ => OracleInterval::EMPTY,
        }
    }
}

/// BWT of `text` + sentinel by full suffix sort. The sentinel is rendered as
/// [`SENTINEL`].
pub fn oracle_bwt(text: &[u8]) -> Result<Vec<u8>, OracleError> {
    if text.is_empty() {
        return Err(OracleError::EmptyText);
    }
    let table = OracleSuffixTable::new(text)?;
    let n1 = table.text.len();
    Ok(table
        .sorted_starts
        .iter()
        .map(|&s| table.text[if s == 1 { n1 - 1 } else { s - 2 }])
        .collect())
}

/// Renders the sentinel as `$` for comparison against printed examples.
pub fn show(bwt: &[u8]) -> String {
    bwt.iter()
        .map(|&c| if c == SENTINEL { '$' } else { c as char })
        .collect()
}

pub fn oracle_occurrences(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - pattern.len())
        .filter(|&p| &text[p..p + pattern.len()] == pattern)
        .map(|p| p + 1)
        .collect()
}

pub fn oracle_interval(text: &[u8], pattern: &[u8]) -> OracleInterval {
    match OracleSuffixTable::new(text) {
        Ok(t) => t.interval(pattern),
        Err(_) => OracleInterval::EMPTY,
    }
}

/// A greedy LZ77 token. Copy sources are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OraclePhrase {
    Literal(u8),
    Copy { src: usize, len: usize },
}

/// Non-overlapping greedy LZ77 by exhaustive search; ties go to the smallest source.
pub fn oracle_lz77(text: &[u8]) -> Vec<OraclePhrase> {
    oracle_lz77_multi(&[text])
}

/// Greedy parse of the concatenation where no phrase crosses a pattern end.
pub fn oracle_lz77_multi<P: AsRef<[u8]>>(patterns: &[P]) -> Vec<OraclePhrase> {
    let mut all = Vec::new();
    let mut ends = Vec::new();
    for p in patterns {
        all.extend_from_slice(p.as_ref());
        ends.push(all.len());
    }
    let mut out = Vec::new();
    let mut j = 0;
    for &end in &ends {
        while j < end {
            let mut best = (0usize, 0usize);
            for b in 0..j {
                let mut l = 0;
                while j + l < end && b + l < j && all[b + l] == all[j + l] {
                    l += 1;
                }
                if l > best.1 {
                    best = (b, l);
                }
            }
            if best.1 == 0 {
                out.push(OraclePhrase::Literal(all[j]));
                j += 1;
            } else {
                out.push(OraclePhrase::Copy {
                    src: best.0 + 1,
                    len: best.1,
                });
                j += best.1;
            }
        }
    }
    out
}

/// Splits `?`-patterns into maximal runs, dropping boundary wildcards.
pub fn oracle_split_wildcards(pattern: &[u8]) -> (Vec<Vec<u8>>, Vec<usize>) {
    let mut parts = Vec::new();
    let mut gaps = Vec::new();
    let mut cur = Vec::new();
    let mut run = 0;
    for &c in pattern {
        if c == b'?' {
            if !cur.is_empty() {
                parts.push(std::mem::take(&mut cur));
                run = 0;
            }
            run += 1;
        } else {
            if cur.is_empty() && !parts.is_empty() {
                gaps.push(run);
            }
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    (parts, gaps)
}

/// Start positions where `pattern` matches with each `?` standing for exactly
/// one character. Boundary wildcards are dropped first.
pub fn oracle_wildcard_exact(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    let (parts, gaps) = oracle_split_wildcards(pattern);
    let mut core = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            core.extend(std::iter::repeat_n(b'?', gaps[i - 1]));
        }
        core.extend_from_slice(p);
    }
    if core.is_empty() || core.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - core.len())
        .filter(|&s| {
            core.iter()
                .zip(&text[s..])
                .all(|(&p, &t)| p == b'?' || p == t)
        })
        .map(|s| s + 1)
        .collect()
}

/// Spans `(start, end)` where each gap may shrink to any length in `0..=w`.
pub fn oracle_wildcard_flexible(text: &[u8], pattern: &[u8]) -> Vec<(usize, usize)> {
    let (parts, gaps) = oracle_split_wildcards(pattern);
    let mut spans = Vec::new();
    if parts.is_empty() {
        return spans;
    }
    for s in 0..text.len() {
        let mut ends = Vec::new();
        flexible_from(text, &parts, &gaps, 0, s, &mut ends);
        for e in ends {
            spans.push((s + 1, e));
        }
    }
    spans.sort_unstable();
    spans.dedup();
    spans
}

fn flexible_from(
    text: &[u8],
    parts: &[Vec<u8>],
    gaps: &[usize],
    k: usize,
    at: usize,
    ends: &mut Vec<usize>,
) {
    let p = &parts[k];
    if at + p.len() > text.len() || &text[at..at + p.len()] != p.as_slice() {
        return;
    }
    let after = at + p.len();
    if k + 1 == parts.len() {
        ends.push(after);
        return;
    }
    for w in 0..=gaps[k] {
        flexible_from(text, parts, gaps, k + 1, after + w, ends);
    }
}

/// Uniform random text over the first `sigma` lowercase letters.
pub fn random_text<R: Rng>(rng: &mut R, n: usize, sigma: u8) -> Vec<u8> {
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

/// Random substring of `text` with length in `1..=max_len`.
pub fn random_substring<R: Rng>(rng: &mut R, text: &[u8], max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(1..=max_len.min(text.len()));
    let start = rng.gen_range(0..=text.len() - len);
    text[start..start + len].to_vec()
}
