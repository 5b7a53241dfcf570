//! Greedy non-overlapping LZ77.
//!
//! At each step the parser emits a copy of the longest prefix of the remaining
//! input that occurs entirely inside the part already parsed (smallest source
//! position on ties), or a literal when no such prefix exists. With several
//! patterns, copies may reach back into earlier patterns but no phrase crosses
//! the end of a pattern.
//!
//! Matches are found with a suffix array of the whole input: the suffixes
//! sharing a prefix of length `l` with the current position form a contiguous
//! block, and a copy of length `l` exists iff the smallest start in that block
//! is at most `current - l`. That predicate is monotone in `l`, so the longest
//! copy is found by binary search.

use std::fmt;

use crate::error::{Error, Result};
use crate::suffix_array::{lcp_array, suffix_array, SparseMin};

/// One LZ77 token. `src` is a 1-based position in the concatenated input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phrase {
    Literal(u8),
    Copy { src: usize, len: usize },
}

impl Phrase {
    pub fn len(&self) -> usize {
        match *self {
            Phrase::Literal(_) => 1,
            Phrase::Copy { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseResult {
    pub phrases: Vec<Phrase>,
    /// Cumulative end offset of each input pattern in the concatenation.
    pub pattern_boundaries: Vec<usize>,
}

impl ParseResult {
    /// The phrase count `z`, a lower bound on the size of any straight-line
    /// program for the input.
    pub fn phrase_count(&self) -> usize {
        self.phrases.len()
    }

    pub fn total_len(&self) -> usize {
        self.pattern_boundaries.last().copied().unwrap_or(0)
    }
}

pub fn parse(text: &[u8]) -> ParseResult {
    parse_multi(&[text])
}

pub fn parse_multi<P: AsRef<[u8]>>(patterns: &[P]) -> ParseResult {
    let mut all = Vec::new();
    let mut pattern_boundaries = Vec::with_capacity(patterns.len());
    for p in patterns {
        all.extend_from_slice(p.as_ref());
        pattern_boundaries.push(all.len());
    }
    let mut phrases = Vec::new();
    if !all.is_empty() {
        let finder = MatchFinder::new(&all);
        let mut pos = 0;
        for &end in &pattern_boundaries {
            while pos < end {
                match finder.longest_prior(pos, end - pos) {
                    Some((src, len)) => {
                        phrases.push(Phrase::Copy { src: src + 1, len });
                        pos += len;
                    }
                    None => {
                        phrases.push(Phrase::Literal(all[pos]));
                        pos += 1;
                    }
                }
            }
        }
    }
    ParseResult {
        phrases,
        pattern_boundaries,
    }
}

struct MatchFinder {
    rank: Vec<usize>,
    lcp: SparseMin,
    min_start: SparseMin,
    n: usize,
}

impl MatchFinder {
    fn new(s: &[u8]) -> Self {
        let sa = suffix_array(s);
        let lcp = lcp_array(s, &sa);
        let mut rank = vec![0; s.len()];
        for (r, &p) in sa.iter().enumerate() {
            rank[p] = r;
        }
        MatchFinder {
            rank,
            lcp: SparseMin::new(&lcp),
            min_start: SparseMin::new(&sa),
            n: s.len(),
        }
    }

    /// Rank block of suffixes sharing at least `len` symbols with the one at rank `r`.
    fn block(&self, r: usize, len: usize) -> (usize, usize) {
        // lcp[k] relates ranks k-1 and k, so the block extends left while
        // min(lcp[lo+1..=r]) >= len and right while min(lcp[r+1..=hi]) >= len.
        let (mut a, mut b) = (0, r);
        while a < b {
            let mid = a + (b - a) / 2;
            if self.lcp.min(mid + 1, r) >= len {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        let lo = a;
        let (mut a, mut b) = (r, self.n - 1);
        while a < b {
            let mid = a + (b - a).div_ceil(2);
            if self.lcp.min(r + 1, mid) >= len {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        (lo, a)
    }

    /// Leftmost earliest-ending source for a copy at `pos`, as `(src, len)`
    /// with `src + len <= pos` and `len <= cap` maximal.
    fn longest_prior(&self, pos: usize, cap: usize) -> Option<(usize, usize)> {
        let r = self.rank[pos];
        let source = |len: usize| {
            let (lo, hi) = self.block(r, len);
            let b = self.min_start.min(lo, hi);
            (b + len <= pos).then_some(b)
        };
        source(1)?;
        let (mut good, mut bad) = (1, cap + 1);
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if source(mid).is_some() {
                good = mid;
            } else {
                bad = mid;
            }
        }
        source(good).map(|b| (b, good))
    }
}

/// Expands a phrase list. Copies must read only from already-produced output.
pub fn decode(phrases: &[Phrase]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for (i, p) in phrases.iter().enumerate() {
        match *p {
            Phrase::Literal(c) => out.push(c),
            Phrase::Copy { src, len } => {
                if src == 0 || len == 0 || src - 1 + len > out.len() {
                    return Err(Error::MalformedPhrase {
                        index: i,
                        reason: format!(
                            "copy ({src}, {len}) outside the {} symbols decoded so far",
                            out.len()
                        ),
                    });
                }
                out.extend_from_within(src - 1..src - 1 + len);
            }
        }
    }
    Ok(out)
}

impl fmt::Display for Phrase {
    /// `L <symbol>` or `C <src> <len>`. Printable ASCII symbols are written
    /// as-is, anything else as `0xHH`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phrase::Literal(c) if c.is_ascii_graphic() => write!(f, "L {}", c as char),
            Phrase::Literal(c) => write!(f, "L 0x{c:02x}"),
            Phrase::Copy { src, len } => write!(f, "C {src} {len}"),
        }
    }
}

/// Renders a parse as the line-oriented phrase dump, ending with the
/// `B <ends...>` boundaries line.
pub fn write_dump(parse: &ParseResult) -> String {
    let mut s = String::new();
    for p in &parse.phrases {
        s.push_str(&p.to_string());
        s.push('\n');
    }
    s.push('B');
    for b in &parse.pattern_boundaries {
        s.push_str(&format!(" {b}"));
    }
    s.push('\n');
    s
}

/// Parses the phrase dump produced by [`write_dump`].
pub fn read_dump(text: &str) -> Result<ParseResult> {
    let bad = |line: usize, why: &str| Error::format("phrase dump", format!("line {line}: {why}"));
    let mut parse = ParseResult::default();
    let mut saw_boundaries = false;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_at(1);
        let rest = rest.strip_prefix(' ').unwrap_or(rest);
        match tag {
            "L" => {
                let c = match rest.as_bytes() {
                    [c] => *c,
                    _ => rest
                        .strip_prefix("0x")
                        .and_then(|h| u8::from_str_radix(h, 16).ok())
                        .ok_or_else(|| bad(n, "bad literal"))?,
                };
                parse.phrases.push(Phrase::Literal(c));
            }
            "C" => {
                let mut it = rest.split_ascii_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(src)), Some(Ok(len)), None) => {
                        parse.phrases.push(Phrase::Copy { src, len })
                    }
                    _ => return Err(bad(n, "bad copy")),
                }
            }
            "B" => {
                parse.pattern_boundaries = rest
                    .split_ascii_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(n, "bad boundary")))
                    .collect::<Result<_>>()?;
                saw_boundaries = true;
            }
            _ => return Err(bad(n, "unknown tag")),
        }
    }
    if !saw_boundaries {
        let total = parse.phrases.iter().map(Phrase::len).sum();
        parse.pattern_boundaries = vec![total];
    }
    Ok(parse)
}
