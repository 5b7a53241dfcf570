//! The BWT index: construction, backward search, locate and antilocate.
//!
//! Rows and text positions are 1-based. Row `r` holds the character that
//! precedes the `r`-th smallest suffix of `text + $`; the sentinel sits at
//! logical text position `n + 1` and precedes the suffix starting at 1, so
//! `locate` and `antilocate` are total, mutually inverse maps between
//! `1..=n+1` rows and `1..=n+1` positions.

use crate::error::{Error, Result};
use crate::rank::{MarkedRows, OccTable};
use crate::suffix_array::suffix_array;
use crate::Interval;

/// Reserved end-of-text byte. Texts may not contain it.
pub const SENTINEL: u8 = 0;

pub const DEFAULT_SAMPLE_RATE: usize = 32;

#[derive(Debug, Clone)]
pub struct BwtIndex {
    n: usize,
    alphabet: Vec<u8>,
    /// Byte -> symbol code; 0 is the sentinel, `u8::MAX` marks bytes not in the text.
    code_of: [u8; 256],
    occ: OccTable,
    /// `cum[c]` = number of BWT symbols with code `< c`.
    cum: Vec<usize>,
    sample_rate: usize,
    locate_marks: MarkedRows,
    /// `(row, pos)` sorted by row.
    locate_samples: Vec<(usize, usize)>,
    /// `(pos, row)` sorted by pos.
    antilocate_samples: Vec<(usize, usize)>,
}

const ABSENT: u8 = u8::MAX;

impl BwtIndex {
    pub fn build(text: &[u8], sample_rate: usize) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        if let Some(p) = text.iter().position(|&c| c == SENTINEL) {
            return Err(Error::SentinelInText(p + 1));
        }
        if sample_rate == 0 {
            return Err(Error::ZeroSampleRate);
        }
        let n = text.len();
        let mut present = [false; 256];
        for &c in text {
            present[c as usize] = true;
        }
        let alphabet: Vec<u8> = (1..=255u8).filter(|&c| present[c as usize]).collect();

        let mut sa = Vec::with_capacity(n + 1);
        sa.push(n);
        sa.extend(suffix_array(text));

        let bwt: Vec<u8> = sa
            .iter()
            .map(|&s| if s == 0 { SENTINEL } else { text[s - 1] })
            .collect();
        let mut locate_samples = Vec::new();
        let mut antilocate_samples = Vec::new();
        for (r, &s) in sa.iter().enumerate() {
            let pos = if s == 0 { n + 1 } else { s };
            if is_sampled(pos, n, sample_rate) {
                locate_samples.push((r + 1, pos));
                antilocate_samples.push((pos, r + 1));
            }
        }
        antilocate_samples.sort_unstable();
        Ok(Self::assemble(
            n,
            alphabet,
            &bwt,
            sample_rate,
            locate_samples,
            antilocate_samples,
        ))
    }

    /// Rebuilds an index from stored components, checking that they describe
    /// a consistent BWT with the canonical sample sets for `sample_rate`.
    pub fn from_parts(
        n: usize,
        alphabet: Vec<u8>,
        bwt: &[u8],
        sample_rate: usize,
        locate_samples: Vec<(usize, usize)>,
        antilocate_samples: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let bad = |reason: String| Error::format("index", reason);
        if n == 0 {
            return Err(Error::EmptyText);
        }
        if sample_rate == 0 {
            return Err(Error::ZeroSampleRate);
        }
        if bwt.len() != n + 1 {
            return Err(bad(format!("bwt length {} != n + 1 = {}", bwt.len(), n + 1)));
        }
        if alphabet.contains(&SENTINEL) || alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("alphabet not strictly increasing or contains the sentinel".into()));
        }
        let mut seen = [0usize; 256];
        for &c in bwt {
            seen[c as usize] += 1;
        }
        if seen[SENTINEL as usize] != 1 {
            return Err(bad("bwt must contain exactly one sentinel".into()));
        }
        for c in 1..=255u8 {
            if (seen[c as usize] > 0) != alphabet.binary_search(&c).is_ok() {
                return Err(bad(format!("alphabet disagrees with bwt on byte {c:#04x}")));
            }
        }
        let index = Self::assemble(
            n,
            alphabet,
            bwt,
            sample_rate,
            locate_samples,
            antilocate_samples,
        );

        // LF must be a single cycle through all rows; walking it from the row of
        // the suffix "$" visits positions n, n-1, ..., 1, n+1.
        let rows = n + 1;
        let mut positions = vec![0usize; rows];
        let mut r = 0;
        for step in 0..rows {
            if positions[r] != 0 {
                return Err(bad("LF mapping is not a single cycle".into()));
            }
            positions[r] = if step == n { n + 1 } else { n - step };
            r = index.lf0(r);
        }
        if r != 0 {
            return Err(bad("LF mapping is not a single cycle".into()));
        }

        let expected: Vec<usize> = (1..=n + 1)
            .filter(|&p| is_sampled(p, n, sample_rate))
            .collect();
        let mut loc_pos: Vec<usize> = index.locate_samples.iter().map(|&(_, p)| p).collect();
        loc_pos.sort_unstable();
        if loc_pos != expected
            || index.locate_samples.windows(2).any(|w| w[0].0 >= w[1].0)
            || index
                .locate_samples
                .iter()
                .any(|&(row, p)| row == 0 || row > rows || positions[row - 1] != p)
        {
            return Err(bad("locate samples inconsistent with the bwt".into()));
        }
        let anti_pos: Vec<usize> = index.antilocate_samples.iter().map(|&(p, _)| p).collect();
        if anti_pos != expected
            || index
                .antilocate_samples
                .iter()
                .any(|&(p, row)| row == 0 || row > rows || positions[row - 1] != p)
        {
            return Err(bad("antilocate samples inconsistent with the bwt".into()));
        }
        Ok(index)
    }

    fn assemble(
        n: usize,
        alphabet: Vec<u8>,
        bwt: &[u8],
        sample_rate: usize,
        locate_samples: Vec<(usize, usize)>,
        antilocate_samples: Vec<(usize, usize)>,
    ) -> Self {
        let mut code_of = [ABSENT; 256];
        code_of[SENTINEL as usize] = 0;
        for (i, &c) in alphabet.iter().enumerate() {
            code_of[c as usize] = (i + 1) as u8;
        }
        let sigma = alphabet.len() + 1;
        let codes: Vec<u8> = bwt.iter().map(|&c| code_of[c as usize]).collect();
        let mut cum = vec![0usize; sigma + 1];
        for &c in &codes {
            cum[c as usize + 1] += 1;
        }
        for c in 1..cum.len() {
            cum[c] += cum[c - 1];
        }
        let locate_marks = MarkedRows::new(
            n + 1,
            locate_samples
                .iter()
                .filter(|&&(row, _)| (1..=n + 1).contains(&row))
                .map(|&(row, _)| row - 1),
        );
        BwtIndex {
            n,
            alphabet,
            code_of,
            occ: OccTable::new(codes, sigma),
            cum,
            sample_rate,
            locate_marks,
            locate_samples,
            antilocate_samples,
        }
    }

    /// Text length, excluding the sentinel.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of rows, `n + 1`.
    pub fn rows(&self) -> usize {
        self.n + 1
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn sample_rate(&self) -> usize {
        self.sample_rate
    }

    pub fn locate_samples(&self) -> &[(usize, usize)] {
        &self.locate_samples
    }

    pub fn antilocate_samples(&self) -> &[(usize, usize)] {
        &self.antilocate_samples
    }

    /// The BWT with [`SENTINEL`] in the row of the suffix starting at 1.
    pub fn bwt(&self) -> Vec<u8> {
        (0..self.rows()).map(|r| self.symbol_at0(r)).collect()
    }

    fn symbol_at0(&self, r: usize) -> u8 {
        match self.occ.code(r) {
            0 => SENTINEL,
            c => self.alphabet[c as usize - 1],
        }
    }

    /// Number of BWT symbols strictly smaller than `symbol` (the C array).
    pub fn cum_count(&self, symbol: u8) -> usize {
        match self.code_of[symbol as usize] {
            ABSENT => {
                let below = self.alphabet.partition_point(|&a| a < symbol);
                self.cum[below + 1]
            }
            c => self.cum[c as usize],
        }
    }

    /// Occurrences of `symbol` among the first `prefix` rows of the BWT.
    pub fn occ(&self, symbol: u8, prefix: usize) -> usize {
        match self.code_of[symbol as usize] {
            ABSENT => 0,
            c => self.occ.rank(c, prefix.min(self.rows())),
        }
    }

    #[inline]
    pub(crate) fn lf0(&self, r: usize) -> usize {
        let c = self.occ.code(r);
        self.cum[c as usize] + self.occ.rank(c, r)
    }

    /// LF mapping on 1-based rows: the row of the suffix one position earlier.
    pub fn lf(&self, row: usize) -> Result<usize> {
        self.check_row(row)?;
        Ok(self.lf0(row - 1) + 1)
    }

    /// Interval of rows whose suffixes start with `pattern`. The empty pattern
    /// matches every row; bytes outside the alphabet give an empty interval.
    pub fn backward_search(&self, pattern: &[u8]) -> Interval {
        let (mut lo, mut hi) = (0, self.rows());
        for &c in pattern.iter().rev() {
            let code = self.code_of[c as usize];
            if c == SENTINEL || code == ABSENT {
                return Interval::EMPTY;
            }
            lo = self.cum[code as usize] + self.occ.rank(code, lo);
            hi = self.cum[code as usize] + self.occ.rank(code, hi);
            if lo >= hi {
                return Interval::EMPTY;
            }
        }
        Interval::new(lo + 1, hi)
    }

    /// Interval of a single symbol, read directly from the C array.
    pub fn symbol_interval(&self, symbol: u8) -> Interval {
        match self.code_of[symbol as usize] {
            0 | ABSENT => Interval::EMPTY,
            c => Interval::new(self.cum[c as usize] + 1, self.cum[c as usize + 1]),
        }
    }

    fn check_row(&self, row: usize) -> Result<()> {
        if row == 0 || row > self.rows() {
            return Err(Error::RowOutOfRange {
                row,
                max: self.rows(),
            });
        }
        Ok(())
    }

    fn check_pos(&self, pos: usize) -> Result<()> {
        if pos == 0 || pos > self.rows() {
            return Err(Error::PositionOutOfRange {
                pos,
                max: self.rows(),
            });
        }
        Ok(())
    }

    /// Text position of the BWT symbol at `row`; equivalently the suffix at
    /// `row` starts at `locate(row) + 1` (the sentinel row maps to `n + 1`).
    pub fn locate(&self, row: usize) -> Result<usize> {
        self.check_row(row)?;
        Ok(self.locate0(row - 1))
    }

    /// Row whose BWT symbol is the text symbol at `pos`.
    pub fn antilocate(&self, pos: usize) -> Result<usize> {
        self.check_pos(pos)?;
        Ok(self.antilocate0(pos) + 1)
    }

    /// `locate` on a 0-based row.
    pub(crate) fn locate0(&self, mut r: usize) -> usize {
        let mut steps = 0;
        loop {
            if let Some(slot) = self.locate_marks.slot(r) {
                let pos = self.locate_samples[slot].1;
                return (pos - 1 + steps) % self.rows() + 1;
            }
            r = self.lf0(r);
            steps += 1;
        }
    }

    /// `antilocate` returning a 0-based row; `pos` must be in `1..=n+1`.
    pub(crate) fn antilocate0(&self, pos: usize) -> usize {
        let i = self.antilocate_samples.partition_point(|&(p, _)| p < pos);
        let (sampled, row) = self.antilocate_samples[i];
        let mut r = row - 1;
        for _ in pos..sampled {
            r = self.lf0(r);
        }
        r
    }

    /// Number of text characters before the occurrence at `row`, in `0..=n`.
    #[inline]
    pub(crate) fn preceding(&self, r0: usize) -> usize {
        self.locate0(r0) % self.rows()
    }

    /// Start positions of the occurrences in `interval`, ascending.
    pub fn locate_all(&self, interval: Interval, pattern_len: usize) -> Vec<usize> {
        let mut starts: Vec<usize> = interval
            .rows()
            .map(|r| self.preceding(r - 1) + 1)
            .collect();
        debug_assert!(starts.iter().all(|&s| s + pattern_len <= self.n + 1));
        starts.sort_unstable();
        starts
    }

    /// Reconstructs the original text by walking LF from the row of "$".
    pub fn recover_text(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n);
        let mut r = 0;
        for _ in 0..self.n {
            out.push(self.symbol_at0(r));
            r = self.lf0(r);
        }
        out.reverse();
        out
    }
}

fn is_sampled(pos: usize, n: usize, rate: usize) -> bool {
    pos == n + 1 || pos.is_multiple_of(rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(bwt: &[u8]) -> String {
        bwt.iter()
            .map(|&c| if c == SENTINEL { '$' } else { c as char })
            .collect()
    }

    fn miss(rate: usize) -> BwtIndex {
        BwtIndex::build(b"mississippi", rate).unwrap()
    }

    #[test]
    fn bwt_of_mississippi() {
        assert_eq!(show(&miss(4).bwt()), "ipssm$pissii");
        assert_eq!(show(&BwtIndex::build(b"a", 1).unwrap().bwt()), "a$");
    }

    #[test]
    fn build_errors() {
        assert!(matches!(BwtIndex::build(b"", 4), Err(Error::EmptyText)));
        assert!(matches!(
            BwtIndex::build(b"ab\0", 4),
            Err(Error::SentinelInText(3))
        ));
        assert!(matches!(
            BwtIndex::build(b"ab", 0),
            Err(Error::ZeroSampleRate)
        ));
    }

    #[test]
    fn intervals() {
        let idx = miss(4);
        assert_eq!(idx.backward_search(b"i"), Interval::new(2, 5));
        assert_eq!(idx.backward_search(b"p"), Interval::new(7, 8));
        assert_eq!(idx.backward_search(b"ip"), Interval::singleton(3));
        assert_eq!(idx.backward_search(b"s"), Interval::new(9, 12));
        assert_eq!(idx.backward_search(b""), Interval::new(1, 12));
        assert_eq!(idx.backward_search(b"x"), Interval::EMPTY);
        assert_eq!(idx.backward_search(b"i\0"), Interval::EMPTY);
        assert_eq!(idx.backward_search(b"pm"), Interval::EMPTY);
        assert_eq!(idx.symbol_interval(b's'), Interval::new(9, 12));
        assert_eq!(idx.symbol_interval(b'z'), Interval::EMPTY);
    }

    #[test]
    fn locate_and_antilocate() {
        for rate in [1, 2, 3, 4, 32] {
            let idx = miss(rate);
            assert_eq!(idx.locate(9).unwrap(), 6);
            assert_eq!(idx.locate(2).unwrap(), 10);
            assert_eq!(idx.locate(6).unwrap(), 12);
            for (pos, row) in [(9, 7), (6, 9), (8, 8), (5, 11), (11, 1), (2, 12)] {
                assert_eq!(idx.antilocate(pos).unwrap(), row, "rate {rate} pos {pos}");
            }
            for r in 1..=12 {
                assert_eq!(idx.antilocate(idx.locate(r).unwrap()).unwrap(), r);
            }
        }
    }

    #[test]
    fn range_errors() {
        let idx = miss(4);
        assert!(matches!(idx.locate(0), Err(Error::RowOutOfRange { .. })));
        assert!(matches!(idx.locate(13), Err(Error::RowOutOfRange { .. })));
        assert!(matches!(
            idx.antilocate(13),
            Err(Error::PositionOutOfRange { .. })
        ));
        assert!(idx.antilocate(12).is_ok());
    }

    #[test]
    fn locate_all_examples() {
        let idx = miss(4);
        assert_eq!(idx.locate_all(Interval::singleton(3), 2), vec![8]);
        assert_eq!(idx.locate_all(Interval::new(9, 12), 1), vec![3, 4, 6, 7]);
        assert!(idx.locate_all(Interval::EMPTY, 1).is_empty());
        assert_eq!(idx.locate_all(idx.backward_search(b"m"), 1), vec![1]);
    }

    #[test]
    fn counts_and_inversion() {
        let idx = miss(3);
        let total: usize = [SENTINEL, b'i', b'm', b'p', b's']
            .iter()
            .map(|&c| idx.occ(c, idx.rows()))
            .sum();
        assert_eq!(total, 12);
        assert_eq!(idx.cum_count(b'i'), 1);
        assert_eq!(idx.cum_count(b'm'), 5);
        assert_eq!(idx.cum_count(b'n'), 6);
        assert_eq!(idx.recover_text(), b"mississippi");
    }

    #[test]
    fn from_parts_rejects_inconsistent_samples() {
        let idx = miss(4);
        let mut loc = idx.locate_samples().to_vec();
        loc[0].1 += 1;
        let res = BwtIndex::from_parts(
            11,
            idx.alphabet().to_vec(),
            &idx.bwt(),
            4,
            loc,
            idx.antilocate_samples().to_vec(),
        );
        assert!(matches!(res, Err(Error::Format { .. })));
    }

    #[test]
    fn from_parts_rejects_broken_cycle() {
        let idx = miss(4);
        let mut bwt = idx.bwt();
        bwt.swap(0, 1);
        // "pissm$..." still has one sentinel but is not the BWT of any text with
        // the same samples.
        let res = BwtIndex::from_parts(
            11,
            idx.alphabet().to_vec(),
            &bwt,
            4,
            idx.locate_samples().to_vec(),
            idx.antilocate_samples().to_vec(),
        );
        assert!(res.is_err());
    }
}
