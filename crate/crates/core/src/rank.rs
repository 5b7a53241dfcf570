//! Prefix-count structures over the BWT.

const BLOCK: usize = 64;

/// Rank over a sequence of small symbol codes: checkpoints every 64 positions,
/// then a short scan.
#[derive(Debug, Clone)]
pub(crate) struct OccTable {
    codes: Vec<u8>,
    sigma: usize,
    /// `checkpoints[b * sigma + c]` = occurrences of `c` in `codes[..b * BLOCK]`.
    checkpoints: Vec<u32>,
}

impl OccTable {
    pub(crate) fn new(codes: Vec<u8>, sigma: usize) -> Self {
        let blocks = codes.len() / BLOCK + 1;
        let mut checkpoints = Vec::with_capacity(blocks * sigma);
        let mut running = vec![0u32; sigma];
        for (i, &c) in codes.iter().enumerate() {
            if i % BLOCK == 0 {
                checkpoints.extend_from_slice(&running);
            }
            running[c as usize] += 1;
        }
        if codes.len().is_multiple_of(BLOCK) {
            checkpoints.extend_from_slice(&running);
        }
        OccTable {
            codes,
            sigma,
            checkpoints,
        }
    }

    pub(crate) fn code(&self, pos: usize) -> u8 {
        self.codes[pos]
    }

    /// Occurrences of `code` in positions `0..end`.
    #[inline]
    pub(crate) fn rank(&self, code: u8, end: usize) -> usize {
        let block = end / BLOCK;
        let base = self.checkpoints[block * self.sigma + code as usize] as usize;
        base + self.codes[block * BLOCK..end]
            .iter()
            .filter(|&&c| c == code)
            .count()
    }
}

/// Marks a subset of rows and maps each marked row to its slot in a dense array.
#[derive(Debug, Clone)]
pub(crate) struct MarkedRows {
    bits: Vec<u64>,
    before: Vec<u32>,
}

impl MarkedRows {
    pub(crate) fn new(len: usize, marked: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![0u64; len / 64 + 1];
        for r in marked {
            bits[r / 64] |= 1 << (r % 64);
        }
        let mut before = Vec::with_capacity(bits.len());
        let mut acc = 0u32;
        for w in &bits {
            before.push(acc);
            acc += w.count_ones();
        }
        MarkedRows { bits, before }
    }

    /// Slot of `row` among marked rows, if marked.
    #[inline]
    pub(crate) fn slot(&self, row: usize) -> Option<usize> {
        let (w, b) = (row / 64, row % 64);
        let word = self.bits[w];
        if word >> b & 1 == 0 {
            return None;
        }
        let below = (word & ((1u64 << b) - 1)).count_ones();
        Some((self.before[w] + below) as usize)
    }
}
