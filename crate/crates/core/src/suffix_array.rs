//! Suffix sorting by prefix doubling with radix passes, O(n log n).
//!
//! The end of the input compares smaller than every byte, so the input may
//! contain any byte value, including the index sentinel.

/// Start offsets (0-based) of the suffixes of `s` in lexicographic order.
pub fn suffix_array(s: &[u8]) -> Vec<usize> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    // Ranks start at 1; 0 is reserved for "past the end".
    let mut rank: Vec<usize> = s.iter().map(|&c| c as usize + 1).collect();
    let mut sa: Vec<usize> = (0..n).collect();
    sa.sort_by_key(|&i| s[i]);
    let mut next = vec![0usize; n];
    let mut by_second = Vec::with_capacity(n);
    let mut counts = vec![0usize; n.max(256) + 2];

    renumber(&sa, &mut next, |i| (rank[i], 0));
    std::mem::swap(&mut rank, &mut next);

    let mut k = 1;
    while rank[sa[n - 1]] < n {
        // Order by the second half: suffixes too short to have one come first.
        by_second.clear();
        by_second.extend(n.saturating_sub(k)..n);
        by_second.extend(sa.iter().filter(|&&j| j >= k).map(|&j| j - k));

        // Stable counting sort by the first half.
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in &by_second {
            counts[rank[i]] += 1;
        }
        let mut sum = 0;
        for c in counts.iter_mut() {
            let here = *c;
            *c = sum;
            sum += here;
        }
        for &i in &by_second {
            sa[counts[rank[i]]] = i;
            counts[rank[i]] += 1;
        }

        let r = &rank;
        renumber(&sa, &mut next, |i| {
            (r[i], if i + k < n { r[i + k] } else { 0 })
        });
        std::mem::swap(&mut rank, &mut next);
        k *= 2;
    }
    sa
}

fn renumber<K: PartialEq>(sa: &[usize], out: &mut [usize], key: impl Fn(usize) -> K) {
    let mut current = 1;
    out[sa[0]] = current;
    let mut prev = key(sa[0]);
    for &i in &sa[1..] {
        let k = key(i);
        if k != prev {
            current += 1;
            prev = k;
        }
        out[i] = current;
    }
}

/// Kasai's algorithm: `lcp[r]` is the longest common prefix of the suffixes at
/// ranks `r - 1` and `r`; `lcp[0] = 0`.
pub fn lcp_array(s: &[u8], sa: &[usize]) -> Vec<usize> {
    let n = s.len();
    let mut inverse = vec![0usize; n];
    for (r, &p) in sa.iter().enumerate() {
        inverse[p] = r;
    }
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for p in 0..n {
        let r = inverse[p];
        if r == 0 {
            h = 0;
            continue;
        }
        let q = sa[r - 1];
        while p + h < n && q + h < n && s[p + h] == s[q + h] {
            h += 1;
        }
        lcp[r] = h;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Range-minimum queries in O(1) after O(n log n) preprocessing.
#[derive(Debug, Clone)]
pub struct SparseMin {
    table: Vec<Vec<usize>>,
}

impl SparseMin {
    pub fn new(values: &[usize]) -> Self {
        let mut table = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = table.last().unwrap();
            let row = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            table.push(row);
            width *= 2;
        }
        SparseMin { table }
    }

    /// Minimum over `lo..=hi`. Panics on an empty or out-of-range query.
    pub fn min(&self, lo: usize, hi: usize) -> usize {
        let level = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let row = &self.table[level];
        row[lo].min(row[hi + 1 - (1 << level)])
    }
}
