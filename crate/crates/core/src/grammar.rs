//! AVL-balanced straight-line programs.
//!
//! A [`Grammar`] is an append-only arena of rules. Each rule is a terminal
//! symbol or a pair of earlier rules whose heights differ by at most one, so
//! every rule's parse tree is an AVL tree and has height `O(log length)`.
//! Rules are never mutated: [`Grammar::split`] and [`Grammar::join`] build new
//! roots and leave existing ones intact. Identical pairs are shared, so a rule
//! id identifies its expansion's structure uniquely.
//!
//! [`Grammar::from_lz77`] turns an LZ77 parse into a grammar by appending each
//! phrase: a literal joins a terminal to the right end, a copy cuts the copied
//! range out of the grammar built so far and joins that.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::io::{open, put_u64, verify_crc};
use crate::lz77::{parse_multi, ParseResult, Phrase};

pub type RuleId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Terminal(u8),
    Pair(RuleId, RuleId),
}

#[derive(Debug, Clone, Default)]
pub struct Grammar {
    rules: Vec<Rule>,
    exp_len: Vec<usize>,
    height: Vec<u32>,
    roots: Vec<RuleId>,
    pairs: HashMap<(RuleId, RuleId), RuleId>,
    terminals: HashMap<u8, RuleId>,
}

pub const GRAMMAR_MAGIC: &[u8; 4] = b"SLPG";
pub const GRAMMAR_VERSION: u8 = 1;

impl Grammar {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total number of rules, including ones no root reaches any more.
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: RuleId) -> Result<Rule> {
        self.rules.get(id).copied().ok_or(Error::InvalidRule(id))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn exp_len(&self, id: RuleId) -> usize {
        self.exp_len[id]
    }

    pub fn height(&self, id: RuleId) -> u32 {
        self.height[id]
    }

    pub fn roots(&self) -> &[RuleId] {
        &self.roots
    }

    pub fn set_roots(&mut self, roots: Vec<RuleId>) -> Result<()> {
        for &r in &roots {
            self.check(r)?;
        }
        self.roots = roots;
        Ok(())
    }

    fn check(&self, id: RuleId) -> Result<()> {
        if id < self.rules.len() {
            Ok(())
        } else {
            Err(Error::InvalidRule(id))
        }
    }

    /// Terminal rule for `symbol`, created on first use.
    pub fn terminal(&mut self, symbol: u8) -> RuleId {
        if let Some(&id) = self.terminals.get(&symbol) {
            return id;
        }
        let id = self.push(Rule::Terminal(symbol), 1, 0);
        self.terminals.insert(symbol, id);
        id
    }

    /// Pair rule `left right`. Fails if the children differ in height by more
    /// than one; use [`Grammar::join`] to concatenate arbitrary roots.
    pub fn pair(&mut self, left: RuleId, right: RuleId) -> Result<RuleId> {
        self.check(left)?;
        self.check(right)?;
        if self.height[left].abs_diff(self.height[right]) > 1 {
            return Err(Error::Unbalanced { left, right });
        }
        Ok(self.make_pair(left, right))
    }

    fn make_pair(&mut self, left: RuleId, right: RuleId) -> RuleId {
        debug_assert!(self.height[left].abs_diff(self.height[right]) <= 1);
        if let Some(&id) = self.pairs.get(&(left, right)) {
            return id;
        }
        let len = self.exp_len[left] + self.exp_len[right];
        let h = 1 + self.height[left].max(self.height[right]);
        let id = self.push(Rule::Pair(left, right), len, h);
        self.pairs.insert((left, right), id);
        id
    }

    fn push(&mut self, rule: Rule, len: usize, height: u32) -> RuleId {
        self.rules.push(rule);
        self.exp_len.push(len);
        self.height.push(height);
        self.rules.len() - 1
    }

    fn children(&self, id: RuleId) -> (RuleId, RuleId) {
        match self.rules[id] {
            Rule::Pair(l, r) => (l, r),
            Rule::Terminal(_) => unreachable!("rule {id} is a terminal"),
        }
    }

    /// Root expanding to `expand(a) ++ expand(b)`.
    pub fn join(&mut self, a: RuleId, b: RuleId) -> Result<RuleId> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.concat(a, b))
    }

    fn concat(&mut self, a: RuleId, b: RuleId) -> RuleId {
        let (ha, hb) = (self.height[a], self.height[b]);
        if ha.abs_diff(hb) <= 1 {
            return self.make_pair(a, b);
        }
        if ha > hb {
            let (al, ar) = self.children(a);
            let t = self.concat(ar, b);
            if self.height[t] <= self.height[al] + 1 {
                return self.make_pair(al, t);
            }
            // t is two taller than al: rotate left.
            let (tl, tr) = self.children(t);
            if self.height[tl] <= self.height[tr] {
                let inner = self.make_pair(al, tl);
                self.make_pair(inner, tr)
            } else {
                let (tll, tlr) = self.children(tl);
                let left = self.make_pair(al, tll);
                let right = self.make_pair(tlr, tr);
                self.make_pair(left, right)
            }
        } else {
            let (bl, br) = self.children(b);
            let t = self.concat(a, bl);
            if self.height[t] <= self.height[br] + 1 {
                return self.make_pair(t, br);
            }
            let (tl, tr) = self.children(t);
            if self.height[tr] <= self.height[tl] {
                let inner = self.make_pair(tr, br);
                self.make_pair(tl, inner)
            } else {
                let (trl, trr) = self.children(tr);
                let left = self.make_pair(tl, trl);
                let right = self.make_pair(trr, br);
                self.make_pair(left, right)
            }
        }
    }

    /// Roots for the first `k` symbols and the rest, `1 <= k < exp_len(root)`.
    pub fn split(&mut self, root: RuleId, k: usize) -> Result<(RuleId, RuleId)> {
        self.check(root)?;
        let len = self.exp_len[root];
        if k == 0 || k >= len {
            return Err(Error::SplitOutOfRange { k, len });
        }
        Ok((self.take_prefix(root, k), self.take_suffix(root, len - k)))
    }

    /// Root for the `len` symbols starting at 1-based `start`.
    pub fn slice(&mut self, root: RuleId, start: usize, len: usize) -> Result<RuleId> {
        self.check(root)?;
        let total = self.exp_len[root];
        if start == 0 || len == 0 || start - 1 + len > total {
            return Err(Error::SplitOutOfRange {
                k: start + len,
                len: total,
            });
        }
        let head = self.take_prefix(root, start - 1 + len);
        Ok(self.take_suffix(head, len))
    }

    /// First `k` symbols, `1 <= k <= exp_len(x)`.
    fn take_prefix(&mut self, x: RuleId, k: usize) -> RuleId {
        if k == self.exp_len[x] {
            return x;
        }
        let (l, r) = self.children(x);
        let ll = self.exp_len[l];
        if k <= ll {
            self.take_prefix(l, k)
        } else {
            let tail = self.take_prefix(r, k - ll);
            self.concat(l, tail)
        }
    }

    /// Last `k` symbols, `1 <= k <= exp_len(x)`.
    fn take_suffix(&mut self, x: RuleId, k: usize) -> RuleId {
        if k == self.exp_len[x] {
            return x;
        }
        let (l, r) = self.children(x);
        let rl = self.exp_len[r];
        if k <= rl {
            self.take_suffix(r, k)
        } else {
            let head = self.take_suffix(l, k - rl);
            self.concat(head, r)
        }
    }

    /// Builds the grammar for `decode(parse.phrases)` phrase by phrase. The
    /// result has a single root, or none for an empty parse.
    pub fn from_lz77(parse: &ParseResult) -> Result<Grammar> {
        let mut g = Grammar::new();
        let mut root: Option<RuleId> = None;
        for (i, p) in parse.phrases.iter().enumerate() {
            let piece = match (*p, root) {
                (Phrase::Literal(c), _) => g.terminal(c),
                (Phrase::Copy { src, len }, Some(r))
                    if src >= 1 && len >= 1 && src - 1 + len <= g.exp_len[r] =>
                {
                    g.slice(r, src, len)?
                }
                (Phrase::Copy { src, len }, r) => {
                    return Err(Error::MalformedPhrase {
                        index: i,
                        reason: format!(
                            "copy ({src}, {len}) outside the {} symbols parsed so far",
                            r.map_or(0, |r| g.exp_len[r])
                        ),
                    })
                }
            };
            root = Some(match root {
                None => piece,
                Some(r) => g.concat(r, piece),
            });
        }
        g.roots = root.into_iter().collect();
        Ok(g)
    }

    /// Cuts `root` at the cumulative `boundaries` (strictly increasing, the
    /// last equal to `exp_len(root)`) and returns one root per piece. The
    /// returned roots also become the grammar's roots.
    pub fn split_patterns(&mut self, root: RuleId, boundaries: &[usize]) -> Result<Vec<RuleId>> {
        self.check(root)?;
        let total = self.exp_len[root];
        if boundaries.last() != Some(&total) {
            return Err(Error::BadBoundaries(format!(
                "last boundary must equal the expansion length {total}"
            )));
        }
        if boundaries.first() == Some(&0) || boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadBoundaries(
                "boundaries must be positive and strictly increasing".into(),
            ));
        }
        let mut out = Vec::with_capacity(boundaries.len());
        let mut rest = root;
        let mut consumed = 0;
        for &b in &boundaries[..boundaries.len() - 1] {
            let (head, tail) = self.split(rest, b - consumed)?;
            out.push(head);
            rest = tail;
            consumed = b;
        }
        out.push(rest);
        self.roots = out.clone();
        Ok(out)
    }

    /// The string `id` derives.
    pub fn expand(&self, id: RuleId) -> Result<Vec<u8>> {
        self.check(id)?;
        let mut out = Vec::with_capacity(self.exp_len[id]);
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            match self.rules[x] {
                Rule::Terminal(c) => out.push(c),
                Rule::Pair(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        Ok(out)
    }

    /// Ids of every rule reachable from `roots`, ascending (children first).
    pub fn reachable(&self, roots: &[RuleId]) -> Result<Vec<RuleId>> {
        let mut seen = vec![false; self.rules.len()];
        let mut stack = Vec::new();
        for &r in roots {
            self.check(r)?;
            stack.push(r);
        }
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x], true) {
                continue;
            }
            if let Rule::Pair(l, r) = self.rules[x] {
                stack.push(l);
                stack.push(r);
            }
        }
        Ok((0..self.rules.len()).filter(|&i| seen[i]).collect())
    }

    /// Serializes the rules reachable from `roots`, renumbered densely in
    /// creation order so children always precede parents.
    ///
    /// ```text
    /// "SLPG" | version u8 = 1 | rule count u64
    /// per rule: 0 | symbol u8   or   1 | left u64 | right u64
    /// root count u64 | root ids u64* | crc32 u32       (little endian)
    /// ```
    pub fn serialize(&self, roots: &[RuleId]) -> Result<Vec<u8>> {
        let live = self.reachable(roots)?;
        let mut new_id = vec![usize::MAX; self.rules.len()];
        for (i, &old) in live.iter().enumerate() {
            new_id[old] = i;
        }
        let mut out = Vec::with_capacity(5 + 8 + live.len() * 17 + 8 + roots.len() * 8 + 4);
        out.extend_from_slice(GRAMMAR_MAGIC);
        out.push(GRAMMAR_VERSION);
        put_u64(&mut out, live.len() as u64);
        for &old in &live {
            match self.rules[old] {
                Rule::Terminal(c) => {
                    out.push(0);
                    out.push(c);
                }
                Rule::Pair(l, r) => {
                    out.push(1);
                    put_u64(&mut out, new_id[l] as u64);
                    put_u64(&mut out, new_id[r] as u64);
                }
            }
        }
        put_u64(&mut out, roots.len() as u64);
        for &r in roots {
            put_u64(&mut out, new_id[r] as u64);
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        Ok(out)
    }

    /// Inverse of [`Grammar::serialize`]. Rejects forward or dangling
    /// references, duplicate rules and unbalanced pairs.
    pub fn deserialize(bytes: &[u8]) -> Result<Grammar> {
        const WHAT: &str = "grammar payload";
        let mut r = open(bytes, GRAMMAR_MAGIC, GRAMMAR_VERSION, WHAT)?;
        let count = r.len_u64()?;
        let mut g = Grammar::new();
        for i in 0..count {
            let id = match r.u8()? {
                0 => {
                    let c = r.u8()?;
                    if g.terminals.contains_key(&c) {
                        return Err(Error::format(WHAT, format!("rule {i}: duplicate terminal")));
                    }
                    g.terminal(c)
                }
                1 => {
                    let (left, right) = (r.len_u64()?, r.len_u64()?);
                    if left >= i || right >= i {
                        return Err(Error::format(
                            WHAT,
                            format!("rule {i} references a rule that does not precede it"),
                        ));
                    }
                    if g.pairs.contains_key(&(left, right)) {
                        return Err(Error::format(WHAT, format!("rule {i}: duplicate pair")));
                    }
                    g.pair(left, right)?
                }
                t => return Err(Error::format(WHAT, format!("rule {i}: unknown tag {t}"))),
            };
            debug_assert_eq!(id, i);
        }
        let root_count = r.len_u64()?;
        let mut roots = Vec::new();
        for _ in 0..root_count {
            let id = r.len_u64()?;
            if id >= count {
                return Err(Error::format(WHAT, format!("dangling root id {id}")));
            }
            roots.push(id);
        }
        verify_crc(bytes, r)?;
        g.roots = roots;
        Ok(g)
    }
}

/// Runs the preprocessing pipeline for a batch of patterns: LZ77 parse of the
/// sequence, grammar construction, then one split per pattern boundary.
/// Returns the grammar, the per-pattern roots and the parse.
pub fn build_pattern_grammar<P: AsRef<[u8]>>(
    patterns: &[P],
) -> Result<(Grammar, Vec<RuleId>, ParseResult)> {
    if let Some(i) = patterns.iter().position(|p| p.as_ref().is_empty()) {
        return Err(Error::EmptyPattern(i));
    }
    let parse = parse_multi(patterns);
    let mut g = Grammar::from_lz77(&parse)?;
    let roots = match g.roots.first() {
        Some(&root) => g.split_patterns(root, &parse.pattern_boundaries)?,
        None => Vec::new(),
    };
    Ok((g, roots, parse))
}
