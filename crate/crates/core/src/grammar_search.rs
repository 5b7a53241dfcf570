//! Pattern intervals from grammar roots.
//!
//! Terminals are looked up directly; a pair rule's interval is the glue of its
//! children's intervals. Results are memoized per rule id, and since identical
//! pairs share an id, each distinct rule costs at most one glue no matter how
//! many patterns or parse-tree nodes use it.
//!
//! Rules are processed by height. A rule's children are strictly lower, so all
//! rules of one height are independent and [`search_grammar_parallel`] spreads
//! each level over worker threads.

use std::thread;

use crate::error::{Error, Result};
use crate::glue::{glue_with_stats, GlueStats};
use crate::grammar::{Grammar, Rule, RuleId};
use crate::{BwtIndex, Interval};

/// Interval found so far for each rule id.
#[derive(Debug, Clone, Default)]
pub struct IntervalMemo {
    entries: Vec<Option<Interval>>,
}

impl IntervalMemo {
    pub fn new(rules: usize) -> Self {
        IntervalMemo {
            entries: vec![None; rules],
        }
    }

    pub fn get(&self, id: RuleId) -> Option<Interval> {
        self.entries.get(id).copied().flatten()
    }

    fn set(&mut self, id: RuleId, iv: Interval) {
        self.entries[id] = Some(iv);
    }
}

/// Reachable rules grouped by height, lowest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    pub levels: Vec<Vec<RuleId>>,
}

impl LevelSchedule {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

pub fn level_schedule(grammar: &Grammar, roots: &[RuleId]) -> Result<LevelSchedule> {
    let live = grammar.reachable(roots)?;
    let top = live.iter().map(|&id| grammar.height(id)).max();
    let mut levels = vec![Vec::new(); top.map_or(0, |h| h as usize + 1)];
    for id in live {
        levels[grammar.height(id) as usize].push(id);
    }
    levels.retain(|l| !l.is_empty());
    Ok(LevelSchedule { levels })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Glue invocations; at most one per distinct reachable pair rule.
    pub glue_calls: usize,
    /// Pair rules resolved as empty because a child was empty.
    pub short_circuits: usize,
    pub terminal_lookups: usize,
    pub probes: GlueStats,
    pub level_sizes: Vec<usize>,
}

enum Outcome {
    Terminal,
    Glued(GlueStats),
    ShortCircuit,
}

fn resolve(index: &BwtIndex, grammar: &Grammar, memo: &IntervalMemo, id: RuleId) -> (Interval, Outcome) {
    match grammar.rules()[id] {
        Rule::Terminal(c) => (index.symbol_interval(c), Outcome::Terminal),
        Rule::Pair(l, r) => {
            let left = memo.get(l).expect("children resolved before parents");
            let right = memo.get(r).expect("children resolved before parents");
            if left.is_empty() || right.is_empty() {
                (Interval::EMPTY, Outcome::ShortCircuit)
            } else {
                let (iv, probes) = glue_with_stats(index, left, grammar.exp_len(l), right);
                (iv, Outcome::Glued(probes))
            }
        }
    }
}

fn record(stats: &mut SearchStats, outcome: Outcome) {
    match outcome {
        Outcome::Terminal => stats.terminal_lookups += 1,
        Outcome::ShortCircuit => stats.short_circuits += 1,
        Outcome::Glued(p) => {
            stats.glue_calls += 1;
            stats.probes += p;
        }
    }
}

/// Interval of `expand(root)`.
pub fn search_grammar(index: &BwtIndex, grammar: &Grammar, root: RuleId) -> Result<Interval> {
    Ok(multi_search(index, grammar, &[root])?[0])
}

/// Intervals for several roots sharing one memo.
pub fn multi_search(index: &BwtIndex, grammar: &Grammar, roots: &[RuleId]) -> Result<Vec<Interval>> {
    Ok(multi_search_with_stats(index, grammar, roots)?.0)
}

pub fn multi_search_with_stats(
    index: &BwtIndex,
    grammar: &Grammar,
    roots: &[RuleId],
) -> Result<(Vec<Interval>, SearchStats)> {
    search_levels(index, grammar, roots, 1)
}

/// Same output as [`multi_search`]; each level's rules are split into
/// `workers` contiguous blocks processed concurrently.
pub fn search_grammar_parallel(
    index: &BwtIndex,
    grammar: &Grammar,
    roots: &[RuleId],
    workers: usize,
) -> Result<Vec<Interval>> {
    Ok(search_grammar_parallel_with_stats(index, grammar, roots, workers)?.0)
}

pub fn search_grammar_parallel_with_stats(
    index: &BwtIndex,
    grammar: &Grammar,
    roots: &[RuleId],
    workers: usize,
) -> Result<(Vec<Interval>, SearchStats)> {
    if workers == 0 {
        return Err(Error::ZeroWorkers);
    }
    search_levels(index, grammar, roots, workers)
}

fn search_levels(
    index: &BwtIndex,
    grammar: &Grammar,
    roots: &[RuleId],
    workers: usize,
) -> Result<(Vec<Interval>, SearchStats)> {
    let schedule = level_schedule(grammar, roots)?;
    let mut memo = IntervalMemo::new(grammar.len());
    let mut stats = SearchStats {
        level_sizes: schedule.level_sizes(),
        ..SearchStats::default()
    };
    for level in &schedule.levels {
        if workers == 1 || level.len() == 1 {
            for &id in level {
                let (iv, outcome) = resolve(index, grammar, &memo, id);
                memo.set(id, iv);
                record(&mut stats, outcome);
            }
            continue;
        }
        let block = level.len().div_ceil(workers);
        let memo_ref = &memo;
        let results: Vec<Vec<(RuleId, Interval, Outcome)>> = thread::scope(|s| {
            let handles: Vec<_> = level
                .chunks(block)
                .map(|chunk| {
                    s.spawn(move || {
                        chunk
                            .iter()
                            .map(|&id| {
                                let (iv, o) = resolve(index, grammar, memo_ref, id);
                                (id, iv, o)
                            })
                            .collect()
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        for (id, iv, outcome) in results.into_iter().flatten() {
            memo.set(id, iv);
            record(&mut stats, outcome);
        }
    }
    let intervals = roots
        .iter()
        .map(|&r| memo.get(r).expect("every root is scheduled"))
        .collect();
    Ok((intervals, stats))
}
