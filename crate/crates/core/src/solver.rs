//! Exact P/N and Grundy evaluation.
//!
//! Search is an explicit-stack depth-first traversal memoized on canonical
//! keys, so game depth (bounded by the word length) never touches the
//! native call stack.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::position::{CanonicalKey, Move, Position, Symbol};
use crate::table::TranspositionTable;

/// Default limit on expanded nodes per top-level call.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("node budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{count} P-extensions of {base} by '{symbol}' in [0, {bound}] (expected exactly one)")]
    ExtensionNotUnique {
        base: String,
        symbol: char,
        bound: usize,
        count: usize,
    },
}

/// A Grundy value (nimber).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grundy(pub u32);

impl Grundy {
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn outcome(self) -> Outcome {
        if self.is_zero() {
            Outcome::P
        } else {
            Outcome::N
        }
    }
}

impl fmt::Display for Grundy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// The previous mover wins.
    P,
    /// The next mover wins.
    N,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::P => f.write_str("P"),
            Outcome::N => f.write_str("N"),
        }
    }
}

/// Classification plus, for N-positions, the smallest move reaching a P-position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Option<Move>,
}

impl Verdict {
    pub fn is_p(&self) -> bool {
        self.outcome == Outcome::P
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes_expanded: u64,
    pub cache_hits: u64,
    pub peak_table_size: usize,
    pub wall_time: Duration,
}

/// Least non-negative integer not in `values`.
pub fn mex<I: IntoIterator<Item = u32>>(values: I) -> u32 {
    let mut seen: Vec<bool> = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= seen.len() {
            seen.resize(v + 1, false);
        }
        seen[v] = true;
    }
    seen.iter().position(|s| !s).unwrap_or(seen.len()) as u32
}

struct Frame {
    key: CanonicalKey,
    children: Vec<Position>,
    next: usize,
    values: Vec<u32>,
}

impl Frame {
    fn new(key: CanonicalKey, pos: &Position) -> Frame {
        let children: Vec<Position> = pos.successors().into_iter().collect();
        let values = Vec::with_capacity(children.len());
        Frame {
            key,
            children,
            next: 0,
            values,
        }
    }
}

/// A solver bound to a (possibly shared) transposition table.
pub struct Solver<'t> {
    table: &'t TranspositionTable,
    budget: u64,
    stats: SolveStats,
}

impl<'t> Solver<'t> {
    pub fn new(table: &'t TranspositionTable) -> Solver<'t> {
        Solver::with_budget(table, DEFAULT_NODE_BUDGET)
    }

    /// `budget` limits expanded nodes per top-level call.
    pub fn with_budget(table: &'t TranspositionTable, budget: u64) -> Solver<'t> {
        Solver {
            table,
            budget,
            stats: SolveStats::default(),
        }
    }

    pub fn table(&self) -> &'t TranspositionTable {
        self.table
    }

    pub fn stats(&self) -> SolveStats {
        self.stats
    }

    pub fn grundy(&mut self, pos: &Position) -> Result<Grundy, SolveError> {
        let started = Instant::now();
        let result = self.search(pos);
        self.stats.wall_time += started.elapsed();
        self.stats.peak_table_size = self.stats.peak_table_size.max(self.table.len());
        result
    }

    fn search(&mut self, root: &Position) -> Result<Grundy, SolveError> {
        let root_key = root.canonical_key();
        if let Some(g) = self.table.probe(&root_key) {
            self.stats.cache_hits += 1;
            return Ok(g);
        }
        let mut expanded = 1u64;
        if expanded > self.budget {
            return Err(SolveError::BudgetExhausted { budget: self.budget });
        }
        self.stats.nodes_expanded += 1;
        let mut stack = vec![Frame::new(root_key, root)];
        loop {
            let top = stack.last_mut().expect("stack holds the root until return");
            if top.next < top.children.len() {
                let child = &top.children[top.next];
                top.next += 1;
                let key = child.canonical_key();
                if let Some(g) = self.table.probe(&key) {
                    self.stats.cache_hits += 1;
                    top.values.push(g.0);
                    continue;
                }
                expanded += 1;
                if expanded > self.budget {
                    return Err(SolveError::BudgetExhausted { budget: self.budget });
                }
                self.stats.nodes_expanded += 1;
                let frame = Frame::new(key, child);
                stack.push(frame);
            } else {
                let done = stack.pop().expect("non-empty");
                let value = mex(done.values);
                self.table.insert(done.key, Grundy(value));
                match stack.last_mut() {
                    Some(parent) => parent.values.push(value),
                    None => return Ok(Grundy(value)),
                }
            }
        }
    }

    pub fn classify(&mut self, pos: &Position) -> Result<Verdict, SolveError> {
        if self.grundy(pos)?.is_zero() {
            return Ok(Verdict {
                outcome: Outcome::P,
                certificate: None,
            });
        }
        for mv in pos.legal_moves() {
            let next = pos.apply_unchecked(mv.run - 1, mv.count);
            if self.grundy(&next)?.is_zero() {
                return Ok(Verdict {
                    outcome: Outcome::N,
                    certificate: Some(mv),
                });
            }
        }
        unreachable!("a position with non-zero Grundy value has a P successor")
    }

    /// Every legal move whose result is a P-position, in move order.
    pub fn winning_moves(&mut self, pos: &Position) -> Result<Vec<Move>, SolveError> {
        let mut out = Vec::new();
        for mv in pos.legal_moves() {
            let next = pos.apply_unchecked(mv.run - 1, mv.count);
            if self.grundy(&next)?.is_zero() {
                out.push(mv);
            }
        }
        Ok(out)
    }

    /// The unique `x` in `[0, |s|]` with `s·c^x` a P-position.
    pub fn unique_extension(&mut self, s: &Position, c: Symbol) -> Result<u32, SolveError> {
        let Some(last) = s.last_symbol() else {
            return Err(SolveError::Precondition("base position is empty".into()));
        };
        if last == c {
            return Err(SolveError::Precondition(format!(
                "extension symbol '{}' equals the last run symbol",
                c
            )));
        }
        let bound = s.len();
        let mut found = Vec::new();
        for x in 0..=bound as u32 {
            if self.grundy(&s.extended(c, x))?.is_zero() {
                found.push(x);
            }
        }
        match found.as_slice() {
            [x] => Ok(*x),
            _ => Err(SolveError::ExtensionNotUnique {
                base: s.literal(),
                symbol: c.to_char(),
                bound,
                count: found.len(),
            }),
        }
    }
}

/// Solves independent roots on `workers` threads sharing one table. The
/// result order matches the input order.
pub fn grundy_batch(
    positions: &[Position],
    table: &TranspositionTable,
    workers: usize,
    budget: u64,
) -> Vec<Result<Grundy, SolveError>> {
    let solve = |p: &Position| Solver::with_budget(table, budget).grundy(p);
    if workers <= 1 {
        return positions.iter().map(solve).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| positions.par_iter().map(solve).collect()),
        Err(_) => positions.iter().map(solve).collect(),
    }
}

/// Every word over `alphabet` with length at most `max_len`, ordered by
/// length and then lexicographically.
pub fn all_words(alphabet: &[Symbol], max_len: usize) -> Vec<Position> {
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = vec![Position::empty()];
    if sorted.is_empty() {
        return out;
    }
    let k = sorted.len();
    for len in 1..=max_len {
        let mut digits = vec![0usize; len];
        loop {
            out.push(Position::from_symbols(digits.iter().map(|&d| sorted[d])));
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < k {
                    break;
                }
                digits[i] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    out
}

/// Number of words with length at most `max_len` over `k` letters, saturating.
pub fn word_count(k: usize, max_len: usize) -> u64 {
    let mut total = 0u64;
    let mut layer = 1u64;
    for _ in 0..=max_len {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(k as u64);
    }
    total
}

/// Grundy values for every word over `alphabet` up to `max_len`. With
/// `canonical_only`, only the first word of each canonical class is kept.
/// Roots are spread over `workers` threads; output order is fixed.
pub fn enumerate_table(
    alphabet: &[Symbol],
    max_len: usize,
    canonical_only: bool,
    workers: usize,
    table: &TranspositionTable,
    budget: u64,
) -> Result<Vec<(Position, Grundy)>, SolveError> {
    if word_count(alphabet.len(), max_len) > budget {
        return Err(SolveError::BudgetExhausted { budget });
    }
    let mut words = all_words(alphabet, max_len);
    if canonical_only {
        let mut seen = std::collections::HashSet::new();
        words.retain(|p| seen.insert(p.canonical_key()));
    }
    let values = grundy_batch(&words, table, workers, budget);
    words.into_iter().zip(values).map(|(p, g)| g.map(|g| (p, g))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Position {
        Position::parse(s).unwrap()
    }

    fn sym(c: char) -> Symbol {
        Symbol::from_char(c).unwrap()
    }

    #[test]
    fn mex_examples() {
        assert_eq!(mex([]), 0);
        assert_eq!(mex([0, 1, 2]), 3);
        assert_eq!(mex([1, 0, 2, 5]), 3);
        assert_eq!(mex([1, 1, 3]), 0);
    }

    #[test]
    fn grundy_examples() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        assert_eq!(solver.grundy(&Position::empty()).unwrap(), Grundy(0));
        assert_eq!(solver.grundy(&p("aaaa")).unwrap(), Grundy(4));
        assert_eq!(solver.grundy(&p("ab")).unwrap(), Grundy(0));
        assert!(solver.stats().nodes_expanded > 0);
    }

    #[test]
    fn classify_examples() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        assert!(solver.classify(&p("ba")).unwrap().is_p());
        let v = solver.classify(&p("abbccaaaaaa")).unwrap();
        assert_eq!(v.outcome, Outcome::N);
        let cert = v.certificate.unwrap();
        let after = p("abbccaaaaaa").apply_move(cert).unwrap();
        assert!(solver.classify(&after).unwrap().is_p());
        assert!(solver.classify(&p("abccaacb")).unwrap().is_p());
        assert_eq!(solver.classify(&Position::empty()).unwrap().certificate, None);
    }

    #[test]
    fn winning_move_examples() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        assert_eq!(solver.winning_moves(&p("b")).unwrap(), vec![Move::new(1, 1)]);
        assert!(solver.winning_moves(&p("ba")).unwrap().is_empty());
        // aaba: (1,1)->aba N, (1,2)->ba P, (2,1)->aaa N, (3,1)->aab N
        assert_eq!(solver.winning_moves(&p("aaba")).unwrap(), vec![Move::new(1, 2)]);
    }

    #[test]
    fn unique_extension_examples() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        assert_eq!(solver.unique_extension(&p("b"), sym('a')).unwrap(), 1);
        assert_eq!(solver.unique_extension(&p("ab"), sym('a')).unwrap(), 0);
        assert_eq!(solver.unique_extension(&p("aab"), sym('a')).unwrap(), 2);
        assert!(matches!(
            solver.unique_extension(&Position::empty(), sym('a')),
            Err(SolveError::Precondition(_))
        ));
        assert!(matches!(
            solver.unique_extension(&p("ab"), sym('b')),
            Err(SolveError::Precondition(_))
        ));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let table = TranspositionTable::new();
        let mut solver = Solver::with_budget(&table, 5);
        assert_eq!(
            solver.grundy(&p("abcabcabc")),
            Err(SolveError::BudgetExhausted { budget: 5 })
        );
        // Partial work left in the table is still correct.
        let fresh = TranspositionTable::new();
        let mut reference = Solver::new(&fresh);
        for (key, value) in table.snapshot() {
            let pos = Position::parse(key.as_str()).unwrap();
            assert_eq!(reference.grundy(&pos).unwrap(), value);
        }
    }

    #[test]
    fn enumerate_examples() {
        let table = TranspositionTable::new();
        let rows = enumerate_table(&Symbol::first(1), 3, false, 1, &table, DEFAULT_NODE_BUDGET).unwrap();
        let got: Vec<(String, u32)> = rows.iter().map(|(p, g)| (p.literal(), g.0)).collect();
        assert_eq!(
            got,
            vec![("".into(), 0), ("a".into(), 1), ("aa".into(), 2), ("aaa".into(), 3)]
        );
        let rows = enumerate_table(&Symbol::first(2), 1, false, 1, &table, DEFAULT_NODE_BUDGET).unwrap();
        let got: Vec<(String, u32)> = rows.iter().map(|(p, g)| (p.literal(), g.0)).collect();
        assert_eq!(got, vec![("".into(), 0), ("a".into(), 1), ("b".into(), 1)]);

        let rows = enumerate_table(&Symbol::first(2), 2, false, 1, &table, DEFAULT_NODE_BUDGET).unwrap();
        let got: Vec<(String, u32)> = rows.iter().map(|(p, g)| (p.literal(), g.0)).collect();
        for want in [("ab", 0), ("ba", 0), ("aa", 2), ("bb", 2), ("a", 1), ("b", 1), ("", 0)] {
            assert!(got.contains(&(want.0.to_string(), want.1)), "{want:?}");
        }
        assert_eq!(got.len(), 7);
    }

    #[test]
    fn enumerate_canonical_only_dedupes() {
        let table = TranspositionTable::new();
        let rows = enumerate_table(&Symbol::first(2), 2, true, 2, &table, DEFAULT_NODE_BUDGET).unwrap();
        let got: Vec<String> = rows.iter().map(|(p, _)| p.literal()).collect();
        assert_eq!(got, vec!["", "a", "aa", "ab"]);
    }

    #[test]
    fn enumerate_respects_budget() {
        let table = TranspositionTable::new();
        assert!(matches!(
            enumerate_table(&Symbol::first(3), 10, false, 1, &table, 100),
            Err(SolveError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn word_generation_order() {
        let words: Vec<String> = all_words(&Symbol::first(2), 2).iter().map(|p| p.literal()).collect();
        assert_eq!(words, vec!["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(word_count(3, 10), all_words(&Symbol::first(3), 10).len() as u64);
        assert_eq!(all_words(&[], 3).len(), 1);
    }

    #[test]
    fn batch_matches_sequential() {
        let words = all_words(&Symbol::first(3), 6);
        let t1 = TranspositionTable::new();
        let t4 = TranspositionTable::new();
        let one = grundy_batch(&words, &t1, 1, DEFAULT_NODE_BUDGET);
        let four = grundy_batch(&words, &t4, 4, DEFAULT_NODE_BUDGET);
        assert_eq!(one, four);
        assert_eq!(t1.snapshot(), t4.snapshot());
    }
}
