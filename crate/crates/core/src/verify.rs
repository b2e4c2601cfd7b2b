//! Runnable checks, one suite per characterized family.
//!
//! Every suite compares a closed-form claim against the exact solver (or a
//! structural property) over a bounded domain and records each mismatch.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aba::{self, DEFAULT_MARGIN, DEFAULT_SEARCH_BOUND};
use crate::families::{self, shift_after_removal};
use crate::position::{CodingMap, Position, Symbol};
use crate::solver::{all_words, Outcome, SolveError, Solver};
use crate::table::TranspositionTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    NextCount,
    UniqueExtension,
    AbaTables,
    CompPalindrome,
    Alternating,
    Lstar,
    ThueMorse,
    NimXor,
    TailHeavy,
    Mirror,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::NextCount,
        Suite::UniqueExtension,
        Suite::AbaTables,
        Suite::CompPalindrome,
        Suite::Alternating,
        Suite::Lstar,
        Suite::ThueMorse,
        Suite::NimXor,
        Suite::TailHeavy,
        Suite::Mirror,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::NextCount => "next-count",
            Suite::UniqueExtension => "unique-extension",
            Suite::AbaTables => "aba-tables",
            Suite::CompPalindrome => "comp-palindrome",
            Suite::Alternating => "alternating",
            Suite::Lstar => "lstar",
            Suite::ThueMorse => "thue-morse",
            Suite::NimXor => "nim-xor",
            Suite::TailHeavy => "tail-heavy",
            Suite::Mirror => "mirror",
        }
    }

    pub fn from_id(id: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.id() == id)
    }

    /// Default `max_len` (or heap bound / i bound, depending on the suite).
    fn default_max_len(self) -> usize {
        match self {
            Suite::NextCount => 10,
            Suite::UniqueExtension => 10,
            Suite::AbaTables => 200,
            Suite::CompPalindrome => 14,
            Suite::Alternating => 12,
            Suite::Lstar => 14,
            Suite::ThueMorse => 20,
            Suite::NimXor => 8,
            Suite::TailHeavy => 8,
            Suite::Mirror => 12,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Suite bounds. `None` selects the suite's default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_len: Option<usize>,
    pub max_i: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub budget: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_len: None,
            max_i: None,
            samples: None,
            seed: 0x5719_2024,
            budget: crate::solver::DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub wall_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{:<17} {:>9} cases  {:>4} failures  {:>8.2}s  {}",
            self.suite,
            self.cases,
            self.failures.len(),
            self.wall_ms as f64 / 1000.0,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

struct Recorder {
    cases: u64,
    failures: Vec<Failure>,
}

impl Recorder {
    fn new() -> Recorder {
        Recorder {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, input: impl fmt::Display, expected: impl fmt::Display, actual: impl fmt::Display) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure {
                input: input.to_string(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }
}

fn letters(k: usize) -> Vec<Symbol> {
    Symbol::first(k)
}

fn outcome_of(solver: &mut Solver<'_>, p: &Position) -> Result<Outcome, SolveError> {
    Ok(solver.grundy(p)?.outcome())
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Symbol], len: usize) -> Position {
    Position::from_symbols((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]))
}

pub fn run_suite(suite: Suite, bounds: &Bounds, table: &TranspositionTable) -> Result<SuiteReport, SolveError> {
    let started = Instant::now();
    let max_len = bounds.max_len.unwrap_or_else(|| suite.default_max_len());
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut solver = Solver::with_budget(table, bounds.budget);
    let mut rec = Recorder::new();
    match suite {
        Suite::NextCount => {
            let check = |rec: &mut Recorder, p: &Position| {
                let n = p.successors().len();
                rec.check(n == p.len(), p, p.len(), n);
            };
            for p in all_words(&letters(3), max_len) {
                check(&mut rec, &p);
            }
            for _ in 0..bounds.samples.unwrap_or(1_000) {
                let len = rng.gen_range(0..=max_len + 8);
                let p = random_word(&mut rng, &letters(3), len);
                check(&mut rec, &p);
            }
        }
        Suite::UniqueExtension => {
            for s in all_words(&letters(2), max_len).into_iter().skip(1) {
                for c in letters(3) {
                    if Some(c) == s.last_symbol() {
                        continue;
                    }
                    let input = format!("{}·{}^x", s.literal(), c);
                    match solver.unique_extension(&s, c) {
                        Ok(_) => rec.check(true, &input, "", ""),
                        Err(SolveError::ExtensionNotUnique { count, .. }) => {
                            rec.check(false, &input, "exactly one P extension", format!("{count}"))
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Suite::AbaTables => {
            let bound = bounds.max_i.unwrap_or(max_len);
            let known = aba::known_tables();
            for (j, expected_period) in [(1, 1), (2, 2), (3, 2), (4, 4), (5, 4), (6, 6)] {
                let detected = match aba::detect_period(j, DEFAULT_SEARCH_BOUND.max(bound), DEFAULT_MARGIN) {
                    Ok(d) => d,
                    Err(e) => {
                        rec.check(false, format!("L({j})"), "a period", e);
                        continue;
                    }
                };
                rec.check(
                    detected.period == expected_period,
                    format!("period of L({j})"),
                    expected_period,
                    detected.period,
                );
                let row = aba::build_lose_table(j, bound).map_err(|e| SolveError::Precondition(e.to_string()))?;
                for (i, &k) in row.values.iter().enumerate() {
                    let i = i as u32;
                    rec.check(detected.contains(i, k), format!("L({j}) ∋ ⟨{i},{k}⟩"), true, false);
                }
                for (i, k) in aba::membership_differences(&detected, &known[&j], bound as u32) {
                    rec.check(
                        false,
                        format!("L({j}) ⟨{i},{k}⟩"),
                        known[&j].contains(i, k),
                        detected.contains(i, k),
                    );
                }
                rec.cases += (bound as u64 + 1) * (bound as u64 + 2) / 2;
                let check = aba::verify_against_solver(j, bound.min(25), &mut solver).map_err(|e| match e {
                    aba::AbaError::Solve(s) => s,
                    other => SolveError::Precondition(other.to_string()),
                })?;
                rec.cases += check.checked as u64;
                for d in check.discrepancies {
                    rec.failures.push(Failure {
                        input: aba::aba_position(d.i, j, d.k).rle(),
                        expected: if d.table_says_p { "P" } else { "N" }.into(),
                        actual: if d.solver_says_p { "P" } else { "N" }.into(),
                    });
                }
            }
        }
        Suite::CompPalindrome => {
            let swap = CodingMap::swap_ab();
            for t in all_words(&letters(2), max_len / 2) {
                let s = Position::parse(&(t.literal() + &t.reverse().recode(&swap).expect("swap on {a,b}").literal()))
                    .expect("letters");
                let recognised = families::comp_palindrome_witness(&s).is_some();
                rec.check(recognised, &s, "recognised", recognised);
                let o = outcome_of(&mut solver, &s)?;
                rec.check(o == Outcome::P, &s, Outcome::P, o);
            }
            for s in all_words(&letters(3), max_len.min(10)) {
                if families::comp_palindrome_witness(&s).is_some() {
                    let o = outcome_of(&mut solver, &s)?;
                    rec.check(o == Outcome::P, &s, Outcome::P, o);
                }
            }
        }
        Suite::Alternating => {
            for s in all_words(&letters(3), max_len) {
                if !families::is_alternating(&s) {
                    continue;
                }
                let claimed = families::alternating_verdict(&s).verdict.expect("applicable");
                let o = outcome_of(&mut solver, &s)?;
                rec.check(o == claimed, &s, claimed, o);
                if s.len() % 2 == 0 {
                    for mv in s.legal_moves() {
                        let input = format!("{} after {}", s, mv);
                        match families::alternating_response(&s, mv) {
                            Ok(reply) => {
                                let after = s.apply_move(mv).expect("legal");
                                let result = after.apply_move(reply).expect("reply is legal");
                                let ok = families::is_alternating(&result) && result.len() % 2 == 0;
                                rec.check(ok, &input, "alternating even", &result);
                            }
                            Err(e) => rec.check(false, &input, "a reply", e),
                        }
                    }
                }
            }
        }
        Suite::Lstar => {
            let generated = lstar_by_concatenation(max_len);
            for s in all_words(&letters(2), max_len) {
                let member = families::in_lstar(&s);
                rec.check(member == generated.contains(&s), &s, generated.contains(&s), member);
                if !member {
                    continue;
                }
                let o = outcome_of(&mut solver, &s)?;
                rec.check(o == Outcome::P, &s, Outcome::P, o);
                for after in s.successors() {
                    let input = format!("{} -> {}", s, after);
                    match families::lstar_response(&s, &after) {
                        Ok(mv) => {
                            let result = after.apply_move(mv).expect("legal reply");
                            rec.check(families::in_lstar(&result), &input, "in L*", &result);
                        }
                        Err(e) => rec.check(false, &input, "a reply", e),
                    }
                }
            }
        }
        Suite::ThueMorse => {
            for len in 0..=max_len {
                let s = families::thue_morse_prefix(len);
                let claimed = families::thue_morse_verdict(len).verdict.expect("always applicable");
                let o = outcome_of(&mut solver, &s)?;
                rec.check(o == claimed, &s, claimed, o);
                if len % 2 == 0 {
                    let word = s.literal();
                    let ok = word.as_bytes().chunks(2).all(|c| c == b"ab" || c == b"ba");
                    rec.check(ok, &s, "in (ab+ba)*", ok);
                }
            }
            let swap = CodingMap::swap_ab();
            let mut t = Position::parse("a").expect("letter");
            for i in 0..=10u32 {
                let prefix = families::thue_morse_prefix(1 << i);
                rec.check(prefix == t, format!("t_{i}"), &t, &prefix);
                let image = t.recode(&swap).expect("swap on {a,b}");
                t = Position::parse(&(t.literal() + &image.literal())).expect("letters");
            }
        }
        Suite::NimXor => {
            let l = letters(3);
            for i in 0..=max_len as u32 {
                for j in 0..=max_len as u32 {
                    for k in 0..=max_len as u32 {
                        let s = Position::from_runs([(l[0], i), (l[1], j), (l[2], k)]);
                        let claimed = families::nim_xor_verdict(&s).verdict.expect("distinct letters");
                        let g = solver.grundy(&s)?;
                        rec.check(g.outcome() == claimed, &s, claimed, g.outcome());
                        rec.check(g.0 == i ^ j ^ k, s.rle(), i ^ j ^ k, g);
                    }
                }
            }
        }
        Suite::TailHeavy => {
            for _ in 0..bounds.samples.unwrap_or(500) {
                let s = random_tail_heavy(&mut rng, max_len);
                for p in [s.clone(), s.reverse()] {
                    let applicable = families::tail_heavy_verdict(&p).applicable;
                    rec.check(applicable, &p, "applicable", applicable);
                    let o = outcome_of(&mut solver, &p)?;
                    rec.check(o == Outcome::N, &p, Outcome::N, o);
                }
            }
        }
        Suite::Mirror => {
            for s in all_words(&letters(3), max_len) {
                if families::comp_palindrome_witness(&s).is_none() {
                    continue;
                }
                let n = s.len();
                for start in 1..=n {
                    for end in start..=n {
                        if !families::is_single_character_interval(&s, start, end) {
                            continue;
                        }
                        let input = format!("{} remove [{start},{end}]", s);
                        match families::mirror_response(&s, start, end) {
                            Ok((rs, re)) => {
                                let disjoint = re < start || rs > end;
                                let after = s.remove_interval(start, end).expect("legal");
                                let (a, b) = shift_after_removal((rs, re), (start, end));
                                let result = after.remove_interval(a, b);
                                let ok = disjoint
                                    && matches!(&result, Ok(r) if families::comp_palindrome_witness(r).is_some());
                                rec.check(
                                    ok,
                                    &input,
                                    "complementary palindrome",
                                    format!("{:?}", result.map(|r| r.literal())),
                                );
                            }
                            Err(e) => rec.check(false, &input, "a response", e),
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteReport {
        suite: suite.id().to_string(),
        cases: rec.cases,
        failures: rec.failures,
        wall_ms: started.elapsed().as_millis(),
    })
}

pub fn run_all(bounds: &Bounds, table: &TranspositionTable) -> Result<Vec<SuiteReport>, SolveError> {
    Suite::ALL.into_iter().map(|s| run_suite(s, bounds, table)).collect()
}

/// All words of `({a^k b^k : k ≥ 1} ∪ {ba})*` up to `max_len`, built by
/// concatenating blocks.
pub fn lstar_by_concatenation(max_len: usize) -> BTreeSet<Position> {
    let mut blocks = vec!["ba".to_string()];
    for k in 1..=max_len / 2 {
        blocks.push("a".repeat(k) + &"b".repeat(k));
    }
    let mut words: BTreeSet<String> = BTreeSet::from([String::new()]);
    let mut frontier = vec![String::new()];
    while let Some(w) = frontier.pop() {
        for b in &blocks {
            if w.len() + b.len() <= max_len {
                let next = w.clone() + b;
                if words.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    words
        .into_iter()
        .map(|w| Position::parse(&w).expect("letters"))
        .collect()
}

/// A random position whose last run outweighs the rest: a prefix of length
/// at most `max_prefix` over `{a, b, c}` followed by a heavier run.
pub fn random_tail_heavy(rng: &mut ChaCha8Rng, max_prefix: usize) -> Position {
    let l = letters(3);
    let prefix_len = rng.gen_range(0..=max_prefix);
    let prefix = random_word(rng, &l, prefix_len);
    let choices: Vec<Symbol> = l.iter().copied().filter(|&c| Some(c) != prefix.last_symbol()).collect();
    let c = choices[rng.gen_range(0..choices.len())];
    let heavy = prefix_len as u32 + 1 + rng.gen_range(0..3);
    prefix.extended(c, heavy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Bounds {
        Bounds {
            max_len: Some(6),
            max_i: Some(30),
            samples: Some(20),
            ..Bounds::default()
        }
    }

    #[test]
    fn suite_ids_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_id(s.id()), Some(s));
        }
        assert_eq!(Suite::from_id("nope"), None);
    }

    #[test]
    fn every_suite_passes_small_bounds() {
        let table = TranspositionTable::new();
        for report in run_all(&small(), &table).unwrap() {
            assert!(
                report.passed(),
                "{}: {:?}",
                report.suite,
                &report.failures[..report.failures.len().min(3)]
            );
            assert!(report.cases > 0, "{}", report.suite);
        }
    }

    #[test]
    fn lstar_generation() {
        let mut words: Vec<String> = lstar_by_concatenation(4).iter().map(|p| p.literal()).collect();
        words.sort();
        assert_eq!(words, vec!["", "aabb", "ab", "abab", "abba", "ba", "baab", "baba"]);
    }

    #[test]
    fn tail_heavy_samples_are_heavy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s = random_tail_heavy(&mut rng, 8);
            let last = s.runs().last().unwrap().len as usize;
            assert!(2 * last > s.len());
        }
    }
}
