//! Closed-form verdicts and explicit strategies for structured positions.
//!
//! Each analyzer either recognises its family and reports a verdict with a
//! witness, or reports "not applicable". Analyzers never fall back to the
//! general solver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::position::{CodingMap, Move, Position, PositionError, Symbol};
use crate::solver::Outcome;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("{0} is not a complementary palindrome")]
    NotComplementaryPalindrome(String),
    #[error("{0} is not an alternating string of even length")]
    NotAlternatingEven(String),
    #[error("{0} is not in L*")]
    NotInLStar(String),
    #[error("symbol '{0}' is outside {{a, b}}")]
    OutsideAb(char),
    #[error("{after} is not a successor of {before}")]
    NotASuccessor { before: String, after: String },
    #[error("no restoring move exists from {0}")]
    NoRestoringMove(String),
    #[error(transparent)]
    Position(#[from] PositionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    CompPalindrome,
    Alternating,
    Lstar,
    ThueMorse,
    NimXor,
    TailHeavy,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::CompPalindrome => "comp_palindrome",
            Family::Alternating => "alternating",
            Family::Lstar => "lstar",
            Family::ThueMorse => "thue_morse",
            Family::NimXor => "nim_xor",
            Family::TailHeavy => "tail_heavy",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Last,
}

fn serialize_coding<S: Serializer>(coding: &CodingMap, s: S) -> Result<S::Ok, S::Error> {
    let map: BTreeMap<String, String> = coding.pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    map.serialize(s)
}

/// Family-specific evidence for a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    CompPalindrome {
        t: String,
        #[serde(serialize_with = "serialize_coding")]
        f: CodingMap,
    },
    Alternating {
        length: usize,
    },
    Lstar {
        factors: Vec<String>,
    },
    ThueMorse {
        length: usize,
    },
    NimXor {
        heaps: Vec<u32>,
        xor: u32,
    },
    TailHeavy {
        side: Side,
        heavy: u64,
        rest: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyVerdict {
    pub family: Family,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl FamilyVerdict {
    fn not_applicable(family: Family) -> FamilyVerdict {
        FamilyVerdict {
            family,
            applicable: false,
            verdict: None,
            witness: None,
        }
    }

    fn decided(family: Family, verdict: Outcome, witness: Witness) -> FamilyVerdict {
        FamilyVerdict {
            family,
            applicable: true,
            verdict: Some(verdict),
            witness: Some(witness),
        }
    }
}

fn parity_outcome(len: usize) -> Outcome {
    if len.is_multiple_of(2) {
        Outcome::P
    } else {
        Outcome::N
    }
}

// ---------------------------------------------------------------------------
// Complementary palindromes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompPalindromeWitness {
    /// First half of the word.
    pub t: Position,
    /// A fixed-point-free bijection on the occurring alphabet.
    pub f: CodingMap,
    /// The letters whose image is forced by the word itself.
    pub constrained: BTreeSet<Symbol>,
}

/// Decides whether `s = t · f(t^R)` for a fixed-point-free bijective coding `f`.
pub fn comp_palindrome_witness(s: &Position) -> Option<CompPalindromeWitness> {
    let word = s.symbols();
    let n = word.len();
    if !n.is_multiple_of(2) {
        return None;
    }
    let mut forward: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    let mut backward: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for i in 0..n / 2 {
        let (a, b) = (word[i], word[n - 1 - i]);
        if a == b {
            return None;
        }
        if *forward.entry(a).or_insert(b) != b || *backward.entry(b).or_insert(a) != a {
            return None;
        }
    }
    // Letters only in the second half map onto letters only in the first
    // half; the two sets are disjoint, so any pairing is fixed-point free.
    let occurring = s.alphabet();
    let constrained: BTreeSet<Symbol> = forward.keys().copied().collect();
    let images: BTreeSet<Symbol> = forward.values().copied().collect();
    let free_domain = occurring.difference(&constrained);
    let free_images = occurring.difference(&images);
    let mut pairs: Vec<(Symbol, Symbol)> = forward.into_iter().collect();
    pairs.extend(free_domain.copied().zip(free_images.copied()));
    let f = CodingMap::fixed_point_free(pairs).ok()?;
    let t = Position::from_symbols(word[..n / 2].iter().copied());
    Some(CompPalindromeWitness { t, f, constrained })
}

pub fn comp_palindrome_verdict(s: &Position) -> FamilyVerdict {
    match comp_palindrome_witness(s) {
        Some(w) => FamilyVerdict::decided(
            Family::CompPalindrome,
            Outcome::P,
            Witness::CompPalindrome {
                t: w.t.literal(),
                f: w.f,
            },
        ),
        None => FamilyVerdict::not_applicable(Family::CompPalindrome),
    }
}

/// True when the 1-based interval `[start, end]` is a block of one character.
pub fn is_single_character_interval(s: &Position, start: usize, end: usize) -> bool {
    s.interval_to_move(start, end).is_ok()
}

/// The mirror of the opponent's removal `[start, end]` in a complementary
/// palindrome, in coordinates of the original word.
pub fn mirror_response(s: &Position, start: usize, end: usize) -> Result<(usize, usize), StrategyError> {
    if comp_palindrome_witness(s).is_none() {
        return Err(StrategyError::NotComplementaryPalindrome(s.literal()));
    }
    s.interval_to_move(start, end)?;
    let n = s.len();
    let response = (n + 1 - end, n + 1 - start);
    debug_assert!(response.1 < start || response.0 > end);
    Ok(response)
}

/// Translates an interval of the original word into coordinates after the
/// disjoint interval `removed` has been deleted.
pub fn shift_after_removal(interval: (usize, usize), removed: (usize, usize)) -> (usize, usize) {
    if interval.0 > removed.1 {
        let width = removed.1 - removed.0 + 1;
        (interval.0 - width, interval.1 - width)
    } else {
        interval
    }
}

/// The mirror strategy as a move on the position after the opponent's move.
/// The opponent's `count` characters are taken from the start of the run.
pub fn mirror_move(s: &Position, opponent: Move) -> Result<Move, StrategyError> {
    let start: usize = s.runs()[..opponent.run.saturating_sub(1).min(s.run_count())]
        .iter()
        .map(|r| r.len as usize)
        .sum::<usize>()
        + 1;
    if !s.is_legal(opponent) {
        return Err(PositionError::IllegalMove {
            run: opponent.run,
            count: opponent.count,
            runs: s.run_count(),
        }
        .into());
    }
    let end = start + opponent.count as usize - 1;
    let response = mirror_response(s, start, end)?;
    let after = s.remove_interval(start, end)?;
    let (rs, re) = shift_after_removal(response, (start, end));
    Ok(after.interval_to_move(rs, re)?)
}

// ---------------------------------------------------------------------------
// Alternating strings
// ---------------------------------------------------------------------------

pub fn is_alternating(s: &Position) -> bool {
    s.runs().iter().all(|r| r.len == 1)
}

pub fn alternating_verdict(s: &Position) -> FamilyVerdict {
    if !is_alternating(s) {
        return FamilyVerdict::not_applicable(Family::Alternating);
    }
    let length = s.len();
    FamilyVerdict::decided(
        Family::Alternating,
        parity_outcome(length),
        Witness::Alternating { length },
    )
}

/// Reply restoring an alternating string of even length after the
/// opponent's move on one.
pub fn alternating_response(s: &Position, opponent: Move) -> Result<Move, StrategyError> {
    if !is_alternating(s) || !s.len().is_multiple_of(2) {
        return Err(StrategyError::NotAlternatingEven(s.literal()));
    }
    let after = s.apply_move(opponent)?;
    let reply = match after.runs().iter().position(|r| r.len == 2) {
        Some(idx) => Move::new(idx + 1, 1),
        None => Move::new(after.run_count(), 1),
    };
    let result = after.apply_move(reply)?;
    if !is_alternating(&result) || result.len() % 2 != 0 {
        return Err(StrategyError::NoRestoringMove(after.literal()));
    }
    Ok(reply)
}

// ---------------------------------------------------------------------------
// L* with L = {a^k b^k} ∪ {ba}
// ---------------------------------------------------------------------------

fn ab_word(s: &Position) -> Result<Vec<u8>, StrategyError> {
    let mut out = Vec::with_capacity(s.len());
    for sym in s.symbols() {
        match sym.id() {
            0 | 1 => out.push(sym.id()),
            _ => return Err(StrategyError::OutsideAb(sym.to_char())),
        }
    }
    Ok(out)
}

/// Lengths of the blocks of `L` that end exactly at prefix length `m`,
/// longest first. A block `a^k b^k` must use every trailing `b`, so at most
/// one such block fits.
fn blocks_ending_at(word: &[u8], m: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(2);
    let trailing_b = word[..m].iter().rev().take_while(|&&c| c == 1).count();
    if trailing_b >= 1 && 2 * trailing_b <= m && word[m - 2 * trailing_b..m - trailing_b].iter().all(|&c| c == 0) {
        out.push(2 * trailing_b);
    }
    if m >= 2 && word[m - 2] == 1 && word[m - 1] == 0 {
        out.push(2);
    }
    out
}

/// A factorization of `s` into blocks `a^k b^k` (k ≥ 1) and `ba`, or `None`
/// when `s ∉ L*`. Blocks are chosen longest-first from the right.
pub fn lstar_member(s: &Position) -> Result<Option<Vec<Position>>, StrategyError> {
    let word = ab_word(s)?;
    let n = word.len();
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for m in 1..=n {
        reach[m] = blocks_ending_at(&word, m).iter().any(|&w| reach[m - w]);
    }
    if !reach[n] {
        return Ok(None);
    }
    let mut factors = Vec::new();
    let mut m = n;
    while m > 0 {
        let w = blocks_ending_at(&word, m)
            .into_iter()
            .find(|&w| reach[m - w])
            .expect("reachable prefix has a final block");
        let symbols = Symbol::first(2);
        factors.push(Position::from_symbols(
            word[m - w..m].iter().map(|&c| symbols[c as usize]),
        ));
        m -= w;
    }
    factors.reverse();
    Ok(Some(factors))
}

pub fn in_lstar(s: &Position) -> bool {
    matches!(lstar_member(s), Ok(Some(_)))
}

pub fn lstar_verdict(s: &Position) -> FamilyVerdict {
    match lstar_member(s) {
        Ok(Some(factors)) => FamilyVerdict::decided(
            Family::Lstar,
            Outcome::P,
            Witness::Lstar {
                factors: factors.iter().map(|f| f.literal()).collect(),
            },
        ),
        _ => FamilyVerdict::not_applicable(Family::Lstar),
    }
}

/// A move on `after` (a successor of `s ∈ L*`) whose result is back in `L*`.
pub fn lstar_response(s: &Position, after: &Position) -> Result<Move, StrategyError> {
    if lstar_member(s)?.is_none() {
        return Err(StrategyError::NotInLStar(s.literal()));
    }
    if !s.successors().contains(after) {
        return Err(StrategyError::NotASuccessor {
            before: s.literal(),
            after: after.literal(),
        });
    }
    for mv in after.legal_moves() {
        if in_lstar(&after.apply_move(mv)?) {
            return Ok(mv);
        }
    }
    Err(StrategyError::NoRestoringMove(after.literal()))
}

// ---------------------------------------------------------------------------
// Thue–Morse prefixes
// ---------------------------------------------------------------------------

/// The first `len` letters of the infinite Thue–Morse word over `{a, b}`.
pub fn thue_morse_prefix(len: usize) -> Position {
    let swap = CodingMap::swap_ab();
    let mut word = vec![Symbol::first(1)[0]];
    while word.len() < len {
        let image: Vec<Symbol> = word
            .iter()
            .map(|&c| swap.get(c).expect("swap covers a and b"))
            .collect();
        word.extend(image);
    }
    word.truncate(len);
    Position::from_symbols(word)
}

pub fn thue_morse_verdict(len: usize) -> FamilyVerdict {
    FamilyVerdict::decided(
        Family::ThueMorse,
        parity_outcome(len),
        Witness::ThueMorse { length: len },
    )
}

/// Applicable when `s` is literally a prefix of the Thue–Morse word.
pub fn thue_morse_family(s: &Position) -> FamilyVerdict {
    if *s == thue_morse_prefix(s.len()) {
        thue_morse_verdict(s.len())
    } else {
        FamilyVerdict::not_applicable(Family::ThueMorse)
    }
}

// ---------------------------------------------------------------------------
// Nim embedding and tail-heavy positions
// ---------------------------------------------------------------------------

pub fn nim_xor_verdict(s: &Position) -> FamilyVerdict {
    let distinct: BTreeSet<Symbol> = s.runs().iter().map(|r| r.symbol).collect();
    if distinct.len() != s.run_count() {
        return FamilyVerdict::not_applicable(Family::NimXor);
    }
    let heaps: Vec<u32> = s.runs().iter().map(|r| r.len).collect();
    let xor = heaps.iter().fold(0, |acc, h| acc ^ h);
    let verdict = if xor == 0 { Outcome::P } else { Outcome::N };
    FamilyVerdict::decided(Family::NimXor, verdict, Witness::NimXor { heaps, xor })
}

pub fn tail_heavy_verdict(s: &Position) -> FamilyVerdict {
    let runs = s.runs();
    let total = s.len() as u64;
    let candidates = [(Side::Last, runs.last()), (Side::First, runs.first())];
    for (side, run) in candidates {
        let Some(run) = run else { continue };
        let heavy = run.len as u64;
        let rest = total - heavy;
        if heavy > rest {
            return FamilyVerdict::decided(Family::TailHeavy, Outcome::N, Witness::TailHeavy { side, heavy, rest });
        }
    }
    FamilyVerdict::not_applicable(Family::TailHeavy)
}

/// Runs every analyzer on `s`.
pub fn all_family_verdicts(s: &Position) -> Vec<FamilyVerdict> {
    vec![
        comp_palindrome_verdict(s),
        alternating_verdict(s),
        lstar_verdict(s),
        thue_morse_family(s),
        nim_xor_verdict(s),
        tail_heavy_verdict(s),
    ]
}

/// A strategy reply for the position reached after `opponent` was played on
/// `before`, when `before` belongs to a family with an explicit strategy.
/// Tried in order: mirror, alternating, L*-restore.
pub fn family_response(before: &Position, opponent: Move) -> Option<(Family, Move)> {
    if comp_palindrome_witness(before).is_some() {
        if let Ok(mv) = mirror_move(before, opponent) {
            return Some((Family::CompPalindrome, mv));
        }
    }
    if is_alternating(before) && before.len().is_multiple_of(2) {
        if let Ok(mv) = alternating_response(before, opponent) {
            return Some((Family::Alternating, mv));
        }
    }
    if in_lstar(before) {
        let after = before.apply_move(opponent).ok()?;
        if let Ok(mv) = lstar_response(before, &after) {
            return Some((Family::Lstar, mv));
        }
    }
    None
}
