//! Run-length encoded StrNim positions.
//!
//! A position is a word over `a..=z` stored as a sequence of maximal runs.
//! Two textual forms are accepted everywhere: the literal word (`aabbba`)
//! and run-length notation (`a^2b^3a^1`, caret optional, exponent 1 may be
//! omitted). The internal invariant is that adjacent runs carry distinct
//! symbols and every run is non-empty.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of symbols in the alphabet (`a` through `z`).
pub const ALPHABET_SIZE: u8 = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositionError {
    #[error("invalid character {ch:?} at offset {offset}: only lowercase a-z are allowed")]
    InvalidCharacter { ch: char, offset: usize },
    #[error("zero exponent at offset {offset}")]
    ZeroExponent { offset: usize },
    #[error("malformed exponent at offset {offset}")]
    MalformedExponent { offset: usize },
    #[error("illegal move: run {run} count {count} on a position with {runs} runs")]
    IllegalMove { run: usize, count: u32, runs: usize },
    #[error("illegal interval [{start}, {end}] on a word of length {len}")]
    IllegalInterval { start: usize, end: usize, len: usize },
    #[error("coding is undefined on symbol '{0}'")]
    UndefinedSymbol(char),
    #[error("coding is not injective: '{0}' and '{1}' share an image")]
    NotInjective(char, char),
    #[error("coding maps '{0}' to two different images")]
    ConflictingImage(char),
    #[error("coding has a fixed point at '{0}'")]
    FixedPoint(char),
    #[error("{0:?} is not a canonical key")]
    NotCanonical(String),
}

/// One letter of the alphabet, stored as `0..26`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u8);

impl Symbol {
    pub fn new(id: u8) -> Option<Symbol> {
        (id < ALPHABET_SIZE).then_some(Symbol(id))
    }

    pub fn from_char(ch: char) -> Option<Symbol> {
        ch.is_ascii_lowercase().then(|| Symbol(ch as u8 - b'a'))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn to_char(self) -> char {
        (b'a' + self.0) as char
    }

    /// The first `k` letters, `a` onwards.
    pub fn first(k: usize) -> Vec<Symbol> {
        (0..k.min(ALPHABET_SIZE as usize) as u8).map(Symbol).collect()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A maximal block `c^len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Run {
    pub symbol: Symbol,
    pub len: u32,
}

impl Run {
    pub fn new(symbol: Symbol, len: u32) -> Run {
        debug_assert!(len >= 1);
        Run { symbol, len }
    }
}

/// A legal operation: remove `count` characters from the `run`-th run (1-based).
///
/// Removing `count` characters anywhere inside one run always gives the same
/// result, so this pair identifies a move uniquely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Move {
    pub run: usize,
    pub count: u32,
}

impl Move {
    pub fn new(run: usize, count: u32) -> Move {
        Move { run, count }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.run, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    Literal,
    Rle,
}

/// A StrNim position. The empty run sequence is the terminal position ε.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    runs: Vec<Run>,
}

impl Position {
    pub fn empty() -> Position {
        Position { runs: Vec::new() }
    }

    /// Builds a position from runs, merging adjacent runs with equal symbols
    /// and dropping zero-length ones.
    pub fn from_runs<I: IntoIterator<Item = (Symbol, u32)>>(runs: I) -> Position {
        let mut out: Vec<Run> = Vec::new();
        for (symbol, len) in runs {
            if len == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.symbol == symbol => last.len += len,
                _ => out.push(Run { symbol, len }),
            }
        }
        Position { runs: out }
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Position {
        Position::from_runs(symbols.into_iter().map(|s| (s, 1)))
    }

    /// Parses either a literal word or run-length notation.
    pub fn parse(text: &str) -> Result<Position, PositionError> {
        let bytes = text.as_bytes();
        let mut runs = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let ch = text[i..].chars().next().unwrap_or('\0');
            let symbol = match Symbol::from_char(ch) {
                Some(s) => s,
                None if ch == '^' || ch.is_ascii_digit() => return Err(PositionError::MalformedExponent { offset: i }),
                None => return Err(PositionError::InvalidCharacter { ch, offset: i }),
            };
            i += 1;
            let exp_start = i;
            let caret = bytes.get(i) == Some(&b'^');
            if caret {
                i += 1;
            }
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let len = if i == digits_start {
                if caret {
                    return Err(PositionError::MalformedExponent { offset: exp_start });
                }
                1
            } else {
                let n: u32 = text[digits_start..i]
                    .parse()
                    .map_err(|_| PositionError::MalformedExponent { offset: digits_start })?;
                if n == 0 {
                    return Err(PositionError::ZeroExponent { offset: digits_start });
                }
                n
            };
            runs.push((symbol, len));
        }
        Ok(Position::from_runs(runs))
    }

    pub fn render(&self, style: RenderStyle) -> String {
        let mut out = String::new();
        for run in &self.runs {
            match style {
                RenderStyle::Literal => out.extend(std::iter::repeat_n(run.symbol.to_char(), run.len as usize)),
                RenderStyle::Rle => {
                    out.push(run.symbol.to_char());
                    out.push('^');
                    out.push_str(&run.len.to_string());
                }
            }
        }
        out
    }

    pub fn literal(&self) -> String {
        self.render(RenderStyle::Literal)
    }

    pub fn rle(&self) -> String {
        self.render(RenderStyle::Rle)
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Total number of characters.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.len as usize).sum()
    }

    /// The expanded word, one symbol per character.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.symbol, r.len as usize))
            .collect()
    }

    /// Distinct symbols occurring in the position.
    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.runs.iter().map(|r| r.symbol).collect()
    }

    pub fn last_symbol(&self) -> Option<Symbol> {
        self.runs.last().map(|r| r.symbol)
    }

    /// Appends `symbol^count`, merging with the last run if needed.
    pub fn extended(&self, symbol: Symbol, count: u32) -> Position {
        let mut runs = self.runs.clone();
        if count > 0 {
            match runs.last_mut() {
                Some(last) if last.symbol == symbol => last.len += count,
                _ => runs.push(Run::new(symbol, count)),
            }
        }
        Position { runs }
    }

    /// All legal moves ordered by `(run, count)`.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut moves = Vec::with_capacity(self.len());
        for (idx, run) in self.runs.iter().enumerate() {
            for count in 1..=run.len {
                moves.push(Move::new(idx + 1, count));
            }
        }
        moves
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        mv.run >= 1 && mv.run <= self.runs.len() && mv.count >= 1 && mv.count <= self.runs[mv.run - 1].len
    }

    pub fn apply_move(&self, mv: Move) -> Result<Position, PositionError> {
        if !self.is_legal(mv) {
            return Err(PositionError::IllegalMove {
                run: mv.run,
                count: mv.count,
                runs: self.runs.len(),
            });
        }
        Ok(self.apply_unchecked(mv.run - 1, mv.count))
    }

    /// `run` is 0-based here; caller guarantees legality.
    pub(crate) fn apply_unchecked(&self, run: usize, count: u32) -> Position {
        let target = self.runs[run];
        if count < target.len {
            let mut runs = self.runs.clone();
            runs[run].len -= count;
            return Position { runs };
        }
        let mut runs = Vec::with_capacity(self.runs.len());
        runs.extend_from_slice(&self.runs[..run]);
        let rest = &self.runs[run + 1..];
        match (runs.last_mut(), rest.first()) {
            (Some(left), Some(right)) if left.symbol == right.symbol => {
                left.len += right.len;
                runs.extend_from_slice(&rest[1..]);
            }
            _ => runs.extend_from_slice(rest),
        }
        Position { runs }
    }

    /// The set of positions reachable in one move. Its size always equals
    /// `self.len()`.
    pub fn successors(&self) -> BTreeSet<Position> {
        let next: BTreeSet<Position> = self
            .legal_moves()
            .into_iter()
            .map(|m| self.apply_unchecked(m.run - 1, m.count))
            .collect();
        debug_assert_eq!(next.len(), self.len());
        next
    }

    pub fn reverse(&self) -> Position {
        Position {
            runs: self.runs.iter().rev().copied().collect(),
        }
    }

    /// Applies a coding symbol by symbol. The coding must be defined and
    /// injective on the symbols that occur.
    pub fn recode(&self, coding: &CodingMap) -> Result<Position, PositionError> {
        let occurring = self.alphabet();
        let mut seen: BTreeMap<Symbol, Symbol> = BTreeMap::new();
        for &s in &occurring {
            let image = coding.get(s).ok_or(PositionError::UndefinedSymbol(s.to_char()))?;
            if let Some(prev) = seen.insert(image, s) {
                return Err(PositionError::NotInjective(prev.to_char(), s.to_char()));
            }
        }
        Ok(Position {
            runs: self
                .runs
                .iter()
                .map(|r| Run::new(coding.get(r.symbol).expect("checked above"), r.len))
                .collect(),
        })
    }

    /// Relabels symbols in order of first occurrence (`a`, `b`, ...).
    pub fn relabel_first_occurrence(&self) -> Position {
        let mut map = [u8::MAX; ALPHABET_SIZE as usize];
        let mut next = 0u8;
        let runs = self
            .runs
            .iter()
            .map(|r| {
                let slot = &mut map[r.symbol.0 as usize];
                if *slot == u8::MAX {
                    *slot = next;
                    next += 1;
                }
                Run::new(Symbol(*slot), r.len)
            })
            .collect();
        Position { runs }
    }

    /// Key shared by all positions equal up to a symbol bijection and reversal.
    pub fn canonical_key(&self) -> CanonicalKey {
        let forward = self.relabel_first_occurrence().rle();
        let backward = self.reverse().relabel_first_occurrence().rle();
        CanonicalKey(forward.min(backward))
    }

    /// Converts a 1-based inclusive interval of the expanded word into a move.
    /// The interval must lie inside a single run.
    pub fn interval_to_move(&self, start: usize, end: usize) -> Result<Move, PositionError> {
        let len = self.len();
        let bad = PositionError::IllegalInterval { start, end, len };
        if start < 1 || start > end || end > len {
            return Err(bad);
        }
        let mut offset = 0usize;
        for (idx, run) in self.runs.iter().enumerate() {
            let first = offset + 1;
            let last = offset + run.len as usize;
            if start >= first && start <= last {
                return if end <= last {
                    Ok(Move::new(idx + 1, (end - start + 1) as u32))
                } else {
                    Err(bad)
                };
            }
            offset = last;
        }
        Err(bad)
    }

    /// Removes the 1-based inclusive interval `[start, end]`, which must be a
    /// repetition of a single character.
    pub fn remove_interval(&self, start: usize, end: usize) -> Result<Position, PositionError> {
        let mv = self.interval_to_move(start, end)?;
        self.apply_move(mv)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.literal())
        }
    }
}

impl std::str::FromStr for Position {
    type Err = PositionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Position::parse(s)
    }
}

/// Canonical form under symbol bijections and reversal, rendered as RLE.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Accepts a key read back from storage. The text must be a valid RLE
    /// position that is already in canonical form.
    pub fn from_rle(text: &str) -> Result<CanonicalKey, PositionError> {
        let pos = Position::parse(text)?;
        let key = pos.canonical_key();
        if key.0 != text {
            return Err(PositionError::NotCanonical(text.to_string()));
        }
        Ok(key)
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A length-preserving morphism, given by the image of each letter in its
/// declared alphabet (the domain). Equality compares the mapping only.
#[derive(Debug, Clone)]
pub struct CodingMap {
    map: BTreeMap<Symbol, Symbol>,
    fixed_point_free: bool,
}

impl PartialEq for CodingMap {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl Eq for CodingMap {}

impl CodingMap {
    /// Builds a coding from `(from, to)` pairs. Repeated identical pairs are
    /// tolerated; a letter with two images is rejected.
    pub fn from_pairs<I: IntoIterator<Item = (Symbol, Symbol)>>(pairs: I) -> Result<CodingMap, PositionError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(prev) = map.insert(from, to) {
                if prev != to {
                    return Err(PositionError::ConflictingImage(from.to_char()));
                }
            }
        }
        Ok(CodingMap {
            map,
            fixed_point_free: false,
        })
    }

    /// Builds a coding that is injective and maps no letter to itself.
    pub fn fixed_point_free<I: IntoIterator<Item = (Symbol, Symbol)>>(pairs: I) -> Result<CodingMap, PositionError> {
        let mut coding = CodingMap::from_pairs(pairs)?;
        coding.check_injective()?;
        if let Some((a, _)) = coding.map.iter().find(|(a, b)| a == b) {
            return Err(PositionError::FixedPoint(a.to_char()));
        }
        coding.fixed_point_free = true;
        Ok(coding)
    }

    /// Parses `a>b,b>a` style text.
    pub fn parse(text: &str) -> Result<CodingMap, PositionError> {
        let mut pairs = Vec::new();
        for (offset, part) in text.split(',').enumerate() {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let mut chars = part.chars();
            let (Some(a), Some('>'), Some(b), None) = (chars.next(), chars.next(), chars.next(), chars.next()) else {
                return Err(PositionError::MalformedExponent { offset });
            };
            let from = Symbol::from_char(a).ok_or(PositionError::InvalidCharacter { ch: a, offset })?;
            let to = Symbol::from_char(b).ok_or(PositionError::InvalidCharacter { ch: b, offset })?;
            pairs.push((from, to));
        }
        CodingMap::from_pairs(pairs)
    }

    /// The coding exchanging `a` and `b`.
    pub fn swap_ab() -> CodingMap {
        let (a, b) = (Symbol(0), Symbol(1));
        CodingMap::fixed_point_free([(a, b), (b, a)]).expect("swap is a derangement")
    }

    pub fn get(&self, s: Symbol) -> Option<Symbol> {
        self.map.get(&s).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.map.iter().map(|(a, b)| (*a, *b))
    }

    pub fn domain(&self) -> BTreeSet<Symbol> {
        self.map.keys().copied().collect()
    }

    pub fn is_marked_fixed_point_free(&self) -> bool {
        self.fixed_point_free
    }

    pub fn has_fixed_point(&self) -> bool {
        self.map.iter().any(|(a, b)| a == b)
    }

    /// True when the map permutes its own domain.
    pub fn is_bijective(&self) -> bool {
        let image: BTreeSet<Symbol> = self.map.values().copied().collect();
        image.len() == self.map.len() && image == self.domain()
    }

    fn check_injective(&self) -> Result<(), PositionError> {
        let mut seen: BTreeMap<Symbol, Symbol> = BTreeMap::new();
        for (&a, &b) in &self.map {
            if let Some(prev) = seen.insert(b, a) {
                return Err(PositionError::NotInjective(prev.to_char(), a.to_char()));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<CodingMap, PositionError> {
        self.check_injective()?;
        Ok(CodingMap {
            map: self.map.iter().map(|(a, b)| (*b, *a)).collect(),
            fixed_point_free: self.fixed_point_free,
        })
    }
}

impl fmt::Display for CodingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(a, b)| format!("{}>{}", a, b)).collect();
        f.write_str(&parts.join(","))
    }
}
