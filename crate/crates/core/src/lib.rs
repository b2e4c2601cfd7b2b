//! StrNim: Nim played on strings.
//!
//! A position is a word; a move deletes a non-empty block of one repeated
//! character, after which the neighbours of the block may merge. The player
//! who cannot move loses.
//!
//! - [`position`]: run-length encoded positions, moves, codings, canonical keys.
//! - [`solver`]: exact Grundy values, P/N verdicts and winning moves.
//! - [`table`]: the shared transposition table and its cache file.
//! - [`aba`]: the `a^i b^j a^k` family, its recurrence and period detection.
//! - [`families`]: fast verdicts and explicit strategies for structured families.
//! - [`verify`]: runnable checks for every characterized family.

pub mod aba;
pub mod families;
pub mod position;
pub mod solver;
pub mod table;
pub mod verify;

pub use position::{CanonicalKey, CodingMap, Move, Position, PositionError, RenderStyle, Run, Symbol};
pub use solver::{Grundy, Outcome, SolveError, SolveStats, Solver, Verdict, DEFAULT_NODE_BUDGET};
pub use table::{CacheError, TranspositionTable};
