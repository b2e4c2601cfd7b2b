//! Move selection for the computer player.
//!
//! Priority: an explicit family strategy when the previous position belongs
//! to a family with one (mirror, alternating, L*-restore), then the solver's
//! certificate move, then the smallest legal move.

use serde::Serialize;
use strnim_core::families::{self, Family};
use strnim_core::{Move, Position, SolveError, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "family")]
pub enum MoveSource {
    Strategy(Family),
    Solver,
    /// No winning move exists; the engine expects to lose under perfect play.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineMove {
    #[serde(rename = "move")]
    pub mv: Move,
    pub source: MoveSource,
    pub result: String,
}

impl EngineMove {
    pub fn expects_loss(&self) -> bool {
        self.source == MoveSource::Fallback
    }
}

/// Picks the engine's move on `current`. `last` is the previous position and
/// the opponent move that produced `current`, when known. Returns `None` on ε.
pub fn choose_move(
    solver: &mut Solver<'_>,
    current: &Position,
    last: Option<(&Position, Move)>,
) -> Result<Option<EngineMove>, SolveError> {
    if current.is_empty() {
        return Ok(None);
    }
    let pick = |mv: Move, source: MoveSource| {
        let result = current.apply_move(mv).expect("engine moves are legal");
        Some(EngineMove {
            mv,
            source,
            result: result.literal(),
        })
    };
    if let Some((before, opponent)) = last {
        if before.apply_move(opponent).ok().as_ref() == Some(current) {
            if let Some((family, mv)) = families::family_response(before, opponent) {
                return Ok(pick(mv, MoveSource::Strategy(family)));
            }
        }
    }
    let verdict = solver.classify(current)?;
    Ok(match verdict.certificate {
        Some(mv) => pick(mv, MoveSource::Solver),
        None => pick(current.legal_moves()[0], MoveSource::Fallback),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use strnim_core::TranspositionTable;

    fn p(s: &str) -> Position {
        Position::parse(s).unwrap()
    }

    #[test]
    fn terminal_has_no_move() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        assert_eq!(choose_move(&mut solver, &Position::empty(), None).unwrap(), None);
    }

    #[test]
    fn forced_win() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let m = choose_move(&mut solver, &p("b"), None).unwrap().unwrap();
        assert_eq!(m.mv, Move::new(1, 1));
        assert_eq!(m.result, "");
        assert_eq!(m.source, MoveSource::Solver);
    }

    #[test]
    fn losing_position_plays_smallest_move() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let m = choose_move(&mut solver, &p("ba"), None).unwrap().unwrap();
        assert_eq!(m.mv, Move::new(1, 1));
        assert!(m.expects_loss());
    }

    #[test]
    fn strategy_takes_priority() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let before = p("abccaacb");
        let opponent = Move::new(3, 2);
        let current = before.apply_move(opponent).unwrap();
        let m = choose_move(&mut solver, &current, Some((&before, opponent)))
            .unwrap()
            .unwrap();
        assert_eq!(m.source, MoveSource::Strategy(Family::CompPalindrome));
        assert_eq!(m.result, "abcb");
        // A stale history entry is ignored.
        let m = choose_move(&mut solver, &current, Some((&p("abab"), opponent)))
            .unwrap()
            .unwrap();
        assert_eq!(m.source, MoveSource::Solver);
    }
}
