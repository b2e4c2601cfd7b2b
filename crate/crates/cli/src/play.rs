//! Interactive terminal play against the engine.

use std::io::{self, BufRead, Write};

use serde::Serialize;
use strnim_core::{Move, Position, SolveError, Solver};

use crate::engine::{self, MoveSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Human,
    Engine,
}

impl Player {
    fn other(self) -> Player {
        match self {
            Player::Human => Player::Engine,
            Player::Engine => Player::Human,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Turn {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    pub position: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<MoveSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub initial: String,
    pub engine_first: bool,
    pub turns: Vec<Turn>,
    /// `None` when the session ended before the game did.
    pub winner: Option<Player>,
}

#[derive(Debug, thiserror::Error)]
pub enum PlayError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Reads `<run> <count>` or an expanded interval `i-j` (1-based, inclusive).
pub fn parse_human_move(pos: &Position, line: &str) -> Result<Move, String> {
    let line = line.trim();
    if let Some((a, b)) = line.split_once('-') {
        let start: usize = a.trim().parse().map_err(|_| format!("bad interval start {a:?}"))?;
        let end: usize = b.trim().parse().map_err(|_| format!("bad interval end {b:?}"))?;
        return pos.interval_to_move(start, end).map_err(|e| e.to_string());
    }
    let mut parts = line.split_whitespace();
    let (Some(run), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err("expected `<run> <count>` or `i-j`".into());
    };
    let run: usize = run.parse().map_err(|_| format!("bad run index {run:?}"))?;
    let count: u32 = count.parse().map_err(|_| format!("bad count {count:?}"))?;
    let mv = Move::new(run, count);
    if pos.is_legal(mv) {
        Ok(mv)
    } else {
        Err(format!("illegal move {mv} on {pos}"))
    }
}

fn describe_runs(pos: &Position) -> String {
    pos.runs()
        .iter()
        .enumerate()
        .map(|(i, r)| format!("[{}]{}^{}", i + 1, r.symbol, r.len))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn play<R: BufRead, W: Write>(
    initial: Position,
    engine_first: bool,
    solver: &mut Solver<'_>,
    mut input: R,
    mut out: W,
) -> Result<Transcript, PlayError> {
    let mut transcript = Transcript {
        initial: initial.literal(),
        engine_first,
        turns: Vec::new(),
        winner: None,
    };
    let mut pos = initial;
    let mut to_move = if engine_first { Player::Engine } else { Player::Human };
    let mut last: Option<(Position, Move)> = None;
    loop {
        if pos.is_empty() {
            let loser = to_move;
            writeln!(out, "game over: ε reached, {:?} to move loses", loser)?;
            transcript.winner = Some(loser.other());
            return Ok(transcript);
        }
        let verdict = solver.grundy(&pos)?.outcome();
        writeln!(out, "position: {}  {}  ({})", pos, describe_runs(&pos), verdict)?;
        match to_move {
            Player::Human => {
                write!(out, "your move (`run count` or `i-j`, q to quit)> ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 || matches!(line.trim(), "q" | "quit") {
                    writeln!(out, "session ended")?;
                    return Ok(transcript);
                }
                let mv = match parse_human_move(&pos, &line) {
                    Ok(mv) => mv,
                    Err(msg) => {
                        writeln!(out, "illegal input: {msg}")?;
                        continue;
                    }
                };
                let next = pos.apply_move(mv).expect("validated");
                transcript.turns.push(Turn {
                    player: Player::Human,
                    mv,
                    position: next.literal(),
                    source: None,
                });
                last = Some((pos, mv));
                pos = next;
            }
            Player::Engine => {
                let prior = last.as_ref().map(|(p, m)| (p, *m));
                let chosen = engine::choose_move(solver, &pos, prior)?.expect("non-terminal position has a move");
                if chosen.expects_loss() {
                    writeln!(out, "engine is in a P-position: expected loss under perfect play")?;
                }
                writeln!(out, "engine plays {} -> {}", chosen.mv, display_literal(&chosen.result))?;
                transcript.turns.push(Turn {
                    player: Player::Engine,
                    mv: chosen.mv,
                    position: chosen.result.clone(),
                    source: Some(chosen.source),
                });
                pos = pos.apply_move(chosen.mv).expect("engine moves are legal");
                last = None;
            }
        }
        to_move = to_move.other();
    }
}

fn display_literal(s: &str) -> &str {
    if s.is_empty() {
        "ε"
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use strnim_core::TranspositionTable;

    fn p(s: &str) -> Position {
        Position::parse(s).unwrap()
    }

    #[test]
    fn human_move_syntax() {
        let pos = p("aabbbca");
        assert_eq!(parse_human_move(&pos, "2 2"), Ok(Move::new(2, 2)));
        assert_eq!(parse_human_move(&pos, " 3-4 "), Ok(Move::new(2, 2)));
        assert!(parse_human_move(&pos, "2-3").is_err());
        assert!(parse_human_move(&pos, "5 1").is_err());
        assert!(parse_human_move(&pos, "two").is_err());
        assert!(parse_human_move(&pos, "1 1 1").is_err());
    }

    #[test]
    fn empty_start_is_immediately_over() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let mut out = Vec::new();
        let t = play(Position::empty(), false, &mut solver, &b""[..], &mut out).unwrap();
        assert_eq!(t.winner, Some(Player::Engine));
        assert!(String::from_utf8(out).unwrap().contains("game over"));
    }

    #[test]
    fn engine_wins_after_demo_opening() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let mut out = Vec::new();
        // Human keeps taking one character from the first run.
        let input = "2 2\nbad\n1 1\n1 1\n1 1\n1 1\n1 1\n1 1\n";
        let t = play(p("aabbbca"), false, &mut solver, input.as_bytes(), &mut out).unwrap();
        assert_eq!(t.turns[0].position, "aabca");
        assert_eq!(t.turns[1].player, Player::Engine);
        let after_engine = p(&t.turns[1].position);
        assert!(solver.grundy(&after_engine).unwrap().is_zero());
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("illegal input"));
    }

    #[test]
    fn engine_first_on_p_position_flags_loss() {
        let table = TranspositionTable::new();
        let mut solver = Solver::new(&table);
        let mut out = Vec::new();
        let t = play(p("ba"), true, &mut solver, "1 1\n".as_bytes(), &mut out).unwrap();
        assert_eq!(t.turns[0].mv, Move::new(1, 1));
        assert_eq!(t.turns[0].source, Some(MoveSource::Fallback));
        assert_eq!(t.winner, Some(Player::Human));
        assert!(String::from_utf8(out).unwrap().contains("expected loss"));
    }
}
