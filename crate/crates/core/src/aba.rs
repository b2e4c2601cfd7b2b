//! Positions of the form `a^i b^j a^k`.
//!
//! For a fixed middle length `j` there is exactly one `k` making
//! `a^i b^j a^k` a P-position; [`LoseTable`] stores that `k` for each `i`.
//! The row is computed by a mex recurrence over
//!
//! - `A(i, j)`: values already used in row `j` (shrinking the left block),
//! - `B(i, j)`: values of rows `1..j` at column `i` (shrinking the middle),
//! - `E(i)`: `{0}` when `i = 0`, since deleting the whole middle block of
//!   `b^j` alone leaves `ε`.
//!
//! The P-pairs `⟨i, k⟩` with `i ≤ k` form an eventually periodic set,
//! represented by [`PeriodicPairSet`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::position::{Position, Symbol};
use crate::solver::{SolveError, Solver};

pub const DEFAULT_SEARCH_BOUND: usize = 10_000;
pub const DEFAULT_MARGIN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbaError {
    #[error("middle run length must be at least 1")]
    ZeroMiddle,
    #[error("no period found for j = {j} within search bound {search_bound}")]
    NoPeriod { j: u32, search_bound: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// `values[i]` is the unique `k` with `a^i b^j a^k` a P-position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoseTable {
    pub j: u32,
    pub values: Vec<u32>,
}

impl LoseTable {
    pub fn get(&self, i: usize) -> Option<u32> {
        self.values.get(i).copied()
    }

    pub fn max_i(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// `i,lose` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,lose\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i, v));
        }
        out
    }
}

/// Builds rows `1..=j` for columns `0..=max_i`.
pub fn build_lose_rows(j: u32, max_i: usize) -> Result<Vec<LoseTable>, AbaError> {
    if j < 1 {
        return Err(AbaError::ZeroMiddle);
    }
    let width = max_i + 1;
    let mut rows: Vec<LoseTable> = Vec::with_capacity(j as usize);
    for t in 1..=j {
        // used[v]: v ∈ A(i, t). Values never exceed i + t.
        let mut used = vec![false; width + t as usize + 1];
        let mut low = 0usize;
        let mut values = Vec::with_capacity(width);
        for i in 0..width {
            while used[low] {
                low += 1;
            }
            let blocked = |k: u32| (i == 0 && k == 0) || rows.iter().any(|row| row.values[i] == k) || used[k as usize];
            let mut k = low as u32;
            while blocked(k) {
                k += 1;
            }
            used[k as usize] = true;
            values.push(k);
        }
        rows.push(LoseTable { j: t, values });
    }
    Ok(rows)
}

pub fn build_lose_table(j: u32, max_i: usize) -> Result<LoseTable, AbaError> {
    Ok(build_lose_rows(j, max_i)?
        .pop()
        .expect("j >= 1 yields at least one row"))
}

/// `a^i b^j a^k`.
pub fn aba_position(i: u32, j: u32, k: u32) -> Position {
    let (a, b) = (Symbol::first(2)[0], Symbol::first(2)[1]);
    Position::from_runs([(a, i), (b, j), (a, k)])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub i: u32,
    pub k: u32,
    pub table_says_p: bool,
    pub solver_says_p: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverCheck {
    pub j: u32,
    pub max_i: usize,
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
}

/// Classifies every `a^i b^j a^k` with `i ≤ max_i`, `k ≤ i + j` by brute
/// force and compares with the recurrence.
pub fn verify_against_solver(j: u32, max_i: usize, solver: &mut Solver<'_>) -> Result<SolverCheck, AbaError> {
    let table = build_lose_table(j, max_i)?;
    let mut checked = 0;
    let mut discrepancies = Vec::new();
    for (i, &lose) in table.values.iter().enumerate() {
        let i = i as u32;
        for k in 0..=i + j {
            let solver_says_p = solver.grundy(&aba_position(i, j, k))?.is_zero();
            let table_says_p = k == lose;
            checked += 1;
            if solver_says_p != table_says_p {
                discrepancies.push(Discrepancy {
                    i,
                    k,
                    table_says_p,
                    solver_says_p,
                });
            }
        }
    }
    Ok(SolverCheck {
        j,
        max_i,
        checked,
        discrepancies,
    })
}

/// `base ∪ (repeating + period·ℕ)`, restricted to pairs with `i ≤ k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicPairSet {
    pub j: u32,
    pub base: BTreeSet<(u32, u32)>,
    pub repeating: BTreeSet<(u32, u32)>,
    pub period: u32,
}

impl PeriodicPairSet {
    pub fn new(
        j: u32,
        base: impl IntoIterator<Item = (u32, u32)>,
        repeating: impl IntoIterator<Item = (u32, u32)>,
        period: u32,
    ) -> PeriodicPairSet {
        let set = PeriodicPairSet {
            j,
            base: base.into_iter().collect(),
            repeating: repeating.into_iter().collect(),
            period,
        };
        debug_assert!(set.period >= 1);
        debug_assert!(set.base.iter().chain(&set.repeating).all(|(i, k)| i <= k));
        set
    }

    /// Membership of the unordered pair `{i, k}`.
    pub fn contains(&self, i: u32, k: u32) -> bool {
        let (i, k) = if i <= k { (i, k) } else { (k, i) };
        if self.base.contains(&(i, k)) {
            return true;
        }
        self.repeating
            .iter()
            .any(|&(ri, rk)| i >= ri && (i - ri) % self.period == 0 && k >= rk && k - rk == i - ri)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs = |s: &BTreeSet<(u32, u32)>| -> Vec<[u32; 2]> { s.iter().map(|&(i, k)| [i, k]).collect() };
        serde_json::json!({
            "j": self.j,
            "base": pairs(&self.base),
            "repeating": pairs(&self.repeating),
            "period": self.period,
        })
    }
}

pub fn pair_member(set: &PeriodicPairSet, i: u32, k: u32) -> bool {
    set.contains(i, k)
}

/// Finds the smallest `(period, start)` such that `Lose(j)[i] - i` repeats
/// with that period from `start` up to `search_bound`, with at least
/// `margin` full periods observed.
pub fn detect_period(j: u32, search_bound: usize, margin: usize) -> Result<PeriodicPairSet, AbaError> {
    let table = build_lose_table(j, search_bound)?;
    detect_period_in(&table, margin).ok_or(AbaError::NoPeriod { j, search_bound })
}

pub fn detect_period_in(table: &LoseTable, margin: usize) -> Option<PeriodicPairSet> {
    let offset: Vec<i64> = table
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v as i64 - i as i64)
        .collect();
    let bound = table.max_i();
    for p in 1..=bound {
        // Smallest start from which d(i + p) = d(i) holds through the bound.
        let start = (0..=bound - p)
            .rev()
            .find(|&i| offset[i + p] != offset[i])
            .map_or(0, |i| i + 1);
        if bound - start < margin.max(1) * p {
            continue;
        }
        let pair = |i: usize| (i as u32, table.values[i]);
        let base = (0..start).map(pair).filter(|(i, k)| i <= k);
        let repeating = (start..start + p).map(pair).filter(|(i, k)| i <= k);
        return Some(PeriodicPairSet::new(table.j, base, repeating, p as u32));
    }
    None
}

/// The sets `L(1)` to `L(6)` as published.
pub fn known_tables() -> BTreeMap<u32, PeriodicPairSet> {
    let mut m = BTreeMap::new();
    m.insert(1, PeriodicPairSet::new(1, [(0, 1)], [(2, 2)], 1));
    m.insert(2, PeriodicPairSet::new(2, [(0, 2), (1, 1)], [(3, 4)], 2));
    m.insert(3, PeriodicPairSet::new(3, [(0, 3), (1, 2)], [(4, 5)], 2));
    m.insert(
        4,
        PeriodicPairSet::new(4, [(0, 4), (1, 3), (2, 5)], [(6, 8), (7, 9)], 4),
    );
    m.insert(
        5,
        PeriodicPairSet::new(
            5,
            [(0, 5), (1, 4), (2, 3), (6, 9), (7, 10), (8, 11)],
            [(12, 14), (13, 15)],
            4,
        ),
    );
    m.insert(
        6,
        PeriodicPairSet::new(
            6,
            [(0, 6), (1, 5), (2, 4), (3, 7), (8, 10), (9, 11)],
            [(12, 15), (13, 16), (14, 17)],
            6,
        ),
    );
    m
}

/// Pairs `(i, k)` with `i, k ≤ bound` on which two sets disagree.
pub fn membership_differences(a: &PeriodicPairSet, b: &PeriodicPairSet, bound: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for i in 0..=bound {
        for k in i..=bound {
            if a.contains(i, k) != b.contains(i, k) {
                out.push((i, k));
            }
        }
    }
    out
}
