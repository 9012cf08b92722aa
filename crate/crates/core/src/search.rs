//! Recursive completion counter for a fixed team-1 profile.
//!
//! Teams 2..n are processed in order. The row of team `i` holds the pair codes
//! of its encounters with teams `i+1..n`, read as a base-6 number whose digit
//! `j-i-1` is the code against team `j`. Once a row is applied team `i` has
//! played everyone, so its total must equal team 1's; otherwise the branch is
//! dropped. Every doubled pair code (tuples `(1,4)`, `(3,3)`, `(4,1)`)
//! doubles the weight of the branch.
//!
//! Two modes exist. The strict mode enumerates each row with a base-6
//! odometer and only checks the row owner once the row is complete. The
//! default mode assigns one digit at a time and drops a branch as soon as the
//! row owner can no longer land on the target, an opponent has overshot it,
//! or an opponent can no longer reach it with the games it has left. Both
//! count the same thing; the default mode visits far fewer nodes.

use crate::brute::combine_by_exponent;
use crate::error::{Error, Result};
use crate::profile::{validate_takes, Team1Profile};
use crate::scoring::{
    complement, pair_code_for_take, LeagueSize, PairOutcome, MAX_TEAMS, PAIR_OUTCOMES,
};

/// Most points one team can take from a pair encounter.
const MAX_TAKE: i32 = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Plain odometer rows with no mid-row pruning.
    pub strict: bool,
}

/// Row of pair codes for one team; digit `d` is the code against the team
/// `d + 1` places after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowCode(pub u64);

impl RowCode {
    pub fn digit(self, d: usize) -> u8 {
        (self.0 / 6u64.pow(d as u32) % 6) as u8
    }

    pub fn from_digits(digits: &[u8]) -> RowCode {
        RowCode(
            digits
                .iter()
                .rev()
                .fold(0, |acc, &d| acc * 6 + u64::from(d)),
        )
    }
}

/// Restricts team 2's row to codes whose lowest `digits` base-6 digits equal
/// `prefix`. The `6^digits` prefixes partition the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowSplit {
    pub digits: u32,
    pub prefix: u64,
}

impl RowSplit {
    pub fn all(digits: u32) -> impl Iterator<Item = RowSplit> {
        (0..6u64.pow(digits)).map(move |prefix| RowSplit { digits, prefix })
    }
}

/// Partial assignment: rows of teams before `level` are applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchState {
    target: i32,
    /// Points per opponent, index 0 is team 2.
    accumulated: Vec<i32>,
    /// Index (into `accumulated`) of the team whose row comes next.
    level: usize,
    /// Doubled pair codes chosen so far; the weight is `2^doubled`.
    doubled: u32,
}

impl SearchState {
    /// Start state: each opponent holds what it took from team 1.
    pub fn initial(profile: &Team1Profile, size: LeagueSize) -> Result<Self> {
        validate_takes(profile.takes(), size)?;
        let accumulated = profile
            .takes()
            .iter()
            .map(|&t| complement(t).map(i32::from))
            .collect::<Result<Vec<_>>>()?;
        Ok(SearchState {
            target: profile.points() as i32,
            accumulated,
            level: 0,
            doubled: 0,
        })
    }

    pub fn target(&self) -> i32 {
        self.target
    }

    pub fn accumulated(&self) -> &[i32] {
        &self.accumulated
    }

    /// League team number (team 1 is the profile owner) whose row is next.
    pub fn team(&self) -> usize {
        self.level + 2
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn weight(&self) -> u128 {
        1u128 << self.doubled
    }

    pub fn is_complete(&self) -> bool {
        self.level == self.accumulated.len()
    }

    /// Digits in the next row; the last team has an empty row.
    pub fn row_len(&self) -> usize {
        self.accumulated.len().saturating_sub(self.level + 1)
    }

    /// Applies the next team's row. Returns `Ok(None)` when the row owner
    /// misses the target, or (outside strict mode) when an opponent overshoots.
    pub fn apply_row(&self, row: RowCode, strict: bool) -> Result<Option<SearchState>> {
        if self.is_complete() {
            return Err(Error::invalid("every row has already been applied"));
        }
        let len = self.row_len();
        if row.0 >= 6u64.pow(len as u32) {
            return Err(Error::invalid(format!(
                "row code {} out of range for a row of {len} digits",
                row.0
            )));
        }
        let mut next = self.clone();
        let i = self.level;
        for d in 0..len {
            let j = i + 1 + d;
            let p = PAIR_OUTCOMES[row.digit(d) as usize];
            next.accumulated[i] += i32::from(p.points_a);
            next.accumulated[j] += i32::from(p.points_b);
            next.doubled += u32::from(p.doubled());
        }
        next.level += 1;
        if next.accumulated[i] != self.target {
            return Ok(None);
        }
        if !strict && next.accumulated[i + 1..].iter().any(|&p| p > self.target) {
            return Ok(None);
        }
        Ok(Some(next))
    }
}

/// Weighted number of completions of an ordered profile, using the default
/// (pruned) mode.
pub fn count_completions(profile: &Team1Profile, size: LeagueSize) -> Result<u128> {
    count_completions_with(profile, size, SearchOptions::default(), None)
}

/// Weighted number of completions, optionally restricted to one slice of
/// team 2's row codes.
pub fn count_completions_with(
    profile: &Team1Profile,
    size: LeagueSize,
    opts: SearchOptions,
    split: Option<RowSplit>,
) -> Result<u128> {
    let state = SearchState::initial(profile, size)?;
    count_from_state(&state, opts, split)
}

/// Weighted number of completions reachable from a partial state.
pub fn count_from_state(
    state: &SearchState,
    opts: SearchOptions,
    split: Option<RowSplit>,
) -> Result<u128> {
    let mut search = Search::new(state, split)?;
    if opts.strict {
        search.strict_row(state.level, state.doubled);
    } else {
        search.row(state.level, state.doubled);
    }
    combine_by_exponent(&search.by_exponent)
}

/// Team-2 rows that survive the default-mode checks. The engine uses this
/// as a cost estimate when deciding whether to split a profile.
pub fn feasible_first_rows(profile: &Team1Profile, size: LeagueSize) -> Result<u64> {
    let state = SearchState::initial(profile, size)?;
    let mut search = Search::new(&state, None)?;
    search.stop_after_row = Some(0);
    search.row(0, 0);
    Ok(search.by_exponent.iter().sum())
}

struct Search {
    teams: usize,
    target: i32,
    acc: [i32; MAX_TEAMS],
    /// Fixed codes for the leading digits of the first row (splitting).
    fixed: Vec<u8>,
    /// Leaves counted per number of doubled pair codes.
    // A u64 leaf counter cannot wrap: 2^64 leaves would take centuries.
    by_exponent: Vec<u64>,
    stop_after_row: Option<usize>,
}

impl Search {
    fn new(state: &SearchState, split: Option<RowSplit>) -> Result<Self> {
        let teams = state.accumulated.len();
        let mut acc = [0i32; MAX_TEAMS];
        acc[..teams].copy_from_slice(&state.accumulated);
        let pairs = teams * teams.saturating_sub(1) / 2;
        let mut fixed = Vec::new();
        if let Some(split) = split {
            let first_row = teams.saturating_sub(1);
            if state.level != 0 || split.digits as usize > first_row {
                return Err(Error::invalid(format!(
                    "cannot split on {} digits of team 2's row ({first_row} digits, search at team {})",
                    split.digits,
                    state.team()
                )));
            }
            if split.prefix >= 6u64.pow(split.digits) {
                return Err(Error::invalid(format!(
                    "row prefix {} out of range for {} digits",
                    split.prefix, split.digits
                )));
            }
            fixed = (0..split.digits as usize)
                .map(|d| RowCode(split.prefix).digit(d))
                .collect();
        }
        Ok(Search {
            teams,
            target: state.target,
            acc,
            fixed,
            by_exponent: vec![0; pairs + state.doubled as usize + 1],
            stop_after_row: None,
        })
    }

    fn leaf(&mut self, doubled: u32) {
        self.by_exponent[doubled as usize] += 1;
    }

    // ---- default mode: one digit at a time ----

    fn row(&mut self, i: usize, doubled: u32) {
        if i + 1 >= self.teams {
            // Last team: nothing left to play.
            if i >= self.teams || self.acc[i] == self.target {
                self.leaf(doubled);
            }
            return;
        }
        self.digit(i, i + 1, doubled);
    }

    fn digit(&mut self, i: usize, j: usize, doubled: u32) {
        let target = self.target;
        if j == self.teams {
            if self.acc[i] != target {
                return;
            }
            if self.stop_after_row == Some(i) {
                self.leaf(doubled);
            } else {
                self.row(i + 1, doubled);
            }
            return;
        }
        let need = target - self.acc[i];
        let remaining = (self.teams - j) as i32;
        if need < 0 || need > MAX_TAKE * remaining {
            return;
        }
        // Games opponent j still has after this one.
        let opponent_left = (self.teams - i - 2) as i32;

        let fixed = if i == 0 {
            self.fixed.get(j - 1).copied()
        } else {
            None
        };
        let forced = if remaining == 1 {
            match pair_code_for_take(need as u8) {
                Some(code) => Some(code),
                None => return,
            }
        } else {
            None
        };
        let (lo, hi) = match fixed.or(forced) {
            Some(code) => (code as usize, code as usize + 1),
            None => (0, PAIR_OUTCOMES.len()),
        };
        for p in &PAIR_OUTCOMES[lo..hi] {
            let opponent = self.acc[j] + i32::from(p.points_b);
            if opponent > target || target - opponent > MAX_TAKE * opponent_left {
                continue;
            }
            self.acc[i] += i32::from(p.points_a);
            self.acc[j] = opponent;
            self.digit(i, j + 1, doubled + u32::from(p.doubled()));
            self.acc[i] -= i32::from(p.points_a);
            self.acc[j] -= i32::from(p.points_b);
        }
    }

    // ---- strict mode: whole-row odometer ----

    fn strict_row(&mut self, i: usize, doubled: u32) {
        if i + 1 >= self.teams {
            if i >= self.teams || self.acc[i] == self.target {
                self.leaf(doubled);
            }
            return;
        }
        let len = self.teams - 1 - i;
        let fixed = if i == 0 { self.fixed.len() } else { 0 };
        let mut digits = [0u8; MAX_TEAMS];
        digits[..fixed].copy_from_slice(&self.fixed[..fixed]);
        let mut row_doubled = 0u32;
        for (d, &code) in digits[..len].iter().enumerate() {
            let p = PAIR_OUTCOMES[code as usize];
            self.add(i, i + 1 + d, p, 1);
            row_doubled += u32::from(p.doubled());
        }
        loop {
            if self.acc[i] == self.target {
                self.strict_row(i + 1, doubled + row_doubled);
            }
            // Advance the free digits; stop once they wrap back to zero.
            let mut wrapped = true;
            for (d, code) in digits[..len].iter_mut().enumerate().skip(fixed) {
                let old = PAIR_OUTCOMES[*code as usize];
                *code = (*code + 1) % 6;
                let new = PAIR_OUTCOMES[*code as usize];
                self.add(i, i + 1 + d, old, -1);
                self.add(i, i + 1 + d, new, 1);
                row_doubled = row_doubled + u32::from(new.doubled()) - u32::from(old.doubled());
                if *code != 0 {
                    wrapped = false;
                    break;
                }
            }
            if wrapped {
                break;
            }
        }
        for (d, &code) in digits[..len].iter().enumerate() {
            self.add(i, i + 1 + d, PAIR_OUTCOMES[code as usize], -1);
        }
    }

    fn add(&mut self, i: usize, j: usize, p: PairOutcome, sign: i32) {
        self.acc[i] += sign * i32::from(p.points_a);
        self.acc[j] += sign * i32::from(p.points_b);
    }
}
