//! League dimensions, match and paired-encounter encodings, and point arithmetic.
//!
//! A single match result is one of three codes (away win, draw, home win).
//! When the home and away matches between two teams are taken together only
//! the combined points matter, which leaves six [`PairOutcome`]s. Three of
//! them can be realized by two different ordered (home, away) result pairs
//! and therefore carry multiplicity 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest league the engine will represent at all. Search state is kept in
/// fixed-size arrays of this length.
pub const MAX_TEAMS: usize = 16;

/// Points a team can take from a paired (home + away) encounter.
pub const TAKES: [u8; 6] = [0, 1, 2, 3, 4, 6];

/// The same values in descending order, which is the order canonical
/// profiles are built from.
pub const TAKES_DESCENDING: [u8; 6] = [6, 4, 3, 2, 1, 0];

/// Number of teams in a double round-robin league.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeagueSize(usize);

impl LeagueSize {
    pub fn new(teams: usize) -> Result<Self> {
        if teams < 2 {
            return Err(Error::invalid(format!(
                "a league needs at least 2 teams, got {teams}"
            )));
        }
        if teams > MAX_TEAMS {
            return Err(Error::UnsupportedSize {
                what: "league representation",
                teams,
                min: 2,
                max: MAX_TEAMS,
            });
        }
        Ok(LeagueSize(teams))
    }

    pub fn teams(self) -> usize {
        self.0
    }

    /// Opponents of any one team, `n - 1`.
    pub fn opponents(self) -> usize {
        self.0 - 1
    }

    /// Total matches `M = n(n-1)`.
    pub fn matches(self) -> usize {
        self.0 * (self.0 - 1)
    }

    /// Matches among teams 2..n, `L = (n-1)(n-2)`.
    pub fn inner_matches(self) -> usize {
        (self.0 - 1) * (self.0 - 2)
    }

    /// Paired encounters among teams 2..n, `L / 2`.
    pub fn inner_pairs(self) -> usize {
        self.inner_matches() / 2
    }

    /// Matches in canonical order: home team major, away team minor, both
    /// ascending, diagonal skipped. Teams are numbered from 0.
    pub fn fixtures(self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.0;
        (0..n).flat_map(move |home| {
            (0..n)
                .filter(move |&away| away != home)
                .map(move |away| (home, away))
        })
    }
}

impl fmt::Display for LeagueSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Result of one match, coded as in the base-3 outcome encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MatchResult {
    AwayWin = 0,
    Draw = 1,
    HomeWin = 2,
}

impl MatchResult {
    pub const ALL: [MatchResult; 3] = [
        MatchResult::AwayWin,
        MatchResult::Draw,
        MatchResult::HomeWin,
    ];

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(MatchResult::AwayWin),
            1 => Ok(MatchResult::Draw),
            2 => Ok(MatchResult::HomeWin),
            _ => Err(Error::invalid(format!(
                "match result code must be 0, 1 or 2, got {code}"
            ))),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    /// `(home_points, away_points)` under 3/1/0 scoring.
    pub fn points(self) -> (u8, u8) {
        match self {
            MatchResult::AwayWin => (0, 3),
            MatchResult::Draw => (1, 1),
            MatchResult::HomeWin => (3, 0),
        }
    }

    /// The result seen with home and away swapped.
    pub fn flipped(self) -> Self {
        match self {
            MatchResult::AwayWin => MatchResult::HomeWin,
            MatchResult::Draw => MatchResult::Draw,
            MatchResult::HomeWin => MatchResult::AwayWin,
        }
    }

    fn from_goals(home: u32, away: u32) -> Self {
        match home.cmp(&away) {
            std::cmp::Ordering::Less => MatchResult::AwayWin,
            std::cmp::Ordering::Equal => MatchResult::Draw,
            std::cmp::Ordering::Greater => MatchResult::HomeWin,
        }
    }
}

/// Points for a raw match result code.
pub fn result_points(code: u8) -> Result<(u8, u8)> {
    MatchResult::from_code(code).map(MatchResult::points)
}

/// Combined outcome of the two matches between teams A and B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairOutcome {
    pub code: u8,
    pub points_a: u8,
    pub points_b: u8,
    /// Number of ordered (home, away) result pairs that produce this tuple.
    pub multiplicity: u8,
}

impl PairOutcome {
    pub const fn doubled(&self) -> bool {
        self.multiplicity == 2
    }
}

const fn pair(code: u8, points_a: u8, points_b: u8, multiplicity: u8) -> PairOutcome {
    PairOutcome {
        code,
        points_a,
        points_b,
        multiplicity,
    }
}

/// All six pair outcomes, indexed by code. Code 5 stands for 6 points.
pub const PAIR_OUTCOMES: [PairOutcome; 6] = [
    pair(0, 0, 6, 1),
    pair(1, 1, 4, 2),
    pair(2, 2, 2, 1),
    pair(3, 3, 3, 2),
    pair(4, 4, 1, 2),
    pair(5, 6, 0, 1),
];

pub fn pair_outcome(code: u8) -> Result<PairOutcome> {
    PAIR_OUTCOMES
        .get(code as usize)
        .copied()
        .ok_or_else(|| Error::invalid(format!("pair outcome code must be 0..=5, got {code}")))
}

/// Pair code whose A-side take equals `take`; `None` for values no pair yields.
pub fn pair_code_for_take(take: u8) -> Option<u8> {
    match take {
        0..=4 => Some(take),
        6 => Some(5),
        _ => None,
    }
}

pub fn is_take(points: u8) -> bool {
    pair_code_for_take(points).is_some()
}

/// Points the opponent takes when team A takes `take` from the pair.
pub fn complement(take: u8) -> Result<u8> {
    match pair_code_for_take(take) {
        Some(code) => Ok(PAIR_OUTCOMES[code as usize].points_b),
        None => Err(Error::invalid(format!(
            "{take} is not a pair take; expected one of 0, 1, 2, 3, 4, 6"
        ))),
    }
}

/// Whether a take is realized by two orderings of home/away results.
pub fn take_is_doubled(take: u8) -> bool {
    matches!(take, 1 | 3 | 4)
}

/// Goals grid for a played league. Used to evaluate concrete tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreTable {
    teams: usize,
    cells: Vec<Option<(u32, u32)>>,
}

impl ScoreTable {
    pub fn empty(teams: usize) -> Result<Self> {
        LeagueSize::new(teams)?;
        Ok(ScoreTable {
            teams,
            cells: vec![None; teams * teams],
        })
    }

    pub fn teams(&self) -> usize {
        self.teams
    }

    pub fn set(
        &mut self,
        home: usize,
        away: usize,
        home_goals: u32,
        away_goals: u32,
    ) -> Result<()> {
        if home >= self.teams || away >= self.teams || home == away {
            return Err(Error::invalid(format!(
                "no match {home} vs {away} in a {}-team table",
                self.teams
            )));
        }
        self.cells[home * self.teams + away] = Some((home_goals, away_goals));
        Ok(())
    }

    pub fn get(&self, home: usize, away: usize) -> Option<(u32, u32)> {
        if home >= self.teams || away >= self.teams {
            return None;
        }
        self.cells[home * self.teams + away]
    }

    /// Point totals per team over all home and away matches.
    pub fn table_points(&self) -> Result<Vec<u32>> {
        let size = LeagueSize::new(self.teams)?;
        let mut points = vec![0u32; self.teams];
        for (home, away) in size.fixtures() {
            let (h, a) = self
                .get(home, away)
                .ok_or(Error::IncompleteTable { home, away })?;
            let (hp, ap) = MatchResult::from_goals(h, a).points();
            points[home] += u32::from(hp);
            points[away] += u32::from(ap);
        }
        Ok(points)
    }
}

/// Parses the text grid: one home team per line, whitespace separated `h:a`
/// cells, `-` on the diagonal and `?` for a match without a result. Blank
/// lines and `#` comments are ignored.
impl FromStr for ScoreTable {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let rows: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, line)| (i + 1, line.split('#').next().unwrap_or("")))
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| (i, line.split_whitespace().collect()))
            .collect();
        let teams = rows.len();
        let mut table = ScoreTable::empty(teams).map_err(|e| Error::TableParse {
            line: 0,
            message: e.to_string(),
        })?;
        for (home, (line, cells)) in rows.iter().enumerate() {
            let parse_err = |message: String| Error::TableParse {
                line: *line,
                message,
            };
            if cells.len() != teams {
                return Err(parse_err(format!(
                    "expected {teams} cells, found {}",
                    cells.len()
                )));
            }
            for (away, cell) in cells.iter().enumerate() {
                if away == home {
                    if *cell != "-" {
                        return Err(parse_err(format!(
                            "diagonal cell must be '-', found {cell:?}"
                        )));
                    }
                    continue;
                }
                if *cell == "?" {
                    continue;
                }
                let (h, a) = cell
                    .split_once(':')
                    .and_then(|(h, a)| Some((h.parse().ok()?, a.parse().ok()?)))
                    .ok_or_else(|| parse_err(format!("bad cell {cell:?}, expected h:a")))?;
                table.set(home, away, h, a)?;
            }
        }
        Ok(table)
    }
}
