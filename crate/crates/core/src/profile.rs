//! Canonical team-1 profiles and their classification.
//!
//! A profile lists the points team 1 takes from each paired encounter with
//! its `n - 1` opponents. Completion counts do not depend on the order of the
//! entries, so only weakly descending profiles are generated and each one
//! stands for [`Team1Profile::representation_factor`] ordered vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{complement, is_take, take_is_doubled, LeagueSize, TAKES_DESCENDING};

/// Points team 1 takes from each opponent, one entry per opponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Team1Profile {
    takes: Vec<u8>,
}

impl Team1Profile {
    /// A canonical profile: `n - 1` takes, weakly descending.
    pub fn new(takes: Vec<u8>, size: LeagueSize) -> Result<Self> {
        let profile = Self::from_ordered(takes, size)?;
        if !profile.is_descending() {
            return Err(Error::invalid(format!(
                "profile {:?} is not weakly descending",
                profile.takes
            )));
        }
        Ok(profile)
    }

    /// A profile whose entries are assigned to opponents 2..n in the given
    /// order. Used for permutation checks and ordered brute-force sums.
    pub fn from_ordered(takes: Vec<u8>, size: LeagueSize) -> Result<Self> {
        validate_takes(&takes, size)?;
        Ok(Team1Profile { takes })
    }

    pub fn takes(&self) -> &[u8] {
        &self.takes
    }

    pub fn is_descending(&self) -> bool {
        self.takes.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn canonical(&self) -> Team1Profile {
        let mut takes = self.takes.clone();
        takes.sort_unstable_by(|a, b| b.cmp(a));
        Team1Profile { takes }
    }

    /// Points won by team 1 (`P1`).
    pub fn points(&self) -> u32 {
        self.takes.iter().map(|&t| u32::from(t)).sum()
    }

    /// Points conceded to the opponents (`P̄1`).
    pub fn conceded(&self) -> u32 {
        self.takes
            .iter()
            .map(|&t| u32::from(complement(t).expect("validated take")))
            .sum()
    }

    /// Number of distinct orderings of the takes.
    pub fn representation_factor(&self) -> u64 {
        let mut counts = [0u64; 7];
        for &t in &self.takes {
            counts[t as usize] += 1;
        }
        let mut factor = factorial(self.takes.len() as u64);
        for c in counts {
            factor /= factorial(c);
        }
        factor
    }

    /// `2^k` for `k` entries realized by two home/away orderings.
    pub fn doubling_factor(&self) -> u64 {
        1u64 << self.doubled_entries()
    }

    pub fn doubled_entries(&self) -> u32 {
        self.takes.iter().filter(|&&t| take_is_doubled(t)).count() as u32
    }

    pub fn classify(&self, size: LeagueSize) -> ProfileClass {
        classify(self, size)
    }
}

impl fmt::Display for Team1Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.takes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn validate_takes(takes: &[u8], size: LeagueSize) -> Result<()> {
    if takes.len() != size.opponents() {
        return Err(Error::invalid(format!(
            "profile has {} entries, a {size}-team league needs {}",
            takes.len(),
            size.opponents()
        )));
    }
    if let Some(bad) = takes.iter().find(|&&t| !is_take(t)) {
        return Err(Error::invalid(format!(
            "profile entry {bad} is not a pair take; expected one of 0, 1, 2, 3, 4, 6"
        )));
    }
    Ok(())
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

/// Outcome of checking a profile against the cutoffs and constraints.
///
/// Variants are ordered by the band of team-1 points they cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProfileClass {
    /// Team 1 has too few points for every team to match it.
    PrunedLow,
    /// The all-draw profile. Contributes exactly one outcome globally.
    AllDrawSpecial,
    /// Fails the lower balance constraint.
    PrunedEq1,
    /// Needs the completion search.
    Search,
    /// Fails the upper balance constraint.
    PrunedEq2,
    /// Draw-free profile at `3n - 3`; contributes the Eulerian digraph count.
    EulerianSpecial,
    /// Team 1 has too many points, or draws at `3n - 3`.
    PrunedHigh,
}

impl ProfileClass {
    pub const ALL: [ProfileClass; 7] = [
        ProfileClass::PrunedLow,
        ProfileClass::AllDrawSpecial,
        ProfileClass::PrunedEq1,
        ProfileClass::Search,
        ProfileClass::PrunedEq2,
        ProfileClass::EulerianSpecial,
        ProfileClass::PrunedHigh,
    ];

    pub fn is_pruned(self) -> bool {
        matches!(
            self,
            ProfileClass::PrunedLow
                | ProfileClass::PrunedEq1
                | ProfileClass::PrunedEq2
                | ProfileClass::PrunedHigh
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileClass::PrunedLow => "PRUNED_LOW",
            ProfileClass::AllDrawSpecial => "ALL_DRAW_SPECIAL",
            ProfileClass::PrunedEq1 => "PRUNED_EQ1",
            ProfileClass::Search => "SEARCH",
            ProfileClass::PrunedEq2 => "PRUNED_EQ2",
            ProfileClass::EulerianSpecial => "EULERIAN_SPECIAL",
            ProfileClass::PrunedHigh => "PRUNED_HIGH",
        }
    }
}

impl fmt::Display for ProfileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProfileClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProfileClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown profile class {s:?}")))
    }
}

/// Bounds on `(n-1)·P1 − P̄1`, the points the opponents must still collect
/// among themselves (each finishes at `P1`, having taken `P̄1` from team 1).
/// From five teams up the tightened bounds apply; below that only the plain
/// range `[2L, 3L]` of points distributed in `L` matches is used.
pub fn balance_bounds(size: LeagueSize) -> (i64, i64) {
    let l = size.inner_matches() as i64;
    if size.teams() >= 5 {
        (2 * l + 3, 3 * l - 3)
    } else {
        (2 * l, 3 * l)
    }
}

pub fn classify(profile: &Team1Profile, size: LeagueSize) -> ProfileClass {
    let n = size.teams() as u32;
    let p1 = profile.points();
    let all_draw_points = 2 * n - 2;
    let no_draw_points = 3 * n - 3;

    if p1 < all_draw_points {
        return ProfileClass::PrunedLow;
    }
    if p1 == all_draw_points {
        // Only the all-draw league reaches 2n-2 for everyone.
        return if profile.takes().iter().all(|&t| t == 2) {
            ProfileClass::AllDrawSpecial
        } else {
            ProfileClass::PrunedLow
        };
    }
    if p1 == no_draw_points {
        // At 3n-3 for everyone no match can be drawn.
        return if profile.takes().iter().all(|&t| matches!(t, 0 | 3 | 6)) {
            ProfileClass::EulerianSpecial
        } else {
            ProfileClass::PrunedHigh
        };
    }
    if p1 > no_draw_points {
        return ProfileClass::PrunedHigh;
    }

    let balance = i64::from(n - 1) * i64::from(p1) - i64::from(profile.conceded());
    let (lo, hi) = balance_bounds(size);
    if balance < lo {
        ProfileClass::PrunedEq1
    } else if balance > hi {
        ProfileClass::PrunedEq2
    } else {
        ProfileClass::Search
    }
}

/// All canonical profiles for a league, in lexicographically descending order.
pub fn make_team_points(size: LeagueSize) -> TeamPoints {
    TeamPoints {
        size,
        indices: Some(vec![0; size.opponents()]),
    }
}

/// Iterator over weakly descending take sequences.
#[derive(Debug, Clone)]
pub struct TeamPoints {
    size: LeagueSize,
    // Non-decreasing indices into TAKES_DESCENDING; None once exhausted.
    indices: Option<Vec<usize>>,
}

impl Iterator for TeamPoints {
    type Item = Team1Profile;

    fn next(&mut self) -> Option<Team1Profile> {
        let indices = self.indices.as_mut()?;
        let takes: Vec<u8> = indices.iter().map(|&i| TAKES_DESCENDING[i]).collect();
        let last = TAKES_DESCENDING.len() - 1;
        match indices.iter().rposition(|&i| i < last) {
            Some(pos) => {
                let next = indices[pos] + 1;
                indices[pos..].iter_mut().for_each(|i| *i = next);
            }
            None => self.indices = None,
        }
        debug_assert!(validate_takes(&takes, self.size).is_ok());
        Some(Team1Profile { takes })
    }
}
