//! Exact counting of double round-robin league outcomes in which every team
//! finishes on the same number of points (3 for a win, 1 for a draw).
//!
//! Two independent routes are provided:
//!
//! * [`brute`] enumerates every outcome, and is the oracle for small leagues.
//! * [`engine`] fixes team 1's results up to permutation ([`profile`]),
//!   discards profiles that provably cannot tie, adds the closed-form
//!   all-draw and draw-free ([`eulerian`]) classes, and counts the remaining
//!   profiles with the recursive search in [`search`].

pub mod brute;
pub mod engine;
pub mod error;
pub mod eulerian;
pub mod ledger;
pub mod profile;
pub mod report;
pub mod scoring;
pub mod search;

pub use brute::{count_completions_bruteforce, count_tied_bruteforce, BruteOptions};
pub use engine::{count_tied, EngineOptions};
pub use error::{Error, Result};
pub use eulerian::{eulerian_count, eulerian_count_bruteforce};
pub use profile::{make_team_points, ProfileClass, Team1Profile};
pub use report::TiedCountReport;
pub use scoring::{LeagueSize, MatchResult, PairOutcome, ScoreTable};
pub use search::{count_completions, SearchOptions};
