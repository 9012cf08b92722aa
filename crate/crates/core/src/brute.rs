//! Ground-truth counters by full enumeration.
//!
//! [`count_tied_bruteforce`] walks every one of the `3^M` league outcomes.
//! [`count_completions_bruteforce`] fixes team 1's pair takes and walks all
//! `6^(L/2)` pair-code assignments among the remaining teams. Both are slow
//! on purpose: they share nothing with the pruned search and serve as its
//! oracle.

use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use crate::error::{Error, Result};
use crate::profile::Team1Profile;
use crate::scoring::{complement, LeagueSize, MatchResult, MAX_TEAMS, PAIR_OUTCOMES};

/// Largest league swept by default. `3^20` outcomes at five teams.
pub const BRUTE_MAX_TEAMS: usize = 5;

/// Hard limit even with the override: the encoding must fit in 128 bits.
const BRUTE_HARD_MAX_TEAMS: usize = 9;

pub const DEFAULT_CHUNK: u64 = 59_049; // 3^10

/// A league outcome as a base-3 number; digit `i` is the result of match `i`
/// in canonical fixture order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding(pub u128);

fn outcome_space(size: LeagueSize) -> Result<u128> {
    3u128
        .checked_pow(size.matches() as u32)
        .ok_or(Error::Overflow("sizing the outcome space"))
}

pub fn decode_outcome(encoding: Encoding, size: LeagueSize) -> Result<Vec<MatchResult>> {
    let space = outcome_space(size)?;
    if encoding.0 >= space {
        return Err(Error::EncodingOutOfRange {
            value: encoding.0,
            teams: size.teams(),
            matches: size.matches(),
        });
    }
    let mut rest = encoding.0;
    let mut results = Vec::with_capacity(size.matches());
    for _ in 0..size.matches() {
        results.push(MatchResult::from_code((rest % 3) as u8)?);
        rest /= 3;
    }
    Ok(results)
}

pub fn encode_outcome(results: &[MatchResult]) -> Encoding {
    Encoding(
        results
            .iter()
            .rev()
            .fold(0u128, |acc, r| acc * 3 + u128::from(r.code())),
    )
}

/// Per-team points for a full list of results in canonical order.
pub fn tally_points(results: &[MatchResult], size: LeagueSize) -> Result<Vec<u32>> {
    if results.len() != size.matches() {
        return Err(Error::invalid(format!(
            "expected {} match results for {size} teams, got {}",
            size.matches(),
            results.len()
        )));
    }
    let mut points = vec![0u32; size.teams()];
    for ((home, away), r) in size.fixtures().zip(results) {
        let (h, a) = r.points();
        points[home] += u32::from(h);
        points[away] += u32::from(a);
    }
    Ok(points)
}

#[derive(Debug, Clone)]
pub struct BruteOptions {
    /// Permit sizes above [`BRUTE_MAX_TEAMS`].
    pub allow_large: bool,
    /// Encodings per work unit.
    pub chunk_size: u64,
    pub workers: usize,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions {
            allow_large: false,
            chunk_size: DEFAULT_CHUNK,
            workers: 1,
        }
    }
}

/// Tallies from one sweep over the outcome space.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepCounts {
    /// Outcomes where every team has the same points.
    pub tied: u128,
    /// Tied outcomes without a single draw.
    pub tied_draw_free: u128,
}

impl std::ops::AddAssign for SweepCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.tied += rhs.tied;
        self.tied_draw_free += rhs.tied_draw_free;
    }
}

fn check_ceiling(size: LeagueSize, allow_large: bool, what: &'static str) -> Result<()> {
    if size.teams() > BRUTE_HARD_MAX_TEAMS {
        return Err(Error::UnsupportedSize {
            what,
            teams: size.teams(),
            min: 2,
            max: BRUTE_HARD_MAX_TEAMS,
        });
    }
    if size.teams() > BRUTE_MAX_TEAMS && !allow_large {
        return Err(Error::SizeRefused {
            what,
            teams: size.teams(),
            reason: format!(
                "exhaustive enumeration is limited to {BRUTE_MAX_TEAMS} teams unless explicitly overridden"
            ),
        });
    }
    Ok(())
}

pub fn count_tied_bruteforce(size: LeagueSize, opts: &BruteOptions) -> Result<u128> {
    sweep(size, opts).map(|c| c.tied)
}

/// Enumerates all `3^M` outcomes, splitting the encoding range into chunks
/// shared among `opts.workers` threads.
pub fn sweep(size: LeagueSize, opts: &BruteOptions) -> Result<SweepCounts> {
    check_ceiling(size, opts.allow_large, "brute-force sweep")?;
    if opts.chunk_size == 0 {
        return Err(Error::invalid("chunk size must be positive"));
    }
    let space = outcome_space(size)?;
    let chunk = u128::from(opts.chunk_size);
    let chunks = space.div_ceil(chunk);
    let chunks = u64::try_from(chunks).map_err(|_| Error::Overflow("counting sweep chunks"))?;
    let fixtures: Vec<(usize, usize)> = size.fixtures().collect();
    let next = AtomicU64::new(0);
    let workers = opts.workers.max(1);

    let run = || {
        let mut local = SweepCounts::default();
        loop {
            let index = next.fetch_add(1, Ordering::Relaxed);
            if index >= chunks {
                break;
            }
            let start = u128::from(index) * chunk;
            let end = (start + chunk).min(space);
            local += sweep_range(&fixtures, size.teams(), start, end);
        }
        local
    };

    let mut total = SweepCounts::default();
    if workers == 1 {
        total = run();
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|_| scope.spawn(run)).collect();
            for h in handles {
                total += h.join().expect("sweep worker panicked");
            }
        });
    }
    Ok(total)
}

/// Walks encodings `start..end` with an incremental odometer.
fn sweep_range(fixtures: &[(usize, usize)], teams: usize, start: u128, end: u128) -> SweepCounts {
    let mut digits = [0u8; MAX_TEAMS * MAX_TEAMS];
    let digits = &mut digits[..fixtures.len()];
    let mut points = [0i32; MAX_TEAMS];
    let points = &mut points[..teams];
    let mut draws = 0usize;

    let mut rest = start;
    for (d, &(home, away)) in digits.iter_mut().zip(fixtures) {
        *d = (rest % 3) as u8;
        rest /= 3;
        let (h, a) = RESULT_POINTS[*d as usize];
        points[home] += h;
        points[away] += a;
        draws += usize::from(*d == 1);
    }

    let mut counts = SweepCounts::default();
    let mut current = start;
    while current < end {
        let first = points[0];
        if points[1..].iter().all(|&p| p == first) {
            counts.tied += 1;
            if draws == 0 {
                counts.tied_draw_free += 1;
            }
        }
        current += 1;
        // Odometer step: bump digit 0, carrying 2 -> 0 upward.
        for (d, &(home, away)) in digits.iter_mut().zip(fixtures) {
            let (oh, oa) = RESULT_POINTS[*d as usize];
            let was_draw = *d == 1;
            *d = if *d == 2 { 0 } else { *d + 1 };
            let (nh, na) = RESULT_POINTS[*d as usize];
            points[home] += nh - oh;
            points[away] += na - oa;
            draws = draws + usize::from(*d == 1) - usize::from(was_draw);
            if *d != 0 {
                break;
            }
        }
    }
    counts
}

const RESULT_POINTS: [(i32, i32); 3] = [(0, 3), (1, 1), (3, 0)];

/// Weighted count of pair-code assignments among teams 2..n that leave every
/// team on team 1's total, for one ordered profile. Opponent `k` starts from
/// the complement of `takes[k]`. Team-1 doubling and permutation factors are
/// not applied.
pub fn count_completions_bruteforce(
    profile: &Team1Profile,
    size: LeagueSize,
    allow_large: bool,
) -> Result<u128> {
    crate::profile::validate_takes(profile.takes(), size)?;
    check_ceiling(size, allow_large, "brute-force completion count")?;
    let target = profile.points() as i32;
    let m = size.opponents();
    let mut points = [0i32; MAX_TEAMS];
    for (p, &t) in points.iter_mut().zip(profile.takes()) {
        *p = i32::from(complement(t)?);
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .collect();
    if pairs.is_empty() {
        return Ok(u128::from(points[..m].iter().all(|&p| p == target)));
    }

    for &(a, b) in &pairs {
        points[a] += i32::from(PAIR_OUTCOMES[0].points_a);
        points[b] += i32::from(PAIR_OUTCOMES[0].points_b);
    }
    let mut codes = vec![0usize; pairs.len()];
    let mut doubled = 0u32;
    let mut by_exponent = vec![0u64; pairs.len() + 1];
    loop {
        if points[..m].iter().all(|&p| p == target) {
            by_exponent[doubled as usize] += 1;
        }
        let mut carried_out = true;
        for (c, &(a, b)) in codes.iter_mut().zip(&pairs) {
            let old = PAIR_OUTCOMES[*c];
            *c = (*c + 1) % 6;
            let new = PAIR_OUTCOMES[*c];
            points[a] += i32::from(new.points_a) - i32::from(old.points_a);
            points[b] += i32::from(new.points_b) - i32::from(old.points_b);
            doubled = doubled + u32::from(new.doubled()) - u32::from(old.doubled());
            if *c != 0 {
                carried_out = false;
                break;
            }
        }
        if carried_out {
            break;
        }
    }
    combine_by_exponent(&by_exponent)
}

/// `Σ count[k] · 2^k`, exactly.
pub(crate) fn combine_by_exponent(by_exponent: &[u64]) -> Result<u128> {
    by_exponent
        .iter()
        .enumerate()
        .try_fold(0u128, |acc, (k, &c)| {
            let term = u128::from(c).checked_mul(1u128.checked_shl(k as u32)?)?;
            acc.checked_add(term)
        })
        .ok_or(Error::Overflow("combining weighted completion counts"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(n: usize) -> LeagueSize {
        LeagueSize::new(n).unwrap()
    }

    fn ordered(takes: &[u8]) -> Team1Profile {
        Team1Profile::from_ordered(takes.to_vec(), size(takes.len() + 1)).unwrap()
    }

    #[test]
    fn decode_examples() {
        use MatchResult::*;
        assert_eq!(
            decode_outcome(Encoding(0), size(2)).unwrap(),
            vec![AwayWin, AwayWin]
        );
        assert_eq!(
            decode_outcome(Encoding(4), size(2)).unwrap(),
            vec![Draw, Draw]
        );
        for n in 2..=5 {
            let s = size(n);
            let repunit = (3u128.pow(s.matches() as u32) - 1) / 2;
            let all = decode_outcome(Encoding(repunit), s).unwrap();
            assert!(all.iter().all(|&r| r == Draw));
        }
        assert!(matches!(
            decode_outcome(Encoding(9), size(2)),
            Err(Error::EncodingOutOfRange { .. })
        ));
    }

    #[test]
    fn tally_examples() {
        use MatchResult::*;
        assert_eq!(tally_points(&[Draw, Draw], size(2)).unwrap(), vec![2, 2]);
        assert_eq!(
            tally_points(&[HomeWin, HomeWin], size(2)).unwrap(),
            vec![3, 3]
        );
        assert_eq!(tally_points(&[Draw; 6], size(3)).unwrap(), vec![4, 4, 4]);
        assert!(tally_points(&[Draw; 5], size(3)).is_err());
    }

    #[test]
    fn small_tied_counts() {
        let opts = BruteOptions::default();
        assert_eq!(count_tied_bruteforce(size(2), &opts).unwrap(), 3);
        assert_eq!(count_tied_bruteforce(size(3), &opts).unwrap(), 27);
        assert_eq!(count_tied_bruteforce(size(4), &opts).unwrap(), 1083);
    }

    #[test]
    fn chunking_and_workers_do_not_change_counts() {
        let base = sweep(size(4), &BruteOptions::default()).unwrap();
        for (chunk, workers) in [(1, 1), (7, 3), (1000, 4), (u64::MAX, 2)] {
            let opts = BruteOptions {
                allow_large: false,
                chunk_size: chunk.min(531_441),
                workers,
            };
            assert_eq!(sweep(size(4), &opts).unwrap(), base);
        }
        let bad = BruteOptions {
            chunk_size: 0,
            ..BruteOptions::default()
        };
        assert!(sweep(size(3), &bad).is_err());
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(
            count_tied_bruteforce(size(6), &BruteOptions::default()),
            Err(Error::SizeRefused { teams: 6, .. })
        ));
        assert!(matches!(
            count_completions_bruteforce(&ordered(&[3, 3, 3, 3, 3]), size(6), false),
            Err(Error::SizeRefused { .. })
        ));
    }

    #[test]
    fn completion_examples() {
        assert_eq!(
            count_completions_bruteforce(&ordered(&[4, 1]), size(3), false).unwrap(),
            2
        );
        assert_eq!(
            count_completions_bruteforce(&ordered(&[3, 2]), size(3), false).unwrap(),
            0
        );
        assert_eq!(
            count_completions_bruteforce(&ordered(&[3]), size(2), false).unwrap(),
            1
        );
        assert_eq!(
            count_completions_bruteforce(&ordered(&[2]), size(2), false).unwrap(),
            1
        );
        assert_eq!(
            count_completions_bruteforce(&ordered(&[6]), size(2), false).unwrap(),
            0
        );
    }

    #[test]
    fn combine_detects_overflow() {
        assert_eq!(combine_by_exponent(&[3, 1, 2]).unwrap(), 3 + 2 + 8);
        let mut big = vec![0u64; 128];
        big[127] = 2;
        assert!(matches!(combine_by_exponent(&big), Err(Error::Overflow(_))));
    }
}
