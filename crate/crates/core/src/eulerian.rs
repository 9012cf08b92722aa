//! Labeled Eulerian digraph counts.
//!
//! A draw-free league where every team wins exactly `n - 1` of its games maps
//! to a digraph with an arc `A -> B` whenever `A` wins at home against `B`.
//! Each team's out-degree is its home wins and its in-degree is its home
//! losses, so the league is tied exactly when the digraph is Eulerian. Arcs in
//! both directions between two teams are allowed; loops are not.

use crate::error::{Error, Result};

/// Largest size the exhaustive counter accepts (`2^20` arc subsets).
pub const BRUTE_EULERIAN_MAX: usize = 5;

/// Number of labeled Eulerian digraphs on `n` nodes for `n = 2..=9`
/// (OEIS A007080). Values up to five nodes are rechecked by
/// [`eulerian_count_bruteforce`] in the test suite.
pub const EULERIAN_TABLE: [(usize, u128); 8] = [
    (2, 2),
    (3, 10),
    (4, 152),
    (5, 7_736),
    (6, 1_375_952),
    (7, 877_901_648),
    (8, 2_046_320_373_120),
    (9, 17_658_221_702_361_472),
];

pub fn eulerian_count(n: usize) -> Result<u128> {
    EULERIAN_TABLE
        .iter()
        .find(|&&(k, _)| k == n)
        .map(|&(_, v)| v)
        .ok_or(Error::UnsupportedSize {
            what: "the Eulerian digraph table",
            teams: n,
            min: EULERIAN_TABLE[0].0,
            max: EULERIAN_TABLE[EULERIAN_TABLE.len() - 1].0,
        })
}

/// Counts Eulerian digraphs by checking all `2^(n(n-1))` arc subsets.
pub fn eulerian_count_bruteforce(n: usize) -> Result<u128> {
    if !(2..=BRUTE_EULERIAN_MAX).contains(&n) {
        return Err(if n > BRUTE_EULERIAN_MAX {
            Error::SizeRefused {
                what: "exhaustive Eulerian digraph count",
                teams: n,
                reason: format!(
                    "2^{} arc subsets is beyond the verifier's budget",
                    n * (n - 1)
                ),
            }
        } else {
            Error::UnsupportedSize {
                what: "exhaustive Eulerian digraph count",
                teams: n,
                min: 2,
                max: BRUTE_EULERIAN_MAX,
            }
        });
    }
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let mut count = 0u128;
    for mask in 0u32..(1 << arcs.len()) {
        let mut balance = [0i32; BRUTE_EULERIAN_MAX];
        for (bit, &(u, v)) in arcs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                balance[u] += 1;
                balance[v] -= 1;
            }
        }
        if balance.iter().all(|&b| b == 0) {
            count += 1;
        }
    }
    Ok(count)
}
