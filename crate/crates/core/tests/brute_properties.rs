use proptest::prelude::*;
use tiedleague_core::brute::{
    decode_outcome, encode_outcome, sweep, tally_points, BruteOptions, Encoding,
};
use tiedleague_core::eulerian_count_bruteforce;
use tiedleague_core::scoring::{LeagueSize, MatchResult};

fn size(n: usize) -> LeagueSize {
    LeagueSize::new(n).unwrap()
}

fn encoding(n: usize) -> impl Strategy<Value = (usize, u128)> {
    let space = 3u128.pow(size(n).matches() as u32);
    (0..space).prop_map(move |e| (n, e))
}

proptest! {
    #[test]
    fn decode_round_trips((n, e) in (2usize..=6).prop_flat_map(encoding)) {
        let results = decode_outcome(Encoding(e), size(n)).unwrap();
        prop_assert_eq!(encode_outcome(&results), Encoding(e));
    }

    #[test]
    fn points_are_conserved((n, e) in (2usize..=6).prop_flat_map(encoding)) {
        let s = size(n);
        let results = decode_outcome(Encoding(e), s).unwrap();
        let total: u32 = tally_points(&results, s).unwrap().iter().sum();
        let decisive = results.iter().filter(|&&r| r != MatchResult::Draw).count() as u32;
        prop_assert_eq!(total, 2 * s.matches() as u32 + decisive);
    }
}

/// Swapping home and away in every match maps tied outcomes onto tied
/// outcomes, so a sweep that decodes "flipped" counts the same.
#[test]
fn home_away_flip_preserves_tied_count() {
    for n in 2..=3 {
        let s = size(n);
        let space = 3u128.pow(s.matches() as u32);
        let (mut plain, mut flipped) = (0u32, 0u32);
        for e in 0..space {
            let results = decode_outcome(Encoding(e), s).unwrap();
            let points = tally_points(&results, s).unwrap();
            plain += u32::from(points.iter().all(|&p| p == points[0]));
            let flip: Vec<_> = results.iter().map(|r| r.flipped()).collect();
            let points = tally_points(&flip, s).unwrap();
            flipped += u32::from(points.iter().all(|&p| p == points[0]));
        }
        assert_eq!(plain, flipped);
    }
}

#[test]
fn draw_free_tied_outcomes_are_eulerian_digraphs() {
    for n in 2..=4 {
        let counts = sweep(size(n), &BruteOptions::default()).unwrap();
        assert_eq!(
            counts.tied_draw_free,
            eulerian_count_bruteforce(n).unwrap(),
            "n = {n}"
        );
    }
}
