//! Assembles the full tied-outcome count.
//!
//! The total is `1` (all draws) plus the Eulerian digraph count (no draws)
//! plus, for every search profile, `representation × doubling × completions`.
//! Search profiles are handed to a pool of worker threads; one aggregator
//! thread sums their results and writes the optional checkpoint ledger.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;
use std::time::Instant;

use crossbeam_channel::unbounded;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eulerian::eulerian_count;
use crate::ledger::{contribution, CheckpointLedger, LedgerEntry, LedgerHeader};
use crate::profile::{make_team_points, ProfileClass, Team1Profile};
use crate::report::{ClassStats, ResumeInfo, TiedCountReport};
use crate::scoring::LeagueSize;
use crate::search::{count_completions_with, feasible_first_rows, RowSplit, SearchOptions};

/// Largest league the optimized engine accepts.
pub const ENGINE_MAX_TEAMS: usize = 8;

/// When to cut a profile into slices of team 2's row codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPolicy {
    /// Split profiles with at least this many feasible team-2 rows.
    pub min_first_rows: u64,
    /// Leading row digits fixed per slice (`6^digits` slices).
    pub digits: u32,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy {
            min_first_rows: 64,
            digits: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub strict: bool,
    pub split: SplitPolicy,
    /// Stop after this many profiles have been recorded, leaving the rest
    /// for a later resume. Reported as [`Error::Interrupted`].
    pub stop_after: Option<usize>,
    /// Attempts per task before a panicking worker fails the run.
    pub max_attempts: u32,
    #[doc(hidden)]
    pub fail_once: Option<Vec<u8>>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            workers: 1,
            checkpoint: None,
            strict: false,
            split: SplitPolicy::default(),
            stop_after: None,
            max_attempts: 3,
            fail_once: None,
        }
    }
}

impl EngineOptions {
    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            strict: self.strict,
        }
    }

    /// Digest of the options a checkpoint must agree on. Worker count and
    /// splitting do not change per-profile counts and are left out.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(format!("tiedleague;strict={}", self.strict).as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Counts tied outcomes for `size` teams.
pub fn count_tied(size: LeagueSize, opts: &EngineOptions) -> Result<TiedCountReport> {
    let started = Instant::now();
    check_engine_size(size)?;
    let ledger = match &opts.checkpoint {
        Some(path) => Some(CheckpointLedger::open_or_create(
            path,
            LedgerHeader::new(size, opts.digest()),
        )?),
        None => None,
    };
    run(size, opts, ledger, started)
}

/// Continues the run recorded in the ledger at `path`. The league size comes
/// from the ledger header; `opts.checkpoint` is ignored.
pub fn resume(path: &Path, opts: &EngineOptions) -> Result<TiedCountReport> {
    let started = Instant::now();
    let ledger = CheckpointLedger::open(path)?;
    let size = LeagueSize::new(ledger.header().n)?;
    check_engine_size(size)?;
    ledger.check_header(&LedgerHeader::new(size, opts.digest()))?;
    run(size, opts, Some(ledger), started)
}

fn check_engine_size(size: LeagueSize) -> Result<()> {
    let n = size.teams();
    if n > ENGINE_MAX_TEAMS {
        return Err(Error::UnsupportedSize {
            what: "the optimized count",
            teams: n,
            min: 2,
            max: ENGINE_MAX_TEAMS,
        });
    }
    Ok(())
}

fn run(
    size: LeagueSize,
    opts: &EngineOptions,
    mut ledger: Option<CheckpointLedger>,
    started: Instant,
) -> Result<TiedCountReport> {
    let n = size.teams();
    if opts.workers == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }

    let mut breakdown: BTreeMap<ProfileClass, ClassStats> = ProfileClass::ALL
        .into_iter()
        .map(|c| (c, ClassStats::default()))
        .collect();
    let mut search_profiles = Vec::new();
    for profile in make_team_points(size) {
        let class = profile.classify(size);
        breakdown
            .get_mut(&class)
            .expect("all classes present")
            .profiles += 1;
        if class == ProfileClass::Search {
            search_profiles.push(profile);
        }
    }
    // Closed-form classes are added once here, never per profile.
    breakdown
        .get_mut(&ProfileClass::AllDrawSpecial)
        .unwrap()
        .contribution = 1;
    breakdown
        .get_mut(&ProfileClass::EulerianSpecial)
        .unwrap()
        .contribution = eulerian_count(n)?;

    let mut searched = 0u128;
    let mut resumed_from = None;
    let mut remaining = search_profiles.clone();
    if let Some(ledger) = &ledger {
        for entry in ledger.entries() {
            searched = searched
                .checked_add(entry.contribution)
                .ok_or(Error::Overflow("summing checkpointed contributions"))?;
        }
        remaining = ledger.remaining(search_profiles.iter().cloned());
        if !ledger.is_empty() || ledger.was_truncated() {
            resumed_from = Some(ResumeInfo {
                path: ledger.path().to_path_buf(),
                profiles: ledger.len(),
                truncated: ledger.was_truncated(),
            });
        }
    }

    let fresh = schedule(&remaining, size, opts, |result| {
        if let Some(ledger) = ledger.as_mut() {
            ledger.append(LedgerEntry::new(
                &result.profile,
                result.completions,
                result.worker,
            )?)?;
        }
        Ok(())
    })?;
    searched = searched
        .checked_add(fresh)
        .ok_or(Error::Overflow("summing search contributions"))?;
    breakdown
        .get_mut(&ProfileClass::Search)
        .unwrap()
        .contribution = searched;

    let total = breakdown
        .values()
        .try_fold(0u128, |acc, s| acc.checked_add(s.contribution))
        .ok_or(Error::Overflow("summing the class contributions"))?;

    Ok(TiedCountReport {
        teams: n,
        total,
        breakdown,
        searched_profiles: search_profiles.len(),
        elapsed: started.elapsed(),
        workers: opts.workers,
        resumed_from,
    })
}

/// A finished search profile.
#[derive(Debug, Clone)]
pub struct ProfileResult {
    pub profile: Team1Profile,
    pub completions: u128,
    pub contribution: u128,
    /// Worker that finished the last slice of the profile.
    pub worker: usize,
}

#[derive(Debug, Clone, Copy)]
struct Task {
    profile: usize,
    split: Option<RowSplit>,
}

enum TaskOutcome {
    Done(u128),
    Failed(Error),
    Panicked(String),
}

/// Runs the completion search for every profile on `opts.workers` threads
/// and returns the sum of their weighted contributions. `sink` sees each
/// profile once, on the calling thread, as soon as all of its slices are in.
pub fn schedule(
    profiles: &[Team1Profile],
    size: LeagueSize,
    opts: &EngineOptions,
    mut sink: impl FnMut(&ProfileResult) -> Result<()>,
) -> Result<u128> {
    if opts.workers == 0 {
        return Err(Error::invalid("worker count must be at least 1"));
    }
    if profiles.is_empty() {
        return Ok(0);
    }

    let tasks = plan_tasks(profiles, size, opts.split)?;
    let mut parts_left = vec![0usize; profiles.len()];
    for t in &tasks {
        parts_left[t.profile] += 1;
    }
    let mut partial = vec![0u128; profiles.len()];
    let mut attempts: BTreeMap<(usize, Option<RowSplit>), u32> = BTreeMap::new();
    let search_opts = opts.search_options();
    let cancel = AtomicBool::new(false);
    let fail_once = opts
        .fail_once
        .as_ref()
        .map(|takes| (takes.as_slice(), AtomicBool::new(false)));

    let (task_tx, task_rx) = unbounded::<Task>();
    let (result_tx, result_rx) = unbounded::<(Task, usize, TaskOutcome)>();
    for &t in &tasks {
        task_tx.send(t).expect("receiver alive");
    }

    thread::scope(|scope| {
        for worker in 0..opts.workers {
            let task_rx = task_rx.clone();
            let result_tx = result_tx.clone();
            let cancel = &cancel;
            let fail_once = &fail_once;
            scope.spawn(move || {
                while let Ok(task) = task_rx.recv() {
                    if cancel.load(Ordering::Relaxed) {
                        break;
                    }
                    let profile = &profiles[task.profile];
                    let run = catch_unwind(AssertUnwindSafe(|| {
                        if let Some((takes, fired)) = fail_once {
                            if *takes == profile.takes() && !fired.swap(true, Ordering::SeqCst) {
                                panic!("injected failure for profile {profile}");
                            }
                        }
                        count_completions_with(profile, size, search_opts, task.split)
                    }));
                    let outcome = match run {
                        Ok(Ok(count)) => TaskOutcome::Done(count),
                        Ok(Err(e)) => TaskOutcome::Failed(e),
                        Err(panic) => TaskOutcome::Panicked(panic_message(panic)),
                    };
                    if result_tx.send((task, worker, outcome)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(result_tx);

        let mut sum = 0u128;
        let mut profiles_done = 0usize;
        let mut task_tx = Some(task_tx);
        let stop = |cancel: &AtomicBool, task_tx: &mut Option<_>| {
            cancel.store(true, Ordering::Relaxed);
            task_tx.take();
        };

        while profiles_done < profiles.len() {
            let (task, worker, outcome) = result_rx.recv().expect("workers outlive pending tasks");
            let count = match outcome {
                TaskOutcome::Done(count) => count,
                TaskOutcome::Failed(e) => {
                    stop(&cancel, &mut task_tx);
                    return Err(e);
                }
                TaskOutcome::Panicked(message) => {
                    let tries = attempts.entry((task.profile, task.split)).or_insert(0);
                    *tries += 1;
                    if *tries >= opts.max_attempts {
                        let attempts = *tries;
                        stop(&cancel, &mut task_tx);
                        return Err(Error::WorkerFailed {
                            profile: profiles[task.profile].takes().to_vec(),
                            attempts,
                            message,
                        });
                    }
                    log::warn!(
                        "worker {worker} failed on {}: {message}; re-queued",
                        profiles[task.profile]
                    );
                    task_tx
                        .as_ref()
                        .expect("queue open while work remains")
                        .send(task)
                        .expect("workers alive");
                    continue;
                }
            };

            let i = task.profile;
            partial[i] = partial[i]
                .checked_add(count)
                .ok_or(Error::Overflow("summing profile slices"))?;
            parts_left[i] -= 1;
            if parts_left[i] > 0 {
                continue;
            }
            let profile = &profiles[i];
            let result = ProfileResult {
                profile: profile.clone(),
                completions: partial[i],
                contribution: contribution(
                    partial[i],
                    profile.representation_factor(),
                    profile.doubling_factor(),
                )?,
                worker,
            };
            if let Err(e) = sink(&result) {
                stop(&cancel, &mut task_tx);
                return Err(e);
            }
            sum = sum
                .checked_add(result.contribution)
                .ok_or(Error::Overflow("summing search contributions"))?;
            profiles_done += 1;

            if opts.stop_after.is_some_and(|k| profiles_done >= k) && profiles_done < profiles.len()
            {
                stop(&cancel, &mut task_tx);
                return Err(Error::Interrupted {
                    completed: profiles_done,
                    total: profiles.len(),
                });
            }
        }
        drop(task_tx);
        Ok(sum)
    })
}

/// One task per profile, or `6^digits` slices for profiles whose team-2 row
/// has many feasible settings. Costlier tasks are queued first.
fn plan_tasks(
    profiles: &[Team1Profile],
    size: LeagueSize,
    policy: SplitPolicy,
) -> Result<Vec<Task>> {
    let row_len = size.opponents().saturating_sub(1) as u32;
    let mut costed = Vec::with_capacity(profiles.len());
    for (i, p) in profiles.iter().enumerate() {
        costed.push((feasible_first_rows(p, size)?, i));
    }
    costed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut tasks = Vec::new();
    for (rows, i) in costed {
        if policy.digits > 0 && policy.digits <= row_len && rows >= policy.min_first_rows {
            tasks.extend(RowSplit::all(policy.digits).map(|split| Task {
                profile: i,
                split: Some(split),
            }));
        } else {
            tasks.push(Task {
                profile: i,
                split: None,
            });
        }
    }
    Ok(tasks)
}

fn panic_message(panic: Box<dyn std::any::Any + Send>) -> String {
    panic
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| panic.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "worker panicked".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::{count_tied_bruteforce, BruteOptions};

    fn size(n: usize) -> LeagueSize {
        LeagueSize::new(n).unwrap()
    }

    #[test]
    fn small_totals_and_decomposition() {
        let r = count_tied(size(2), &EngineOptions::default()).unwrap();
        assert_eq!(r.total, 3);
        assert_eq!(r.contribution(ProfileClass::AllDrawSpecial), 1);
        assert_eq!(r.contribution(ProfileClass::EulerianSpecial), 2);
        assert_eq!(r.contribution(ProfileClass::Search), 0);
        assert_eq!(r.searched_profiles, 0);

        let r = count_tied(size(3), &EngineOptions::default()).unwrap();
        assert_eq!(r.total, 27);
        assert_eq!(r.contribution(ProfileClass::EulerianSpecial), 10);
        assert_eq!(r.contribution(ProfileClass::Search), 16);
    }

    #[test]
    fn matches_brute_force() {
        for n in 2..=4 {
            let brute = count_tied_bruteforce(size(n), &BruteOptions::default()).unwrap();
            for strict in [false, true] {
                let opts = EngineOptions {
                    strict,
                    ..EngineOptions::default()
                };
                let r = count_tied(size(n), &opts).unwrap();
                assert_eq!(r.total, brute, "n = {n}, strict = {strict}");
                let sum: u128 = r.breakdown.values().map(|s| s.contribution).sum();
                assert_eq!(sum, r.total);
                for (class, stats) in &r.breakdown {
                    if class.is_pruned() {
                        assert_eq!(stats.contribution, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn size_and_worker_guards() {
        assert!(matches!(
            count_tied(size(9), &EngineOptions::default()),
            Err(Error::UnsupportedSize { teams: 9, .. })
        ));
        let opts = EngineOptions {
            workers: 0,
            ..EngineOptions::default()
        };
        assert!(count_tied(size(3), &opts).is_err());
        assert_eq!(
            schedule(&[], size(2), &EngineOptions::default(), |_| Ok(())).unwrap(),
            0
        );
    }

    #[test]
    fn split_and_workers_agree() {
        let base = count_tied(size(5), &EngineOptions::default())
            .unwrap()
            .total;
        for (workers, digits, min_first_rows) in [(1, 0, 0), (3, 1, 0), (4, 3, 1), (2, 2, u64::MAX)]
        {
            let opts = EngineOptions {
                workers,
                split: SplitPolicy {
                    digits,
                    min_first_rows,
                },
                ..EngineOptions::default()
            };
            assert_eq!(count_tied(size(5), &opts).unwrap().total, base);
        }
    }

    #[test]
    fn panicking_worker_is_requeued() {
        let target = make_team_points(size(5))
            .find(|p| p.classify(size(5)) == ProfileClass::Search)
            .unwrap();
        let opts = EngineOptions {
            workers: 2,
            fail_once: Some(target.takes().to_vec()),
            ..EngineOptions::default()
        };
        assert_eq!(count_tied(size(5), &opts).unwrap().total, 296_081);

        let opts = EngineOptions {
            max_attempts: 1,
            split: SplitPolicy {
                digits: 0,
                min_first_rows: 0,
            },
            ..opts
        };
        assert!(matches!(
            count_tied(size(5), &opts),
            Err(Error::WorkerFailed { .. })
        ));
    }

    #[test]
    fn digest_depends_on_strictness_only() {
        let a = EngineOptions::default();
        let b = EngineOptions {
            workers: 8,
            ..EngineOptions::default()
        };
        let c = EngineOptions {
            strict: true,
            ..EngineOptions::default()
        };
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
        assert_eq!(a.digest().len(), 16);
    }
}
