use std::fs::OpenOptions;
use std::io::Write;

use tiedleague_core::engine::{count_tied, resume, EngineOptions};
use tiedleague_core::ledger::CheckpointLedger;
use tiedleague_core::{Error, LeagueSize};

fn size(n: usize) -> LeagueSize {
    LeagueSize::new(n).unwrap()
}

fn with_checkpoint(path: &std::path::Path) -> EngineOptions {
    EngineOptions {
        checkpoint: Some(path.to_path_buf()),
        ..EngineOptions::default()
    }
}

#[test]
fn interrupted_run_resumes_to_the_same_total() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n6.jsonl");
    let searched = count_tied(size(6), &EngineOptions::default())
        .unwrap()
        .searched_profiles;

    let half = EngineOptions {
        stop_after: Some(searched / 2),
        workers: 2,
        ..with_checkpoint(&path)
    };
    match count_tied(size(6), &half) {
        Err(Error::Interrupted { completed, total }) => {
            assert_eq!(completed, searched / 2);
            assert_eq!(total, searched);
        }
        other => panic!("expected interruption, got {other:?}"),
    }
    assert_eq!(CheckpointLedger::open(&path).unwrap().len(), searched / 2);

    let report = resume(
        &path,
        &EngineOptions {
            workers: 3,
            ..EngineOptions::default()
        },
    )
    .unwrap();
    assert_eq!(report.total, 696_779_523);
    assert_eq!(report.resumed_from.as_ref().unwrap().profiles, searched / 2);
    assert_eq!(CheckpointLedger::open(&path).unwrap().len(), searched);

    // A complete ledger leaves nothing to search.
    let again = resume(&path, &EngineOptions::default()).unwrap();
    assert_eq!(again.total, 696_779_523);
    assert_eq!(again.resumed_from.unwrap().profiles, searched);
}

#[test]
fn mismatched_ledger_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n5.jsonl");
    count_tied(size(5), &with_checkpoint(&path)).unwrap();
    assert!(matches!(
        count_tied(size(6), &with_checkpoint(&path)),
        Err(Error::StaleCheckpoint { .. })
    ));
    let strict = EngineOptions {
        strict: true,
        ..with_checkpoint(&path)
    };
    assert!(matches!(
        count_tied(size(5), &strict),
        Err(Error::StaleCheckpoint { .. })
    ));
    assert!(matches!(
        resume(
            &path,
            &EngineOptions {
                strict: true,
                ..EngineOptions::default()
            }
        ),
        Err(Error::StaleCheckpoint { .. })
    ));
}

#[test]
fn torn_record_is_dropped_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n5.jsonl");
    let opts = EngineOptions {
        stop_after: Some(5),
        ..with_checkpoint(&path)
    };
    assert!(matches!(
        count_tied(size(5), &opts),
        Err(Error::Interrupted { .. })
    ));
    let mut f = OpenOptions::new().append(true).open(&path).unwrap();
    write!(f, "{{\"takes\":[4,3,").unwrap();
    drop(f);

    let report = resume(&path, &EngineOptions::default()).unwrap();
    assert_eq!(report.total, 296_081);
    let info = report.resumed_from.unwrap();
    assert!(info.truncated);
    assert_eq!(info.profiles, 5);
}

#[test]
fn unwritable_checkpoint_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing-dir").join("ledger.jsonl");
    assert!(matches!(
        count_tied(size(4), &with_checkpoint(&path)),
        Err(Error::Io { .. })
    ));
}
