//! Append-only checkpoint file for long counting runs.
//!
//! The first line is a JSON header naming the league size, engine version and
//! a digest of the options that shape the search. Every following line is one
//! completed search profile with its exact completion count. A process killed
//! mid-write leaves at most one torn trailing line, which is dropped (with a
//! warning) the next time the ledger is opened.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{ProfileClass, Team1Profile};
use crate::report::decimal;
use crate::scoring::LeagueSize;

pub const LEDGER_FORMAT: &str = "tiedleague-checkpoint/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerHeader {
    pub format: String,
    pub n: usize,
    pub engine_version: String,
    pub options_digest: String,
}

impl LedgerHeader {
    pub fn new(size: LeagueSize, options_digest: String) -> Self {
        LedgerHeader {
            format: LEDGER_FORMAT.to_string(),
            n: size.teams(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            options_digest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub takes: Vec<u8>,
    #[serde(with = "decimal")]
    pub completions: u128,
    pub representation: u64,
    pub doubling: u64,
    #[serde(with = "decimal")]
    pub contribution: u128,
    pub worker: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl LedgerEntry {
    pub fn new(profile: &Team1Profile, completions: u128, worker: usize) -> Result<Self> {
        let representation = profile.representation_factor();
        let doubling = profile.doubling_factor();
        Ok(LedgerEntry {
            takes: profile.takes().to_vec(),
            completions,
            representation,
            doubling,
            contribution: contribution(completions, representation, doubling)?,
            worker,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        })
    }
}

/// `completions × representation × doubling`, exactly.
pub fn contribution(completions: u128, representation: u64, doubling: u64) -> Result<u128> {
    completions
        .checked_mul(u128::from(representation))
        .and_then(|v| v.checked_mul(u128::from(doubling)))
        .ok_or(Error::Overflow("weighting a profile's completion count"))
}

#[derive(Debug)]
pub struct CheckpointLedger {
    path: PathBuf,
    file: File,
    header: LedgerHeader,
    entries: BTreeMap<Vec<u8>, LedgerEntry>,
    truncated: bool,
}

impl CheckpointLedger {
    /// Starts a new ledger, replacing whatever is at `path`.
    pub fn create(path: &Path, header: LedgerHeader) -> Result<Self> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = File::create(path).map_err(io)?;
        let line = serde_json::to_string(&header).expect("header serializes");
        writeln!(file, "{line}").map_err(io)?;
        file.sync_data().map_err(io)?;
        Ok(CheckpointLedger {
            path: path.to_path_buf(),
            file,
            header,
            entries: BTreeMap::new(),
            truncated: false,
        })
    }

    /// Loads an existing ledger, validating every record against its header.
    pub fn open(path: &Path) -> Result<Self> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let corrupt = |message: String| Error::Checkpoint {
            path: path.to_path_buf(),
            message,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;

        // (start offset, line) for each line; a missing final newline marks a torn write.
        let mut lines = Vec::new();
        let mut start = 0;
        while start < bytes.len() {
            let end = bytes[start..].iter().position(|&b| b == b'\n');
            let (line, next, complete) = match end {
                Some(e) => (&bytes[start..start + e], start + e + 1, true),
                None => (&bytes[start..], bytes.len(), false),
            };
            lines.push((start, line, complete));
            start = next;
        }

        let (_, header_line, header_complete) = lines
            .first()
            .copied()
            .ok_or_else(|| corrupt("empty ledger, no header".into()))?;
        let header: LedgerHeader = serde_json::from_slice(header_line)
            .ok()
            .filter(|_| header_complete)
            .ok_or_else(|| corrupt("unreadable header line".into()))?;
        if header.format != LEDGER_FORMAT {
            return Err(corrupt(format!(
                "unknown ledger format {:?}",
                header.format
            )));
        }
        let size = LeagueSize::new(header.n).map_err(|e| corrupt(e.to_string()))?;

        let mut entries = BTreeMap::new();
        let mut truncated = false;
        let records = &lines[1..];
        for (index, &(offset, line, complete)) in records.iter().enumerate() {
            let parsed = serde_json::from_slice::<LedgerEntry>(line)
                .ok()
                .filter(|_| complete);
            let entry = match parsed {
                Some(entry) => entry,
                None if index + 1 == records.len() => {
                    log::warn!(
                        "checkpoint {}: dropping torn trailing record at byte {offset}",
                        path.display()
                    );
                    file.set_len(offset as u64).map_err(io)?;
                    file.sync_data().map_err(io)?;
                    truncated = true;
                    break;
                }
                None => {
                    return Err(corrupt(format!("unreadable record on line {}", index + 2)));
                }
            };
            validate_entry(&entry, size)
                .map_err(|m| corrupt(format!("line {}: {m}", index + 2)))?;
            if entries.insert(entry.takes.clone(), entry).is_some() {
                return Err(corrupt(format!(
                    "line {}: duplicate profile record",
                    index + 2
                )));
            }
        }

        Ok(CheckpointLedger {
            path: path.to_path_buf(),
            file,
            header,
            entries,
            truncated,
        })
    }

    /// Opens the ledger at `path` if it has content, otherwise creates it.
    /// An existing ledger must carry exactly `expected` as its header.
    pub fn open_or_create(path: &Path, expected: LedgerHeader) -> Result<Self> {
        let has_content = std::fs::metadata(path)
            .map(|m| m.len() > 0)
            .unwrap_or(false);
        if !has_content {
            return Self::create(path, expected);
        }
        let ledger = Self::open(path)?;
        ledger.check_header(&expected)?;
        Ok(ledger)
    }

    pub fn check_header(&self, expected: &LedgerHeader) -> Result<()> {
        let found = &self.header;
        let mismatch = if found.n != expected.n {
            Some(format!(
                "ledger is for {} teams, run is for {}",
                found.n, expected.n
            ))
        } else if found.options_digest != expected.options_digest {
            Some(format!(
                "options digest {} does not match {}",
                found.options_digest, expected.options_digest
            ))
        } else if found.engine_version != expected.engine_version {
            Some(format!(
                "written by engine {}, this is {}",
                found.engine_version, expected.engine_version
            ))
        } else {
            None
        };
        match mismatch {
            Some(message) => Err(Error::StaleCheckpoint {
                path: self.path.clone(),
                message,
            }),
            None => Ok(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn header(&self) -> &LedgerHeader {
        &self.header
    }

    pub fn entries(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, profile: &Team1Profile) -> bool {
        self.entries.contains_key(profile.takes())
    }

    pub fn was_truncated(&self) -> bool {
        self.truncated
    }

    /// Appends one record and syncs it to disk.
    pub fn append(&mut self, entry: LedgerEntry) -> Result<()> {
        if self.entries.contains_key(&entry.takes) {
            return Err(Error::Checkpoint {
                path: self.path.clone(),
                message: format!("profile {:?} already recorded", entry.takes),
            });
        }
        let line = serde_json::to_string(&entry).expect("entry serializes");
        let io = |source| Error::Io {
            path: self.path.clone(),
            source,
        };
        writeln!(self.file, "{line}").map_err(io)?;
        self.file.sync_data().map_err(io)?;
        self.entries.insert(entry.takes.clone(), entry);
        Ok(())
    }

    /// Search profiles of this ledger's league that have no record yet.
    pub fn remaining(&self, profiles: impl IntoIterator<Item = Team1Profile>) -> Vec<Team1Profile> {
        profiles.into_iter().filter(|p| !self.contains(p)).collect()
    }
}

fn validate_entry(entry: &LedgerEntry, size: LeagueSize) -> std::result::Result<(), String> {
    let profile = Team1Profile::new(entry.takes.clone(), size).map_err(|e| e.to_string())?;
    if profile.classify(size) != ProfileClass::Search {
        return Err(format!("profile {profile} is not a search profile"));
    }
    if entry.representation != profile.representation_factor()
        || entry.doubling != profile.doubling_factor()
    {
        return Err(format!("factors recorded for {profile} are wrong"));
    }
    match contribution(entry.completions, entry.representation, entry.doubling) {
        Ok(c) if c == entry.contribution => Ok(()),
        _ => Err(format!(
            "contribution recorded for {profile} is inconsistent"
        )),
    }
}
