//! Count reports and their JSON form.
//!
//! Exact counts are written as decimal strings: totals from eight teams up do
//! not survive a round trip through a double.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::profile::ProfileClass;

/// Serde helper writing a `u128` as a decimal string.
pub mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let text = String::deserialize(d)?;
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(D::Error::custom(format!("not a decimal integer: {text:?}")));
        }
        text.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStats {
    pub profiles: usize,
    #[serde(with = "decimal")]
    pub contribution: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResumeInfo {
    pub path: PathBuf,
    /// Profiles whose counts were taken from the checkpoint.
    pub profiles: usize,
    /// A torn trailing record was dropped while loading.
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct TiedCountReport {
    pub teams: usize,
    pub total: u128,
    pub breakdown: BTreeMap<ProfileClass, ClassStats>,
    /// Profiles that required the completion search.
    pub searched_profiles: usize,
    pub elapsed: Duration,
    pub workers: usize,
    pub resumed_from: Option<ResumeInfo>,
}

impl TiedCountReport {
    pub fn contribution(&self, class: ProfileClass) -> u128 {
        self.breakdown.get(&class).map_or(0, |s| s.contribution)
    }

    pub fn to_json(&self, method: &str) -> JsonReport {
        JsonReport {
            n: self.teams,
            total: self.total,
            breakdown: Some(self.breakdown.clone()),
            searched_profiles: Some(self.searched_profiles),
            resumed_profiles: self.resumed_from.as_ref().map(|r| r.profiles),
            elapsed_ms: self.elapsed.as_millis() as u64,
            workers: self.workers,
            method: method.to_string(),
        }
    }
}

/// Stable JSON schema emitted by the command-line tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub n: usize,
    #[serde(with = "decimal")]
    pub total: u128,
    pub breakdown: Option<BTreeMap<ProfileClass, ClassStats>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub searched_profiles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resumed_profiles: Option<usize>,
    pub elapsed_ms: u64,
    pub workers: usize,
    pub method: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_totals_are_strings_and_lossless() {
        let report = JsonReport {
            n: 8,
            total: 3_439_079_361_325_736_243,
            breakdown: None,
            searched_profiles: None,
            resumed_profiles: None,
            elapsed_ms: 0,
            workers: 1,
            method: "optimized".into(),
        };
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains(r#""total":"3439079361325736243""#), "{text}");
        let back: JsonReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(serde_json::from_str::<JsonReport>(
            &text.replace("\"3439079361325736243\"", "\"-1\"")
        )
        .is_err());
    }
}
