//! Run provenance. The manifest identifies the spec (by content hash), the
//! tool, the RNG algorithm, and the fate of every grid cell; its own hash
//! deliberately excludes the wall-clock timestamps so that reruns of the
//! same spec agree on it, and every other output file embeds that hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::time::{SystemTime, UNIX_EPOCH};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Skipped { reason: String },
    Failed { reason: String },
}

impl CellStatus {
    pub fn is_ok_or_skipped(&self) -> bool {
        !matches!(self, CellStatus::Failed { .. })
    }

    pub fn label(&self) -> String {
        match self {
            CellStatus::Ok => "ok".to_string(),
            CellStatus::Skipped { reason } => format!("skipped: {reason}"),
            CellStatus::Failed { reason } => format!("failed: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: String,
    #[serde(flatten)]
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec_sha256: String,
    pub tool_version: String,
    pub rng_algorithm: String,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub cells: Vec<CellRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn now_unix_s() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// The hashed view: everything except timestamps.
#[derive(Serialize)]
struct HashCore<'a> {
    spec_sha256: &'a str,
    tool_version: &'a str,
    rng_algorithm: &'a str,
    cells: &'a [CellRecord],
}

impl RunManifest {
    pub fn new(spec_raw: &[u8]) -> Self {
        RunManifest {
            spec_sha256: sha256_hex(spec_raw),
            tool_version: TOOL_VERSION.to_string(),
            rng_algorithm: gslab_core::rng::RNG_ALGORITHM.to_string(),
            started_unix_s: now_unix_s(),
            finished_unix_s: 0,
            cells: Vec::new(),
        }
    }

    pub fn finish(&mut self, cells: Vec<CellRecord>) {
        self.cells = cells;
        self.finished_unix_s = now_unix_s();
    }

    pub fn hash(&self) -> String {
        let core = HashCore {
            spec_sha256: &self.spec_sha256,
            tool_version: &self.tool_version,
            rng_algorithm: &self.rng_algorithm,
            cells: &self.cells,
        };
        sha256_hex(serde_json::to_string(&core).expect("manifest is serializable").as_bytes())
    }

    pub fn all_ok_or_skipped(&self) -> bool {
        self.cells.iter().all(|c| c.status.is_ok_or_skipped())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        let mut m = RunManifest::new(b"{\"kind\":\"bounds_sweep\"}");
        m.finish(vec![
            CellRecord {
                id: "a".into(),
                status: CellStatus::Ok,
            },
            CellRecord {
                id: "b".into(),
                status: CellStatus::Skipped {
                    reason: "cap".into(),
                },
            },
        ]);
        m
    }

    #[test]
    fn hash_ignores_timestamps() {
        let mut a = sample();
        let mut b = sample();
        a.started_unix_s = 1;
        a.finished_unix_s = 2;
        b.started_unix_s = 999;
        b.finished_unix_s = 1000;
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn hash_sees_cell_status() {
        let a = sample();
        let mut b = sample();
        b.cells[0].status = CellStatus::Failed {
            reason: "boom".into(),
        };
        assert_ne!(a.hash(), b.hash());
        assert!(a.all_ok_or_skipped());
        assert!(!b.all_ok_or_skipped());
    }

    #[test]
    fn status_serializes_flat() {
        let rec = CellRecord {
            id: "x".into(),
            status: CellStatus::Skipped {
                reason: "too big".into(),
            },
        };
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"id":"x","status":"skipped","reason":"too big"}"#);
        let back: CellRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn known_digest() {
        // sha256("abc"), the classic test vector
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
