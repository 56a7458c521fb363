//! Flat output records, their line/CSV encodings, and the run manifest.
//!
//! Line output is one JSON object per line with keys in declaration order.
//! Every record type parses back from both encodings.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::form::join_coeffs;
use crate::identity::{DiffEntry, GridCell, SetReport};
use crate::lab::{ConjectureReport, MultiplesOutcome, NodePropOutcome, PrefixResult, Verdict};
use crate::tree::TreeReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Lines,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(Format::Lines),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?}, expected lines or csv"))),
        }
    }
}

pub fn write_records<T: Serialize, W: Write>(mut w: W, records: &[T], format: Format) -> Result<()> {
    match format {
        Format::Lines => {
            for r in records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut cw = csv::Writer::from_writer(&mut w);
            for r in records {
                cw.serialize(r).map_err(csv_err)?;
            }
            cw.flush()?;
        }
    }
    Ok(())
}

pub fn read_records<T: DeserializeOwned, R: BufRead>(r: R, format: Format) -> Result<Vec<T>> {
    match format {
        Format::Lines => r
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| Ok(serde_json::from_str(&l?)?))
            .collect(),
        Format::Csv => csv::Reader::from_reader(r)
            .deserialize()
            .map(|rec| rec.map_err(csv_err))
            .collect(),
    }
}

pub fn encode<T: Serialize>(records: &[T], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_records(&mut buf, records, format)?;
    Ok(buf)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn join_map(m: &BTreeMap<usize, u64>) -> String {
    m.iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

// ---------------------------------------------------------------------------
// records

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub m: u32,
    pub x: i64,
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub m: u32,
    pub bound: u64,
    pub value: u64,
    /// Index of smallest absolute value producing `value`.
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruantRecord {
    pub m: u32,
    pub coeffs: String,
    pub bound: u64,
    pub truant: Option<u64>,
    pub b_universal: bool,
    pub represented: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub m: u32,
    pub bound: u64,
    pub gamma_b: u64,
    pub min_leaf_rank: Option<usize>,
    pub max_leaf_rank: Option<usize>,
    /// `rank:count` pairs joined by `;`.
    pub leaf_counts: String,
    pub node_count: u64,
    pub leaf_count: u64,
    pub truncated: bool,
    pub c_const: u64,
    pub key_violations: u64,
}

impl From<&TreeReport> for TreeRecord {
    fn from(r: &TreeReport) -> Self {
        TreeRecord {
            m: r.m,
            bound: r.bound,
            gamma_b: r.gamma_b,
            min_leaf_rank: r.min_leaf_rank,
            max_leaf_rank: r.max_leaf_rank,
            leaf_counts: join_map(&r.leaf_count_by_rank),
            node_count: r.node_count,
            leaf_count: r.leaf_count,
            truncated: r.truncated,
            c_const: r.c_const,
            key_violations: r.key_violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizeRecord {
    pub step: u32,
    pub bound: u64,
    pub gamma_b: u64,
    pub min_leaf_rank: Option<usize>,
    pub max_leaf_rank: Option<usize>,
    pub leaf_counts: String,
    pub node_count: u64,
    pub truncated: bool,
    /// Same shape as the previous step.
    pub agrees: bool,
}

impl StabilizeRecord {
    pub fn from_history(history: &[TreeReport]) -> Vec<Self> {
        history
            .iter()
            .enumerate()
            .map(|(i, r)| StabilizeRecord {
                step: i as u32,
                bound: r.bound,
                gamma_b: r.gamma_b,
                min_leaf_rank: r.min_leaf_rank,
                max_leaf_rank: r.max_leaf_rank,
                leaf_counts: join_map(&r.leaf_count_by_rank),
                node_count: r.node_count,
                truncated: r.truncated,
                agrees: i > 0 && history[i - 1].same_shape(r),
            })
            .collect()
    }
}

/// One tree node in visit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeLine {
    pub m: u32,
    pub coeffs: String,
    pub rank: usize,
    pub truant: Option<u64>,
    pub leaf: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCount {
    pub m: u32,
    pub rank: usize,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafRecord {
    pub m: u32,
    pub rank: usize,
    pub coeffs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub set: String,
    pub label: String,
    pub passed: bool,
    pub lhs_u: i64,
    pub lhs_v: i64,
    pub target_u: i64,
    pub target_v: i64,
}

impl IdentityRecord {
    pub fn from_sets(sets: &[SetReport]) -> Vec<Self> {
        let mut out = Vec::new();
        for s in sets {
            for c in &s.checks {
                out.push(IdentityRecord {
                    set: s.id.clone(),
                    label: c.label.clone(),
                    passed: c.passed,
                    lhs_u: c.lhs.u,
                    lhs_v: c.lhs.v,
                    target_u: c.target.u,
                    target_v: c.target.v,
                });
            }
            if let Some(r) = &s.residue {
                out.push(IdentityRecord {
                    set: s.id.clone(),
                    label: format!(
                        "{}: complete residues mod {} [{}]",
                        s.id,
                        r.modulus,
                        r.residues.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
                    ),
                    passed: r.complete,
                    lhs_u: 0,
                    lhs_v: 0,
                    target_u: 0,
                    target_v: 0,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRecord {
    pub a: i64,
    pub r: i64,
    pub class: String,
    pub class_without_zero: String,
}

impl From<&GridCell> for GridRecord {
    fn from(c: &GridCell) -> Self {
        GridRecord {
            a: c.a,
            r: c.r,
            class: c.class.to_string(),
            class_without_zero: c.class_without_zero.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffRecord {
    pub key: String,
    pub token: String,
    pub computed: Option<String>,
    pub computed_without_zero: Option<String>,
    pub documented: bool,
    pub reason: Option<String>,
}

impl From<&DiffEntry> for DiffRecord {
    fn from(e: &DiffEntry) -> Self {
        DiffRecord {
            key: e.key(),
            token: e.token.clone(),
            computed: e.computed.map(|c| c.to_string()),
            computed_without_zero: e.computed_without_zero.map(|c| c.to_string()),
            documented: e.allowlisted.is_some(),
            reason: e.allowlisted.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub claim: String,
    pub m: u32,
    pub bound: u64,
    pub verdict: String,
    pub observed: Option<String>,
    pub predicted: Option<String>,
    pub reason: Option<String>,
    /// Per-form observations and notes joined by `; `.
    pub detail: String,
}

fn verdict_parts(v: &Verdict) -> (String, Option<String>, Option<String>, Option<String>) {
    match v {
        Verdict::Matches => ("matches".into(), None, None, None),
        Verdict::Differs { observed, predicted } => (
            "differs".into(),
            Some(observed.clone()),
            Some(predicted.clone()),
            None,
        ),
        Verdict::Untested { reason } => ("untested".into(), None, None, Some(reason.clone())),
    }
}

impl VerdictRecord {
    pub fn from_report(r: &ConjectureReport) -> Vec<Self> {
        r.per_m
            .iter()
            .map(|v| {
                let (verdict, observed, predicted, reason) = verdict_parts(&v.verdict);
                let mut detail: Vec<String> = v
                    .forms
                    .iter()
                    .map(|f| {
                        format!(
                            "[{}] {}{}",
                            join_coeffs(&f.coeffs),
                            f.truant.map_or("B-universal".into(), |t| format!("truant {t}")),
                            if f.ok { "" } else { " (mismatch)" }
                        )
                    })
                    .collect();
                detail.extend(v.notes.iter().cloned());
                VerdictRecord {
                    claim: r.claim_id.clone(),
                    m: v.m,
                    bound: r.bound,
                    verdict,
                    observed,
                    predicted,
                    reason,
                    detail: detail.join("; "),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplesRecord {
    pub a: u64,
    pub m: u32,
    pub count: u64,
    pub passed: bool,
    pub missed: String,
}

impl From<&MultiplesOutcome> for MultiplesRecord {
    fn from(o: &MultiplesOutcome) -> Self {
        MultiplesRecord {
            a: o.a,
            m: o.m,
            count: o.count,
            passed: o.passed,
            missed: join_coeffs(&o.missed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePropRecord {
    pub m: u32,
    pub bound: u64,
    pub visited: u64,
    pub checked: u64,
    pub truncated: bool,
    pub passed: bool,
    /// Offending coefficient tuples joined by `;`.
    pub violations: String,
}

impl From<&NodePropOutcome> for NodePropRecord {
    fn from(o: &NodePropOutcome) -> Self {
        NodePropRecord {
            m: o.m,
            bound: o.bound,
            visited: o.visited,
            checked: o.checked,
            truncated: o.truncated,
            passed: o.passed,
            violations: o
                .violations
                .iter()
                .map(|c| join_coeffs(c))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixRecord {
    pub m: u32,
    pub bound: u64,
    pub a: u64,
    pub prefix: String,
    pub excluded: bool,
    pub min_n: Option<u64>,
    pub eq_n: Option<u64>,
    pub verdict: String,
    pub observed: Option<String>,
    pub predicted: Option<String>,
}

impl PrefixRecord {
    pub fn new(m: u32, bound: u64, r: &PrefixResult) -> Self {
        let (verdict, observed, predicted, _) = verdict_parts(&r.verdict);
        PrefixRecord {
            m,
            bound,
            a: r.a,
            prefix: join_coeffs(&r.prefix),
            excluded: r.excluded,
            min_n: r.min_n,
            eq_n: r.eq_n,
            verdict,
            observed,
            predicted,
        }
    }
}

// ---------------------------------------------------------------------------
// manifest

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub artifact_version: String,
    /// SHA-256 over the command and config.
    pub input_hash: String,
    /// SHA-256 over the report payload bytes.
    pub payload_hash: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

pub fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>, started_unix_ms: u64) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &config {
            h.update(b"\0");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        RunManifest {
            command: command.to_string(),
            config,
            artifact_version: ARTIFACT_VERSION.to_string(),
            input_hash: hex::encode(h.finalize()),
            payload_hash: String::new(),
            started_unix_ms,
            finished_unix_ms: started_unix_ms,
            outputs: Vec::new(),
            exit_code: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn roundtrip<T>(records: Vec<T>)
    where
        T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug,
    {
        for fmt in [Format::Lines, Format::Csv] {
            let bytes = encode(&records, fmt).unwrap();
            let back: Vec<T> = read_records(Cursor::new(bytes), fmt).unwrap();
            assert_eq!(back, records, "{fmt:?}");
        }
    }

    #[test]
    fn records_roundtrip() {
        roundtrip(vec![EvalRecord { m: 7, x: -3, value: 27 }]);
        roundtrip(vec![
            TruantRecord {
                m: 35,
                coeffs: "1,2,4,8,16".into(),
                bound: 100,
                truant: Some(33),
                b_universal: false,
                represented: 80,
            },
            TruantRecord {
                m: 3,
                coeffs: "1,1,1".into(),
                bound: 50,
                truant: None,
                b_universal: true,
                represented: 51,
            },
        ]);
        roundtrip(vec![DiffRecord {
            key: "malformed:pos:(16.3)".into(),
            token: "(16.3)".into(),
            computed: None,
            computed_without_zero: None,
            documented: true,
            reason: Some("comma, quoted; fine".into()),
        }]);
        roundtrip(vec![VerdictRecord {
            claim: "pow2".into(),
            m: 32,
            bound: 1000,
            verdict: "differs".into(),
            observed: Some("[1,2,4,8,15] truant 45".into()),
            predicted: Some("[1,2,4,8,15] truant 60".into()),
            reason: None,
            detail: "n=5 s=0".into(),
        }]);
    }

    #[test]
    fn line_keys_follow_declaration_order() {
        let line = String::from_utf8(encode(&[EvalRecord { m: 3, x: 2, value: 3 }], Format::Lines).unwrap())
            .unwrap();
        assert_eq!(line, "{\"m\":3,\"x\":2,\"value\":3}\n");
    }

    #[test]
    fn manifest_hash_ignores_time() {
        let cfg: BTreeMap<String, String> = [("m".to_string(), "3".to_string())].into();
        let a = RunManifest::new("tree", cfg.clone(), 1);
        let b = RunManifest::new("tree", cfg, 2);
        assert_eq!(a.input_hash, b.input_hash);
        assert_ne!(a.input_hash, RunManifest::new("census", BTreeMap::new(), 1).input_hash);
    }
}
