//! Regression corpus: formulas with expected verdicts.
//!
//! Each entry names a formula and either a frame (decided, or refuted up to
//! `max_size` when given) or a frame class (searched with `class_refute`).
//! Every countermodel found is re-verified before the entry can pass.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{decide_validity, refute, verify_certificate, DecideOptions, SearchOptions, Status, Verdict};
use crate::frameclass::{check_predicates, class_refute, FrameClassSpec};
use crate::json::{frame_from_doc, FrameDoc, SCHEMA};
use crate::semantics::{DomainMode, EqualityMode, Modes};
use crate::syntax::parse_formula;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub formula: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_worlds: Option<usize>,
    pub domains: DomainMode,
    pub equality: EqualityMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    pub expect: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub entries: Vec<CorpusEntry>,
}

fn default_schema() -> u32 {
    SCHEMA
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed corpus: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("entry `{name}`: {detail}")]
    Entry { name: String, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub expected: Status,
    /// `None` when the entry could not be run.
    pub got: Option<Status>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub schema: u32,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<EntryResult>,
    pub results: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let corpus: Corpus = serde_json::from_str(text)?;
    for e in &corpus.entries {
        let bad = |detail: &str| CorpusError::Entry { name: e.name.clone(), detail: detail.to_string() };
        match (&e.frame, &e.class) {
            (Some(_), Some(_)) => return Err(bad("give either `frame` or `class`, not both")),
            (None, None) => return Err(bad("needs a `frame` or a `class`")),
            (None, Some(_)) if e.max_worlds.is_none() => return Err(bad("class entries need `max_worlds`")),
            _ => {}
        }
    }
    Ok(corpus)
}

fn run_entry(e: &CorpusEntry, search: &SearchOptions) -> Result<(Status, Option<String>), String> {
    let f = parse_formula(&e.formula, e.n).map_err(|err| err.to_string())?;
    let modes = Modes::new(e.domains, e.equality);
    if let Some(doc) = &e.frame {
        let frame = frame_from_doc(doc).map_err(|err| err.to_string())?;
        if frame.n() != e.n {
            return Err(format!("frame has {} relations, entry says {}", frame.n(), e.n));
        }
        let v: Verdict = match e.max_size {
            Some(s) => refute(&frame, &f, modes, s, search),
            None => {
                let opts = DecideOptions { bound: e.bound, uncertified: false, search: search.clone() };
                decide_validity(&frame, &f, modes, &opts)
            }
        }
        .map_err(|err| err.to_string())?;
        if v.status == Status::Countermodel && !verify_certificate(&v, &frame, &f, modes).unwrap_or(false) {
            return Err("certificate failed verification".into());
        }
        let note = v.budget_exhausted.map(|b| format!("budget of {b} exhausted"));
        return Ok((v.status, note));
    }
    let class = e.class.as_deref().unwrap_or("all");
    let spec = FrameClassSpec::parse(class, e.n).map_err(|err| err.to_string())?;
    let v = class_refute(&spec, &f, modes, e.max_worlds.unwrap_or(1), e.max_size.unwrap_or(2), search)
        .map_err(|err| err.to_string())?;
    if let (Some(frame), Some(cert)) = (&v.frame, &v.certificate) {
        let wrapped = Verdict {
            status: Status::Countermodel,
            bound_used: v.max_size,
            certified: false,
            certificate: Some(cert.clone()),
            budget_exhausted: None,
            models_examined: v.models_examined,
        };
        let sound = verify_certificate(&wrapped, frame, &f, modes).unwrap_or(false)
            && check_predicates(frame, &spec).unwrap_or(false);
        if !sound {
            return Err("certificate failed verification".into());
        }
    }
    Ok((v.status, v.budget_exhausted.map(|b| format!("budget of {b} exhausted"))))
}

pub fn run_corpus(corpus: &Corpus, search: &SearchOptions) -> CorpusReport {
    let results: Vec<EntryResult> = corpus
        .entries
        .iter()
        .map(|e| match run_entry(e, search) {
            Ok((got, detail)) => EntryResult {
                name: e.name.clone(),
                expected: e.expect,
                got: Some(got),
                pass: got == e.expect,
                detail,
            },
            Err(detail) => EntryResult {
                name: e.name.clone(),
                expected: e.expect,
                got: None,
                pass: false,
                detail: Some(detail),
            },
        })
        .collect();
    let passed = results.iter().filter(|r| r.pass).count();
    CorpusReport {
        schema: SCHEMA,
        total: results.len(),
        passed,
        failed: results.len() - passed,
        first_mismatch: results.iter().find(|r| !r.pass).cloned(),
        results,
    }
}

/// The corpus shipped with the crate.
pub const STANDARD: &str = include_str!("../corpus/standard.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_passes() {
        let c = parse_corpus(r#"{"entries": []}"#).unwrap();
        let r = run_corpus(&c, &SearchOptions::default());
        assert!(r.all_passed());
        assert_eq!(r.total, 0);
    }

    #[test]
    fn flipped_expectation_is_reported() {
        let text = r#"{"entries": [
            {"name": "box-false", "formula": "[1] F", "n": 1,
             "frame": {"n": 1, "worlds": ["w"]},
             "domains": "expanding", "equality": "none", "expect": "countermodel"}
        ]}"#;
        let r = run_corpus(&parse_corpus(text).unwrap(), &SearchOptions::default());
        assert!(!r.all_passed());
        let m = r.first_mismatch.unwrap();
        assert_eq!((m.name.as_str(), m.got), ("box-false", Some(Status::Valid)));
    }

    #[test]
    fn entries_need_a_frame_or_class() {
        let text = r#"{"entries": [{"name": "x", "formula": "T", "n": 1,
            "domains": "expanding", "equality": "none", "expect": "valid"}]}"#;
        assert!(matches!(parse_corpus(text), Err(CorpusError::Entry { .. })));
        assert!(matches!(parse_corpus("[]"), Err(CorpusError::Syntax(_))));
    }

    #[test]
    fn standard_corpus_parses() {
        assert!(parse_corpus(STANDARD).unwrap().entries.len() >= 10);
    }
}
