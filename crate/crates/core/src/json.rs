//! JSON documents for frames, models, certificates and verdicts.
//!
//! Worlds are referred to by name throughout. Every document carries
//! `"schema": 1`.
//!
//! ```json
//! {"schema": 1, "n": 1, "worlds": ["w", "v"], "relations": {"1": [["w", "v"]]}}
//! ```
//!
//! A model nests its frame and lists domains, partitions and extensions per
//! world name. Extensions of monadic letters are flat element lists; other
//! letters use lists of tuples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decide::{Certificate, Status, Verdict};
use crate::frameclass::ClassVerdict;
use crate::semantics::{AugmentedModel, DomainMode, Element, EqualityMode, Extension, KripkeFrame, Partition, Violation};

pub const SCHEMA: u32 = 1;

fn schema() -> u32 {
    SCHEMA
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    #[serde(default = "schema")]
    pub schema: u32,
    pub n: usize,
    pub worlds: Vec<String>,
    /// Relation index (as a string) to pairs of world names.
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtensionDoc {
    Unary(Vec<Element>),
    Tuples(Vec<Vec<Element>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    #[serde(default = "schema")]
    pub schema: u32,
    pub frame: FrameDoc,
    pub domains: BTreeMap<String, Vec<Element>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equiv: Option<BTreeMap<String, Vec<Vec<Element>>>>,
    /// Letter to world name to extension.
    #[serde(default)]
    pub interp: BTreeMap<String, BTreeMap<String, ExtensionDoc>>,
    pub domain_mode: DomainMode,
    pub equality_mode: EqualityMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    #[serde(flatten)]
    pub model: ModelDoc,
    pub failing_world: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    #[serde(default = "schema")]
    pub schema: u32,
    pub status: String,
    pub certified: bool,
    pub bound_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_exhausted: Option<u64>,
    #[serde(default)]
    pub models_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdictDoc {
    #[serde(default = "schema")]
    pub schema: u32,
    pub status: String,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    pub max_worlds: usize,
    pub max_size: usize,
    pub frames_examined: u64,
    pub models_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_exhausted: Option<u64>,
}

fn check_schema(v: u32) -> Result<(), JsonError> {
    if v == SCHEMA {
        Ok(())
    } else {
        Err(JsonError::Schema(v))
    }
}

pub fn frame_to_doc(frame: &KripkeFrame) -> FrameDoc {
    let mut relations: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for k in 1..=frame.n() {
        let pairs = frame
            .relation(k)
            .map(|(a, b)| (frame.world_name(a).to_string(), frame.world_name(b).to_string()))
            .collect();
        relations.insert(k.to_string(), pairs);
    }
    FrameDoc { schema: SCHEMA, n: frame.n(), worlds: frame.worlds().to_vec(), relations }
}

pub fn frame_from_doc(doc: &FrameDoc) -> Result<KripkeFrame, JsonError> {
    check_schema(doc.schema)?;
    let mut frame = KripkeFrame::new(doc.n, doc.worlds.iter().cloned());
    let mut problems = Vec::new();
    for (key, pairs) in &doc.relations {
        let Ok(k) = key.trim().parse::<usize>() else {
            problems.push(Violation::Shape { detail: format!("relation key `{key}` is not a number") });
            continue;
        };
        for (a, b) in pairs {
            match (frame.world_index(a), frame.world_index(b)) {
                (Some(i), Some(j)) => frame.add_edge(k, i, j),
                (i, _) => {
                    let world = if i.is_none() { a } else { b };
                    problems.push(Violation::UndeclaredWorld { relation: k, world: world.clone() });
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(frame)
    } else {
        Err(JsonError::Invalid(problems))
    }
}

pub fn model_to_doc(m: &AugmentedModel) -> ModelDoc {
    let name = |w: usize| m.frame.world_name(w).to_string();
    let domains = m.domains.iter().enumerate().map(|(w, d)| (name(w), d.iter().copied().collect())).collect();
    let equiv = m.equiv.as_ref().map(|ps| {
        ps.iter().enumerate().map(|(w, p)| (name(w), p.classes().to_vec())).collect()
    });
    let interp = m
        .interp
        .iter()
        .map(|(letter, per_world)| {
            let unary = per_world.iter().flatten().all(|t| t.len() == 1);
            let exts = per_world
                .iter()
                .enumerate()
                .map(|(w, ext)| {
                    let doc = if unary {
                        ExtensionDoc::Unary(ext.iter().map(|t| t[0]).collect())
                    } else {
                        ExtensionDoc::Tuples(ext.iter().cloned().collect())
                    };
                    (name(w), doc)
                })
                .collect();
            (letter.clone(), exts)
        })
        .collect();
    ModelDoc {
        schema: SCHEMA,
        frame: frame_to_doc(&m.frame),
        domains,
        equiv,
        interp,
        domain_mode: m.domain_mode,
        equality_mode: m.equality_mode,
    }
}

/// Builds the model a document describes. Structural problems that the
/// in-memory model cannot represent (unknown world names, missing domains)
/// are reported as violations; everything else is left to `validate_model`.
pub fn model_from_doc(doc: &ModelDoc) -> Result<AugmentedModel, JsonError> {
    check_schema(doc.schema)?;
    let frame = frame_from_doc(&doc.frame)?;
    let mut problems = Vec::new();
    let unknown = |w: &String, what: &str| Violation::Shape { detail: format!("{what} for undeclared world `{w}`") };
    for w in doc.domains.keys().filter(|w| frame.world_index(w).is_none()) {
        problems.push(unknown(w, "domain"));
    }
    let domains: Vec<BTreeSet<Element>> = frame
        .worlds()
        .iter()
        .map(|w| match doc.domains.get(w) {
            Some(d) => d.iter().copied().collect(),
            None => {
                problems.push(Violation::Shape { detail: format!("no domain for `{w}`") });
                BTreeSet::new()
            }
        })
        .collect();
    let equiv = doc.equiv.as_ref().map(|map| {
        for w in map.keys().filter(|w| frame.world_index(w).is_none()) {
            problems.push(unknown(w, "equivalence"));
        }
        frame
            .worlds()
            .iter()
            .zip(&domains)
            .map(|(w, d)| match map.get(w) {
                Some(classes) => Partition::from_classes(classes.iter().cloned()),
                None => Partition::identity(d),
            })
            .collect()
    });
    let mut interp = BTreeMap::new();
    for (letter, per_world) in &doc.interp {
        for w in per_world.keys().filter(|w| frame.world_index(w).is_none()) {
            problems.push(unknown(w, &format!("extension of {letter}")));
        }
        let exts: Vec<Extension> = frame
            .worlds()
            .iter()
            .map(|w| match per_world.get(w) {
                Some(ExtensionDoc::Unary(es)) => es.iter().map(|&e| vec![e]).collect(),
                Some(ExtensionDoc::Tuples(ts)) => ts.iter().cloned().collect(),
                None => Extension::new(),
            })
            .collect();
        interp.insert(letter.clone(), exts);
    }
    if !problems.is_empty() {
        return Err(JsonError::Invalid(problems));
    }
    Ok(AugmentedModel {
        frame,
        domains,
        equiv,
        interp,
        domain_mode: doc.domain_mode,
        equality_mode: doc.equality_mode,
    })
}

pub fn certificate_to_doc(c: &Certificate) -> CertificateDoc {
    CertificateDoc {
        model: model_to_doc(&c.model),
        failing_world: c.model.frame.world_name(c.failing_world).to_string(),
    }
}

pub fn certificate_from_doc(doc: &CertificateDoc) -> Result<Certificate, JsonError> {
    let model = model_from_doc(&doc.model)?;
    let failing_world = model.frame.world_index(&doc.failing_world).ok_or_else(|| {
        JsonError::Invalid(vec![Violation::Shape { detail: format!("failing world `{}` is undeclared", doc.failing_world) }])
    })?;
    Ok(Certificate { model, failing_world })
}

pub fn verdict_to_doc(v: &Verdict) -> VerdictDoc {
    VerdictDoc {
        schema: SCHEMA,
        status: v.status.to_string(),
        certified: v.certified,
        bound_used: v.bound_used,
        certificate: v.certificate.as_ref().map(certificate_to_doc),
        budget_exhausted: v.budget_exhausted,
        models_examined: v.models_examined,
    }
}

pub fn verdict_from_doc(doc: &VerdictDoc) -> Result<Verdict, JsonError> {
    check_schema(doc.schema)?;
    let status = match doc.status.as_str() {
        "valid" => Status::Valid,
        "countermodel" => Status::Countermodel,
        "unknown" => Status::Unknown,
        other => {
            return Err(JsonError::Invalid(vec![Violation::Shape { detail: format!("unknown status `{other}`") }]))
        }
    };
    Ok(Verdict {
        status,
        bound_used: doc.bound_used,
        certified: doc.certified,
        certificate: doc.certificate.as_ref().map(certificate_from_doc).transpose()?,
        budget_exhausted: doc.budget_exhausted,
        models_examined: doc.models_examined,
    })
}

pub fn class_verdict_to_doc(v: &ClassVerdict, class: &str) -> ClassVerdictDoc {
    ClassVerdictDoc {
        schema: SCHEMA,
        status: v.status.to_string(),
        class: class.to_string(),
        frame: v.frame.as_ref().map(frame_to_doc),
        certificate: v.certificate.as_ref().map(certificate_to_doc),
        max_worlds: v.max_worlds,
        max_size: v.max_size,
        frames_examined: v.frames_examined,
        models_examined: v.models_examined,
        budget_exhausted: v.budget_exhausted,
    }
}

pub fn parse_frame(text: &str) -> Result<KripkeFrame, JsonError> {
    frame_from_doc(&serde_json::from_str(text)?)
}

pub fn parse_model(text: &str) -> Result<AugmentedModel, JsonError> {
    model_from_doc(&serde_json::from_str(text)?)
}
