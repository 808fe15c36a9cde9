//! Classes of finite frames given by decidable predicates, and the search
//! for a (frame, countermodel) pair refuting a formula over a class.
//!
//! Frames are enumerated labeled: on `s` worlds named `0`…`s-1`, relation
//! `R_k` contains `(i, j)` iff bit `(k-1)·s² + i·s + j` of a counter is set,
//! and the counter runs upward from zero.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::decide::{in_pool, refute_level, Budget, Certificate, DecideError, LevelResult, SearchOptions, Status};
use crate::semantics::{KripkeFrame, Modes, WorldId};
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrameClassError {
    #[error("bad class description: {0}")]
    Parse(String),
    #[error("class is over {spec} relations but the frame has {frame}")]
    ModalCount { spec: usize, frame: usize },
    #[error("subframe of no worlds")]
    EmptySubset,
    #[error("no world with index {0}")]
    UnknownWorld(WorldId),
    #[error(transparent)]
    Decide(#[from] DecideError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FramePredicate {
    Reflexive(usize),
    Transitive(usize),
    Symmetric(usize),
    Serial(usize),
    /// `w R u` and `w R v` imply `u R v`, `u = v` or `v R u`.
    Linear(usize),
    /// Every world has at most `m` successors along `R_k`: `(k, m)`.
    BranchingAtMost(usize, usize),
}

impl FramePredicate {
    pub fn relation(&self) -> usize {
        match *self {
            FramePredicate::Reflexive(k)
            | FramePredicate::Transitive(k)
            | FramePredicate::Symmetric(k)
            | FramePredicate::Serial(k)
            | FramePredicate::Linear(k)
            | FramePredicate::BranchingAtMost(k, _) => k,
        }
    }

    /// Whether the predicate holds of `frame` (false if `R_k` is missing).
    pub fn holds(&self, frame: &KripkeFrame) -> bool {
        let k = self.relation();
        if k == 0 || k > frame.n() {
            return false;
        }
        let worlds = 0..frame.len();
        let r = |a, b| frame.has_edge(k, a, b);
        match *self {
            FramePredicate::Reflexive(_) => worlds.clone().all(|w| r(w, w)),
            FramePredicate::Symmetric(_) => frame.relation(k).all(|(a, b)| r(b, a)),
            FramePredicate::Transitive(_) => frame
                .relation(k)
                .all(|(a, b)| frame.successors(k, b).into_iter().all(|c| r(a, c))),
            FramePredicate::Serial(_) => worlds.clone().all(|w| !frame.successors(k, w).is_empty()),
            FramePredicate::Linear(_) => worlds.clone().all(|w| {
                let succ = frame.successors(k, w);
                succ.iter().all(|&u| succ.iter().all(|&v| u == v || r(u, v) || r(v, u)))
            }),
            FramePredicate::BranchingAtMost(_, m) => worlds.clone().all(|w| frame.successors(k, w).len() <= m),
        }
    }
}

impl fmt::Display for FramePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FramePredicate::Reflexive(k) => write!(f, "reflexive({k})"),
            FramePredicate::Transitive(k) => write!(f, "transitive({k})"),
            FramePredicate::Symmetric(k) => write!(f, "symmetric({k})"),
            FramePredicate::Serial(k) => write!(f, "serial({k})"),
            FramePredicate::Linear(k) => write!(f, "linear({k})"),
            FramePredicate::BranchingAtMost(k, m) => write!(f, "branching<={m}({k})"),
        }
    }
}

impl FromStr for FramePredicate {
    type Err = FrameClassError;

    /// `name(k)` or `branching<=m(k)`; `branching_at_most(k, m)` is also
    /// accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FrameClassError::Parse(format!("`{s}`"));
        let s = s.trim();
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<usize> = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let head = head.trim();
        let pred = match (head, args.as_slice()) {
            ("reflexive", [k]) => FramePredicate::Reflexive(*k),
            ("transitive", [k]) => FramePredicate::Transitive(*k),
            ("symmetric", [k]) => FramePredicate::Symmetric(*k),
            ("serial", [k]) => FramePredicate::Serial(*k),
            ("linear", [k]) => FramePredicate::Linear(*k),
            ("branching_at_most", [k, m]) => FramePredicate::BranchingAtMost(*k, *m),
            (h, [k]) if h.starts_with("branching<=") => {
                let m = h["branching<=".len()..].trim().parse().map_err(|_| bad())?;
                FramePredicate::BranchingAtMost(*k, m)
            }
            _ => return Err(bad()),
        };
        if pred.relation() == 0 {
            return Err(FrameClassError::Parse(format!("`{s}`: relations are numbered from 1")));
        }
        Ok(pred)
    }
}

/// A conjunction of predicates over frames with `n` relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameClassSpec {
    pub n: usize,
    pub predicates: BTreeSet<FramePredicate>,
}

impl FrameClassSpec {
    pub fn all(n: usize) -> Self {
        FrameClassSpec { n, predicates: BTreeSet::new() }
    }

    pub fn with(mut self, p: FramePredicate) -> Self {
        self.predicates.insert(p);
        self
    }

    /// Parses a comma-separated list such as `reflexive(1),branching<=2(1)`;
    /// `all` or an empty string is the class of every frame.
    pub fn parse(text: &str, n: usize) -> Result<Self, FrameClassError> {
        let mut spec = FrameClassSpec::all(n);
        let text = text.trim();
        if text.is_empty() || text == "all" {
            return Ok(spec);
        }
        let mut depth = 0;
        let mut start = 0;
        let mut parts = Vec::new();
        for (i, c) in text.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(&text[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(&text[start..]);
        for part in parts {
            let p: FramePredicate = part.parse()?;
            if p.relation() > n {
                return Err(FrameClassError::Parse(format!("`{p}` mentions relation {} of {n}", p.relation())));
            }
            spec.predicates.insert(p);
        }
        Ok(spec)
    }
}

impl fmt::Display for FrameClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.predicates.is_empty() {
            return f.write_str("all");
        }
        let parts: Vec<String> = self.predicates.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub fn check_predicates(frame: &KripkeFrame, spec: &FrameClassSpec) -> Result<bool, FrameClassError> {
    if frame.n() != spec.n {
        return Err(FrameClassError::ModalCount { spec: spec.n, frame: frame.n() });
    }
    Ok(spec.predicates.iter().all(|p| p.holds(frame)))
}

/// Every frame of the class on exactly `worlds` worlds, in counter order.
pub fn frames_of_size(spec: &FrameClassSpec, worlds: usize) -> impl Iterator<Item = KripkeFrame> + '_ {
    let bits = spec.n * worlds * worlds;
    assert!(bits < 128, "too many frames to enumerate");
    (0..1u128 << bits)
        .map(move |code| {
            let mut frame = KripkeFrame::numbered(spec.n, worlds);
            for b in 0..bits {
                if code >> b & 1 == 1 {
                    let (k, ij) = (b / (worlds * worlds), b % (worlds * worlds));
                    frame.add_edge(k + 1, ij / worlds, ij % worlds);
                }
            }
            frame
        })
        .filter(move |frame| spec.predicates.iter().all(|p| p.holds(frame)))
}

/// Every frame of the class with `1..=max_worlds` worlds, smaller first.
pub fn enumerate_frames(spec: &FrameClassSpec, max_worlds: usize) -> impl Iterator<Item = KripkeFrame> + '_ {
    (1..=max_worlds).flat_map(move |s| frames_of_size(spec, s))
}

/// Restriction of `frame` to `subset`, keeping world names and order.
pub fn subframe(frame: &KripkeFrame, subset: &BTreeSet<WorldId>) -> Result<KripkeFrame, FrameClassError> {
    if subset.is_empty() {
        return Err(FrameClassError::EmptySubset);
    }
    if let Some(&w) = subset.iter().find(|&&w| w >= frame.len()) {
        return Err(FrameClassError::UnknownWorld(w));
    }
    let keep: Vec<WorldId> = subset.iter().copied().collect();
    let mut out = KripkeFrame::new(frame.n(), keep.iter().map(|&w| frame.world_name(w).to_string()));
    for (k, a, b) in frame.edges() {
        if let (Ok(i), Ok(j)) = (keep.binary_search(&a), keep.binary_search(&b)) {
            out.add_edge(k, i, j);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVerdict {
    /// `countermodel` or `unknown`; the search never proves validity.
    pub status: Status,
    pub frame: Option<KripkeFrame>,
    pub certificate: Option<Certificate>,
    pub max_worlds: usize,
    pub max_size: usize,
    pub frames_examined: u64,
    pub models_examined: u64,
    pub budget_exhausted: Option<u64>,
}

/// Looks for a frame of the class and a countermodel on it.
///
/// Stages sweep the pairs (worlds `s`, domain level `t`) diagonally: stage
/// `d` covers `s + t = d` with `s` ascending, so every pair within the
/// limits is reached and small pairs come first. A frame is searched at
/// level `t` only, lower levels having been covered at earlier stages.
pub fn class_refute(
    spec: &FrameClassSpec,
    f: &Formula,
    modes: Modes,
    max_worlds: usize,
    max_size: usize,
    opts: &SearchOptions,
) -> Result<ClassVerdict, FrameClassError> {
    let mut out = ClassVerdict {
        status: Status::Unknown,
        frame: None,
        certificate: None,
        max_worlds,
        max_size,
        frames_examined: 0,
        models_examined: 0,
        budget_exhausted: None,
    };
    let mut budget = Budget::new(opts.budget);
    let result = in_pool(opts.jobs, || -> Result<Option<(KripkeFrame, Certificate)>, FrameClassError> {
        for d in 2..=max_worlds + max_size {
            for s in 1..=max_worlds.min(d - 1) {
                let t = d - s;
                if t > max_size {
                    continue;
                }
                for frame in frames_of_size(spec, s) {
                    out.frames_examined += 1;
                    match refute_level(&frame, f, modes, t, &mut budget, opts.fast)? {
                        LevelResult::Found(cert) => return Ok(Some((frame, cert))),
                        LevelResult::Exhausted => {}
                        LevelResult::OutOfBudget => {
                            out.budget_exhausted = opts.budget;
                            return Ok(None);
                        }
                    }
                }
            }
        }
        Ok(None)
    })?;
    out.models_examined = budget.used;
    if let Some((frame, cert)) = result {
        out.status = Status::Countermodel;
        out.frame = Some(frame);
        out.certificate = Some(cert);
    }
    Ok(out)
}
