//! Validity of formulas on a fixed finite frame.
//!
//! [`refute`] enumerates candidate countermodels in a fixed canonical order
//! and returns the first one found. [`decide_validity`] adds a verdict of
//! `valid` when the search space below the bound is exhausted. Every
//! countermodel comes with a certificate that [`verify_certificate`] checks
//! using only the validators and the model checker.

mod brute;
mod exact;
mod layout;
mod partitions;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modelcheck::eval::{Compiled, Dense};
use crate::modelcheck::true_at;
use crate::semantics::{
    validate_frame, validate_model, AugmentedModel, EqualityMode, KripkeFrame, Modes, Violation, WorldId,
};
use crate::syntax::{check_monadic, metrics, universal_closure, Formula, Signature};
pub(crate) use brute::Budget;
use brute::{Outcome, Problem};
pub use layout::{DomainLayout, MAX_SEARCH_WORLDS};
use partitions::{identity_family, FamilyIter};

/// Default number of candidate models a search may examine.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("invalid frame: {}", join(.0))]
    InvalidFrame(Vec<Violation>),
    #[error("formula has a non-monadic letter; only refutation is available")]
    NonMonadic,
    #[error("formula uses `=` but the equality mode is `none`")]
    EqualityWithoutEquality,
    #[error("modality {index} exceeds the frame's {n} relations")]
    ModalIndex { index: usize, n: usize },
    #[error("infeasible domain sizes: {0}")]
    InfeasibleSizes(String),
    #[error("frame has {0} worlds; search supports at most {MAX_SEARCH_WORLDS}")]
    FrameTooLarge(usize),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Valid,
    Countermodel,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Valid => "valid",
            Status::Countermodel => "countermodel",
            Status::Unknown => "unknown",
        })
    }
}

/// A countermodel and a world where the formula fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub model: AugmentedModel,
    pub failing_world: WorldId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Per-world domain-size bound the search covered.
    pub bound_used: usize,
    pub certified: bool,
    pub certificate: Option<Certificate>,
    /// The budget, when it ran out before the search finished.
    pub budget_exhausted: Option<u64>,
    pub models_examined: u64,
}

/// Parameters of the default bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    /// Distinct letters.
    pub k: usize,
    /// Distinct variables.
    pub v: usize,
    /// Worlds.
    pub m: usize,
    /// Relations.
    pub n: usize,
}

impl BoundParams {
    pub fn of(f: &Formula, frame: &KripkeFrame) -> Self {
        let mt = metrics(f);
        BoundParams { k: mt.letters, v: mt.variables, m: frame.len(), n: frame.n() }
    }

    /// `max(v, 1) · 2^((k + 1) · m)`, saturating.
    pub fn bound(&self) -> usize {
        let exp = (self.k + 1).saturating_mul(self.m);
        if exp >= usize::BITS as usize {
            return usize::MAX;
        }
        (1usize << exp).saturating_mul(self.v.max(1))
    }
}

pub fn bound(f: &Formula, frame: &KripkeFrame) -> Result<usize, DecideError> {
    if check_monadic(f) == Signature::NonMonadic {
        return Err(DecideError::NonMonadic);
    }
    Ok(BoundParams::of(f, frame).bound())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Candidate models to examine before giving up; `None` for no limit.
    pub budget: Option<u64>,
    /// Accept any countermodel instead of the canonically least one.
    pub fast: bool,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: Some(DEFAULT_BUDGET), fast: false, jobs: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecideOptions {
    /// Overrides the default bound.
    pub bound: Option<usize>,
    /// Use plain bounded enumeration even where the complete search applies.
    pub uncertified: bool,
    pub search: SearchOptions,
}

fn check_inputs(frame: &KripkeFrame, f: &Formula, modes: Modes) -> Result<(), DecideError> {
    let violations = validate_frame(frame);
    if !violations.is_empty() {
        return Err(DecideError::InvalidFrame(violations));
    }
    if frame.len() > MAX_SEARCH_WORLDS {
        return Err(DecideError::FrameTooLarge(frame.len()));
    }
    if modes.equality == EqualityMode::None && f.has_equality() {
        return Err(DecideError::EqualityWithoutEquality);
    }
    let index = f.max_modal_index();
    if index > frame.n() {
        return Err(DecideError::ModalIndex { index, n: frame.n() });
    }
    Ok(())
}

pub(crate) fn in_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> T {
    match jobs.and_then(|j| rayon::ThreadPoolBuilder::new().num_threads(j).build().ok()) {
        Some(pool) => pool.install(work),
        None => work(),
    }
}

fn finish(
    frame: &KripkeFrame,
    compiled: &Compiled,
    modes: Modes,
    outcome: Outcome,
    budget: &Budget,
    limit: Option<u64>,
    bound_used: usize,
) -> Verdict {
    let mut v = Verdict {
        status: Status::Unknown,
        bound_used,
        certified: false,
        certificate: None,
        budget_exhausted: None,
        models_examined: budget.used,
    };
    match outcome {
        Outcome::Found(hit) => {
            v.status = Status::Countermodel;
            v.certificate = Some(Certificate {
                model: brute::materialize(frame, &hit.dense, &compiled.letters, modes),
                failing_world: hit.world,
            });
        }
        Outcome::OutOfBudget => v.budget_exhausted = limit,
        Outcome::Exhausted => {}
    }
    v
}

/// Searches for a countermodel with every domain of at most `max_size`
/// elements. Never answers `valid`.
pub fn refute(
    frame: &KripkeFrame,
    f: &Formula,
    modes: Modes,
    max_size: usize,
    opts: &SearchOptions,
) -> Result<Verdict, DecideError> {
    check_inputs(frame, f, modes)?;
    let compiled = Compiled::new(&universal_closure(f));
    let mut budget = Budget::new(opts.budget);
    let outcome = in_pool(opts.jobs, || {
        let problem = Problem::new(frame, compiled.clone(), modes);
        brute::search(&problem, max_size, &mut budget, opts.fast)
    });
    Ok(finish(frame, &compiled, modes, outcome, &budget, opts.budget, max_size))
}

pub(crate) enum LevelResult {
    Found(Certificate),
    Exhausted,
    OutOfBudget,
}

/// Runs only the candidates whose largest domain has exactly `level`
/// elements, charging a shared budget.
pub(crate) fn refute_level(
    frame: &KripkeFrame,
    f: &Formula,
    modes: Modes,
    level: usize,
    budget: &mut Budget,
    fast: bool,
) -> Result<LevelResult, DecideError> {
    check_inputs(frame, f, modes)?;
    let compiled = Compiled::new(&universal_closure(f));
    let problem = Problem::new(frame, compiled, modes);
    let closed = layout::closed_sets(frame, modes.domains, layout::all_worlds(frame));
    Ok(match problem.search_level(&closed, level, budget, fast) {
        Outcome::Found(hit) => LevelResult::Found(Certificate {
            model: brute::materialize(frame, &hit.dense, &problem.compiled.letters, modes),
            failing_world: hit.world,
        }),
        Outcome::Exhausted => LevelResult::Exhausted,
        Outcome::OutOfBudget => LevelResult::OutOfBudget,
    })
}

/// Decides validity of a monadic formula on `frame`.
///
/// Formulas without congruence classes to worry about (equality mode
/// `identity` or `none`, or no `=` at all) go through a complete search
/// over element types, and a `valid` answer there is certified. With `=`
/// under congruence the plain bounded search runs up to the bound, and a
/// `valid` answer is reported uncertified.
pub fn decide_validity(
    frame: &KripkeFrame,
    f: &Formula,
    modes: Modes,
    opts: &DecideOptions,
) -> Result<Verdict, DecideError> {
    check_inputs(frame, f, modes)?;
    if check_monadic(f) == Signature::NonMonadic {
        return Err(DecideError::NonMonadic);
    }
    let default = BoundParams::of(f, frame).bound();
    let b = opts.bound.unwrap_or(default);
    let typed = modes.equality != EqualityMode::Congruence || !f.has_equality();
    if opts.uncertified || !typed {
        let mut v = refute(frame, f, modes, b, &opts.search)?;
        if v.status == Status::Unknown && v.budget_exhausted.is_none() {
            v.status = Status::Valid;
        }
        return Ok(v);
    }
    let cap = if f.has_equality() { metrics(f).variables.max(1) } else { 1 };
    let limit = (b < default).then_some(b);
    let compiled = Compiled::new(&universal_closure(f));
    let mut budget = Budget::new(opts.search.budget);
    let outcome = in_pool(opts.search.jobs, || {
        let problem = Problem::new(frame, compiled.clone(), modes);
        exact::search(&problem, cap, limit, &mut budget, opts.search.fast)
    });
    let exhausted = matches!(outcome, Outcome::Exhausted);
    let mut v = finish(frame, &compiled, modes, outcome, &budget, opts.search.budget, b);
    if exhausted {
        v.status = Status::Valid;
        v.certified = limit.is_none();
    }
    Ok(v)
}

/// Re-checks a countermodel verdict against `frame`, `f` and `modes` using
/// only the validators and the model checker.
pub fn verify_certificate(v: &Verdict, frame: &KripkeFrame, f: &Formula, modes: Modes) -> Result<bool, DecideError> {
    if v.status != Status::Countermodel {
        return Err(DecideError::MalformedCertificate(format!("verdict is {}", v.status)));
    }
    let cert = v
        .certificate
        .as_ref()
        .ok_or_else(|| DecideError::MalformedCertificate("no certificate".into()))?;
    Ok(certificate_holds(cert, frame, f, modes))
}

pub(crate) fn certificate_holds(cert: &Certificate, frame: &KripkeFrame, f: &Formula, modes: Modes) -> bool {
    let m = &cert.model;
    m.frame == *frame
        && m.modes() == modes
        && cert.failing_world < frame.len()
        && validate_model(m).is_empty()
        && matches!(true_at(m, cert.failing_world, f), Ok(false))
}

/// Every model over `frame` with initial-segment domains of the given
/// sizes, in canonical order: partition families (congruence mode only),
/// then interpretations of `letters` as a binary counter.
pub fn enumerate_models(
    frame: &KripkeFrame,
    sizes: &[usize],
    letters: &BTreeMap<String, usize>,
    modes: Modes,
) -> Result<impl Iterator<Item = AugmentedModel>, DecideError> {
    let layout = DomainLayout::initial_segments(frame, sizes, modes.domains).map_err(DecideError::InfeasibleSizes)?;
    let mut pseudo = Formula::Top;
    for (name, &arity) in letters {
        let args: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
        pseudo = Formula::and(pseudo, Formula::atom(name, args.iter().map(String::as_str)));
    }
    let compiled = Compiled::new(&pseudo);
    let letter_list = compiled.letters.clone();
    let problem = Problem::new(frame, compiled, modes);
    let domains = layout.domains(frame.len());
    let elements = layout.elements();
    let families: Vec<Vec<Vec<u32>>> = match modes.equality {
        EqualityMode::Congruence => {
            let edges: Vec<_> = frame.edges().map(|(_, a, b)| (a, b)).collect();
            FamilyIter::new(domains.clone(), elements, &edges).collect()
        }
        _ => vec![identity_family(&domains)],
    };
    let denses: Vec<Dense> = families.iter().map(|fam| problem.dense(domains.clone(), elements, fam)).collect();
    let frame = frame.clone();
    Ok(denses.into_iter().flat_map(move |dense| {
        let frame = frame.clone();
        let letters = letter_list.clone();
        let len = dense.bits.len();
        let count: u64 = if len < 64 { 1 << len } else { u64::MAX };
        (0..count).map(move |i| {
            let mut d = dense.clone();
            for (b, bit) in d.bits.iter_mut().enumerate() {
                *bit = i >> b & 1 == 1;
            }
            brute::materialize(&frame, &d, &letters, modes)
        })
    }))
}
