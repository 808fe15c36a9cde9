//! Canonical-order enumeration of candidate countermodels.
//!
//! Order: level (largest domain) ascending; layouts within a level; then
//! partition families; then interpretations as a binary counter over the
//! class-tuple table, least significant bit first. The reported model is
//! the first one in this order falsifying the formula, at its least
//! failing world.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::layout::{all_worlds, closed_sets, layouts_at_level, WorldSet};
use super::partitions::{identity_family, FamilyIter};
use crate::modelcheck::eval::{Compiled, Dense};
use crate::semantics::{AugmentedModel, EqualityMode, Extension, KripkeFrame, Modes, Partition, WorldId};

/// Candidates handed to the workers at once (in models).
const BATCH_MODELS: u64 = 1 << 16;
const BATCH_UNITS: usize = 256;

pub(crate) struct Budget {
    limit: Option<u64>,
    pub used: u64,
}

impl Budget {
    pub fn new(limit: Option<u64>) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn remaining(&self) -> u64 {
        self.limit.map_or(u64::MAX, |l| l.saturating_sub(self.used))
    }

    pub fn take(&mut self, cost: u64) -> bool {
        if cost > self.remaining() {
            return false;
        }
        self.used = self.used.saturating_add(cost);
        true
    }
}

pub(crate) struct Hit {
    pub dense: Dense,
    pub world: WorldId,
    /// Candidates examined inside the unit that produced the hit.
    pub examined: u64,
}

pub(crate) enum Outcome {
    Found(Hit),
    Exhausted,
    OutOfBudget,
}

/// Everything about one (frame, formula, modes) search that never changes.
pub(crate) struct Problem<'a> {
    pub frame: &'a KripkeFrame,
    pub compiled: Compiled,
    pub modes: Modes,
    pub succ: Vec<Vec<Vec<WorldId>>>,
    pub edges: Vec<(WorldId, WorldId)>,
    pub arity: Vec<usize>,
}

impl<'a> Problem<'a> {
    pub fn new(frame: &'a KripkeFrame, compiled: Compiled, modes: Modes) -> Self {
        let mut edges: Vec<_> = frame.edges().map(|(_, a, b)| (a, b)).collect();
        edges.sort_unstable();
        edges.dedup();
        let arity = compiled.letters.iter().map(|(_, a)| *a).collect();
        Problem { frame, succ: frame.successor_table(), compiled, modes, edges, arity }
    }

    /// Dense model with the given domains and per-position classes, all
    /// letters empty.
    pub fn dense(&self, domains: Vec<Vec<u32>>, elements: usize, family: &[Vec<u32>]) -> Dense {
        let mut class_of = vec![vec![0u32; elements]; domains.len()];
        let mut n_classes = Vec::with_capacity(domains.len());
        for (w, d) in domains.iter().enumerate() {
            for (p, &e) in d.iter().enumerate() {
                class_of[w][e as usize] = family[w][p];
            }
            n_classes.push(family[w].iter().map(|&c| c as usize + 1).max().unwrap_or(0));
        }
        Dense::new(self.succ.clone(), domains, class_of, n_classes, self.arity.clone())
    }

    /// Runs through every interpretation of `dense`, stopping at the first
    /// that falsifies the formula somewhere.
    fn sweep(&self, mut dense: Dense) -> Option<Hit> {
        let mut env = self.compiled.fresh_env();
        let len = dense.bits.len();
        let mut examined = 0u64;
        loop {
            examined += 1;
            if let Some(world) = dense.first_failure(&self.compiled.root, &mut env) {
                return Some(Hit { dense, world, examined });
            }
            let mut i = 0;
            loop {
                if i == len {
                    return None;
                }
                if dense.bits[i] {
                    dense.bits[i] = false;
                    i += 1;
                } else {
                    dense.bits[i] = true;
                    break;
                }
            }
        }
    }

    /// Searches every candidate whose largest domain has `level` elements.
    pub fn search_level(&self, closed: &[WorldSet], level: usize, budget: &mut Budget, fast: bool) -> Outcome {
        let m = self.frame.len();
        let mut batch: Vec<(Dense, u64)> = Vec::new();
        let mut batch_cost = 0u64;
        for layout in layouts_at_level(m, closed, level) {
            let domains = layout.domains(m);
            let elements = layout.elements();
            let families: Box<dyn Iterator<Item = Vec<Vec<u32>>>> = match self.modes.equality {
                EqualityMode::Congruence => Box::new(FamilyIter::new(domains.clone(), elements, &self.edges)),
                _ => Box::new(std::iter::once(identity_family(&domains))),
            };
            for family in families {
                let dense = self.dense(domains.clone(), elements, &family);
                let cost = if dense.bits.len() < 64 { 1u64 << dense.bits.len() } else { u64::MAX };
                if !budget.take(cost) {
                    return match self.run_batch(batch, budget, fast) {
                        Some(hit) => Outcome::Found(hit),
                        None => Outcome::OutOfBudget,
                    };
                }
                batch.push((dense, cost));
                batch_cost = batch_cost.saturating_add(cost);
                if batch_cost >= BATCH_MODELS || batch.len() >= BATCH_UNITS {
                    if let Some(hit) = self.run_batch(std::mem::take(&mut batch), budget, fast) {
                        return Outcome::Found(hit);
                    }
                    batch_cost = 0;
                }
            }
        }
        match self.run_batch(batch, budget, fast) {
            Some(hit) => Outcome::Found(hit),
            None => Outcome::Exhausted,
        }
    }

    /// Evaluates a batch already charged to the budget. On a hit the budget
    /// is corrected to count only the candidates actually examined before it.
    fn run_batch(&self, batch: Vec<(Dense, u64)>, budget: &mut Budget, fast: bool) -> Option<Hit> {
        if batch.is_empty() {
            return None;
        }
        let total: u64 = batch.iter().fold(0u64, |a, (_, c)| a.saturating_add(*c));
        let costs: Vec<u64> = batch.iter().map(|(_, c)| *c).collect();
        let units = batch.into_par_iter().enumerate();
        let found = if fast {
            units.find_map_any(|(i, (d, _))| self.sweep(d).map(|h| (i, h)))
        } else {
            units.find_map_first(|(i, (d, _))| self.sweep(d).map(|h| (i, h)))
        };
        let (i, hit) = found?;
        let before: u64 = costs[..i].iter().fold(0u64, |a, c| a.saturating_add(*c));
        budget.used = budget.used.saturating_sub(total).saturating_add(before).saturating_add(hit.examined);
        Some(hit)
    }
}

/// Brute-force search over levels `1..=max_size`.
pub(crate) fn search(problem: &Problem, max_size: usize, budget: &mut Budget, fast: bool) -> Outcome {
    let closed = closed_sets(problem.frame, problem.modes.domains, all_worlds(problem.frame));
    for level in 1..=max_size {
        match problem.search_level(&closed, level, budget, fast) {
            Outcome::Exhausted => continue,
            other => return other,
        }
    }
    Outcome::Exhausted
}

/// All tuples over `domain` of the given arity, first position varying
/// fastest.
pub(crate) fn tuples(domain: &[u32], arity: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    let count = domain.len().checked_pow(arity as u32).unwrap_or(0);
    (0..count).map(move |mut i| {
        (0..arity)
            .map(|_| {
                let e = domain[i % domain.len()];
                i /= domain.len();
                e
            })
            .collect()
    })
}

/// The sparse model represented by `dense` over `frame`.
pub(crate) fn materialize(frame: &KripkeFrame, dense: &Dense, letters: &[(String, usize)], modes: Modes) -> AugmentedModel {
    let domains: Vec<BTreeSet<u32>> = dense.domains.iter().map(|d| d.iter().copied().collect()).collect();
    let mut m = AugmentedModel::new(frame.clone(), domains, modes);
    if modes.equality != EqualityMode::None {
        let parts = dense
            .domains
            .iter()
            .enumerate()
            .map(|(w, d)| {
                let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
                for &e in d {
                    classes.entry(dense.class_of[w][e as usize]).or_default().push(e);
                }
                Partition::from_classes(classes.into_values())
            })
            .collect();
        m.equiv = Some(parts);
    }
    for (l, (name, arity)) in letters.iter().enumerate() {
        let per_world: Vec<Extension> = dense
            .domains
            .iter()
            .enumerate()
            .map(|(w, d)| {
                tuples(d, *arity)
                    .filter(|t| {
                        let idx = dense.tuple_index(w, t.iter().map(|&e| dense.class_of[w][e as usize]));
                        dense.bits[dense.offset[l][w] + idx]
                    })
                    .collect()
            })
            .collect();
        m.interp.insert(name.clone(), per_world);
    }
    m
}
