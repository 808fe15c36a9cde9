//! Complete search for monadic formulas without congruence classes.
//!
//! With `=` read as identity (or absent), an element's contribution to a
//! model over the subframe generated by `w` is fixed by its type: the set of
//! worlds where it exists together with the letters it satisfies at each of
//! them. A formula with `v` variables cannot tell `v` copies of a type from
//! more (one copy when `=` does not occur), so a countermodel exists iff one
//! exists whose type multiplicities are capped accordingly. The search runs
//! over such multisets, fewest elements first.

use rayon::prelude::*;

use super::brute::{Budget, Hit, Outcome, Problem};
use super::layout::{closed_sets, WorldSet};
use crate::modelcheck::eval::Dense;
use crate::semantics::WorldId;

const BATCH: usize = 4096;

/// An element type over the generated subframe of one world.
#[derive(Clone, Copy, Debug)]
struct Type {
    exists: WorldSet,
    /// Bit `l · |exists| + r` is letter `l` at the `r`-th world of `exists`.
    valuation: u64,
}

/// Non-decreasing sequences over `0..types` with each value repeated at
/// most `cap` times and first entry below `first_limit`, in lexicographic
/// order.
pub(crate) struct Multisets {
    types: u32,
    cap: usize,
    first_limit: u32,
    a: Vec<u32>,
    started: bool,
    done: bool,
}

impl Multisets {
    pub fn new(types: usize, cap: usize, first_limit: usize, len: usize) -> Self {
        Multisets {
            types: types as u32,
            cap,
            first_limit: first_limit as u32,
            a: vec![0; len],
            started: false,
            done: len == 0 || cap == 0 || first_limit == 0,
        }
    }

    /// Fills `a[from..]` with the least admissible continuation.
    fn fill(&mut self, from: usize) -> bool {
        for j in from..self.a.len() {
            let mut v = if j == 0 { 0 } else { self.a[j - 1] };
            if j > 0 {
                let run = self.a[..j].iter().rev().take_while(|&&x| x == v).count();
                if run >= self.cap {
                    v += 1;
                }
            }
            if v >= self.types {
                return false;
            }
            self.a[j] = v;
        }
        true
    }
}

impl Iterator for Multisets {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.fill(0) {
                self.done = true;
                return None;
            }
            return Some(self.a.clone());
        }
        for i in (0..self.a.len()).rev() {
            let v = self.a[i] + 1;
            if v >= self.types || (i == 0 && v >= self.first_limit) {
                continue;
            }
            self.a[i] = v;
            if self.fill(i + 1) {
                return Some(self.a.clone());
            }
        }
        self.done = true;
        None
    }
}

struct Rooted {
    world: WorldId,
    generated: WorldSet,
    types: Vec<Type>,
    /// Types existing at every world of the generated subframe come first.
    full: usize,
}

/// Largest type table the search is willing to build.
const MAX_TYPES: u64 = 1 << 24;

fn rooted(problem: &Problem, w: WorldId) -> Option<Rooted> {
    let generated = problem.frame.reachable_from(w).into_iter().fold(0u64, |acc, u| acc | 1 << u);
    let letters = problem.arity.len();
    let sets = closed_sets(problem.frame, problem.modes.domains, generated);
    let count = sets.iter().try_fold(0u64, |acc, s| {
        let bits = letters * s.count_ones() as usize;
        (bits < 32).then(|| acc + (1u64 << bits))
    });
    if count.map_or(true, |c| c > MAX_TYPES) {
        return None;
    }
    let mut types = Vec::new();
    let mut full = 0;
    for s in sets {
        let bits = letters * s.count_ones() as usize;
        for valuation in 0..(1u64 << bits) {
            types.push(Type { exists: s, valuation });
        }
        if s == generated {
            full = types.len();
        }
    }
    Some(Rooted { world: w, generated, types, full })
}

fn build(problem: &Problem, root: &Rooted, picks: &[u32], size_limit: Option<usize>) -> Option<Dense> {
    let m = problem.frame.len();
    let mut domains: Vec<Vec<u32>> = vec![Vec::new(); m];
    for (e, &t) in picks.iter().enumerate() {
        let s = root.types[t as usize].exists;
        for (x, d) in domains.iter_mut().enumerate() {
            if s >> x & 1 == 1 {
                d.push(e as u32);
            }
        }
    }
    if let Some(limit) = size_limit {
        if domains.iter().any(|d| d.len() > limit) {
            return None;
        }
    }
    for x in 0..m {
        if root.generated >> x & 1 == 0 {
            domains[x] = domains[root.world].clone();
        }
    }
    let family: Vec<Vec<u32>> = domains.iter().map(|d| (0..d.len() as u32).collect()).collect();
    let mut dense = problem.dense(domains, picks.len(), &family);
    for (e, &t) in picks.iter().enumerate() {
        let ty = root.types[t as usize];
        let width = ty.exists.count_ones() as usize;
        let mut rank = 0;
        for x in 0..m {
            if ty.exists >> x & 1 == 0 {
                continue;
            }
            let class = dense.class_of[x][e] as usize;
            for l in 0..problem.arity.len() {
                if ty.valuation >> (l * width + rank) & 1 == 1 {
                    let off = dense.offset[l][x];
                    dense.bits[off + class] = true;
                }
            }
            rank += 1;
        }
    }
    Some(dense)
}

/// Searches multisets of at most `cap` copies per type, elements counted
/// across the generated subframe, for a model falsifying the formula at
/// its root. Roots are tried in order for each element count.
pub(crate) fn search(problem: &Problem, cap: usize, size_limit: Option<usize>, budget: &mut Budget, fast: bool) -> Outcome {
    let Some(roots) = (0..problem.frame.len()).map(|w| rooted(problem, w)).collect::<Option<Vec<_>>>() else {
        return Outcome::OutOfBudget;
    };
    let longest = |r: &Rooted| {
        let by_types = r.types.len().saturating_mul(cap);
        match size_limit {
            Some(l) => by_types.min(l.saturating_mul(r.generated.count_ones() as usize)),
            None => by_types,
        }
    };
    let max_len = roots.iter().map(longest).max().unwrap_or(0);
    for len in 1..=max_len {
        for root in roots.iter().filter(|r| len <= longest(r)) {
            let mut picks = Multisets::new(root.types.len(), cap, root.full, len);
            loop {
                let take = budget.remaining().min(BATCH as u64) as usize;
                let batch: Vec<Vec<u32>> = picks.by_ref().take(take).collect();
                if batch.is_empty() {
                    if take == 0 {
                        return Outcome::OutOfBudget;
                    }
                    break;
                }
                budget.take(batch.len() as u64);
                let exhausted = batch.len() < take;
                let before = budget.used - batch.len() as u64;
                let check = |(i, p): (usize, &Vec<u32>)| {
                    let dense = build(problem, root, p, size_limit)?;
                    let mut env = problem.compiled.fresh_env();
                    (!dense.eval(root.world, &problem.compiled.root, &mut env)).then_some((i, dense))
                };
                let found = if fast {
                    batch.par_iter().enumerate().find_map_any(check)
                } else {
                    batch.par_iter().enumerate().find_map_first(check)
                };
                if let Some((i, dense)) = found {
                    budget.used = before + i as u64 + 1;
                    return Outcome::Found(Hit { dense, world: root.world, examined: 1 });
                }
                if exhausted {
                    break;
                }
            }
        }
    }
    Outcome::Exhausted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multisets_respect_cap_and_order() {
        let all: Vec<_> = Multisets::new(3, 1, 3, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        let capped: Vec<_> = Multisets::new(2, 2, 1, 3).collect();
        assert_eq!(capped, vec![vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(Multisets::new(2, 1, 2, 3).count(), 0);
    }

    #[test]
    fn multiset_counts_match_binomials() {
        // Subsets of size 3 from 6 types.
        assert_eq!(Multisets::new(6, 1, 6, 3).count(), 20);
        // Multisets of size 3 from 4 types, unbounded multiplicity.
        assert_eq!(Multisets::new(4, 3, 4, 3).count(), 20);
    }
}
