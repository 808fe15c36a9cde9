//! Domain layouts: which elements exist at which worlds.
//!
//! Every element has an existence set, the worlds whose domain contains it.
//! Expanding domains force existence sets to be closed under successors;
//! locally constant domains force closure under predecessors as well.
//! Elements with the same existence set are interchangeable, so a layout
//! is determined by how many elements each closed set carries.

use std::cmp::Reverse;

use crate::semantics::{DomainMode, KripkeFrame, WorldId};

/// Bitmask of worlds.
pub(crate) type WorldSet = u64;

/// Largest frame the searches accept (existence sets are enumerated as
/// subsets of the world set).
pub const MAX_SEARCH_WORLDS: usize = 16;

fn edge_pairs(frame: &KripkeFrame) -> Vec<(WorldId, WorldId)> {
    let mut pairs: Vec<_> = frame.edges().map(|(_, a, b)| (a, b)).collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn canonical_order(sets: &mut [WorldSet]) {
    sets.sort_by_key(|&s| (Reverse(s.count_ones()), s));
}

/// Non-empty subsets of `within` closed under the frame's relations
/// (both directions for locally constant domains), in canonical order:
/// larger sets first, then by mask.
pub(crate) fn closed_sets(frame: &KripkeFrame, mode: DomainMode, within: WorldSet) -> Vec<WorldSet> {
    let pairs: Vec<_> = edge_pairs(frame)
        .into_iter()
        .filter(|&(a, b)| within >> a & 1 == 1 && within >> b & 1 == 1)
        .collect();
    let members: Vec<WorldId> = (0..frame.len()).filter(|&w| within >> w & 1 == 1).collect();
    let mut out = Vec::new();
    for bits in 1u64..(1u64 << members.len()) {
        let set = members
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(0u64, |acc, (_, &w)| acc | 1 << w);
        let closed = pairs.iter().all(|&(a, b)| {
            let (ina, inb) = (set >> a & 1 == 1, set >> b & 1 == 1);
            (!ina || inb) && (mode == DomainMode::Expanding || !inb || ina)
        });
        if closed {
            out.push(set);
        }
    }
    canonical_order(&mut out);
    out
}

pub(crate) fn all_worlds(frame: &KripkeFrame) -> WorldSet {
    if frame.len() >= 64 {
        u64::MAX
    } else {
        (1u64 << frame.len()) - 1
    }
}

/// The existence set of every element, elements numbered in canonical
/// order of their sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainLayout {
    sets: Vec<WorldSet>,
}

impl DomainLayout {
    pub(crate) fn from_sets(mut sets: Vec<WorldSet>) -> Self {
        canonical_order(&mut sets);
        DomainLayout { sets }
    }

    /// Domains `{0, …, size(w) - 1}`; requires sizes compatible with the
    /// domain condition on every edge.
    pub fn initial_segments(frame: &KripkeFrame, sizes: &[usize], mode: DomainMode) -> Result<Self, String> {
        if sizes.len() != frame.len() {
            return Err(format!("{} sizes for {} worlds", sizes.len(), frame.len()));
        }
        if let Some(w) = sizes.iter().position(|&s| s == 0) {
            return Err(format!("world `{}` has an empty domain", frame.world_name(w)));
        }
        for (k, a, b) in frame.edges() {
            let ok = match mode {
                DomainMode::Expanding => sizes[a] <= sizes[b],
                DomainMode::LocallyConstant => sizes[a] == sizes[b],
            };
            if !ok {
                return Err(format!(
                    "sizes {} at `{}` and {} at `{}` conflict with R_{k}",
                    sizes[a],
                    frame.world_name(a),
                    sizes[b],
                    frame.world_name(b)
                ));
            }
        }
        let max = sizes.iter().copied().max().unwrap_or(0);
        let sets = (0..max)
            .map(|e| {
                sizes
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| e < s)
                    .fold(0u64, |acc, (w, _)| acc | 1 << w)
            })
            .collect();
        Ok(DomainLayout::from_sets(sets))
    }

    pub fn elements(&self) -> usize {
        self.sets.len()
    }

    /// Elements of each world's domain, ascending.
    pub fn domains(&self, worlds: usize) -> Vec<Vec<u32>> {
        (0..worlds)
            .map(|w| {
                (0..self.sets.len() as u32)
                    .filter(|&e| self.sets[e as usize] >> w & 1 == 1)
                    .collect()
            })
            .collect()
    }

    pub fn sizes(&self, worlds: usize) -> Vec<usize> {
        (0..worlds)
            .map(|w| self.sets.iter().filter(|&&s| s >> w & 1 == 1).count())
            .collect()
    }
}

/// Layouts over `closed` whose largest domain has exactly `level` elements
/// and every domain is non-empty, ordered by total domain size, then size
/// profile, then number of elements.
pub(crate) fn layouts_at_level(worlds: usize, closed: &[WorldSet], level: usize) -> Vec<DomainLayout> {
    fn go(
        i: usize,
        closed: &[WorldSet],
        level: usize,
        sizes: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if i == closed.len() {
            if sizes.iter().all(|&s| s >= 1) && sizes.iter().copied().max() == Some(level) {
                out.push((sizes.clone(), counts.clone()));
            }
            return;
        }
        let set = closed[i];
        let members: Vec<usize> = (0..sizes.len()).filter(|&w| set >> w & 1 == 1).collect();
        let room = members.iter().map(|&w| level - sizes[w]).min().unwrap_or(0);
        for c in 0..=room {
            for &w in &members {
                sizes[w] += c;
            }
            counts.push(c);
            go(i + 1, closed, level, sizes, counts, out);
            counts.pop();
            for &w in &members {
                sizes[w] -= c;
            }
        }
    }
    if level == 0 {
        return Vec::new();
    }
    let mut raw = Vec::new();
    go(0, closed, level, &mut vec![0; worlds], &mut Vec::new(), &mut raw);
    raw.sort_by(|(sa, ca), (sb, cb)| {
        let key = |s: &Vec<usize>, c: &Vec<usize>| {
            (s.iter().sum::<usize>(), s.clone(), c.iter().sum::<usize>(), Reverse(c.clone()))
        };
        key(sa, ca).cmp(&key(sb, cb))
    });
    raw.into_iter()
        .map(|(_, counts)| {
            let sets = counts
                .iter()
                .zip(closed)
                .flat_map(|(&c, &s)| std::iter::repeat(s).take(c))
                .collect();
            DomainLayout::from_sets(sets)
        })
        .collect()
}
