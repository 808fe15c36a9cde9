//! Families of per-world partitions satisfying heredity.
//!
//! A partition of an ordered domain is a restricted growth string: the
//! first element is in class 0 and each later element's class is at most
//! one more than the largest class seen so far. Families are produced in
//! lexicographic order of the per-world strings, worlds in declaration
//! order, skipping any family where some `w R v` has `≡_w ⊄ ≡_v`.

use crate::semantics::WorldId;

/// Advances `a` to the next restricted growth string; false once exhausted.
pub(crate) fn next_rgs(a: &mut [u32]) -> bool {
    for i in (1..a.len()).rev() {
        let max_before = a[..i].iter().copied().max().unwrap_or(0);
        if a[i] <= max_before {
            a[i] += 1;
            for x in &mut a[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Lazily enumerates hereditary partition families over fixed domains.
pub(crate) struct FamilyIter {
    domains: Vec<Vec<u32>>,
    /// Position of each element in each world's domain.
    position: Vec<Vec<Option<usize>>>,
    /// Edges `(from, to)` grouped by the later of the two worlds.
    checks: Vec<Vec<(WorldId, WorldId)>>,
    rgs: Vec<Vec<u32>>,
    started: bool,
    done: bool,
}

impl FamilyIter {
    pub fn new(domains: Vec<Vec<u32>>, elements: usize, edges: &[(WorldId, WorldId)]) -> Self {
        let position = domains
            .iter()
            .map(|d| {
                let mut pos = vec![None; elements];
                for (i, &e) in d.iter().enumerate() {
                    pos[e as usize] = Some(i);
                }
                pos
            })
            .collect();
        let mut checks = vec![Vec::new(); domains.len()];
        for &(a, b) in edges {
            if a != b {
                checks[a.max(b)].push((a, b));
            }
        }
        let rgs = domains.iter().map(|d| vec![0; d.len()]).collect();
        FamilyIter { domains, position, checks, rgs, started: false, done: false }
    }

    fn consistent(&self, i: usize) -> bool {
        self.checks[i].iter().all(|&(a, b)| {
            let mut image: Vec<Option<u32>> = vec![None; self.domains[a].len()];
            self.domains[a].iter().enumerate().all(|(p, &e)| {
                let Some(q) = self.position[b][e as usize] else { return false };
                let target = self.rgs[b][q];
                let slot = &mut image[self.rgs[a][p] as usize];
                match slot {
                    Some(t) => *t == target,
                    None => {
                        *slot = Some(target);
                        true
                    }
                }
            })
        })
    }

    fn bump(&mut self, i: &mut usize) -> bool {
        loop {
            if next_rgs(&mut self.rgs[*i]) {
                return true;
            }
            if *i == 0 {
                return false;
            }
            *i -= 1;
        }
    }
}

impl Iterator for FamilyIter {
    /// Class of each domain position, per world.
    type Item = Vec<Vec<u32>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let m = self.rgs.len();
        let mut i = 0;
        if self.started {
            i = m - 1;
            if !self.bump(&mut i) {
                self.done = true;
                return None;
            }
        }
        self.started = true;
        loop {
            if self.consistent(i) {
                if i + 1 == m {
                    return Some(self.rgs.clone());
                }
                i += 1;
                self.rgs[i].fill(0);
            } else if !self.bump(&mut i) {
                self.done = true;
                return None;
            }
        }
    }
}

/// The single all-singletons family.
pub(crate) fn identity_family(domains: &[Vec<u32>]) -> Vec<Vec<u32>> {
    domains.iter().map(|d| (0..d.len() as u32).collect()).collect()
}
