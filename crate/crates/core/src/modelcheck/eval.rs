//! Slot-indexed evaluation over a dense model representation.
//!
//! Variables are compiled to slots in an assignment array, letters to
//! indices into a flat bit table. Atoms are looked up through the class of
//! each argument at the current world, so one bit per tuple of classes is
//! enough to store an interpretation that respects `≡_w`.

use std::collections::BTreeMap;

use crate::semantics::{Element, WorldId};
use crate::syntax::{Formula, Var};

pub(crate) const UNASSIGNED: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Atom(usize, Vec<usize>),
    Equal(usize, usize),
    Top,
    Bottom,
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
    Box(usize, Box<Node>),
    Diamond(usize, Box<Node>),
}

/// A formula with variables resolved to slots and letters to indices.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub root: Node,
    pub slots: Vec<Var>,
    /// Letter names (sorted) and arities.
    pub letters: Vec<(String, usize)>,
}

impl Compiled {
    pub fn new(f: &Formula) -> Self {
        let slots: Vec<Var> = f.variables().into_iter().collect();
        let letters: Vec<(String, usize)> = f.letters().into_iter().collect();
        let slot_of: BTreeMap<&Var, usize> = slots.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let letter_of: BTreeMap<&str, usize> =
            letters.iter().enumerate().map(|(i, (l, _))| (l.as_str(), i)).collect();
        fn go(f: &Formula, s: &BTreeMap<&Var, usize>, l: &BTreeMap<&str, usize>) -> Node {
            let b = |g: &Formula| Box::new(go(g, s, l));
            match f {
                Formula::Atom { pred, args } => {
                    Node::Atom(l[pred.as_str()], args.iter().map(|a| s[a]).collect())
                }
                Formula::Equal(x, y) => Node::Equal(s[x], s[y]),
                Formula::Top => Node::Top,
                Formula::Bottom => Node::Bottom,
                Formula::Not(g) => Node::Not(b(g)),
                Formula::And(x, y) => Node::And(b(x), b(y)),
                Formula::Or(x, y) => Node::Or(b(x), b(y)),
                Formula::Implies(x, y) => Node::Implies(b(x), b(y)),
                Formula::Iff(x, y) => Node::Iff(b(x), b(y)),
                Formula::Forall(x, g) => Node::Forall(s[x], b(g)),
                Formula::Exists(x, g) => Node::Exists(s[x], b(g)),
                Formula::Box(k, g) => Node::Box(k - 1, b(g)),
                Formula::Diamond(k, g) => Node::Diamond(k - 1, b(g)),
            }
        }
        let root = go(f, &slot_of, &letter_of);
        Compiled { root, slots, letters }
    }

    pub fn fresh_env(&self) -> Vec<u32> {
        vec![UNASSIGNED; self.slots.len()]
    }
}

/// Dense model over elements `0..elements`.
///
/// `class_of[w][e]` is meaningful only for `e ∈ D_w`; classes at `w` are
/// numbered `0..n_classes[w]`. The extension of letter `l` at `w` occupies
/// `bits[offset[l][w] ..]`, one bit per class tuple, first argument least
/// significant.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub succ: Vec<Vec<Vec<WorldId>>>,
    pub domains: Vec<Vec<u32>>,
    pub class_of: Vec<Vec<u32>>,
    pub n_classes: Vec<usize>,
    pub offset: Vec<Vec<usize>>,
    pub bits: Vec<bool>,
}

impl Dense {
    /// Lays out the bit table for the given classes; all extensions empty.
    pub fn new(
        succ: Vec<Vec<Vec<WorldId>>>,
        domains: Vec<Vec<u32>>,
        class_of: Vec<Vec<u32>>,
        n_classes: Vec<usize>,
        arity: Vec<usize>,
    ) -> Self {
        let mut offset = Vec::with_capacity(arity.len());
        let mut total = 0;
        for &a in &arity {
            let mut per_world = Vec::with_capacity(n_classes.len());
            for &c in &n_classes {
                per_world.push(total);
                total += c.pow(a as u32);
            }
            offset.push(per_world);
        }
        Dense { succ, domains, class_of, n_classes, offset, bits: vec![false; total] }
    }

    pub fn tuple_index(&self, w: WorldId, classes: impl Iterator<Item = u32>) -> usize {
        let base = self.n_classes[w];
        let mut idx = 0;
        let mut scale = 1;
        for c in classes {
            idx += c as usize * scale;
            scale *= base;
        }
        idx
    }

    pub fn eval(&self, w: WorldId, node: &Node, env: &mut [u32]) -> bool {
        match node {
            Node::Atom(l, args) => {
                let cls = &self.class_of[w];
                let idx = self.tuple_index(w, args.iter().map(|&s| cls[env[s] as usize]));
                self.bits[self.offset[*l][w] + idx]
            }
            Node::Equal(a, b) => {
                let cls = &self.class_of[w];
                cls[env[*a] as usize] == cls[env[*b] as usize]
            }
            Node::Top => true,
            Node::Bottom => false,
            Node::Not(g) => !self.eval(w, g, env),
            Node::And(a, b) => self.eval(w, a, env) && self.eval(w, b, env),
            Node::Or(a, b) => self.eval(w, a, env) || self.eval(w, b, env),
            Node::Implies(a, b) => !self.eval(w, a, env) || self.eval(w, b, env),
            Node::Iff(a, b) => self.eval(w, a, env) == self.eval(w, b, env),
            Node::Forall(x, g) => self.quantify(w, *x, g, env, true),
            Node::Exists(x, g) => self.quantify(w, *x, g, env, false),
            Node::Box(k, g) => self.succ[*k][w].iter().all(|&v| self.eval(v, g, env)),
            Node::Diamond(k, g) => self.succ[*k][w].iter().any(|&v| self.eval(v, g, env)),
        }
    }

    fn quantify(&self, w: WorldId, x: usize, g: &Node, env: &mut [u32], universal: bool) -> bool {
        let saved = env[x];
        let mut result = universal;
        for &e in &self.domains[w] {
            env[x] = e;
            if self.eval(w, g, env) != universal {
                result = !universal;
                break;
            }
        }
        env[x] = saved;
        result
    }

    /// Least world at which the closed formula `root` is false.
    pub fn first_failure(&self, root: &Node, env: &mut [u32]) -> Option<WorldId> {
        (0..self.domains.len()).find(|&w| !self.eval(w, root, env))
    }
}

/// Element renumbering used when building a dense model from sparse ids.
pub(crate) struct ElementIndex {
    pub to_dense: BTreeMap<Element, u32>,
}

impl ElementIndex {
    pub fn dense(&self, e: Element) -> Option<u32> {
        self.to_dense.get(&e).copied()
    }
}
