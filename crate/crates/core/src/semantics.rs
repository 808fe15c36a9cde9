//! Finite Kripke frames and augmented models with equality.
//!
//! A model carries per-world domains, per-world equivalence relations
//! (stored as partitions) and per-world interpretations of predicate
//! letters. [`validate_model`] checks the structural conditions a legal
//! model must meet for its declared modes:
//!
//! * expanding domains: `w R_k v` implies `D_w ⊆ D_v`;
//! * locally constant domains: `w R_k v` implies `D_w = D_v`;
//! * heredity: `w R_k v` implies `≡_w ⊆ ≡_v`;
//! * congruence: `≡_w` respects every letter's interpretation at `w`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::syntax::Var;

/// Domain element identifier.
pub type Element = u32;

/// Index of a world within its frame's declaration order.
pub type WorldId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    Expanding,
    #[serde(alias = "constant")]
    LocallyConstant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityMode {
    Congruence,
    Identity,
    None,
}

impl FromStr for DomainMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expanding" => Ok(DomainMode::Expanding),
            "constant" | "locally_constant" | "locally-constant" => Ok(DomainMode::LocallyConstant),
            _ => Err(format!("unknown domain mode `{s}` (expected expanding|constant)")),
        }
    }
}

impl FromStr for EqualityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "congruence" => Ok(EqualityMode::Congruence),
            "identity" => Ok(EqualityMode::Identity),
            "none" => Ok(EqualityMode::None),
            _ => Err(format!("unknown equality mode `{s}` (expected congruence|identity|none)")),
        }
    }
}

impl fmt::Display for DomainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainMode::Expanding => "expanding",
            DomainMode::LocallyConstant => "locally_constant",
        })
    }
}

impl fmt::Display for EqualityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqualityMode::Congruence => "congruence",
            EqualityMode::Identity => "identity",
            EqualityMode::None => "none",
        })
    }
}

/// A semantics mode: domain condition × treatment of equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modes {
    pub domains: DomainMode,
    pub equality: EqualityMode,
}

impl Modes {
    pub const fn new(domains: DomainMode, equality: EqualityMode) -> Self {
        Modes { domains, equality }
    }

    /// The four modes of the language with equality.
    pub const EQUALITY_MODES: [Modes; 4] = [
        Modes::new(DomainMode::Expanding, EqualityMode::Congruence),
        Modes::new(DomainMode::Expanding, EqualityMode::Identity),
        Modes::new(DomainMode::LocallyConstant, EqualityMode::Congruence),
        Modes::new(DomainMode::LocallyConstant, EqualityMode::Identity),
    ];
}

impl fmt::Display for Modes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.domains, self.equality)
    }
}

/// A finite Kripke frame with `n` accessibility relations.
///
/// Relations are keyed by their 1-based index. The constructor does not
/// check anything; run [`validate_frame`] before relying on the frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeFrame {
    worlds: Vec<String>,
    n: usize,
    relations: BTreeMap<usize, BTreeSet<(WorldId, WorldId)>>,
}

impl KripkeFrame {
    pub fn new<S: Into<String>>(n: usize, worlds: impl IntoIterator<Item = S>) -> Self {
        KripkeFrame {
            worlds: worlds.into_iter().map(Into::into).collect(),
            n,
            relations: (1..=n).map(|k| (k, BTreeSet::new())).collect(),
        }
    }

    /// Frame on worlds named `0`, `1`, … `count - 1`.
    pub fn numbered(n: usize, count: usize) -> Self {
        KripkeFrame::new(n, (0..count).map(|i| i.to_string()))
    }

    /// Builds a frame from world names and `(k, from, to)` edges given by name.
    ///
    /// # Panics
    /// If an edge names an undeclared world.
    pub fn from_edges(n: usize, worlds: &[&str], edges: &[(usize, &str, &str)]) -> Self {
        let mut frame = KripkeFrame::new(n, worlds.iter().copied());
        for &(k, from, to) in edges {
            let a = frame.world_index(from).expect("undeclared world");
            let b = frame.world_index(to).expect("undeclared world");
            frame.add_edge(k, a, b);
        }
        frame
    }

    pub fn add_edge(&mut self, k: usize, from: WorldId, to: WorldId) {
        self.relations.entry(k).or_default().insert((from, to));
    }

    pub fn with_edge(mut self, k: usize, from: WorldId, to: WorldId) -> Self {
        self.add_edge(k, from, to);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_name(&self, w: WorldId) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, name: &str) -> Option<WorldId> {
        self.worlds.iter().position(|w| w == name)
    }

    /// Pairs of relation `k` (empty for an unknown index).
    pub fn relation(&self, k: usize) -> impl Iterator<Item = (WorldId, WorldId)> + '_ {
        self.relations.get(&k).into_iter().flatten().copied()
    }

    /// Every edge as `(k, from, to)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, WorldId, WorldId)> + '_ {
        self.relations
            .iter()
            .flat_map(|(&k, pairs)| pairs.iter().map(move |&(a, b)| (k, a, b)))
    }

    pub fn has_edge(&self, k: usize, from: WorldId, to: WorldId) -> bool {
        self.relations.get(&k).is_some_and(|r| r.contains(&(from, to)))
    }

    pub fn successors(&self, k: usize, w: WorldId) -> Vec<WorldId> {
        match self.relations.get(&k) {
            Some(r) => r.range((w, 0)..(w + 1, 0)).map(|&(_, v)| v).collect(),
            None => Vec::new(),
        }
    }

    /// Successor lists indexed `[k - 1][w]`.
    pub fn successor_table(&self) -> Vec<Vec<Vec<WorldId>>> {
        (1..=self.n)
            .map(|k| (0..self.len()).map(|w| self.successors(k, w)).collect())
            .collect()
    }

    /// Worlds reachable from `w` in zero or more steps along any relation.
    pub fn reachable_from(&self, w: WorldId) -> BTreeSet<WorldId> {
        let mut seen = BTreeSet::from([w]);
        let mut stack = vec![w];
        while let Some(u) = stack.pop() {
            for (_, a, b) in self.edges() {
                if a == u && seen.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// A partition of a world's domain into equivalence classes.
///
/// Normalised: every class is sorted and classes are ordered by their
/// least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Vec<Element>>", into = "Vec<Vec<Element>>")]
pub struct Partition(Vec<Vec<Element>>);

impl Partition {
    pub fn from_classes(classes: impl IntoIterator<Item = Vec<Element>>) -> Self {
        let mut classes: Vec<Vec<Element>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        classes.sort();
        Partition(classes)
    }

    pub fn identity<'a>(domain: impl IntoIterator<Item = &'a Element>) -> Self {
        Partition(domain.into_iter().map(|&e| vec![e]).collect())
    }

    pub fn classes(&self) -> &[Vec<Element>] {
        &self.0
    }

    pub fn class_of(&self, e: Element) -> Option<usize> {
        self.0.iter().position(|c| c.contains(&e))
    }

    pub fn same_class(&self, a: Element, b: Element) -> bool {
        match self.class_of(a) {
            Some(i) => self.0[i].contains(&b),
            None => false,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|c| c.len() == 1)
    }
}

impl From<Vec<Vec<Element>>> for Partition {
    fn from(classes: Vec<Vec<Element>>) -> Self {
        Partition::from_classes(classes)
    }
}

impl From<Partition> for Vec<Vec<Element>> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// Per-world extension of one predicate letter: a set of argument tuples.
pub type Extension = BTreeSet<Vec<Element>>;

/// A finite augmented model, possibly with equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedModel {
    pub frame: KripkeFrame,
    /// `D_w`, indexed by world.
    pub domains: Vec<BTreeSet<Element>>,
    /// `≡_w`, indexed by world; `None` when equality is not interpreted
    /// (and optional in identity mode).
    pub equiv: Option<Vec<Partition>>,
    /// Letter name to per-world extension. Missing letters are empty.
    pub interp: BTreeMap<String, Vec<Extension>>,
    pub domain_mode: DomainMode,
    pub equality_mode: EqualityMode,
}

impl AugmentedModel {
    /// A model with the given domains, no letters, and identity partitions
    /// whenever the equality mode interprets `=`.
    pub fn new(frame: KripkeFrame, domains: Vec<BTreeSet<Element>>, modes: Modes) -> Self {
        let equiv = match modes.equality {
            EqualityMode::None => None,
            _ => Some(domains.iter().map(Partition::identity).collect()),
        };
        AugmentedModel {
            frame,
            domains,
            equiv,
            interp: BTreeMap::new(),
            domain_mode: modes.domains,
            equality_mode: modes.equality,
        }
    }

    pub fn modes(&self) -> Modes {
        Modes::new(self.domain_mode, self.equality_mode)
    }

    /// Sets the extension of a monadic letter at world `w`.
    pub fn set_unary(&mut self, pred: &str, w: WorldId, elems: impl IntoIterator<Item = Element>) {
        let worlds = self.frame.len();
        let ext = self
            .interp
            .entry(pred.to_string())
            .or_insert_with(|| vec![Extension::new(); worlds]);
        ext[w] = elems.into_iter().map(|e| vec![e]).collect();
    }

    pub fn extension(&self, pred: &str, w: WorldId) -> Option<&Extension> {
        self.interp.get(pred).and_then(|per_world| per_world.get(w))
    }

    /// The class partition at `w` (identity if none is stored).
    pub fn partition(&self, w: WorldId) -> Partition {
        match &self.equiv {
            Some(p) if p.len() > w => p[w].clone(),
            _ => Partition::identity(&self.domains[w]),
        }
    }
}

/// A map from variables to domain elements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<Var, Element>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn with(mut self, x: impl Into<Var>, e: Element) -> Self {
        self.0.insert(x.into(), e);
        self
    }

    pub fn insert(&mut self, x: Var, e: Element) {
        self.0.insert(x, e);
    }

    pub fn get(&self, x: &Var) -> Option<Element> {
        self.0.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, Element)> {
        self.0.iter().map(|(x, &e)| (x, e))
    }
}

impl FromStr for Assignment {
    type Err = String;

    /// Parses `x=0,y=1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut a = Assignment::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (x, e) = part
                .split_once('=')
                .ok_or_else(|| format!("bad assignment `{part}` (expected var=element)"))?;
            let e = e
                .trim()
                .parse::<Element>()
                .map_err(|_| format!("bad element in `{part}`"))?;
            a.insert(Var::new(x.trim()), e);
        }
        Ok(a)
    }
}

/// A violated structural condition, with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ModalCount { n: usize },
    NoWorlds,
    DuplicateWorld { world: String },
    UndeclaredWorld { relation: usize, world: String },
    RelationIndex { relation: usize },
    Shape { detail: String },
    EmptyDomain { world: String },
    Expanding { relation: usize, from: String, to: String, missing: Vec<Element> },
    LocallyConstant { relation: usize, from: String, to: String },
    MissingEquivalence,
    UnexpectedEquivalence,
    NotPartition { world: String, detail: String },
    NotIdentity { world: String, a: Element, b: Element },
    Heredity { relation: usize, from: String, to: String, a: Element, b: Element },
    Congruence { world: String, letter: String, a: Element, b: Element },
    ForeignElement { world: String, letter: String, element: Element },
    Arity { letter: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ModalCount { n } => write!(f, "modal count {n}: at least one modality required"),
            Violation::NoWorlds => write!(f, "frame has no worlds"),
            Violation::DuplicateWorld { world } => write!(f, "world `{world}` declared twice"),
            Violation::UndeclaredWorld { relation, world } => {
                write!(f, "R_{relation} mentions undeclared world `{world}`")
            }
            Violation::RelationIndex { relation } => write!(f, "relation index {relation} out of range"),
            Violation::Shape { detail } => write!(f, "malformed model: {detail}"),
            Violation::EmptyDomain { world } => write!(f, "domain of `{world}` is empty"),
            Violation::Expanding { relation, from, to, missing } => write!(
                f,
                "(E) violated at ({from}, {to}) on R_{relation}: {missing:?} missing from D_{to}"
            ),
            Violation::LocallyConstant { relation, from, to } => {
                write!(f, "(C) violated at ({from}, {to}) on R_{relation}")
            }
            Violation::MissingEquivalence => write!(f, "congruence mode requires equivalences"),
            Violation::UnexpectedEquivalence => write!(f, "equivalences given in no-equality mode"),
            Violation::NotPartition { world, detail } => {
                write!(f, "equivalence at `{world}` is not a partition of its domain: {detail}")
            }
            Violation::NotIdentity { world, a, b } => {
                write!(f, "identity mode but {a} and {b} are merged at `{world}`")
            }
            Violation::Heredity { relation, from, to, a, b } => write!(
                f,
                "(H) violated at ({from}, {to}) on R_{relation}: {a} ≡ {b} at {from} but not at {to}"
            ),
            Violation::Congruence { world, letter, a, b } => write!(
                f,
                "congruence violated at `{world}` on {letter}: {a} ≡ {b} but they disagree"
            ),
            Violation::ForeignElement { world, letter, element } => {
                write!(f, "{letter} at `{world}` mentions {element}, outside the domain")
            }
            Violation::Arity { letter } => write!(f, "{letter} has tuples of different lengths"),
        }
    }
}

/// Checks a frame: at least one modality and one world, unique names,
/// and every relation pair within declared worlds and indices.
pub fn validate_frame(frame: &KripkeFrame) -> Vec<Violation> {
    let mut out = Vec::new();
    if frame.n == 0 {
        out.push(Violation::ModalCount { n: 0 });
    }
    if frame.worlds.is_empty() {
        out.push(Violation::NoWorlds);
    }
    let mut seen = BTreeSet::new();
    for w in &frame.worlds {
        if !seen.insert(w) {
            out.push(Violation::DuplicateWorld { world: w.clone() });
        }
    }
    for (&k, pairs) in &frame.relations {
        if k == 0 || k > frame.n {
            if !pairs.is_empty() {
                out.push(Violation::RelationIndex { relation: k });
            }
            continue;
        }
        let mut bad = BTreeSet::new();
        for &(a, b) in pairs {
            for w in [a, b] {
                if w >= frame.len() {
                    bad.insert(w);
                }
            }
        }
        for w in bad {
            out.push(Violation::UndeclaredWorld { relation: k, world: format!("#{w}") });
        }
    }
    out
}

/// Checks every condition a model must meet for its declared modes and
/// returns all violations found.
pub fn validate_model(m: &AugmentedModel) -> Vec<Violation> {
    let mut out = validate_frame(&m.frame);
    if !out.is_empty() {
        return out;
    }
    let frame = &m.frame;
    let name = |w: WorldId| frame.world_name(w).to_string();
    if m.domains.len() != frame.len() {
        out.push(Violation::Shape {
            detail: format!("{} domains for {} worlds", m.domains.len(), frame.len()),
        });
        return out;
    }
    for (w, d) in m.domains.iter().enumerate() {
        if d.is_empty() {
            out.push(Violation::EmptyDomain { world: name(w) });
        }
    }
    for (k, a, b) in frame.edges() {
        let missing: Vec<Element> = m.domains[a].difference(&m.domains[b]).copied().collect();
        if !missing.is_empty() {
            out.push(Violation::Expanding { relation: k, from: name(a), to: name(b), missing });
        }
        if m.domain_mode == DomainMode::LocallyConstant && m.domains[a] != m.domains[b] {
            out.push(Violation::LocallyConstant { relation: k, from: name(a), to: name(b) });
        }
    }

    for (letter, per_world) in &m.interp {
        if per_world.len() != frame.len() {
            out.push(Violation::Shape {
                detail: format!("{letter} interpreted at {} of {} worlds", per_world.len(), frame.len()),
            });
            continue;
        }
        let arities: BTreeSet<usize> = per_world.iter().flatten().map(Vec::len).collect();
        if arities.len() > 1 || arities.contains(&0) {
            out.push(Violation::Arity { letter: letter.clone() });
        }
        for (w, ext) in per_world.iter().enumerate() {
            let foreign = ext.iter().flatten().find(|e| !m.domains[w].contains(e));
            if let Some(&element) = foreign {
                out.push(Violation::ForeignElement { world: name(w), letter: letter.clone(), element });
            }
        }
    }

    let partitions = match (&m.equiv, m.equality_mode) {
        (Some(_), EqualityMode::None) => {
            out.push(Violation::UnexpectedEquivalence);
            return out;
        }
        (None, EqualityMode::Congruence) => {
            out.push(Violation::MissingEquivalence);
            return out;
        }
        (None, _) => return out,
        (Some(p), _) => p,
    };
    if partitions.len() != frame.len() {
        out.push(Violation::Shape {
            detail: format!("{} partitions for {} worlds", partitions.len(), frame.len()),
        });
        return out;
    }
    let mut partitions_ok = true;
    for (w, p) in partitions.iter().enumerate() {
        if let Some(detail) = partition_defect(p, &m.domains[w]) {
            out.push(Violation::NotPartition { world: name(w), detail });
            partitions_ok = false;
        }
    }
    if !partitions_ok {
        return out;
    }

    if m.equality_mode == EqualityMode::Identity {
        for (w, p) in partitions.iter().enumerate() {
            if let Some(c) = p.classes().iter().find(|c| c.len() > 1) {
                out.push(Violation::NotIdentity { world: name(w), a: c[0], b: c[1] });
            }
        }
        return out;
    }

    for (k, a, b) in frame.edges() {
        let at_b = &partitions[b];
        let witness = partitions[a].classes().iter().find_map(|c| {
            c.iter().skip(1).find(|&&e| !at_b.same_class(c[0], e)).map(|&e| (c[0], e))
        });
        if let Some((x, y)) = witness {
            out.push(Violation::Heredity { relation: k, from: name(a), to: name(b), a: x, b: y });
        }
    }

    for (letter, per_world) in &m.interp {
        for (w, ext) in per_world.iter().enumerate() {
            if let Some((a, b)) = congruence_witness(&partitions[w], ext) {
                out.push(Violation::Congruence { world: name(w), letter: letter.clone(), a, b });
            }
        }
    }
    out
}

fn partition_defect(p: &Partition, domain: &BTreeSet<Element>) -> Option<String> {
    let mut seen = BTreeSet::new();
    for c in p.classes() {
        if c.is_empty() {
            return Some("empty class".into());
        }
        for &e in c {
            if !domain.contains(&e) {
                return Some(format!("{e} is not in the domain"));
            }
            if !seen.insert(e) {
                return Some(format!("{e} occurs in two classes"));
            }
        }
    }
    domain
        .iter()
        .find(|e| !seen.contains(e))
        .map(|e| format!("{e} is not covered"))
}

/// Finds `a ≡ b` such that replacing `a` by `b` in some tuple of `ext`
/// leaves the extension.
fn congruence_witness(p: &Partition, ext: &Extension) -> Option<(Element, Element)> {
    for tuple in ext {
        for (i, &a) in tuple.iter().enumerate() {
            let Some(c) = p.class_of(a) else { continue };
            for &b in &p.classes()[c] {
                let mut moved = tuple.clone();
                moved[i] = b;
                if !ext.contains(&moved) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Replaces every `≡_w` by the identity on `D_w` and switches the model to
/// identity mode.
pub fn make_identity_equality(m: &AugmentedModel) -> AugmentedModel {
    let mut out = m.clone();
    out.equiv = Some(m.domains.iter().map(Partition::identity).collect());
    out.equality_mode = EqualityMode::Identity;
    out
}
