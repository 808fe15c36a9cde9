//! Formulas of the n-modal predicate language with equality.
//!
//! The abstract syntax covers monadic (and, for parsing purposes, polyadic)
//! atoms, the designated equality letter, the classical connectives, the two
//! quantifiers and indexed boxes/diamonds `[k]` / `<k>` for `k` in `1..=n`.

mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_formula, ParseError, ParseErrorKind};
pub use printer::print_formula;

/// An individual variable. Names start with a lowercase letter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// A formula of the language. Modal indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom { pred: String, args: Vec<Var> },
    Equal(Var, Var),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    Box(usize, Box<Formula>),
    Diamond(usize, Box<Formula>),
}

impl Formula {
    pub fn atom<I, V>(pred: &str, args: I) -> Formula
    where
        I: IntoIterator<Item = V>,
        V: Into<Var>,
    {
        Formula::Atom {
            pred: pred.to_string(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn equal(x: impl Into<Var>, y: impl Into<Var>) -> Formula {
        Formula::Equal(x.into(), y.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<Var>, f: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(f))
    }

    pub fn exists(x: impl Into<Var>, f: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(f))
    }

    pub fn boxed(k: usize, f: Formula) -> Formula {
        Formula::Box(k, Box::new(f))
    }

    pub fn diamond(k: usize, f: Formula) -> Formula {
        Formula::Diamond(k, Box::new(f))
    }

    /// The Barcan formula for modality `k`: `(forall x. [k] P(x)) -> [k] forall x. P(x)`.
    pub fn barcan(k: usize, pred: &str) -> Formula {
        Formula::implies(
            Formula::forall("x", Formula::boxed(k, Formula::atom(pred, ["x"]))),
            Formula::boxed(k, Formula::forall("x", Formula::atom(pred, ["x"]))),
        )
    }

    /// The converse Barcan formula for modality `k`.
    pub fn converse_barcan(k: usize, pred: &str) -> Formula {
        Formula::implies(
            Formula::boxed(k, Formula::forall("x", Formula::atom(pred, ["x"]))),
            Formula::forall("x", Formula::boxed(k, Formula::atom(pred, ["x"]))),
        )
    }

    fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom { .. } | Formula::Equal(..) | Formula::Top | Formula::Bottom => vec![],
            Formula::Not(f)
            | Formula::Forall(_, f)
            | Formula::Exists(_, f)
            | Formula::Box(_, f)
            | Formula::Diamond(_, f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Predicate letters occurring in the formula with their arities
    /// (first occurrence wins if a letter is used inconsistently).
    pub fn letters(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Atom { pred, args } = f {
                out.entry(pred.clone()).or_insert(args.len());
            }
        });
        out
    }

    pub fn has_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Equal(..)));
        found
    }

    /// Largest modal index used, or 0 for a non-modal formula.
    pub fn max_modal_index(&self) -> usize {
        let mut max = 0;
        self.visit(&mut |f| {
            if let Formula::Box(k, _) | Formula::Diamond(k, _) = f {
                max = max.max(*k);
            }
        });
        max
    }

    /// Every variable name occurring in the formula, bound or free.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => out.extend(args.iter().cloned()),
            Formula::Equal(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// Free variables of `f`.
pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    free_vars_in_order(f).into_iter().collect()
}

/// Free variables of `f` in order of first (left-to-right) occurrence.
pub fn free_vars_in_order(f: &Formula) -> Vec<Var> {
    fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let note = |x: &Var, bound: &Vec<Var>, out: &mut Vec<Var>| {
            if !bound.contains(x) && !out.contains(x) {
                out.push(x.clone());
            }
        };
        match f {
            Formula::Atom { args, .. } => args.iter().for_each(|x| note(x, bound, out)),
            Formula::Equal(x, y) => {
                note(x, bound, out);
                note(y, bound, out);
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) => go(g, bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Formula::Forall(x, g) | Formula::Exists(x, g) => {
                bound.push(x.clone());
                go(g, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Prefixes a universal quantifier for each free variable, the first
/// occurring variable outermost. Closed formulas are returned unchanged.
pub fn universal_closure(f: &Formula) -> Formula {
    free_vars_in_order(f)
        .into_iter()
        .rev()
        .fold(f.clone(), |acc, x| Formula::Forall(x, Box::new(acc)))
}

/// Size measures of a formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Metrics {
    /// Distinct non-equality predicate letters.
    pub letters: usize,
    /// Distinct variable names, bound or free.
    pub variables: usize,
    pub modal_depth: usize,
    pub quantifier_rank: usize,
    pub modal_indices_used: BTreeSet<usize>,
}

pub fn metrics(f: &Formula) -> Metrics {
    fn depths(f: &Formula) -> (usize, usize) {
        let (md, qr) = f
            .children()
            .into_iter()
            .map(depths)
            .fold((0, 0), |(a, b), (c, d)| (a.max(c), b.max(d)));
        match f {
            Formula::Box(..) | Formula::Diamond(..) => (md + 1, qr),
            Formula::Forall(..) | Formula::Exists(..) => (md, qr + 1),
            _ => (md, qr),
        }
    }
    let (modal_depth, quantifier_rank) = depths(f);
    let mut modal_indices_used = BTreeSet::new();
    f.visit(&mut |g| {
        if let Formula::Box(k, _) | Formula::Diamond(k, _) = g {
            modal_indices_used.insert(*k);
        }
    });
    Metrics {
        letters: f.letters().len(),
        variables: f.variables().len(),
        modal_depth,
        quantifier_rank,
        modal_indices_used,
    }
}

/// Which signature class a formula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    MonadicWithEquality,
    MonadicWithoutEquality,
    NonMonadic,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::MonadicWithEquality => "monadic_with_equality",
            Signature::MonadicWithoutEquality => "monadic_without_equality",
            Signature::NonMonadic => "non_monadic",
        })
    }
}

pub fn check_monadic(f: &Formula) -> Signature {
    let mut monadic = true;
    f.visit(&mut |g| {
        if let Formula::Atom { args, .. } = g {
            monadic &= args.len() == 1;
        }
    });
    if !monadic {
        Signature::NonMonadic
    } else if f.has_equality() {
        Signature::MonadicWithEquality
    } else {
        Signature::MonadicWithoutEquality
    }
}
