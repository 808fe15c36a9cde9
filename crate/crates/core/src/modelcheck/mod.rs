//! Truth of formulas in finite augmented models.
//!
//! `x = y` holds at `w` iff the assigned elements are `≡_w`-equivalent;
//! quantifiers range over `D_w`; `[k] φ` holds iff `φ` holds under the same
//! assignment at every `R_k`-successor. Expanding domains guarantee the
//! assignment stays inside the successor's domain.

pub(crate) mod eval;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::semantics::{AugmentedModel, Assignment, Element, EqualityMode, WorldId};
use crate::syntax::{free_vars, universal_closure, Formula, Var};
use eval::{Compiled, Dense, ElementIndex};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unassigned free variable `{0}`")]
    UnassignedVariable(Var),
    #[error("`{var}` is assigned {element}, which is not in the domain of `{world}`")]
    OutsideDomain { var: Var, element: Element, world: String },
    #[error("equality atom in a model without equality")]
    EqualityWithoutEquality,
    #[error("no world with index {0}")]
    UnknownWorld(WorldId),
    #[error("modality {index} exceeds the frame's {n} relations")]
    ModalIndex { index: usize, n: usize },
}

/// Builds the dense form of `m` for the letters of `c`.
pub(crate) fn densify(m: &AugmentedModel, c: &Compiled) -> (Dense, ElementIndex) {
    let to_dense: BTreeMap<Element, u32> = m
        .domains
        .iter()
        .flatten()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i as u32))
        .collect();
    let index = ElementIndex { to_dense };
    let n_elems = index.to_dense.len();
    let domains: Vec<Vec<u32>> = m
        .domains
        .iter()
        .map(|d| d.iter().map(|&e| index.to_dense[&e]).collect())
        .collect();
    let mut class_of = vec![vec![0u32; n_elems]; m.frame.len()];
    let mut n_classes = Vec::with_capacity(m.frame.len());
    for w in 0..m.frame.len() {
        let p = m.partition(w);
        for (ci, class) in p.classes().iter().enumerate() {
            for e in class {
                if let Some(d) = index.dense(*e) {
                    class_of[w][d as usize] = ci as u32;
                }
            }
        }
        n_classes.push(p.classes().len());
    }
    let arity = c.letters.iter().map(|(_, a)| *a).collect();
    let mut dense = Dense::new(m.frame.successor_table(), domains, class_of, n_classes, arity);
    for (l, (name, arity)) in c.letters.iter().enumerate() {
        let Some(per_world) = m.interp.get(name) else { continue };
        for (w, ext) in per_world.iter().enumerate().take(m.frame.len()) {
            for tuple in ext.iter().filter(|t| t.len() == *arity) {
                let classes: Option<Vec<u32>> = tuple
                    .iter()
                    .map(|e| index.dense(*e).map(|d| dense.class_of[w][d as usize]))
                    .collect();
                if let Some(classes) = classes {
                    let idx = dense.tuple_index(w, classes.into_iter());
                    let off = dense.offset[l][w];
                    dense.bits[off + idx] = true;
                }
            }
        }
    }
    (dense, index)
}

fn precheck(m: &AugmentedModel, w: WorldId, f: &Formula) -> Result<(), EvalError> {
    if w >= m.frame.len() {
        return Err(EvalError::UnknownWorld(w));
    }
    if m.equality_mode == EqualityMode::None && f.has_equality() {
        return Err(EvalError::EqualityWithoutEquality);
    }
    let index = f.max_modal_index();
    if index > m.frame.n() {
        return Err(EvalError::ModalIndex { index, n: m.frame.n() });
    }
    Ok(())
}

/// Whether `m, w ⊨ f[a]`.
pub fn satisfies(m: &AugmentedModel, w: WorldId, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    precheck(m, w, f)?;
    for x in free_vars(f) {
        let e = a.get(&x).ok_or_else(|| EvalError::UnassignedVariable(x.clone()))?;
        if !m.domains[w].contains(&e) {
            return Err(EvalError::OutsideDomain {
                var: x,
                element: e,
                world: m.frame.world_name(w).to_string(),
            });
        }
    }
    let compiled = Compiled::new(f);
    let (dense, index) = densify(m, &compiled);
    let mut env = compiled.fresh_env();
    for (slot, x) in compiled.slots.iter().enumerate() {
        if let Some(d) = a.get(x).and_then(|e| index.dense(e)) {
            env[slot] = d;
        }
    }
    Ok(dense.eval(w, &compiled.root, &mut env))
}

/// Truth at a world: the universal closure of `f` holds at `w`.
pub fn true_at(m: &AugmentedModel, w: WorldId, f: &Formula) -> Result<bool, EvalError> {
    satisfies(m, w, &universal_closure(f), &Assignment::new())
}

/// Least world (in declaration order) where `f` is not true, if any.
pub fn find_failure(m: &AugmentedModel, f: &Formula) -> Result<Option<WorldId>, EvalError> {
    let closed = universal_closure(f);
    precheck(m, 0, &closed)?;
    let compiled = Compiled::new(&closed);
    let (dense, _) = densify(m, &compiled);
    let mut env = compiled.fresh_env();
    Ok(dense.first_failure(&compiled.root, &mut env))
}

pub fn true_in_model(m: &AugmentedModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(find_failure(m, f)?.is_none())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::semantics::{DomainMode, KripkeFrame, Modes, Partition};
    use crate::syntax::parse_formula;

    fn set(xs: &[Element]) -> BTreeSet<Element> {
        xs.iter().copied().collect()
    }

    /// `w R v`, `D_w = {0}`, `D_v = {0, 1}`, `P` true of 0 at both worlds.
    fn barcan_failure() -> AugmentedModel {
        let frame = KripkeFrame::from_edges(1, &["w", "v"], &[(1, "w", "v")]);
        let modes = Modes::new(DomainMode::Expanding, EqualityMode::None);
        let mut m = AugmentedModel::new(frame, vec![set(&[0]), set(&[0, 1])], modes);
        m.set_unary("P", 0, [0]);
        m.set_unary("P", 1, [0]);
        m
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, 1).unwrap()
    }

    #[test]
    fn vacuous_box() {
        let modes = Modes::new(DomainMode::Expanding, EqualityMode::None);
        let m = AugmentedModel::new(KripkeFrame::new(1, ["w"]), vec![set(&[0])], modes);
        assert!(satisfies(&m, 0, &f("[1] F"), &Assignment::new()).unwrap());
    }

    #[test]
    fn diamond_finds_new_element() {
        let m = barcan_failure();
        assert!(satisfies(&m, 0, &f("<1> exists x. ~P(x)"), &Assignment::new()).unwrap());
    }

    #[test]
    fn barcan_fails_at_root() {
        let m = barcan_failure();
        let a = Assignment::new();
        assert!(satisfies(&m, 0, &f("forall x. [1] P(x)"), &a).unwrap());
        assert!(!satisfies(&m, 0, &f("[1] forall x. P(x)"), &a).unwrap());
        let bf = Formula::barcan(1, "P");
        assert!(!true_in_model(&m, &bf).unwrap());
        assert_eq!(find_failure(&m, &bf).unwrap(), Some(0));
        assert!(true_in_model(&m, &Formula::Top).unwrap());
    }

    #[test]
    fn closure_over_merged_classes() {
        let frame = KripkeFrame::new(1, ["w"]);
        let modes = Modes::new(DomainMode::Expanding, EqualityMode::Congruence);
        let mut m = AugmentedModel::new(frame, vec![set(&[0, 1])], modes);
        assert!(!true_at(&m, 0, &f("x = y")).unwrap());
        m.equiv = Some(vec![Partition::from_classes([vec![0, 1]])]);
        assert!(true_at(&m, 0, &f("x = y")).unwrap());
    }

    #[test]
    fn assignment_errors() {
        let m = barcan_failure();
        let px = f("P(x)");
        assert_eq!(
            satisfies(&m, 0, &px, &Assignment::new()),
            Err(EvalError::UnassignedVariable(Var::new("x")))
        );
        assert!(matches!(
            satisfies(&m, 0, &px, &Assignment::new().with("x", 1)),
            Err(EvalError::OutsideDomain { element: 1, .. })
        ));
        assert!(satisfies(&m, 1, &px, &Assignment::new().with("x", 0)).unwrap());
        assert_eq!(
            satisfies(&m, 0, &f("x = x"), &Assignment::new().with("x", 0)),
            Err(EvalError::EqualityWithoutEquality)
        );
        assert_eq!(satisfies(&m, 5, &Formula::Top, &Assignment::new()), Err(EvalError::UnknownWorld(5)));
    }

    #[test]
    fn polyadic_letters_evaluate() {
        let frame = KripkeFrame::new(1, ["w"]);
        let modes = Modes::new(DomainMode::Expanding, EqualityMode::Identity);
        let mut m = AugmentedModel::new(frame, vec![set(&[3, 7])], modes);
        m.interp.insert("Q".into(), vec![[vec![3, 7]].into_iter().collect()]);
        let sym = f("forall x. forall y. (Q(x, y) -> Q(y, x))");
        assert!(!true_at(&m, 0, &sym).unwrap());
        assert!(true_at(&m, 0, &f("exists x. exists y. Q(x, y) & x != y")).unwrap());
    }
}
