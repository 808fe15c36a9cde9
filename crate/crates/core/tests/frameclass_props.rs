mod common;

use std::collections::BTreeSet;

use finmok::decide::{verify_certificate, SearchOptions, Status, Verdict};
use finmok::frameclass::{
    check_predicates, class_refute, enumerate_frames, frames_of_size, subframe, FrameClassSpec, FramePredicate,
};
use finmok::semantics::{DomainMode, EqualityMode, Modes};
use finmok::syntax::{parse_formula, Formula};
use proptest::prelude::*;
use rand::Rng;

const CLOSED: [fn(usize) -> FramePredicate; 5] = [
    FramePredicate::Reflexive,
    FramePredicate::Transitive,
    FramePredicate::Symmetric,
    FramePredicate::Linear,
    |k| FramePredicate::BranchingAtMost(k, 1),
];

proptest! {
    #[test]
    fn closed_predicates_survive_subframes(seed in any::<u64>(), which in 0usize..5, worlds in 1usize..6) {
        let mut r = common::rng(seed);
        let frame = common::random_frame(&mut r, 2, worlds, 0.5);
        let p = CLOSED[which](1 + (seed % 2) as usize);
        prop_assume!(p.holds(&frame));
        let subset: BTreeSet<usize> = (0..worlds).filter(|_| r.gen_bool(0.6)).collect();
        prop_assume!(!subset.is_empty());
        let sub = subframe(&frame, &subset).unwrap();
        prop_assert!(p.holds(&sub), "{} lost on {:?}", p, subset);
    }
}

#[test]
fn seriality_is_not_subframe_closed() {
    let mut r = common::rng(common::SEED);
    let lost = (0..200).any(|_| {
        let frame = common::random_frame(&mut r, 1, 3, 0.4);
        FramePredicate::Serial(1).holds(&frame)
            && (0..3).any(|w| !FramePredicate::Serial(1).holds(&subframe(&frame, &BTreeSet::from([w])).unwrap()))
    });
    assert!(lost);
}

#[test]
fn labeled_frame_counts() {
    for n in 1..=2 {
        let all = FrameClassSpec::all(n);
        for s in 1..=2 {
            assert_eq!(frames_of_size(&all, s).count(), 1 << (n * s * s), "n={n} s={s}");
        }
        assert_eq!(enumerate_frames(&all, 2).count(), (1 << n) + (1 << (4 * n)));
    }
    let branching = FrameClassSpec::all(1).with(FramePredicate::BranchingAtMost(1, 1));
    assert_eq!(frames_of_size(&branching, 2).count(), 9);
}

fn class_search(spec: &FrameClassSpec, f: &Formula, modes: Modes, worlds: usize, size: usize) -> finmok::frameclass::ClassVerdict {
    let v = class_refute(spec, f, modes, worlds, size, &SearchOptions::default()).unwrap();
    if let (Some(frame), Some(cert)) = (&v.frame, &v.certificate) {
        let wrapped = Verdict {
            status: Status::Countermodel,
            bound_used: size,
            certified: false,
            certificate: Some(cert.clone()),
            budget_exhausted: None,
            models_examined: v.models_examined,
        };
        assert!(verify_certificate(&wrapped, frame, f, modes).unwrap());
        assert!(check_predicates(frame, spec).unwrap());
    }
    v
}

#[test]
fn found_countermodels_persist_in_larger_boxes() {
    let modes = Modes::new(DomainMode::Expanding, EqualityMode::Congruence);
    let cases = [
        ("forall x. ([1] P(x) -> P(x))", "all"),
        ("(forall x. [1] P(x)) -> [1] forall x. P(x)", "all"),
        ("x != y -> [1] x != y", "transitive(1)"),
        ("exists x. exists y. x != y", "reflexive(1)"),
        ("<1> T", "all"),
    ];
    for (text, class) in cases {
        let f = parse_formula(text, 1).unwrap();
        let spec = FrameClassSpec::parse(class, 1).unwrap();
        let mut found_at = None;
        for worlds in 1..=2 {
            for size in 1..=2 {
                let v = class_search(&spec, &f, modes, worlds, size);
                if let Some((w0, s0)) = found_at {
                    if worlds >= w0 && size >= s0 {
                        assert_eq!(v.status, Status::Countermodel, "{text} lost at ({worlds}, {size})");
                    }
                }
                if v.status == Status::Countermodel && found_at.is_none() {
                    found_at = Some((worlds, size));
                }
            }
        }
        assert!(found_at.is_some(), "{text}");
    }
}

#[test]
fn reflexive_class_has_no_countermodel() {
    let f = parse_formula("forall x. ([1] P(x) -> P(x))", 1).unwrap();
    let spec = FrameClassSpec::all(1).with(FramePredicate::Reflexive(1));
    for modes in [
        Modes::new(DomainMode::Expanding, EqualityMode::Congruence),
        Modes::new(DomainMode::LocallyConstant, EqualityMode::Identity),
    ] {
        let v = class_search(&spec, &f, modes, 3, 2);
        assert_eq!(v.status, Status::Unknown);
        assert_eq!(v.budget_exhausted, None);
    }
}
