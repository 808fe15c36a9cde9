mod common;

use finmok::modelcheck::{satisfies, true_at, true_in_model};
use finmok::semantics::{make_identity_equality, validate_model, Assignment, DomainMode, EqualityMode, Modes};
use finmok::syntax::{parse_formula, Formula};
use proptest::prelude::*;

const MODES: [Modes; 4] = [
    Modes { domains: DomainMode::Expanding, equality: EqualityMode::Congruence },
    Modes { domains: DomainMode::Expanding, equality: EqualityMode::Identity },
    Modes { domains: DomainMode::LocallyConstant, equality: EqualityMode::Congruence },
    Modes { domains: DomainMode::LocallyConstant, equality: EqualityMode::Identity },
];

fn setup(seed: u64) -> (finmok::semantics::AugmentedModel, Formula) {
    let mut r = common::rng(seed);
    let worlds = 1 + (seed % 3) as usize;
    let frame = common::random_frame(&mut r, 2, worlds, 0.4);
    let modes = MODES[(seed / 3 % 4) as usize];
    let model = common::random_model(&mut r, &frame, modes, 3, &["P", "Q"]);
    let f = common::random_formula(&mut r, &["P", "Q"], &["x", "y"], 2, 2, 1 + (seed % 7) as usize, true);
    (model, f)
}

proptest! {
    #[test]
    fn generated_models_validate(seed in any::<u64>()) {
        let (m, _) = setup(seed);
        prop_assert_eq!(validate_model(&m), vec![]);
    }

    #[test]
    fn evaluator_matches_naive_oracle(seed in any::<u64>()) {
        let (m, f) = setup(seed);
        let naive = common::to_naive(&m);
        for w in 0..m.frame.len() {
            prop_assert_eq!(true_at(&m, w, &f).unwrap(), common::naive_true_at(&naive, w, &f), "world {} formula {}", w, f);
        }
    }

    #[test]
    fn quantifier_and_modal_duality(seed in any::<u64>()) {
        let (m, f) = setup(seed);
        let a = Assignment::new().with("x", *m.domains[0].iter().next().unwrap()).with("y", *m.domains[0].iter().last().unwrap());
        let q = satisfies(&m, 0, &Formula::exists("x", f.clone()), &a).unwrap();
        let dq = satisfies(&m, 0, &Formula::not(Formula::forall("x", Formula::not(f.clone()))), &a).unwrap();
        prop_assert_eq!(q, dq);
        let closed = finmok::syntax::universal_closure(&f);
        for k in 1..=2 {
            let d = true_at(&m, 0, &Formula::diamond(k, closed.clone())).unwrap();
            let nbn = true_at(&m, 0, &Formula::not(Formula::boxed(k, Formula::not(closed.clone())))).unwrap();
            prop_assert_eq!(d, nbn);
        }
    }

    #[test]
    fn equality_is_hereditary_in_valid_models(seed in any::<u64>()) {
        let (m, _) = setup(seed);
        for k in 1..=2 {
            let f = parse_formula(&format!("x = y -> [{k}] x = y"), 2).unwrap();
            prop_assert!(true_in_model(&m, &f).unwrap());
        }
    }

    #[test]
    fn converse_barcan_holds_in_valid_models(seed in any::<u64>()) {
        let (m, _) = setup(seed);
        for k in 1..=2 {
            prop_assert!(true_in_model(&m, &Formula::converse_barcan(k, "P")).unwrap());
        }
    }

    #[test]
    fn identity_partitions_agree_across_modes(seed in any::<u64>()) {
        let (m, f) = setup(seed);
        let id = make_identity_equality(&m);
        let mut cong = id.clone();
        cong.equality_mode = EqualityMode::Congruence;
        prop_assert_eq!(validate_model(&cong), vec![]);
        for w in 0..m.frame.len() {
            prop_assert_eq!(true_at(&id, w, &f).unwrap(), true_at(&cong, w, &f).unwrap());
        }
    }
}
