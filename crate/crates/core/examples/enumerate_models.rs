//! Counts models with fixed domain sizes and shows the first few.

use std::collections::BTreeMap;

use finmok::decide::enumerate_models;
use finmok::json::{model_to_doc, parse_frame};
use finmok::semantics::{DomainMode, EqualityMode, Modes};

fn main() {
    let frame = parse_frame(include_str!("data/chain.json")).unwrap();
    let letters = BTreeMap::from([("P".to_string(), 1)]);
    for equality in [EqualityMode::None, EqualityMode::Identity, EqualityMode::Congruence] {
        for sizes in [[1, 1], [1, 2], [2, 2]] {
            let modes = Modes::new(DomainMode::Expanding, equality);
            let count = enumerate_models(&frame, &sizes, &letters, modes).unwrap().count();
            println!("{:<11} sizes {sizes:?}: {count} models", equality.to_string());
        }
    }
    let modes = Modes::new(DomainMode::Expanding, EqualityMode::Congruence);
    let first = enumerate_models(&frame, &[2, 2], &BTreeMap::new(), modes).unwrap().take(3);
    for m in first {
        println!("{}", serde_json::to_string(&model_to_doc(&m)).unwrap());
    }
}
