//! Decides a handful of formulas on the two-world chain in all four
//! semantics and prints the verdicts. Congruence runs with `=` stop at
//! bound 3.

use finmok::decide::{decide_validity, DecideOptions, Status};
use finmok::json::parse_frame;
use finmok::semantics::{DomainMode, EqualityMode, Modes};
use finmok::syntax::parse_formula;

fn main() {
    let frame = parse_frame(include_str!("data/chain.json")).unwrap();
    let formulas = [
        "x = y -> [1] x = y",
        "x != y -> [1] x != y",
        "(forall x. [1] P(x)) -> [1] forall x. P(x)",
        "([1] forall x. P(x)) -> forall x. [1] P(x)",
    ];
    for text in formulas {
        let f = parse_formula(text, 1).unwrap();
        println!("{text}");
        for domains in [DomainMode::Expanding, DomainMode::LocallyConstant] {
            for equality in [EqualityMode::Congruence, EqualityMode::Identity] {
                let bound = (equality == EqualityMode::Congruence && f.has_equality()).then_some(3);
                let opts = DecideOptions { bound, ..DecideOptions::default() };
                let v = decide_validity(&frame, &f, Modes::new(domains, equality), &opts).unwrap();
                let extra = match (&v.status, &v.certificate) {
                    (Status::Countermodel, Some(c)) => {
                        let sizes: Vec<usize> = c.model.domains.iter().map(|d| d.len()).collect();
                        format!("domain sizes {sizes:?}, fails at {}", frame.world_name(c.failing_world))
                    }
                    _ if v.certified => "certified".to_string(),
                    _ => format!("to bound {}", v.bound_used),
                };
                println!("  {:<16} {:<11} {:<13} {extra}", domains.to_string(), equality.to_string(), v.status.to_string());
            }
        }
    }
}
