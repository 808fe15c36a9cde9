//! Parses formulas, prints them back and reports their measures.
//!
//! cargo run --example parse_print -- "x = y -> [1] x = y"

use finmok::syntax::{check_monadic, metrics, parse_formula, print_formula, universal_closure};

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = vec![
            "x = y -> [1] x = y".into(),
            "(forall x. [1] P(x)) -> [1] forall x. P(x)".into(),
            "<2> exists y. P(y) & ~Q(x)".into(),
            "forall x. exists y. R(x, y)".into(),
        ];
    }
    for text in inputs {
        match parse_formula(&text, 2) {
            Ok(f) => {
                let m = metrics(&f);
                println!("{}", print_formula(&f));
                println!("  closure      {}", universal_closure(&f));
                println!("  signature    {}", check_monadic(&f));
                println!(
                    "  letters {} variables {} modal depth {} quantifier rank {}",
                    m.letters, m.variables, m.modal_depth, m.quantifier_rank
                );
            }
            Err(e) => println!("{text}\n  error: {e}"),
        }
    }
}
