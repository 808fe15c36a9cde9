//! Evaluates a few formulas in the Barcan countermodel, world by world.

use finmok::json::parse_model;
use finmok::modelcheck::{find_failure, true_at};
use finmok::syntax::parse_formula;

fn main() {
    let model = parse_model(include_str!("data/barcan_countermodel.json")).expect("model");
    let formulas = [
        "(forall x. [1] P(x)) -> [1] forall x. P(x)",
        "([1] forall x. P(x)) -> forall x. [1] P(x)",
        "exists x. P(x)",
        "<1> exists x. P(x)",
        "x = y -> [1] x = y",
    ];
    for text in formulas {
        let f = parse_formula(text, 1).unwrap();
        let cells: Vec<String> = (0..model.frame.len())
            .map(|w| format!("{}={}", model.frame.world_name(w), true_at(&model, w, &f).unwrap()))
            .collect();
        let first = find_failure(&model, &f).unwrap().map(|w| model.frame.world_name(w).to_string());
        println!("{text:<46} {}  fails first at {}", cells.join(" "), first.as_deref().unwrap_or("-"));
    }
}
