//! Lists the structural violations of a model.
//!
//! cargo run --example validate_model -- path/to/model.json

use finmok::json::{model_from_doc, ModelDoc};
use finmok::semantics::validate_model;

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("read model"),
        None => include_str!("data/broken_heredity.json").to_string(),
    };
    let doc: ModelDoc = serde_json::from_str(&text).expect("model JSON");
    match model_from_doc(&doc) {
        Ok(m) => {
            let violations = validate_model(&m);
            if violations.is_empty() {
                println!("model is valid");
            }
            for v in violations {
                println!("{v}");
            }
        }
        Err(e) => println!("{e}"),
    }
}
