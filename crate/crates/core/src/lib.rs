//! Parsing, model checking and bounded validity search for monadic
//! multimodal predicate formulas with equality over finite Kripke frames.

pub mod cli;
pub mod corpus;
pub mod decide;
pub mod frameclass;
pub mod json;
pub mod modelcheck;
pub mod semantics;
pub mod syntax;
