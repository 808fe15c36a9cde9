//! Searches frame classes for countermodels.

use finmok::decide::SearchOptions;
use finmok::frameclass::{class_refute, enumerate_frames, FrameClassSpec};
use finmok::semantics::{DomainMode, EqualityMode, Modes};
use finmok::syntax::parse_formula;

fn main() {
    let modes = Modes::new(DomainMode::Expanding, EqualityMode::Congruence);
    let cases = [
        ("all", "forall x. ([1] P(x) -> P(x))"),
        ("reflexive(1)", "forall x. ([1] P(x) -> P(x))"),
        ("all", "(forall x. [1] P(x)) -> [1] forall x. P(x)"),
        ("transitive(1)", "([1] exists x. P(x)) -> [1][1] exists x. P(x)"),
        ("serial(1),branching<=1(1)", "(<1> exists x. P(x)) -> [1] exists x. P(x)"),
    ];
    for (class, text) in cases {
        let spec = FrameClassSpec::parse(class, 1).unwrap();
        let frames = enumerate_frames(&spec, 3).count();
        let f = parse_formula(text, 1).unwrap();
        let v = class_refute(&spec, &f, modes, 3, 2, &SearchOptions::default()).unwrap();
        print!("{class:<28} {text:<48} {} ({frames} frames up to 3 worlds", v.status);
        match &v.frame {
            Some(frame) => println!(", refuted on {} worlds with {} edges)", frame.len(), frame.edges().count()),
            None => println!(", {} examined)", v.frames_examined),
        }
    }
}
