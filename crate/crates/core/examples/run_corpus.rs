//! Runs the shipped regression corpus and prints a summary line per entry.

use finmok::corpus::{parse_corpus, run_corpus, STANDARD};
use finmok::decide::SearchOptions;

fn main() {
    let corpus = parse_corpus(STANDARD).unwrap();
    let report = run_corpus(&corpus, &SearchOptions::default());
    for r in &report.results {
        let got = r.got.map(|s| s.to_string()).unwrap_or_else(|| "error".into());
        println!("{} {:<48} expected {:<13} got {got}", if r.pass { "ok  " } else { "FAIL" }, r.name, r.expected.to_string());
    }
    println!("{} of {} passed", report.passed, report.total);
}
