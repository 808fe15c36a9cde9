//! Command-line front end.
//!
//! Exit codes: 0 valid / true / passing, 1 countermodel / false /
//! violations / failing corpus, 2 unknown, 64 usage, 65 unreadable or
//! unparsable input (including non-monadic input to `decide`), 70 internal
//! error such as a certificate that does not verify.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::corpus::{parse_corpus, run_corpus, STANDARD};
use crate::decide::{
    decide_validity, refute, verify_certificate, DecideError, DecideOptions, SearchOptions, Status, Verdict,
    DEFAULT_BUDGET,
};
use crate::frameclass::{check_predicates, class_refute, FrameClassSpec};
use crate::json::{class_verdict_to_doc, frame_from_doc, model_from_doc, verdict_to_doc, JsonError, SCHEMA};
use crate::modelcheck::{find_failure, satisfies, true_at};
use crate::semantics::{validate_frame, validate_model, Assignment, DomainMode, EqualityMode, Modes};
use crate::syntax::{check_monadic, metrics, parse_formula, print_formula, Formula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "finmok", version, about = "Model checking and validity search for monadic modal logics with equality")]
struct Cli {
    /// Worker threads for the searches.
    #[arg(long, global = true, env = "FINMOK_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its syntax tree.
    Parse {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Evaluate a formula in a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// World to evaluate at; without it, truth in the whole model.
        #[arg(long)]
        world: Option<String>,
        /// Assignment such as `x=0,y=1`; free variables are otherwise closed
        /// universally.
        #[arg(long)]
        assign: Option<String>,
    },
    /// Check a model (or a frame) against the structural conditions.
    Validate {
        #[arg(long, conflicts_with = "frame", required_unless_present = "frame")]
        model: Option<PathBuf>,
        #[arg(long)]
        frame: Option<PathBuf>,
    },
    /// Decide validity on a frame, or look for a countermodel.
    Decide {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        modes: ModeArgs,
        /// Only search domains up to this size (never answers valid).
        #[arg(long)]
        max_size: Option<usize>,
        /// Override the default per-world domain bound.
        #[arg(long)]
        bound: Option<usize>,
        /// Use the plain bounded search even when the complete one applies.
        #[arg(long)]
        uncertified: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Search a class of frames for a frame and countermodel.
    ClassSearch {
        #[arg(long, default_value = "all")]
        class: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[command(flatten)]
        modes: ModeArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run a regression corpus (the shipped one without a path).
    Corpus {
        path: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Args, Debug)]
struct ModeArgs {
    /// expanding | constant
    #[arg(long, default_value = "expanding")]
    domains: DomainMode,
    /// congruence | identity | none
    #[arg(long, default_value = "congruence")]
    equality: EqualityMode,
}

impl ModeArgs {
    fn modes(&self) -> Modes {
        Modes::new(self.domains, self.equality)
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Candidate models to examine before giving up (0 for no limit).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Report any countermodel rather than the canonically least one.
    #[arg(long)]
    fast: bool,
}

impl SearchArgs {
    fn options(&self, jobs: Option<usize>) -> SearchOptions {
        SearchOptions { budget: (self.budget > 0).then_some(self.budget), fast: self.fast, jobs }
    }
}

/// A failure with its exit code.
struct Failure(i32, String);

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Failure(EXIT_DATA, e.to_string())
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        Failure(EXIT_DATA, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_DATA, format!("{}: {e}", path.display())))
}

fn formula(text: &str, n: usize) -> Result<Formula, Failure> {
    parse_formula(text, n).map_err(|e| Failure(EXIT_DATA, e.to_string()))
}

fn emit(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Valid => EXIT_OK,
        Status::Countermodel => EXIT_NEGATIVE,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Parse { formula: text, n } => {
            let f = formula(&text, n)?;
            emit(
                out,
                &json!({
                    "schema": SCHEMA,
                    "formula": f,
                    "printed": print_formula(&f),
                    "signature": check_monadic(&f),
                    "metrics": metrics(&f),
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Check { model, formula: text, world, assign } => {
            let m = model_from_doc(&serde_json::from_str(&read(&model)?).map_err(JsonError::from)?)?;
            let violations = validate_model(&m);
            if !violations.is_empty() {
                emit(out, &json!({ "schema": SCHEMA, "valid": false, "violations": violations }))?;
                return Ok(EXIT_NEGATIVE);
            }
            let f = formula(&text, m.frame.n())?;
            let eval_err = |e: crate::modelcheck::EvalError| Failure(EXIT_DATA, e.to_string());
            let value = match world {
                Some(name) => {
                    let w = m
                        .frame
                        .world_index(&name)
                        .ok_or_else(|| Failure(EXIT_DATA, format!("no world named `{name}`")))?;
                    let holds = match assign {
                        Some(a) => {
                            let a: Assignment = a.parse().map_err(|e: String| Failure(EXIT_DATA, e))?;
                            satisfies(&m, w, &f, &a).map_err(eval_err)?
                        }
                        None => true_at(&m, w, &f).map_err(eval_err)?,
                    };
                    json!({ "schema": SCHEMA, "world": name, "holds": holds })
                }
                None => {
                    let failing = find_failure(&m, &f).map_err(eval_err)?;
                    json!({
                        "schema": SCHEMA,
                        "holds": failing.is_none(),
                        "failing_world": failing.map(|w| m.frame.world_name(w).to_string()),
                    })
                }
            };
            emit(out, &value)?;
            Ok(if value["holds"] == json!(true) { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Validate { model, frame } => {
            let violations = if let Some(path) = model {
                match serde_json::from_str(&read(&path)?).map_err(JsonError::from).and_then(|d| model_from_doc(&d)) {
                    Ok(m) => validate_model(&m),
                    Err(JsonError::Invalid(v)) => v,
                    Err(e) => return Err(e.into()),
                }
            } else {
                let path = frame.expect("clap requires --model or --frame");
                match serde_json::from_str(&read(&path)?).map_err(JsonError::from).and_then(|d| frame_from_doc(&d)) {
                    Ok(f) => validate_frame(&f),
                    Err(JsonError::Invalid(v)) => v,
                    Err(e) => return Err(e.into()),
                }
            };
            emit(out, &json!({ "schema": SCHEMA, "valid": violations.is_empty(), "violations": violations }))?;
            Ok(if violations.is_empty() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Decide { frame, formula: text, modes, max_size, bound, uncertified, search } => {
            let frame = frame_from_doc(&serde_json::from_str(&read(&frame)?).map_err(JsonError::from)?)?;
            let f = formula(&text, frame.n())?;
            let modes = modes.modes();
            let search = search.options(jobs);
            let v: Verdict = match max_size {
                Some(s) => refute(&frame, &f, modes, s, &search)?,
                None => decide_validity(&frame, &f, modes, &DecideOptions { bound, uncertified, search })?,
            };
            if v.status == Status::Countermodel && !verify_certificate(&v, &frame, &f, modes)? {
                return Err(Failure(EXIT_INTERNAL, "countermodel failed independent verification".into()));
            }
            emit(out, &verdict_to_doc(&v))?;
            Ok(status_code(v.status))
        }
        Command::ClassSearch { class, n, formula: text, max_worlds, max_size, modes, search } => {
            let spec = FrameClassSpec::parse(&class, n).map_err(|e| Failure(EXIT_DATA, e.to_string()))?;
            if n * max_worlds * max_worlds >= 64 {
                return Err(Failure(EXIT_USAGE, format!("{max_worlds} worlds with {n} relations is too many frames")));
            }
            let f = formula(&text, n)?;
            let modes = modes.modes();
            let v = class_refute(&spec, &f, modes, max_worlds, max_size, &search.options(jobs))
                .map_err(|e| Failure(EXIT_DATA, e.to_string()))?;
            if let (Some(frame), Some(cert)) = (&v.frame, &v.certificate) {
                let wrapped = Verdict {
                    status: Status::Countermodel,
                    bound_used: max_size,
                    certified: false,
                    certificate: Some(cert.clone()),
                    budget_exhausted: None,
                    models_examined: v.models_examined,
                };
                let sound = verify_certificate(&wrapped, frame, &f, modes)? && check_predicates(frame, &spec).unwrap_or(false);
                if !sound {
                    return Err(Failure(EXIT_INTERNAL, "countermodel failed independent verification".into()));
                }
            }
            emit(out, &class_verdict_to_doc(&v, &spec.to_string()))?;
            Ok(status_code(v.status))
        }
        Command::Corpus { path, search } => {
            let text = match &path {
                Some(p) => read(p)?,
                None => STANDARD.to_string(),
            };
            let corpus = parse_corpus(&text).map_err(|e| Failure(EXIT_DATA, e.to_string()))?;
            let report = run_corpus(&corpus, &search.options(jobs));
            emit(out, &report)?;
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("finmok").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_prints_ast() {
        let (code, out, _) = run_capture(&["parse", "--formula", "x = y -> [1](x = y)", "--n", "1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["printed"], "x = y -> [1] (x = y)");
        assert_eq!(v["signature"], "monadic_with_equality");
    }

    #[test]
    fn usage_and_parse_errors() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["parse"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["parse", "--formula", "P(x"]).0, EXIT_DATA);
        assert_eq!(run_capture(&["parse", "--formula", "[2] P(x)", "--n", "1"]).0, EXIT_DATA);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
        assert_eq!(run_capture(&["validate", "--model", "/nonexistent/m.json"]).0, EXIT_DATA);
    }

    #[test]
    fn shipped_corpus_passes() {
        let (code, out, _) = run_capture(&["corpus"]);
        assert_eq!(code, 0, "{out}");
    }
}
