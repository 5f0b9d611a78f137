//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::golden::{diff_traces, parse_trace, trace_atoms};
use crate::qa::{answer, parse_question, Question};
use crate::reader::{interpret, Config};
use crate::report::{build_report, render_text, to_json};
use crate::story::{load_story, Sources};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NO_MODEL: i32 = 2;
pub const EXIT_GOLDEN: i32 = 3;

/// Interpret a story about a stereotypical activity and answer questions
/// about it.
#[derive(Debug, Parser)]
#[command(name = "storyreader", version)]
pub struct Args {
    /// Narrative file.
    pub story: PathBuf,
    /// Domain description; defaults to the bundled restaurant domain.
    #[arg(long, env = "INTENT_DOMAIN")]
    pub domain: Option<PathBuf>,
    /// Verb-sense mapping rules for `frame` lines.
    #[arg(long, env = "INTENT_FRAME_RULES")]
    pub frame_rules: Option<PathBuf>,
    /// Last reasoning step at which actions may occur.
    #[arg(long, env = "INTENT_HORIZON", default_value_t = 40)]
    pub horizon: usize,
    /// Report at most this many models.
    #[arg(long, env = "INTENT_MAX_MODELS")]
    pub max_models: Option<usize>,
    /// Most unobserved exogenous actions assumed per model.
    #[arg(long, env = "INTENT_MAX_ABDUCTIONS", default_value_t = 2)]
    pub max_abductions: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "INTENT_PARALLELISM", default_value_t = 1)]
    pub parallelism: usize,
    /// Print the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Compare against a golden trace; exit 3 unless some model matches.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Print the trace atoms of each model.
    #[arg(long)]
    pub trace: bool,
    /// Extra question, e.g. "occur pay(nicole,b)". Repeatable.
    #[arg(long)]
    pub ask: Vec<String>,
    /// Treat unmapped frames and unused roles as errors.
    #[arg(long, env = "INTENT_STRICT_FRAMES")]
    pub strict_frames: bool,
}

/// Runs the command and returns the process exit code.
pub fn run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_inner(args, out, err) {
        Ok(code) => code,
        // the reader went away (e.g. piped into `head`); nothing left to say
        Err(Fail::Closed(code)) => code,
        Err(Fail::Msg(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PARSE
        }
    }
}

enum Fail {
    Msg(String),
    Closed(i32),
}

impl From<String> for Fail {
    fn from(msg: String) -> Self {
        Fail::Msg(msg)
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_inner(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fail> {
    let text = read(&args.story)?;
    let domain_text = args.domain.as_ref().map(read).transpose()?;
    let rules_text = args.frame_rules.as_ref().map(read).transpose()?;
    let src = Sources {
        domain: domain_text.as_deref(),
        frame_rules: rules_text.as_deref(),
        strict_frames: args.strict_frames,
    };
    let story = load_story(&text, &src).map_err(|e| format!("{}: {e}", args.story.display()))?;
    let mut questions: Vec<Question> = story.narrative.questions.clone();
    for q in &args.ask {
        questions.push(parse_question(q).map_err(|e| format!("--ask `{q}`: {e}"))?);
    }
    let expected = match &args.golden {
        Some(p) => Some(parse_trace(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?),
        None => None,
    };

    let cfg = Config {
        horizon: args.horizon,
        max_models: args.max_models,
        parallelism: args.parallelism,
        max_abductions: args.max_abductions,
    };
    let d = &story.domain;
    let started = Instant::now();
    let interp = interpret(d, &story.history, &cfg);
    let elapsed = started.elapsed();

    let mut answers = Vec::new();
    for q in &questions {
        answers.push(answer(d, &interp.models, q).map_err(|e| format!("question `{q}`: {e}"))?);
    }
    let report = build_report(d, &cfg, story.history.len(), &interp, answers, story.warnings.clone());
    let outcome = if interp.models.is_empty() { EXIT_NO_MODEL } else { EXIT_OK };
    let io = |e: std::io::Error| match e.kind() {
        std::io::ErrorKind::BrokenPipe => Fail::Closed(outcome),
        _ => Fail::Msg(e.to_string()),
    };
    if args.json {
        out.write_all(to_json(&report).as_bytes()).map_err(io)?;
        writeln!(err, "wall time: {:.3}s", elapsed.as_secs_f64()).map_err(io)?;
    } else {
        out.write_all(render_text(&report).as_bytes()).map_err(io)?;
        writeln!(out, "wall time: {:.3}s", elapsed.as_secs_f64()).map_err(io)?;
    }
    if args.trace {
        for (i, m) in interp.models.iter().enumerate() {
            writeln!(out, "% model {}", i + 1).map_err(io)?;
            for a in trace_atoms(d, m) {
                writeln!(out, "{a}").map_err(io)?;
            }
        }
    }

    if let Some(expected) = expected {
        let diffs: Vec<_> = interp.models.iter().map(|m| diff_traces(&expected, &trace_atoms(d, m))).collect();
        if diffs.iter().any(|x| x.is_empty()) {
            writeln!(err, "golden trace matches").map_err(io)?;
        } else {
            match diffs.first() {
                Some(x) => {
                    writeln!(err, "golden trace mismatch against model 1:").map_err(io)?;
                    for a in &x.missing {
                        writeln!(err, "- {a}").map_err(io)?;
                    }
                    for a in &x.unexpected {
                        writeln!(err, "+ {a}").map_err(io)?;
                    }
                }
                None => writeln!(err, "golden trace mismatch: no model").map_err(io)?,
            }
            return Ok(EXIT_GOLDEN);
        }
    }
    Ok(outcome)
}
