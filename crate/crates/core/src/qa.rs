//! Questions about a story and their answers over a set of models.
//!
//! ```text
//! occur pay(nicole,b)
//! when eat(nicole,lentil_soup)
//! who pay(?,b)
//! where nicole 3
//! ```

use std::fmt;

use serde::Serialize;

use crate::action_core::{ActionId, Domain};
use crate::error::{QuestionError, SyntaxError};
use crate::intentions::Occurrence;
use crate::reader::Model;
use crate::term::{lex_line, strip_comment, Cursor, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Question {
    /// Did the action happen?
    Occur(Term),
    /// At which steps did it happen?
    When(Term),
    /// Who filled the `?` slot of the pattern?
    Who(Term),
    /// Where was the person at a story step, or at the end?
    Where { person: String, story_step: Option<usize> },
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Question::Occur(t) => write!(f, "occur {t}"),
            Question::When(t) => write!(f, "when {t}"),
            Question::Who(t) => write!(f, "who {t}"),
            Question::Where { person, story_step: Some(s) } => write!(f, "where {person} {s}"),
            Question::Where { person, story_step: None } => write!(f, "where {person}"),
        }
    }
}

/// Parses the part of a question line after the `question` keyword.
pub fn question_body(c: &mut Cursor) -> Result<Question, SyntaxError> {
    let col = c.col();
    let kind = c.ident()?;
    let q = match kind.as_str() {
        "occur" => Question::Occur(c.term()?),
        "when" => Question::When(c.term()?),
        "who" => Question::Who(c.term()?),
        "where" => {
            let person = c.ident()?;
            let story_step = if c.at_end() { None } else { Some(c.uint()?) };
            Question::Where { person, story_step }
        }
        other => {
            return Err(SyntaxError::new(c.line(), col, format!("unknown question kind `{other}`")));
        }
    };
    c.expect_end()?;
    Ok(q)
}

/// Parses a standalone question such as `occur pay(nicole,b)`.
pub fn parse_question(text: &str) -> Result<Question, SyntaxError> {
    let toks = lex_line(strip_comment(text), 1)?;
    let mut c = Cursor::new(&toks, 1);
    question_body(&mut c)
}

/// A question checked against a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    Occur(ActionId),
    When(ActionId),
    /// Every ground action matching the pattern, with the constant in the
    /// open slot.
    Who(Vec<(String, ActionId)>),
    Where { person: String, story_step: Option<usize> },
}

fn physical_action(d: &Domain, t: &Term) -> Result<ActionId, QuestionError> {
    d.action_id(t).ok_or_else(|| QuestionError::UnknownAction(t.to_string()))
}

pub fn resolve(d: &Domain, q: &Question) -> Result<Resolved, QuestionError> {
    match q {
        Question::Occur(t) => Ok(Resolved::Occur(physical_action(d, t)?)),
        Question::When(t) => Ok(Resolved::When(physical_action(d, t)?)),
        Question::Who(t) => {
            let open: Vec<usize> = t.args.iter().enumerate().filter(|(_, a)| a.functor == "?").map(|(i, _)| i).collect();
            let [slot] = open[..] else {
                return Err(QuestionError::Slots(t.to_string()));
            };
            let mut out = Vec::new();
            for a in 0..d.num_actions() {
                let at = d.action_term(a);
                let fits = at.functor == t.functor
                    && at.args.len() == t.args.len()
                    && at.args.iter().zip(&t.args).enumerate().all(|(i, (x, y))| i == slot || x == y);
                if fits {
                    out.push((at.args[slot].to_string(), a));
                }
            }
            if out.is_empty() {
                return Err(QuestionError::UnknownAction(t.to_string()));
            }
            out.sort();
            Ok(Resolved::Who(out))
        }
        Question::Where { person, story_step } => {
            if d.instance_sort(person).is_none() {
                return Err(QuestionError::UnknownInstance(person.clone()));
            }
            Ok(Resolved::Where { person: person.clone(), story_step: *story_step })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// `yes` if `a` occurs in `m`; `no` if it is absent and could not have
/// occurred, because no activity of its actors ever had it as the next
/// action or because it was never executable; `unknown` otherwise.
pub fn answer_occur(d: &Domain, m: &Model, a: ActionId) -> Verdict {
    let occ = Occurrence::Physical(a);
    if m.occurrences.iter().any(|o| o.contains(&occ)) {
        return Verdict::Yes;
    }
    let actors: Vec<_> = d.agent_actors(a).collect();
    let never_intended = !actors.is_empty()
        && m.trajectory.iter().all(|s| {
            !s.mind.running().any(|mm| {
                actors.contains(&d.activity(mm).actor)
                    && s.mind.in_progress(d, mm)
                    && s.mind.next_action(d, mm) == Some(occ)
            })
        });
    let never_legal = m.trajectory.iter().all(|s| !d.legal(&s.world, &[a]));
    if never_intended || never_legal {
        Verdict::No
    } else {
        Verdict::Unknown
    }
}

/// A step at which an action occurs, with the story step mapped exactly
/// there, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WhenStep {
    pub step: usize,
    pub story_step: Option<usize>,
}

pub fn answer_when(m: &Model, a: ActionId) -> Vec<WhenStep> {
    m.steps_of(&Occurrence::Physical(a))
        .into_iter()
        .map(|step| WhenStep { step, story_step: m.story_step_at(step) })
        .collect()
}

/// Constants filling the open slot of occurring matches.
pub fn answer_who(m: &Model, matches: &[(String, ActionId)]) -> Vec<String> {
    let mut out: Vec<String> = matches
        .iter()
        .filter(|(_, a)| m.occurrences.iter().any(|o| o.contains(&Occurrence::Physical(*a))))
        .map(|(c, _)| c.clone())
        .collect();
    out.dedup();
    out
}

/// True fluents about `person` that place it somewhere: first argument is
/// the person and some argument is a location. Read at the step the story
/// step maps to, or at the final state.
pub fn answer_where(d: &Domain, m: &Model, person: &str, story_step: Option<usize>) -> Option<Vec<Term>> {
    let i = match story_step {
        Some(s) => *m.mapping.get(s)?,
        None => m.last_step(),
    };
    let state = &m.trajectory[i].world;
    let mut out: Vec<Term> = state
        .true_fluents()
        .filter(|&f| {
            let t = d.fluent_term(f);
            let decl = d.fluent_decl(f);
            t.args.first().is_some_and(|a| a.functor == person)
                && decl.arg_sorts.iter().any(|s| d.sorts().is_subsort(s, "location"))
        })
        .map(|f| d.fluent_term(f).clone())
        .collect();
    out.sort_by_cached_key(|t| t.to_string());
    Some(out)
}

/// The answer to one question in one model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ModelAnswer {
    Occur(Verdict),
    When(Vec<WhenStep>),
    Who(Vec<String>),
    /// `None` when the story step is not part of the story.
    Where(Option<Vec<String>>),
}

impl fmt::Display for ModelAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelAnswer::Occur(v) => write!(f, "{v}"),
            ModelAnswer::When(steps) if steps.is_empty() => f.write_str("never"),
            ModelAnswer::When(steps) => {
                let parts: Vec<String> = steps
                    .iter()
                    .map(|w| match w.story_step {
                        Some(s) => format!("{} (story step {s})", w.step),
                        None => w.step.to_string(),
                    })
                    .collect();
                f.write_str(&parts.join(", "))
            }
            ModelAnswer::Who(xs) if xs.is_empty() => f.write_str("nobody"),
            ModelAnswer::Who(xs) => f.write_str(&xs.join(", ")),
            ModelAnswer::Where(None) => f.write_str("no such story step"),
            ModelAnswer::Where(Some(xs)) if xs.is_empty() => f.write_str("nowhere known"),
            ModelAnswer::Where(Some(xs)) => f.write_str(&xs.join(", ")),
        }
    }
}

pub fn answer_model(d: &Domain, m: &Model, q: &Resolved) -> ModelAnswer {
    match q {
        Resolved::Occur(a) => ModelAnswer::Occur(answer_occur(d, m, *a)),
        Resolved::When(a) => ModelAnswer::When(answer_when(m, *a)),
        Resolved::Who(matches) => ModelAnswer::Who(answer_who(m, matches)),
        Resolved::Where { person, story_step } => ModelAnswer::Where(
            answer_where(d, m, person, *story_step).map(|ts| ts.iter().map(ToString::to_string).collect()),
        ),
    }
}

/// Verdict over all models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aggregate {
    /// Every model gives this answer.
    Unanimous { answer: ModelAnswer },
    /// Models disagree; each distinct answer with the models giving it.
    Depends { cases: Vec<Case> },
    NoInterpretation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub answer: ModelAnswer,
    /// Zero-based model indices.
    pub models: Vec<usize>,
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aggregate::Unanimous { answer } => write!(f, "{answer}"),
            Aggregate::NoInterpretation => f.write_str("no consistent interpretation"),
            Aggregate::Depends { cases } => {
                let parts: Vec<String> = cases
                    .iter()
                    .map(|c| {
                        let ids: Vec<String> = c.models.iter().map(|i| (i + 1).to_string()).collect();
                        let noun = if ids.len() == 1 { "model" } else { "models" };
                        format!("{} in {noun} {}", c.answer, ids.join(","))
                    })
                    .collect();
                write!(f, "depends: {}", parts.join("; "))
            }
        }
    }
}

pub fn aggregate(per_model: &[ModelAnswer]) -> Aggregate {
    let Some(first) = per_model.first() else {
        return Aggregate::NoInterpretation;
    };
    if per_model.iter().all(|a| a == first) {
        return Aggregate::Unanimous { answer: first.clone() };
    }
    let mut cases: Vec<Case> = Vec::new();
    for (i, a) in per_model.iter().enumerate() {
        match cases.iter_mut().find(|c| &c.answer == a) {
            Some(c) => c.models.push(i),
            None => cases.push(Case { answer: a.clone(), models: vec![i] }),
        }
    }
    Aggregate::Depends { cases }
}

/// A question with its per-model answers and aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Answer {
    pub question: String,
    pub per_model: Vec<ModelAnswer>,
    pub aggregate: Aggregate,
}

pub fn answer(d: &Domain, models: &[Model], q: &Question) -> Result<Answer, QuestionError> {
    let r = resolve(d, q)?;
    let per_model: Vec<ModelAnswer> = models.iter().map(|m| answer_model(d, m, &r)).collect();
    let aggregate = aggregate(&per_model);
    Ok(Answer { question: q.to_string(), per_model, aggregate })
}
