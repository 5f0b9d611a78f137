//! Narrative files: instance declarations, story facts, event frames and
//! questions.
//!
//! ```text
//! instance <name> <sort>
//! hpd <action-term> true|false <step>
//! obs <fluent-term> true|false <step>
//! next <s> <s1>
//! frame <id> <verb_sense> <role>=<value>... step=<s>
//! question occur|when|who|where <term> [<step>]
//! ```

use std::fmt;

use crate::action_core::{truth, ActionId, Domain, FluentId, FluentLit};
use crate::error::{NarrativeError, SyntaxError};
use crate::qa::{question_body, Question};
use crate::term::{lex_line, strip_comment, Cursor, Term, Tok};

/// A story fact `(term, value, story step)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub term: Term,
    pub value: bool,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventFrame {
    pub id: String,
    pub sense: String,
    pub roles: Vec<(String, String)>,
    pub step: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Narrative {
    pub instances: Vec<(String, String)>,
    pub hpd: Vec<Fact>,
    pub obs: Vec<Fact>,
    pub next: Vec<(usize, usize)>,
    pub frames: Vec<EventFrame>,
    pub questions: Vec<Question>,
}

impl Narrative {
    pub fn parse(text: &str) -> Result<Narrative, NarrativeError> {
        let mut n = Narrative::default();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let toks = lex_line(strip_comment(raw), lineno)?;
            if toks.is_empty() {
                continue;
            }
            let mut c = Cursor::new(&toks, lineno);
            let kw = c.ident()?;
            match kw.as_str() {
                "instance" => {
                    let name = c.ident()?;
                    let sort = c.ident()?;
                    c.expect_end()?;
                    if n.instances.iter().any(|(x, _)| *x == name) {
                        return Err(NarrativeError::Invalid {
                            line: lineno,
                            message: format!("instance `{name}` declared twice"),
                        });
                    }
                    n.instances.push((name, sort));
                }
                "hpd" | "obs" => {
                    let term = c.term()?;
                    let value = truth(&mut c)?;
                    let step = c.uint()?;
                    c.expect_end()?;
                    let list = if kw == "hpd" { &mut n.hpd } else { &mut n.obs };
                    if list.iter().any(|f| f.term == term && f.step == step && f.value != value) {
                        return Err(NarrativeError::Invalid {
                            line: lineno,
                            message: format!("`{term}` is stated both true and false at story step {step}"),
                        });
                    }
                    list.push(Fact { term, value, step });
                }
                "next" => {
                    let s = c.uint()?;
                    let s1 = c.uint()?;
                    c.expect_end()?;
                    if s1 <= s {
                        return Err(NarrativeError::Invalid {
                            line: lineno,
                            message: format!("`next {s} {s1}` must name a later story step second"),
                        });
                    }
                    n.next.push((s, s1));
                }
                "frame" => {
                    let id = c.ident()?;
                    let sense = c.ident()?;
                    let mut roles = Vec::new();
                    let mut step = None;
                    while !c.at_end() {
                        let role = c.ident()?;
                        c.expect(&Tok::Eq)?;
                        if role == "step" {
                            step = Some(c.uint()?);
                        } else {
                            let value = c.ident()?;
                            roles.push((role, value));
                        }
                    }
                    let step = step.ok_or_else(|| c.err("frame needs `step=<s>`"))?;
                    n.frames.push(EventFrame { id, sense, roles, step });
                }
                "question" => {
                    n.questions.push(question_body(&mut c)?);
                }
                other => {
                    return Err(SyntaxError::new(lineno, 1, format!("unknown narrative line `{other}`")).into());
                }
            }
        }
        Ok(n)
    }

    /// Number of story steps: one past the largest step mentioned.
    pub fn story_len(&self) -> usize {
        let facts = self.hpd.iter().chain(&self.obs).map(|f| f.step + 1);
        let nexts = self.next.iter().map(|&(_, s1)| s1 + 1);
        let frames = self.frames.iter().map(|f| f.step + 1);
        facts.chain(nexts).chain(frames).max().unwrap_or(0)
    }
}

impl fmt::Display for Narrative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, s) in &self.instances {
            writeln!(f, "instance {n} {s}")?;
        }
        for h in &self.hpd {
            writeln!(f, "hpd {} {} {}", h.term, h.value, h.step)?;
        }
        for o in &self.obs {
            writeln!(f, "obs {} {} {}", o.term, o.value, o.step)?;
        }
        for (s, s1) in &self.next {
            writeln!(f, "next {s} {s1}")?;
        }
        for fr in &self.frames {
            write!(f, "frame {} {}", fr.id, fr.sense)?;
            for (r, v) in &fr.roles {
                write!(f, " {r}={v}")?;
            }
            writeln!(f, " step={}", fr.step)?;
        }
        for q in &self.questions {
            writeln!(f, "question {q}")?;
        }
        Ok(())
    }
}

/// The story side of an interpretation problem, resolved against a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    /// Per story step: action occurrences stated true or false.
    pub hpd: Vec<Vec<(ActionId, bool)>>,
    /// Per story step: observed fluent values.
    pub obs: Vec<Vec<FluentLit>>,
    /// Story steps that must map to consecutive reasoning steps.
    pub next: Vec<(usize, usize)>,
}

impl History {
    /// Resolves facts against `d`; every term must be a ground action or
    /// fluent of the domain.
    pub fn resolve(d: &Domain, n: &Narrative) -> Result<History, NarrativeError> {
        let len = n.story_len();
        let mut hpd = vec![Vec::new(); len];
        let mut obs = vec![Vec::new(); len];
        for h in &n.hpd {
            let a = d.action_id(&h.term).ok_or_else(|| NarrativeError::Unresolved(format!("`{}` is not a ground action of the domain", h.term)))?;
            if !hpd[h.step].contains(&(a, h.value)) {
                hpd[h.step].push((a, h.value));
            }
        }
        for o in &n.obs {
            let f = d.fluent_id(&o.term).ok_or_else(|| NarrativeError::Unresolved(format!("`{}` is not a ground fluent of the domain", o.term)))?;
            if !obs[o.step].contains(&(f, o.value)) {
                obs[o.step].push((f, o.value));
            }
        }
        let mut next = n.next.clone();
        next.sort_unstable();
        next.dedup();
        Ok(History { hpd, obs, next })
    }

    pub fn len(&self) -> usize {
        self.hpd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hpd.is_empty()
    }

    /// Whether story step `s` must directly follow `s - 1`.
    pub fn follows(&self, s: usize) -> bool {
        s > 0 && self.next.contains(&(s - 1, s))
    }

    /// Observations of story step 0 replace default initial values.
    pub fn initial_overrides(&self) -> Vec<FluentLit> {
        self.obs.first().cloned().unwrap_or_default()
    }

    /// Observed values by story step, for futility checks.
    pub fn observations(&self, s: usize) -> &[(FluentId, bool)] {
        &self.obs[s]
    }
}
