//! Run reports: a versioned JSON document and a plain-text rendering.

use std::fmt::Write as _;

use serde::Serialize;

use crate::action_core::Domain;
use crate::qa::Answer;
use crate::reader::{Config, Interpretation, Model};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub horizon: usize,
    pub max_models: Option<usize>,
    pub max_abductions: usize,
    pub story_steps: usize,
    /// Consistent models found before the minimality filter.
    pub candidates: usize,
    pub model_count: usize,
    pub models: Vec<ModelReport>,
    pub answers: Vec<Answer>,
    /// Why no model exists, when none does.
    pub diagnostic: Option<Diagnostic>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    /// 1-based, in report order.
    pub id: usize,
    /// Reasoning step of each story step.
    pub mapping: Vec<usize>,
    pub last_step: usize,
    pub quiescent: bool,
    pub abduced: Vec<StepAtom>,
    pub activities: Vec<ActivityReport>,
    pub occurrences: Vec<StepAtoms>,
    /// True fluents of every state.
    pub trajectory: Vec<StepAtoms>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepAtom {
    pub step: usize,
    pub atom: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepAtoms {
    pub step: usize,
    pub atoms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivityReport {
    pub step: usize,
    pub agent: String,
    pub goal: String,
    pub activity: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub step: usize,
    pub story_step: Option<usize>,
    pub reason: String,
}

pub fn model_report(d: &Domain, id: usize, m: &Model) -> ModelReport {
    ModelReport {
        id,
        mapping: m.mapping.clone(),
        last_step: m.last_step(),
        quiescent: m.quiescent,
        abduced: m.abduced.iter().map(|&(step, a)| StepAtom { step, atom: d.action_term(a).to_string() }).collect(),
        activities: m
            .activity_choices
            .iter()
            .map(|c| ActivityReport {
                step: c.step,
                agent: d.agent_name(c.agent).to_string(),
                goal: d.fluent_term(c.goal).to_string(),
                activity: d.activity(c.activity).id.to_string(),
            })
            .collect(),
        occurrences: m
            .occurrences
            .iter()
            .enumerate()
            .map(|(step, occ)| StepAtoms { step, atoms: occ.iter().map(|o| o.to_term(d).to_string()).collect() })
            .collect(),
        trajectory: m
            .trajectory
            .iter()
            .enumerate()
            .map(|(step, s)| StepAtoms {
                step,
                atoms: s.world.true_fluents().map(|f| d.fluent_term(f).to_string()).collect(),
            })
            .collect(),
    }
}

pub fn build_report(
    d: &Domain,
    cfg: &Config,
    story_steps: usize,
    interp: &Interpretation,
    answers: Vec<Answer>,
    warnings: Vec<String>,
) -> Report {
    Report {
        schema: SCHEMA_VERSION,
        horizon: cfg.horizon,
        max_models: cfg.max_models,
        max_abductions: cfg.max_abductions,
        story_steps,
        candidates: interp.candidates,
        model_count: interp.models.len(),
        models: interp.models.iter().enumerate().map(|(i, m)| model_report(d, i + 1, m)).collect(),
        answers,
        diagnostic: interp
            .failure
            .as_ref()
            .map(|f| Diagnostic { step: f.step, story_step: f.story_step, reason: f.reason.clone() }),
        warnings,
    }
}

pub fn to_json(r: &Report) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

/// Human-readable summary: each model's trace followed by the answers.
pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let plural = if r.model_count == 1 { "" } else { "s" };
    let _ = writeln!(out, "{} model{plural}", r.model_count);
    if let Some(d) = &r.diagnostic {
        match d.story_step {
            Some(s) => {
                let _ = writeln!(out, "no interpretation: story step {s} fails near reasoning step {}: {}", d.step, d.reason);
            }
            None => {
                let _ = writeln!(out, "no interpretation: reasoning step {}: {}", d.step, d.reason);
            }
        }
    }
    for m in &r.models {
        let _ = writeln!(out, "\nmodel {}", m.id);
        let map: Vec<String> = m.mapping.iter().enumerate().map(|(s, i)| format!("{s}->{i}")).collect();
        let _ = writeln!(out, "  mapping: {}", map.join(" "));
        if !m.abduced.is_empty() {
            let ab: Vec<String> = m.abduced.iter().map(|a| format!("{}@{}", a.atom, a.step)).collect();
            let _ = writeln!(out, "  assumed: {}", ab.join(", "));
        }
        for st in &m.occurrences {
            let _ = writeln!(out, "  {:>3}  {}", st.step, st.atoms.join("  "));
        }
        let end = if m.quiescent { "nothing further happens" } else { "horizon reached" };
        let _ = writeln!(out, "  {:>3}  ({end})", m.last_step);
    }
    if !r.answers.is_empty() {
        out.push('\n');
    }
    for a in &r.answers {
        let _ = writeln!(out, "{}? {}", a.question, a.aggregate);
    }
    out
}
