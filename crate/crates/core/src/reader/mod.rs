//! The reader: maps story steps onto a reasoning timeline, fills in the
//! actions the characters intend, abduces unobserved exogenous events and
//! enumerates every consistent interpretation.

mod categories;
mod mapping;
mod search;

use std::cmp::Ordering;

pub use categories::{categorize, goal_futile, intended_occurrence, Category};
pub use mapping::{enumerate_mappings, Mappings};
pub use search::{interpret, interpret_fixed, Fixed};

use crate::action_core::{ActionId, ActivityId, AgentId, Domain, FluentId, State};
use crate::error::Failure;
use crate::intentions::{MentalState, Occurrence};
use crate::term::Term;

/// Search settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Last reasoning step at which actions may occur.
    pub horizon: usize,
    /// Keep at most this many models after sorting.
    pub max_models: Option<usize>,
    /// Worker threads; 0 uses all cores, 1 runs single-threaded.
    pub parallelism: usize,
    /// Most unobserved exogenous actions assumed per model.
    pub max_abductions: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { horizon: 40, max_models: None, parallelism: 1, max_abductions: 2 }
    }
}

/// Physical and mental state at one reasoning step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FullState {
    pub world: State,
    pub mind: MentalState,
}

/// An activity an agent started for a goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivityChoice {
    pub step: usize,
    pub agent: AgentId,
    pub goal: FluentId,
    pub activity: ActivityId,
}

/// One interpretation of a story.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    /// Reasoning step of each story step.
    pub mapping: Vec<usize>,
    /// States 0..=last.
    pub trajectory: Vec<FullState>,
    /// Actions occurring at steps 0..last, sorted mental first.
    pub occurrences: Vec<Vec<Occurrence>>,
    /// Assumed exogenous actions as (step, action), sorted.
    pub abduced: Vec<(usize, ActionId)>,
    pub activity_choices: Vec<ActivityChoice>,
    /// False when the run was cut off by the horizon rather than ending in
    /// a step where nothing happens.
    pub quiescent: bool,
}

impl Model {
    pub fn last_step(&self) -> usize {
        self.trajectory.len() - 1
    }

    /// Steps at which `occ` happens.
    pub fn steps_of(&self, occ: &Occurrence) -> Vec<usize> {
        self.occurrences
            .iter()
            .enumerate()
            .filter(|(_, o)| o.contains(occ))
            .map(|(i, _)| i)
            .collect()
    }

    /// Story step mapped exactly to reasoning step `i`, if any.
    pub fn story_step_at(&self, i: usize) -> Option<usize> {
        self.mapping.iter().position(|&m| m == i)
    }

    /// `occurs(a,i)` atoms in step order.
    pub fn occurs_atoms(&self, d: &Domain) -> Vec<(usize, Term)> {
        let mut out = Vec::new();
        for (i, occ) in self.occurrences.iter().enumerate() {
            for o in occ {
                out.push((i, o.to_term(d)));
            }
        }
        out
    }

    fn sort_key(&self, d: &Domain) -> (Vec<usize>, Vec<(usize, String)>, Vec<String>, Vec<(usize, String)>) {
        (
            self.mapping.clone(),
            self.abduced.iter().map(|&(i, a)| (i, d.action_term(a).to_string())).collect(),
            self.activity_choices.iter().map(|c| d.activity(c.activity).id.to_string()).collect(),
            self.occurs_atoms(d).into_iter().map(|(i, t)| (i, t.to_string())).collect(),
        )
    }
}

/// Orders models by mapping, then abduced actions, then activity choices
/// and occurrences.
pub fn compare_models(d: &Domain, a: &Model, b: &Model) -> Ordering {
    a.sort_key(d).cmp(&b.sort_key(d))
}

/// Models found plus, when there are none, the furthest point any branch
/// reached before failing.
#[derive(Debug, Clone)]
pub struct Interpretation {
    pub models: Vec<Model>,
    pub failure: Option<Failure>,
    /// Consistent models before the minimality filter and truncation.
    pub candidates: usize,
}

/// Canonical order within one step: mental actions first, then physical,
/// each sorted by printed form.
pub fn sort_occurrences(d: &Domain, occ: &mut [Occurrence]) {
    occ.sort_by_cached_key(|o| (matches!(o, Occurrence::Physical(_)), o.to_term(d).to_string()));
}

/// Checks a model independently of the search: transitions replay through
/// the domain and the mental dynamics, the mapping is monotone and gap-free,
/// story facts hold, and every physical agent action was intended.
pub fn check_model(d: &Domain, h: &crate::narrative::History, m: &Model) -> Result<(), String> {
    if m.occurrences.len() + 1 != m.trajectory.len() {
        return Err("trajectory and occurrence lengths disagree".into());
    }
    if m.mapping.len() != h.len() {
        return Err("mapping is not total".into());
    }
    for w in m.mapping.windows(2) {
        if w[0] >= w[1] {
            return Err(format!("mapping not strictly increasing: {:?}", m.mapping));
        }
    }
    for &(s, s1) in &h.next {
        if m.mapping[s1] != m.mapping[s] + 1 {
            return Err(format!("story steps {s} and {s1} are not consecutive"));
        }
    }
    if let Some(&last) = m.mapping.last() {
        for j in 0..last {
            if m.occurrences.get(j).is_none_or(|o| o.is_empty()) {
                return Err(format!("nothing happens at step {j} before the last story step"));
            }
        }
    }
    for (s, &i) in m.mapping.iter().enumerate() {
        let st = &m.trajectory[i];
        for &(f, v) in &h.obs[s] {
            if st.world.holds(f) != v {
                return Err(format!("observation of `{}` at story step {s} fails", d.fluent_term(f)));
            }
        }
        for &(a, v) in &h.hpd[s] {
            let here = m.occurrences.get(i).is_some_and(|o| o.contains(&Occurrence::Physical(a)));
            if here != v {
                return Err(format!("`{}` at story step {s} does not match", d.action_term(a)));
            }
        }
    }
    let initial = d.initial_state(&h.initial_overrides());
    if m.trajectory[0].world != initial || m.trajectory[0].mind != MentalState::initial(d) {
        return Err("initial state differs from the default initial state".into());
    }
    for (i, occ) in m.occurrences.iter().enumerate() {
        let cur = &m.trajectory[i];
        let next = &m.trajectory[i + 1];
        let phys: Vec<ActionId> = occ
            .iter()
            .filter_map(|o| match o {
                Occurrence::Physical(a) => Some(*a),
                Occurrence::Mental(_) => None,
            })
            .collect();
        if !d.legal(&cur.world, &phys) {
            return Err(format!("illegal occurrences at step {i}"));
        }
        let mut actors: Vec<AgentId> = Vec::new();
        for o in occ {
            let who: Vec<AgentId> = match o {
                Occurrence::Mental(ma) => {
                    if !cur.mind.mental_legal(d, &cur.world, *ma) {
                        return Err(format!("mental action `{}` illegal at step {i}", o.to_term(d)));
                    }
                    vec![ma.agent()]
                }
                Occurrence::Physical(a) => d.agent_actors(*a).collect(),
            };
            for ag in who {
                if actors.contains(&ag) {
                    return Err(format!("`{}` acts twice at step {i}", d.agent_name(ag)));
                }
                actors.push(ag);
            }
        }
        for &a in &phys {
            for ag in d.agent_actors(a) {
                let justified = cur
                    .mind
                    .running()
                    .filter(|&mm| d.activity(mm).actor == ag && cur.mind.in_progress(d, mm))
                    .any(|mm| cur.mind.next_action(d, mm) == Some(Occurrence::Physical(a)));
                if !justified {
                    return Err(format!("`{}` at step {i} is not intended by `{}`", d.action_term(a), d.agent_name(ag)));
                }
            }
        }
        if !d.successors(&cur.world, &phys).contains(&next.world) {
            return Err(format!("state {} does not follow from step {i}", i + 1));
        }
        if cur.mind.apply(d, occ, &next.world) != next.mind {
            return Err(format!("mental state {} does not follow from step {i}", i + 1));
        }
    }
    for s in &m.trajectory {
        for ag in 0..d.agents().len() {
            if s.mind.top_goals(d, ag).len() > 1 {
                return Err(format!("`{}` pursues two top-level goals", d.agent_name(ag)));
            }
        }
    }
    Ok(())
}
