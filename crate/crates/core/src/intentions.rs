//! Theory of intentions for several agents: activity status bookkeeping,
//! goal activation, mental actions and the next intended action.

use std::collections::BTreeSet;
use std::fmt;

use crate::action_core::{ActionId, ActivityId, AgentId, Domain, FluentId, State};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Action(ActionId),
    Activity(ActivityId),
}

/// A ground activity: a plan of components pursued for a goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    pub id: Term,
    pub actor: AgentId,
    pub goal: FluentId,
    pub components: Vec<Component>,
    /// Activities that list this one as a component.
    pub parents: Vec<ActivityId>,
}

impl Activity {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, k: usize) -> Option<Component> {
        k.checked_sub(1).and_then(|i| self.components.get(i)).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MentalAction {
    Select(AgentId, FluentId),
    Abandon(AgentId, FluentId),
    Start(AgentId, ActivityId),
    Stop(AgentId, ActivityId),
    Replan(AgentId, FluentId),
    Wait(AgentId),
}

impl MentalAction {
    pub fn agent(&self) -> AgentId {
        match *self {
            MentalAction::Select(a, _)
            | MentalAction::Abandon(a, _)
            | MentalAction::Start(a, _)
            | MentalAction::Stop(a, _)
            | MentalAction::Replan(a, _)
            | MentalAction::Wait(a) => a,
        }
    }

    pub fn to_term(&self, d: &Domain) -> Term {
        let ag = |a: AgentId| Term::atom(d.agent_name(a));
        match *self {
            MentalAction::Select(a, g) => Term::app("select", vec![ag(a), d.fluent_term(g).clone()]),
            MentalAction::Abandon(a, g) => Term::app("abandon", vec![ag(a), d.fluent_term(g).clone()]),
            MentalAction::Start(a, m) => Term::app("start", vec![ag(a), d.activity(m).id.clone()]),
            MentalAction::Stop(a, m) => Term::app("stop", vec![ag(a), d.activity(m).id.clone()]),
            MentalAction::Replan(a, g) => Term::app("replan", vec![ag(a), d.fluent_term(g).clone()]),
            MentalAction::Wait(a) => Term::app("wait", vec![ag(a)]),
        }
    }
}

/// One occurring action, physical (domain) or mental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Occurrence {
    Mental(MentalAction),
    Physical(ActionId),
}

impl Occurrence {
    pub fn to_term(&self, d: &Domain) -> Term {
        match self {
            Occurrence::Physical(a) => d.action_term(*a).clone(),
            Occurrence::Mental(m) => m.to_term(d),
        }
    }
}

/// Mental fluents of all agents. Derived notions (active, in progress,
/// minor, descendant, next action) are computed on demand.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MentalState {
    /// Per activity: -1 when not running, otherwise components done.
    status: Vec<i32>,
    active_goal: BTreeSet<(AgentId, FluentId)>,
    replanned: BTreeSet<(AgentId, FluentId)>,
}

impl fmt::Debug for MentalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let running: Vec<(usize, i32)> =
            self.status.iter().enumerate().filter(|(_, &s)| s >= 0).map(|(i, &s)| (i, s)).collect();
        f.debug_struct("MentalState")
            .field("running", &running)
            .field("active_goal", &self.active_goal)
            .field("replanned", &self.replanned)
            .finish()
    }
}

impl MentalState {
    /// Nothing started, nothing selected.
    pub fn initial(d: &Domain) -> Self {
        MentalState { status: vec![-1; d.activities().len()], active_goal: BTreeSet::new(), replanned: BTreeSet::new() }
    }

    pub fn status(&self, m: ActivityId) -> i32 {
        self.status[m]
    }

    pub fn active(&self, m: ActivityId) -> bool {
        self.status[m] >= 0
    }

    pub fn active_goal(&self, ag: AgentId, g: FluentId) -> bool {
        self.active_goal.contains(&(ag, g))
    }

    pub fn active_goals(&self) -> impl Iterator<Item = (AgentId, FluentId)> + '_ {
        self.active_goal.iter().copied()
    }

    pub fn replanned(&self, ag: AgentId, g: FluentId) -> bool {
        self.replanned.contains(&(ag, g))
    }

    pub fn running(&self) -> impl Iterator<Item = ActivityId> + '_ {
        self.status.iter().enumerate().filter(|(_, &s)| s >= 0).map(|(i, _)| i)
    }

    pub fn in_progress(&self, d: &Domain, m: ActivityId) -> bool {
        let a = d.activity(m);
        self.active(m) && self.active_goal(a.actor, a.goal)
    }

    /// A running activity that is a component of another running one.
    pub fn minor(&self, d: &Domain, m: ActivityId) -> bool {
        self.active(m) && d.activity(m).parents.iter().any(|&p| self.active(p))
    }

    /// The goal of some running minor activity of `ag`.
    pub fn minor_goal(&self, d: &Domain, ag: AgentId, g: FluentId) -> bool {
        self.running().any(|m| {
            let a = d.activity(m);
            a.actor == ag && a.goal == g && self.minor(d, m)
        })
    }

    /// Running activities below `m` (transitively).
    pub fn descendants(&self, d: &Domain, m: ActivityId) -> Vec<ActivityId> {
        let mut out = Vec::new();
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            for c in &d.activity(x).components {
                if let Component::Activity(s) = *c {
                    if self.active(s) && !out.contains(&s) {
                        out.push(s);
                        stack.push(s);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_descendant(&self, d: &Domain, m1: ActivityId, m: ActivityId) -> bool {
        self.descendants(d, m).contains(&m1)
    }

    /// Running activities of `ag` that are not part of another running one.
    pub fn top_activities(&self, d: &Domain, ag: AgentId) -> Vec<ActivityId> {
        self.running().filter(|&m| d.activity(m).actor == ag && !self.minor(d, m)).collect()
    }

    /// Active goals of `ag` that are not goals of running sub-activities.
    pub fn top_goals(&self, d: &Domain, ag: AgentId) -> Vec<FluentId> {
        self.active_goal
            .iter()
            .filter(|&&(a, g)| a == ag && !self.minor_goal(d, ag, g))
            .map(|&(_, g)| g)
            .collect()
    }

    /// The next action intended as part of `m`: descends through the
    /// component at position status+1.
    pub fn next_action(&self, d: &Domain, m: ActivityId) -> Option<Occurrence> {
        let act = d.activity(m);
        let k = self.status[m];
        if k < 0 {
            return None;
        }
        match act.component(k as usize + 1)? {
            Component::Action(a) => Some(Occurrence::Physical(a)),
            Component::Activity(sub) => {
                let s = d.activity(sub);
                if !self.active(sub) {
                    Some(Occurrence::Mental(MentalAction::Start(act.actor, sub)))
                } else if !self.active_goal(s.actor, s.goal) || self.status[sub] as usize >= s.len() {
                    Some(Occurrence::Mental(MentalAction::Stop(act.actor, sub)))
                } else {
                    self.next_action(d, sub)
                }
            }
        }
    }

    /// Innermost running activity under `m` whose current component is the
    /// physical action `a`.
    fn executing(&self, d: &Domain, m: ActivityId, a: ActionId) -> Option<ActivityId> {
        let k = self.status[m];
        if k < 0 {
            return None;
        }
        match d.activity(m).component(k as usize + 1)? {
            Component::Action(x) if x == a => Some(m),
            Component::Action(_) => None,
            Component::Activity(sub) if self.active(sub) => self.executing(d, sub, a),
            Component::Activity(_) => None,
        }
    }

    /// Whether a mental action may be performed in this state.
    pub fn mental_legal(&self, d: &Domain, world: &State, act: MentalAction) -> bool {
        match act {
            MentalAction::Select(ag, g) => self.top_goals(d, ag).is_empty() && !world.holds(g),
            MentalAction::Abandon(ag, g) => self.active_goal(ag, g),
            MentalAction::Start(ag, m) => d.activity(m).actor == ag && !self.active(m),
            MentalAction::Stop(ag, m) => d.activity(m).actor == ag && self.active(m),
            MentalAction::Replan(ag, g) => self.active_goal(ag, g) && !self.replanned(ag, g),
            MentalAction::Wait(_) => true,
        }
    }

    /// The mental state after `occ` happens in (`world`, `self`), given the
    /// successor physical state `next_world`.
    pub fn apply(&self, d: &Domain, occ: &[Occurrence], next_world: &State) -> MentalState {
        let mut next = self.clone();
        for o in occ {
            match *o {
                Occurrence::Physical(a) => {
                    for ag in d.agent_actors(a) {
                        for top in self.top_activities(d, ag) {
                            if let Some(m) = self.executing(d, top, a) {
                                next.status[m] += 1;
                            }
                        }
                    }
                }
                Occurrence::Mental(MentalAction::Select(ag, g)) => {
                    next.active_goal.insert((ag, g));
                }
                Occurrence::Mental(MentalAction::Abandon(ag, g)) => {
                    next.active_goal.remove(&(ag, g));
                }
                Occurrence::Mental(MentalAction::Start(ag, m)) => {
                    next.status[m] = 0;
                    next.active_goal.insert((ag, d.activity(m).goal));
                }
                Occurrence::Mental(MentalAction::Stop(ag, m)) => {
                    for s in self.descendants(d, m) {
                        next.status[s] = -1;
                        next.active_goal.remove(&(ag, d.activity(s).goal));
                    }
                    next.status[m] = -1;
                    for &p in &d.activity(m).parents {
                        if self.active(p) {
                            next.status[p] += 1;
                            next.active_goal.remove(&(ag, d.activity(m).goal));
                        }
                    }
                }
                Occurrence::Mental(MentalAction::Replan(ag, g)) => {
                    next.replanned.insert((ag, g));
                }
                Occurrence::Mental(MentalAction::Wait(_)) => {}
            }
        }
        next.active_goal.retain(|&(_, g)| !next_world.holds(g));
        next
    }
}
