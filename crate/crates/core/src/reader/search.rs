//! Depth-first construction of models, interleaving timeline mapping with
//! simulation so that inconsistent branches die as early as possible.

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::action_core::{ActionId, ActionKind, AgentId, Domain, FluentId, GroundTrigger};
use crate::error::Failure;
use crate::intentions::{Component, MentalAction, MentalState, Occurrence};
use crate::narrative::History;
use crate::restaurant::{candidate_activities, default_selections};

use super::categories::intended_occurrence;
use super::{compare_models, sort_occurrences, ActivityChoice, Config, FullState, Interpretation, Model};

/// Pins a search to one mapping, one set of activity choices and exactly
/// one set of abduced actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    pub mapping: Vec<usize>,
    pub choices: Vec<ActivityChoice>,
    pub abduced: Vec<(usize, ActionId)>,
}

/// Enumerates all models of `h` in `d`: subset-minimal in their abduced
/// actions, sorted, and truncated to `cfg.max_models`.
pub fn interpret(d: &Domain, h: &History, cfg: &Config) -> Interpretation {
    let out = run(d, h, cfg, None);
    let candidates = out.models.len();
    let mut models = minimal(out.models);
    models.sort_by(|a, b| compare_models(d, a, b));
    models.dedup_by(|a, b| a.mapping == b.mapping && a.occurrences == b.occurrences && a.abduced == b.abduced);
    if let Some(k) = cfg.max_models {
        models.truncate(k);
    }
    let failure = if models.is_empty() { out.failure } else { None };
    Interpretation { models, failure, candidates }
}

/// Models consistent with exactly the mapping, activity choices and
/// abductions in `fixed` (no minimality filter).
pub fn interpret_fixed(d: &Domain, h: &History, cfg: &Config, fixed: &Fixed) -> Interpretation {
    let out = run(d, h, cfg, Some(fixed));
    let mut models = out.models;
    models.sort_by(|a, b| compare_models(d, a, b));
    let candidates = models.len();
    let failure = if models.is_empty() { out.failure } else { None };
    Interpretation { models, failure, candidates }
}

fn run(d: &Domain, h: &History, cfg: &Config, fixed: Option<&Fixed>) -> Outcome {
    let search = Search::new(d, h, cfg, fixed);
    let root = search.root();
    if cfg.parallelism == 1 {
        search.explore(root)
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(cfg.parallelism).build() {
            Ok(pool) => pool.install(|| search.explore(root)),
            Err(_) => search.explore(root),
        }
    }
}

/// Drops every model whose abduced set strictly contains that of another
/// model with the same mapping and activity choices.
fn minimal(models: Vec<Model>) -> Vec<Model> {
    let keep: Vec<bool> = models
        .iter()
        .map(|m| {
            !models.iter().any(|o| {
                o.mapping == m.mapping
                    && o.activity_choices == m.activity_choices
                    && o.abduced.len() < m.abduced.len()
                    && o.abduced.iter().all(|x| m.abduced.contains(x))
            })
        })
        .collect();
    models.into_iter().zip(keep).filter(|(_, k)| *k).map(|(m, _)| m).collect()
}

#[derive(Default)]
struct Outcome {
    models: Vec<Model>,
    failure: Option<Failure>,
}

impl Outcome {
    fn fail(f: Failure) -> Self {
        Outcome { models: Vec::new(), failure: Some(f) }
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.models.extend(other.models);
        self.failure = match (self.failure, other.failure) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

#[derive(Clone)]
struct Node {
    step: usize,
    trajectory: Vec<FullState>,
    occurrences: Vec<Vec<Occurrence>>,
    mapping: Vec<usize>,
    /// Goals selected at the previous step, to be pursued by a start now.
    pending: Vec<(AgentId, FluentId)>,
    abduced: Vec<(usize, ActionId)>,
    choices: Vec<ActivityChoice>,
}

impl Node {
    fn state(&self) -> &FullState {
        &self.trajectory[self.step]
    }
}

struct Search<'a> {
    d: &'a Domain,
    h: &'a History,
    cfg: &'a Config,
    fixed: Option<&'a Fixed>,
    exogenous: Vec<ActionId>,
    /// Per activity, every physical action appearing in it at any depth.
    contents: Vec<FixedBitSet>,
}

/// One way to fill a step, before successor states are computed.
struct Step {
    occ: Vec<Occurrence>,
    mapped_here: bool,
    starts: Vec<ActivityChoice>,
    selects: Vec<(AgentId, FluentId)>,
}

impl<'a> Search<'a> {
    fn new(d: &'a Domain, h: &'a History, cfg: &'a Config, fixed: Option<&'a Fixed>) -> Self {
        let n = d.activities().len();
        let mut contents = vec![FixedBitSet::with_capacity(d.num_actions()); n];
        // sub-activities never contain their parents, so iterate to a fixpoint
        loop {
            let mut changed = false;
            for m in 0..n {
                for c in &d.activity(m).components {
                    let before = contents[m].count_ones(..);
                    match *c {
                        Component::Action(a) => contents[m].insert(a),
                        Component::Activity(s) => {
                            let sub = contents[s].clone();
                            contents[m].union_with(&sub);
                        }
                    }
                    changed |= contents[m].count_ones(..) != before;
                }
            }
            if !changed {
                break;
            }
        }
        Search { d, h, cfg, fixed, exogenous: d.exogenous_actions().collect(), contents }
    }

    fn root(&self) -> Node {
        let world = self.d.initial_state(&self.h.initial_overrides());
        let mind = MentalState::initial(self.d);
        Node {
            step: 0,
            trajectory: vec![FullState { world, mind }],
            occurrences: Vec::new(),
            mapping: Vec::new(),
            pending: Vec::new(),
            abduced: Vec::new(),
            choices: Vec::new(),
        }
    }

    fn failure(&self, node: &Node, reason: impl Into<String>) -> Failure {
        let next = node.mapping.len();
        Failure {
            step: node.step,
            story_step: (next < self.h.len()).then_some(next),
            reason: reason.into(),
        }
    }

    fn finish(&self, node: Node, quiescent: bool) -> Model {
        let mut abduced = node.abduced;
        abduced.sort_unstable();
        Model {
            mapping: node.mapping,
            trajectory: node.trajectory,
            occurrences: node.occurrences,
            abduced,
            activity_choices: node.choices,
            quiescent,
        }
    }

    fn explore(&self, node: Node) -> Outcome {
        let (children, done) = self.expand(node);
        let parallel = self.cfg.parallelism != 1 && children.len() > 1;
        let below = if parallel {
            children.into_par_iter().map(|c| self.explore(c)).reduce(Outcome::default, Outcome::merge)
        } else {
            children.into_iter().map(|c| self.explore(c)).fold(Outcome::default(), Outcome::merge)
        };
        done.merge(below)
    }

    /// Children of `node`, plus any models completed at it or the reason it
    /// failed.
    fn expand(&self, node: Node) -> (Vec<Node>, Outcome) {
        let d = self.d;
        let i = node.step;
        let next_story = node.mapping.len();
        let remaining = self.h.len() - next_story;

        if i > self.cfg.horizon {
            return if remaining == 0 {
                (Vec::new(), Outcome { models: vec![self.finish(node, false)], failure: None })
            } else {
                (Vec::new(), Outcome::fail(self.failure(&node, "horizon reached")))
            };
        }
        if remaining > 0 && i + remaining - 1 > self.cfg.horizon {
            return (Vec::new(), Outcome::fail(self.failure(&node, "horizon too small for the remaining story")));
        }
        if let Some(why) = self.unreachable(&node) {
            return (Vec::new(), Outcome::fail(self.failure(&node, why)));
        }

        let state = node.state().clone();
        let before = i.checked_sub(1).map(|j| &node.trajectory[j].world);

        // default goal selections
        let mut selects: Vec<(AgentId, FluentId)> = Vec::new();
        for (ag, g) in default_selections(d, i, &state.world, before) {
            if selects.iter().any(|&(a, _)| a == ag) {
                continue;
            }
            if state.mind.mental_legal(d, &state.world, MentalAction::Select(ag, g)) {
                selects.push((ag, g));
            }
        }

        // one activity per goal selected at the previous step
        let mut start_sets: Vec<Vec<ActivityChoice>> = vec![Vec::new()];
        for &(ag, g) in &node.pending {
            let mut cands: Vec<ActivityChoice> = candidate_activities(d, ag, g)
                .into_iter()
                .filter(|&m| state.mind.mental_legal(d, &state.world, MentalAction::Start(ag, m)))
                .map(|activity| ActivityChoice { step: i, agent: ag, goal: g, activity })
                .collect();
            if let Some(f) = self.fixed {
                cands.retain(|c| f.choices.contains(c));
            }
            if cands.is_empty() {
                let why = format!("no activity of `{}` can pursue `{}`", d.agent_name(ag), d.fluent_term(g));
                return (Vec::new(), Outcome::fail(self.failure(&node, why)));
            }
            start_sets = start_sets
                .into_iter()
                .flat_map(|set| {
                    cands.iter().map(move |c| {
                        let mut s = set.clone();
                        s.push(*c);
                        s
                    })
                })
                .collect();
        }

        // map the next story step here, or leave it for later
        let mut map_options = Vec::new();
        if remaining > 0 {
            let forced = i > 0 && self.h.follows(next_story) && node.mapping.last() == Some(&(i - 1));
            match self.fixed {
                Some(f) => map_options.push(f.mapping[next_story] == i),
                None => {
                    map_options.push(true);
                    if !forced {
                        map_options.push(false);
                    }
                }
            }
        } else {
            map_options.push(false);
        }

        let mut children = Vec::new();
        let mut done = Outcome::default();
        for starts in &start_sets {
            for &map_here in &map_options {
                match self.assemble(&node, &state, &selects, starts, map_here) {
                    Ok(step) => {
                        let (kids, out) = self.branch(&node, &state, step);
                        children.extend(kids);
                        done = done.merge(out);
                    }
                    Err(why) => done = done.merge(Outcome::fail(self.failure(&node, why))),
                }
            }
        }
        (children, done)
    }

    /// Collects the occurrences forced at this step (defaults, starts,
    /// intended actions, story actions) and checks them.
    fn assemble(
        &self,
        node: &Node,
        state: &FullState,
        selects: &[(AgentId, FluentId)],
        starts: &[ActivityChoice],
        map_here: bool,
    ) -> Result<Step, String> {
        let d = self.d;
        let s = node.mapping.len();
        let obs: &[(FluentId, bool)] = if map_here { self.h.observations(s) } else { &[] };
        if map_here {
            for &(f, v) in obs {
                if state.world.holds(f) != v {
                    return Err(format!("observed `{}` = {v} does not hold", d.fluent_term(f)));
                }
            }
        }
        let mut occ: Vec<Occurrence> = Vec::new();
        let mut busy: Vec<AgentId> = Vec::new();
        for &(ag, g) in selects {
            occ.push(Occurrence::Mental(MentalAction::Select(ag, g)));
            busy.push(ag);
        }
        for c in starts {
            if busy.contains(&c.agent) {
                return Err(format!("`{}` cannot start and select at once", d.agent_name(c.agent)));
            }
            occ.push(Occurrence::Mental(MentalAction::Start(c.agent, c.activity)));
            busy.push(c.agent);
        }
        let mut intended: Vec<Option<Occurrence>> = vec![None; d.agents().len()];
        for ag in 0..d.agents().len() {
            if busy.contains(&ag) {
                continue;
            }
            intended[ag] = intended_occurrence(d, state, ag, obs);
            if let Some(o) = intended[ag] {
                if !occ.contains(&o) {
                    occ.push(o);
                }
            }
        }
        if map_here {
            for &(a, v) in &self.h.hpd[s] {
                if !v {
                    continue;
                }
                let o = Occurrence::Physical(a);
                if occ.contains(&o) {
                    continue;
                }
                if d.action_kind(a) == ActionKind::Exogenous || d.agent_actors(a).next().is_none() {
                    occ.push(o);
                } else {
                    return Err(format!("`{}` is not what its actor intends", d.action_term(a)));
                }
            }
        }
        // a physical action must be intended by each of its agent actors
        for o in &occ {
            if let Occurrence::Physical(a) = o {
                for ag in d.agent_actors(*a) {
                    if intended[ag] != Some(*o) {
                        return Err(format!(
                            "`{}` is not intended by `{}`",
                            d.action_term(*a),
                            d.agent_name(ag)
                        ));
                    }
                }
            }
        }
        let phys = physical(&occ);
        if !d.legal(&state.world, &phys) {
            return Err("story actions are not executable".into());
        }
        if map_here {
            for &(a, v) in &self.h.hpd[s] {
                if !v && occ.contains(&Occurrence::Physical(a)) {
                    return Err(format!("`{}` was stated not to happen", d.action_term(a)));
                }
            }
        }
        Ok(Step { occ, mapped_here: map_here, starts: starts.to_vec(), selects: selects.to_vec() })
    }

    /// Expands one assembled step over abductions and nondeterministic
    /// successors.
    fn branch(&self, node: &Node, state: &FullState, step: Step) -> (Vec<Node>, Outcome) {
        let d = self.d;
        let i = node.step;
        let mut mapping = node.mapping.clone();
        if step.mapped_here {
            mapping.push(i);
        }
        let story_left = mapping.len() < self.h.len();
        let base_phys = physical(&step.occ);

        let abduction_sets: Vec<Vec<ActionId>> = match self.fixed {
            Some(f) => {
                let here: Vec<ActionId> = f.abduced.iter().filter(|(j, _)| *j == i).map(|(_, a)| *a).collect();
                vec![here]
            }
            None => {
                let budget = self.cfg.max_abductions.saturating_sub(node.abduced.len());
                if story_left && budget > 0 {
                    let plain = d.successors(&state.world, &base_phys);
                    let effective: Vec<ActionId> = self
                        .exogenous
                        .iter()
                        .copied()
                        .filter(|a| !base_phys.contains(a))
                        .filter(|a| !step.mapped_here || !self.h.hpd[node.mapping.len()].contains(&(*a, false)))
                        .filter(|&a| {
                            let mut with = base_phys.clone();
                            with.push(a);
                            d.legal(&state.world, &with) && {
                                let succ = d.successors(&state.world, &with);
                                !succ.is_empty() && succ != plain
                            }
                        })
                        .collect();
                    subsets(&effective, budget)
                } else {
                    vec![Vec::new()]
                }
            }
        };

        let mut children = Vec::new();
        let mut done = Outcome::default();
        for extra in abduction_sets {
            let mut occ = step.occ.clone();
            occ.extend(extra.iter().map(|&a| Occurrence::Physical(a)));
            let mut phys = base_phys.clone();
            phys.extend(&extra);
            if !extra.is_empty() && !d.legal(&state.world, &phys) {
                continue;
            }
            if occ.is_empty() {
                let mut leaf = node.clone();
                leaf.mapping = mapping.clone();
                if story_left {
                    let f = self.failure(&leaf, "nothing can happen before the next story step");
                    done = done.merge(Outcome::fail(f));
                } else {
                    done.models.push(self.finish(leaf, true));
                }
                continue;
            }
            let succ = d.successors(&state.world, &phys);
            if succ.is_empty() {
                done = done.merge(Outcome::fail(self.failure(node, "contradictory effects")));
                continue;
            }
            sort_occurrences(d, &mut occ);
            for world in succ {
                let mind = state.mind.apply(d, &occ, &world);
                let mut child = node.clone();
                child.step = i + 1;
                child.trajectory.push(FullState { world, mind });
                child.occurrences.push(occ.clone());
                child.mapping = mapping.clone();
                child.pending = step.selects.clone();
                child.abduced.extend(extra.iter().map(|&a| (i, a)));
                child.choices.extend(step.starts.iter().copied());
                children.push(child);
            }
        }
        (children, done)
    }

    /// Why the remaining story cannot be reached from `node`, if it cannot:
    /// some story action of an agent appears in no remaining or startable
    /// plan of that agent.
    fn unreachable(&self, node: &Node) -> Option<String> {
        let d = self.d;
        let s = node.state();
        for story in node.mapping.len()..self.h.len() {
            for &(a, v) in &self.h.hpd[story] {
                if !v {
                    continue;
                }
                for ag in d.agent_actors(a) {
                    if !self.reachable(node, s, ag, a) {
                        return Some(format!(
                            "`{}` (story step {story}) is no longer part of any plan of `{}`",
                            d.action_term(a),
                            d.agent_name(ag)
                        ));
                    }
                }
            }
        }
        None
    }

    fn reachable(&self, node: &Node, s: &FullState, ag: AgentId, a: ActionId) -> bool {
        let d = self.d;
        if s.mind.top_activities(d, ag).into_iter().any(|m| self.remaining_contains(&s.mind, m, a)) {
            return true;
        }
        d.activities().iter().enumerate().any(|(m, act)| {
            act.actor == ag
                && act.parents.is_empty()
                && !s.mind.active(m)
                && self.contents[m].contains(a)
                && self.startable(node, s, ag, act.goal)
        })
    }

    fn remaining_contains(&self, mind: &MentalState, m: usize, a: ActionId) -> bool {
        let act = self.d.activity(m);
        let k = mind.status(m).max(0) as usize;
        for idx in k + 1..=act.len() {
            match act.component(idx).expect("in range") {
                Component::Action(x) if x == a => return true,
                Component::Action(_) => {}
                Component::Activity(sub) => {
                    let hit = if idx == k + 1 && mind.active(sub) {
                        self.remaining_contains(mind, sub, a)
                    } else {
                        self.contents[sub].contains(a)
                    };
                    if hit {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Whether some default rule can still have `ag` select `g`, or it was
    /// just selected.
    fn startable(&self, node: &Node, s: &FullState, ag: AgentId, g: FluentId) -> bool {
        let d = self.d;
        if node.pending.contains(&(ag, g)) {
            return true;
        }
        let before = node.step.checked_sub(1).map(|j| &node.trajectory[j].world);
        d.default_selects().iter().any(|sel| {
            sel.agent == ag
                && sel.goal == g
                && match sel.trigger {
                    GroundTrigger::At(n) => n >= node.step,
                    GroundTrigger::Onset(f) => {
                        let now = s.world.holds(f);
                        (now && before.is_some_and(|b| !b.holds(f)))
                            || (!now && d.can_become(f, true))
                            || (now && d.can_become(f, false) && d.can_become(f, true))
                    }
                }
        })
    }
}

fn physical(occ: &[Occurrence]) -> Vec<ActionId> {
    occ.iter()
        .filter_map(|o| match o {
            Occurrence::Physical(a) => Some(*a),
            Occurrence::Mental(_) => None,
        })
        .collect()
}

/// All subsets of `items` with at most `k` elements, smallest first.
fn subsets(items: &[ActionId], k: usize) -> Vec<Vec<ActionId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::new(), 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for (set, from) in &frontier {
            for (j, &x) in items.iter().enumerate().skip(*from) {
                let mut s: Vec<ActionId> = set.clone();
                s.push(x);
                out.push(s.clone());
                next.push((s, j + 1));
            }
        }
        frontier = next;
    }
    out
}
