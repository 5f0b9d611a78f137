//! Physical states, executability and nondeterministic successors.

use std::fmt;

use fixedbitset::FixedBitSet;

use super::ground::{ActionId, Domain, FluentId, FluentLit};
use super::schema::ActionKind;

/// A complete truth assignment over the ground fluents of a domain.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: FixedBitSet,
}

impl State {
    pub fn empty(n: usize) -> Self {
        State { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn holds(&self, f: FluentId) -> bool {
        self.bits.contains(f)
    }

    pub fn set(&mut self, f: FluentId, v: bool) {
        self.bits.set(f, v);
    }

    pub fn satisfies(&self, lits: &[FluentLit]) -> bool {
        lits.iter().all(|&(f, v)| self.holds(f) == v)
    }

    pub fn true_fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.bits.ones()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}

impl Domain {
    /// Recomputes every defined fluent from the inertial ones, stratum by
    /// stratum, under the closed-world assumption.
    pub fn closure(&self, mut s: State) -> State {
        for r in &self.defined_rules {
            s.set(r.head, false);
        }
        for range in &self.strata {
            loop {
                let mut changed = false;
                for r in &self.defined_rules[range.clone()] {
                    if !s.holds(r.head) && s.satisfies(&r.body) {
                        s.set(r.head, true);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        s
    }

    /// The default initial state, with `overrides` taking precedence over
    /// the domain's `initially` literals.
    pub fn initial_state(&self, overrides: &[FluentLit]) -> State {
        let mut s = State::empty(self.num_fluents());
        for &(f, v) in &self.initially {
            s.set(f, v);
        }
        for &(f, v) in overrides {
            if !self.is_defined(f) {
                s.set(f, v);
            }
        }
        self.closure(s)
    }

    /// Whether `a` is executable in `s`.
    pub fn executable(&self, s: &State, a: ActionId) -> bool {
        !self.impossible[a].iter().any(|body| s.satisfies(body))
    }

    /// True iff every action is executable and no actor performs two agent
    /// actions. Exogenous actions are exempt from the cardinality limit.
    pub fn legal(&self, s: &State, occ: &[ActionId]) -> bool {
        if !occ.iter().all(|&a| self.executable(s, a)) {
            return false;
        }
        let mut seen: Vec<&str> = Vec::new();
        for &a in occ {
            if self.action_kind(a) == ActionKind::Exogenous {
                continue;
            }
            for actor in self.actors(a) {
                if seen.contains(&actor.as_str()) {
                    return false;
                }
                seen.push(actor);
            }
        }
        true
    }

    /// All states that may follow `s` when `occ` happens. Empty when the
    /// fired laws contradict each other (or a fired choice has no option).
    pub fn successors(&self, s: &State, occ: &[ActionId]) -> Vec<State> {
        let fired = |triggers: &[ActionId], blockers: &[ActionId], body: &[FluentLit]| {
            triggers.iter().all(|a| occ.contains(a)) && !blockers.iter().any(|a| occ.contains(a)) && s.satisfies(body)
        };
        let mut laws: Vec<usize> = occ.iter().flat_map(|&a| self.causal_by_action[a].iter().copied()).collect();
        // laws triggered only by absences still need scanning
        laws.extend(
            self.causal
                .iter()
                .enumerate()
                .filter(|(_, l)| l.triggers.is_empty())
                .map(|(i, _)| i),
        );
        laws.sort_unstable();
        laws.dedup();
        let mut forced: Vec<Option<bool>> = vec![None; self.num_fluents()];
        let mut touched: Vec<FluentId> = Vec::new();
        for i in laws {
            let l = &self.causal[i];
            if !fired(&l.triggers, &l.blockers, &l.body) {
                continue;
            }
            for &(f, v) in &l.effects {
                match forced[f] {
                    Some(w) if w != v => return Vec::new(),
                    Some(_) => {}
                    None => {
                        forced[f] = Some(v);
                        touched.push(f);
                    }
                }
            }
        }
        let mut choice_ix: Vec<usize> = occ.iter().flat_map(|&a| self.choices_by_action[a].iter().copied()).collect();
        choice_ix.extend(
            self.choices
                .iter()
                .enumerate()
                .filter(|(_, c)| c.triggers.is_empty())
                .map(|(i, _)| i),
        );
        choice_ix.sort_unstable();
        choice_ix.dedup();
        let fired_choices: Vec<&[FluentId]> = choice_ix
            .into_iter()
            .map(|i| &self.choices[i])
            .filter(|c| fired(&c.triggers, &c.blockers, &c.body))
            .map(|c| c.options.as_slice())
            .collect();

        let mut base = s.clone();
        for f in touched {
            base.set(f, forced[f].expect("touched"));
        }
        let mut out: Vec<State> = Vec::new();
        let mut assigned: Vec<Option<bool>> = forced;
        self.expand_choices(&fired_choices, 0, &mut base, &mut assigned, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn expand_choices(
        &self,
        choices: &[&[FluentId]],
        i: usize,
        cur: &mut State,
        assigned: &mut Vec<Option<bool>>,
        out: &mut Vec<State>,
    ) {
        if i == choices.len() {
            out.push(self.closure(cur.clone()));
            return;
        }
        for &pick in choices[i] {
            let mut undo: Vec<(FluentId, Option<bool>, bool)> = Vec::new();
            let mut ok = true;
            for &f in choices[i] {
                let v = f == pick;
                match assigned[f] {
                    Some(w) if w != v => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        undo.push((f, None, cur.holds(f)));
                        assigned[f] = Some(v);
                        cur.set(f, v);
                    }
                }
            }
            if ok {
                self.expand_choices(choices, i + 1, cur, assigned, out);
            }
            for (f, prev, val) in undo.into_iter().rev() {
                assigned[f] = prev;
                cur.set(f, val);
            }
        }
    }
}
