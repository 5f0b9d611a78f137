//! Grounding of schematic domains over their declared instances.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::DomainError;
use crate::intentions::{Activity, Component};
use crate::term::Term;

use super::schema::*;

pub type FluentId = usize;
pub type ActionId = usize;
pub type ActivityId = usize;
pub type AgentId = usize;

/// A fluent literal: (fluent, value).
pub type FluentLit = (FluentId, bool);

#[derive(Debug, Clone)]
pub struct GroundFluent {
    pub term: Term,
    pub decl: usize,
}

#[derive(Debug, Clone)]
pub struct GroundAction {
    pub term: Term,
    pub decl: usize,
    pub actors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundCausal {
    pub triggers: Vec<ActionId>,
    pub blockers: Vec<ActionId>,
    pub body: Vec<FluentLit>,
    pub effects: Vec<FluentLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundChoice {
    pub triggers: Vec<ActionId>,
    pub blockers: Vec<ActionId>,
    pub body: Vec<FluentLit>,
    /// Exactly one of these becomes true, the rest false.
    pub options: Vec<FluentId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: FluentId,
    pub body: Vec<FluentLit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTrigger {
    At(usize),
    Onset(FluentId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSelect {
    pub agent: AgentId,
    pub goal: FluentId,
    pub trigger: GroundTrigger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundFutility {
    pub activity: ActivityId,
    pub fluent: FluentId,
    pub value: bool,
}

/// Sort hierarchy: every sort has at most one parent.
#[derive(Debug, Clone, Default)]
pub struct SortTree {
    parent: BTreeMap<String, Option<String>>,
}

impl SortTree {
    pub fn contains(&self, sort: &str) -> bool {
        self.parent.contains_key(sort)
    }

    /// True when `sub` equals `sup` or lies below it.
    pub fn is_subsort(&self, sub: &str, sup: &str) -> bool {
        let mut cur = Some(sub);
        while let Some(s) = cur {
            if s == sup {
                return true;
            }
            cur = self.parent.get(s).and_then(|p| p.as_deref());
        }
        false
    }

    pub fn sorts(&self) -> impl Iterator<Item = &str> {
        self.parent.keys().map(String::as_str)
    }
}

/// A grounded, validated domain. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Domain {
    pub(crate) schema: Schema,
    pub(crate) sorts: SortTree,
    pub(crate) instances: Vec<(String, String)>,
    pub(crate) instance_sort: HashMap<String, String>,
    pub(crate) fluent_decls: Vec<FluentDecl>,
    pub(crate) fluents: Vec<GroundFluent>,
    pub(crate) fluent_ids: HashMap<Term, FluentId>,
    pub(crate) action_decls: Vec<ActionDecl>,
    pub(crate) actions: Vec<GroundAction>,
    pub(crate) action_ids: HashMap<Term, ActionId>,
    pub(crate) causal: Vec<GroundCausal>,
    pub(crate) causal_by_action: Vec<Vec<usize>>,
    pub(crate) choices: Vec<GroundChoice>,
    pub(crate) choices_by_action: Vec<Vec<usize>>,
    pub(crate) impossible: Vec<Vec<Vec<FluentLit>>>,
    pub(crate) defined_rules: Vec<GroundRule>,
    pub(crate) strata: Vec<std::ops::Range<usize>>,
    pub(crate) statics: BTreeMap<String, BTreeSet<Vec<String>>>,
    pub(crate) activities: Vec<Activity>,
    pub(crate) activity_ids: HashMap<Term, ActivityId>,
    pub(crate) agents: Vec<String>,
    pub(crate) agent_ids: HashMap<String, AgentId>,
    pub(crate) initially: Vec<FluentLit>,
    pub(crate) default_selects: Vec<GroundSelect>,
    pub(crate) futility: Vec<GroundFutility>,
    pub(crate) can_become_true: Vec<bool>,
    pub(crate) can_become_false: Vec<bool>,
}

impl Domain {
    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn sorts(&self) -> &SortTree {
        &self.sorts
    }

    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn fluent_term(&self, id: FluentId) -> &Term {
        &self.fluents[id].term
    }

    pub fn fluent_id(&self, t: &Term) -> Option<FluentId> {
        self.fluent_ids.get(t).copied()
    }

    pub fn fluent_decl(&self, id: FluentId) -> &FluentDecl {
        &self.fluent_decls[self.fluents[id].decl]
    }

    pub fn is_defined(&self, id: FluentId) -> bool {
        self.fluent_decl(id).kind == FluentKind::Defined
    }

    pub fn action_term(&self, id: ActionId) -> &Term {
        &self.actions[id].term
    }

    pub fn action_id(&self, t: &Term) -> Option<ActionId> {
        self.action_ids.get(t).copied()
    }

    pub fn action_decl(&self, id: ActionId) -> &ActionDecl {
        &self.action_decls[self.actions[id].decl]
    }

    pub fn action_kind(&self, id: ActionId) -> ActionKind {
        self.action_decl(id).kind
    }

    pub fn actors(&self, id: ActionId) -> &[String] {
        &self.actions[id].actors
    }

    /// Actors of `id` that are intentional agents.
    pub fn agent_actors(&self, id: ActionId) -> impl Iterator<Item = AgentId> + '_ {
        self.actions[id].actors.iter().filter_map(|a| self.agent_ids.get(a).copied())
    }

    pub fn exogenous_actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.len()).filter(|&a| self.action_kind(a) == ActionKind::Exogenous)
    }

    pub fn instances(&self) -> &[(String, String)] {
        &self.instances
    }

    pub fn instance_sort(&self, name: &str) -> Option<&str> {
        self.instance_sort.get(name).map(String::as_str)
    }

    pub fn members(&self, sort: &str) -> Vec<String> {
        self.instances
            .iter()
            .filter(|(_, s)| self.sorts.is_subsort(s, sort))
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn is_member(&self, inst: &str, sort: &str) -> bool {
        self.instance_sort.get(inst).is_some_and(|s| self.sorts.is_subsort(s, sort))
    }

    pub fn static_holds(&self, name: &str, args: &[String]) -> bool {
        self.statics.get(name).is_some_and(|s| s.contains(args))
    }

    pub fn statics(&self) -> &BTreeMap<String, BTreeSet<Vec<String>>> {
        &self.statics
    }

    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn activity(&self, id: ActivityId) -> &Activity {
        &self.activities[id]
    }

    pub fn activity_id(&self, t: &Term) -> Option<ActivityId> {
        self.activity_ids.get(t).copied()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agent_ids.get(name).copied()
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id]
    }

    pub fn default_selects(&self) -> &[GroundSelect] {
        &self.default_selects
    }

    pub fn futility_rules(&self) -> &[GroundFutility] {
        &self.futility
    }

    pub fn initial_literals(&self) -> &[FluentLit] {
        &self.initially
    }

    pub fn impossibility_bodies(&self, a: ActionId) -> &[Vec<FluentLit>] {
        &self.impossible[a]
    }

    pub fn causal_laws(&self) -> &[GroundCausal] {
        &self.causal
    }

    pub fn choice_laws(&self) -> &[GroundChoice] {
        &self.choices
    }

    pub fn defined_rules(&self) -> &[GroundRule] {
        &self.defined_rules
    }

    /// Whether some law can make the fluent take `value`.
    pub fn can_become(&self, f: FluentId, value: bool) -> bool {
        if self.is_defined(f) {
            return true;
        }
        if value {
            self.can_become_true[f]
        } else {
            self.can_become_false[f]
        }
    }

    /// Re-grounds this domain's schema with additional instances.
    pub fn with_instances(&self, extra: &[(String, String)]) -> Result<Domain, DomainError> {
        let mut schema = self.schema.clone();
        for (n, s) in extra {
            schema.add_instance(n, s);
        }
        ground_domain(schema)
    }
}

/// Grounds a schematic domain: validates sorts and arities, expands every
/// declaration over the declared instances and materialises statics.
pub fn ground_domain(schema: Schema) -> Result<Domain, DomainError> {
    Grounder::new(schema)?.run()
}

struct Grounder {
    schema: Schema,
    sorts: SortTree,
    instances: Vec<(String, String)>,
    instance_sort: HashMap<String, String>,
    vars: HashMap<String, String>,
    fluent_decl_ix: HashMap<String, usize>,
    action_decl_ix: HashMap<String, usize>,
    activity_names: HashMap<String, usize>,
    statics: BTreeMap<String, BTreeSet<Vec<String>>>,
    static_arity: HashMap<String, usize>,
}

/// Variable binding during grounding.
type Binding = HashMap<String, String>;

impl Grounder {
    fn new(schema: Schema) -> Result<Self, DomainError> {
        let mut sorts = SortTree::default();
        for (s, line) in &schema.sorts {
            if sorts.parent.insert(s.clone(), None).is_some() {
                return Err(DomainError::Duplicate { line: *line, what: "sort", name: s.clone() });
            }
        }
        for (child, parent, line) in &schema.subsorts {
            for s in [child, parent] {
                if !sorts.contains(s) {
                    return Err(DomainError::UnknownSort { line: *line, sort: s.clone() });
                }
            }
            if sorts.is_subsort(parent, child) {
                return Err(DomainError::Invalid { line: *line, message: format!("subsort cycle through `{child}`") });
            }
            let slot = sorts.parent.get_mut(child).expect("checked");
            if slot.is_some() {
                return Err(DomainError::Invalid { line: *line, message: format!("sort `{child}` already has a parent") });
            }
            *slot = Some(parent.clone());
        }
        let mut instances = Vec::new();
        let mut instance_sort = HashMap::new();
        for (name, sort, line) in &schema.instances {
            if !sorts.contains(sort) {
                return Err(DomainError::UnknownSort { line: *line, sort: sort.clone() });
            }
            if instance_sort.insert(name.clone(), sort.clone()).is_some() {
                return Err(DomainError::Duplicate { line: *line, what: "instance", name: name.clone() });
            }
            instances.push((name.clone(), sort.clone()));
        }
        let mut vars = HashMap::new();
        for (name, sort, line) in &schema.vars {
            if !sorts.contains(sort) {
                return Err(DomainError::UnknownSort { line: *line, sort: sort.clone() });
            }
            if vars.insert(name.clone(), sort.clone()).is_some() {
                return Err(DomainError::Duplicate { line: *line, what: "variable", name: name.clone() });
            }
        }
        let mut fluent_decl_ix = HashMap::new();
        for (i, d) in schema.fluents.iter().enumerate() {
            check_sorts(&sorts, &d.arg_sorts, d.line)?;
            if fluent_decl_ix.insert(d.name.clone(), i).is_some() {
                return Err(DomainError::Duplicate { line: d.line, what: "fluent", name: d.name.clone() });
            }
        }
        let mut action_decl_ix = HashMap::new();
        for (i, d) in schema.actions.iter().enumerate() {
            check_sorts(&sorts, &d.arg_sorts, d.line)?;
            if d.kind != ActionKind::Exogenous && d.actors.is_empty() {
                return Err(DomainError::Invalid {
                    line: d.line,
                    message: format!("agent action `{}` needs at least one actor", d.name),
                });
            }
            if action_decl_ix.insert(d.name.clone(), i).is_some() || fluent_decl_ix.contains_key(&d.name) {
                return Err(DomainError::Duplicate { line: d.line, what: "action", name: d.name.clone() });
            }
        }
        let mut activity_names = HashMap::new();
        for (i, a) in schema.activities.iter().enumerate() {
            if activity_names.insert(a.head.name.clone(), i).is_some()
                || action_decl_ix.contains_key(&a.head.name)
                || fluent_decl_ix.contains_key(&a.head.name)
            {
                return Err(DomainError::Duplicate { line: a.line, what: "activity", name: a.head.name.clone() });
            }
        }
        Ok(Grounder {
            schema,
            sorts,
            instances,
            instance_sort,
            vars,
            fluent_decl_ix,
            action_decl_ix,
            activity_names,
            statics: BTreeMap::new(),
            static_arity: HashMap::new(),
        })
    }

    fn members(&self, sort: &str) -> Vec<String> {
        self.instances
            .iter()
            .filter(|(_, s)| self.sorts.is_subsort(s, sort))
            .map(|(n, _)| n.clone())
            .collect()
    }

    fn var_sort(&self, v: &str, line: usize) -> Result<&str, DomainError> {
        self.vars
            .get(v)
            .map(String::as_str)
            .ok_or_else(|| DomainError::Unknown { line, what: "variable", name: v.to_string() })
    }

    /// Checks an atom against a declared signature.
    fn check_atom(&self, atom: &Atom, sorts: &[String], line: usize) -> Result<(), DomainError> {
        if atom.args.len() != sorts.len() {
            return Err(DomainError::Arity {
                line,
                name: atom.name.clone(),
                expected: sorts.len(),
                found: atom.args.len(),
            });
        }
        for (i, (arg, want)) in atom.args.iter().zip(sorts).enumerate() {
            let found = match arg {
                Arg::Var(v) => self.var_sort(v, line)?.to_string(),
                Arg::Const(c) => self
                    .instance_sort
                    .get(c)
                    .cloned()
                    .ok_or_else(|| DomainError::Unknown { line, what: "instance", name: c.clone() })?,
            };
            if !self.sorts.is_subsort(&found, want) {
                return Err(DomainError::IllSorted {
                    line,
                    name: atom.name.clone(),
                    position: i + 1,
                    expected: want.clone(),
                    found,
                });
            }
        }
        Ok(())
    }

    fn check_fluent(&self, atom: &Atom, line: usize) -> Result<usize, DomainError> {
        let ix = *self
            .fluent_decl_ix
            .get(&atom.name)
            .ok_or_else(|| DomainError::Unknown { line, what: "fluent", name: atom.name.clone() })?;
        self.check_atom(atom, &self.schema.fluents[ix].arg_sorts, line)?;
        Ok(ix)
    }

    fn check_action(&self, atom: &Atom, line: usize) -> Result<usize, DomainError> {
        let ix = *self
            .action_decl_ix
            .get(&atom.name)
            .ok_or_else(|| DomainError::Unknown { line, what: "action", name: atom.name.clone() })?;
        self.check_atom(atom, &self.schema.actions[ix].arg_sorts, line)?;
        Ok(ix)
    }

    fn check_consts(&self, atom: &Atom, line: usize) -> Result<(), DomainError> {
        for a in &atom.args {
            match a {
                Arg::Const(c) if !self.instance_sort.contains_key(c) => {
                    return Err(DomainError::Unknown { line, what: "instance", name: c.clone() })
                }
                Arg::Var(v) => {
                    self.var_sort(v, line)?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn is_static(&self, name: &str) -> bool {
        self.static_arity.contains_key(name)
    }

    fn check_conds(&self, body: &[Cond], line: usize) -> Result<(), DomainError> {
        for c in body {
            match c {
                Cond::Atom(lit) => {
                    if let Some(&ar) = self.static_arity.get(&lit.atom.name) {
                        if ar != lit.atom.args.len() {
                            return Err(DomainError::Arity {
                                line,
                                name: lit.atom.name.clone(),
                                expected: ar,
                                found: lit.atom.args.len(),
                            });
                        }
                        self.check_consts(&lit.atom, line)?;
                    } else {
                        self.check_fluent(&lit.atom, line)?;
                    }
                }
                Cond::Compare { left, right, .. } => {
                    for a in [left, right] {
                        match a {
                            Arg::Var(v) => {
                                self.var_sort(v, line)?;
                            }
                            Arg::Const(c) if !self.instance_sort.contains_key(c) => {
                                return Err(DomainError::Unknown { line, what: "instance", name: c.clone() })
                            }
                            Arg::Const(_) => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Enumerates all bindings of `vars` satisfying the static part of `body`
    /// (comparisons and static atoms), pruning as soon as a condition is fully bound.
    fn bindings(&self, vars: &[String], body: &[Cond], line: usize) -> Result<Vec<Binding>, DomainError> {
        let mut domains = Vec::with_capacity(vars.len());
        for v in vars {
            domains.push(self.members(self.var_sort(v, line)?));
        }
        let static_conds: Vec<&Cond> = body
            .iter()
            .filter(|c| match c {
                Cond::Compare { .. } => true,
                Cond::Atom(l) => self.is_static(&l.atom.name),
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Binding::new();
        self.bind_rec(vars, &domains, 0, &static_conds, &mut cur, &mut out);
        Ok(out)
    }

    fn bind_rec(
        &self,
        vars: &[String],
        domains: &[Vec<String>],
        i: usize,
        conds: &[&Cond],
        cur: &mut Binding,
        out: &mut Vec<Binding>,
    ) {
        for c in conds {
            if let Some(false) = self.eval_static(c, cur) {
                return;
            }
        }
        if i == vars.len() {
            out.push(cur.clone());
            return;
        }
        for val in &domains[i] {
            cur.insert(vars[i].clone(), val.clone());
            self.bind_rec(vars, domains, i + 1, conds, cur, out);
        }
        cur.remove(&vars[i]);
    }

    /// `None` while the condition still has unbound variables.
    fn eval_static(&self, c: &Cond, b: &Binding) -> Option<bool> {
        match c {
            Cond::Compare { left, right, equal } => {
                let l = resolve(left, b)?;
                let r = resolve(right, b)?;
                Some((l == r) == *equal)
            }
            Cond::Atom(lit) => {
                let args = resolve_all(&lit.atom, b)?;
                let holds = self.statics.get(&lit.atom.name).is_some_and(|s| s.contains(&args));
                Some(holds == lit.positive)
            }
        }
    }

    fn run(mut self) -> Result<Domain, DomainError> {
        // statics, in declaration order
        for r in &self.schema.statics {
            match self.static_arity.get(&r.head.name) {
                Some(&a) if a != r.head.args.len() => {
                    return Err(DomainError::Arity {
                        line: r.line,
                        name: r.head.name.clone(),
                        expected: a,
                        found: r.head.args.len(),
                    })
                }
                _ => {}
            }
            if self.fluent_decl_ix.contains_key(&r.head.name) || self.action_decl_ix.contains_key(&r.head.name) {
                return Err(DomainError::Duplicate { line: r.line, what: "static", name: r.head.name.clone() });
            }
            self.static_arity.insert(r.head.name.clone(), r.head.args.len());
        }
        let static_rules = self.schema.statics.clone();
        for r in &static_rules {
            self.check_consts(&r.head, r.line)?;
            self.check_conds(&r.body, r.line)?;
            if let Some(c) = r.body.iter().find(|c| matches!(c, Cond::Atom(l) if !self.is_static(&l.atom.name))) {
                return Err(DomainError::Invalid { line: r.line, message: format!("static rule body mentions a fluent: {c:?}") });
            }
            let vars = collect_vars(std::iter::once(&r.head), &r.body);
            let facts: Vec<Vec<String>> = self
                .bindings(&vars, &r.body, r.line)?
                .iter()
                .map(|b| resolve_all(&r.head, b).expect("bound"))
                .collect();
            self.statics.entry(r.head.name.clone()).or_default().extend(facts);
        }

        // fluents
        let mut fluents = Vec::new();
        let mut fluent_ids = HashMap::new();
        for (di, d) in self.schema.fluents.iter().enumerate() {
            for args in product(&d.arg_sorts.iter().map(|s| self.members(s)).collect::<Vec<_>>()) {
                let term = Term::constants(&d.name, args);
                fluent_ids.insert(term.clone(), fluents.len());
                fluents.push(GroundFluent { term, decl: di });
            }
        }
        // actions
        let mut actions = Vec::new();
        let mut action_ids = HashMap::new();
        for (di, d) in self.schema.actions.iter().enumerate() {
            for args in product(&d.arg_sorts.iter().map(|s| self.members(s)).collect::<Vec<_>>()) {
                let actors = d.actors.iter().map(|&p| args[p].clone()).collect();
                let term = Term::constants(&d.name, args);
                action_ids.insert(term.clone(), actions.len());
                actions.push(GroundAction { term, decl: di, actors });
            }
        }

        let fl = |atom: &Atom, b: &Binding| -> FluentId {
            let t = Term::constants(&atom.name, resolve_all(atom, b).expect("bound"));
            fluent_ids[&t]
        };
        let ac = |atom: &Atom, b: &Binding| -> ActionId {
            let t = Term::constants(&atom.name, resolve_all(atom, b).expect("bound"));
            action_ids[&t]
        };
        let fluent_body = |body: &[Cond], b: &Binding, statics: &HashMap<String, usize>| -> Vec<FluentLit> {
            body.iter()
                .filter_map(|c| match c {
                    Cond::Atom(l) if !statics.contains_key(&l.atom.name) => Some((fl(&l.atom, b), l.positive)),
                    _ => None,
                })
                .collect()
        };

        let mut causal = Vec::new();
        let mut choices = Vec::new();
        let mut impossible = vec![Vec::new(); actions.len()];
        let mut rules = Vec::new();
        let mut defined_deps: Vec<(String, String, bool, usize)> = Vec::new();

        for law in &self.schema.laws {
            let line = law.line();
            match law {
                Law::Causal { effects, triggers, body, .. } => {
                    for e in effects {
                        let ix = self.check_fluent(&e.atom, line)?;
                        if self.schema.fluents[ix].kind != FluentKind::Inertial {
                            return Err(DomainError::Invalid {
                                line,
                                message: format!("dynamic law head `{}` must be an inertial fluent", e.atom),
                            });
                        }
                    }
                    for t in triggers {
                        self.check_action(&t.atom, line)?;
                    }
                    self.check_conds(body, line)?;
                    let atoms: Vec<&Atom> =
                        effects.iter().map(|e| &e.atom).chain(triggers.iter().map(|t| &t.atom)).collect();
                    let vars = collect_vars(atoms.into_iter(), body);
                    for b in self.bindings(&vars, body, line)? {
                        causal.push(GroundCausal {
                            triggers: triggers.iter().filter(|t| t.occurs).map(|t| ac(&t.atom, &b)).collect(),
                            blockers: triggers.iter().filter(|t| !t.occurs).map(|t| ac(&t.atom, &b)).collect(),
                            body: fluent_body(body, &b, &self.static_arity),
                            effects: effects.iter().map(|e| (fl(&e.atom, &b), e.positive)).collect(),
                        });
                    }
                }
                Law::Constraint { head, body, .. } => {
                    let ix = self.check_fluent(head, line)?;
                    if self.schema.fluents[ix].kind != FluentKind::Defined {
                        return Err(DomainError::Invalid {
                            line,
                            message: format!("state constraint head `{head}` must be a defined fluent"),
                        });
                    }
                    self.check_conds(body, line)?;
                    for c in body {
                        if let Cond::Atom(l) = c {
                            if let Some(&bi) = self.fluent_decl_ix.get(&l.atom.name) {
                                if self.schema.fluents[bi].kind == FluentKind::Defined {
                                    defined_deps.push((head.name.clone(), l.atom.name.clone(), l.positive, line));
                                }
                            }
                        }
                    }
                    let vars = collect_vars(std::iter::once(head), body);
                    for b in self.bindings(&vars, body, line)? {
                        rules.push(GroundRule { head: fl(head, &b), body: fluent_body(body, &b, &self.static_arity) });
                    }
                }
                Law::Impossible { action, body, .. } => {
                    self.check_action(action, line)?;
                    self.check_conds(body, line)?;
                    let vars = collect_vars(std::iter::once(action), body);
                    for b in self.bindings(&vars, body, line)? {
                        let body = fluent_body(body, &b, &self.static_arity);
                        let a = ac(action, &b);
                        if !impossible[a].contains(&body) {
                            impossible[a].push(body);
                        }
                    }
                }
                Law::Choice { template, generator, triggers, body, .. } => {
                    let ix = self.check_fluent(template, line)?;
                    if self.schema.fluents[ix].kind != FluentKind::Inertial {
                        return Err(DomainError::Invalid {
                            line,
                            message: format!("choice over `{template}` must range over an inertial fluent"),
                        });
                    }
                    if !self.is_static(&generator.name) {
                        return Err(DomainError::Unknown { line, what: "static", name: generator.name.clone() });
                    }
                    self.check_consts(generator, line)?;
                    for t in triggers {
                        self.check_action(&t.atom, line)?;
                    }
                    self.check_conds(body, line)?;
                    let outer = collect_vars(triggers.iter().map(|t| &t.atom), body);
                    let inner: Vec<String> =
                        collect_vars([template, generator].into_iter(), &[]).into_iter().filter(|v| !outer.contains(v)).collect();
                    let gen_cond = [Cond::Atom(Literal { atom: generator.clone(), positive: true })];
                    for b in self.bindings(&outer, body, line)? {
                        let mut options = Vec::new();
                        let mut domains = Vec::new();
                        for v in &inner {
                            domains.push(self.members(self.var_sort(v, line)?));
                        }
                        let mut partial = b.clone();
                        let mut found = Vec::new();
                        let refs: Vec<&Cond> = gen_cond.iter().collect();
                        self.bind_rec(&inner, &domains, 0, &refs, &mut partial, &mut found);
                        for full in found {
                            let f = fl(template, &full);
                            if !options.contains(&f) {
                                options.push(f);
                            }
                        }
                        choices.push(GroundChoice {
                            triggers: triggers.iter().filter(|t| t.occurs).map(|t| ac(&t.atom, &b)).collect(),
                            blockers: triggers.iter().filter(|t| !t.occurs).map(|t| ac(&t.atom, &b)).collect(),
                            body: fluent_body(body, &b, &self.static_arity),
                            options,
                        });
                    }
                }
            }
        }

        // stratify defined fluents
        let defined_names: Vec<String> = self
            .schema
            .fluents
            .iter()
            .filter(|d| d.kind == FluentKind::Defined)
            .map(|d| d.name.clone())
            .collect();
        let mut stratum: HashMap<String, usize> = defined_names.iter().map(|n| (n.clone(), 0)).collect();
        let limit = defined_names.len() + 1;
        loop {
            let mut changed = false;
            for (h, b, pos, _) in &defined_deps {
                let need = stratum[b] + usize::from(!*pos);
                if stratum[h] < need {
                    stratum.insert(h.clone(), need);
                    changed = true;
                    if need > limit {
                        return Err(DomainError::NegativeCycle(h.clone()));
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let name_of = |f: FluentId| &self.schema.fluents[fluents[f].decl].name;
        rules.sort_by_key(|r| stratum[name_of(r.head)]);
        let mut strata = Vec::new();
        let mut start = 0;
        while start < rules.len() {
            let s = stratum[name_of(rules[start].head)];
            let mut end = start;
            while end < rules.len() && stratum[name_of(rules[end].head)] == s {
                end += 1;
            }
            strata.push(start..end);
            start = end;
        }

        let mut causal_by_action = vec![Vec::new(); actions.len()];
        for (i, l) in causal.iter().enumerate() {
            for &a in l.triggers.iter().chain(&l.blockers) {
                if !causal_by_action[a].contains(&i) {
                    causal_by_action[a].push(i);
                }
            }
        }
        let mut choices_by_action = vec![Vec::new(); actions.len()];
        for (i, l) in choices.iter().enumerate() {
            for &a in l.triggers.iter().chain(&l.blockers) {
                if !choices_by_action[a].contains(&i) {
                    choices_by_action[a].push(i);
                }
            }
        }
        let mut can_become_true = vec![false; fluents.len()];
        let mut can_become_false = vec![false; fluents.len()];
        for l in &causal {
            for &(f, v) in &l.effects {
                if v {
                    can_become_true[f] = true;
                } else {
                    can_become_false[f] = true;
                }
            }
        }
        for c in &choices {
            for &f in &c.options {
                can_become_true[f] = true;
                can_become_false[f] = true;
            }
        }

        // initial literals
        let mut initially: Vec<FluentLit> = Vec::new();
        for (lit, line) in &self.schema.initially {
            self.check_fluent(&lit.atom, *line)?;
            let vars = collect_vars(std::iter::once(&lit.atom), &[]);
            for b in self.bindings(&vars, &[], *line)? {
                let f = fl(&lit.atom, &b);
                if initially.contains(&(f, !lit.positive)) {
                    return Err(DomainError::Invalid {
                        line: *line,
                        message: format!("initial value of `{}` contradicts an earlier default", fluents[f].term),
                    });
                }
                if !initially.contains(&(f, lit.positive)) {
                    initially.push((f, lit.positive));
                }
            }
        }

        let (activities, activity_ids, agents, agent_ids) =
            self.ground_activities(&fluent_ids, &action_ids)?;

        let mut default_selects = Vec::new();
        for d in &self.schema.default_selects {
            self.check_fluent(&d.goal, d.line)?;
            let mut atoms = vec![&d.goal];
            if let SelectTrigger::Onset(a) = &d.trigger {
                self.check_fluent(a, d.line)?;
                atoms.push(a);
            }
            let mut vars = collect_vars(atoms.into_iter(), &[]);
            if let Arg::Var(v) = &d.agent {
                self.var_sort(v, d.line)?;
                if !vars.contains(v) {
                    vars.insert(0, v.clone());
                }
            }
            for b in self.bindings(&vars, &[], d.line)? {
                let name = resolve(&d.agent, &b).expect("bound").to_string();
                let agent = *agent_ids.get(&name).ok_or_else(|| DomainError::Invalid {
                    line: d.line,
                    message: format!("`{name}` selects goals but performs no activity"),
                })?;
                let trigger = match &d.trigger {
                    SelectTrigger::At(n) => GroundTrigger::At(*n),
                    SelectTrigger::Onset(a) => GroundTrigger::Onset(fl(a, &b)),
                };
                default_selects.push(GroundSelect { agent, goal: fl(&d.goal, &b), trigger });
            }
        }

        let mut futility = Vec::new();
        for d in &self.schema.futility {
            if !self.activity_names.contains_key(&d.activity.name) {
                return Err(DomainError::Unknown { line: d.line, what: "activity", name: d.activity.name.clone() });
            }
            self.check_consts(&d.activity, d.line)?;
            self.check_fluent(&d.fluent, d.line)?;
            let vars = collect_vars([&d.activity, &d.fluent].into_iter(), &[]);
            for b in self.bindings(&vars, &[], d.line)? {
                let t = Term::constants(&d.activity.name, resolve_all(&d.activity, &b).expect("bound"));
                if let Some(&activity) = activity_ids.get(&t) {
                    futility.push(GroundFutility { activity, fluent: fl(&d.fluent, &b), value: d.value });
                }
            }
        }

        Ok(Domain {
            sorts: self.sorts.clone(),
            instances: self.instances.clone(),
            instance_sort: self.instance_sort.clone(),
            fluent_decls: self.schema.fluents.clone(),
            fluents,
            fluent_ids,
            action_decls: self.schema.actions.clone(),
            actions,
            action_ids,
            causal,
            causal_by_action,
            choices,
            choices_by_action,
            impossible,
            defined_rules: rules,
            strata,
            statics: self.statics.clone(),
            activities,
            activity_ids,
            agents,
            agent_ids,
            initially,
            default_selects,
            futility,
            can_become_true,
            can_become_false,
            schema: self.schema,
        })
    }

    #[allow(clippy::type_complexity)]
    fn ground_activities(
        &self,
        fluent_ids: &HashMap<Term, FluentId>,
        action_ids: &HashMap<Term, ActionId>,
    ) -> Result<(Vec<Activity>, HashMap<Term, ActivityId>, Vec<String>, HashMap<String, AgentId>), DomainError> {
        // first pass: ids, goals, actors and raw components
        struct Raw {
            id: Term,
            actor: String,
            goal: FluentId,
            comps: Vec<Term>,
            line: usize,
        }
        let mut raws: Vec<Raw> = Vec::new();
        let mut ids: HashMap<Term, ActivityId> = HashMap::new();
        for decl in &self.schema.activities {
            let line = decl.line;
            self.check_consts(&decl.head, line)?;
            let actor = decl
                .actor
                .as_ref()
                .ok_or_else(|| DomainError::Invalid { line, message: format!("activity `{}` has no actor", decl.head) })?;
            let goal = decl
                .goal
                .as_ref()
                .ok_or_else(|| DomainError::Invalid { line, message: format!("activity `{}` has no goal", decl.head) })?;
            self.check_fluent(goal, line)?;
            let mut comps = decl.components.clone();
            comps.sort_by_key(|(k, _)| *k);
            for (i, (k, atom)) in comps.iter().enumerate() {
                if *k != i + 1 {
                    return Err(DomainError::Invalid {
                        line,
                        message: format!("activity `{}` components must be numbered 1..n", decl.head),
                    });
                }
                if self.activity_names.contains_key(&atom.name) {
                    self.check_consts(atom, line)?;
                } else {
                    self.check_action(atom, line)?;
                }
            }
            if comps.is_empty() {
                return Err(DomainError::Invalid { line, message: format!("activity `{}` has no components", decl.head) });
            }
            let mut atoms: Vec<&Atom> = vec![&decl.head, goal];
            atoms.extend(comps.iter().map(|(_, a)| a));
            let mut vars = collect_vars(atoms.into_iter(), &[]);
            if let Arg::Var(v) = actor {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
            for b in self.bindings(&vars, &[], line)? {
                let id = Term::constants(&decl.head.name, resolve_all(&decl.head, &b).expect("bound"));
                if ids.contains_key(&id) {
                    return Err(DomainError::Invalid {
                        line,
                        message: format!("activity `{id}` is ambiguous: its plan depends on variables missing from its name"),
                    });
                }
                let actor_name = resolve(actor, &b).expect("bound").to_string();
                let goal_t = Term::constants(&goal.name, resolve_all(goal, &b).expect("bound"));
                let comp_terms =
                    comps.iter().map(|(_, a)| Term::constants(&a.name, resolve_all(a, &b).expect("bound"))).collect();
                ids.insert(id.clone(), raws.len());
                raws.push(Raw { id, actor: actor_name, goal: fluent_ids[&goal_t], comps: comp_terms, line });
            }
        }
        let agent_set: BTreeSet<String> = raws.iter().map(|r| r.actor.clone()).collect();
        let agents: Vec<String> = agent_set.into_iter().collect();
        let agent_ids: HashMap<String, AgentId> = agents.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let mut activities = Vec::with_capacity(raws.len());
        for r in &raws {
            let mut components = Vec::with_capacity(r.comps.len());
            for c in &r.comps {
                if self.activity_names.contains_key(&c.functor) {
                    let sub = *ids.get(c).ok_or_else(|| DomainError::Invalid {
                        line: r.line,
                        message: format!("sub-activity `{c}` of `{}` does not exist", r.id),
                    })?;
                    components.push(Component::Activity(sub));
                } else {
                    let a = action_ids[c];
                    if !self.schema.actions[self.action_decl_ix[&c.functor]].actors.iter().any(|&p| c.args[p].functor == r.actor) {
                        return Err(DomainError::Invalid {
                            line: r.line,
                            message: format!("`{}` is not an action of `{}` in activity `{}`", c, r.actor, r.id),
                        });
                    }
                    components.push(Component::Action(a));
                }
            }
            activities.push(Activity {
                id: r.id.clone(),
                actor: agent_ids[&r.actor],
                goal: r.goal,
                components,
                parents: Vec::new(),
            });
        }
        for i in 0..activities.len() {
            let subs: Vec<ActivityId> = activities[i]
                .components
                .iter()
                .filter_map(|c| match c {
                    Component::Activity(s) => Some(*s),
                    Component::Action(_) => None,
                })
                .collect();
            for s in subs {
                if activities[s].actor != activities[i].actor {
                    return Err(DomainError::Invalid {
                        line: raws[i].line,
                        message: format!("sub-activity `{}` has a different actor", activities[s].id),
                    });
                }
                activities[s].parents.push(i);
            }
        }
        // acyclic nesting
        let mut state = vec![0u8; activities.len()];
        fn visit(i: usize, acts: &[Activity], st: &mut [u8]) -> bool {
            if st[i] == 1 {
                return false;
            }
            if st[i] == 2 {
                return true;
            }
            st[i] = 1;
            for c in &acts[i].components {
                if let Component::Activity(s) = c {
                    if !visit(*s, acts, st) {
                        return false;
                    }
                }
            }
            st[i] = 2;
            true
        }
        for i in 0..activities.len() {
            if !visit(i, &activities, &mut state) {
                return Err(DomainError::Invalid {
                    line: raws[i].line,
                    message: format!("activity `{}` contains itself", activities[i].id),
                });
            }
        }
        Ok((activities, ids, agents, agent_ids))
    }
}

fn check_sorts(tree: &SortTree, sorts: &[String], line: usize) -> Result<(), DomainError> {
    for s in sorts {
        if !tree.contains(s) {
            return Err(DomainError::UnknownSort { line, sort: s.clone() });
        }
    }
    Ok(())
}

fn resolve<'a>(a: &'a Arg, b: &'a Binding) -> Option<&'a str> {
    match a {
        Arg::Const(c) => Some(c),
        Arg::Var(v) => b.get(v).map(String::as_str),
    }
}

fn resolve_all(atom: &Atom, b: &Binding) -> Option<Vec<String>> {
    atom.args.iter().map(|a| resolve(a, b).map(str::to_string)).collect()
}

/// Variables in order of first appearance.
fn collect_vars<'a>(atoms: impl Iterator<Item = &'a Atom>, body: &'a [Cond]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |v: &str| {
        if seen.insert(v.to_string()) {
            out.push(v.to_string());
        }
    };
    for a in atoms {
        for v in a.vars() {
            push(v);
        }
    }
    for c in body {
        match c {
            Cond::Atom(l) => {
                for v in l.atom.vars() {
                    push(v);
                }
            }
            Cond::Compare { left, right, .. } => {
                for a in [left, right] {
                    if let Arg::Var(v) = a {
                        push(v);
                    }
                }
            }
        }
    }
    out
}

/// Cartesian product, in lexicographic order of the input lists.
fn product(lists: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}
