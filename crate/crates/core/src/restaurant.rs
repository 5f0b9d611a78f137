//! The bundled restaurant knowledge base and goal/activity helpers that the
//! reader uses with any domain written in the same format.

use crate::action_core::{
    ground_domain, parse_domain, ActivityId, AgentId, Domain, FluentId, GroundTrigger, Schema, State,
};
use crate::error::DomainError;

/// Restaurant domain description shipped with the crate.
pub const RESTAURANT_DOMAIN: &str = include_str!("../assets/restaurant.domain");

/// Verb-sense to action mapping rules for the restaurant domain.
pub const RESTAURANT_FRAME_RULES: &str = include_str!("../assets/restaurant.frames");

/// The restaurant schema, parsed once per call.
pub fn restaurant_schema() -> Schema {
    parse_domain(RESTAURANT_DOMAIN).expect("bundled restaurant domain parses")
}

/// Grounds the restaurant domain with story-specific instances.
pub fn build_domain(extra_instances: &[(String, String)]) -> Result<Domain, DomainError> {
    build_from_schema(restaurant_schema(), extra_instances)
}

/// Grounds any schema with extra instances, rejecting names that are
/// already declared.
pub fn build_from_schema(mut schema: Schema, extra_instances: &[(String, String)]) -> Result<Domain, DomainError> {
    for (name, sort) in extra_instances {
        if schema.instances.iter().any(|(n, _, _)| n == name) {
            return Err(DomainError::Duplicate { line: 0, what: "instance", name: name.clone() });
        }
        schema.add_instance(name, sort);
    }
    ground_domain(schema)
}

/// Goal selections triggered at step `i` by the default rules, given the
/// states at `i` and `i-1`.
pub fn default_selections(d: &Domain, i: usize, now: &State, before: Option<&State>) -> Vec<(AgentId, FluentId)> {
    let mut out = Vec::new();
    for s in d.default_selects() {
        let fires = match s.trigger {
            GroundTrigger::At(n) => n == i,
            GroundTrigger::Onset(f) => now.holds(f) && before.is_some_and(|b| !b.holds(f)),
        };
        if fires && !out.contains(&(s.agent, s.goal)) {
            out.push((s.agent, s.goal));
        }
    }
    out
}

/// Activities `agent` may start to pursue `goal`, in grounding order.
pub fn candidate_activities(d: &Domain, agent: AgentId, goal: FluentId) -> Vec<ActivityId> {
    d.activities()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.actor == agent && a.goal == goal && a.parents.is_empty())
        .map(|(i, _)| i)
        .collect()
}

/// Whether an observation `(fluent, value)` made at some step makes
/// `activity` futile at that step.
pub fn futile(d: &Domain, activity: ActivityId, observations: &[(FluentId, bool)]) -> bool {
    d.futility_rules()
        .iter()
        .any(|r| r.activity == activity && observations.contains(&(r.fluent, r.value)))
}
