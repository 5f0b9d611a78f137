//! Sorted action-language semantics: domain descriptions, grounding,
//! defined-fluent closure, executability and transitions.

mod ground;
mod parse;
mod schema;
mod state;

pub use ground::{
    ground_domain, ActionId, ActivityId, AgentId, Domain, FluentId, FluentLit, GroundCausal, GroundChoice,
    GroundFutility, GroundRule, GroundSelect, GroundTrigger, SortTree,
};
pub use parse::parse_domain;
pub(crate) use parse::truth;
pub use schema::*;
pub use state::State;

use crate::error::DomainError;

/// Parses and grounds a domain description.
pub fn load_domain(text: &str) -> Result<Domain, DomainError> {
    ground_domain(parse_domain(text)?)
}
