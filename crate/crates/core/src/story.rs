//! From narrative text to a grounded domain and history.

use thiserror::Error;

use crate::action_core::{parse_domain, Domain, Schema};
use crate::error::{DomainError, NarrativeError, SyntaxError};
use crate::frames::{map_frames, parse_frame_rules};
use crate::narrative::{History, Narrative};
use crate::restaurant::{build_from_schema, restaurant_schema, RESTAURANT_FRAME_RULES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("domain: {0}")]
    Domain(#[from] DomainError),
    #[error("narrative: {0}")]
    Narrative(#[from] NarrativeError),
    #[error("frame rules: {0}")]
    FrameRules(SyntaxError),
}

/// Where the domain and frame rules come from.
#[derive(Debug, Clone, Default)]
pub struct Sources<'a> {
    /// Domain description text; the bundled restaurant domain when `None`.
    pub domain: Option<&'a str>,
    /// Frame mapping rules; the bundled restaurant rules when `None`.
    pub frame_rules: Option<&'a str>,
    /// Reject frames that no rule maps, or that have unused roles.
    pub strict_frames: bool,
}

/// A story ready for interpretation.
#[derive(Debug, Clone)]
pub struct Story {
    /// The narrative as written, with frame-derived facts and minted
    /// instances added.
    pub narrative: Narrative,
    pub domain: Domain,
    pub history: History,
    pub warnings: Vec<String>,
}

pub fn load_story(text: &str, src: &Sources) -> Result<Story, LoadError> {
    let narrative = Narrative::parse(text)?;
    load_narrative(narrative, src)
}

pub fn load_narrative(mut narrative: Narrative, src: &Sources) -> Result<Story, LoadError> {
    let schema: Schema = match src.domain {
        Some(t) => parse_domain(t).map_err(DomainError::from)?,
        None => restaurant_schema(),
    };
    let mut warnings = Vec::new();
    if !narrative.frames.is_empty() {
        let rules = parse_frame_rules(src.frame_rules.unwrap_or(RESTAURANT_FRAME_RULES)).map_err(LoadError::FrameRules)?;
        let mut declared: Vec<(String, String)> =
            schema.instances.iter().map(|(n, s, _)| (n.clone(), s.clone())).collect();
        declared.extend(narrative.instances.iter().cloned());
        let mapped = map_frames(&narrative.frames, &rules, &declared, src.strict_frames)?;
        for f in mapped.facts {
            if !narrative.hpd.contains(&f) {
                narrative.hpd.push(f);
            }
        }
        narrative.instances.extend(mapped.minted);
        warnings = mapped.warnings;
    }
    let has_customers = schema.sorts.iter().any(|(s, _)| s == "customer")
        || schema.subsorts.iter().any(|(s, _, _)| s == "customer");
    if has_customers && !narrative.instances.iter().any(|(_, s)| s == "customer") {
        return Err(NarrativeError::NoCustomer.into());
    }
    let domain = build_from_schema(schema, &narrative.instances)?;
    let history = History::resolve(&domain, &narrative)?;
    Ok(Story { narrative, domain, history, warnings })
}

