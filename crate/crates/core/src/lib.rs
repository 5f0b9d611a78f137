//! Narrative understanding for stories about stereotypical activities.
//!
//! Characters are modelled as intentional agents acting in a sorted action
//! domain. The reader engine maps story steps onto a dense reasoning
//! timeline, fills in unmentioned intended actions, abduces unobserved
//! exogenous events, and enumerates every consistent interpretation.

pub mod action_core;
pub mod cli;
pub mod error;
pub mod frames;
pub mod golden;
pub mod intentions;
pub mod narrative;
pub mod qa;
pub mod reader;
pub mod report;
pub mod restaurant;
pub mod story;
pub mod term;
