//! Classification of an agent's mental situation and the action it is
//! expected to perform next.

use crate::action_core::{ActivityId, AgentId, Domain, FluentId, FluentLit};
use crate::intentions::{MentalAction, Occurrence};
use crate::restaurant::{candidate_activities, futile};

use super::FullState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    /// A top-level activity is running but its goal is no longer active.
    Two(ActivityId),
    /// A top-level activity is in progress.
    Three(ActivityId),
    /// A top-level goal is active with no activity pursuing it.
    Four(FluentId),
}

pub fn categorize(d: &Domain, s: &FullState, ag: AgentId) -> Vec<Category> {
    let mind = &s.mind;
    let mut out = Vec::new();
    let tops = mind.top_activities(d, ag);
    for &m in &tops {
        let a = d.activity(m);
        if mind.active_goal(ag, a.goal) {
            out.push(Category::Three(m));
        } else {
            out.push(Category::Two(m));
        }
    }
    for g in mind.top_goals(d, ag) {
        if !tops.iter().any(|&m| d.activity(m).goal == g) {
            out.push(Category::Four(g));
        }
    }
    out.sort();
    out
}

/// A goal is futile when every activity that could achieve it is.
pub fn goal_futile(d: &Domain, ag: AgentId, g: FluentId, obs: &[FluentLit]) -> bool {
    let cands = candidate_activities(d, ag, g);
    !cands.is_empty() && cands.iter().all(|&m| futile(d, m, obs))
}

/// The action `ag` is expected to perform in `s`, if any. `obs` are the
/// observations mapped to this step, used to detect futility.
pub fn intended_occurrence(d: &Domain, s: &FullState, ag: AgentId, obs: &[FluentLit]) -> Option<Occurrence> {
    let mind = &s.mind;
    for cat in categorize(d, s, ag) {
        match cat {
            Category::Two(m) => return Some(Occurrence::Mental(MentalAction::Stop(ag, m))),
            Category::Three(m) => {
                if futile(d, m, obs) {
                    return Some(Occurrence::Mental(MentalAction::Stop(ag, m)));
                }
                return match mind.next_action(d, m)? {
                    Occurrence::Physical(a) if d.executable(&s.world, a) => Some(Occurrence::Physical(a)),
                    Occurrence::Physical(_) => None,
                    Occurrence::Mental(ma) if mind.mental_legal(d, &s.world, ma) => Some(Occurrence::Mental(ma)),
                    Occurrence::Mental(_) => None,
                };
            }
            Category::Four(g) => {
                if goal_futile(d, ag, g, obs) {
                    return Some(Occurrence::Mental(MentalAction::Wait(ag)));
                }
                let replan = MentalAction::Replan(ag, g);
                if mind.mental_legal(d, &s.world, replan) {
                    return Some(Occurrence::Mental(replan));
                }
            }
        }
    }
    None
}
