//! Mapping event frames (verb sense plus semantic roles) to story facts.
//!
//! A rules file has one line per verb sense:
//!
//! ```text
//! go_01 -> go(a1:customer, a4:restaurant)
//! bring_01 -> put_down(a0:waiter, a1:food, a2:location=t)
//! ```
//!
//! A slot is `role:sort`, `role:sort=default`, or a constant. A role the
//! frame leaves unfilled takes its default, or else a fresh constant named
//! after the sort (`waiter1`), shared by every frame that omits that sort.

use crate::error::{NarrativeError, SyntaxError};
use crate::narrative::{EventFrame, Fact};
use crate::term::{lex_line, strip_comment, Cursor, Term, Tok};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Role { role: String, sort: String, default: Option<String> },
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRule {
    pub sense: String,
    pub action: String,
    pub slots: Vec<Slot>,
}

pub fn parse_frame_rules(text: &str) -> Result<Vec<FrameRule>, SyntaxError> {
    let mut rules: Vec<FrameRule> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex_line(strip_comment(raw), lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, lineno);
        let sense = c.ident()?;
        if rules.iter().any(|r| r.sense == sense) {
            return Err(SyntaxError::new(lineno, 1, format!("verb sense `{sense}` mapped twice")));
        }
        c.expect(&Tok::RArrow)?;
        let action = c.ident()?;
        let mut slots = Vec::new();
        if c.eat(&Tok::LParen) {
            loop {
                let name = c.ident()?;
                if c.eat(&Tok::Colon) {
                    let sort = c.ident()?;
                    let default = if c.eat(&Tok::Eq) { Some(c.ident()?) } else { None };
                    slots.push(Slot::Role { role: name, sort, default });
                } else {
                    slots.push(Slot::Const(name));
                }
                if !c.eat(&Tok::Comma) {
                    break;
                }
            }
            c.expect(&Tok::RParen)?;
        }
        c.expect_end()?;
        rules.push(FrameRule { sense, action, slots });
    }
    Ok(rules)
}

/// Result of mapping frames: new `hpd` facts, minted instances and
/// warnings about frames that were skipped or partly used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrameMapping {
    pub facts: Vec<Fact>,
    pub minted: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// Maps each frame through the rule for its verb sense. In strict mode
/// unmatched senses and unused roles are errors instead of warnings.
pub fn map_frames(
    frames: &[EventFrame],
    rules: &[FrameRule],
    declared: &[(String, String)],
    strict: bool,
) -> Result<FrameMapping, NarrativeError> {
    let mut out = FrameMapping::default();
    let problem = |out: &mut FrameMapping, msg: String| -> Result<(), NarrativeError> {
        if strict {
            Err(NarrativeError::Unresolved(msg))
        } else {
            out.warnings.push(msg);
            Ok(())
        }
    };
    for fr in frames {
        let Some(rule) = rules.iter().find(|r| r.sense == fr.sense) else {
            problem(&mut out, format!("frame {}: no mapping rule for verb sense `{}`", fr.id, fr.sense))?;
            continue;
        };
        let mut args = Vec::with_capacity(rule.slots.len());
        for slot in &rule.slots {
            match slot {
                Slot::Const(c) => args.push(c.clone()),
                Slot::Role { role, sort, default } => {
                    if let Some((_, v)) = fr.roles.iter().find(|(r, _)| r == role) {
                        args.push(v.clone());
                    } else if let Some(d) = default {
                        args.push(d.clone());
                    } else {
                        args.push(mint(sort, declared, &mut out.minted));
                    }
                }
            }
        }
        for (r, _) in &fr.roles {
            let used = rule.slots.iter().any(|s| matches!(s, Slot::Role { role, .. } if role == r));
            if !used {
                problem(&mut out, format!("frame {}: role `{r}` is not used by `{}`", fr.id, fr.sense))?;
            }
        }
        out.facts.push(Fact { term: Term::constants(&rule.action, args), value: true, step: fr.step });
    }
    Ok(out)
}

fn mint(sort: &str, declared: &[(String, String)], minted: &mut Vec<(String, String)>) -> String {
    if let Some((n, _)) = minted.iter().find(|(_, s)| s == sort) {
        return n.clone();
    }
    let taken = |name: &str| declared.iter().chain(minted.iter()).any(|(n, _)| n == name);
    let mut k = 1;
    while taken(&format!("{sort}{k}")) {
        k += 1;
    }
    let name = format!("{sort}{k}");
    minted.push((name.clone(), sort.to_string()));
    name
}
