//! Reader for the line-oriented domain description format.
//!
//! ```text
//! sort <name>                     subsort <child> <parent>
//! instance <name> <sort>          var <Name> <sort>
//! fluent <name>(<sorts>) inertial|defined physical|mental
//! action <name>(<sorts>) agent|mental|exogenous [actor=<pos>,...]
//! static <atom> [<- <conds>]
//! causes <lits> on <triggers> [if <conds>]
//! if <defined-atom> <- <conds>
//! impossible_if <action-atom> <- <conds>
//! choice <fluent-atom> for <static-atom> on <triggers> [if <conds>]
//! initially <lit>
//! default_select <agent> <goal-atom> at <step> | onset <fluent-atom>
//! futile <activity-atom> if obs <fluent-atom> true|false
//! activity <atom> / actor <arg> / goal <atom> / component <k> <atom> / end
//! ```
//!
//! Identifiers starting with an uppercase letter are variables; their sorts
//! come from `var` declarations. Triggers are action atoms, optionally
//! prefixed by `not`. Conditions are fluent or static literals (`-` or
//! `not` negates) and comparisons `X = Y`, `X != Y`.

use crate::error::SyntaxError;
use crate::term::{lex_line, strip_comment, Cursor, Term, Tok};

use super::schema::*;

pub fn parse_domain(text: &str) -> Result<Schema, SyntaxError> {
    let mut schema = Schema::default();
    let mut open: Option<ActivityDecl> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex_line(strip_comment(raw), lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, lineno);
        let kw = c.ident()?;

        if let Some(act) = open.as_mut() {
            match kw.as_str() {
                "actor" => {
                    let a = c.ident()?;
                    c.expect_end()?;
                    act.actor = Some(Arg::from_name(&a));
                }
                "goal" => {
                    let g = atom(&mut c)?;
                    c.expect_end()?;
                    act.goal = Some(g);
                }
                "component" => {
                    let k = c.uint()?;
                    let a = atom(&mut c)?;
                    c.expect_end()?;
                    act.components.push((k, a));
                }
                "end" => {
                    c.expect_end()?;
                    schema.activities.push(open.take().expect("open activity"));
                }
                _ => {
                    return Err(SyntaxError::new(
                        lineno,
                        1,
                        format!("unexpected `{kw}` inside activity block (missing `end`?)"),
                    ))
                }
            }
            continue;
        }

        match kw.as_str() {
            "sort" => {
                let name = c.ident()?;
                c.expect_end()?;
                schema.sorts.push((name, lineno));
            }
            "subsort" => {
                let child = c.ident()?;
                let parent = c.ident()?;
                c.expect_end()?;
                schema.subsorts.push((child, parent, lineno));
            }
            "instance" => {
                let name = c.ident()?;
                let sort = c.ident()?;
                c.expect_end()?;
                schema.instances.push((name, sort, lineno));
            }
            "var" => {
                let name = c.ident()?;
                if !name.starts_with(|ch: char| ch.is_ascii_uppercase()) {
                    return Err(SyntaxError::new(lineno, 5, "variable names must start with an uppercase letter"));
                }
                let sort = c.ident()?;
                c.expect_end()?;
                schema.vars.push((name, sort, lineno));
            }
            "fluent" => {
                let (name, arg_sorts) = signature(&mut c)?;
                let kind = match c.ident()?.as_str() {
                    "inertial" => FluentKind::Inertial,
                    "defined" => FluentKind::Defined,
                    _ => return Err(c.err("expected `inertial` or `defined`")),
                };
                let layer = match c.ident()?.as_str() {
                    "physical" => Layer::Physical,
                    "mental" => Layer::Mental,
                    _ => return Err(c.err("expected `physical` or `mental`")),
                };
                c.expect_end()?;
                schema.fluents.push(FluentDecl { name, arg_sorts, kind, layer, line: lineno });
            }
            "action" => {
                let (name, arg_sorts) = signature(&mut c)?;
                let kind = match c.ident()?.as_str() {
                    "agent" => ActionKind::Agent,
                    "mental" => ActionKind::Mental,
                    "exogenous" => ActionKind::Exogenous,
                    _ => return Err(c.err("expected `agent`, `mental` or `exogenous`")),
                };
                let mut actors = Vec::new();
                if c.keyword("actor") {
                    c.expect(&Tok::Eq)?;
                    loop {
                        let col = c.col();
                        let pos = c.uint()?;
                        if pos == 0 || pos > arg_sorts.len() {
                            return Err(SyntaxError::new(lineno, col, "actor position out of range"));
                        }
                        actors.push(pos - 1);
                        if !c.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                c.expect_end()?;
                schema.actions.push(ActionDecl { name, arg_sorts, kind, actors, line: lineno });
            }
            "static" => {
                let head = atom(&mut c)?;
                let body = if c.eat(&Tok::Arrow) { conds(&mut c)? } else { Vec::new() };
                c.expect_end()?;
                schema.statics.push(StaticRule { head, body, line: lineno });
            }
            "causes" => {
                let mut effects = vec![literal(&mut c)?];
                while c.eat(&Tok::Comma) {
                    effects.push(literal(&mut c)?);
                }
                if !c.keyword("on") {
                    return Err(c.unexpected("`on`"));
                }
                let triggers = triggers(&mut c)?;
                let body = if c.keyword("if") { conds(&mut c)? } else { Vec::new() };
                c.expect_end()?;
                schema.laws.push(Law::Causal { effects, triggers, body, line: lineno });
            }
            "if" => {
                let head = atom(&mut c)?;
                c.expect(&Tok::Arrow)?;
                let body = conds(&mut c)?;
                c.expect_end()?;
                schema.laws.push(Law::Constraint { head, body, line: lineno });
            }
            "impossible_if" => {
                let action = atom(&mut c)?;
                c.expect(&Tok::Arrow)?;
                let body = conds(&mut c)?;
                c.expect_end()?;
                schema.laws.push(Law::Impossible { action, body, line: lineno });
            }
            "choice" => {
                let template = atom(&mut c)?;
                if !c.keyword("for") {
                    return Err(c.unexpected("`for`"));
                }
                let generator = atom(&mut c)?;
                if !c.keyword("on") {
                    return Err(c.unexpected("`on`"));
                }
                let triggers = triggers(&mut c)?;
                let body = if c.keyword("if") { conds(&mut c)? } else { Vec::new() };
                c.expect_end()?;
                schema.laws.push(Law::Choice { template, generator, triggers, body, line: lineno });
            }
            "initially" => {
                let lit = literal(&mut c)?;
                c.expect_end()?;
                schema.initially.push((lit, lineno));
            }
            "default_select" => {
                let agent = Arg::from_name(&c.ident()?);
                let goal = atom(&mut c)?;
                let trigger = if c.keyword("at") {
                    SelectTrigger::At(c.uint()?)
                } else if c.keyword("onset") {
                    SelectTrigger::Onset(atom(&mut c)?)
                } else {
                    return Err(c.unexpected("`at` or `onset`"));
                };
                c.expect_end()?;
                schema.default_selects.push(DefaultSelect { agent, goal, trigger, line: lineno });
            }
            "futile" => {
                let activity = atom(&mut c)?;
                if !c.keyword("if") || !c.keyword("obs") {
                    return Err(c.unexpected("`if obs`"));
                }
                let fluent = atom(&mut c)?;
                let value = truth(&mut c)?;
                c.expect_end()?;
                schema.futility.push(FutilityDecl { activity, fluent, value, line: lineno });
            }
            "activity" => {
                let head = atom(&mut c)?;
                c.expect_end()?;
                open = Some(ActivityDecl { head, actor: None, goal: None, components: Vec::new(), line: lineno });
            }
            other => return Err(SyntaxError::new(lineno, 1, format!("unknown declaration `{other}`"))),
        }
    }
    if let Some(act) = open {
        return Err(SyntaxError::new(act.line, 1, format!("activity `{}` is missing `end`", act.head)));
    }
    Ok(schema)
}

pub(crate) fn truth(c: &mut Cursor<'_>) -> Result<bool, SyntaxError> {
    match c.ident()?.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(c.err("expected `true` or `false`")),
    }
}

fn signature(c: &mut Cursor<'_>) -> Result<(String, Vec<String>), SyntaxError> {
    let name = c.ident()?;
    let mut sorts = Vec::new();
    if c.eat(&Tok::LParen) {
        loop {
            sorts.push(c.ident()?);
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
        c.expect(&Tok::RParen)?;
    }
    Ok((name, sorts))
}

pub(crate) fn term_to_atom(t: &Term, c: &Cursor<'_>) -> Result<Atom, SyntaxError> {
    let mut args = Vec::with_capacity(t.args.len());
    for a in &t.args {
        if !a.is_constant() {
            return Err(c.err(format!("nested term `{a}` not allowed here")));
        }
        args.push(Arg::from_name(&a.functor));
    }
    Ok(Atom { name: t.functor.clone(), args })
}

fn atom(c: &mut Cursor<'_>) -> Result<Atom, SyntaxError> {
    let t = c.term()?;
    term_to_atom(&t, c)
}

fn literal(c: &mut Cursor<'_>) -> Result<Literal, SyntaxError> {
    let positive = !c.eat(&Tok::Minus);
    Ok(Literal { atom: atom(c)?, positive })
}

fn triggers(c: &mut Cursor<'_>) -> Result<Vec<Trigger>, SyntaxError> {
    let mut out = Vec::new();
    loop {
        let occurs = !c.keyword("not");
        out.push(Trigger { atom: atom(c)?, occurs });
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(out)
}

fn conds(c: &mut Cursor<'_>) -> Result<Vec<Cond>, SyntaxError> {
    let mut out = Vec::new();
    loop {
        out.push(cond(c)?);
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(out)
}

fn cond(c: &mut Cursor<'_>) -> Result<Cond, SyntaxError> {
    if c.eat(&Tok::Minus) || c.keyword("not") {
        return Ok(Cond::Atom(Literal { atom: atom(c)?, positive: false }));
    }
    let t = c.term()?;
    let equal = if c.eat(&Tok::Eq) {
        Some(true)
    } else if c.eat(&Tok::Neq) {
        Some(false)
    } else {
        None
    };
    match equal {
        Some(equal) => {
            if !t.is_constant() {
                return Err(c.err("comparison operands must be variables or constants"));
            }
            let right = c.ident()?;
            Ok(Cond::Compare { left: Arg::from_name(&t.functor), right: Arg::from_name(&right), equal })
        }
        None => Ok(Cond::Atom(Literal { atom: term_to_atom(&t, c)?, positive: true })),
    }
}
