//! Golden traces: one `map(s,i)` or `occurs(a,i)` atom per line, compared
//! as sets.

use std::collections::BTreeSet;

use crate::action_core::Domain;
use crate::error::SyntaxError;
use crate::reader::Model;
use crate::term::{lex_line, strip_comment, Cursor, Term};

/// The atoms of a model in canonical order: mapping first, then
/// occurrences by step with mental actions before physical ones.
pub fn trace_atoms(d: &Domain, m: &Model) -> Vec<String> {
    let mut out: Vec<String> = m.mapping.iter().enumerate().map(|(s, i)| format!("map({s},{i})")).collect();
    out.extend(m.occurs_atoms(d).into_iter().map(|(i, t)| format!("occurs({t},{i})")));
    out
}

pub fn render_trace(d: &Domain, m: &Model) -> String {
    let mut s = trace_atoms(d, m).join("\n");
    s.push('\n');
    s
}

/// Parses a trace file into its atoms, normalized to printed term form.
pub fn parse_trace(text: &str) -> Result<Vec<String>, SyntaxError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let toks = lex_line(strip_comment(raw), idx + 1)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(&toks, idx + 1);
        let t: Term = c.term()?;
        c.expect_end()?;
        let ok = matches!((t.functor.as_str(), t.args.len()), ("map", 2) | ("occurs", 2));
        if !ok {
            return Err(SyntaxError::new(idx + 1, 1, format!("expected `map(s,i)` or `occurs(a,i)`, found `{t}`")));
        }
        out.push(t.to_string());
    }
    Ok(out)
}

/// Atoms only in the expected trace and atoms only in the actual one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceDiff {
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
}

impl TraceDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

pub fn diff_traces(expected: &[String], actual: &[String]) -> TraceDiff {
    let e: BTreeSet<&String> = expected.iter().collect();
    let a: BTreeSet<&String> = actual.iter().collect();
    TraceDiff {
        missing: e.difference(&a).map(|s| s.to_string()).collect(),
        unexpected: a.difference(&e).map(|s| s.to_string()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_is_normalized() {
        let atoms = parse_trace("map(0, 2)\n# note\noccurs(go(nicole, veg_r), 2)\n").unwrap();
        assert_eq!(atoms, vec!["map(0,2)", "occurs(go(nicole,veg_r),2)"]);
    }

    #[test]
    fn other_atoms_are_rejected() {
        assert!(parse_trace("holds(open(veg_r),0)").is_err());
    }

    #[test]
    fn diff_is_set_based() {
        let e = vec!["map(0,1)".to_string(), "occurs(a,0)".to_string()];
        let a = vec!["occurs(a,0)".to_string(), "occurs(b,0)".to_string(), "occurs(a,0)".to_string()];
        let d = diff_traces(&e, &a);
        assert_eq!(d.missing, vec!["map(0,1)"]);
        assert_eq!(d.unexpected, vec!["occurs(b,0)"]);
    }
}
