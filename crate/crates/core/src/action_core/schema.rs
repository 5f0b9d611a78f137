//! Schematic (ungrounded) domain descriptions as read from a `.domain` file.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Const(String),
}

impl Arg {
    pub fn from_name(name: &str) -> Arg {
        if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            Arg::Var(name.to_string())
        } else {
            Arg::Const(name.to_string())
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) | Arg::Const(v) => f.write_str(v),
        }
    }
}

/// A flat atom `name(arg,...)` whose arguments are variables or constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Arg>,
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            Arg::Var(v) => Some(v.as_str()),
            Arg::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

/// A body condition. Whether an atom names a fluent or a static is decided
/// during grounding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Atom(Literal),
    Compare { left: Arg, right: Arg, equal: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FluentKind {
    Inertial,
    Defined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Physical,
    Mental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Agent,
    Mental,
    Exogenous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub kind: FluentKind,
    pub layer: Layer,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub arg_sorts: Vec<String>,
    pub kind: ActionKind,
    /// Zero-based argument positions naming the actors.
    pub actors: Vec<usize>,
    pub line: usize,
}

/// An action occurrence condition in a law trigger: `a` or `not a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub atom: Atom,
    pub occurs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Law {
    Causal { effects: Vec<Literal>, triggers: Vec<Trigger>, body: Vec<Cond>, line: usize },
    Constraint { head: Atom, body: Vec<Cond>, line: usize },
    Impossible { action: Atom, body: Vec<Cond>, line: usize },
    Choice { template: Atom, generator: Atom, triggers: Vec<Trigger>, body: Vec<Cond>, line: usize },
}

impl Law {
    pub fn line(&self) -> usize {
        match self {
            Law::Causal { line, .. }
            | Law::Constraint { line, .. }
            | Law::Impossible { line, .. }
            | Law::Choice { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticRule {
    pub head: Atom,
    pub body: Vec<Cond>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityDecl {
    pub head: Atom,
    pub actor: Option<Arg>,
    pub goal: Option<Atom>,
    /// (1-based index, component atom)
    pub components: Vec<(usize, Atom)>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectTrigger {
    /// Fires at a fixed reasoning step.
    At(usize),
    /// Fires at the first step where the fluent holds after not holding.
    Onset(Atom),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefaultSelect {
    pub agent: Arg,
    pub goal: Atom,
    pub trigger: SelectTrigger,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FutilityDecl {
    pub activity: Atom,
    pub fluent: Atom,
    pub value: bool,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub sorts: Vec<(String, usize)>,
    /// (child, parent, line)
    pub subsorts: Vec<(String, String, usize)>,
    pub instances: Vec<(String, String, usize)>,
    pub vars: Vec<(String, String, usize)>,
    pub fluents: Vec<FluentDecl>,
    pub actions: Vec<ActionDecl>,
    pub statics: Vec<StaticRule>,
    pub laws: Vec<Law>,
    pub activities: Vec<ActivityDecl>,
    pub initially: Vec<(Literal, usize)>,
    pub default_selects: Vec<DefaultSelect>,
    pub futility: Vec<FutilityDecl>,
}

impl Schema {
    /// Adds an instance declaration (used for narrative-supplied objects).
    pub fn add_instance(&mut self, name: &str, sort: &str) {
        self.instances.push((name.to_string(), sort.to_string(), 0));
    }
}
