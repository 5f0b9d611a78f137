//! Ground terms and a small line lexer shared by the domain, narrative,
//! frame-rule and golden-trace readers.

use std::fmt;

use crate::error::SyntaxError;

/// A ground (or schematic, when arguments are variables) prefix term
/// such as `order(nicole,lentil_soup,waitress)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub functor: String,
    pub args: Vec<Term>,
}

impl Term {
    pub fn atom(name: impl Into<String>) -> Self {
        Term { functor: name.into(), args: Vec::new() }
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term { functor: name.into(), args }
    }

    pub fn constants<I, S>(name: &str, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Term { functor: name.to_string(), args: args.into_iter().map(|a| Term::atom(a)).collect() }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_constant(&self) -> bool {
        self.args.is_empty()
    }

    /// Parses a complete term from text, e.g. `go(nicole,veg_r)`.
    pub fn parse(text: &str) -> Result<Term, SyntaxError> {
        let toks = lex_line(text, 1)?;
        let mut cur = Cursor::new(&toks, 1);
        let t = cur.term()?;
        cur.expect_end()?;
        Ok(t)
    }
}

impl std::str::FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Term, SyntaxError> {
        Term::parse(s)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
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
pub enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Minus,
    Neq,
    Eq,
    Arrow,
    RArrow,
    Colon,
    Question,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`<-`"),
            Tok::RArrow => f.write_str("`->`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Question => f.write_str("`?`"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub col: usize,
}

/// Strips a `#` comment from a line.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Tokenizes one line. Columns are 1-based.
pub fn lex_line(line: &str, lineno: usize) -> Result<Vec<Spanned>, SyntaxError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, col });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, col });
                i += 1;
            }
            '?' => {
                out.push(Spanned { tok: Tok::Question, col });
                i += 1;
            }
            '=' => {
                out.push(Spanned { tok: Tok::Eq, col });
                i += 1;
            }
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                out.push(Spanned { tok: Tok::Neq, col });
                i += 2;
            }
            '<' if bytes.get(i + 1) == Some(&b'-') => {
                out.push(Spanned { tok: Tok::Arrow, col });
                i += 2;
            }
            ':' => {
                out.push(Spanned { tok: Tok::Colon, col });
                i += 1;
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push(Spanned { tok: Tok::RArrow, col });
                i += 2;
            }
            '-' if bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = line[start..i]
                    .parse()
                    .map_err(|_| SyntaxError::new(lineno, col, "integer out of range"))?;
                out.push(Spanned { tok: Tok::Int(n), col });
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, col });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = line[start..i]
                    .parse()
                    .map_err(|_| SyntaxError::new(lineno, col, "integer out of range"))?;
                out.push(Spanned { tok: Tok::Int(n), col });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Ident(line[start..i].to_string()), col });
            }
            other => {
                return Err(SyntaxError::new(lineno, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

/// Token cursor over one lexed line.
pub struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Spanned], line: usize) -> Self {
        let end_col = toks.last().map(|t| t.col + 1).unwrap_or(1);
        Cursor { toks, pos: 0, line, end_col }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    pub fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line, self.col(), msg)
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.err(format!("expected {wanted}, found {t}")),
            None => self.err(format!("expected {wanted}, found end of line")),
        }
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    /// Consumes `kw` if it is the next identifier.
    pub fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn int(&mut self) -> Result<i64, SyntaxError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    pub fn uint(&mut self) -> Result<usize, SyntaxError> {
        let col = self.col();
        let n = self.int()?;
        usize::try_from(n).map_err(|_| SyntaxError::new(self.line, col, "expected a non-negative integer"))
    }

    /// `name` or `name(t1,...,tn)`; a bare `?` parses as the placeholder functor `?`.
    pub fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.eat(&Tok::Question) {
            return Ok(Term::atom("?"));
        }
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            Some(Tok::Int(n)) => n.to_string(),
            _ => return Err(self.unexpected("term")),
        };
        self.pos += 1;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::Comma) {
                    continue;
                }
                self.expect(&Tok::RParen)?;
                break;
            }
        }
        Ok(Term { functor: name, args })
    }

    /// A comma-separated list of terms, stopping before any token that
    /// cannot continue the list.
    pub fn term_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut out = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            out.push(self.term()?);
        }
        Ok(out)
    }
}
