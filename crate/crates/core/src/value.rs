//! Concrete data terms and their text syntax.
//!
//! Terms are written in constructor-application syntax, for example
//! `Cons (Rule (F A B (V X)) (V X)) Nil`. The undefined value prints as `_|_`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bottom,
    Con(Arc<str>, Arc<[Value]>),
}

impl Value {
    pub fn con(name: &str, args: Vec<Value>) -> Value {
        Value::Con(Arc::from(name), Arc::from(args))
    }

    pub fn atom(name: &str) -> Value {
        Value::con(name, Vec::new())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Value::Bottom)
    }

    /// True when no `Bottom` occurs anywhere in the term.
    pub fn is_total(&self) -> bool {
        let mut stack = vec![self];
        while let Some(v) = stack.pop() {
            match v {
                Value::Bottom => return false,
                Value::Con(_, args) => stack.extend(args.iter()),
            }
        }
        true
    }

    pub fn constructor(&self) -> Option<&str> {
        match self {
            Value::Bottom => None,
            Value::Con(name, _) => Some(name),
        }
    }

    pub fn args(&self) -> &[Value] {
        match self {
            Value::Bottom => &[],
            Value::Con(_, args) => args,
        }
    }

    pub fn parse(text: &str) -> Result<Value, ValueSyntaxError> {
        let tokens = tokenize(text)?;
        let mut p = TermParser { tokens, pos: 0 };
        let v = p.term()?;
        if p.pos < p.tokens.len() {
            return Err(ValueSyntaxError::Trailing(p.tokens[p.pos].1));
        }
        Ok(v)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match self {
            Value::Bottom => f.write_str("_|_"),
            Value::Con(name, args) if args.is_empty() => f.write_str(name),
            Value::Con(name, args) => {
                if nested {
                    f.write_str("(")?;
                }
                f.write_str(name)?;
                for a in args.iter() {
                    f.write_str(" ")?;
                    a.fmt_prec(f, true)?;
                }
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValueSyntaxError {
    #[error("unexpected character {0:?} at offset {1}")]
    BadChar(char, usize),
    #[error("unexpected end of term")]
    Eof,
    #[error("unexpected token at offset {0}")]
    Unexpected(usize),
    #[error("trailing input at offset {0}")]
    Trailing(usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Open,
    Close,
    Bottom,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ValueSyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((Tok::Open, i));
        } else if c == ')' {
            chars.next();
            out.push((Tok::Close, i));
        } else if text[i..].starts_with("_|_") {
            for _ in 0..3 {
                chars.next();
            }
            out.push((Tok::Bottom, i));
        } else if c.is_ascii_uppercase() {
            let mut name = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    name.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((Tok::Name(name), i));
        } else if c == '-' && text[i..].starts_with("--") {
            // line comment
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else {
            return Err(ValueSyntaxError::BadChar(c, i));
        }
    }
    Ok(out)
}

struct TermParser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl TermParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(0, |t| t.1)
    }

    fn term(&mut self) -> Result<Value, ValueSyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                self.pos += 1;
                let mut args = Vec::new();
                while let Some(tok) = self.peek() {
                    if *tok == Tok::Close {
                        break;
                    }
                    args.push(self.atom()?);
                }
                Ok(Value::con(&name, args))
            }
            Some(_) => self.atom(),
            None => Err(ValueSyntaxError::Eof),
        }
    }

    fn atom(&mut self) -> Result<Value, ValueSyntaxError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                self.pos += 1;
                Ok(Value::atom(&name))
            }
            Some(Tok::Bottom) => {
                self.pos += 1;
                Ok(Value::Bottom)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let v = self.term()?;
                match self.peek() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Some(_) => Err(ValueSyntaxError::Unexpected(self.offset())),
                    None => Err(ValueSyntaxError::Eof),
                }
            }
            Some(Tok::Close) => Err(ValueSyntaxError::Unexpected(at)),
            None => Err(ValueSyntaxError::Eof),
        }
    }
}
