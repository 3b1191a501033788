//! Recursive-descent parser for the surface language.
//!
//! Blocks after `of` and `let` (and the top level) use either explicit
//! braces and semicolons or indentation: an implicit block is laid out at
//! the column of its first token, a line starting at that column begins a
//! new item, and a line starting left of it closes the block.

use super::lexer::{tokenize, Token, TokenKind};
use super::syntax::*;
use super::{FrontendError, Pos};

pub fn parse_module(src: &str) -> Result<Module, FrontendError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        layout: Vec::new(),
    };
    p.module()
}

/// Parses a standalone type expression such as `List (Pair Name Term)`.
pub fn parse_type(src: &str) -> Result<TypeExpr, FrontendError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        layout: Vec::new(),
    };
    let t = p.type_expr()?;
    match p.peek() {
        None => Ok(t),
        Some(_) => p.unexpected("end of type"),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Columns of the enclosing implicit blocks; 0 for explicit braces.
    layout: Vec<usize>,
}

enum Decl {
    Data(DataDecl),
    Synonym(TypeSynonym),
    Signature(Signature),
    Equation(Equation),
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn here(&self) -> Pos {
        match self.peek() {
            Some(t) => t.pos,
            None => self
                .tokens
                .last()
                .map(|t| Pos {
                    line: t.pos.line,
                    col: t.pos.col + 1,
                })
                .unwrap_or(Pos { line: 1, col: 1 }),
        }
    }

    /// The next token starts a line at or left of the current block column.
    fn at_boundary(&self) -> bool {
        match (self.peek(), self.layout.last()) {
            (Some(t), Some(&col)) => t.line_start && t.pos.col <= col,
            (None, _) => true,
            _ => false,
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(FrontendError::syntax(self.here(), msg))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.kind.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == Some(kind) && !self.at_boundary_for_continuation() {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // Separators and closers may appear anywhere; everything else that
    // continues an item must not sit on a boundary.
    fn at_boundary_for_continuation(&self) -> bool {
        match self.peek_kind() {
            Some(TokenKind::Semi | TokenKind::RBrace | TokenKind::RParen | TokenKind::In) => false,
            _ => self.at_boundary(),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Pos> {
        let pos = self.here();
        if self.eat(&kind) {
            Ok(pos)
        } else {
            self.unexpected(&kind.describe())
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        let pos = self.here();
        match self.peek_kind() {
            Some(TokenKind::Ident(s)) if !self.at_boundary() => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, pos))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn con_id(&mut self) -> PResult<(String, Pos)> {
        let pos = self.here();
        match self.peek_kind() {
            Some(TokenKind::ConId(s)) if !self.at_boundary() => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, pos))
            }
            _ => self.unexpected("a constructor or type name"),
        }
    }

    /// Parses a brace-delimited or indentation-delimited sequence of items.
    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut items = Vec::new();
        if self.peek_kind() == Some(&TokenKind::LBrace) {
            self.pos += 1;
            self.layout.push(0);
            loop {
                while self.peek_kind() == Some(&TokenKind::Semi) {
                    self.pos += 1;
                }
                if self.peek_kind() == Some(&TokenKind::RBrace) {
                    break;
                }
                items.push(item(self)?);
                match self.peek_kind() {
                    Some(TokenKind::Semi) => {}
                    Some(TokenKind::RBrace) => break,
                    _ => {
                        self.layout.pop();
                        return self.unexpected("`;` or `}`");
                    }
                }
            }
            self.layout.pop();
            self.pos += 1;
            return Ok(items);
        }
        let col = match self.peek() {
            Some(t) if !self.at_boundary() || t.line_start && self.layout.last() == Some(&0) => {
                t.pos.col
            }
            _ => return self.unexpected("a block"),
        };
        if let Some(&outer) = self.layout.last() {
            if col <= outer {
                return self.unexpected("an indented block");
            }
        }
        self.layout.push(col);
        loop {
            items.push(item(self)?);
            match self.peek() {
                Some(t) if t.kind == TokenKind::Semi => {
                    self.pos += 1;
                    if self.at_boundary() && !self.peek().is_some_and(|t| t.pos.col == col) {
                        break;
                    }
                }
                Some(t) if t.line_start && t.pos.col == col => {}
                _ => break,
            }
        }
        self.layout.pop();
        Ok(items)
    }

    fn module(&mut self) -> PResult<Module> {
        let mut module = Module::default();
        if self.peek().is_none() {
            return Ok(module);
        }
        let col = self.peek().map(|t| t.pos.col).unwrap_or(1);
        self.layout.push(col);
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Semi {
                self.pos += 1;
                continue;
            }
            if !(t.line_start && t.pos.col == col) && self.pos > 0 {
                let prev_semi = self.tokens[self.pos - 1].kind == TokenKind::Semi;
                if !prev_semi {
                    return self.error("declaration must start at the left margin");
                }
            }
            // Temporarily raise the layout column so the declaration's own
            // first token is not treated as a boundary.
            self.layout.push(col);
            let first = self.pos;
            let decl = self.with_first_token_allowed(first, |p| p.decl());
            self.layout.pop();
            match decl? {
                Decl::Data(d) => module.datas.push(d),
                Decl::Synonym(s) => module.synonyms.push(s),
                Decl::Signature(s) => module.signatures.push(s),
                Decl::Equation(e) => module.equations.push(e),
            }
        }
        self.layout.pop();
        Ok(module)
    }

    fn with_first_token_allowed<T>(
        &mut self,
        first: usize,
        f: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<T> {
        // The first token of an item sits exactly on the block column; mark
        // it as a continuation while the item parser consumes it.
        let saved = self.tokens[first].line_start;
        self.tokens[first].line_start = false;
        let r = f(self);
        self.tokens[first].line_start = saved;
        r
    }

    fn decl(&mut self) -> PResult<Decl> {
        match self.peek_kind() {
            Some(TokenKind::Data) => {
                let pos = self.here();
                self.pos += 1;
                let (name, _) = self.con_id()?;
                let params = self.type_params()?;
                self.expect(TokenKind::Equals)?;
                let mut ctors = vec![self.ctor_decl()?];
                while self.eat(&TokenKind::Bar) {
                    ctors.push(self.ctor_decl()?);
                }
                Ok(Decl::Data(DataDecl {
                    name,
                    params,
                    ctors,
                    pos,
                }))
            }
            Some(TokenKind::Type) => {
                let pos = self.here();
                self.pos += 1;
                let (name, _) = self.con_id()?;
                let params = self.type_params()?;
                self.expect(TokenKind::Equals)?;
                let body = self.type_expr()?;
                Ok(Decl::Synonym(TypeSynonym {
                    name,
                    params,
                    body,
                    pos,
                }))
            }
            Some(TokenKind::Ident(_)) => {
                let (name, pos) = self.ident()?;
                if self.eat(&TokenKind::DoubleColon) {
                    let ty = self.type_expr()?;
                    return Ok(Decl::Signature(Signature { name, ty, pos }));
                }
                let mut pats = Vec::new();
                while !self.at_boundary() && self.peek_kind() != Some(&TokenKind::Equals) {
                    pats.push(self.apat()?);
                }
                self.expect(TokenKind::Equals)?;
                let body = self.expr()?;
                Ok(Decl::Equation(Equation {
                    name,
                    pats,
                    body,
                    pos,
                }))
            }
            _ => self.unexpected("a declaration"),
        }
    }

    fn type_params(&mut self) -> PResult<Vec<String>> {
        let mut params = Vec::new();
        while matches!(self.peek_kind(), Some(TokenKind::Ident(_))) && !self.at_boundary() {
            params.push(self.ident()?.0);
        }
        Ok(params)
    }

    fn ctor_decl(&mut self) -> PResult<CtorDecl> {
        let (name, pos) = self.con_id()?;
        let mut fields = Vec::new();
        while self.starts_atype() {
            fields.push(self.atype()?);
        }
        Ok(CtorDecl { name, fields, pos })
    }

    fn starts_atype(&self) -> bool {
        !self.at_boundary()
            && matches!(
                self.peek_kind(),
                Some(TokenKind::ConId(_) | TokenKind::Ident(_) | TokenKind::LParen)
            )
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let lhs = self.btype()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.type_expr()?;
            Ok(TypeExpr::Fun(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn btype(&mut self) -> PResult<TypeExpr> {
        if matches!(self.peek_kind(), Some(TokenKind::ConId(_))) && !self.at_boundary() {
            let (name, _) = self.con_id()?;
            let mut args = Vec::new();
            while self.starts_atype() {
                args.push(self.atype()?);
            }
            Ok(TypeExpr::Con(name, args))
        } else {
            self.atype()
        }
    }

    fn atype(&mut self) -> PResult<TypeExpr> {
        match self.peek_kind() {
            Some(TokenKind::ConId(_)) => Ok(TypeExpr::Con(self.con_id()?.0, Vec::new())),
            Some(TokenKind::Ident(_)) => Ok(TypeExpr::Var(self.ident()?.0)),
            Some(TokenKind::LParen) if !self.at_boundary() => {
                self.pos += 1;
                let t = self.type_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a type"),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let pos = self.here();
        if self.at_boundary() {
            return self.unexpected("an expression");
        }
        match self.peek_kind() {
            Some(TokenKind::Case) => {
                self.pos += 1;
                let scrutinee = self.expr()?;
                self.expect(TokenKind::Of)?;
                let alts = self.block(|p| p.alt())?;
                Ok(Expr {
                    kind: ExprKind::Case(Box::new(scrutinee), alts),
                    pos,
                })
            }
            Some(TokenKind::Let) => {
                self.pos += 1;
                let bindings = self.block(|p| p.binding())?;
                self.expect(TokenKind::In)?;
                let body = self.expr()?;
                Ok(Expr {
                    kind: ExprKind::Let(bindings, Box::new(body)),
                    pos,
                })
            }
            _ => self.app(),
        }
    }

    fn starts_aexpr(&self) -> bool {
        !self.at_boundary()
            && matches!(
                self.peek_kind(),
                Some(TokenKind::Ident(_) | TokenKind::ConId(_) | TokenKind::LParen)
            )
    }

    fn app(&mut self) -> PResult<Expr> {
        let head = self.aexpr()?;
        let mut args = Vec::new();
        while self.starts_aexpr() {
            args.push(self.aexpr()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            let pos = head.pos;
            Ok(Expr {
                kind: ExprKind::App(Box::new(head), args),
                pos,
            })
        }
    }

    fn aexpr(&mut self) -> PResult<Expr> {
        let pos = self.here();
        match self.peek_kind() {
            Some(TokenKind::Ident(_)) => Ok(Expr {
                kind: ExprKind::Var(self.ident()?.0),
                pos,
            }),
            Some(TokenKind::ConId(_)) => Ok(Expr {
                kind: ExprKind::Con(self.con_id()?.0),
                pos,
            }),
            Some(TokenKind::LParen) if !self.at_boundary() => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            _ => self.unexpected("an expression"),
        }
    }

    fn alt(&mut self) -> PResult<Alt> {
        let first = self.pos;
        let pat = self.with_first_token_allowed(first, |p| p.pattern())?;
        self.expect(TokenKind::Arrow)?;
        let body = self.expr()?;
        Ok(Alt { pat, body })
    }

    fn binding(&mut self) -> PResult<Binding> {
        let first = self.pos;
        let (name, pos) = self.with_first_token_allowed(first, |p| p.ident())?;
        if !self.at_boundary() && self.peek_kind() != Some(&TokenKind::Equals) {
            return Err(FrontendError::syntax(
                pos,
                "local function definitions are not supported; bind a value with `name = expr`",
            ));
        }
        self.expect(TokenKind::Equals)?;
        let expr = self.expr()?;
        Ok(Binding { name, expr, pos })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        if matches!(self.peek_kind(), Some(TokenKind::ConId(_))) && !self.at_boundary() {
            let (name, pos) = self.con_id()?;
            let mut args = Vec::new();
            while !self.at_boundary()
                && matches!(
                    self.peek_kind(),
                    Some(
                        TokenKind::Ident(_)
                            | TokenKind::ConId(_)
                            | TokenKind::LParen
                            | TokenKind::Underscore
                    )
                )
            {
                args.push(self.apat()?);
            }
            Ok(Pattern::Con(name, args, pos))
        } else {
            self.apat()
        }
    }

    fn apat(&mut self) -> PResult<Pattern> {
        let pos = self.here();
        if self.at_boundary() {
            return self.unexpected("a pattern");
        }
        match self.peek_kind() {
            Some(TokenKind::Ident(_)) => Ok(Pattern::Var(self.ident()?.0, pos)),
            Some(TokenKind::Underscore) => {
                self.pos += 1;
                Ok(Pattern::Wild(pos))
            }
            Some(TokenKind::ConId(_)) => Ok(Pattern::Con(self.con_id()?.0, Vec::new(), pos)),
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let p = self.pattern()?;
                self.expect(TokenKind::RParen)?;
                Ok(p)
            }
            _ => self.unexpected("a pattern"),
        }
    }
}
