//! Surface syntax tree, as produced by the parser.

use super::Pos;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Var(String),
    Con(String, Vec<TypeExpr>),
    Fun(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    /// Splits `a -> b -> r` into `([a, b], r)`.
    pub fn uncurry(&self) -> (Vec<&TypeExpr>, &TypeExpr) {
        let mut params = Vec::new();
        let mut t = self;
        while let TypeExpr::Fun(a, r) = t {
            params.push(a.as_ref());
            t = r;
        }
        (params, t)
    }
}

#[derive(Clone, Debug)]
pub struct CtorDecl {
    pub name: String,
    pub fields: Vec<TypeExpr>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct DataDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<CtorDecl>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct TypeSynonym {
    pub name: String,
    pub params: Vec<String>,
    pub body: TypeExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct Signature {
    pub name: String,
    pub ty: TypeExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum Pattern {
    Var(String, Pos),
    Wild(Pos),
    Con(String, Vec<Pattern>, Pos),
}

impl Pattern {
    pub fn pos(&self) -> Pos {
        match self {
            Pattern::Var(_, p) | Pattern::Wild(p) | Pattern::Con(_, _, p) => *p,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Var(String),
    Con(String),
    App(Box<Expr>, Vec<Expr>),
    Case(Box<Expr>, Vec<Alt>),
    Let(Vec<Binding>, Box<Expr>),
}

#[derive(Clone, Debug)]
pub struct Alt {
    pub pat: Pattern,
    pub body: Expr,
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub name: String,
    pub expr: Expr,
    pub pos: Pos,
}

/// One defining equation `f p1 .. pn = body`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub name: String,
    pub pats: Vec<Pattern>,
    pub body: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default)]
pub struct Module {
    pub datas: Vec<DataDecl>,
    pub synonyms: Vec<TypeSynonym>,
    pub signatures: Vec<Signature>,
    pub equations: Vec<Equation>,
}
