//! First-order, monomorphic core language.
//!
//! Every local variable is a numbered slot of its function, assigned
//! exactly once; the first `n_params` slots are the parameters. Case
//! expressions are complete, with branches in constructor order.

use std::fmt;

use super::{FrontendError, Pos};

pub type TypeId = usize;
pub type FnId = usize;
pub type Slot = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ctor {
    pub name: String,
    pub fields: Vec<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataType {
    /// Monomorphic name, e.g. `List (Pair Name Term)`.
    pub name: String,
    pub ctors: Vec<Ctor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(Slot),
    Con {
        ty: TypeId,
        ctor: usize,
        args: Vec<Expr>,
    },
    Call {
        func: FnId,
        args: Vec<Expr>,
    },
    Let {
        slot: Slot,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    Case {
        scrutinee: Box<Expr>,
        ty: TypeId,
        branches: Vec<Branch>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub binds: Vec<Slot>,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub n_params: usize,
    /// Name and type of every slot.
    pub locals: Vec<(String, TypeId)>,
    pub result: TypeId,
    pub body: Expr,
}

impl Function {
    pub fn param_types(&self) -> impl Iterator<Item = TypeId> + '_ {
        self.locals[..self.n_params].iter().map(|(_, t)| *t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub types: Vec<DataType>,
    pub functions: Vec<Function>,
    pub main: FnId,
}

impl Program {
    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.types.iter().position(|t| t.name == name)
    }

    pub fn function_id(&self, name: &str) -> Option<FnId> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn main_fn(&self) -> &Function {
        &self.functions[self.main]
    }

    /// Types of main's (known, unknown) parameters.
    pub fn main_params(&self) -> (TypeId, TypeId) {
        let m = self.main_fn();
        (m.locals[0].1, m.locals[1].1)
    }

    pub fn bool_type(&self) -> Option<TypeId> {
        self.type_id("Bool")
    }

    /// Whether values of `ty` can contain a value of `ty` again.
    pub fn is_recursive(&self, ty: TypeId) -> bool {
        let mut seen = vec![false; self.types.len()];
        let mut stack: Vec<TypeId> = self.types[ty]
            .ctors
            .iter()
            .flat_map(|c| c.fields.iter().copied())
            .collect();
        while let Some(t) = stack.pop() {
            if t == ty {
                return true;
            }
            if !std::mem::replace(&mut seen[t], true) {
                stack.extend(
                    self.types[t]
                        .ctors
                        .iter()
                        .flat_map(|c| c.fields.iter().copied()),
                );
            }
        }
        false
    }

    /// Number of expression nodes, summed over all functions.
    pub fn size(&self) -> usize {
        fn go(e: &Expr) -> usize {
            1 + match e {
                Expr::Var(_) => 0,
                Expr::Con { args, .. } | Expr::Call { args, .. } => args.iter().map(go).sum(),
                Expr::Let { bound, body, .. } => go(bound) + go(body),
                Expr::Case {
                    scrutinee,
                    branches,
                    ..
                } => go(scrutinee) + branches.iter().map(|b| go(&b.body)).sum::<usize>(),
            }
        }
        self.functions.iter().map(|f| go(&f.body)).sum()
    }
}

fn err(f: &Function, msg: impl fmt::Display) -> FrontendError {
    FrontendError::ty(
        Pos::default(),
        format!("in core function `{}`: {msg}", f.name),
    )
}

/// Checks that the core program is well formed and well typed.
pub fn typecheck(p: &Program) -> Result<(), FrontendError> {
    if p.main >= p.functions.len() {
        return Err(FrontendError::NoMain);
    }
    for t in &p.types {
        for c in &t.ctors {
            if c.fields.iter().any(|&f| f >= p.types.len()) {
                return Err(FrontendError::ty(
                    Pos::default(),
                    format!("constructor `{}` has a field of unknown type", c.name),
                ));
            }
        }
    }
    for f in &p.functions {
        if f.n_params > f.locals.len() || f.result >= p.types.len() {
            return Err(err(f, "malformed signature"));
        }
        if f.locals.iter().any(|(_, t)| *t >= p.types.len()) {
            return Err(err(f, "local of unknown type"));
        }
        let mut assigned = vec![false; f.locals.len()];
        assigned[..f.n_params].iter_mut().for_each(|a| *a = true);
        let t = check_expr(p, f, &f.body, &mut assigned)?;
        if t != f.result {
            return Err(err(
                f,
                format!(
                    "body has type `{}` but the result type is `{}`",
                    p.types[t].name, p.types[f.result].name
                ),
            ));
        }
    }
    let m = p.main_fn();
    if m.n_params != 2 || Some(m.result) != p.bool_type() {
        return Err(err(m, "main must take two parameters and return Bool"));
    }
    Ok(())
}

fn bind(f: &Function, slot: Slot, assigned: &mut [bool]) -> Result<(), FrontendError> {
    match assigned.get_mut(slot) {
        None => Err(err(f, format!("slot {slot} out of range"))),
        Some(true) => Err(err(f, format!("slot {slot} assigned twice"))),
        Some(a) => {
            *a = true;
            Ok(())
        }
    }
}

fn check_expr(
    p: &Program,
    f: &Function,
    e: &Expr,
    assigned: &mut [bool],
) -> Result<TypeId, FrontendError> {
    let expect = |got: TypeId, want: TypeId, what: &str| {
        if got == want {
            Ok(())
        } else {
            Err(err(
                f,
                format!(
                    "{what}: expected `{}`, found `{}`",
                    p.types[want].name, p.types[got].name
                ),
            ))
        }
    };
    match e {
        Expr::Var(s) => match (f.locals.get(*s), assigned.get(*s)) {
            (Some((_, t)), Some(true)) => Ok(*t),
            _ => Err(err(f, format!("slot {s} used before it is bound"))),
        },
        Expr::Con { ty, ctor, args } => {
            let c = p
                .types
                .get(*ty)
                .and_then(|t| t.ctors.get(*ctor))
                .ok_or_else(|| err(f, "unknown constructor"))?;
            if c.fields.len() != args.len() {
                return Err(err(
                    f,
                    format!("`{}` applied to wrong number of arguments", c.name),
                ));
            }
            for (a, &ft) in args.iter().zip(&c.fields) {
                let at = check_expr(p, f, a, assigned)?;
                expect(at, ft, &format!("argument of `{}`", c.name))?;
            }
            Ok(*ty)
        }
        Expr::Call { func, args } => {
            let g = p
                .functions
                .get(*func)
                .ok_or_else(|| err(f, format!("call of unknown function {func}")))?;
            if g.n_params != args.len() {
                return Err(err(
                    f,
                    format!("`{}` applied to wrong number of arguments", g.name),
                ));
            }
            for (a, pt) in args.iter().zip(g.param_types()) {
                let at = check_expr(p, f, a, assigned)?;
                expect(at, pt, &format!("argument of `{}`", g.name))?;
            }
            Ok(g.result)
        }
        Expr::Let { slot, bound, body } => {
            let bt = check_expr(p, f, bound, assigned)?;
            bind(f, *slot, assigned)?;
            expect(bt, f.locals[*slot].1, "let binding")?;
            check_expr(p, f, body, assigned)
        }
        Expr::Case {
            scrutinee,
            ty,
            branches,
        } => {
            let st = check_expr(p, f, scrutinee, assigned)?;
            expect(st, *ty, "case scrutinee")?;
            let data = &p.types[*ty];
            if data.ctors.len() != branches.len() {
                return Err(err(f, format!("case on `{}` is not complete", data.name)));
            }
            let mut result = None;
            for (c, b) in data.ctors.iter().zip(branches) {
                if c.fields.len() != b.binds.len() {
                    return Err(err(
                        f,
                        format!("branch `{}` binds wrong number of fields", c.name),
                    ));
                }
                for (&s, &ft) in b.binds.iter().zip(&c.fields) {
                    bind(f, s, assigned)?;
                    expect(f.locals[s].1, ft, &format!("field of `{}`", c.name))?;
                }
                let bt = check_expr(p, f, &b.body, assigned)?;
                match result {
                    None => result = Some(bt),
                    Some(r) => expect(bt, r, "case branch")?,
                }
            }
            result.ok_or_else(|| err(f, format!("case on empty type `{}`", data.name)))
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.types {
            write!(out, "data {} =", t.name)?;
            for (i, c) in t.ctors.iter().enumerate() {
                write!(out, "{} {}", if i == 0 { "" } else { " |" }, c.name)?;
                for &fld in &c.fields {
                    write!(out, " [{}]", self.types[fld].name)?;
                }
            }
            writeln!(out)?;
        }
        for f in &self.functions {
            write!(out, "{} ::", f.name)?;
            for (_, t) in &f.locals[..f.n_params] {
                write!(out, " [{}] ->", self.types[*t].name)?;
            }
            writeln!(out, " [{}]", self.types[f.result].name)?;
            write!(out, "{}", f.name)?;
            for (n, _) in &f.locals[..f.n_params] {
                write!(out, " {n}")?;
            }
            write!(out, " =")?;
            self.fmt_expr(out, f, &f.body, 1)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

impl Program {
    fn fmt_expr(
        &self,
        out: &mut fmt::Formatter<'_>,
        f: &Function,
        e: &Expr,
        indent: usize,
    ) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match e {
            Expr::Var(s) => write!(out, " {}", f.locals[*s].0),
            Expr::Con { ty, ctor, args } => {
                let name = &self.types[*ty].ctors[*ctor].name;
                if args.is_empty() {
                    return write!(out, " {name}");
                }
                write!(out, " ({name}")?;
                for a in args {
                    self.fmt_expr(out, f, a, indent)?;
                }
                write!(out, ")")
            }
            Expr::Call { func, args } => {
                write!(out, " ({}", self.functions[*func].name)?;
                for a in args {
                    self.fmt_expr(out, f, a, indent)?;
                }
                write!(out, ")")
            }
            Expr::Let { slot, bound, body } => {
                write!(out, "\n{pad}let {} =", f.locals[*slot].0)?;
                self.fmt_expr(out, f, bound, indent + 1)?;
                write!(out, "\n{pad}in")?;
                self.fmt_expr(out, f, body, indent)
            }
            Expr::Case {
                scrutinee,
                ty,
                branches,
            } => {
                write!(out, "\n{pad}case")?;
                self.fmt_expr(out, f, scrutinee, indent)?;
                write!(out, " of")?;
                for (c, b) in self.types[*ty].ctors.iter().zip(branches) {
                    write!(out, "\n{pad}  {}", c.name)?;
                    for &s in &b.binds {
                        write!(out, " {}", f.locals[s].0)?;
                    }
                    write!(out, " ->")?;
                    self.fmt_expr(out, f, &b.body, indent + 2)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bool_prog(body: Expr, locals: Vec<(String, TypeId)>) -> Program {
        Program {
            types: vec![DataType {
                name: "Bool".into(),
                ctors: vec![
                    Ctor {
                        name: "False".into(),
                        fields: vec![],
                    },
                    Ctor {
                        name: "True".into(),
                        fields: vec![],
                    },
                ],
            }],
            functions: vec![Function {
                name: "main".into(),
                n_params: 2,
                locals,
                result: 0,
                body,
            }],
            main: 0,
        }
    }

    #[test]
    fn accepts_well_typed() {
        let body = Expr::Case {
            scrutinee: Box::new(Expr::Var(0)),
            ty: 0,
            branches: vec![
                Branch {
                    binds: vec![],
                    body: Expr::Var(1),
                },
                Branch {
                    binds: vec![],
                    body: Expr::Con {
                        ty: 0,
                        ctor: 1,
                        args: vec![],
                    },
                },
            ],
        };
        let p = bool_prog(body, vec![("k".into(), 0), ("u".into(), 0)]);
        typecheck(&p).unwrap();
        assert!(!p.is_recursive(0));
    }

    #[test]
    fn rejects_unbound_and_incomplete() {
        let p = bool_prog(
            Expr::Var(2),
            vec![("k".into(), 0), ("u".into(), 0), ("x".into(), 0)],
        );
        assert!(typecheck(&p).is_err());
        let body = Expr::Case {
            scrutinee: Box::new(Expr::Var(0)),
            ty: 0,
            branches: vec![Branch {
                binds: vec![],
                body: Expr::Var(1),
            }],
        };
        let p = bool_prog(body, vec![("k".into(), 0), ("u".into(), 0)]);
        assert!(typecheck(&p)
            .unwrap_err()
            .to_string()
            .contains("not complete"));
    }
}
