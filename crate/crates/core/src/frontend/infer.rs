//! Type inference for the desugared, still polymorphic program.
//!
//! Every function carries a signature; inference checks bodies against it
//! and records, per expression node, the type in terms of the enclosing
//! function's (rigid) type variables, plus the type arguments chosen at
//! each call and function reference. Instantiation consumes these tables.

use std::collections::HashMap;

use super::desugar::{DExpr, DKind, DProgram, NodeId};
use super::syntax::TypeExpr;
use super::{FrontendError, Pos};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Con(String, Vec<Ty>),
    Fun(Box<Ty>, Box<Ty>),
    /// Unification variable.
    Var(u32),
    /// Type variable of the enclosing signature.
    Rigid(String),
}

impl Ty {
    pub fn from_type_expr(t: &TypeExpr) -> Ty {
        match t {
            TypeExpr::Var(v) => Ty::Rigid(v.clone()),
            TypeExpr::Con(n, args) => {
                Ty::Con(n.clone(), args.iter().map(Ty::from_type_expr).collect())
            }
            TypeExpr::Fun(a, b) => Ty::Fun(
                Box::new(Ty::from_type_expr(a)),
                Box::new(Ty::from_type_expr(b)),
            ),
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, Ty::Fun(..))
    }

    /// Splits a curried function type into parameters and result.
    pub fn uncurry(&self) -> (Vec<&Ty>, &Ty) {
        let mut params = Vec::new();
        let mut t = self;
        while let Ty::Fun(a, r) = t {
            params.push(a.as_ref());
            t = r;
        }
        (params, t)
    }

    fn subst_rigid(&self, m: &HashMap<&str, Ty>) -> Ty {
        match self {
            Ty::Rigid(v) => m.get(v.as_str()).cloned().unwrap_or_else(|| self.clone()),
            Ty::Con(n, args) => Ty::Con(n.clone(), args.iter().map(|a| a.subst_rigid(m)).collect()),
            Ty::Fun(a, b) => Ty::Fun(Box::new(a.subst_rigid(m)), Box::new(b.subst_rigid(m))),
            Ty::Var(_) => self.clone(),
        }
    }
}

impl std::fmt::Display for Ty {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ty::Con(n, args) => {
                f.write_str(n)?;
                for a in args {
                    match a {
                        Ty::Con(_, inner) if !inner.is_empty() => write!(f, " ({a})")?,
                        Ty::Fun(..) => write!(f, " ({a})")?,
                        _ => write!(f, " {a}")?,
                    }
                }
                Ok(())
            }
            Ty::Fun(a, b) => match a.as_ref() {
                Ty::Fun(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
            Ty::Var(v) => write!(f, "t{v}"),
            Ty::Rigid(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scheme {
    /// Quantified type variables in order of first appearance.
    pub vars: Vec<String>,
    pub params: Vec<Ty>,
    pub result: Ty,
}

#[derive(Clone, Debug, Default)]
pub struct Typed {
    pub schemes: Vec<Scheme>,
    /// Resolved type of each expression node.
    pub node_types: Vec<Option<Ty>>,
    /// Type arguments of the callee at `Call` and `FunRef` nodes.
    pub instantiations: HashMap<NodeId, Vec<Ty>>,
}

fn collect_vars(t: &TypeExpr, out: &mut Vec<String>) {
    match t {
        TypeExpr::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        TypeExpr::Con(_, args) => args.iter().for_each(|a| collect_vars(a, out)),
        TypeExpr::Fun(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

pub fn infer(prog: &DProgram) -> Result<Typed, FrontendError> {
    let mut typed = Typed {
        node_types: vec![None; prog.node_count as usize],
        ..Typed::default()
    };
    for f in &prog.functions {
        let mut vars = Vec::new();
        collect_vars(&f.sig, &mut vars);
        let (param_tys, result) = f.sig.uncurry();
        if param_tys.len() < f.params.len() {
            return Err(FrontendError::ty(
                f.pos,
                format!(
                    "`{}` has {} parameters but its signature has {} arguments",
                    f.name,
                    f.params.len(),
                    param_tys.len()
                ),
            ));
        }
        if param_tys.len() > f.params.len() {
            return Err(FrontendError::ty(
                f.pos,
                format!("`{}` would return a function; results must be data", f.name),
            ));
        }
        for p in &param_tys {
            if let TypeExpr::Fun(..) = p {
                let (inner, r) = p.uncurry();
                let nested = inner.iter().any(|t| matches!(t, TypeExpr::Fun(..)))
                    || matches!(r, TypeExpr::Fun(..));
                if nested {
                    return Err(FrontendError::ty(
                        f.pos,
                        format!("`{}` takes a higher-order functional argument; only first-order function arguments are supported", f.name),
                    ));
                }
            }
        }
        typed.schemes.push(Scheme {
            vars,
            params: param_tys.iter().map(|t| Ty::from_type_expr(t)).collect(),
            result: Ty::from_type_expr(result),
        });
    }

    let main = &prog.functions[prog.fn_index["main"]];
    let main_scheme = &typed.schemes[prog.fn_index["main"]];
    if main.params.len() != 2 {
        return Err(FrontendError::ty(
            main.pos,
            "`main` must take exactly two parameters (known and unknown)",
        ));
    }
    if main_scheme.result != Ty::Con("Bool".into(), Vec::new()) {
        return Err(FrontendError::ty(main.pos, "`main` must return Bool"));
    }
    if !main_scheme.vars.is_empty() || main_scheme.params.iter().any(Ty::is_fun) {
        return Err(FrontendError::ty(
            main.pos,
            "`main` must be monomorphic and first-order",
        ));
    }

    for (fi, f) in prog.functions.iter().enumerate() {
        let scheme = typed.schemes[fi].clone();
        let mut cx = Infer {
            prog,
            schemes: &typed.schemes,
            subst: Vec::new(),
            recorded: Vec::new(),
            insts: Vec::new(),
        };
        let mut env: Vec<(String, Ty)> = f
            .params
            .iter()
            .cloned()
            .zip(scheme.params.iter().cloned())
            .collect();
        let body_ty = cx.expr(&f.body, &mut env)?;
        cx.unify(&body_ty, &scheme.result, f.body.pos)?;
        for (id, t, pos) in std::mem::take(&mut cx.recorded) {
            let t = cx.resolve(&t);
            if has_var(&t) {
                return Err(FrontendError::ty(pos, format!("ambiguous type `{t}`")));
            }
            typed.node_types[id as usize] = Some(t);
        }
        for (id, ts, pos) in std::mem::take(&mut cx.insts) {
            let ts: Vec<Ty> = ts.iter().map(|t| cx.resolve(t)).collect();
            if let Some(t) = ts.iter().find(|t| has_var(t)) {
                return Err(FrontendError::ty(pos, format!("ambiguous type `{t}`")));
            }
            typed.instantiations.insert(id, ts);
        }
    }
    Ok(typed)
}

fn has_var(t: &Ty) -> bool {
    match t {
        Ty::Var(_) => true,
        Ty::Rigid(_) => false,
        Ty::Con(_, args) => args.iter().any(has_var),
        Ty::Fun(a, b) => has_var(a) || has_var(b),
    }
}

struct Infer<'a> {
    prog: &'a DProgram,
    schemes: &'a [Scheme],
    subst: Vec<Option<Ty>>,
    recorded: Vec<(NodeId, Ty, Pos)>,
    insts: Vec<(NodeId, Vec<Ty>, Pos)>,
}

impl<'a> Infer<'a> {
    fn fresh(&mut self) -> Ty {
        self.subst.push(None);
        Ty::Var(self.subst.len() as u32 - 1)
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Var(v) = t {
            match &self.subst[v as usize] {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match self.shallow(t) {
            Ty::Con(n, args) => Ty::Con(n, args.iter().map(|a| self.resolve(a)).collect()),
            Ty::Fun(a, b) => Ty::Fun(Box::new(self.resolve(&a)), Box::new(self.resolve(&b))),
            other => other,
        }
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Var(w) => v == w,
            Ty::Rigid(_) => false,
            Ty::Con(_, args) => args.iter().any(|a| self.occurs(v, a)),
            Ty::Fun(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty, pos: Pos) -> Result<(), FrontendError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(FrontendError::ty(
                        pos,
                        format!("infinite type `{}`", self.resolve(t)),
                    ));
                }
                self.subst[*x as usize] = Some(t.clone());
                Ok(())
            }
            (Ty::Rigid(x), Ty::Rigid(y)) if x == y => Ok(()),
            (Ty::Con(n, xs), Ty::Con(m, ys)) if n == m && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y, pos)?;
                }
                Ok(())
            }
            (Ty::Fun(a1, r1), Ty::Fun(a2, r2)) => {
                self.unify(a1, a2, pos)?;
                self.unify(r1, r2, pos)
            }
            _ => Err(FrontendError::ty(
                pos,
                format!(
                    "cannot match `{}` with `{}`",
                    self.resolve(&a),
                    self.resolve(&b)
                ),
            )),
        }
    }

    fn instantiate_scheme(&mut self, s: &Scheme) -> (Vec<Ty>, Vec<Ty>, Ty) {
        let fresh: Vec<Ty> = s.vars.iter().map(|_| self.fresh()).collect();
        let m: HashMap<&str, Ty> = s
            .vars
            .iter()
            .map(String::as_str)
            .zip(fresh.iter().cloned())
            .collect();
        let params = s.params.iter().map(|p| p.subst_rigid(&m)).collect();
        (fresh, params, s.result.subst_rigid(&m))
    }

    fn data_instance(&mut self, ctor: &str, pos: Pos) -> Result<(Ty, Vec<Ty>), FrontendError> {
        let (data, ci) = self
            .prog
            .ctor(ctor)
            .ok_or_else(|| FrontendError::scope(pos, format!("unknown constructor `{ctor}`")))?;
        let args: Vec<Ty> = data.params.iter().map(|_| self.fresh()).collect();
        let m: HashMap<&str, Ty> = data
            .params
            .iter()
            .map(String::as_str)
            .zip(args.iter().cloned())
            .collect();
        let fields = data.ctors[ci]
            .fields
            .iter()
            .map(|f| Ty::from_type_expr(f).subst_rigid(&m))
            .collect();
        Ok((Ty::Con(data.name.clone(), args), fields))
    }

    fn lookup<'e>(env: &'e [(String, Ty)], x: &str) -> Option<&'e Ty> {
        env.iter().rev().find(|(n, _)| n == x).map(|(_, t)| t)
    }

    /// An argument in a parameter position of type `expected`.
    fn arg(
        &mut self,
        e: &DExpr,
        expected: &Ty,
        env: &mut Vec<(String, Ty)>,
    ) -> Result<(), FrontendError> {
        let expected_fun = self.shallow(expected).is_fun();
        match &e.kind {
            DKind::FunRef(g) if expected_fun => {
                let gi = self.prog.fn_index[g];
                let scheme = &self.schemes[gi];
                if scheme.params.iter().any(Ty::is_fun) {
                    return Err(FrontendError::ty(
                        e.pos,
                        format!("higher-order function `{g}` cannot be passed as an argument"),
                    ));
                }
                let (fresh, params, result) = self.instantiate_scheme(&scheme.clone());
                let ty = params
                    .into_iter()
                    .rev()
                    .fold(result, |acc, p| Ty::Fun(Box::new(p), Box::new(acc)));
                self.unify(&ty, expected, e.pos)?;
                self.insts.push((e.id, fresh, e.pos));
                Ok(())
            }
            DKind::Var(x) if expected_fun => {
                let t = Self::lookup(env, x).cloned().ok_or_else(|| {
                    FrontendError::scope(e.pos, format!("unbound variable `{x}`"))
                })?;
                self.unify(&t, expected, e.pos)
            }
            _ if expected_fun => Err(FrontendError::ty(
                e.pos,
                "a functional argument must be the name of a function",
            )),
            _ => {
                let t = self.expr(e, env)?;
                self.unify(&t, expected, e.pos)
            }
        }
    }

    fn expr(&mut self, e: &DExpr, env: &mut Vec<(String, Ty)>) -> Result<Ty, FrontendError> {
        let t = match &e.kind {
            DKind::Var(x) => {
                let t = Self::lookup(env, x).cloned().ok_or_else(|| {
                    FrontendError::scope(e.pos, format!("unbound variable `{x}`"))
                })?;
                if self.shallow(&t).is_fun() {
                    return Err(FrontendError::ty(
                        e.pos,
                        format!("function `{x}` is used as a value; functions may only be called or passed as arguments"),
                    ));
                }
                t
            }
            DKind::FunRef(g) => {
                return Err(FrontendError::ty(
                    e.pos,
                    format!("function `{g}` is used as a value; functions may only be called or passed as arguments"),
                ))
            }
            DKind::Con(c, args) => {
                let (ty, fields) = self.data_instance(c, e.pos)?;
                for (a, f) in args.iter().zip(&fields) {
                    let at = self.expr(a, env)?;
                    self.unify(&at, f, a.pos)?;
                }
                ty
            }
            DKind::Call(g, args) => {
                let gi = self.prog.fn_index[g];
                let scheme = self.schemes[gi].clone();
                let (fresh, params, result) = self.instantiate_scheme(&scheme);
                for (a, p) in args.iter().zip(&params) {
                    self.arg(a, p, env)?;
                }
                self.insts.push((e.id, fresh, e.pos));
                result
            }
            DKind::CallParam(f, args) => {
                let ft = Self::lookup(env, f).cloned().ok_or_else(|| {
                    FrontendError::scope(e.pos, format!("unbound variable `{f}`"))
                })?;
                let ft = self.resolve(&ft);
                let (params, result) = ft.uncurry();
                if params.is_empty() {
                    return Err(FrontendError::ty(e.pos, format!("`{f}` is not a function")));
                }
                if params.len() != args.len() {
                    return Err(FrontendError::ty(
                        e.pos,
                        format!(
                            "`{f}` takes {} arguments but is applied to {}; partial application is not supported",
                            params.len(),
                            args.len()
                        ),
                    ));
                }
                let params: Vec<Ty> = params.into_iter().cloned().collect();
                let result = result.clone();
                for (a, p) in args.iter().zip(&params) {
                    let at = self.expr(a, env)?;
                    self.unify(&at, p, a.pos)?;
                }
                result
            }
            DKind::Let(x, rhs, body) => {
                let rt = self.expr(rhs, env)?;
                env.push((x.clone(), rt));
                let bt = self.expr(body, env);
                env.pop();
                bt?
            }
            DKind::Case(scrut, branches) => {
                let st = self.expr(scrut, env)?;
                let result = self.fresh();
                for b in branches {
                    let (ty, fields) = self.data_instance(&b.ctor, e.pos)?;
                    self.unify(&st, &ty, scrut.pos)?;
                    let depth = env.len();
                    env.extend(b.vars.iter().cloned().zip(fields));
                    let bt = self.expr(&b.body, env);
                    env.truncate(depth);
                    let bt = bt?;
                    self.unify(&bt, &result, b.body.pos)?;
                }
                result
            }
            DKind::Force(x, body) => {
                let xt = Self::lookup(env, x).cloned().ok_or_else(|| {
                    FrontendError::scope(e.pos, format!("unbound variable `{x}`"))
                })?;
                let bt = self.expr(body, env)?;
                // Record the forced variable's type on this node's id slot via
                // a synthetic entry: instantiation reads it back.
                self.recorded.push((e.id, xt, e.pos));
                return Ok(bt);
            }
        };
        self.recorded.push((e.id, t.clone(), e.pos));
        Ok(t)
    }
}
