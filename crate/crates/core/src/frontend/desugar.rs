//! Name resolution and pattern-match compilation.
//!
//! Nested, overlapping and wildcard patterns (in `case` alternatives and in
//! multi-equation function definitions) are compiled into cascades of
//! simple, complete `case` expressions whose branches follow constructor
//! declaration order. Matching is top-to-bottom, left-to-right: the first
//! row's leftmost constructor pattern picks the next scrutinee.

use std::collections::{HashMap, HashSet};

use super::syntax::{self, Alt, Equation, ExprKind, Module, Pattern, TypeExpr};
use super::{FrontendError, Pos};

pub type NodeId = u32;

#[derive(Clone, Debug)]
pub struct DExpr {
    pub id: NodeId,
    pub kind: DKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum DKind {
    /// A local value variable.
    Var(String),
    /// A top-level function used as an argument.
    FunRef(String),
    Con(String, Vec<DExpr>),
    Call(String, Vec<DExpr>),
    /// Call of a function-typed parameter.
    CallParam(String, Vec<DExpr>),
    Let(String, Box<DExpr>, Box<DExpr>),
    /// Complete case with one branch per constructor in declaration order.
    Case(Box<DExpr>, Vec<DBranch>),
    /// Evaluate the variable, fail on undefined, then continue. Produced for
    /// `case` expressions whose alternatives never inspect the scrutinee;
    /// instantiation turns it into a complete case once the type is known.
    Force(String, Box<DExpr>),
}

#[derive(Clone, Debug)]
pub struct DBranch {
    pub ctor: String,
    pub vars: Vec<String>,
    pub body: DExpr,
}

#[derive(Clone, Debug)]
pub struct DCtor {
    pub name: String,
    pub fields: Vec<TypeExpr>,
}

#[derive(Clone, Debug)]
pub struct DData {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<DCtor>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct DFunction {
    pub name: String,
    pub params: Vec<String>,
    pub sig: TypeExpr,
    pub body: DExpr,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default)]
pub struct DProgram {
    pub datas: Vec<DData>,
    pub type_index: HashMap<String, usize>,
    /// Constructor name → (data index, constructor index).
    pub ctor_index: HashMap<String, (usize, usize)>,
    pub functions: Vec<DFunction>,
    pub fn_index: HashMap<String, usize>,
    /// Number of expression ids handed out.
    pub node_count: u32,
}

impl DProgram {
    pub fn ctor(&self, name: &str) -> Option<(&DData, usize)> {
        self.ctor_index.get(name).map(|&(d, c)| (&self.datas[d], c))
    }

    pub fn function(&self, name: &str) -> Option<&DFunction> {
        self.fn_index.get(name).map(|&i| &self.functions[i])
    }
}

pub fn desugar(module: &Module) -> Result<DProgram, FrontendError> {
    let mut prog = DProgram::default();
    let synonyms = collect_synonyms(module)?;
    declare_types(module, &synonyms, &mut prog)?;

    let mut sigs: HashMap<&str, &syntax::Signature> = HashMap::new();
    for s in &module.signatures {
        if sigs.insert(&s.name, s).is_some() {
            return Err(FrontendError::Duplicate {
                pos: s.pos,
                name: s.name.clone(),
            });
        }
    }

    // Group consecutive equations by name.
    let mut groups: Vec<Vec<&Equation>> = Vec::new();
    for eq in &module.equations {
        match groups.last_mut() {
            Some(g) if g[0].name == eq.name => g.push(eq),
            _ => {
                if groups.iter().any(|g| g[0].name == eq.name) {
                    return Err(FrontendError::Duplicate {
                        pos: eq.pos,
                        name: eq.name.clone(),
                    });
                }
                groups.push(vec![eq]);
            }
        }
    }
    for g in &groups {
        let arity = g[0].pats.len();
        if let Some(bad) = g.iter().find(|e| e.pats.len() != arity) {
            return Err(FrontendError::syntax(
                bad.pos,
                format!(
                    "equations for `{}` have different numbers of arguments",
                    bad.name
                ),
            ));
        }
        if prog.ctor_index.contains_key(&g[0].name) {
            return Err(FrontendError::Duplicate {
                pos: g[0].pos,
                name: g[0].name.clone(),
            });
        }
        prog.fn_index.insert(g[0].name.clone(), prog.fn_index.len());
    }
    for s in &module.signatures {
        if !prog.fn_index.contains_key(&s.name) {
            return Err(FrontendError::scope(
                s.pos,
                format!(
                    "type signature for `{}` lacks an accompanying definition",
                    s.name
                ),
            ));
        }
    }
    if !prog.fn_index.contains_key("main") {
        return Err(FrontendError::NoMain);
    }

    let arities: HashMap<String, usize> = groups
        .iter()
        .map(|g| (g[0].name.clone(), g[0].pats.len()))
        .collect();
    let mut d = Desugarer {
        prog: &prog,
        arities: &arities,
        next_id: 0,
        next_fresh: 0,
    };
    let mut functions = Vec::new();
    for g in &groups {
        let name = &g[0].name;
        let sig = sigs.get(name.as_str()).ok_or_else(|| {
            FrontendError::ty(g[0].pos, format!("missing type signature for `{name}`"))
        })?;
        let sig_ty = expand_synonyms(&sig.ty, &synonyms, sig.pos, 0)?;
        check_type(&sig_ty, &prog, None, sig.pos)?;
        let (params, body) = d.function(g)?;
        functions.push(DFunction {
            name: name.clone(),
            params,
            sig: sig_ty,
            body,
            pos: g[0].pos,
        });
    }
    prog.node_count = d.next_id;
    prog.functions = functions;
    Ok(prog)
}

struct Synonym<'a> {
    params: &'a [String],
    body: &'a TypeExpr,
}

fn collect_synonyms(module: &Module) -> Result<HashMap<&str, Synonym<'_>>, FrontendError> {
    let mut out = HashMap::new();
    for s in &module.synonyms {
        let syn = Synonym {
            params: &s.params,
            body: &s.body,
        };
        if out.insert(s.name.as_str(), syn).is_some()
            || module.datas.iter().any(|d| d.name == s.name)
        {
            return Err(FrontendError::Duplicate {
                pos: s.pos,
                name: s.name.clone(),
            });
        }
    }
    Ok(out)
}

fn expand_synonyms(
    t: &TypeExpr,
    syns: &HashMap<&str, Synonym<'_>>,
    pos: Pos,
    depth: usize,
) -> Result<TypeExpr, FrontendError> {
    if depth > 64 {
        return Err(FrontendError::ty(pos, "cyclic type synonym"));
    }
    Ok(match t {
        TypeExpr::Var(v) => TypeExpr::Var(v.clone()),
        TypeExpr::Fun(a, b) => TypeExpr::Fun(
            Box::new(expand_synonyms(a, syns, pos, depth)?),
            Box::new(expand_synonyms(b, syns, pos, depth)?),
        ),
        TypeExpr::Con(name, args) => {
            let args = args
                .iter()
                .map(|a| expand_synonyms(a, syns, pos, depth))
                .collect::<Result<Vec<_>, _>>()?;
            match syns.get(name.as_str()) {
                None => TypeExpr::Con(name.clone(), args),
                Some(syn) => {
                    if syn.params.len() != args.len() {
                        return Err(FrontendError::ty(
                            pos,
                            format!(
                                "type synonym `{name}` expects {} arguments, got {}",
                                syn.params.len(),
                                args.len()
                            ),
                        ));
                    }
                    let subst: HashMap<&str, &TypeExpr> = syn
                        .params
                        .iter()
                        .map(String::as_str)
                        .zip(args.iter())
                        .collect();
                    let body = substitute(syn.body, &subst);
                    expand_synonyms(&body, syns, pos, depth + 1)?
                }
            }
        }
    })
}

/// Expands the module's type synonyms inside `t`.
pub(crate) fn expand_in_module(module: &Module, t: &TypeExpr) -> Result<TypeExpr, FrontendError> {
    let synonyms = collect_synonyms(module)?;
    expand_synonyms(t, &synonyms, Pos::default(), 0)
}

pub(crate) fn substitute(t: &TypeExpr, subst: &HashMap<&str, &TypeExpr>) -> TypeExpr {
    match t {
        TypeExpr::Var(v) => subst
            .get(v.as_str())
            .map_or_else(|| t.clone(), |&r| r.clone()),
        TypeExpr::Con(n, args) => TypeExpr::Con(
            n.clone(),
            args.iter().map(|a| substitute(a, subst)).collect(),
        ),
        TypeExpr::Fun(a, b) => TypeExpr::Fun(
            Box::new(substitute(a, subst)),
            Box::new(substitute(b, subst)),
        ),
    }
}

/// Every constructor names a declared data type with the right number of
/// arguments; with `params` given, type variables must be among them.
fn check_type(
    t: &TypeExpr,
    prog: &DProgram,
    params: Option<&[String]>,
    pos: Pos,
) -> Result<(), FrontendError> {
    match t {
        TypeExpr::Var(v) => match params {
            Some(ps) if !ps.contains(v) => Err(FrontendError::ty(
                pos,
                format!("type variable `{v}` is not in scope"),
            )),
            _ => Ok(()),
        },
        TypeExpr::Fun(a, b) => {
            check_type(a, prog, params, pos)?;
            check_type(b, prog, params, pos)
        }
        TypeExpr::Con(name, args) => {
            let &i = prog
                .type_index
                .get(name)
                .ok_or_else(|| FrontendError::ty(pos, format!("unknown type `{name}`")))?;
            let want = prog.datas[i].params.len();
            if want != args.len() {
                return Err(FrontendError::ty(
                    pos,
                    format!("type `{name}` expects {want} arguments, got {}", args.len()),
                ));
            }
            args.iter()
                .try_for_each(|a| check_type(a, prog, params, pos))
        }
    }
}

fn declare_types(
    module: &Module,
    syns: &HashMap<&str, Synonym<'_>>,
    prog: &mut DProgram,
) -> Result<(), FrontendError> {
    let mut decls: Vec<syntax::DataDecl> = Vec::new();
    if !module.datas.iter().any(|d| d.name == "Bool") {
        let ctor = |name: &str| syntax::CtorDecl {
            name: name.into(),
            fields: Vec::new(),
            pos: Pos::default(),
        };
        decls.push(syntax::DataDecl {
            name: "Bool".into(),
            params: Vec::new(),
            ctors: vec![ctor("False"), ctor("True")],
            pos: Pos::default(),
        });
    }
    decls.extend(module.datas.iter().cloned());

    for d in &decls {
        if prog.type_index.contains_key(&d.name) {
            return Err(FrontendError::Duplicate {
                pos: d.pos,
                name: d.name.clone(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(p) = d.params.iter().find(|p| !seen.insert(p.as_str())) {
            return Err(FrontendError::Duplicate {
                pos: d.pos,
                name: p.clone(),
            });
        }
        prog.type_index.insert(d.name.clone(), prog.datas.len());
        for (ci, c) in d.ctors.iter().enumerate() {
            if prog
                .ctor_index
                .insert(c.name.clone(), (prog.datas.len(), ci))
                .is_some()
            {
                return Err(FrontendError::Duplicate {
                    pos: c.pos,
                    name: c.name.clone(),
                });
            }
        }
        prog.datas.push(DData {
            name: d.name.clone(),
            params: d.params.clone(),
            ctors: Vec::new(),
            pos: d.pos,
        });
    }
    for (i, d) in decls.iter().enumerate() {
        let mut ctors = Vec::new();
        for c in &d.ctors {
            let mut fields = Vec::new();
            for f in &c.fields {
                let f = expand_synonyms(f, syns, c.pos, 0)?;
                if contains_function(&f) {
                    return Err(FrontendError::ty(
                        c.pos,
                        format!(
                            "constructor `{}` has a functional field; data may not contain functions",
                            c.name
                        ),
                    ));
                }
                check_type(&f, prog, Some(&d.params), c.pos)?;
                fields.push(f);
            }
            ctors.push(DCtor {
                name: c.name.clone(),
                fields,
            });
        }
        prog.datas[i].ctors = ctors;
    }
    let bool_ok = {
        let b = &prog.datas[prog.type_index["Bool"]];
        b.params.is_empty()
            && b.ctors.len() == 2
            && b.ctors[0].name == "False"
            && b.ctors[1].name == "True"
            && b.ctors.iter().all(|c| c.fields.is_empty())
    };
    if !bool_ok {
        let pos = prog.datas[prog.type_index["Bool"]].pos;
        return Err(FrontendError::ty(
            pos,
            "`Bool` must be declared as `data Bool = False | True`",
        ));
    }
    Ok(())
}

fn contains_function(t: &TypeExpr) -> bool {
    match t {
        TypeExpr::Var(_) => false,
        TypeExpr::Fun(..) => true,
        TypeExpr::Con(_, args) => args.iter().any(contains_function),
    }
}

struct Desugarer<'a> {
    prog: &'a DProgram,
    arities: &'a HashMap<String, usize>,
    next_id: u32,
    next_fresh: u32,
}

#[derive(Clone)]
struct Row<'s> {
    pats: Vec<Pattern>,
    binds: Vec<(String, String)>,
    /// Index of the alternative (or equation) this row came from.
    origin: usize,
    body: &'s syntax::Expr,
}

type Scope = Vec<String>;

impl<'a> Desugarer<'a> {
    fn node(&mut self, kind: DKind, pos: Pos) -> DExpr {
        let id = self.next_id;
        self.next_id += 1;
        DExpr { id, kind, pos }
    }

    fn fresh(&mut self) -> String {
        self.next_fresh += 1;
        format!("${}", self.next_fresh)
    }

    fn function(&mut self, eqs: &[&Equation]) -> Result<(Vec<String>, DExpr), FrontendError> {
        let first = eqs[0];
        let simple = eqs.len() == 1 && first.pats.iter().all(|p| matches!(p, Pattern::Var(..)));
        if simple {
            let params: Vec<String> = first
                .pats
                .iter()
                .map(|p| match p {
                    Pattern::Var(v, _) => v.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let mut seen = HashSet::new();
            for (p, pat) in params.iter().zip(&first.pats) {
                if !seen.insert(p.as_str()) {
                    return Err(FrontendError::Duplicate {
                        pos: pat.pos(),
                        name: p.clone(),
                    });
                }
            }
            let mut scope = params.clone();
            let body = self.expr(&first.body, &mut scope)?;
            return Ok((params, body));
        }
        let params: Vec<String> = (0..first.pats.len()).map(|_| self.fresh()).collect();
        let rows = eqs
            .iter()
            .enumerate()
            .map(|(i, e)| Row {
                pats: e.pats.clone(),
                binds: Vec::new(),
                origin: i,
                body: &e.body,
            })
            .collect();
        let mut used = vec![false; eqs.len()];
        let mut scope = params.clone();
        let body = self.compile_rows(
            params.clone(),
            rows,
            &mut scope,
            &mut used,
            first.pos,
            false,
        )?;
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(FrontendError::Redundant { pos: eqs[i].pos });
        }
        Ok((params, body))
    }

    fn expr(&mut self, e: &syntax::Expr, scope: &mut Scope) -> Result<DExpr, FrontendError> {
        let pos = e.pos;
        match &e.kind {
            ExprKind::Var(x) => {
                if scope.iter().any(|s| s == x) {
                    Ok(self.node(DKind::Var(x.clone()), pos))
                } else if self.arities.contains_key(x) {
                    Ok(self.node(DKind::FunRef(x.clone()), pos))
                } else {
                    Err(FrontendError::scope(pos, format!("unbound variable `{x}`")))
                }
            }
            ExprKind::Con(c) => self.con_app(c, &[], pos, scope),
            ExprKind::App(head, args) => match &head.kind {
                ExprKind::Con(c) => self.con_app(c, args, pos, scope),
                ExprKind::Var(f) => {
                    let local = scope.iter().any(|s| s == f);
                    if !local {
                        match self.arities.get(f) {
                            None => {
                                return Err(FrontendError::scope(
                                    head.pos,
                                    format!("unbound function `{f}`"),
                                ))
                            }
                            Some(&n) if n != args.len() => {
                                return Err(FrontendError::ty(
                                    pos,
                                    format!(
                                        "`{f}` takes {n} arguments but is applied to {}; partial application is not supported",
                                        args.len()
                                    ),
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                    let args = args
                        .iter()
                        .map(|a| self.expr(a, scope))
                        .collect::<Result<Vec<_>, _>>()?;
                    let kind = if local {
                        DKind::CallParam(f.clone(), args)
                    } else {
                        DKind::Call(f.clone(), args)
                    };
                    Ok(self.node(kind, pos))
                }
                _ => Err(FrontendError::syntax(
                    head.pos,
                    "only named functions and constructors can be applied",
                )),
            },
            ExprKind::Let(bindings, body) => {
                let depth = scope.len();
                let mut bound = Vec::new();
                for b in bindings {
                    let rhs = self.expr(&b.expr, scope)?;
                    scope.push(b.name.clone());
                    bound.push((b.name.clone(), rhs, b.pos));
                }
                let mut acc = self.expr(body, scope)?;
                scope.truncate(depth);
                for (name, rhs, p) in bound.into_iter().rev() {
                    acc = self.node(DKind::Let(name, Box::new(rhs), Box::new(acc)), p);
                }
                Ok(acc)
            }
            ExprKind::Case(scrutinee, alts) => self.case(scrutinee, alts, pos, scope),
        }
    }

    fn con_app(
        &mut self,
        c: &str,
        args: &[syntax::Expr],
        pos: Pos,
        scope: &mut Scope,
    ) -> Result<DExpr, FrontendError> {
        let (data, ci) = self
            .prog
            .ctor(c)
            .ok_or_else(|| FrontendError::scope(pos, format!("unknown constructor `{c}`")))?;
        let arity = data.ctors[ci].fields.len();
        if arity != args.len() {
            return Err(FrontendError::ty(
                pos,
                format!(
                    "constructor `{c}` expects {arity} arguments, got {}",
                    args.len()
                ),
            ));
        }
        let args = args
            .iter()
            .map(|a| self.expr(a, scope))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.node(DKind::Con(c.to_string(), args), pos))
    }

    fn case(
        &mut self,
        scrutinee: &syntax::Expr,
        alts: &[Alt],
        pos: Pos,
        scope: &mut Scope,
    ) -> Result<DExpr, FrontendError> {
        let depth = scope.len();
        let (occ, binder) = match &scrutinee.kind {
            ExprKind::Var(x) if scope.iter().any(|s| s == x) => (x.clone(), None),
            _ => {
                let rhs = self.expr(scrutinee, scope)?;
                let v = self.fresh();
                scope.push(v.clone());
                (v.clone(), Some((v, rhs)))
            }
        };
        let rows = alts
            .iter()
            .enumerate()
            .map(|(i, a)| Row {
                pats: vec![a.pat.clone()],
                binds: Vec::new(),
                origin: i,
                body: &a.body,
            })
            .collect();
        let mut used = vec![false; alts.len()];
        let body = self.compile_rows(vec![occ], rows, scope, &mut used, pos, true)?;
        scope.truncate(depth);
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(FrontendError::Redundant {
                pos: alts[i].pat.pos(),
            });
        }
        Ok(match binder {
            None => body,
            Some((v, rhs)) => self.node(DKind::Let(v, Box::new(rhs), Box::new(body)), pos),
        })
    }

    /// Compiles a clause matrix. `force` demands that the (single) column is
    /// scrutinized even when no row inspects it.
    fn compile_rows(
        &mut self,
        occs: Vec<String>,
        mut rows: Vec<Row<'_>>,
        scope: &mut Scope,
        used: &mut [bool],
        pos: Pos,
        force: bool,
    ) -> Result<DExpr, FrontendError> {
        // Variable patterns bind immediately; they become wildcards.
        for row in rows.iter_mut() {
            for (j, p) in row.pats.iter_mut().enumerate() {
                if let Pattern::Var(v, vp) = p {
                    if row.binds.iter().any(|(b, _)| b == v) {
                        return Err(FrontendError::Duplicate {
                            pos: *vp,
                            name: v.clone(),
                        });
                    }
                    row.binds.push((v.clone(), occs[j].clone()));
                    *p = Pattern::Wild(*vp);
                }
            }
        }
        let first = rows.first().expect("caller guarantees a row");
        let column = first
            .pats
            .iter()
            .position(|p| matches!(p, Pattern::Con(..)));
        let Some(j) = column else {
            let row = rows.swap_remove(0);
            used[row.origin] = true;
            let leaf = self.leaf(&row, scope)?;
            return Ok(if force {
                self.node(DKind::Force(occs[0].clone(), Box::new(leaf)), pos)
            } else {
                leaf
            });
        };
        let Pattern::Con(head, _, head_pos) = &first.pats[j] else {
            unreachable!()
        };
        let (data, _) = self.prog.ctor(head).ok_or_else(|| {
            FrontendError::scope(*head_pos, format!("unknown constructor `{head}`"))
        })?;
        for row in &rows {
            if let Pattern::Con(c, args, p) = &row.pats[j] {
                match self.prog.ctor(c) {
                    None => {
                        return Err(FrontendError::scope(
                            *p,
                            format!("unknown constructor `{c}`"),
                        ))
                    }
                    Some((d, ci)) => {
                        if d.name != data.name {
                            return Err(FrontendError::ty(
                                *p,
                                format!(
                                    "constructor `{c}` of type `{}` in a match on type `{}`",
                                    d.name, data.name
                                ),
                            ));
                        }
                        let arity = d.ctors[ci].fields.len();
                        if args.len() != arity {
                            return Err(FrontendError::ty(
                                *p,
                                format!(
                                    "constructor `{c}` expects {arity} arguments, got {}",
                                    args.len()
                                ),
                            ));
                        }
                    }
                }
            }
        }
        let ctors: Vec<(String, usize)> = data
            .ctors
            .iter()
            .map(|c| (c.name.clone(), c.fields.len()))
            .collect();
        let mut branches = Vec::new();
        for (cname, arity) in ctors {
            let vars: Vec<String> = (0..arity).map(|_| self.fresh()).collect();
            let mut sub_rows = Vec::new();
            for row in &rows {
                let expansion: Vec<Pattern> = match &row.pats[j] {
                    Pattern::Con(c, args, _) if *c == cname => args.clone(),
                    Pattern::Con(..) => continue,
                    p => vec![Pattern::Wild(p.pos()); arity],
                };
                let mut pats = row.pats[..j].to_vec();
                pats.extend(expansion);
                pats.extend_from_slice(&row.pats[j + 1..]);
                sub_rows.push(Row {
                    pats,
                    binds: row.binds.clone(),
                    origin: row.origin,
                    body: row.body,
                });
            }
            if sub_rows.is_empty() {
                return Err(FrontendError::Incomplete { pos, ctor: cname });
            }
            let mut sub_occs = occs[..j].to_vec();
            sub_occs.extend(vars.iter().cloned());
            sub_occs.extend_from_slice(&occs[j + 1..]);
            let depth = scope.len();
            scope.extend(vars.iter().cloned());
            let body = self.compile_rows(sub_occs, sub_rows, scope, used, pos, false)?;
            scope.truncate(depth);
            branches.push(DBranch {
                ctor: cname,
                vars,
                body,
            });
        }
        let scrut = self.node(DKind::Var(occs[j].clone()), pos);
        Ok(self.node(DKind::Case(Box::new(scrut), branches), pos))
    }

    fn leaf(&mut self, row: &Row<'_>, scope: &mut Scope) -> Result<DExpr, FrontendError> {
        let depth = scope.len();
        scope.extend(row.binds.iter().map(|(v, _)| v.clone()));
        let body = self.expr(row.body, scope);
        scope.truncate(depth);
        let mut acc = body?;
        for (v, occ) in row.binds.iter().rev() {
            let pos = acc.pos;
            let rhs = self.node(DKind::Var(occ.clone()), pos);
            acc = self.node(DKind::Let(v.clone(), Box::new(rhs), Box::new(acc)), pos);
        }
        Ok(acc)
    }
}
