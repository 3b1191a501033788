//! Monomorphization and instantiation of higher-order functions.
//!
//! Starting from `main`, every reachable function is specialised to the
//! concrete types it is used at and to the functions passed for its
//! functional parameters. Functional parameters disappear from the
//! specialised signature; calls through them become direct calls.

use std::collections::{HashMap, VecDeque};

use super::core::{Branch, Ctor, DataType, Expr, FnId, Function, Program, Slot, TypeId};
use super::desugar::{DExpr, DKind, DProgram};
use super::infer::{Ty, Typed};
use super::{FrontendError, FrontendOptions, Pos};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    func: usize,
    targs: Vec<Ty>,
    funargs: Vec<Key>,
}

#[derive(Clone)]
enum Bound {
    Slot(Slot),
    Fun(Key),
}

struct Inst<'a> {
    prog: &'a DProgram,
    typed: &'a Typed,
    options: &'a FrontendOptions,
    types: Vec<DataType>,
    type_ids: HashMap<Ty, TypeId>,
    type_counts: HashMap<String, usize>,
    fn_ids: HashMap<Key, FnId>,
    fn_counts: HashMap<usize, usize>,
    functions: Vec<Option<Function>>,
    queue: VecDeque<Key>,
}

pub fn instantiate(
    prog: &DProgram,
    typed: &Typed,
    options: &FrontendOptions,
) -> Result<Program, FrontendError> {
    let mut cx = Inst {
        prog,
        typed,
        options,
        types: Vec::new(),
        type_ids: HashMap::new(),
        type_counts: HashMap::new(),
        fn_ids: HashMap::new(),
        fn_counts: HashMap::new(),
        functions: Vec::new(),
        queue: VecDeque::new(),
    };
    // Bool always gets a type id, even if unused besides main's result.
    cx.type_id(&Ty::Con("Bool".into(), Vec::new()), Pos::default())?;
    let main_key = Key {
        func: prog.fn_index["main"],
        targs: Vec::new(),
        funargs: Vec::new(),
    };
    let main = cx.function_id(&main_key, Pos::default())?;
    while let Some(key) = cx.queue.pop_front() {
        let id = cx.fn_ids[&key];
        let f = cx.specialise(&key)?;
        cx.functions[id] = Some(f);
    }
    Ok(Program {
        types: cx.types,
        functions: cx
            .functions
            .into_iter()
            .map(|f| f.expect("specialised"))
            .collect(),
        main,
    })
}

fn subst(t: &Ty, m: &HashMap<&str, Ty>) -> Ty {
    match t {
        Ty::Rigid(v) => m.get(v.as_str()).cloned().unwrap_or_else(|| t.clone()),
        Ty::Con(n, args) => Ty::Con(n.clone(), args.iter().map(|a| subst(a, m)).collect()),
        Ty::Fun(a, b) => Ty::Fun(Box::new(subst(a, m)), Box::new(subst(b, m))),
        Ty::Var(_) => t.clone(),
    }
}

struct Frame<'k> {
    tmap: HashMap<&'k str, Ty>,
    env: Vec<(String, Bound)>,
    locals: Vec<(String, TypeId)>,
}

impl Frame<'_> {
    fn lookup(&self, x: &str, pos: Pos) -> Result<Bound, FrontendError> {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, b)| b.clone())
            .ok_or_else(|| FrontendError::inst(pos, format!("unbound variable `{x}`")))
    }

    fn local(&mut self, name: &str, ty: TypeId) -> Slot {
        self.locals.push((name.to_string(), ty));
        self.locals.len() - 1
    }
}

impl<'a> Inst<'a> {
    fn type_id(&mut self, t: &Ty, pos: Pos) -> Result<TypeId, FrontendError> {
        if let Some(&id) = self.type_ids.get(t) {
            return Ok(id);
        }
        let Ty::Con(name, args) = t else {
            return Err(FrontendError::inst(
                pos,
                format!("`{t}` is not a first-order data type"),
            ));
        };
        let di = *self
            .prog
            .type_index
            .get(name)
            .ok_or_else(|| FrontendError::inst(pos, format!("unknown type `{name}`")))?;
        let data = &self.prog.datas[di];
        let count = self.type_counts.entry(name.clone()).or_default();
        *count += 1;
        if *count > self.options.max_specializations {
            return Err(FrontendError::inst(
                pos,
                format!(
                    "more than {} instances of type `{name}` (polymorphic recursion?)",
                    self.options.max_specializations
                ),
            ));
        }
        let id = self.types.len();
        self.types.push(DataType {
            name: t.to_string(),
            ctors: Vec::new(),
        });
        self.type_ids.insert(t.clone(), id);
        let m: HashMap<&str, Ty> = data
            .params
            .iter()
            .map(String::as_str)
            .zip(args.iter().cloned())
            .collect();
        let mut ctors = Vec::new();
        for c in &data.ctors {
            let mut fields = Vec::new();
            for f in &c.fields {
                fields.push(self.type_id(&subst(&Ty::from_type_expr(f), &m), data.pos)?);
            }
            ctors.push(Ctor {
                name: c.name.clone(),
                fields,
            });
        }
        self.types[id].ctors = ctors;
        Ok(id)
    }

    fn function_id(&mut self, key: &Key, pos: Pos) -> Result<FnId, FrontendError> {
        if let Some(&id) = self.fn_ids.get(key) {
            return Ok(id);
        }
        let count = self.fn_counts.entry(key.func).or_default();
        *count += 1;
        if *count > self.options.max_specializations {
            return Err(FrontendError::inst(
                pos,
                format!(
                    "more than {} specializations of `{}` (polymorphic recursion?)",
                    self.options.max_specializations, self.prog.functions[key.func].name
                ),
            ));
        }
        let id = self.functions.len();
        self.functions.push(None);
        self.fn_ids.insert(key.clone(), id);
        self.queue.push_back(key.clone());
        Ok(id)
    }

    fn key_name(&self, key: &Key) -> String {
        let mut s = self.prog.functions[key.func].name.clone();
        if !key.targs.is_empty() {
            let ts: Vec<String> = key.targs.iter().map(Ty::to_string).collect();
            s.push_str(&format!("<{}>", ts.join(", ")));
        }
        if !key.funargs.is_empty() {
            let fs: Vec<String> = key.funargs.iter().map(|k| self.key_name(k)).collect();
            s.push_str(&format!("[{}]", fs.join(", ")));
        }
        s
    }

    fn specialise(&mut self, key: &Key) -> Result<Function, FrontendError> {
        let df = &self.prog.functions[key.func];
        let scheme = &self.typed.schemes[key.func];
        let mut frame = Frame {
            tmap: scheme
                .vars
                .iter()
                .map(String::as_str)
                .zip(key.targs.iter().cloned())
                .collect(),
            env: Vec::new(),
            locals: Vec::new(),
        };
        let mut funargs = key.funargs.iter();
        // Value parameters first so that they occupy the leading slots.
        let mut fun_bindings = Vec::new();
        for (name, pt) in df.params.iter().zip(&scheme.params) {
            if pt.is_fun() {
                let k = funargs.next().expect("functional argument").clone();
                fun_bindings.push((name.clone(), Bound::Fun(k)));
            } else {
                let t = self.type_id(&subst(pt, &frame.tmap), df.pos)?;
                let s = frame.local(name, t);
                frame.env.push((name.clone(), Bound::Slot(s)));
            }
        }
        frame.env.extend(fun_bindings);
        let n_params = frame.locals.len();
        let result = self.type_id(&subst(&scheme.result, &frame.tmap), df.pos)?;
        let body = self.expr(&df.body, &mut frame)?;
        Ok(Function {
            name: self.key_name(key),
            n_params,
            locals: frame.locals,
            result,
            body,
        })
    }

    fn node_type(&mut self, e: &DExpr, frame: &Frame) -> Result<TypeId, FrontendError> {
        let t = self.typed.node_types[e.id as usize]
            .as_ref()
            .ok_or_else(|| FrontendError::inst(e.pos, "expression without a type"))?;
        self.type_id(&subst(t, &frame.tmap), e.pos)
    }

    fn instance_key(&self, e: &DExpr, func: usize, frame: &Frame) -> Key {
        let targs = self
            .typed
            .instantiations
            .get(&e.id)
            .map(|ts| ts.iter().map(|t| subst(t, &frame.tmap)).collect())
            .unwrap_or_default();
        Key {
            func,
            targs,
            funargs: Vec::new(),
        }
    }

    fn call(
        &mut self,
        key: Key,
        args: &[DExpr],
        frame: &mut Frame,
        pos: Pos,
    ) -> Result<Expr, FrontendError> {
        let scheme = &self.typed.schemes[key.func];
        let is_fun: Vec<bool> = scheme.params.iter().map(Ty::is_fun).collect();
        let mut key = key;
        let mut values = Vec::new();
        for (a, fun) in args.iter().zip(is_fun) {
            if !fun {
                values.push(self.expr(a, frame)?);
                continue;
            }
            let k = match &a.kind {
                DKind::FunRef(h) => self.instance_key(a, self.prog.fn_index[h], frame),
                DKind::Var(x) => match frame.lookup(x, a.pos)? {
                    Bound::Fun(k) => k,
                    Bound::Slot(_) => {
                        return Err(FrontendError::inst(
                            a.pos,
                            format!("`{x}` is not a function"),
                        ))
                    }
                },
                _ => {
                    return Err(FrontendError::inst(
                        a.pos,
                        "a functional argument must be the name of a function",
                    ))
                }
            };
            key.funargs.push(k);
        }
        let func = self.function_id(&key, pos)?;
        Ok(Expr::Call { func, args: values })
    }

    fn expr(&mut self, e: &DExpr, frame: &mut Frame) -> Result<Expr, FrontendError> {
        Ok(match &e.kind {
            DKind::Var(x) => match frame.lookup(x, e.pos)? {
                Bound::Slot(s) => Expr::Var(s),
                Bound::Fun(_) => {
                    return Err(FrontendError::inst(
                        e.pos,
                        format!("function `{x}` is used as a value"),
                    ))
                }
            },
            DKind::FunRef(g) => {
                return Err(FrontendError::inst(
                    e.pos,
                    format!("function `{g}` is used as a value"),
                ))
            }
            DKind::Con(c, args) => {
                let ty = self.node_type(e, frame)?;
                let ctor = self.prog.ctor_index[c].1;
                let args = args
                    .iter()
                    .map(|a| self.expr(a, frame))
                    .collect::<Result<_, _>>()?;
                Expr::Con { ty, ctor, args }
            }
            DKind::Call(g, args) => {
                let key = self.instance_key(e, self.prog.fn_index[g], frame);
                self.call(key, args, frame, e.pos)?
            }
            DKind::CallParam(f, args) => match frame.lookup(f, e.pos)? {
                Bound::Fun(key) => self.call(key, args, frame, e.pos)?,
                Bound::Slot(_) => {
                    return Err(FrontendError::inst(
                        e.pos,
                        format!("`{f}` is not a function"),
                    ))
                }
            },
            DKind::Let(x, rhs, body) => {
                let ty = self.node_type(rhs, frame)?;
                let bound = self.expr(rhs, frame)?;
                let slot = frame.local(x, ty);
                frame.env.push((x.clone(), Bound::Slot(slot)));
                let body = self.expr(body, frame);
                frame.env.pop();
                Expr::Let {
                    slot,
                    bound: Box::new(bound),
                    body: Box::new(body?),
                }
            }
            DKind::Case(scrut, branches) => {
                let ty = self.node_type(scrut, frame)?;
                let scrutinee = self.expr(scrut, frame)?;
                let fields: Vec<Vec<TypeId>> = self.types[ty]
                    .ctors
                    .iter()
                    .map(|c| c.fields.clone())
                    .collect();
                let mut out = Vec::new();
                for (b, fts) in branches.iter().zip(fields) {
                    let depth = frame.env.len();
                    let binds: Vec<Slot> = b
                        .vars
                        .iter()
                        .zip(fts)
                        .map(|(v, t)| {
                            let s = frame.local(v, t);
                            frame.env.push((v.clone(), Bound::Slot(s)));
                            s
                        })
                        .collect();
                    let body = self.expr(&b.body, frame);
                    frame.env.truncate(depth);
                    out.push(Branch { binds, body: body? });
                }
                Expr::Case {
                    scrutinee: Box::new(scrutinee),
                    ty,
                    branches: out,
                }
            }
            DKind::Force(x, body) => {
                let slot = match frame.lookup(x, e.pos)? {
                    Bound::Slot(s) => s,
                    Bound::Fun(_) => {
                        return Err(FrontendError::inst(
                            e.pos,
                            format!("cannot match on function `{x}`"),
                        ))
                    }
                };
                let ty = self.node_type(e, frame)?;
                let fields: Vec<Vec<TypeId>> = self.types[ty]
                    .ctors
                    .iter()
                    .map(|c| c.fields.clone())
                    .collect();
                let mut out = Vec::new();
                for fts in fields {
                    let binds = fts.into_iter().map(|t| frame.local("_", t)).collect();
                    out.push(Branch {
                        binds,
                        body: self.expr(body, frame)?,
                    });
                }
                Expr::Case {
                    scrutinee: Box::new(Expr::Var(slot)),
                    ty,
                    branches: out,
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::frontend::{compile, FrontendOptions};

    const MAP: &str = "data List a = Nil | Cons a (List a)\n\
        map :: (a -> b) -> List a -> List b\n\
        map f xs = case xs of { Nil -> Nil; Cons x r -> Cons (f x) (map f r) }\n\
        not :: Bool -> Bool\nnot x = case x of { False -> True; True -> False }\n\
        id :: a -> a\nid x = x\n";

    #[test]
    fn specialises_map() {
        let src = format!(
            "{MAP}main :: List Bool -> List Bool -> Bool\n\
             main k u = case map not (map id k) of {{ Nil -> True; Cons a b -> a }}\n"
        );
        let p = compile(&src, &FrontendOptions::default()).unwrap();
        let names: Vec<&str> = p.functions.iter().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"map<Bool, Bool>[not]"), "{names:?}");
        assert!(names.contains(&"map<Bool, Bool>[id<Bool>]"), "{names:?}");
        for f in &p.functions {
            if f.name.starts_with("map") {
                assert_eq!(f.n_params, 1);
            }
        }
        assert!(p.type_id("List Bool").is_some());
    }

    #[test]
    fn polymorphic_recursion_is_bounded() {
        let src = "data P a = P a a\n\
            grow :: a -> Bool\ngrow x = grow (P x x)\n\
            main :: Bool -> Bool -> Bool\nmain k u = grow k\n";
        let e = compile(src, &FrontendOptions::default()).unwrap_err();
        assert!(e.to_string().contains("polymorphic recursion"), "{e}");
    }

    #[test]
    fn wildcard_case_becomes_complete() {
        let src = "main :: Bool -> Bool -> Bool\nmain k u = case k of { _ -> u }\n";
        let p = compile(src, &FrontendOptions::default()).unwrap();
        let text = p.to_string();
        assert!(text.contains("case k of"), "{text}");
    }
}
