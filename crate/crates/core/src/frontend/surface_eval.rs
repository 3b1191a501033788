//! Direct interpreter for the surface syntax.
//!
//! Matches equations and alternatives top to bottom, patterns left to
//! right, without any of the later compilation stages. It only serves as a
//! reference for checking that those stages preserve meaning.

use std::collections::HashMap;

use super::syntax::{Equation, Expr, ExprKind, Module, Pattern};
use crate::value::Value;

#[derive(Clone, Debug)]
enum SVal {
    Data(Value),
    Fun(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    OutOfFuel,
    NoMatch(String),
    Unbound(String),
    Malformed(String),
}

pub struct SurfaceEval<'m> {
    equations: HashMap<&'m str, Vec<&'m Equation>>,
    fuel: u64,
}

impl<'m> SurfaceEval<'m> {
    pub fn new(module: &'m Module, fuel: u64) -> Self {
        let mut equations: HashMap<&str, Vec<&Equation>> = HashMap::new();
        for eq in &module.equations {
            equations.entry(eq.name.as_str()).or_default().push(eq);
        }
        SurfaceEval { equations, fuel }
    }

    /// Calls a top-level function on data arguments.
    pub fn call(&mut self, name: &str, args: Vec<Value>) -> Result<Value, SurfaceError> {
        let args = args.into_iter().map(SVal::Data).collect();
        match self.apply(name, args)? {
            SVal::Data(v) => Ok(v),
            SVal::Fun(f) => Err(SurfaceError::Malformed(format!("`{f}` is not data"))),
        }
    }

    fn apply(&mut self, name: &str, args: Vec<SVal>) -> Result<SVal, SurfaceError> {
        if self.fuel == 0 {
            return Err(SurfaceError::OutOfFuel);
        }
        self.fuel -= 1;
        let eqs = self
            .equations
            .get(name)
            .cloned()
            .ok_or_else(|| SurfaceError::Unbound(name.to_string()))?;
        for eq in eqs {
            if eq.pats.len() != args.len() {
                return Err(SurfaceError::Malformed(format!("arity of `{name}`")));
            }
            let mut env = Vec::new();
            if eq
                .pats
                .iter()
                .zip(&args)
                .all(|(p, a)| matches(p, a, &mut env))
            {
                return self.eval(&eq.body, &mut env);
            }
        }
        Err(SurfaceError::NoMatch(name.to_string()))
    }

    fn eval(&mut self, e: &Expr, env: &mut Vec<(String, SVal)>) -> Result<SVal, SurfaceError> {
        match &e.kind {
            ExprKind::Var(x) => match lookup(env, x) {
                Some(v) => Ok(v),
                None if self.arity(x) == Some(0) => self.apply(x, Vec::new()),
                None if self.equations.contains_key(x.as_str()) => Ok(SVal::Fun(x.clone())),
                None => Err(SurfaceError::Unbound(x.clone())),
            },
            ExprKind::Con(c) => Ok(SVal::Data(Value::atom(c))),
            ExprKind::App(head, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env)?);
                }
                match &head.kind {
                    ExprKind::Con(c) => {
                        let mut data = Vec::with_capacity(vals.len());
                        for v in vals {
                            match v {
                                SVal::Data(d) => data.push(d),
                                SVal::Fun(f) => {
                                    return Err(SurfaceError::Malformed(format!(
                                        "function `{f}` stored in `{c}`"
                                    )))
                                }
                            }
                        }
                        Ok(SVal::Data(Value::con(c, data)))
                    }
                    ExprKind::Var(x) => {
                        let f = match lookup(env, x) {
                            Some(SVal::Fun(f)) => f,
                            Some(SVal::Data(_)) => {
                                return Err(SurfaceError::Malformed(format!(
                                    "`{x}` is not a function"
                                )))
                            }
                            None => x.clone(),
                        };
                        self.apply(&f, vals)
                    }
                    _ => Err(SurfaceError::Malformed("unsupported application".into())),
                }
            }
            ExprKind::Case(scrut, alts) => {
                let v = self.eval(scrut, env)?;
                for alt in alts {
                    let depth = env.len();
                    if matches(&alt.pat, &v, env) {
                        let r = self.eval(&alt.body, env);
                        env.truncate(depth);
                        return r;
                    }
                    env.truncate(depth);
                }
                Err(SurfaceError::NoMatch("case".into()))
            }
            ExprKind::Let(bindings, body) => {
                let depth = env.len();
                for b in bindings {
                    let v = self.eval(&b.expr, env)?;
                    env.push((b.name.clone(), v));
                }
                let r = self.eval(body, env);
                env.truncate(depth);
                r
            }
        }
    }

    fn arity(&self, name: &str) -> Option<usize> {
        self.equations.get(name).map(|eqs| eqs[0].pats.len())
    }
}

fn lookup(env: &[(String, SVal)], x: &str) -> Option<SVal> {
    env.iter()
        .rev()
        .find(|(n, _)| n == x)
        .map(|(_, v)| v.clone())
}

fn matches(p: &Pattern, v: &SVal, env: &mut Vec<(String, SVal)>) -> bool {
    match p {
        Pattern::Var(x, _) => {
            env.push((x.clone(), v.clone()));
            true
        }
        Pattern::Wild(_) => true,
        Pattern::Con(c, ps, _) => match v {
            SVal::Data(d) if d.constructor() == Some(c.as_str()) => {
                let args = d.args();
                ps.len() == args.len()
                    && ps
                        .iter()
                        .zip(args)
                        .all(|(p, a)| matches(p, &SVal::Data(a.clone()), env))
            }
            _ => false,
        },
    }
}
