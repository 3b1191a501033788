//! Strict interpreter for the core program over concrete values.

use thiserror::Error;

use crate::frontend::core::{Expr, FnId, Program, TypeId};
use crate::value::Value;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConcreteError {
    #[error("evaluation exceeded {0} steps")]
    StepLimit(u64),
}

pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

pub struct Concrete<'p> {
    prog: &'p Program,
    steps: u64,
    limit: u64,
}

impl<'p> Concrete<'p> {
    pub fn new(prog: &'p Program) -> Self {
        Self::with_limit(prog, DEFAULT_STEP_LIMIT)
    }

    pub fn with_limit(prog: &'p Program, limit: u64) -> Self {
        Concrete {
            prog,
            steps: 0,
            limit,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Applies `func`; any undefined argument makes the result undefined.
    pub fn call(&mut self, func: FnId, args: Vec<Value>) -> Result<Value, ConcreteError> {
        if args.iter().any(Value::is_bottom) {
            return Ok(Value::Bottom);
        }
        self.steps += 1;
        if self.steps > self.limit {
            return Err(ConcreteError::StepLimit(self.limit));
        }
        let f = &self.prog.functions[func];
        let mut frame = vec![Value::Bottom; f.locals.len()];
        for (slot, a) in frame.iter_mut().zip(args) {
            *slot = a;
        }
        self.eval(&f.body, &mut frame)
    }

    fn eval(&mut self, e: &Expr, frame: &mut Vec<Value>) -> Result<Value, ConcreteError> {
        match e {
            Expr::Var(s) => Ok(frame[*s].clone()),
            Expr::Con { ty, ctor, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let v = self.eval(a, frame)?;
                    if v.is_bottom() {
                        return Ok(Value::Bottom);
                    }
                    vals.push(v);
                }
                Ok(Value::con(&self.prog.types[*ty].ctors[*ctor].name, vals))
            }
            Expr::Call { func, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, frame)?);
                }
                self.call(*func, vals)
            }
            Expr::Let { slot, bound, body } => {
                let v = self.eval(bound, frame)?;
                if v.is_bottom() {
                    return Ok(Value::Bottom);
                }
                frame[*slot] = v;
                self.eval(body, frame)
            }
            Expr::Case {
                scrutinee,
                ty,
                branches,
            } => {
                let v = self.eval(scrutinee, frame)?;
                let Some(name) = v.constructor() else {
                    return Ok(Value::Bottom);
                };
                let k = self.ctor_index(*ty, name);
                let b = &branches[k];
                for (&slot, a) in b.binds.iter().zip(v.args()) {
                    frame[slot] = a.clone();
                }
                self.eval(&b.body, frame)
            }
        }
    }

    fn ctor_index(&self, ty: TypeId, name: &str) -> usize {
        self.prog.types[ty]
            .ctors
            .iter()
            .position(|c| c.name == name)
            .unwrap_or_else(|| {
                panic!(
                    "`{name}` is not a constructor of `{}`",
                    self.prog.types[ty].name
                )
            })
    }
}

/// Whether `v` is a total, well-typed value of type `ty`.
pub fn check_value(prog: &Program, ty: TypeId, v: &Value) -> Result<(), String> {
    let mut stack = vec![(ty, v)];
    while let Some((ty, v)) = stack.pop() {
        let data = &prog.types[ty];
        let Value::Con(name, args) = v else {
            return Err(format!("undefined value where `{}` is expected", data.name));
        };
        let ctor = data
            .ctors
            .iter()
            .find(|c| *c.name == **name)
            .ok_or_else(|| format!("`{name}` is not a constructor of `{}`", data.name))?;
        if ctor.fields.len() != args.len() {
            return Err(format!(
                "constructor `{name}` expects {} arguments, got {}",
                ctor.fields.len(),
                args.len()
            ));
        }
        stack.extend(ctor.fields.iter().copied().zip(args.iter()));
    }
    Ok(())
}

/// Runs `main param solution` and reports whether it yields `True`.
pub fn check_solution(
    prog: &Program,
    param: &Value,
    solution: &Value,
    step_limit: u64,
) -> Result<bool, ConcreteError> {
    let r = Concrete::with_limit(prog, step_limit)
        .call(prog.main, vec![param.clone(), solution.clone()])?;
    Ok(r.constructor() == Some("True"))
}
