//! Abstract evaluation of the core program: every expression is mapped to
//! an abstract value whose flags, arguments and definedness are formulas
//! over the unknown's variables.

use std::collections::HashMap;

use thiserror::Error;

use crate::domain::codec::selector;
use crate::domain::{AvId, AvStore, PrefixCode};
use crate::formula::{Formula, FormulaStore};
use crate::frontend::core::{Expr, FnId, Program};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula has more than {0} nodes; giving up")]
    NodeLimit(usize),
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    /// Reuse results of calls with identical argument nodes.
    pub memo: bool,
    pub node_limit: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            memo: true,
            node_limit: 100_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub memo_hits: u64,
    pub memo_misses: u64,
    /// Function bodies evaluated.
    pub body_evals: u64,
}

type MergeKey = (Formula, bool, Vec<Formula>, Vec<Option<AvId>>);

pub struct AbstractEval<'a> {
    prog: &'a Program,
    pub fs: &'a mut FormulaStore,
    pub av: &'a mut AvStore,
    codes: Vec<PrefixCode>,
    options: EvalOptions,
    memo: HashMap<(FnId, Vec<AvId>), AvId>,
    merges: HashMap<MergeKey, AvId>,
    pub stats: EvalStats,
}

impl<'a> AbstractEval<'a> {
    pub fn new(
        prog: &'a Program,
        fs: &'a mut FormulaStore,
        av: &'a mut AvStore,
        options: EvalOptions,
    ) -> Self {
        let codes = prog
            .types
            .iter()
            .map(|t| PrefixCode::new(t.ctors.len()).expect("data types have constructors"))
            .collect();
        AbstractEval {
            prog,
            fs,
            av,
            codes,
            options,
            memo: HashMap::new(),
            merges: HashMap::new(),
            stats: EvalStats::default(),
        }
    }

    /// Strict call: undefined arguments make the result undefined.
    pub fn call(&mut self, func: FnId, args: Vec<AvId>) -> Result<AvId, EvalError> {
        if self.fs.len() > self.options.node_limit {
            return Err(EvalError::NodeLimit(self.options.node_limit));
        }
        if args.iter().any(|&a| self.av.def(a) == FormulaStore::FALSE) {
            return Ok(AvStore::BOTTOM);
        }
        let key = (func, args);
        if self.options.memo {
            if let Some(&r) = self.memo.get(&key) {
                self.stats.memo_hits += 1;
                return Ok(r);
            }
            self.stats.memo_misses += 1;
        }
        let (func, args) = key;
        let f = &self.prog.functions[func];
        let mut frame = vec![AvStore::BOTTOM; f.locals.len()];
        frame[..args.len()].copy_from_slice(&args);
        self.stats.body_evals += 1;
        let body = self.eval(&f.body, &mut frame)?;
        let defs: Vec<Formula> = args.iter().map(|&a| self.av.def(a)).collect();
        let arg_def = self.fs.and(defs);
        let result = self.av.restrict(self.fs, body, arg_def);
        if self.options.memo {
            self.memo.insert((func, args), result);
        }
        Ok(result)
    }

    fn eval(&mut self, e: &Expr, frame: &mut Vec<AvId>) -> Result<AvId, EvalError> {
        match e {
            Expr::Var(s) => Ok(frame[*s]),
            Expr::Con { ty, ctor, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, frame)?);
                }
                let flags = self.codes[*ty].words[*ctor]
                    .iter()
                    .map(|&b| self.fs.constant(b))
                    .collect();
                let defs: Vec<Formula> = vals.iter().map(|&a| self.av.def(a)).collect();
                let def = self.fs.and(defs);
                Ok(self.av.mk(flags, vals, def))
            }
            Expr::Call { func, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, frame)?);
                }
                self.call(*func, vals)
            }
            Expr::Let { slot, bound, body } => {
                let a = self.eval(bound, frame)?;
                let d = self.av.def(a);
                if d == FormulaStore::FALSE {
                    return Ok(AvStore::BOTTOM);
                }
                frame[*slot] = a;
                let b = self.eval(body, frame)?;
                Ok(self.av.restrict(self.fs, b, d))
            }
            Expr::Case {
                scrutinee,
                ty,
                branches,
            } => {
                let x = self.eval(scrutinee, frame)?;
                if self.av.def(x) == FormulaStore::FALSE {
                    return Ok(AvStore::BOTTOM);
                }
                let flags = self.av.flags(x).to_vec();
                let args = self.av.args(x).to_vec();
                let mut arms = Vec::with_capacity(branches.len());
                for (k, b) in branches.iter().enumerate() {
                    let word = &self.codes[*ty].words[k];
                    let sel = selector(self.fs, &flags, word);
                    if sel == FormulaStore::FALSE {
                        arms.push((sel, None));
                        continue;
                    }
                    if args.len() < b.binds.len() {
                        arms.push((sel, Some(AvStore::BOTTOM)));
                        continue;
                    }
                    for (&slot, &arg) in b.binds.iter().zip(&args) {
                        frame[slot] = arg;
                    }
                    let v = self.eval(&b.body, frame)?;
                    arms.push((sel, Some(v)));
                }
                let sel_def = self.av.def(x);
                let short = flags.len() < self.codes[*ty].max_len();
                Ok(self.merge(sel_def, short, &arms))
            }
        }
    }

    /// Combines branch values under their selectors. `None` marks a branch
    /// that can never be selected; `short` requests the coverage condition
    /// for discriminants whose flags may name no constructor at all.
    pub fn merge(
        &mut self,
        sel_def: Formula,
        short: bool,
        arms: &[(Formula, Option<AvId>)],
    ) -> AvId {
        let key: MergeKey = (
            sel_def,
            short,
            arms.iter().map(|(s, _)| *s).collect(),
            arms.iter().map(|(_, v)| *v).collect(),
        );
        if self.options.memo {
            if let Some(&r) = self.merges.get(&key) {
                return r;
            }
        }
        let r = self.merge_uncached(sel_def, short, arms);
        if self.options.memo {
            self.merges.insert(key, r);
        }
        r
    }

    fn merge_uncached(
        &mut self,
        sel_def: Formula,
        short: bool,
        arms: &[(Formula, Option<AvId>)],
    ) -> AvId {
        let mut def_parts = vec![sel_def];
        if short {
            let sels: Vec<Formula> = arms.iter().map(|(s, _)| *s).collect();
            def_parts.push(self.fs.or(sels));
        }
        let mut live: Vec<(Formula, AvId)> = Vec::new();
        for &(sel, v) in arms {
            let Some(v) = v else { continue };
            let d = self.av.def(v);
            def_parts.push(self.fs.implies(sel, d));
            if v != AvStore::BOTTOM {
                live.push((sel, v));
            }
        }
        let def = self.fs.and(def_parts);
        if live.is_empty() || def == FormulaStore::FALSE {
            return AvStore::BOTTOM;
        }
        let first = live[0].1;
        if live.len() == 1 || live.iter().all(|&(_, v)| v == first) {
            let n = self.av.node(first).clone();
            return self.av.mk(n.flags.into_vec(), n.args.into_vec(), def);
        }
        let n_flags = live
            .iter()
            .map(|&(_, v)| self.av.flags(v).len())
            .max()
            .unwrap_or(0);
        let mut flags = Vec::with_capacity(n_flags);
        for i in 0..n_flags {
            let pairs: Vec<(Formula, Formula)> = live
                .iter()
                .filter_map(|&(sel, v)| self.av.flags(v).get(i).map(|&f| (sel, f)))
                .collect();
            let parts: Vec<Formula> = pairs
                .into_iter()
                .map(|(sel, f)| self.fs.implies(sel, f))
                .collect();
            flags.push(self.fs.and(parts));
        }
        let n_args = live
            .iter()
            .map(|&(_, v)| self.av.args(v).len())
            .max()
            .unwrap_or(0);
        let mut args = Vec::with_capacity(n_args);
        for j in 0..n_args {
            let sub: Vec<(Formula, Option<AvId>)> = live
                .iter()
                .map(|&(sel, v)| (sel, self.av.args(v).get(j).copied()))
                .collect();
            args.push(self.merge(FormulaStore::TRUE, false, &sub));
        }
        self.av.mk(flags, args, def)
    }
}
