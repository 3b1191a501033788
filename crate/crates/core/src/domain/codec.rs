//! Constant allocators (`encode`), partial decoding, and definedness
//! conditions that depend on the static type of an abstract value.

use std::collections::HashMap;

use thiserror::Error;

use super::prefix::PrefixCode;
use super::store::{AvId, AvStore};
use crate::formula::{Assignment, Evaluator, Formula, FormulaError, FormulaStore};
use crate::frontend::core::{DataType, TypeId};
use crate::value::Value;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("cannot encode an undefined value")]
    Bottom,
    #[error("`{ctor}` is not a constructor of `{ty}`")]
    UnknownConstructor { ctor: String, ty: String },
    #[error("constructor `{ctor}` expects {expected} arguments, got {got}")]
    Arity {
        ctor: String,
        expected: usize,
        got: usize,
    },
}

pub fn code_of(types: &[DataType], ty: TypeId) -> PrefixCode {
    PrefixCode::new(types[ty].ctors.len()).expect("data types have constructors")
}

/// Formula stating that `flags` start with `word`. False if there are too
/// few flags to hold the word.
pub fn selector(fs: &mut FormulaStore, flags: &[Formula], word: &[bool]) -> Formula {
    if flags.len() < word.len() {
        return FormulaStore::FALSE;
    }
    let lits: Vec<Formula> = flags
        .iter()
        .zip(word)
        .map(|(&f, &b)| if b { f } else { fs.not(f) })
        .collect();
    fs.and(lits)
}

/// Abstract value of a known concrete value.
pub fn encode(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    types: &[DataType],
    ty: TypeId,
    v: &Value,
) -> Result<AvId, CodecError> {
    let Value::Con(name, args) = v else {
        return Err(CodecError::Bottom);
    };
    let data = &types[ty];
    let k = data
        .ctors
        .iter()
        .position(|c| *c.name == **name)
        .ok_or_else(|| CodecError::UnknownConstructor {
            ctor: name.to_string(),
            ty: data.name.clone(),
        })?;
    let ctor = &data.ctors[k];
    if ctor.fields.len() != args.len() {
        return Err(CodecError::Arity {
            ctor: ctor.name.clone(),
            expected: ctor.fields.len(),
            got: args.len(),
        });
    }
    let word = &code_of(types, ty).words[k];
    let flags = word.iter().map(|&b| fs.constant(b)).collect();
    let mut children = Vec::with_capacity(args.len());
    for (a, &ft) in args.iter().zip(&ctor.fields) {
        children.push(encode(fs, av, types, ft, a)?);
    }
    Ok(av.mk(flags, children, FormulaStore::TRUE))
}

/// Concrete value of `a` at type `ty` under `sigma`; `Bottom` where the
/// definedness is false, the flags name no constructor, or arguments are
/// missing. Extra flags and arguments are ignored.
pub fn decode(
    fs: &FormulaStore,
    av: &AvStore,
    types: &[DataType],
    a: AvId,
    ty: TypeId,
    sigma: &Assignment,
) -> Result<Value, FormulaError> {
    enum Task {
        Visit(AvId, TypeId),
        Build(TypeId, usize),
    }
    let mut ev = Evaluator::new(fs, sigma);
    let mut codes: HashMap<TypeId, PrefixCode> = HashMap::new();
    let mut tasks = vec![Task::Visit(a, ty)];
    let mut out: Vec<Value> = Vec::new();
    while let Some(t) = tasks.pop() {
        match t {
            Task::Visit(a, ty) => {
                let node = av.node(a);
                if !ev.eval(node.def)? {
                    out.push(Value::Bottom);
                    continue;
                }
                let mut bits = Vec::with_capacity(node.flags.len());
                for &f in node.flags.iter() {
                    bits.push(ev.eval(f)?);
                }
                let code = codes.entry(ty).or_insert_with(|| code_of(types, ty));
                let Some(k) = code.index_of(&bits) else {
                    out.push(Value::Bottom);
                    continue;
                };
                let fields = &types[ty].ctors[k].fields;
                if node.args.len() < fields.len() {
                    out.push(Value::Bottom);
                    continue;
                }
                tasks.push(Task::Build(ty, k));
                for (&arg, &ft) in node.args.iter().zip(fields).rev() {
                    tasks.push(Task::Visit(arg, ft));
                }
            }
            Task::Build(ty, k) => {
                let ctor = &types[ty].ctors[k];
                let args = out.split_off(out.len() - ctor.fields.len());
                out.push(Value::con(&ctor.name, args));
            }
        }
    }
    Ok(out.pop().expect("decode produces one value"))
}

/// Condition under which `a`, read at type `ty`, names a constructor and has
/// all of its arguments. Together with `def(a)` this makes definedness
/// exact at the top node.
pub fn shape_condition(
    fs: &mut FormulaStore,
    av: &AvStore,
    types: &[DataType],
    code: &PrefixCode,
    a: AvId,
    ty: TypeId,
) -> Formula {
    let flags = av.flags(a).to_vec();
    let n_args = av.args(a).len();
    let mut conj = Vec::new();
    if flags.len() < code.max_len() {
        let sels: Vec<Formula> = code.words.iter().map(|w| selector(fs, &flags, w)).collect();
        conj.push(fs.or(sels));
    }
    for (w, c) in code.words.iter().zip(&types[ty].ctors) {
        if c.fields.len() > n_args {
            let s = selector(fs, &flags, w);
            conj.push(fs.not(s));
        }
    }
    fs.and(conj)
}

/// `a` with its definedness strengthened by [`shape_condition`].
pub fn exact_at(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    types: &[DataType],
    code: &PrefixCode,
    a: AvId,
    ty: TypeId,
) -> AvId {
    let cond = shape_condition(fs, av, types, code, a, ty);
    av.restrict(fs, a, cond)
}

/// Formula that holds iff `a` decodes at `ty` to a value without `Bottom`
/// anywhere inside.
pub fn deep_defined(
    fs: &mut FormulaStore,
    av: &AvStore,
    types: &[DataType],
    a: AvId,
    ty: TypeId,
) -> Formula {
    let mut memo = HashMap::new();
    deep(fs, av, types, a, ty, &mut memo)
}

fn deep(
    fs: &mut FormulaStore,
    av: &AvStore,
    types: &[DataType],
    a: AvId,
    ty: TypeId,
    memo: &mut HashMap<(AvId, TypeId), Formula>,
) -> Formula {
    if let Some(&f) = memo.get(&(a, ty)) {
        return f;
    }
    let code = code_of(types, ty);
    let mut conj = vec![av.def(a), shape_condition(fs, av, types, &code, a, ty)];
    let flags = av.flags(a).to_vec();
    let args = av.args(a).to_vec();
    for (w, c) in code.words.iter().zip(&types[ty].ctors) {
        if c.fields.is_empty() || c.fields.len() > args.len() {
            continue;
        }
        let sel = selector(fs, &flags, w);
        if sel == FormulaStore::FALSE {
            continue;
        }
        let parts: Vec<Formula> = args
            .iter()
            .zip(&c.fields)
            .map(|(&x, &ft)| deep(fs, av, types, x, ft, memo))
            .collect();
        let all = fs.and(parts);
        conj.push(fs.implies(sel, all));
    }
    let f = fs.and(conj);
    memo.insert((a, ty), f);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::core::Ctor;

    fn ty(name: &str, ctors: &[(&str, &[TypeId])]) -> DataType {
        DataType {
            name: name.into(),
            ctors: ctors
                .iter()
                .map(|(n, f)| Ctor {
                    name: n.to_string(),
                    fields: f.to_vec(),
                })
                .collect(),
        }
    }

    /// Bool, Ordering, Either Bool Ordering, N.
    fn types() -> Vec<DataType> {
        vec![
            ty("Bool", &[("False", &[]), ("True", &[])]),
            ty("Ordering", &[("LT", &[]), ("EQ", &[]), ("GT", &[])]),
            ty("Either Bool Ordering", &[("Left", &[0]), ("Right", &[1])]),
            ty("N", &[("Z", &[]), ("S", &[3])]),
        ]
    }

    #[test]
    fn decode_left_true() {
        let ts = types();
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let (x1, x2, x3) = (fs.fresh_var(), fs.fresh_var(), fs.fresh_var());
        let inner = av.mk(vec![x2, x3], vec![], FormulaStore::TRUE);
        let a3 = av.mk(vec![x1], vec![inner], FormulaStore::TRUE);
        let sigma = Assignment::from_pairs([(1, false), (2, true), (3, false)]);
        let v = decode(&fs, &av, &ts, a3, 2, &sigma).unwrap();
        assert_eq!(v.to_string(), "Left True");
    }

    #[test]
    fn extra_flags_and_args_ignored() {
        let ts = types();
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let (x, y) = (fs.fresh_var(), fs.fresh_var());
        let a1 = av.mk(vec![x], vec![], FormulaStore::TRUE);
        let a = av.mk(vec![x, y], vec![a1], FormulaStore::TRUE);
        let sigma = Assignment::from_pairs([(1, true), (2, false)]);
        assert_eq!(
            decode(&fs, &av, &ts, a, 0, &sigma).unwrap(),
            Value::atom("True")
        );
    }

    #[test]
    fn missing_argument_is_bottom() {
        let ts = types();
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let x = fs.fresh_var();
        let a = av.mk(vec![x], vec![], FormulaStore::TRUE);
        let sigma = Assignment::from_pairs([(1, true)]);
        assert_eq!(decode(&fs, &av, &ts, a, 3, &sigma).unwrap(), Value::Bottom);
        let exact = exact_at(&mut fs, &mut av, &ts, &code_of(&ts, 3), a, 3);
        let nx = fs.not(x);
        assert_eq!(av.def(exact), nx);
    }

    #[test]
    fn encode_round_trip() {
        let ts = types();
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        for text in ["Left True", "Right GT", "Right LT", "Left False"] {
            let v = Value::parse(text).unwrap();
            let a = encode(&mut fs, &mut av, &ts, 2, &v).unwrap();
            assert!(av.variables(&fs, a).is_empty());
            let d = decode(&fs, &av, &ts, a, 2, &Assignment::new()).unwrap();
            assert_eq!(d, v);
        }
        let a = encode(&mut fs, &mut av, &ts, 0, &Value::atom("True")).unwrap();
        assert_eq!(av.flags(a), &[FormulaStore::TRUE]);
        assert_eq!(
            encode(&mut fs, &mut av, &ts, 0, &Value::atom("Maybe")),
            Err(CodecError::UnknownConstructor {
                ctor: "Maybe".into(),
                ty: "Bool".into()
            })
        );
        assert_eq!(
            encode(&mut fs, &mut av, &ts, 0, &Value::Bottom),
            Err(CodecError::Bottom)
        );
    }
}
