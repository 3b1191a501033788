//! Allocators: abstract values with fresh flag variables whose decodings
//! cover all values of a type, up to per-type depth bounds for recursive
//! types.
//!
//! A node's definedness rules out the constructors that the bounds leave
//! no room for, so it is false exactly when decoding the node fails.

use std::collections::HashMap;

use thiserror::Error;

use super::codec::{code_of, selector};
use super::store::{AvId, AvStore};
use crate::formula::{Formula, FormulaStore, Node, Var};
use crate::frontend::core::{DataType, TypeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AllocError {
    #[error("type `{0}` is recursive; a complete allocator does not exist")]
    Recursive(String),
    #[error("no depth bound given for recursive type `{0}`")]
    NoBound(String),
    #[error("the bounds leave no value of type `{0}`")]
    Empty(String),
}

/// Depth bounds for recursive types. Bound `d` for `T` permits at most
/// `d + 1` nested `T` nodes along any path, so `N` at bound 2 holds
/// `Z`, `S Z` and `S (S Z)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    pub per_type: HashMap<TypeId, usize>,
    pub default: Option<usize>,
}

impl Bounds {
    pub fn uniform(d: usize) -> Bounds {
        Bounds {
            per_type: HashMap::new(),
            default: Some(d),
        }
    }

    pub fn with(mut self, ty: TypeId, d: usize) -> Bounds {
        self.per_type.insert(ty, d);
        self
    }

    fn get(&self, ty: TypeId) -> Option<usize> {
        self.per_type.get(&ty).copied().or(self.default)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Shape {
    flags: usize,
    children: Vec<Shape>,
    /// Constructors, per type read at this node, that must not be chosen
    /// because their arguments do not fit the bounds.
    excluded: Vec<(TypeId, usize)>,
}

impl Shape {
    fn union(&mut self, other: &Shape) {
        self.flags = self.flags.max(other.flags);
        for e in &other.excluded {
            if !self.excluded.contains(e) {
                self.excluded.push(*e);
            }
        }
        for (i, c) in other.children.iter().enumerate() {
            match self.children.get_mut(i) {
                Some(mine) => mine.union(c),
                None => self.children.push(c.clone()),
            }
        }
    }
}

/// Types that can contain themselves.
pub fn recursive_types(types: &[DataType]) -> Vec<bool> {
    (0..types.len())
        .map(|ty| {
            let mut seen = vec![false; types.len()];
            let mut stack: Vec<TypeId> = fields_of(types, ty).collect();
            while let Some(t) = stack.pop() {
                if t == ty {
                    return true;
                }
                if !std::mem::replace(&mut seen[t], true) {
                    stack.extend(fields_of(types, t));
                }
            }
            false
        })
        .collect()
}

fn fields_of(types: &[DataType], ty: TypeId) -> impl Iterator<Item = TypeId> + '_ {
    types[ty]
        .ctors
        .iter()
        .flat_map(|c| c.fields.iter().copied())
}

struct Shaper<'a> {
    types: &'a [DataType],
    recursive: Vec<bool>,
    bounds: Option<&'a Bounds>,
    used: Vec<usize>,
}

impl Shaper<'_> {
    /// `None` if no constructor of `ty` fits within the remaining bounds.
    fn shape(&mut self, ty: TypeId) -> Result<Option<Shape>, AllocError> {
        let name = || self.types[ty].name.clone();
        if self.recursive[ty] {
            let Some(bounds) = self.bounds else {
                return Err(AllocError::Recursive(name()));
            };
            let limit = bounds.get(ty).ok_or_else(|| AllocError::NoBound(name()))?;
            if self.used[ty] > limit {
                return Ok(None);
            }
        }
        self.used[ty] += 1;
        let result = self.node(ty);
        self.used[ty] -= 1;
        result
    }

    fn node(&mut self, ty: TypeId) -> Result<Option<Shape>, AllocError> {
        let mut shape = Shape {
            flags: code_of(self.types, ty).max_len(),
            children: Vec::new(),
            excluded: Vec::new(),
        };
        let mut feasible = false;
        'ctors: for (k, c) in self.types[ty].ctors.iter().enumerate() {
            let mut fields = Vec::with_capacity(c.fields.len());
            for &ft in &c.fields {
                match self.shape(ft)? {
                    Some(s) => fields.push(s),
                    None => {
                        shape.excluded.push((ty, k));
                        continue 'ctors;
                    }
                }
            }
            feasible = true;
            shape.union(&Shape {
                flags: 0,
                children: fields,
                excluded: Vec::new(),
            });
        }
        Ok(feasible.then_some(shape))
    }
}

fn build(fs: &mut FormulaStore, av: &mut AvStore, types: &[DataType], s: &Shape) -> AvId {
    let flags: Vec<Formula> = (0..s.flags).map(|_| fs.fresh_var()).collect();
    let children = s.children.iter().map(|c| build(fs, av, types, c)).collect();
    let mut conj = Vec::with_capacity(s.excluded.len());
    for &(ty, k) in &s.excluded {
        let sel = selector(fs, &flags, &code_of(types, ty).words[k]);
        conj.push(fs.not(sel));
    }
    let def = fs.and(conj);
    av.mk(flags, children, def)
}

fn allocate(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    types: &[DataType],
    ty: TypeId,
    bounds: Option<&Bounds>,
) -> Result<AvId, AllocError> {
    let mut shaper = Shaper {
        types,
        recursive: recursive_types(types),
        bounds,
        used: vec![0; types.len()],
    };
    let shape = shaper
        .shape(ty)?
        .ok_or_else(|| AllocError::Empty(types[ty].name.clone()))?;
    Ok(build(fs, av, types, &shape))
}

/// Allocator for a non-recursive type; every value has a decoding.
pub fn complete(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    types: &[DataType],
    ty: TypeId,
) -> Result<AvId, AllocError> {
    allocate(fs, av, types, ty, None)
}

/// Allocator unrolling recursive types up to `bounds`.
pub fn bounded(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    types: &[DataType],
    ty: TypeId,
    bounds: &Bounds,
) -> Result<AvId, AllocError> {
    allocate(fs, av, types, ty, Some(bounds))
}

/// For each flag variable of an allocator: the argument path from the root
/// and the flag's position in its node.
pub fn flag_positions(fs: &FormulaStore, av: &AvStore, a: AvId) -> Vec<(Var, Vec<usize>, usize)> {
    let mut out = Vec::new();
    let mut stack = vec![(a, Vec::new())];
    while let Some((x, path)) = stack.pop() {
        for (i, &f) in av.flags(x).iter().enumerate() {
            if let Node::Var(v) = fs.node(f) {
                out.push((*v, path.clone(), i));
            }
        }
        for (j, &c) in av.args(x).iter().enumerate().rev() {
            let mut p = path.clone();
            p.push(j);
            stack.push((c, p));
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Assignment;
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

    fn types() -> Vec<DataType> {
        vec![
            ty("Bool", &[("False", &[]), ("True", &[])]),
            ty("Ordering", &[("LT", &[]), ("EQ", &[]), ("GT", &[])]),
            ty("Either Bool Ordering", &[("Left", &[0]), ("Right", &[1])]),
            ty("N", &[("Z", &[]), ("S", &[3])]),
        ]
    }

    fn shape_of(fs: &FormulaStore, av: &AvStore, a: AvId) -> String {
        av.show(fs, a)
    }

    #[test]
    fn complete_allocator_shapes() {
        let ts = types();
        let expect = [
            (0, "([x1],[])"),
            (1, "([x1,x2],[])"),
            (2, "([x1],[([x2,x3],[])])"),
        ];
        for (t, s) in expect {
            let mut fs = FormulaStore::new();
            let mut av = AvStore::new();
            let a = complete(&mut fs, &mut av, &ts, t).unwrap();
            assert_eq!(shape_of(&fs, &av, a), s);
        }
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        assert_eq!(
            complete(&mut fs, &mut av, &ts, 3),
            Err(AllocError::Recursive("N".into()))
        );
    }

    #[test]
    fn bounded_nat() {
        let ts = types();
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let a = bounded(&mut fs, &mut av, &ts, 3, &Bounds::uniform(2)).unwrap();
        assert_eq!(shape_of(&fs, &av, a), "([x1],[([x2],[([x3],[])])])");
        assert_eq!(av.variables(&fs, a), vec![1, 2, 3]);
        let pos = flag_positions(&fs, &av, a);
        assert_eq!(pos[2], (3, vec![0, 0], 0));
        let a0 = bounded(&mut fs, &mut av, &ts, 3, &Bounds::uniform(0)).unwrap();
        assert_eq!(av.args(a0).len(), 0);
        let sigma = Assignment::from_pairs([(4, true)]);
        let v = super::super::decode(&fs, &av, &ts, a0, 3, &sigma).unwrap();
        assert!(v.is_bottom());
        assert_eq!(
            bounded(&mut fs, &mut av, &ts, 3, &Bounds::default()),
            Err(AllocError::NoBound("N".into()))
        );
    }
}
