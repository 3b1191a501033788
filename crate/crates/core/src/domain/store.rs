//! Hash-consed arena of abstract values.

use std::collections::HashMap;

use crate::formula::{Formula, FormulaStore, Node, Var};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AvId(u32);

impl AvId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Flags, arguments and definedness of one abstract value.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AvNode {
    pub flags: Box<[Formula]>,
    pub args: Box<[AvId]>,
    pub def: Formula,
}

#[derive(Debug)]
pub struct AvStore {
    nodes: Vec<AvNode>,
    intern: HashMap<AvNode, AvId>,
}

impl Default for AvStore {
    fn default() -> Self {
        Self::new()
    }
}

impl AvStore {
    /// `([], [], false)`.
    pub const BOTTOM: AvId = AvId(0);

    pub fn new() -> Self {
        let mut s = AvStore {
            nodes: Vec::new(),
            intern: HashMap::new(),
        };
        let bottom = AvNode {
            flags: Box::new([]),
            args: Box::new([]),
            def: FormulaStore::FALSE,
        };
        s.nodes.push(bottom.clone());
        s.intern.insert(bottom, Self::BOTTOM);
        s
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Shape in the notation `([x1],[([x2,x3],[])])`; flags that are not
    /// plain variables print as formula nodes.
    pub fn show(&self, fs: &FormulaStore, a: AvId) -> String {
        let flags: Vec<String> = self
            .flags(a)
            .iter()
            .map(|&f| match fs.node(f) {
                Node::Var(v) => format!("x{v}"),
                n => format!("{n:?}"),
            })
            .collect();
        let args: Vec<String> = self.args(a).iter().map(|&c| self.show(fs, c)).collect();
        format!("([{}],[{}])", flags.join(","), args.join(","))
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns a node. Anything with constant-false definedness is the bottom value.
    pub fn mk(&mut self, flags: Vec<Formula>, args: Vec<AvId>, def: Formula) -> AvId {
        if def == FormulaStore::FALSE {
            return Self::BOTTOM;
        }
        let node = AvNode {
            flags: flags.into(),
            args: args.into(),
            def,
        };
        if let Some(&id) = self.intern.get(&node) {
            return id;
        }
        let id =
            AvId(u32::try_from(self.nodes.len()).expect("abstract value store exceeds u32 ids"));
        self.nodes.push(node.clone());
        self.intern.insert(node, id);
        id
    }

    pub fn node(&self, a: AvId) -> &AvNode {
        &self.nodes[a.index()]
    }

    pub fn flags(&self, a: AvId) -> &[Formula] {
        &self.nodes[a.index()].flags
    }

    pub fn args(&self, a: AvId) -> &[AvId] {
        &self.nodes[a.index()].args
    }

    pub fn def(&self, a: AvId) -> Formula {
        self.nodes[a.index()].def
    }

    /// Same flags and arguments, definedness conjoined with `extra`.
    pub fn restrict(&mut self, fs: &mut FormulaStore, a: AvId, extra: Formula) -> AvId {
        if extra == FormulaStore::TRUE {
            return a;
        }
        let n = self.node(a).clone();
        let def = fs.and2(n.def, extra);
        self.mk(n.flags.into_vec(), n.args.into_vec(), def)
    }

    /// Every propositional variable in flags or definedness of the tree under `a`.
    pub fn variables(&self, fs: &FormulaStore, a: AvId) -> Vec<Var> {
        let mut seen = vec![false; self.nodes.len()];
        let mut roots = Vec::new();
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if std::mem::replace(&mut seen[x.index()], true) {
                continue;
            }
            let n = self.node(x);
            roots.extend(n.flags.iter().copied());
            roots.push(n.def);
            stack.extend(n.args.iter().copied());
        }
        fs.variables(&roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_and_bottom() {
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let x = fs.fresh_var();
        let a = av.mk(vec![x], vec![], FormulaStore::TRUE);
        let b = av.mk(vec![x], vec![], FormulaStore::TRUE);
        assert_eq!(a, b);
        assert_eq!(
            av.mk(vec![x], vec![a], FormulaStore::FALSE),
            AvStore::BOTTOM
        );
        assert_eq!(av.variables(&fs, a), vec![1]);
        assert!(av.variables(&fs, AvStore::BOTTOM).is_empty());
    }
}
