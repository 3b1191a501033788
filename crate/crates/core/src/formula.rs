//! Shared boolean formula DAG.
//!
//! Formulas live in a [`FormulaStore`] arena. Gates are n-ary `And`/`Or`
//! plus `Not`; implication and equivalence are derived. The simplifying
//! constructors fold constants, remove duplicate children and hash-cons
//! gates so that structurally identical formulas share one node.

use std::collections::HashMap;

use thiserror::Error;

/// A propositional variable id (positive, DIMACS numbering).
pub type Var = u32;

/// Handle of a node in a [`FormulaStore`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Formula(u32);

impl Formula {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    True,
    False,
    Var(Var),
    And(Box<[Formula]>),
    Or(Box<[Formula]>),
    Not(Formula),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("assignment does not define variable {0}")]
    MissingVariable(Var),
}

#[derive(Debug)]
pub struct FormulaStore {
    nodes: Vec<Node>,
    intern: HashMap<Node, Formula>,
    vars: HashMap<Var, Formula>,
    next_var: Var,
    sharing: bool,
}

impl Default for FormulaStore {
    fn default() -> Self {
        Self::new()
    }
}

impl FormulaStore {
    pub const TRUE: Formula = Formula(0);
    pub const FALSE: Formula = Formula(1);

    pub fn new() -> Self {
        Self::with_sharing(true)
    }

    /// A store that never reuses gate nodes: every `And`/`Or`/`Not` request
    /// that survives folding creates a new node. Variables and constants are
    /// still unique. Used to measure formula size without structural sharing.
    pub fn without_sharing() -> Self {
        Self::with_sharing(false)
    }

    fn with_sharing(sharing: bool) -> Self {
        FormulaStore {
            nodes: vec![Node::True, Node::False],
            intern: HashMap::new(),
            vars: HashMap::new(),
            next_var: 1,
            sharing,
        }
    }

    pub fn sharing(&self) -> bool {
        self.sharing
    }

    /// Number of nodes, constants included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn node(&self, f: Formula) -> &Node {
        &self.nodes[f.index()]
    }

    /// Highest variable id handed out so far.
    pub fn num_vars(&self) -> Var {
        self.next_var - 1
    }

    /// Reserve a fresh variable id without creating a node for it.
    pub fn fresh_var_id(&mut self) -> Var {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    pub fn fresh_var(&mut self) -> Formula {
        let v = self.fresh_var_id();
        self.var(v)
    }

    /// The node for variable `v`. Ids above the counter bump it so that
    /// later fresh variables never collide.
    pub fn var(&mut self, v: Var) -> Formula {
        assert!(v > 0, "variable ids are positive");
        if v >= self.next_var {
            self.next_var = v + 1;
        }
        if let Some(&f) = self.vars.get(&v) {
            return f;
        }
        let f = self.push(Node::Var(v));
        self.vars.insert(v, f);
        f
    }

    pub fn constant(&self, b: bool) -> Formula {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn is_const_false(&self, f: Formula) -> bool {
        f == Self::FALSE
    }

    pub fn is_const_true(&self, f: Formula) -> bool {
        f == Self::TRUE
    }

    pub fn as_var(&self, f: Formula) -> Option<Var> {
        match self.node(f) {
            Node::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn and<I: IntoIterator<Item = Formula>>(&mut self, xs: I) -> Formula {
        self.gate(xs, true)
    }

    pub fn or<I: IntoIterator<Item = Formula>>(&mut self, xs: I) -> Formula {
        self.gate(xs, false)
    }

    pub fn and2(&mut self, a: Formula, b: Formula) -> Formula {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: Formula, b: Formula) -> Formula {
        self.or([a, b])
    }

    pub fn not(&mut self, x: Formula) -> Formula {
        match self.node(x) {
            Node::True => Self::FALSE,
            Node::False => Self::TRUE,
            Node::Not(inner) => *inner,
            _ => self.intern(Node::Not(x)),
        }
    }

    pub fn implies(&mut self, a: Formula, b: Formula) -> Formula {
        if a == Self::FALSE || b == Self::TRUE || a == b {
            return Self::TRUE;
        }
        if a == Self::TRUE {
            return b;
        }
        let na = self.not(a);
        self.or2(na, b)
    }

    pub fn iff(&mut self, a: Formula, b: Formula) -> Formula {
        if a == b {
            return Self::TRUE;
        }
        match (self.node(a), self.node(b)) {
            (Node::True, _) => return b,
            (_, Node::True) => return a,
            (Node::False, _) => return self.not(b),
            (_, Node::False) => return self.not(a),
            _ => {}
        }
        let ab = self.implies(a, b);
        let ba = self.implies(b, a);
        self.and2(ab, ba)
    }

    fn gate<I: IntoIterator<Item = Formula>>(&mut self, xs: I, conj: bool) -> Formula {
        // `unit` is the identity element, `zero` the absorbing one.
        let (unit, zero) = if conj {
            (Self::TRUE, Self::FALSE)
        } else {
            (Self::FALSE, Self::TRUE)
        };
        let mut children = Vec::new();
        for x in xs {
            if x == zero {
                return zero;
            }
            if x != unit {
                children.push(x);
            }
        }
        children.sort_unstable();
        children.dedup();
        match children.len() {
            0 => unit,
            1 => children[0],
            _ => {
                let children = children.into_boxed_slice();
                self.intern(if conj {
                    Node::And(children)
                } else {
                    Node::Or(children)
                })
            }
        }
    }

    fn intern(&mut self, node: Node) -> Formula {
        if !self.sharing {
            return self.push(node);
        }
        if let Some(&f) = self.intern.get(&node) {
            return f;
        }
        let f = self.push(node.clone());
        self.intern.insert(node, f);
        f
    }

    fn push(&mut self, node: Node) -> Formula {
        let id = u32::try_from(self.nodes.len()).expect("formula store exceeds u32 ids");
        self.nodes.push(node);
        Formula(id)
    }

    /// Variables reachable from `f`, sorted.
    pub fn variables(&self, roots: &[Formula]) -> Vec<Var> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<Formula> = roots.to_vec();
        let mut out = Vec::new();
        while let Some(f) = stack.pop() {
            if std::mem::replace(&mut seen[f.index()], true) {
                continue;
            }
            match self.node(f) {
                Node::Var(v) => out.push(*v),
                Node::And(cs) | Node::Or(cs) => stack.extend(cs.iter().copied()),
                Node::Not(c) => stack.push(*c),
                Node::True | Node::False => {}
            }
        }
        out.sort_unstable();
        out
    }
}

/// Truth values for propositional variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total assignment over `1..=num_vars`, all false.
    pub fn all_false(num_vars: Var) -> Self {
        Assignment {
            values: vec![Some(false); num_vars as usize + 1],
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, bool)>>(pairs: I) -> Self {
        let mut a = Self::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }

    pub fn set(&mut self, v: Var, b: bool) {
        let i = v as usize;
        if self.values.len() <= i {
            self.values.resize(i + 1, None);
        }
        self.values[i] = Some(b);
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values.get(v as usize).copied().flatten()
    }

    pub fn value_of_lit(&self, lit: i32) -> Option<bool> {
        self.get(lit.unsigned_abs()).map(|b| b == (lit > 0))
    }

    /// Highest variable with a value.
    pub fn max_var(&self) -> Var {
        self.values.iter().rposition(Option::is_some).unwrap_or(0) as Var
    }
}

/// Evaluates formulas under one assignment, caching gate values across calls.
pub struct Evaluator<'a> {
    store: &'a FormulaStore,
    sigma: &'a Assignment,
    cache: HashMap<Formula, bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a FormulaStore, sigma: &'a Assignment) -> Self {
        Evaluator {
            store,
            sigma,
            cache: HashMap::new(),
        }
    }

    pub fn eval(&mut self, root: Formula) -> Result<bool, FormulaError> {
        if let Some(&b) = self.cache.get(&root) {
            return Ok(b);
        }
        // Post-order walk; a node is pushed twice, the second visit computes it.
        let mut stack = vec![(root, false)];
        while let Some((f, expanded)) = stack.pop() {
            if self.cache.contains_key(&f) {
                continue;
            }
            let value = match self.store.node(f) {
                Node::True => true,
                Node::False => false,
                Node::Var(v) => self
                    .sigma
                    .get(*v)
                    .ok_or(FormulaError::MissingVariable(*v))?,
                Node::Not(c) => match self.cache.get(c) {
                    Some(&b) => !b,
                    None => {
                        stack.push((f, true));
                        stack.push((*c, false));
                        continue;
                    }
                },
                Node::And(cs) | Node::Or(cs) => {
                    if !expanded {
                        stack.push((f, true));
                        stack.extend(cs.iter().map(|&c| (c, false)));
                        continue;
                    }
                    let conj = matches!(self.store.node(f), Node::And(_));
                    let mut acc = conj;
                    for c in cs.iter() {
                        let b = self.cache[c];
                        if conj {
                            acc &= b;
                        } else {
                            acc |= b;
                        }
                    }
                    acc
                }
            };
            self.cache.insert(f, value);
        }
        Ok(self.cache[&root])
    }
}

pub fn eval_formula(
    store: &FormulaStore,
    x: Formula,
    sigma: &Assignment,
) -> Result<bool, FormulaError> {
    Evaluator::new(store, sigma).eval(x)
}
