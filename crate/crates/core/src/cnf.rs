//! On-the-fly Tseitin transformation of a [`FormulaStore`] DAG.

use crate::formula::{Formula, FormulaStore, Node};

/// A DIMACS literal: `v` or `-v`.
pub type Lit = i32;
pub type Clause = Vec<Lit>;

/// Names formula nodes with literals and accumulates the defining clauses.
///
/// Every node gets at most one literal. Variables name themselves, `Not`
/// nodes reuse the negated literal of their child, gates get a fresh
/// variable from the store's counter.
#[derive(Debug, Default)]
pub struct CnfBuilder {
    clauses: Vec<Clause>,
    cache: Vec<Lit>,
    true_lit: Option<Lit>,
}

impl CnfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    pub fn add_clause(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    /// The literal already assigned to `f`, if any.
    pub fn cached(&self, f: Formula) -> Option<Lit> {
        self.cache.get(f.index()).copied().filter(|&l| l != 0)
    }

    fn true_lit(&mut self, store: &mut FormulaStore) -> Lit {
        if let Some(t) = self.true_lit {
            return t;
        }
        let t = store.fresh_var_id() as Lit;
        self.clauses.push(vec![t]);
        self.true_lit = Some(t);
        t
    }

    fn remember(&mut self, f: Formula, lit: Lit) {
        if self.cache.len() <= f.index() {
            self.cache.resize(f.index() + 1, 0);
        }
        self.cache[f.index()] = lit;
    }

    /// Returns a literal equivalent to `root` under the emitted clauses.
    pub fn tseitin(&mut self, store: &mut FormulaStore, root: Formula) -> Lit {
        let mut stack = vec![(root, false)];
        while let Some((f, expanded)) = stack.pop() {
            if self.cached(f).is_some() {
                continue;
            }
            let lit = match store.node(f) {
                Node::True => self.true_lit(store),
                Node::False => -self.true_lit(store),
                Node::Var(v) => *v as Lit,
                Node::Not(c) => match self.cached(*c) {
                    Some(l) => -l,
                    None => {
                        let c = *c;
                        stack.push((f, true));
                        stack.push((c, false));
                        continue;
                    }
                },
                Node::And(cs) | Node::Or(cs) => {
                    if !expanded {
                        let cs = cs.clone();
                        stack.push((f, true));
                        stack.extend(cs.iter().map(|&c| (c, false)));
                        continue;
                    }
                    let conj = matches!(store.node(f), Node::And(_));
                    let child_lits: Vec<Lit> = cs
                        .iter()
                        .map(|&c| self.cached(c).expect("children named first"))
                        .collect();
                    let n = store.fresh_var_id() as Lit;
                    self.define_gate(n, &child_lits, conj);
                    n
                }
            };
            self.remember(f, lit);
        }
        self.cached(root).expect("root named")
    }

    fn define_gate(&mut self, n: Lit, children: &[Lit], conj: bool) {
        // And: n -> c_i for each i, and (c_1 & .. & c_k) -> n.
        // Or is the dual with every literal negated.
        let s = if conj { 1 } else { -1 };
        for &c in children {
            self.clauses.push(vec![-s * n, s * c]);
        }
        let mut big: Clause = children.iter().map(|&c| -s * c).collect();
        big.push(s * n);
        self.clauses.push(big);
    }
}
