//! Built-in solvers for small problems: exhaustive enumeration, and a
//! backtracking search with unit propagation over watched literals.

use super::{CnfProblem, SolveResult, SolverError};
use crate::cnf::Lit;
use crate::formula::{Assignment, Var};

pub const DEFAULT_EXHAUSTIVE_LIMIT: Var = 24;

/// Tries all assignments in order; the first model found is returned.
pub fn solve_exhaustive(p: &CnfProblem, limit: Var) -> Result<SolveResult, SolverError> {
    if p.num_vars > limit {
        return Err(SolverError::TooManyVariables {
            vars: p.num_vars,
            limit,
        });
    }
    let clauses: Vec<Vec<Lit>> = p.all_clauses().map(|c| c.into_owned()).collect();
    let n = p.num_vars;
    for bits in 0u64..(1u64 << n) {
        let holds = |l: Lit| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0);
        if clauses.iter().all(|c| c.iter().any(|&l| holds(l))) {
            let sigma = Assignment::from_pairs((1..=n).map(|v| (v, bits >> (v - 1) & 1 == 1)));
            return Ok(SolveResult::Sat(sigma));
        }
    }
    Ok(SolveResult::Unsat)
}

fn code(l: Lit) -> usize {
    2 * l.unsigned_abs() as usize + usize::from(l < 0)
}

struct Dpll {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    /// Trail length before each decision, the decision, and whether it is
    /// already the flipped second try.
    decisions: Vec<(usize, Lit, bool)>,
    qhead: usize,
    next_var: usize,
}

impl Dpll {
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// False on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = -self.trail[self.qhead];
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[code(falsified)]);
            let mut i = 0;
            let mut ok = true;
            while i < ws.len() {
                let ci = ws[i];
                if self.clauses[ci][0] == falsified {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.lit_value(first) == 1 {
                    i += 1;
                    continue;
                }
                let replacement = (2..self.clauses[ci].len())
                    .find(|&k| self.lit_value(self.clauses[ci][k]) != -1);
                if let Some(k) = replacement {
                    self.clauses[ci].swap(1, k);
                    let w = self.clauses[ci][1];
                    self.watches[code(w)].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                if self.lit_value(first) == -1 {
                    ok = false;
                    break;
                }
                self.assign(first);
                i += 1;
            }
            let rest = std::mem::take(&mut self.watches[code(falsified)]);
            ws.extend(rest);
            self.watches[code(falsified)] = ws;
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().expect("nonempty trail");
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.qhead = len;
        self.next_var = 1;
    }

    /// Backtracks to the most recent decision not yet flipped and flips it.
    fn backtrack(&mut self) -> bool {
        while let Some((len, lit, flipped)) = self.decisions.pop() {
            self.undo_to(len);
            if !flipped {
                self.decisions.push((len, -lit, true));
                self.assign(-lit);
                return true;
            }
        }
        false
    }
}

/// Complete backtracking search; returns a model or proves unsatisfiability.
pub fn solve_dpll(p: &CnfProblem) -> SolveResult {
    let n = p.num_vars as usize;
    let mut s = Dpll {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * n + 2],
        value: vec![0; n + 1],
        trail: Vec::new(),
        decisions: Vec::new(),
        qhead: 0,
        next_var: 1,
    };
    let mut units = Vec::new();
    for c in p.all_clauses() {
        let mut c = c.into_owned();
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|&l| c.contains(&-l)) {
            continue;
        }
        match c.len() {
            0 => return SolveResult::Unsat,
            1 => units.push(c[0]),
            _ => {
                let ci = s.clauses.len();
                s.watches[code(c[0])].push(ci);
                s.watches[code(c[1])].push(ci);
                s.clauses.push(c);
            }
        }
    }
    for u in units {
        match s.lit_value(u) {
            1 => {}
            -1 => return SolveResult::Unsat,
            _ => s.assign(u),
        }
    }
    loop {
        if !s.propagate() {
            if !s.backtrack() {
                return SolveResult::Unsat;
            }
            continue;
        }
        while s.next_var <= n && s.value[s.next_var] != 0 {
            s.next_var += 1;
        }
        if s.next_var > n {
            let sigma = Assignment::from_pairs((1..=n).map(|v| (v as Var, s.value[v] == 1)));
            return SolveResult::Sat(sigma);
        }
        let l = -(s.next_var as Lit);
        s.decisions.push((s.trail.len(), l, false));
        s.assign(l);
    }
}
