//! CNF problems and the ways to solve them.

pub mod dimacs;
pub mod external;
pub mod internal;

use thiserror::Error;

use crate::cnf::{Clause, Lit};
use crate::formula::{Assignment, Var};

pub use dimacs::{parse_dimacs, write_dimacs};
pub use external::{default_solver_command, solve_external};
pub use internal::{solve_dpll, solve_exhaustive, DEFAULT_EXHAUSTIVE_LIMIT};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfProblem {
    pub num_vars: Var,
    pub clauses: Vec<Clause>,
    /// Literals asserted true; written out as unit clauses.
    pub assumptions: Vec<Lit>,
}

impl CnfProblem {
    pub fn num_clauses(&self) -> usize {
        self.clauses.len() + self.assumptions.len()
    }

    /// Clauses followed by the assumptions as unit clauses.
    pub fn all_clauses(&self) -> impl Iterator<Item = std::borrow::Cow<'_, [Lit]>> {
        self.clauses
            .iter()
            .map(|c| std::borrow::Cow::Borrowed(c.as_slice()))
            .chain(
                self.assumptions
                    .iter()
                    .map(|&l| std::borrow::Cow::Owned(vec![l])),
            )
    }

    /// The first clause not satisfied by `sigma`, if any. Unassigned
    /// variables count as false.
    pub fn violated_clause(&self, sigma: &Assignment) -> Option<Clause> {
        self.all_clauses()
            .find(|c| !c.iter().any(|&l| sigma.value_of_lit(l).unwrap_or(l < 0)))
            .map(|c| c.into_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot run solver `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver output not understood: {reason}\n{output}")]
    Malformed { reason: String, output: String },
    #[error("solver gave up (s UNKNOWN)")]
    Unknown,
    #[error("{vars} variables exceed the exhaustive search limit of {limit}")]
    TooManyVariables { vars: Var, limit: Var },
}

/// Which solver `solve` uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Command template run on a DIMACS file; `{}` marks the file name,
    /// otherwise it is appended.
    External(String),
    Dpll,
    Exhaustive(Var),
}

impl Solver {
    /// `internal`, `exhaustive` or an external command template.
    pub fn from_name(name: &str) -> Solver {
        match name {
            "internal" | "dpll" => Solver::Dpll,
            "exhaustive" => Solver::Exhaustive(DEFAULT_EXHAUSTIVE_LIMIT),
            cmd => Solver::External(cmd.to_string()),
        }
    }
}

pub fn solve(p: &CnfProblem, solver: &Solver) -> Result<SolveResult, SolverError> {
    match solver {
        Solver::External(cmd) => solve_external(p, cmd),
        Solver::Dpll => Ok(solve_dpll(p)),
        Solver::Exhaustive(limit) => solve_exhaustive(p, *limit),
    }
}
