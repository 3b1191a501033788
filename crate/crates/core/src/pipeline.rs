//! The whole run: front end, abstract evaluation of `main` on the encoded
//! parameter and an allocator, CNF, solving, decoding and the concrete
//! re-check.

use std::fmt;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::abstract_eval::{AbstractEval, EvalError, EvalOptions, EvalStats};
use crate::alloc_spec::{AllocSpec, AllocSpecError};
use crate::cnf::CnfBuilder;
use crate::concrete::{check_solution, check_value, ConcreteError, DEFAULT_STEP_LIMIT};
use crate::domain::codec::deep_defined;
use crate::domain::{alloc, decode, encode, AllocError, AvId, AvStore, CodecError};
use crate::formula::{Assignment, FormulaError, FormulaStore};
use crate::frontend::core::Program;
use crate::frontend::{compile_module, parse, FrontendError, FrontendOptions};
use crate::sat::{solve, write_dimacs, CnfProblem, SolveResult, Solver, SolverError};
use crate::value::{Value, ValueSyntaxError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("front end: {0}")]
    Frontend(#[from] FrontendError),
    #[error("parameter: {0}")]
    ParamSyntax(#[from] ValueSyntaxError),
    #[error("parameter: {0}")]
    ParamType(String),
    #[error("solution: {0}")]
    SolutionSyntax(ValueSyntaxError),
    #[error("{0}")]
    AllocSpec(#[from] AllocSpecError),
    #[error("allocator: {0}")]
    Alloc(#[from] AllocError),
    #[error("allocator: the description is for `{given}`, but the unknown has type `{expected}`")]
    AllocType { given: String, expected: String },
    #[error("encoding: {0}")]
    Encode(#[from] CodecError),
    #[error("abstract evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("internal error: the solver's model violates clause {0:?}")]
    BadModel(Vec<i32>),
    #[error("internal error: decoding: {0}")]
    Decode(String),
    #[error("concrete evaluation: {0}")]
    Concrete(#[from] ConcreteError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl From<FormulaError> for PipelineError {
    fn from(e: FormulaError) -> Self {
        PipelineError::Decode(e.to_string())
    }
}

/// Program text, parameter value text and allocator description.
#[derive(Clone, Debug)]
pub struct Problem {
    pub program: String,
    pub param: String,
    pub alloc: String,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub frontend: FrontendOptions,
    pub eval: EvalOptions,
    pub solver: Solver,
    pub skip_test: bool,
    pub step_limit: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            frontend: FrontendOptions::default(),
            eval: EvalOptions::default(),
            solver: Solver::External(crate::sat::default_solver_command()),
            skip_test: false,
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompileStats {
    pub formula_nodes: usize,
    pub abstract_values: usize,
    pub unknown_vars: usize,
    pub eval: EvalStats,
    pub frontend_time: Duration,
    pub eval_time: Duration,
    pub cnf_time: Duration,
}

/// Everything produced before solving.
pub struct Compiled {
    pub program: Program,
    pub param: Value,
    pub fs: FormulaStore,
    pub av: AvStore,
    pub unknown: AvId,
    pub cnf: CnfProblem,
    pub stats: CompileStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `test` is `None` when the re-check was skipped.
    Solution {
        value: Value,
        test: Option<bool>,
    },
    NoSolution,
}

pub struct Report {
    pub outcome: Outcome,
    pub num_vars: u32,
    pub num_clauses: usize,
    pub solve_time: Duration,
    pub stats: CompileStats,
}

impl Report {
    /// 0 solved and verified, 1 no solution, 3 solution failed the test.
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Outcome::Solution {
                test: Some(false), ..
            } => 3,
            Outcome::Solution { .. } => 0,
            Outcome::NoSolution => 1,
        }
    }

    /// Log lines in the style `CNF finished (#variables: .., #clauses: ..)`.
    pub fn log(&self) -> String {
        let mut s = format!(
            "CNF finished (#variables: {}, #clauses: {})\n",
            self.num_vars, self.num_clauses
        );
        let found = matches!(self.outcome, Outcome::Solution { .. });
        s += &format!(
            "Solver finished in {:.6} seconds (result: {})\n",
            self.solve_time.as_secs_f64(),
            py_bool(found)
        );
        match &self.outcome {
            Outcome::Solution { value, test } => {
                s += &format!("Solution: {value}\n");
                if let Some(t) = test {
                    s += &format!("Test: {}\n", py_bool(*t));
                }
            }
            Outcome::NoSolution => s += "No solution\n",
        }
        s
    }
}

impl fmt::Display for CompileStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "front end: {:.3}s", self.frontend_time.as_secs_f64())?;
        writeln!(
            f,
            "abstract evaluation: {:.3}s, {} formula nodes, {} abstract values",
            self.eval_time.as_secs_f64(),
            self.formula_nodes,
            self.abstract_values
        )?;
        writeln!(
            f,
            "calls: {} bodies evaluated, {} memo hits, {} memo misses",
            self.eval.body_evals, self.eval.memo_hits, self.eval.memo_misses
        )?;
        writeln!(f, "unknown: {} variables", self.unknown_vars)?;
        write!(f, "tseitin: {:.3}s", self.cnf_time.as_secs_f64())
    }
}

fn py_bool(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Runs the front end and parses the parameter against `main`'s first
/// parameter type.
pub fn load(
    program: &str,
    param: &str,
    opts: &FrontendOptions,
) -> Result<(Program, Value, crate::frontend::syntax::Module), PipelineError> {
    let module = parse(program)?;
    let prog = compile_module(&module, opts)?;
    let param = Value::parse(param)?;
    let k_ty = prog.main_params().0;
    check_value(&prog, k_ty, &param).map_err(PipelineError::ParamType)?;
    Ok((prog, param, module))
}

/// Stages up to and including the CNF.
pub fn compile_problem(problem: &Problem, opts: &Options) -> Result<Compiled, PipelineError> {
    let t0 = Instant::now();
    let (prog, param, module) = load(&problem.program, &problem.param, &opts.frontend)?;
    let (k_ty, u_ty) = prog.main_params();
    let spec = AllocSpec::parse(&problem.alloc)?;
    let (root, bounds) = spec.resolve(&module, &prog)?;
    if root != u_ty {
        return Err(PipelineError::AllocType {
            given: prog.types[root].name.clone(),
            expected: prog.types[u_ty].name.clone(),
        });
    }
    let frontend_time = t0.elapsed();

    let t1 = Instant::now();
    let mut fs = if opts.eval.memo {
        FormulaStore::new()
    } else {
        FormulaStore::without_sharing()
    };
    let mut av = AvStore::new();
    let k = encode(&mut fs, &mut av, &prog.types, k_ty, &param)?;
    let u = match &bounds {
        None => alloc::complete(&mut fs, &mut av, &prog.types, u_ty)?,
        Some(b) => alloc::bounded(&mut fs, &mut av, &prog.types, u_ty, b)?,
    };
    let unknown_vars = fs.num_vars() as usize;
    let mut ev = AbstractEval::new(&prog, &mut fs, &mut av, opts.eval.clone());
    let result = ev.call(prog.main, vec![k, u])?;
    let eval_stats = ev.stats.clone();
    let truth = av
        .flags(result)
        .first()
        .copied()
        .unwrap_or(FormulaStore::FALSE);
    let defined = av.def(result);
    let total = deep_defined(&mut fs, &av, &prog.types, u, u_ty);
    let constraint = fs.and([truth, defined, total]);
    let eval_time = t1.elapsed();

    let t2 = Instant::now();
    let mut builder = CnfBuilder::new();
    let root_lit = builder.tseitin(&mut fs, constraint);
    let cnf = CnfProblem {
        num_vars: fs.num_vars(),
        clauses: builder.into_clauses(),
        assumptions: vec![root_lit],
    };
    let stats = CompileStats {
        formula_nodes: fs.len(),
        abstract_values: av.len(),
        unknown_vars,
        eval: eval_stats,
        frontend_time,
        eval_time,
        cnf_time: t2.elapsed(),
    };
    Ok(Compiled {
        program: prog,
        param,
        fs,
        av,
        unknown: u,
        cnf,
        stats,
    })
}

/// Solves, decodes the unknown and re-checks it concretely.
pub fn solve_compiled(c: &Compiled, opts: &Options) -> Result<Report, PipelineError> {
    let t = Instant::now();
    let result = solve(&c.cnf, &opts.solver)?;
    let solve_time = t.elapsed();
    let outcome = match result {
        SolveResult::Unsat => Outcome::NoSolution,
        SolveResult::Sat(sigma) => {
            if let Some(clause) = c.cnf.violated_clause(&sigma) {
                return Err(PipelineError::BadModel(clause));
            }
            let value = decode_unknown(c, &sigma)?;
            let test = if opts.skip_test {
                None
            } else {
                Some(check_solution(
                    &c.program,
                    &c.param,
                    &value,
                    opts.step_limit,
                )?)
            };
            Outcome::Solution { value, test }
        }
    };
    Ok(Report {
        outcome,
        num_vars: c.cnf.num_vars,
        num_clauses: c.cnf.num_clauses(),
        solve_time,
        stats: c.stats.clone(),
    })
}

/// The unknown's value under `sigma`; it must be total.
pub fn decode_unknown(c: &Compiled, sigma: &Assignment) -> Result<Value, PipelineError> {
    let u_ty = c.program.main_params().1;
    let value = decode(&c.fs, &c.av, &c.program.types, c.unknown, u_ty, sigma)?;
    check_value(&c.program, u_ty, &value)
        .map_err(|e| PipelineError::Decode(format!("{e} in {value}")))?;
    Ok(value)
}

pub fn run(problem: &Problem, opts: &Options) -> Result<Report, PipelineError> {
    let c = compile_problem(problem, opts)?;
    solve_compiled(&c, opts)
}

/// Concretely evaluates `main param solution`.
pub fn check(
    program: &str,
    param: &str,
    solution: &str,
    step_limit: u64,
) -> Result<bool, PipelineError> {
    let (prog, param, _) = load(program, param, &FrontendOptions::default())?;
    let solution = Value::parse(solution).map_err(PipelineError::SolutionSyntax)?;
    let u_ty = prog.main_params().1;
    check_value(&prog, u_ty, &solution).map_err(PipelineError::Decode)?;
    Ok(check_solution(&prog, &param, &solution, step_limit)?)
}

/// One line per allocator variable: the variable, the argument path from
/// the root of the unknown (`-` for the root) and the flag index there.
pub fn write_variable_map<W: Write>(c: &Compiled, out: &mut W) -> io::Result<()> {
    let mut entries = alloc::flag_positions(&c.fs, &c.av, c.unknown);
    entries.sort();
    for (v, path, i) in entries {
        let path = if path.is_empty() {
            "-".to_string()
        } else {
            path.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(".")
        };
        writeln!(out, "{v} {path} {i}")?;
    }
    Ok(())
}

pub fn write_cnf<W: Write>(c: &Compiled, out: &mut W) -> io::Result<()> {
    write_dimacs(&c.cnf, out)
}

/// Runs `f` on a thread with a large stack; evaluation recurses along the
/// program's call depth.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, f)
            .expect("spawn worker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
