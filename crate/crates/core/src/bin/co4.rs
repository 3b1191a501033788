use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use co4::abstract_eval::EvalOptions;
use co4::concrete::DEFAULT_STEP_LIMIT;
use co4::pipeline::{self, Compiled, Options, PipelineError, Problem};
use co4::sat::{default_solver_command, Solver};

#[derive(Parser)]
#[command(
    name = "co4",
    version,
    about = "Compile constraint programs to SAT and solve them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find an unknown `u` with `main param u = True`.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// `internal`, `exhaustive`, or a solver command (`{}` marks the CNF file).
        /// Defaults to $CO4_SOLVER, else `cadical`.
        #[arg(long)]
        solver: Option<String>,
        /// Also write the CNF (and `<path>.map`) here.
        #[arg(long, value_name = "PATH")]
        emit_cnf: Option<PathBuf>,
        /// Do not re-run the program on the decoded solution.
        #[arg(long)]
        skip_test: bool,
        /// Print compilation statistics.
        #[arg(long)]
        stats: bool,
        /// Write the solution to this file.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Evaluate `main param solution` concretely.
    Check {
        program: PathBuf,
        #[arg(long)]
        param: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: u64,
    },
    /// Write the CNF and the allocator variable map without solving.
    Compile {
        #[command(flatten)]
        problem: ProblemArgs,
        /// CNF output file; `-` for standard output.
        #[arg(long, short, value_name = "PATH", default_value = "-")]
        output: PathBuf,
        /// Variable map output file (defaults to `<output>.map`).
        #[arg(long, value_name = "PATH")]
        var_map: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Program file.
    program: PathBuf,
    /// File holding the parameter value.
    #[arg(long)]
    param: PathBuf,
    /// Allocator description, or a file holding it.
    #[arg(long)]
    alloc: String,
    /// Disable call memoization and formula sharing.
    #[arg(long)]
    no_memo: bool,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem, PipelineError> {
        let alloc_path = Path::new(&self.alloc);
        let alloc = if alloc_path.is_file() {
            read(alloc_path)?
        } else {
            self.alloc.clone()
        };
        Ok(Problem {
            program: read(&self.program)?,
            param: read(&self.param)?,
            alloc,
        })
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            memo: !self.no_memo,
            ..EvalOptions::default()
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| {
        PipelineError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn create(path: &Path) -> Result<Box<dyn Write>, PipelineError> {
    if path == Path::new("-") {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let f = File::create(path).map_err(|e| {
        PipelineError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(Box::new(BufWriter::new(f)))
}

fn emit(c: &Compiled, cnf: &Path, map: &Path) -> Result<(), PipelineError> {
    let mut out = create(cnf)?;
    pipeline::write_cnf(c, &mut out)?;
    out.flush()?;
    let mut out = create(map)?;
    pipeline::write_variable_map(c, &mut out)?;
    out.flush()?;
    Ok(())
}

fn map_path(cnf: &Path) -> PathBuf {
    let mut s = cnf.as_os_str().to_owned();
    s.push(".map");
    PathBuf::from(s)
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    match cli.command {
        Command::Solve {
            problem,
            solver,
            emit_cnf,
            skip_test,
            stats,
            output,
        } => {
            let opts = Options {
                eval: problem.eval_options(),
                solver: Solver::from_name(&solver.unwrap_or_else(default_solver_command)),
                skip_test,
                ..Options::default()
            };
            let c = pipeline::compile_problem(&problem.load()?, &opts)?;
            if let Some(path) = &emit_cnf {
                emit(&c, path, &map_path(path))?;
            }
            if stats {
                eprintln!("{}", c.stats);
            }
            let report = pipeline::solve_compiled(&c, &opts)?;
            print!("{}", report.log());
            if let (Some(path), pipeline::Outcome::Solution { value, .. }) =
                (&output, &report.outcome)
            {
                let mut out = create(path)?;
                writeln!(out, "{value}")?;
                out.flush()?;
            }
            Ok(report.exit_code())
        }
        Command::Check {
            program,
            param,
            solution,
            step_limit,
        } => {
            let ok = pipeline::check(
                &read(&program)?,
                &read(&param)?,
                &read(&solution)?,
                step_limit,
            )?;
            println!("Test: {}", if ok { "True" } else { "False" });
            Ok(if ok { 0 } else { 1 })
        }
        Command::Compile {
            problem,
            output,
            var_map,
            stats,
        } => {
            let opts = Options {
                eval: problem.eval_options(),
                ..Options::default()
            };
            let c = pipeline::compile_problem(&problem.load()?, &opts)?;
            let map = var_map.unwrap_or_else(|| {
                if output == Path::new("-") {
                    PathBuf::from("co4.map")
                } else {
                    map_path(&output)
                }
            });
            emit(&c, &output, &map)?;
            eprintln!(
                "CNF finished (#variables: {}, #clauses: {})",
                c.cnf.num_vars,
                c.cnf.num_clauses()
            );
            if stats {
                eprintln!("{}", c.stats);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match pipeline::with_big_stack(|| run(cli)) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("co4: {e}");
            ExitCode::from(2)
        }
    }
}
