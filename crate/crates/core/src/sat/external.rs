//! Running a SAT solver binary on a DIMACS file.

use std::io::Write;
use std::process::Command;

use super::{CnfProblem, SolveResult, SolverError};
use crate::formula::Assignment;

/// Solver command from `CO4_SOLVER`, else `cadical`.
pub fn default_solver_command() -> String {
    std::env::var("CO4_SOLVER").unwrap_or_else(|_| "cadical".to_string())
}

/// Writes `p` to a temporary file and runs `command` on it. The exit status
/// is ignored; the `s` and `v` lines of standard output decide.
pub fn solve_external(p: &CnfProblem, command: &str) -> Result<SolveResult, SolverError> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    super::write_dimacs(p, file.as_file_mut())?;
    file.as_file_mut().flush()?;
    let path = file.path().to_string_lossy().into_owned();

    let mut words: Vec<String> = command.split_whitespace().map(str::to_string).collect();
    if words.is_empty() {
        return Err(SolverError::Malformed {
            reason: "empty solver command".into(),
            output: String::new(),
        });
    }
    if words.iter().any(|w| w.contains("{}")) {
        for w in &mut words {
            *w = w.replace("{}", &path);
        }
    } else {
        words.push(path);
    }
    let output = Command::new(&words[0])
        .args(&words[1..])
        .output()
        .map_err(|source| SolverError::Spawn {
            command: command.to_string(),
            source,
        })?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    parse_solver_output(&stdout, p.num_vars)
}

/// Interprets competition-format solver output.
pub fn parse_solver_output(out: &str, num_vars: u32) -> Result<SolveResult, SolverError> {
    let malformed = |reason: &str| SolverError::Malformed {
        reason: reason.to_string(),
        output: out.chars().take(2000).collect(),
    };
    let mut status = None;
    let mut sigma = Assignment::all_false(num_vars);
    for line in out.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(match s.trim() {
                "SATISFIABLE" => true,
                "UNSATISFIABLE" => false,
                "UNKNOWN" => return Err(SolverError::Unknown),
                _ => return Err(malformed("unknown status line")),
            });
        } else if let Some(lits) = line
            .strip_prefix("v ")
            .or_else(|| (line == "v").then_some(""))
        {
            for tok in lits.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| malformed("bad literal in model"))?;
                if l != 0 {
                    if l.unsigned_abs() > num_vars {
                        return Err(malformed("model mentions an unknown variable"));
                    }
                    sigma.set(l.unsigned_abs(), l > 0);
                }
            }
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(sigma)),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(malformed("no status line")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_models() {
        let r = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 4).unwrap();
        let SolveResult::Sat(s) = r else { panic!() };
        assert_eq!(
            (s.get(1), s.get(2), s.get(3), s.get(4)),
            (Some(true), Some(false), Some(true), Some(false))
        );
        assert_eq!(
            parse_solver_output("s UNSATISFIABLE\n", 2).unwrap(),
            SolveResult::Unsat
        );
        assert!(parse_solver_output("garbage\n", 2).is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv x 0\n", 2).is_err());
    }

    #[test]
    fn missing_binary_is_an_error() {
        let p = CnfProblem::default();
        assert!(matches!(
            solve_external(&p, "/nonexistent/solver-binary"),
            Err(SolverError::Spawn { .. })
        ));
    }
}
