//! DIMACS CNF text.

use std::io::{self, Write};

use super::CnfProblem;

pub fn write_dimacs<W: Write>(p: &CnfProblem, out: &mut W) -> io::Result<()> {
    let mut w = io::BufWriter::new(out);
    writeln!(w, "p cnf {} {}", p.num_vars, p.num_clauses())?;
    let mut line = String::new();
    for c in p.all_clauses() {
        line.clear();
        for l in c.iter() {
            line.push_str(&l.to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn to_dimacs_string(p: &CnfProblem) -> String {
    let mut buf = Vec::new();
    write_dimacs(p, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a DIMACS problem; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<CnfProblem, String> {
    let mut header: Option<(u32, usize)> = None;
    let mut p = CnfProblem::default();
    let mut current = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v
                        .parse()
                        .map_err(|_| format!("line {}: bad variable count", no + 1))?;
                    let c = c
                        .parse()
                        .map_err(|_| format!("line {}: bad clause count", no + 1))?;
                    header = Some((v, c));
                }
                _ => return Err(format!("line {}: bad header", no + 1)),
            }
            continue;
        }
        if header.is_none() {
            return Err(format!("line {}: clause before header", no + 1));
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| format!("line {}: bad literal `{tok}`", no + 1))?;
            if l == 0 {
                p.clauses.push(std::mem::take(&mut current));
            } else {
                current.push(l);
            }
        }
    }
    let (v, c) = header.ok_or("missing header")?;
    if !current.is_empty() {
        return Err("last clause is not terminated".into());
    }
    if p.clauses.len() != c {
        return Err(format!(
            "header announces {c} clauses, found {}",
            p.clauses.len()
        ));
    }
    p.num_vars = v;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_examples() {
        let p = CnfProblem {
            num_vars: 1,
            clauses: vec![vec![1]],
            assumptions: vec![],
        };
        assert_eq!(to_dimacs_string(&p), "p cnf 1 1\n1 0\n");
        let p = CnfProblem {
            num_vars: 2,
            clauses: vec![vec![], vec![-2, 1]],
            assumptions: vec![2],
        };
        assert_eq!(to_dimacs_string(&p), "p cnf 2 3\n0\n-2 1 0\n2 0\n");
    }

    #[test]
    fn parse_round_trip() {
        let p = CnfProblem {
            num_vars: 3,
            clauses: vec![vec![1, -3], vec![], vec![2]],
            assumptions: vec![],
        };
        assert_eq!(parse_dimacs(&to_dimacs_string(&p)).unwrap(), p);
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
    }
}
