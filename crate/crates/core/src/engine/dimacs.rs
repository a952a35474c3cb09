// SPDX-License-Identifier: Apache-2.0

//! DIMACS CNF reading and writing.

use thiserror::Error;

use super::cnf::CnfFormula;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
}

pub fn write_dimacs(cnf: &CnfFormula, comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        s.push_str(&format!("c {c}\n"));
    }
    s.push_str(&format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len()));
    for clause in &cnf.clauses {
        for l in clause {
            s.push_str(&l.to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut cnf = CnfFormula::new();
    let mut declared = None;
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let err = |msg: String| DimacsError::Syntax { line: line_no, msg };
        if line.starts_with('p') {
            let f: Vec<&str> = line.split_whitespace().collect();
            if declared.is_some() || f.len() != 4 || f[1] != "cnf" {
                return Err(err("malformed header".into()));
            }
            let vars: u32 = f[2].parse().map_err(|_| err("bad variable count".into()))?;
            let clauses: usize = f[3].parse().map_err(|_| err("bad clause count".into()))?;
            cnf.num_vars = vars;
            declared = Some(clauses);
            continue;
        }
        if declared.is_none() {
            return Err(DimacsError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| err(format!("bad literal `{tok}`")))?;
            if l == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else {
                if l.unsigned_abs() > cnf.num_vars {
                    return Err(err(format!("literal {l} exceeds declared variable count")));
                }
                current.push(l);
            }
        }
    }
    let declared = declared.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    if cnf.clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: cnf.clauses.len() });
    }
    Ok(cnf)
}
