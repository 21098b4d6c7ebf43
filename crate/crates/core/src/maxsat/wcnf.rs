//! WCNF text: emission and parsing in two dialects, plus parsing of
//! MaxSAT-Evaluation-style solver output.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use super::{Model, Solution, SolveError, SolveResult, WcnfDialect};
use crate::proplogic::{Clause, Literal, SoftClause, WcnfInstance};

/// Renders the instance.
///
/// Classic: a `p wcnf <vars> <clauses> <top>` header with
/// `top = 1 + Σ soft weights`, hard lines prefixed by the top weight, soft
/// lines by their weight, every line `0`-terminated. Mse22: no header, hard
/// lines prefixed `h`.
pub fn emit_wcnf(inst: &WcnfInstance, dialect: WcnfDialect) -> String {
    let mut out = String::new();
    let write_lits = |out: &mut String, c: &Clause| {
        for l in c.lits() {
            write!(out, " {}", l.to_dimacs()).unwrap();
        }
        out.push_str(" 0\n");
    };
    match dialect {
        WcnfDialect::Classic => {
            let top = inst.top_weight();
            writeln!(
                out,
                "p wcnf {} {} {}",
                inst.num_vars,
                inst.hard.len() + inst.soft.len(),
                top
            )
            .unwrap();
            for c in &inst.hard {
                write!(out, "{top}").unwrap();
                write_lits(&mut out, c);
            }
            for s in &inst.soft {
                write!(out, "{}", s.weight).unwrap();
                write_lits(&mut out, &s.clause);
            }
        }
        WcnfDialect::Mse22 => {
            for c in &inst.hard {
                out.push('h');
                write_lits(&mut out, c);
            }
            for s in &inst.soft {
                write!(out, "{}", s.weight).unwrap();
                write_lits(&mut out, &s.clause);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WcnfParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for WcnfParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wcnf line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for WcnfParseError {}

/// Parses either dialect, detected by the presence of a `p wcnf` header.
/// Comment lines (`c …`) are ignored. The variable count is taken from the
/// header when present, widened to the largest variable seen.
pub fn parse_wcnf(text: &str) -> Result<WcnfInstance, WcnfParseError> {
    let err = |line: usize, message: &str| WcnfParseError {
        line,
        message: message.to_string(),
    };
    let mut top: Option<u64> = None;
    let mut header_vars: u32 = 0;
    let mut max_var: u32 = 0;
    let mut hard: Vec<Clause> = Vec::new();
    let mut soft: Vec<SoftClause> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let mut it = rest.split_whitespace();
            if it.next() != Some("wcnf") {
                return Err(err(line_no, "expected `p wcnf` header"));
            }
            let vars: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(line_no, "bad variable count"))?;
            let _clauses = it.next(); // informative only
            let t: u64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(line_no, "bad top weight"))?;
            header_vars = vars;
            top = Some(t);
            continue;
        }

        let (is_hard, rest) = if let Some(rest) = line.strip_prefix("h ") {
            (true, rest)
        } else {
            let mut it = line.splitn(2, char::is_whitespace);
            let w: u64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err(line_no, "expected weight or `h` prefix"))?;
            let rest = it.next().unwrap_or("");
            match top {
                Some(t) if w >= t => (true, rest),
                _ => {
                    if w == 0 {
                        return Err(err(line_no, "zero weight"));
                    }
                    // Soft; stash the weight via closure below.
                    let lits = parse_lits(rest, line_no, &mut max_var)?;
                    soft.push(SoftClause {
                        clause: Clause::new(lits),
                        weight: w,
                    });
                    continue;
                }
            }
        };
        debug_assert!(is_hard);
        let lits = parse_lits(rest, line_no, &mut max_var)?;
        hard.push(Clause::new(lits));
    }

    Ok(WcnfInstance {
        num_vars: header_vars.max(max_var),
        hard,
        soft,
        names: Default::default(),
    })
}

fn parse_lits(
    rest: &str,
    line_no: usize,
    max_var: &mut u32,
) -> Result<Vec<Literal>, WcnfParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in rest.split_whitespace() {
        if terminated {
            return Err(WcnfParseError {
                line: line_no,
                message: "literals after terminating 0".to_string(),
            });
        }
        let n: i64 = tok.parse().map_err(|_| WcnfParseError {
            line: line_no,
            message: format!("bad literal `{tok}`"),
        })?;
        if n == 0 {
            terminated = true;
            continue;
        }
        let lit = Literal::from_dimacs(n).unwrap();
        *max_var = (*max_var).max(lit.var().number());
        lits.push(lit);
    }
    if !terminated {
        return Err(WcnfParseError {
            line: line_no,
            message: "missing terminating 0".to_string(),
        });
    }
    Ok(lits)
}

/// Interprets solver output following MaxSAT-Evaluation conventions:
/// an `s OPTIMUM FOUND` / `s UNSATISFIABLE` status line, optional `o <cost>`
/// lines, and `v` value lines in either signed-literal or 0/1-string form.
///
/// The assignment is checked against the instance: hard-clause violations are
/// an error, and when the claimed cost disagrees with recomputation the
/// recomputed value is used and the claim kept in
/// [`Solution::reported_cost`].
pub fn parse_external_result(
    text: &str,
    inst: &WcnfInstance,
) -> Result<SolveResult, SolveError> {
    let mut status: Option<&str> = None;
    let mut claimed: Option<u64> = None;
    let mut value_tokens: Vec<&str> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim());
        } else if let Some(rest) = line.strip_prefix("o ") {
            claimed = rest.trim().parse().ok();
        } else if let Some(rest) = line.strip_prefix("v ") {
            value_tokens.extend(rest.split_whitespace());
        } else if line == "v" {
            // empty value line; nothing to record
        }
    }

    match status {
        None => Err(SolveError::MalformedOutput(
            "missing `s` status line".to_string(),
        )),
        Some("UNSATISFIABLE") => Ok(SolveResult::HardUnsat),
        Some("OPTIMUM FOUND") => {
            let values = parse_values(&value_tokens, inst.num_vars)?;
            if !inst.hard_satisfied_by(&values) {
                return Err(SolveError::MalformedOutput(
                    "assignment violates hard clauses".to_string(),
                ));
            }
            let cost = inst.cost_of(&values);
            let reported_cost = claimed.filter(|&c| c != cost);
            Ok(SolveResult::Optimal(Solution {
                model: Model::from_values(values),
                cost,
                reported_cost,
            }))
        }
        Some(other) => Err(SolveError::MalformedOutput(format!(
            "unsupported status `{other}`"
        ))),
    }
}

fn parse_values(tokens: &[&str], num_vars: u32) -> Result<Vec<bool>, SolveError> {
    let mut values = alloc::vec![false; num_vars as usize];
    let bitstring = !tokens.is_empty()
        && tokens.iter().all(|t| t.bytes().all(|b| b == b'0' || b == b'1'))
        && tokens.iter().map(|t| t.len()).sum::<usize>() == num_vars as usize
        && tokens.iter().any(|t| t.len() > 1);
    if bitstring {
        let mut i = 0;
        for t in tokens {
            for b in t.bytes() {
                values[i] = b == b'1';
                i += 1;
            }
        }
        return Ok(values);
    }
    if !tokens.is_empty()
        && tokens.len() == 1
        && tokens[0].bytes().all(|b| b == b'0' || b == b'1')
        && tokens[0].len() > 1
        && tokens[0].len() != num_vars as usize
    {
        return Err(SolveError::MalformedOutput(format!(
            "value string has {} bits for {} variables",
            tokens[0].len(),
            num_vars
        )));
    }
    for t in tokens {
        let n: i64 = t.parse().map_err(|_| {
            SolveError::MalformedOutput(format!("bad value token `{t}`"))
        })?;
        if n == 0 {
            break;
        }
        let var = n.unsigned_abs();
        if var <= u64::from(num_vars) {
            // Variables beyond the instance (solver-internal auxiliaries)
            // are ignored; the assignment is verified afterwards anyway.
            values[(var - 1) as usize] = n > 0;
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proplogic::{VarId, WcnfBuilder};

    fn example_instance() -> WcnfInstance {
        // hard (x1 ∨ ¬x2), soft (x2) with weight 3
        let mut b = WcnfBuilder::new();
        let x1 = b.fresh_var();
        let x2 = b.fresh_var();
        b.add_hard(alloc::vec![Literal::positive(x1), Literal::negative(x2)]);
        b.add_soft(alloc::vec![Literal::positive(x2)], 3);
        b.finish()
    }

    #[test]
    fn classic_emission_is_bit_exact() {
        assert_eq!(
            emit_wcnf(&example_instance(), WcnfDialect::Classic),
            "p wcnf 2 2 4\n4 1 -2 0\n3 2 0\n"
        );
    }

    #[test]
    fn mse22_emission_is_bit_exact() {
        assert_eq!(
            emit_wcnf(&example_instance(), WcnfDialect::Mse22),
            "h 1 -2 0\n3 2 0\n"
        );
    }

    #[test]
    fn round_trip_both_dialects() {
        let inst = example_instance();
        for d in [WcnfDialect::Classic, WcnfDialect::Mse22] {
            let parsed = parse_wcnf(&emit_wcnf(&inst, d)).unwrap();
            assert_eq!(parsed, inst);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_wcnf("p wcnf x y z\n").is_err());
        assert!(parse_wcnf("3 1 two 0\n").is_err());
        assert!(parse_wcnf("3 1 2\n").is_err()); // missing 0
    }

    #[test]
    fn external_output_signed_form() {
        let inst = example_instance();
        let res = parse_external_result("c comment\ns OPTIMUM FOUND\no 3\nv -1 -2 0\n", &inst)
            .unwrap();
        let sol = res.optimal().unwrap();
        assert!(!sol.model.get(VarId::new(1)));
        assert!(!sol.model.get(VarId::new(2)));
        assert_eq!(sol.cost, 3);
        assert_eq!(sol.reported_cost, None);
    }

    #[test]
    fn external_output_bitstring_form() {
        let inst = example_instance();
        let res = parse_external_result("s OPTIMUM FOUND\nv 00\n", &inst).unwrap();
        let sol = res.optimal().unwrap();
        assert!(!sol.model.get(VarId::new(1)));
        assert_eq!(sol.cost, 3);
    }

    #[test]
    fn external_output_cross_checks_cost() {
        let inst = example_instance();
        let res = parse_external_result("s OPTIMUM FOUND\no 7\nv 00\n", &inst).unwrap();
        let sol = res.optimal().unwrap();
        assert_eq!(sol.cost, 3);
        assert_eq!(sol.reported_cost, Some(7));
    }

    #[test]
    fn external_output_errors() {
        let inst = example_instance();
        assert!(matches!(
            parse_external_result("v 1 2 0\n", &inst),
            Err(SolveError::MalformedOutput(_))
        ));
        assert!(matches!(
            parse_external_result("s OPTIMUM FOUND\nv 000\n", &inst),
            Err(SolveError::MalformedOutput(_))
        ));
        // Assignment violating the hard clause (¬x1 ∧ x2).
        assert!(matches!(
            parse_external_result("s OPTIMUM FOUND\nv -1 2 0\n", &inst),
            Err(SolveError::MalformedOutput(_))
        ));
        assert_eq!(
            parse_external_result("s UNSATISFIABLE\n", &inst).unwrap(),
            SolveResult::HardUnsat
        );
    }
}
