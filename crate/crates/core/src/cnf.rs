//! CNF formulas: DIMACS I/O and purely logical observables.

use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A variable (0-based) with a polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// From a signed 1-based DIMACS literal. Panics on 0.
    pub fn from_dimacs(lit: i64) -> Self {
        assert!(lit != 0, "0 is not a literal");
        Literal {
            var: (lit.unsigned_abs() - 1) as usize,
            positive: lit > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    /// +1 for `x`, -1 for `¬x`.
    pub fn polarity(self) -> i8 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    #[inline]
    pub fn is_true(self, a: &[bool]) -> bool {
        a[self.var] == self.positive
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, dropping repeated literals. Returns `None` when empty.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut out: Vec<Literal> = Vec::new();
        for lit in literals {
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        (!out.is_empty()).then_some(Clause { literals: out })
    }

    pub fn from_dimacs(lits: &[i64]) -> Option<Self> {
        Clause::new(lits.iter().map(|&l| Literal::from_dimacs(l)))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Contains both `x` and `¬x` for some variable.
    pub fn is_tautology(&self) -> bool {
        self.literals.iter().any(|l| self.literals.contains(&l.negated()))
    }

    pub fn max_var(&self) -> usize {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }

    #[inline]
    pub fn is_satisfied(&self, a: &[bool]) -> bool {
        self.literals.iter().any(|l| l.is_true(a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    source_name: String,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>, source_name: impl Into<String>) -> Result<Self> {
        for c in &clauses {
            for l in c.literals() {
                if l.var >= num_vars {
                    return Err(Error::IndexOutOfRange {
                        index: l.var,
                        len: num_vars,
                    });
                }
            }
        }
        Ok(Formula {
            num_vars,
            clauses,
            source_name: source_name.into(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn with_source_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        Ok(())
    }
}

/// Truth values for the variables of a formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn all(n: usize, value: bool) -> Self {
        Assignment(vec![value; n])
    }

    /// Bit `i` of `bits` is variable `i`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| (bits >> i) & 1 == 1).collect())
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> bool {
        self.0[var]
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }
}

impl From<Vec<bool>> for Assignment {
    fn from(v: Vec<bool>) -> Self {
        Assignment(v)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Downgrade a header/body clause-count mismatch to a warning.
    pub lenient: bool,
}

pub fn parse_dimacs(text: &str, source_name: &str) -> Result<Formula> {
    parse_dimacs_with(text, source_name, ParseOptions::default())
}

pub fn parse_dimacs_with(text: &str, source_name: &str, opts: ParseOptions) -> Result<Formula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i64> = Vec::new();
    let mut pending_line = 0;

    'lines: for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            // SATLIB footer: `%` followed by a lone `0`
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::MalformedHeader {
                    line: line_no,
                    msg: "duplicate header".into(),
                });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::MissingHeader);
        };
        for tok in line.split_whitespace() {
            if tok.starts_with('%') {
                break 'lines;
            }
            let lit: i64 = tok.parse().map_err(|_| Error::MalformedClause {
                line: line_no,
                msg: format!("invalid literal `{tok}`"),
            })?;
            if lit == 0 {
                if pending.is_empty() {
                    return Err(Error::EmptyClause { line: line_no });
                }
                let before = pending.len();
                let clause = Clause::from_dimacs(&pending).expect("non-empty");
                if clause.len() < before {
                    log::warn!(
                        "{source_name}: line {line_no}: removed {} duplicate literal(s)",
                        before - clause.len()
                    );
                }
                clauses.push(clause);
                pending.clear();
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::LiteralOutOfRange {
                        line: line_no,
                        literal: lit,
                        num_vars,
                    });
                }
                if pending.is_empty() {
                    pending_line = line_no;
                }
                pending.push(lit);
            }
        }
    }

    let Some((num_vars, declared)) = header else {
        return Err(Error::MissingHeader);
    };
    if !pending.is_empty() {
        log::debug!("unterminated clause started at line {pending_line}");
        return Err(Error::UnterminatedClause);
    }
    if clauses.len() != declared {
        if opts.lenient {
            log::warn!(
                "{source_name}: header declares {declared} clauses, read {}",
                clauses.len()
            );
        } else {
            return Err(Error::ClauseCountMismatch {
                declared,
                found: clauses.len(),
            });
        }
    }
    Formula::new(num_vars, clauses, source_name)
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let bad = |msg: &str| Error::MalformedHeader {
        line: line_no,
        msg: msg.to_string(),
    };
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
        return Err(bad("expected `p cnf <vars> <clauses>`"));
    }
    let n = toks[2].parse().map_err(|_| bad("variable count is not a number"))?;
    let m = toks[3].parse().map_err(|_| bad("clause count is not a number"))?;
    Ok((n, m))
}

/// `p cnf n m` followed by one 1-based, `0`-terminated clause per line.
pub fn write_dimacs(f: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        for l in c.literals() {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Number of unsatisfied clauses.
pub fn logical_energy(f: &Formula, a: &Assignment) -> Result<usize> {
    f.check_assignment(a)?;
    Ok(unsat_count(f, a.values()))
}

#[inline]
pub(crate) fn unsat_count(f: &Formula, a: &[bool]) -> usize {
    f.clauses.iter().filter(|c| !c.is_satisfied(a)).count()
}

/// Number of satisfied literals in `c`.
pub fn clause_slack(c: &Clause, a: &Assignment) -> Result<usize> {
    let n = a.len();
    if let Some(l) = c.literals().iter().find(|l| l.var >= n) {
        return Err(Error::IndexOutOfRange { index: l.var, len: n });
    }
    Ok(c.literals().iter().filter(|l| l.is_true(a.values())).count())
}

/// Average of [`clause_slack`] over all clauses.
pub fn mean_slack(f: &Formula, a: &Assignment) -> Result<f64> {
    f.check_assignment(a)?;
    if f.clauses.is_empty() {
        return Err(Error::NoClauses);
    }
    let mut total = 0usize;
    for c in &f.clauses {
        total += clause_slack(c, a)?;
    }
    Ok(total as f64 / f.clauses.len() as f64)
}

/// Clause density m/n.
pub fn clause_ratio(f: &Formula) -> Result<f64> {
    if f.num_vars == 0 {
        return Err(Error::NoVariables);
    }
    Ok(f.clauses.len() as f64 / f.num_vars as f64)
}

/// Uniform random 3-SAT: each clause draws three distinct variables and
/// independent fair polarities from a ChaCha8 stream seeded with `seed`.
pub fn generate_random_3sat(n: usize, m: usize, seed: u64) -> Result<Formula> {
    if n < 3 {
        return Err(Error::TooFewVariables(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = index::sample(&mut rng, n, 3);
            let lits: Vec<Literal> = vars.iter().map(|v| Literal::new(v, rng.random_bool(0.5))).collect();
            Clause::new(lits).expect("three literals")
        })
        .collect();
    Formula::new(n, clauses, format!("rand3sat-n{n}-m{m}-s{seed}"))
}
