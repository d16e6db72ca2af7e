//! Complete SAT solving, capped model enumeration and backbones.
//!
//! The solver is a plain DPLL: unit propagation, pure-literal elimination,
//! and branching on the lowest-index unassigned variable with `true` tried
//! first. It is deterministic, which makes the enumeration order of
//! [`enumerate_models`] reproducible.

use rayon::prelude::*;

use crate::cnf::{self, Assignment, Clause, Formula, Literal};
use crate::error::{Error, Result};

/// Largest formula accepted by [`brute_force_models`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Default enumeration cap used by the reporting pipeline.
pub const DEFAULT_MODEL_CAP: usize = 120;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSet {
    pub models: Vec<Assignment>,
    /// A model beyond `cap` exists.
    pub truncated: bool,
    pub cap: usize,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackboneReport {
    /// Variables (0-based) with their forced value, ascending by variable.
    pub fixed_vars: Vec<(usize, bool)>,
    pub size: usize,
    pub normalized: f64,
    /// False when computed from a truncated model set.
    pub exact: bool,
}

struct Dpll<'a> {
    clauses: Vec<&'a [Literal]>,
    assign: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Dpll<'a> {
    fn new(num_vars: usize, clauses: Vec<&'a [Literal]>) -> Self {
        Dpll {
            clauses,
            assign: vec![None; num_vars],
            trail: Vec::new(),
        }
    }

    fn set(&mut self, var: usize, value: bool) {
        debug_assert!(self.assign[var].is_none());
        self.assign[var] = Some(value);
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail");
            self.assign[v] = None;
        }
    }

    fn lit_value(&self, l: Literal) -> Option<bool> {
        self.assign[l.var].map(|v| v == l.positive)
    }

    /// Unit propagation to fixpoint. False on a falsified clause.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for ci in 0..self.clauses.len() {
                let clause = self.clauses[ci];
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.lit_value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(l);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        let l = unassigned.expect("one open literal");
                        self.set(l.var, l.positive);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Assigns every pure literal among the not-yet-satisfied clauses.
    fn eliminate_pure(&mut self) -> bool {
        let n = self.assign.len();
        // bit 0: seen positive, bit 1: seen negative
        let mut seen = vec![0u8; n];
        for clause in &self.clauses {
            if clause.iter().any(|&l| self.lit_value(l) == Some(true)) {
                continue;
            }
            for &l in clause.iter() {
                if self.assign[l.var].is_none() {
                    seen[l.var] |= if l.positive { 1 } else { 2 };
                }
            }
        }
        let mut any = false;
        for (v, s) in seen.into_iter().enumerate() {
            match s {
                1 => {
                    self.set(v, true);
                    any = true;
                }
                2 => {
                    self.set(v, false);
                    any = true;
                }
                _ => {}
            }
        }
        any
    }

    fn search(&mut self) -> bool {
        let mark = self.trail.len();
        loop {
            if !self.propagate() {
                self.undo(mark);
                return false;
            }
            if !self.eliminate_pure() {
                break;
            }
        }
        let Some(var) = self.assign.iter().position(Option::is_none) else {
            return true;
        };
        for value in [true, false] {
            let branch = self.trail.len();
            self.set(var, value);
            if self.search() {
                return true;
            }
            self.undo(branch);
        }
        self.undo(mark);
        false
    }

    fn model(&self) -> Assignment {
        // unconstrained variables default to false (none remain after search)
        Assignment::new(self.assign.iter().map(|v| v.unwrap_or(false)).collect())
    }
}

fn solve_clauses(num_vars: usize, clauses: Vec<&[Literal]>) -> Option<Assignment> {
    let mut dpll = Dpll::new(num_vars, clauses);
    dpll.search().then(|| dpll.model())
}

/// A satisfying assignment, or `None` when the formula is unsatisfiable.
pub fn solve(f: &Formula) -> Option<Assignment> {
    solve_clauses(f.num_vars(), f.clauses().iter().map(Clause::literals).collect())
}

fn blocking_clause(model: &Assignment) -> Vec<Literal> {
    model
        .values()
        .iter()
        .enumerate()
        .map(|(v, &val)| Literal::new(v, !val))
        .collect()
}

/// Up to `cap` distinct models, found by re-solving with a blocking clause
/// added after each model.
pub fn enumerate_models(f: &Formula, cap: usize) -> Result<ModelSet> {
    if cap == 0 {
        return Err(Error::InvalidArgument("model cap must be at least 1".into()));
    }
    let mut blocking: Vec<Vec<Literal>> = Vec::new();
    let mut models = Vec::new();
    let mut truncated = false;
    loop {
        let clauses: Vec<&[Literal]> = f
            .clauses()
            .iter()
            .map(Clause::literals)
            .chain(blocking.iter().map(Vec::as_slice))
            .collect();
        let Some(model) = solve_clauses(f.num_vars(), clauses) else {
            break;
        };
        if models.len() == cap {
            truncated = true;
            break;
        }
        blocking.push(blocking_clause(&model));
        models.push(model);
        if f.num_vars() == 0 {
            // the empty assignment cannot be blocked by a non-empty clause
            break;
        }
    }
    Ok(ModelSet { models, truncated, cap })
}

/// Variables taking one value across every model of `ms`.
pub fn backbone(ms: &ModelSet, num_vars: usize) -> Result<BackboneReport> {
    let Some(first) = ms.models.first() else {
        return Err(Error::EmptyModelSet);
    };
    if let Some(bad) = ms.models.iter().find(|m| m.len() != num_vars) {
        return Err(Error::LengthMismatch {
            expected: num_vars,
            got: bad.len(),
        });
    }
    let fixed_vars: Vec<(usize, bool)> = (0..num_vars)
        .filter(|&v| ms.models.iter().all(|m| m.get(v) == first.get(v)))
        .map(|v| (v, first.get(v)))
        .collect();
    let size = fixed_vars.len();
    Ok(BackboneReport {
        fixed_vars,
        size,
        normalized: if num_vars == 0 {
            0.0
        } else {
            size as f64 / num_vars as f64
        },
        exact: !ms.truncated,
    })
}

/// Every model, by scanning all `2^n` assignments with clause bitmasks.
/// Models come out in ascending order of their bit encoding.
pub fn brute_force_models(f: &Formula) -> Result<ModelSet> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables {
            num_vars: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0u32, 0u32), |(p, q), l| {
                if l.positive {
                    (p | 1 << l.var, q)
                } else {
                    (p, q | 1 << l.var)
                }
            })
        })
        .collect();
    let total = 1u64 << n;
    let bits: Vec<u64> = (0..total)
        .into_par_iter()
        .filter(|&b| {
            let b = b as u32;
            masks.iter().all(|&(pos, neg)| b & pos != 0 || !b & neg != 0)
        })
        .collect();
    Ok(ModelSet {
        models: bits.into_iter().map(|b| Assignment::from_bits(b, n)).collect(),
        truncated: false,
        cap: total as usize,
    })
}

/// Draws random 3-SAT formulas from consecutive seeds until a satisfiable
/// one appears, as SATLIB did for its `uf` families. Returns the formula and
/// the seed that produced it.
pub fn random_satisfiable_3sat(n: usize, m: usize, seed: u64, max_tries: usize) -> Result<(Formula, u64)> {
    for k in 0..max_tries as u64 {
        let s = seed.wrapping_add(k);
        let f = cnf::generate_random_3sat(n, m, s)?;
        if solve(&f).is_some() {
            return Ok((f, s));
        }
    }
    Err(Error::InvalidArgument(format!(
        "no satisfiable formula within {max_tries} tries"
    )))
}
