//! Multilinear polynomials with exact dyadic coefficients, in either the
//! spin basis (`s ∈ {-1,+1}`, `s² = 1`) or the Boolean basis
//! (`x ∈ {0,1}`, `x² = x`), with exact conversion between the two.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::cnf::Clause;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Sorted, duplicate-free variable indices.
pub type Monomial = Vec<usize>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, Dyadic>,
}

impl Poly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: Dyadic) -> Self {
        let mut p = Poly::new();
        p.add_term(&[], c);
        p
    }

    /// Adds `coef * Π vars`. `vars` need not be sorted but must be distinct.
    pub fn add_term(&mut self, vars: &[usize], coef: Dyadic) {
        if coef.is_zero() {
            return;
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        debug_assert!(key.windows(2).all(|w| w[0] != w[1]), "repeated variable");
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coef);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coef;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_poly(&mut self, other: &Poly, scale: Dyadic) {
        for (m, &c) in &other.terms {
            self.add_term(m, c * scale);
        }
    }

    /// Removes and returns the coefficient of `vars`.
    pub fn take(&mut self, vars: &[usize]) -> Dyadic {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms.remove(&key).unwrap_or(Dyadic::ZERO)
    }

    pub fn coefficient(&self, vars: &[usize]) -> Dyadic {
        let mut key = vars.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or(Dyadic::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Dyadic)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Evaluates in the spin basis.
    pub fn eval_spin(&self, spin: impl Fn(usize) -> i8) -> Dyadic {
        self.terms
            .iter()
            .map(|(m, &c)| {
                let sign: i64 = m.iter().map(|&v| spin(v) as i64).product();
                c * sign
            })
            .sum()
    }

    /// Evaluates in the Boolean basis.
    pub fn eval_bool(&self, value: impl Fn(usize) -> bool) -> Dyadic {
        self.terms
            .iter()
            .filter(|(m, _)| m.iter().all(|&v| value(v)))
            .map(|(_, &c)| c)
            .sum()
    }

    /// Rewrites a spin polynomial over Boolean variables via `s = 2x - 1`.
    pub fn spin_to_bool(&self) -> Poly {
        // Π_{v∈m} (2x_v - 1) = Σ_{S⊆m} 2^|S| (-1)^{|m|-|S|} Π_{v∈S} x_v
        self.expand(|sub_len, full_len| {
            let sign = if (full_len - sub_len) % 2 == 0 { 1 } else { -1 };
            Dyadic::from_int(sign << sub_len)
        })
    }

    /// Rewrites a Boolean polynomial over spins via `x = (1 + s) / 2`.
    pub fn bool_to_spin(&self) -> Poly {
        // Π_{v∈m} (1 + s_v)/2 = 2^-|m| Σ_{S⊆m} Π_{v∈S} s_v
        self.expand(|_, full_len| Dyadic::new(1, full_len as u32))
    }

    fn expand(&self, weight: impl Fn(usize, usize) -> Dyadic) -> Poly {
        let mut out = Poly::new();
        for (m, &c) in &self.terms {
            let k = m.len();
            for mask in 0u32..(1 << k) {
                let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| m[b]).collect();
                out.add_term(&sub, c * weight(sub.len(), k));
            }
        }
        out
    }
}

/// Exact spin-basis expansion of a clause's violation indicator
/// `Π (1 - τ s) / 2`, with one term per subset of the clause's variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClausePolynomial {
    poly: Poly,
}

impl ClausePolynomial {
    pub fn coefficient(&self, vars: &[usize]) -> Dyadic {
        self.poly.coefficient(vars)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Dyadic)> {
        self.poly.terms()
    }

    pub fn as_poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn eval(&self, spin: impl Fn(usize) -> i8) -> Dyadic {
        self.poly.eval_spin(spin)
    }
}

pub fn clause_polynomial(c: &Clause) -> Result<ClausePolynomial> {
    let lits = c.literals();
    let k = lits.len();
    if k > 3 {
        return Err(Error::ClauseTooLong(k));
    }
    for (i, l) in lits.iter().enumerate() {
        if lits[..i].iter().any(|o| o.var == l.var) {
            return Err(Error::RepeatedVariable(l.var));
        }
    }
    let mut poly = Poly::new();
    for mask in 0u32..(1 << k) {
        // choosing -τ s from the factors in `mask`, 1 from the rest
        let mut sign = 1i64;
        let mut vars = Vec::with_capacity(k);
        for (b, l) in lits.iter().enumerate() {
            if mask >> b & 1 == 1 {
                sign *= -(l.polarity() as i64);
                vars.push(l.var);
            }
        }
        poly.add_term(&vars, Dyadic::new(sign as i128, k as u32));
    }
    Ok(ClausePolynomial { poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Literal;

    fn clause(lits: &[i64]) -> Clause {
        Clause::from_dimacs(lits).unwrap()
    }

    #[test]
    fn positive_three_clause_expansion() {
        let p = clause_polynomial(&clause(&[1, 2, 3])).unwrap();
        let eighth = Dyadic::new(1, 3);
        assert_eq!(p.coefficient(&[]), eighth);
        assert_eq!(p.coefficient(&[0]), -eighth);
        assert_eq!(p.coefficient(&[0, 2]), eighth);
        assert_eq!(p.coefficient(&[0, 1, 2]), -eighth);
    }

    #[test]
    fn negative_unit_clause() {
        let p = clause_polynomial(&clause(&[-1])).unwrap();
        assert_eq!(p.coefficient(&[]), Dyadic::new(1, 1));
        assert_eq!(p.coefficient(&[0]), Dyadic::new(1, 1));
    }

    #[test]
    fn polynomial_is_violation_indicator() {
        for k in 1..=3usize {
            for signs in 0u32..(1 << k) {
                let lits: Vec<Literal> = (0..k).map(|v| Literal::new(v, signs >> v & 1 == 1)).collect();
                let c = Clause::new(lits).unwrap();
                let p = clause_polynomial(&c).unwrap();
                for conf in 0u32..(1 << k) {
                    let x = |v: usize| conf >> v & 1 == 1;
                    let violated = (0..k).all(|v| x(v) != (signs >> v & 1 == 1));
                    let e = p.eval(|v| if x(v) { 1 } else { -1 });
                    assert_eq!(e, Dyadic::from_int(violated as i64));
                }
            }
        }
    }

    #[test]
    fn rejects_long_clauses() {
        assert!(matches!(
            clause_polynomial(&clause(&[1, 2, 3, 4])),
            Err(Error::ClauseTooLong(4))
        ));
        assert!(matches!(
            clause_polynomial(&clause(&[1, -1])),
            Err(Error::RepeatedVariable(0))
        ));
    }

    #[test]
    fn basis_conversions_preserve_values() {
        let mut p = Poly::new();
        p.add_term(&[0, 1, 2], Dyadic::new(-3, 3));
        p.add_term(&[1], Dyadic::new(5, 1));
        p.add_term(&[], Dyadic::from_int(2));
        let b = p.spin_to_bool();
        assert_eq!(b.bool_to_spin(), p);
        for conf in 0u32..8 {
            let x = |v: usize| conf >> v & 1 == 1;
            assert_eq!(p.eval_spin(|v| if x(v) { 1 } else { -1 }), b.eval_bool(x));
        }
    }
}
