//! Pairwise Ising Hamiltonians compiled from CNF formulas.
//!
//! Each clause contributes its violation indicator `Π (1 - τ s)/2`. A
//! 3-literal clause leaves a cubic monomial, which is reduced to pairwise
//! form with one ancilla spin per clause. The default reduction works in the
//! Boolean basis: with `w` standing in for `x_i x_p`, the cubic Boolean term
//! `d·x_i x_p x_q` becomes `d·w x_q` plus the product penalty
//! `K(x_i x_p - 2 x_i w - 2 x_p w + 3w)`, which vanishes iff `w = x_i ∧ x_p`
//! and is at least `K` otherwise. The result is converted back to spins, so
//! the ancilla spin is `+1` iff both parent spins are `+1`. With `K ≥ |d|`,
//! minimizing over ancillas reproduces the unsatisfied-clause count exactly.
//!
//! [`GadgetMode::PaperLiteral`] keeps the spin-space penalty
//! `K(3 - a s_i - a s_p - s_i s_p)` instead. It is not ground-state exact:
//! it charges `4K` whenever `s_i ≠ s_p` and prefers `a = -1` when
//! `s_i = s_p = -1`.

mod poly;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use poly::{clause_polynomial, ClausePolynomial, Monomial, Poly};
pub use table::{export_csv, import_csv, HamiltonianTables};

use crate::cnf::{Assignment, Formula};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

pub const DEFAULT_K_FACTOR: f64 = 20.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetMode {
    /// Boolean-space product penalty; ground-state exact.
    #[default]
    Corrected,
    /// `K(3 - a s_i - a s_p - s_i s_p)` as literally written.
    PaperLiteral,
}

impl fmt::Display for GadgetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GadgetMode::Corrected => "corrected",
            GadgetMode::PaperLiteral => "paper-literal",
        })
    }
}

impl FromStr for GadgetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(GadgetMode::Corrected),
            "paper-literal" => Ok(GadgetMode::PaperLiteral),
            other => Err(Error::InvalidArgument(format!("unknown gadget mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetRecord {
    pub ancilla_index: usize,
    pub parent_i: usize,
    pub parent_j: usize,
    pub penalty_weight: Dyadic,
}

#[derive(Clone, Debug)]
pub struct Hamiltonian {
    offset: Dyadic,
    fields: Vec<Dyadic>,
    couplings: BTreeMap<(usize, usize), Dyadic>,
    core_count: usize,
    gadgets: Vec<GadgetRecord>,
    ground: Dyadic,
    mode: GadgetMode,
    source: String,
    // f64 mirrors for the annealing loop
    h: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl PartialEq for Hamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset
            && self.fields == other.fields
            && self.couplings == other.couplings
            && self.core_count == other.core_count
            && self.gadgets == other.gadgets
            && self.ground == other.ground
            && self.mode == other.mode
            && self.source == other.source
    }
}

/// Everything needed to assemble a [`Hamiltonian`] by hand.
#[derive(Clone, Debug)]
pub struct HamiltonianParts {
    pub offset: Dyadic,
    pub fields: Vec<Dyadic>,
    pub couplings: Vec<((usize, usize), Dyadic)>,
    pub core_count: usize,
    pub gadgets: Vec<GadgetRecord>,
    pub ground: Dyadic,
    pub mode: GadgetMode,
    pub source: String,
}

impl Hamiltonian {
    /// Validates and assembles. Coupling keys may be given in either order;
    /// repeated pairs are rejected.
    pub fn from_parts(parts: HamiltonianParts) -> Result<Self> {
        let n = parts.fields.len();
        if parts.core_count > n {
            return Err(Error::InvalidTable(format!(
                "core count {} exceeds spin count {n}",
                parts.core_count
            )));
        }
        let mut couplings = BTreeMap::new();
        for ((a, b), j) in parts.couplings {
            if a == b {
                return Err(Error::InvalidTable(format!("self-coupling on spin {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    len: n,
                });
            }
            let key = (a.min(b), a.max(b));
            if couplings.insert(key, j).is_some() {
                return Err(Error::InvalidTable(format!("duplicate coupling {key:?}")));
            }
        }
        for g in &parts.gadgets {
            if g.ancilla_index < parts.core_count || g.ancilla_index >= n {
                return Err(Error::InvalidTable(format!(
                    "ancilla index {} outside [{}, {n})",
                    g.ancilla_index, parts.core_count
                )));
            }
            if g.parent_i >= parts.core_count || g.parent_j >= parts.core_count {
                return Err(Error::InvalidTable("gadget parent is not a core spin".into()));
            }
            if g.penalty_weight <= Dyadic::ZERO {
                return Err(Error::InvalidTable("gadget penalty must be positive".into()));
            }
        }
        let h = parts.fields.iter().map(|d| d.to_f64()).collect();
        let mut neighbors = vec![Vec::new(); n];
        for (&(a, b), j) in &couplings {
            neighbors[a].push((b, j.to_f64()));
            neighbors[b].push((a, j.to_f64()));
        }
        for adj in &mut neighbors {
            adj.sort_by_key(|&(k, _)| k);
        }
        Ok(Hamiltonian {
            offset: parts.offset,
            fields: parts.fields,
            couplings,
            core_count: parts.core_count,
            gadgets: parts.gadgets,
            ground: parts.ground,
            mode: parts.mode,
            source: parts.source,
            h,
            neighbors,
        })
    }

    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    pub fn core_count(&self) -> usize {
        self.core_count
    }

    /// The raw constant term `E₀`.
    pub fn offset(&self) -> Dyadic {
        self.offset
    }

    /// Analytic minimum of the constant parts (clause indicators and gadget
    /// penalties); `H - ground` is zero on a satisfying, gadget-consistent
    /// configuration.
    pub fn ground(&self) -> Dyadic {
        self.ground
    }

    pub fn fields(&self) -> &[Dyadic] {
        &self.fields
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), Dyadic> {
        &self.couplings
    }

    pub fn gadgets(&self) -> &[GadgetRecord] {
        &self.gadgets
    }

    pub fn mode(&self) -> GadgetMode {
        self.mode
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub(crate) fn check_state(&self, s: &SpinState) -> Result<()> {
        if s.len() != self.num_spins() {
            return Err(Error::LengthMismatch {
                expected: self.num_spins(),
                got: s.len(),
            });
        }
        Ok(())
    }

    /// Spin state whose core spins follow `a` and whose ancillas take the
    /// value their gadget penalty is zero at.
    pub fn consistent_state(&self, a: &Assignment) -> Result<SpinState> {
        if a.len() != self.core_count {
            return Err(Error::LengthMismatch {
                expected: self.core_count,
                got: a.len(),
            });
        }
        let mut spins: Vec<i8> = a.values().iter().map(|&b| if b { 1 } else { -1 }).collect();
        spins.resize(self.num_spins(), -1);
        for g in &self.gadgets {
            let (si, sp) = (spins[g.parent_i], spins[g.parent_j]);
            spins[g.ancilla_index] = match self.mode {
                GadgetMode::Corrected => {
                    if si == 1 && sp == 1 {
                        1
                    } else {
                        -1
                    }
                }
                GadgetMode::PaperLiteral => si * sp,
            };
        }
        Ok(SpinState(spins))
    }

    #[inline]
    pub(crate) fn local_field(&self, s: &[i8], i: usize) -> f64 {
        let mut acc = self.h[i];
        for &(j, w) in &self.neighbors[i] {
            acc += w * s[j] as f64;
        }
        acc
    }
}

/// A configuration of ±1 spins over core and ancilla spins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinState(Vec<i8>);

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = spins.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidSpin(bad));
        }
        Ok(SpinState(spins))
    }

    pub fn all(n: usize, value: i8) -> Result<Self> {
        SpinState::new(vec![value; n])
    }

    /// Bit `i` set means spin `i` is `+1`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        SpinState((0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn set(&mut self, i: usize, v: i8) -> Result<()> {
        if v != 1 && v != -1 {
            return Err(Error::InvalidSpin(v));
        }
        self.0[i] = v;
        Ok(())
    }
}

/// `x_i = (1 + s_i)/2` over the first `core_count` spins.
pub fn spins_to_assignment(s: &SpinState, core_count: usize) -> Result<Assignment> {
    if s.len() < core_count {
        return Err(Error::LengthMismatch {
            expected: core_count,
            got: s.len(),
        });
    }
    Ok(Assignment::new(s.0[..core_count].iter().map(|&v| v == 1).collect()))
}

/// Core spins only.
pub fn assignment_to_spins(a: &Assignment) -> SpinState {
    SpinState(a.values().iter().map(|&b| if b { 1 } else { -1 }).collect())
}

/// Compiles `f` with the ground-state-exact gadget.
pub fn compile(f: &Formula, k_factor: f64) -> Result<Hamiltonian> {
    compile_with(f, k_factor, GadgetMode::Corrected)
}

pub fn compile_with(f: &Formula, k_factor: f64, mode: GadgetMode) -> Result<Hamiltonian> {
    let k = Dyadic::from_f64(k_factor)
        .filter(|k| *k > Dyadic::ZERO && k.exponent() <= 60 && k.numerator().abs() < 1 << 62)
        .ok_or(Error::InvalidPenaltyFactor(k_factor))?;
    if mode == GadgetMode::Corrected && k_factor < 8.0 {
        log::warn!("k_factor {k_factor} < 8: the product penalty no longer dominates the cubic term");
    }
    let n = f.num_vars();
    let mut total = Poly::new();
    let mut gadgets = Vec::new();
    let mut ground = Dyadic::ZERO;

    for clause in f.clauses() {
        let mut p = clause_polynomial(clause)?.into_poly();
        if clause.len() == 3 {
            let lits = clause.literals();
            let (i, j, q) = (lits[0].var, lits[1].var, lits[2].var);
            let a = n + gadgets.len();
            let cubic = p.coefficient(&[i, j, q]);
            let weight = k * cubic.abs();
            let penalty = match mode {
                GadgetMode::Corrected => {
                    let mut b = p.spin_to_bool();
                    let d = b.take(&[i, j, q]);
                    b.add_term(&[a, q], d);
                    let mut pen = Poly::new();
                    pen.add_term(&[i, j], weight);
                    pen.add_term(&[i, a], weight * -2);
                    pen.add_term(&[j, a], weight * -2);
                    pen.add_term(&[a], weight * 3);
                    b.add_poly(&pen, Dyadic::ONE);
                    p = b.bool_to_spin();
                    pen.bool_to_spin()
                }
                GadgetMode::PaperLiteral => {
                    let c = p.take(&[i, j, q]);
                    p.add_term(&[a, q], c);
                    let mut pen = Poly::new();
                    pen.add_term(&[], weight * 3);
                    pen.add_term(&[a, i], -weight);
                    pen.add_term(&[a, j], -weight);
                    pen.add_term(&[i, j], -weight);
                    p.add_poly(&pen, Dyadic::ONE);
                    pen
                }
            };
            ground += min_over_spins(&penalty, &[i, j, a]);
            gadgets.push(GadgetRecord {
                ancilla_index: a,
                parent_i: i,
                parent_j: j,
                penalty_weight: weight,
            });
        }
        // every clause indicator has minimum 0
        total.add_poly(&p, Dyadic::ONE);
    }

    let num_spins = n + gadgets.len();
    let mut offset = Dyadic::ZERO;
    let mut fields = vec![Dyadic::ZERO; num_spins];
    let mut couplings = Vec::new();
    for (m, c) in total.terms() {
        match m.as_slice() {
            [] => offset = c,
            [i] => fields[*i] = c,
            [i, j] => couplings.push(((*i, *j), c)),
            _ => unreachable!("degree > 2 after gadget reduction"),
        }
    }
    Hamiltonian::from_parts(HamiltonianParts {
        offset,
        fields,
        couplings,
        core_count: n,
        gadgets,
        ground,
        mode,
        source: f.source_name().to_string(),
    })
}

fn min_over_spins(p: &Poly, vars: &[usize]) -> Dyadic {
    (0u32..1 << vars.len())
        .map(|bits| {
            p.eval_spin(|v| {
                let pos = vars.iter().position(|&u| u == v).expect("penalty variable");
                if bits >> pos & 1 == 1 {
                    1
                } else {
                    -1
                }
            })
        })
        .min()
        .expect("non-empty")
}

/// `E₀ + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`, summed in index order.
pub fn hamiltonian_energy(h: &Hamiltonian, s: &SpinState) -> Result<f64> {
    h.check_state(s)?;
    let mut e = h.offset.to_f64();
    for (hi, &si) in h.h.iter().zip(&s.0) {
        e += hi * si as f64;
    }
    for (&(i, j), w) in &h.couplings {
        e += w.to_f64() * (s.0[i] * s.0[j]) as f64;
    }
    Ok(e)
}

/// Exact energy.
pub fn hamiltonian_energy_exact(h: &Hamiltonian, s: &SpinState) -> Result<Dyadic> {
    h.check_state(s)?;
    let linear: Dyadic = h.fields.iter().zip(&s.0).map(|(&f, &v)| f * v as i64).sum();
    let pair: Dyadic = h
        .couplings
        .iter()
        .map(|(&(i, j), &w)| w * (s.0[i] * s.0[j]) as i64)
        .sum();
    Ok(h.offset + linear + pair)
}

/// `H(s with s_i flipped) - H(s) = -2 s_i (h_i + Σ_j J_ij s_j)`.
pub fn delta_energy(h: &Hamiltonian, s: &SpinState, i: usize) -> Result<f64> {
    h.check_state(s)?;
    if i >= s.len() {
        return Err(Error::IndexOutOfRange { index: i, len: s.len() });
    }
    Ok(delta_unchecked(h, s.spins(), i))
}

#[inline]
pub(crate) fn delta_unchecked(h: &Hamiltonian, s: &[i8], i: usize) -> f64 {
    -2.0 * s[i] as f64 * h.local_field(s, i)
}

/// Mean of the first `core_count` spins.
pub fn magnetization(s: &SpinState, core_count: usize) -> Result<f64> {
    if core_count == 0 {
        return Err(Error::NoVariables);
    }
    if core_count > s.len() {
        return Err(Error::LengthMismatch {
            expected: core_count,
            got: s.len(),
        });
    }
    Ok(core_magnetization(s.spins(), core_count))
}

#[inline]
pub(crate) fn core_magnetization(s: &[i8], core_count: usize) -> f64 {
    let sum: i64 = s[..core_count].iter().map(|&v| v as i64).sum();
    sum as f64 / core_count as f64
}
