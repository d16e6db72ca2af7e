//! Seeded Metropolis simulated annealing with exponential cooling.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, which is
//! portable and stable across platforms. Batch seeds derived from a base
//! seed use ChaCha stream `i` of the base key (see [`derive_seed`]).

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{self, Formula};
use crate::error::{Error, Result};
use crate::ising::{self, Hamiltonian, SpinState};
use crate::numfmt::g17;

pub const DEFAULT_T0: f64 = 2.5;
pub const DEFAULT_ALPHA: f64 = 0.999;
pub const DEFAULT_STEPS: usize = 6000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlipMode {
    /// One flip attempt per step.
    #[default]
    Single,
    /// One attempt per spin per step.
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub alpha: f64,
    pub steps: usize,
    #[serde(default)]
    pub flips: FlipMode,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t0: DEFAULT_T0,
            alpha: DEFAULT_ALPHA,
            steps: DEFAULT_STEPS,
            flips: FlipMode::Single,
        }
    }
}

impl Schedule {
    pub fn new(t0: f64, alpha: f64, steps: usize) -> Result<Self> {
        let s = Schedule {
            t0,
            alpha,
            steps,
            flips: FlipMode::Single,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_flips(mut self, flips: FlipMode) -> Self {
        self.flips = flips;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidSchedule(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `t0 · alpha^t`.
    pub fn temperature(&self, t: usize) -> f64 {
        self.t0 * self.alpha.powf(t as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub temperature: f64,
    /// `H(s) - ground`.
    pub energy_h: f64,
    /// Unsatisfied clauses under the core spins.
    pub energy_logic: usize,
    pub magnetization: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub instance: String,
    pub seed: u64,
    pub schedule: Schedule,
    pub points: Vec<TrajectoryPoint>,
    pub final_state: SpinState,
}

impl Trajectory {
    pub fn energies_h(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy_h).collect()
    }

    pub fn energies_logic(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy_logic as f64).collect()
    }

    pub fn abs_magnetizations(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.magnetization.abs()).collect()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.temperature).collect()
    }

    /// `traj_<instance>_<seed>.csv`
    pub fn file_name(&self) -> String {
        format!("traj_{}_{}.csv", self.instance, self.seed)
    }

    /// Columns `step,temperature,energy_h,energy_logic,magnetization`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 64);
        out.push_str("step,temperature,energy_h,energy_logic,magnetization\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.step,
                g17(p.temperature),
                g17(p.energy_h),
                p.energy_logic,
                g17(p.magnetization)
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub index: usize,
    pub accepted: bool,
    pub delta: f64,
}

/// Proposes flipping one uniformly chosen spin (ancillas included) and
/// accepts with probability `min(1, exp(-ΔE/T))`.
pub fn metropolis_step<R: Rng + ?Sized>(
    h: &Hamiltonian,
    s: &mut SpinState,
    temperature: f64,
    rng: &mut R,
) -> Result<StepOutcome> {
    h.check_state(s)?;
    if s.is_empty() {
        return Err(Error::InvalidArgument("no spins to flip".into()));
    }
    Ok(step_unchecked(h, s, temperature, rng))
}

#[inline]
fn step_unchecked<R: Rng + ?Sized>(h: &Hamiltonian, s: &mut SpinState, temperature: f64, rng: &mut R) -> StepOutcome {
    let index = rng.random_range(0..s.len());
    let delta = ising::delta_unchecked(h, s.spins(), index);
    let accepted = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
    if accepted {
        s.flip(index);
    }
    StepOutcome { index, accepted, delta }
}

/// Runs one annealing chain from a uniformly random start.
pub fn anneal(h: &Hamiltonian, f: &Formula, sched: &Schedule, seed: u64) -> Result<Trajectory> {
    sched.validate()?;
    if h.core_count() != f.num_vars() {
        return Err(Error::HamiltonianMismatch {
            core: h.core_count(),
            num_vars: f.num_vars(),
        });
    }
    let n = h.num_spins();
    let nc = h.core_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SpinState::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())?;
    let mut core: Vec<bool> = s.spins()[..nc].iter().map(|&v| v == 1).collect();
    let ground = h.ground().to_f64();
    let mut energy = ising::hamiltonian_energy(h, &s)? - ground;

    let record = |t: usize, temp: f64, e: f64, s: &SpinState, core: &[bool]| TrajectoryPoint {
        step: t,
        temperature: temp,
        energy_h: e,
        energy_logic: cnf::unsat_count(f, core),
        magnetization: if nc == 0 {
            0.0
        } else {
            ising::core_magnetization(s.spins(), nc)
        },
    };

    let mut points = Vec::with_capacity(sched.steps + 1);
    points.push(record(0, sched.t0, energy, &s, &core));
    let attempts = match sched.flips {
        FlipMode::Single => 1,
        FlipMode::Sweep => n,
    };
    for t in 1..=sched.steps {
        let temp = sched.temperature(t);
        if n > 0 {
            for _ in 0..attempts {
                let out = step_unchecked(h, &mut s, temp, &mut rng);
                if out.accepted {
                    energy += out.delta;
                    if out.index < nc {
                        core[out.index] = !core[out.index];
                    }
                }
            }
        }
        points.push(record(t, temp, energy, &s, &core));
    }
    Ok(Trajectory {
        instance: f.source_name().to_string(),
        seed,
        schedule: *sched,
        points,
        final_state: s,
    })
}

/// Seed for member `index` of a batch: the first word of ChaCha stream
/// `index` keyed by `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

/// Anneals every instance with its own seed. Output order follows input
/// order; serial and parallel execution give identical results.
pub fn batch_anneal(
    instances: &[(&Hamiltonian, &Formula)],
    sched: &Schedule,
    seeds: &[u64],
    parallel: bool,
) -> Result<Vec<Trajectory>> {
    if seeds.len() != instances.len() {
        return Err(Error::LengthMismatch {
            expected: instances.len(),
            got: seeds.len(),
        });
    }
    let run = |(&(h, f), &seed): (&(&Hamiltonian, &Formula), &u64)| anneal(h, f, sched, seed);
    if parallel {
        instances.par_iter().zip(seeds.par_iter()).map(run).collect()
    } else {
        instances.iter().zip(seeds).map(run).collect()
    }
}
