//! Reductions from trajectories to summary statistics.

use serde::{Deserialize, Serialize};

use crate::anneal::Trajectory;
use crate::cnf::{self, Formula};
use crate::error::{Error, Result};
use crate::ising::Hamiltonian;
use crate::numfmt::g17;
use crate::satcore::BackboneReport;

pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;
pub const DEFAULT_BINS: usize = 60;
pub const DEFAULT_BETA_WINDOW: (f64, f64) = (0.05, 1.0);

/// Which energy column feeds correlations and curves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyKind {
    /// Unsatisfied clauses.
    #[default]
    Logic,
    /// Offset-normalized Hamiltonian energy.
    Hamiltonian,
}

/// Which backbone column feeds correlations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackboneKind {
    #[default]
    Capped,
    Exact,
}

/// Mean of the last `⌈fraction·len⌉` elements (at least one).
pub fn tail_mean(series: &[f64], fraction: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction {fraction} not in (0, 1]"
        )));
    }
    // guard against 0.2·100 landing a hair above 20
    let k = ((fraction * series.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    let k = k.min(series.len());
    let tail = &series[series.len() - k..];
    Ok(tail.iter().sum::<f64>() / k as f64)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Pearson correlation with population moments.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Mean and sample (n-1) standard deviation.
pub fn mean_sd(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: xs.len(),
        });
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((m, (ss / (xs.len() - 1) as f64).sqrt()))
}

/// One row of `paper_quickpub_summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub instance: String,
    pub seed: u64,
    pub sat: bool,
    pub alpha_ratio: f64,
    pub final_energy_h: f64,
    pub final_energy_logic: f64,
    #[serde(rename = "final_abs_M")]
    pub final_abs_m: f64,
    pub backbone_capped: Option<usize>,
    pub backbone_exact: Option<usize>,
    /// The capped enumeration was not truncated.
    pub backbone_exact_flag: Option<bool>,
    pub mean_slack: Option<f64>,
    pub beta: Option<f64>,
    pub beta_r2: Option<f64>,
    pub t0: f64,
    pub alpha: f64,
    pub steps: usize,
}

impl InstanceSummary {
    pub fn energy(&self, kind: EnergyKind) -> f64 {
        match kind {
            EnergyKind::Logic => self.final_energy_logic,
            EnergyKind::Hamiltonian => self.final_energy_h,
        }
    }

    pub fn backbone(&self, kind: BackboneKind) -> Option<usize> {
        match kind {
            BackboneKind::Capped => self.backbone_capped,
            BackboneKind::Exact => self.backbone_exact,
        }
    }
}

pub fn write_summary_csv(rows: &[InstanceSummary]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record([
            "instance",
            "seed",
            "sat",
            "alpha_ratio",
            "final_energy_h",
            "final_energy_logic",
            "final_abs_M",
            "backbone_capped",
            "backbone_exact",
            "backbone_exact_flag",
            "mean_slack",
            "beta",
            "beta_r2",
            "t0",
            "alpha",
            "steps",
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 csv"))
}

pub fn read_summary_csv(text: &str) -> Result<Vec<InstanceSummary>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Inputs gathered for one instance.
pub struct SummaryInputs<'a> {
    pub formula: &'a Formula,
    pub hamiltonian: &'a Hamiltonian,
    pub trajectory: &'a Trajectory,
    pub sat: bool,
    pub backbone_capped: Option<&'a BackboneReport>,
    pub backbone_exact: Option<&'a BackboneReport>,
    pub mean_slack: Option<f64>,
    pub beta: Option<&'a BetaFit>,
}

/// Tail statistics use [`DEFAULT_TAIL_FRACTION`]; the magnetization column
/// is the tail mean of `|M_t|`.
pub fn build_summary(inp: &SummaryInputs<'_>) -> Result<InstanceSummary> {
    let name = inp.formula.source_name();
    for other in [inp.hamiltonian.source(), inp.trajectory.instance.as_str()] {
        if other != name {
            return Err(Error::InstanceMismatch(name.to_string(), other.to_string()));
        }
    }
    let tr = inp.trajectory;
    Ok(InstanceSummary {
        instance: name.to_string(),
        seed: tr.seed,
        sat: inp.sat,
        alpha_ratio: cnf::clause_ratio(inp.formula)?,
        final_energy_h: tail_mean(&tr.energies_h(), DEFAULT_TAIL_FRACTION)?,
        final_energy_logic: tail_mean(&tr.energies_logic(), DEFAULT_TAIL_FRACTION)?,
        final_abs_m: tail_mean(&tr.abs_magnetizations(), DEFAULT_TAIL_FRACTION)?,
        backbone_capped: inp.backbone_capped.map(|b| b.size),
        backbone_exact: inp.backbone_exact.map(|b| b.size),
        backbone_exact_flag: inp.backbone_capped.map(|b| b.exact),
        mean_slack: inp.mean_slack,
        beta: inp.beta.map(|b| b.beta),
        beta_r2: inp.beta.map(|b| b.r2),
        t0: tr.schedule.t0,
        alpha: tr.schedule.alpha,
        steps: tr.schedule.steps,
    })
}

pub const CORRELATION_LABELS: [&str; 3] = ["E_final", "|M_final|", "Backbone"];

/// Pairwise Pearson matrix over (energy, |M|, backbone). An entry is `None`
/// when a column is constant over the rows it is computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: [&'static str; 3],
    pub entries: [[Option<f64>; 3]; 3],
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i][j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("observable,E_final,|M_final|,Backbone\n");
        for (i, label) in self.labels.iter().enumerate() {
            out.push_str(label);
            for j in 0..3 {
                out.push(',');
                if let Some(v) = self.entries[i][j] {
                    out.push_str(&g17(v));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(
    rows: &[InstanceSummary],
    energy: EnergyKind,
    backbone: BackboneKind,
) -> Result<CorrelationMatrix> {
    if rows.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: rows.len(),
        });
    }
    let cols: [Vec<Option<f64>>; 3] = [
        rows.iter().map(|r| Some(r.energy(energy))).collect(),
        rows.iter().map(|r| Some(r.final_abs_m)).collect(),
        rows.iter().map(|r| r.backbone(backbone).map(|b| b as f64)).collect(),
    ];
    let mut entries = [[None; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let (x, y): (Vec<f64>, Vec<f64>) = cols[i]
                .iter()
                .zip(&cols[j])
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let rho = match pearson(&x, &y) {
                Ok(r) => Some(if i == j { 1.0 } else { r }),
                Err(Error::ZeroVariance(_)) | Err(Error::TooFewRows { .. }) => None,
                Err(e) => return Err(e),
            };
            entries[i][j] = rho;
            entries[j][i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        labels: CORRELATION_LABELS,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStats {
    pub column: &'static str,
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

/// Mean and sample standard deviation of every numeric summary column.
/// Missing values are skipped; columns with fewer than two values are
/// omitted.
pub fn aggregate(rows: &[InstanceSummary]) -> Result<Vec<ColumnStats>> {
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    type Getter = fn(&InstanceSummary) -> Option<f64>;
    let columns: [(&'static str, Getter); 8] = [
        ("final_energy_logic", |r| Some(r.final_energy_logic)),
        ("final_energy_h", |r| Some(r.final_energy_h)),
        ("final_abs_M", |r| Some(r.final_abs_m)),
        ("backbone_capped", |r| r.backbone_capped.map(|b| b as f64)),
        ("backbone_exact", |r| r.backbone_exact.map(|b| b as f64)),
        ("mean_slack", |r| r.mean_slack),
        ("beta", |r| r.beta),
        ("alpha_ratio", |r| Some(r.alpha_ratio)),
    ];
    let mut out = Vec::new();
    for (column, get) in columns {
        let xs: Vec<f64> = rows.iter().filter_map(get).collect();
        if let Ok((mean, sd)) = mean_sd(&xs) {
            out.push(ColumnStats {
                column,
                mean,
                sd,
                count: xs.len(),
            });
        }
    }
    Ok(out)
}

/// One temperature bin of the cooling curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveBin {
    /// Mean temperature of the points in the bin.
    pub temperature: f64,
    pub mean_energy: f64,
    pub mean_abs_m: f64,
    pub count: usize,
}

/// Pools all trajectory points into `bins` log-spaced temperature bins
/// spanning the observed range. Empty bins are dropped; output runs from
/// hot to cold.
pub fn binned_curves(trajectories: &[Trajectory], bins: usize, energy: EnergyKind) -> Result<Vec<CurveBin>> {
    if trajectories.is_empty() {
        return Err(Error::EmptySeries);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    let points = || trajectories.iter().flat_map(|t| t.points.iter());
    let (lo, hi) = points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.temperature), hi.max(p.temperature))
    });
    if !lo.is_finite() {
        return Err(Error::EmptySeries);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let width = (lhi - llo) / bins as f64;
    let mut acc = vec![(0.0f64, 0.0f64, 0.0f64, 0usize); bins];
    for p in points() {
        let idx = if width > 0.0 {
            // tolerance keeps grid-aligned temperatures in their own bin
            (((p.temperature.ln() - llo) / width) + 1e-9).floor().max(0.0) as usize
        } else {
            0
        };
        let slot = &mut acc[idx.min(bins - 1)];
        let e = match energy {
            EnergyKind::Logic => p.energy_logic as f64,
            EnergyKind::Hamiltonian => p.energy_h,
        };
        slot.0 += p.temperature;
        slot.1 += e;
        slot.2 += p.magnetization.abs();
        slot.3 += 1;
    }
    Ok(acc
        .into_iter()
        .rev()
        .filter(|a| a.3 > 0)
        .map(|(t, e, m, c)| CurveBin {
            temperature: t / c as f64,
            mean_energy: e / c as f64,
            mean_abs_m: m / c as f64,
            count: c,
        })
        .collect())
}

/// Columns `bin_T,mean_E,mean_absM,count`.
pub fn curves_to_csv(bins: &[CurveBin]) -> String {
    let mut out = String::from("bin_T,mean_E,mean_absM,count\n");
    for b in bins {
        out.push_str(&format!(
            "{},{},{},{}\n",
            g17(b.temperature),
            g17(b.mean_energy),
            g17(b.mean_abs_m),
            b.count
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaFit {
    /// Exponent in `|M| ∝ T^-β`.
    pub beta: f64,
    pub window: (f64, f64),
    pub r2: f64,
    pub points: usize,
}

/// Least-squares slope of `ln|M|` against `ln T` over points with
/// `T ∈ [lo, hi]` and `|M| > 0`; `β` is minus the slope.
pub fn fit_beta(temperatures: &[f64], abs_m: &[f64], window: (f64, f64)) -> Result<BetaFit> {
    if temperatures.len() != abs_m.len() {
        return Err(Error::LengthMismatch {
            expected: temperatures.len(),
            got: abs_m.len(),
        });
    }
    let (lo, hi) = window;
    let (xs, ys): (Vec<f64>, Vec<f64>) = temperatures
        .iter()
        .zip(abs_m)
        .filter(|&(&t, &m)| t >= lo && t <= hi && t > 0.0 && m.abs() > 0.0)
        .map(|(&t, &m)| (t.ln(), m.abs().ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::TooFewFitPoints(xs.len()));
    }
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("log T"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    // a flat series has nothing to explain; rounding noise must not count
    let flat = ss_tot <= 1e-20 * xs.len() as f64 * (1.0 + my * my);
    let r2 = if flat { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(BetaFit {
        beta: -slope,
        window,
        r2,
        points: xs.len(),
    })
}

pub fn fit_beta_trajectory(tr: &Trajectory, window: (f64, f64)) -> Result<BetaFit> {
    fit_beta(&tr.temperatures(), &tr.abs_magnetizations(), window)
}

pub fn fit_beta_curve(bins: &[CurveBin], window: (f64, f64)) -> Result<BetaFit> {
    let ts: Vec<f64> = bins.iter().map(|b| b.temperature).collect();
    let ms: Vec<f64> = bins.iter().map(|b| b.mean_abs_m).collect();
    fit_beta(&ts, &ms, window)
}
