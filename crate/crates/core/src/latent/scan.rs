//! Exact condition-versus-ignore comparisons over parameter grids.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::interaction::{classify_interaction, InteractionClass};
use super::scenario::{ScenarioParams, Template};
use crate::bayesnet::{DiscreteBayesNet, Factor};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::intervention::{adjusted_estimate, true_effect, unadjusted_estimate, OutcomeValues};
use crate::scalar::Prob;

/// One scanned parameter and its values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridAxis<T> {
    pub name: String,
    pub values: Vec<T>,
}

impl<T: Prob> GridAxis<T> {
    pub fn new(name: impl Into<String>, values: Vec<T>) -> Self {
        GridAxis {
            name: name.into(),
            values,
        }
    }

    /// `start, start + step, ...` up to `stop` inclusive (with rounding slack).
    pub fn range(name: impl Into<String>, start: T, stop: T, step: T) -> Result<Self> {
        if !start.is_finite()
            || !stop.is_finite()
            || step.is_nan()
            || step <= T::zero()
            || stop < start
        {
            return Err(Error::InvalidArgument(format!(
                "range {start}:{stop}:{step} needs start <= stop and a positive step"
            )));
        }
        let count = ((stop - start) / step + T::lit(1e-9)).floor();
        let count = count.to_usize().unwrap_or(0) + 1;
        if count > 1_000_000 {
            return Err(Error::InvalidArgument(format!(
                "range {start}:{stop}:{step} is too long"
            )));
        }
        let values = (0..count)
            .map(|k| start + step * T::from_usize(k).expect("index fits scalar"))
            .collect();
        Ok(Self::new(name, values))
    }
}

/// Axes of a full-factorial grid; the first axis varies slowest.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GridSpec<T> {
    pub axes: Vec<GridAxis<T>>,
}

impl<T: Prob> GridSpec<T> {
    pub fn new(axes: Vec<GridAxis<T>>) -> Self {
        GridSpec { axes }
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Parameter assignment of cell `index` in row-major order.
    pub fn cell(&self, mut index: usize) -> Vec<(String, T)> {
        let mut point = vec![(String::new(), T::zero()); self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            point[k] = (axis.name.clone(), axis.values[index % n]);
            index /= n;
        }
        point
    }
}

/// Variable roles in a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRoles {
    pub treatment: String,
    pub outcome: String,
    pub covariate: String,
    /// Two causes of the covariate whose interaction is classified.
    pub causes: Option<(String, String)>,
}

impl ScanRoles {
    /// `Z` on `Y` with covariate `X`, plus the template's hidden causes.
    pub fn for_template(template: Template) -> Self {
        ScanRoles {
            treatment: "Z".into(),
            outcome: "Y".into(),
            covariate: "X".into(),
            causes: template
                .hidden_causes()
                .map(|(u, w)| (u.to_string(), w.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions<T> {
    pub parallel: bool,
    /// Errors closer than this count as a tie.
    pub tie_tolerance: T,
    /// Also report mutual information (nats) alongside max-norm dependence.
    pub mutual_information: bool,
}

impl<T: Prob> Default for ScanOptions<T> {
    fn default() -> Self {
        ScanOptions {
            parallel: true,
            tie_tolerance: T::lit(1e-12),
            mutual_information: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Condition,
    Ignore,
    Tie,
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::Condition => "condition",
            Winner::Ignore => "ignore",
            Winner::Tie => "tie",
        }
    }
}

/// Exact quantities for one successfully evaluated cell.
///
/// Errors are estimate minus truth of the expected outcome, per treatment
/// level and for the average causal effect.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMetrics<T> {
    pub dep_zx: T,
    pub dep_xy: T,
    pub mi_zx: Option<T>,
    pub mi_xy: Option<T>,
    pub err_adjusted: Vec<T>,
    pub err_unadjusted: Vec<T>,
    pub err_adjusted_ace: T,
    pub err_unadjusted_ace: T,
    pub winner: Winner,
    pub interaction_class: InteractionClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult<T> {
    pub grid_point: Vec<(String, T)>,
    /// The cell's metrics, or the reason it could not be evaluated.
    pub outcome: std::result::Result<CellMetrics<T>, String>,
}

/// Largest `|p(a | b) - p(a)|` over states of `a` and positive-probability states of `b`.
pub fn dependence_strength<T: Prob>(pair: &Factor<T>) -> T {
    let (na, nb) = (pair.scope()[0].cardinality(), pair.scope()[1].cardinality());
    let v = pair.values();
    let p_a: Vec<T> = (0..na)
        .map(|a| (0..nb).map(|b| v[a * nb + b]).sum())
        .collect();
    let mut worst = T::zero();
    for b in 0..nb {
        let p_b: T = (0..na).map(|a| v[a * nb + b]).sum();
        if p_b <= T::zero() {
            continue;
        }
        for a in 0..na {
            worst = worst.max((v[a * nb + b] / p_b - p_a[a]).abs());
        }
    }
    worst
}

/// Mutual information of a two-variable joint, in nats.
pub fn mutual_information<T: Prob>(pair: &Factor<T>) -> T {
    let (na, nb) = (pair.scope()[0].cardinality(), pair.scope()[1].cardinality());
    let v = pair.values();
    let p_a: Vec<T> = (0..na)
        .map(|a| (0..nb).map(|b| v[a * nb + b]).sum())
        .collect();
    let p_b: Vec<T> = (0..nb)
        .map(|b| (0..na).map(|a| v[a * nb + b]).sum())
        .collect();
    let mut mi = T::zero();
    for a in 0..na {
        for b in 0..nb {
            let p = v[a * nb + b];
            if p > T::zero() {
                mi = mi + p * (p / (p_a[a] * p_b[b])).ln();
            }
        }
    }
    mi.max(T::zero())
}

/// Evaluates one network: truth, both estimators, dependences, interaction.
pub fn evaluate_cell<T: Prob>(
    net: &DiscreteBayesNet<T>,
    roles: &ScanRoles,
    options: &ScanOptions<T>,
) -> Result<CellMetrics<T>> {
    let (z, y, x) = (
        roles.treatment.as_str(),
        roles.outcome.as_str(),
        roles.covariate.as_str(),
    );
    let values = OutcomeValues::default_for(net.variable(y)?);
    let truth = true_effect(net, z, y)?.expectations(&values);
    let adj = adjusted_estimate(net, z, y, &[x])?.expectations(&values);
    let unadj = unadjusted_estimate(net, z, y)?.expectations(&values);
    let err = |est: &[T]| -> Vec<T> { est.iter().zip(&truth).map(|(e, t)| *e - *t).collect() };
    let err_adjusted = err(&adj);
    let err_unadjusted = err(&unadj);
    let last = truth.len() - 1;
    let ace = |e: &[T]| e[last] - e[0];
    let err_adjusted_ace = ace(&adj) - ace(&truth);
    let err_unadjusted_ace = ace(&unadj) - ace(&truth);

    let worst = |e: &[T]| e.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let (a, u) = (worst(&err_adjusted), worst(&err_unadjusted));
    let winner = if (a - u).abs() <= options.tie_tolerance {
        Winner::Tie
    } else if a < u {
        Winner::Condition
    } else {
        Winner::Ignore
    };

    let joint = net.joint()?;
    let xz = joint.marginal(&[x, z])?;
    let xy = joint.marginal(&[x, y])?;
    let interaction_class = match &roles.causes {
        Some((u, w)) => classify_interaction(net, u, w, x)?,
        None => InteractionClass::None,
    };
    Ok(CellMetrics {
        dep_zx: dependence_strength(&xz),
        dep_xy: dependence_strength(&xy),
        mi_zx: options.mutual_information.then(|| mutual_information(&xz)),
        mi_xy: options.mutual_information.then(|| mutual_information(&xy)),
        err_adjusted,
        err_unadjusted,
        err_adjusted_ace,
        err_unadjusted_ace,
        winner,
        interaction_class,
    })
}

/// Scans `grid` around `base`; a failing cell records its error and the scan continues.
pub fn bias_scan<T: Prob>(
    base: &ScenarioParams<T>,
    grid: &GridSpec<T>,
    roles: &ScanRoles,
    options: &ScanOptions<T>,
) -> Result<Vec<ScanResult<T>>> {
    for axis in &grid.axes {
        base.get(&axis.name)?;
        if axis.values.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "axis `{}` has no values",
                axis.name
            )));
        }
    }
    let run = |i: usize| {
        let point = grid.cell(i);
        let outcome = point
            .iter()
            .try_fold(base.clone(), |sp, (n, v)| sp.with(n, *v))
            .and_then(|sp| sp.build())
            .and_then(|net| evaluate_cell(&net, roles, options))
            .map_err(|e| e.to_string());
        ScanResult {
            grid_point: point,
            outcome,
        }
    };
    let n = grid.cell_count();
    Ok(if options.parallel {
        (0..n).into_par_iter().map(run).collect()
    } else {
        (0..n).map(run).collect()
    })
}

/// Writes one CSV row per cell. Grid parameters come first, sorted by name.
pub fn write_scan_csv<T: Prob, W: Write>(results: &[ScanResult<T>], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut params: Vec<&str> = results
        .first()
        .map(|r| r.grid_point.iter().map(|(n, _)| n.as_str()).collect())
        .unwrap_or_default();
    params.sort_unstable();
    let with_mi = results
        .iter()
        .any(|r| matches!(&r.outcome, Ok(m) if m.mi_zx.is_some()));
    let mut header: Vec<&str> = params.clone();
    header.extend([
        "dep_zx",
        "dep_xy",
        "interaction_class",
        "err_adj_z0",
        "err_adj_z1",
        "err_unadj_z0",
        "err_unadj_z1",
        "err_adj_ace",
        "err_unadj_ace",
        "winner",
    ]);
    if with_mi {
        header.extend(["mi_zx", "mi_xy"]);
    }
    w.write_record(&header).map_err(io)?;
    let num = |x: T| sig12(x.to_f64_lossy());
    for r in results {
        let point: BTreeMap<&str, T> = r.grid_point.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        let mut row: Vec<String> = params.iter().map(|p| num(point[p])).collect();
        match &r.outcome {
            Ok(m) => {
                let level = |e: &[T], i: usize| e.get(i).map(|v| num(*v)).unwrap_or_default();
                row.extend([
                    num(m.dep_zx),
                    num(m.dep_xy),
                    m.interaction_class.to_string(),
                    level(&m.err_adjusted, 0),
                    level(&m.err_adjusted, 1),
                    level(&m.err_unadjusted, 0),
                    level(&m.err_unadjusted, 1),
                    num(m.err_adjusted_ace),
                    num(m.err_unadjusted_ace),
                    m.winner.as_str().to_string(),
                ]);
                if with_mi {
                    row.push(m.mi_zx.map(num).unwrap_or_default());
                    row.push(m.mi_xy.map(num).unwrap_or_default());
                }
            }
            Err(_) => {
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push("failed".into());
                if with_mi {
                    row.extend([String::new(), String::new()]);
                }
            }
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Dependence-strength band of a cell, from the weaker of its two dependences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthBand {
    Weak,
    Moderate,
    Strong,
}

impl StrengthBand {
    pub const WEAK_BELOW: f64 = 0.1;
    pub const STRONG_FROM: f64 = 0.25;

    pub fn of<T: Prob>(dep_zx: T, dep_xy: T) -> Self {
        let d = dep_zx.min(dep_xy).to_f64_lossy();
        if d < Self::WEAK_BELOW {
            StrengthBand::Weak
        } else if d < Self::STRONG_FROM {
            StrengthBand::Moderate
        } else {
            StrengthBand::Strong
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StrengthBand::Weak => "weak",
            StrengthBand::Moderate => "moderate",
            StrengthBand::Strong => "strong",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub cells: usize,
    pub condition: usize,
    pub ignore: usize,
    pub tie: usize,
}

impl Tally {
    fn add(&mut self, w: Winner) {
        self.cells += 1;
        match w {
            Winner::Condition => self.condition += 1,
            Winner::Ignore => self.ignore += 1,
            Winner::Tie => self.tie += 1,
        }
    }

    /// Share of cells where conditioning had the smaller error.
    pub fn condition_fraction(&self) -> f64 {
        if self.cells == 0 {
            0.0
        } else {
            self.condition as f64 / self.cells as f64
        }
    }
}

/// Winner counts stratified by interaction class and dependence band.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ScanSummary {
    pub overall: Tally,
    pub failed: usize,
    pub strata: BTreeMap<(InteractionClass, StrengthBand), Tally>,
}

impl ScanSummary {
    pub fn from_results<T: Prob>(results: &[ScanResult<T>]) -> Self {
        let mut s = ScanSummary::default();
        for r in results {
            match &r.outcome {
                Ok(m) => {
                    s.overall.add(m.winner);
                    s.strata
                        .entry((m.interaction_class, StrengthBand::of(m.dep_zx, m.dep_xy)))
                        .or_default()
                        .add(m.winner);
                }
                Err(_) => s.failed += 1,
            }
        }
        s
    }

    /// Fixed-width text table, one line per stratum.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:<9} {:>6} {:>9} {:>7} {:>5} {:>14}\n",
            "interaction", "strength", "cells", "condition", "ignore", "tie", "condition_frac"
        ));
        let line = |class: &str, band: &str, t: &Tally| {
            format!(
                "{:<16} {:<9} {:>6} {:>9} {:>7} {:>5} {:>14}\n",
                class,
                band,
                t.cells,
                t.condition,
                t.ignore,
                t.tie,
                sig12(t.condition_fraction())
            )
        };
        for ((class, band), t) in &self.strata {
            out.push_str(&line(class.as_str(), band.as_str(), t));
        }
        out.push_str(&line("all", "all", &self.overall));
        if self.failed > 0 {
            out.push_str(&format!("failed cells: {}\n", self.failed));
        }
        out
    }
}
