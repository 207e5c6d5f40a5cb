//! Two-stage selection of a sufficient confounder set.
//!
//! Stage 1 shrinks the candidate pool `X''` to the smallest `X'` that keeps
//! `P(Y | Z, X'') = P(Y | Z, X')`: the outcome's predictors come first.
//! Stage 2 shrinks `X'` to the smallest `X` with `P(Z | X') = P(Z | X)`.
//! The candidate pool is every variable except treatment, outcome and the
//! treatment's descendants.

use serde::Serialize;

use super::check_roles;
use crate::bayesnet::{DiscreteBayesNet, Factor};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Largest candidate pool accepted; subsets are enumerated exhaustively.
pub const MAX_POOL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Equalities are read off the graph as d-separation statements.
    Graphical,
    /// Equalities are checked numerically on the exact joint.
    Distributional,
}

/// How the size of a candidate set is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeMetric {
    /// Sum of member state counts.
    Sum,
    /// Product of member state counts.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions<T> {
    pub mode: SelectionMode,
    pub metric: SizeMetric,
    /// Max-norm tolerance for distributional equalities.
    pub tolerance: T,
}

impl<T: Prob> Default for SelectOptions<T> {
    fn default() -> Self {
        SelectOptions {
            mode: SelectionMode::Graphical,
            metric: SizeMetric::Sum,
            tolerance: T::lit(1e-9),
        }
    }
}

impl<T: Prob> SelectOptions<T> {
    pub fn graphical() -> Self {
        Self::default()
    }

    pub fn distributional(tolerance: T) -> Self {
        SelectOptions {
            mode: SelectionMode::Distributional,
            tolerance,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry<T> {
    pub stage: u8,
    pub subset: Vec<String>,
    pub size: u128,
    pub holds: bool,
    /// Max-norm gap between the two conditionals; distributional mode only.
    pub discrepancy: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection<T> {
    pub mode: SelectionMode,
    pub metric: SizeMetric,
    pub pool: Vec<String>,
    pub stage1: Vec<String>,
    pub chosen: Vec<String>,
    pub audit: Vec<AuditEntry<T>>,
}

/// Selects a sufficient confounder set for the effect of `treatment` on `outcome`.
pub fn select_sufficient_confounders<T: Prob>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    options: &SelectOptions<T>,
) -> Result<Selection<T>> {
    check_roles(net, treatment, outcome, &[])?;
    if options.mode == SelectionMode::Distributional
        && (options.tolerance.is_nan() || options.tolerance < T::zero())
    {
        return Err(Error::InvalidArgument(
            "tolerance must be nonnegative".into(),
        ));
    }
    let post_treatment = net.descendants(treatment)?;
    let pool: Vec<&str> = net
        .variables()
        .iter()
        .map(|v| v.name())
        .filter(|n| *n != outcome && !post_treatment.contains(n))
        .collect();
    if pool.len() > MAX_POOL {
        return Err(Error::SizeCapExceeded {
            size: 1u128 << pool.len(),
            cap: 1u128 << MAX_POOL,
        });
    }
    let joint = match options.mode {
        SelectionMode::Distributional => Some(net.joint()?),
        SelectionMode::Graphical => None,
    };
    let mut audit = Vec::new();

    // Stage 1: drop members of the pool that carry no extra information on the outcome.
    let stage1 = smallest(net, &pool, options.metric, |subset| {
        let rest: Vec<&str> = pool
            .iter()
            .copied()
            .filter(|p| !subset.contains(p))
            .collect();
        let mut small = vec![treatment];
        small.extend_from_slice(subset);
        let (holds, gap) = if rest.is_empty() {
            (true, joint.as_ref().map(|_| T::zero()))
        } else if let Some(j) = &joint {
            let mut big = vec![treatment];
            big.extend_from_slice(&pool);
            let gap = discrepancy(j, outcome, &big, &small)?;
            (gap <= options.tolerance, Some(gap))
        } else {
            (net.dag().d_separated(&[outcome], &rest, &small)?, None)
        };
        audit.push(entry(net, 1, subset, options.metric, holds, gap));
        Ok(holds)
    })?;

    // Stage 2: drop members that carry no extra information on the treatment.
    let chosen = smallest(net, &stage1, options.metric, |subset| {
        let rest: Vec<&str> = stage1
            .iter()
            .copied()
            .filter(|p| !subset.contains(p))
            .collect();
        let (holds, gap) = if rest.is_empty() {
            (true, joint.as_ref().map(|_| T::zero()))
        } else if let Some(j) = &joint {
            let gap = discrepancy(j, treatment, &stage1, subset)?;
            (gap <= options.tolerance, Some(gap))
        } else {
            (net.dag().d_separated(&[treatment], &rest, subset)?, None)
        };
        audit.push(entry(net, 2, subset, options.metric, holds, gap));
        Ok(holds)
    })?;

    Ok(Selection {
        mode: options.mode,
        metric: options.metric,
        pool: pool.iter().map(|s| s.to_string()).collect(),
        stage1: stage1.iter().map(|s| s.to_string()).collect(),
        chosen: chosen.iter().map(|s| s.to_string()).collect(),
        audit,
    })
}

fn entry<T: Prob>(
    net: &DiscreteBayesNet<T>,
    stage: u8,
    subset: &[&str],
    metric: SizeMetric,
    holds: bool,
    discrepancy: Option<T>,
) -> AuditEntry<T> {
    AuditEntry {
        stage,
        subset: subset.iter().map(|s| s.to_string()).collect(),
        size: size_of(net, subset, metric),
        holds,
        discrepancy,
    }
}

fn size_of<T: Prob>(net: &DiscreteBayesNet<T>, subset: &[&str], metric: SizeMetric) -> u128 {
    let cards = subset.iter().map(|s| {
        net.variable(s)
            .map(|v| v.cardinality() as u128)
            .unwrap_or(0)
    });
    match metric {
        SizeMetric::Sum => cards.sum(),
        SizeMetric::Product => cards.product(),
    }
}

/// Tests subsets of `set` from smallest to largest (ties broken by sorted
/// member names) and returns the first that passes. The full set always
/// passes, so a result exists.
fn smallest<'a, T, F>(
    net: &DiscreteBayesNet<T>,
    set: &[&'a str],
    metric: SizeMetric,
    mut passes: F,
) -> Result<Vec<&'a str>>
where
    T: Prob,
    F: FnMut(&[&'a str]) -> Result<bool>,
{
    let mut candidates: Vec<(u128, Vec<&str>, Vec<&'a str>)> = (0u32..1 << set.len())
        .map(|mask| {
            let members: Vec<&'a str> = (0..set.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| set[i])
                .collect();
            let mut sorted = members.clone();
            sorted.sort_unstable();
            (size_of(net, &members, metric), sorted, members)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    for (_, _, members) in candidates {
        if passes(&members)? {
            return Ok(members);
        }
    }
    unreachable!("the full set always satisfies its own equality")
}

/// Largest gap `|p(target | big) - p(target | small)|` over configurations of
/// `big` with positive probability. `small` must be a subset of `big`.
fn discrepancy<T: Prob>(
    joint: &Factor<T>,
    target: &str,
    big: &[&str],
    small: &[&str],
) -> Result<T> {
    let mut keep_big = big.to_vec();
    keep_big.push(target);
    let mut keep_small = small.to_vec();
    keep_small.push(target);
    let fb = joint.marginal(&keep_big)?;
    let fs = joint.marginal(&keep_small)?;
    let card_t = fb.scope()[big.len()].cardinality();
    let project: Vec<usize> = small
        .iter()
        .map(|s| {
            big.iter()
                .position(|b| b == s)
                .expect("small is a subset of big")
        })
        .collect();
    let mut worst = T::zero();
    let entries = fb.entries();
    for chunk in entries.chunks(card_t) {
        let p_big: T = chunk.iter().map(|(_, v)| *v).sum();
        if p_big <= T::zero() {
            continue;
        }
        let mut cfg: Vec<usize> = project.iter().map(|&i| chunk[0].0[i]).collect();
        cfg.push(0);
        let start_small = {
            let mut idx = 0;
            for (c, v) in cfg.iter().zip(fs.scope()) {
                idx = idx * v.cardinality() + c;
            }
            idx
        };
        let small_row = &fs.values()[start_small..start_small + card_t];
        let p_small: T = small_row.iter().copied().sum();
        for (y, (_, v)) in chunk.iter().enumerate() {
            let gap = (*v / p_big - small_row[y] / p_small).abs();
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}
