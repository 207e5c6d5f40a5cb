//! Interventions on discrete networks and the estimators compared against them.
//!
//! The interventional distribution is computed by truncated factorization:
//! the CPT factors of intervened nodes are dropped and those nodes are
//! clamped. Adjusted and unadjusted estimators are computed from the exact
//! observational joint, so any gap between them and the truth is bias, never
//! sampling noise.

mod bias;
mod select;

pub use bias::{conditioning_bias, effect_report, AdjustedEntry, EffectReport};
pub use select::{
    select_sufficient_confounders, AuditEntry, SelectOptions, Selection, SelectionMode, SizeMetric,
    MAX_POOL,
};

use serde::Serialize;

use crate::bayesnet::{DiscreteBayesNet, Factor, Variable};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// A request for `p(target | do(assignments))`.
#[derive(Debug, Clone)]
pub struct InterventionQuery<'a, T> {
    net: &'a DiscreteBayesNet<T>,
    target: String,
    do_assignments: Vec<(String, String)>,
}

impl<'a, T: Prob> InterventionQuery<'a, T> {
    pub fn new<S: AsRef<str>>(
        net: &'a DiscreteBayesNet<T>,
        target: &str,
        do_assignments: &[(S, S)],
    ) -> Result<Self> {
        net.index_of(target)?;
        let mut assigned: Vec<(String, String)> = Vec::with_capacity(do_assignments.len());
        for (v, s) in do_assignments {
            let (v, s) = (v.as_ref(), s.as_ref());
            if v == target {
                return Err(Error::InvalidArgument(format!(
                    "target `{target}` cannot also be intervened on"
                )));
            }
            net.variable(v)?.state_index(s)?;
            if assigned.iter().any(|(a, _)| a == v) {
                return Err(Error::Duplicate(v.to_string()));
            }
            assigned.push((v.to_string(), s.to_string()));
        }
        Ok(InterventionQuery {
            net,
            target: target.to_string(),
            do_assignments: assigned,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn do_assignments(&self) -> &[(String, String)] {
        &self.do_assignments
    }

    pub fn distribution(&self) -> Result<Factor<T>> {
        interventional_distribution(self.net, &[self.target.as_str()], &self.do_assignments)
    }
}

/// `p(targets | do(assignments))` by truncated factorization.
///
/// Sums `prod_{k not intervened} p(x_k | pa_k)` over every non-target variable
/// with intervened variables clamped, then normalizes over the targets.
pub fn interventional_distribution<T: Prob, S: AsRef<str>, D: AsRef<str>>(
    net: &DiscreteBayesNet<T>,
    targets: &[S],
    do_assignments: &[(D, D)],
) -> Result<Factor<T>> {
    let mut clamp = vec![None; net.len()];
    for (v, s) in do_assignments {
        let i = net.index_of(v.as_ref())?;
        let state = net.variables()[i].state_index(s.as_ref())?;
        if clamp[i].replace(state).is_some() {
            return Err(Error::Duplicate(v.as_ref().to_string()));
        }
    }
    let mut target_idx = Vec::with_capacity(targets.len());
    for t in targets {
        let i = net.index_of(t.as_ref())?;
        if clamp[i].is_some() {
            return Err(Error::InvalidArgument(format!(
                "`{}` is both a target and intervened on",
                t.as_ref()
            )));
        }
        if target_idx.contains(&i) {
            return Err(Error::Duplicate(t.as_ref().to_string()));
        }
        target_idx.push(i);
    }
    let scope: Vec<Variable> = target_idx
        .iter()
        .map(|&i| net.variables()[i].clone())
        .collect();
    let cards: Vec<usize> = scope.iter().map(Variable::cardinality).collect();
    let mut values = vec![T::zero(); cards.iter().product()];
    net.for_each_truncated(&clamp, |cfg, w| {
        let idx = target_idx
            .iter()
            .zip(&cards)
            .fold(0, |acc, (&i, &c)| acc * c + cfg[i]);
        values[idx] = values[idx] + w;
    })?;
    Factor::new(scope, values)?.normalized()
}

/// Real values attached to the outcome's states, used for expectations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeValues<T>(Vec<T>);

impl<T: Prob> OutcomeValues<T> {
    pub fn new(outcome: &Variable, values: Vec<T>) -> Result<Self> {
        if values.len() != outcome.cardinality() {
            return Err(Error::InvalidArgument(format!(
                "`{}` has {} states but {} values were given",
                outcome.name(),
                outcome.cardinality(),
                values.len()
            )));
        }
        Ok(OutcomeValues(values))
    }

    /// Numeric state labels map to their value (so `0`/`1` map to 0/1);
    /// otherwise each state maps to its index.
    pub fn default_for(outcome: &Variable) -> Self {
        let parsed: Option<Vec<T>> = outcome
            .states()
            .iter()
            .map(|s| s.trim().parse::<f64>().ok().and_then(T::from_f64))
            .collect();
        OutcomeValues(parsed.unwrap_or_else(|| {
            (0..outcome.cardinality())
                .map(|i| T::from_usize(i).expect("index fits scalar"))
                .collect()
        }))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn expectation(&self, dist: &[T]) -> T {
        self.0.iter().zip(dist).map(|(&v, &p)| v * p).sum()
    }
}

/// One outcome distribution per treatment level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTable<T> {
    treatment: Variable,
    outcome: Variable,
    rows: Vec<Vec<T>>,
}

impl<T: Prob> LevelTable<T> {
    pub fn treatment(&self) -> &Variable {
        &self.treatment
    }

    pub fn outcome(&self) -> &Variable {
        &self.outcome
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Outcome distribution at the treatment level with index `level`.
    pub fn row(&self, level: usize) -> &[T] {
        &self.rows[level]
    }

    pub fn at(&self, level: &str) -> Result<&[T]> {
        Ok(&self.rows[self.treatment.state_index(level)?])
    }

    pub fn prob(&self, level: &str, outcome_state: &str) -> Result<T> {
        Ok(self.at(level)?[self.outcome.state_index(outcome_state)?])
    }

    pub fn dist(&self, level: &str) -> Result<Factor<T>> {
        Factor::new(vec![self.outcome.clone()], self.at(level)?.to_vec())
    }

    /// Expected outcome value at each treatment level.
    pub fn expectations(&self, values: &OutcomeValues<T>) -> Vec<T> {
        self.rows.iter().map(|r| values.expectation(r)).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| crate::scalar::max_abs_diff(a, b))
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn check_roles<T: Prob>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    set: &[&str],
) -> Result<(usize, usize)> {
    let t = net.index_of(treatment)?;
    let o = net.index_of(outcome)?;
    if t == o {
        return Err(Error::InvalidArgument(
            "treatment and outcome must differ".into(),
        ));
    }
    for (k, s) in set.iter().enumerate() {
        net.index_of(s)?;
        if *s == treatment || *s == outcome {
            return Err(Error::InvalidArgument(
                "adjustment set must exclude treatment and outcome".into(),
            ));
        }
        if set[..k].contains(s) {
            return Err(Error::Duplicate(s.to_string()));
        }
    }
    Ok((t, o))
}

fn describe_stratum(vars: &[Variable], mut k: usize) -> String {
    if vars.is_empty() {
        return "(empty set)".into();
    }
    let mut states = vec![0; vars.len()];
    for (i, v) in vars.iter().enumerate().rev() {
        states[i] = k % v.cardinality();
        k /= v.cardinality();
    }
    vars.iter()
        .zip(states)
        .map(|(v, s)| format!("{}={}", v.name(), v.state(s)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Joint marginal over `[treatment, set.., outcome]` flattened as
/// `(level, stratum, outcome_state)`.
pub(crate) struct Strata<T> {
    pub treatment: Variable,
    pub outcome: Variable,
    pub set_vars: Vec<Variable>,
    pub n_strata: usize,
    values: Vec<T>,
}

impl<T: Prob> Strata<T> {
    pub fn new(
        net: &DiscreteBayesNet<T>,
        treatment: &str,
        outcome: &str,
        set: &[&str],
    ) -> Result<Self> {
        check_roles(net, treatment, outcome, set)?;
        let mut keep = Vec::with_capacity(set.len() + 2);
        keep.push(treatment);
        keep.extend_from_slice(set);
        keep.push(outcome);
        let m = net.joint()?.marginal(&keep)?;
        let set_vars: Vec<Variable> = m.scope()[1..=set.len()].to_vec();
        Ok(Strata {
            treatment: m.scope()[0].clone(),
            outcome: m.scope()[set.len() + 1].clone(),
            n_strata: set_vars.iter().map(Variable::cardinality).product(),
            set_vars,
            values: m.values().to_vec(),
        })
    }

    pub fn levels(&self) -> usize {
        self.treatment.cardinality()
    }

    pub fn states(&self) -> usize {
        self.outcome.cardinality()
    }

    /// `p(z, s, y)`
    #[inline]
    pub fn p(&self, z: usize, k: usize, y: usize) -> T {
        self.values[(z * self.n_strata + k) * self.states() + y]
    }

    /// `p(z, s)`
    pub fn p_zs(&self, z: usize, k: usize) -> T {
        (0..self.states()).map(|y| self.p(z, k, y)).sum()
    }

    /// `p(s)`
    pub fn p_s(&self, k: usize) -> T {
        (0..self.levels()).map(|z| self.p_zs(z, k)).sum()
    }

    /// `p(z)`
    pub fn p_z(&self, z: usize) -> T {
        (0..self.n_strata).map(|k| self.p_zs(z, k)).sum()
    }

    pub fn positivity_error(&self, z: usize, k: usize) -> Error {
        Error::PositivityViolation {
            treatment: self.treatment.name().to_string(),
            level: self.treatment.state(z).to_string(),
            stratum: describe_stratum(&self.set_vars, k),
        }
    }
}

/// `p(outcome | do(treatment = z))` for every treatment level.
pub fn true_effect<T: Prob>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
) -> Result<LevelTable<T>> {
    check_roles(net, treatment, outcome, &[])?;
    let tv = net.variable(treatment)?.clone();
    let rows = tv
        .states()
        .iter()
        .map(|level| {
            interventional_distribution(net, &[outcome], &[(treatment, level.as_str())])
                .map(|f| f.values().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelTable {
        treatment: tv,
        outcome: net.variable(outcome)?.clone(),
        rows,
    })
}

/// The adjustment functional `sum_s p(y | z, s) p(s)` for every level `z`.
pub fn adjusted_estimate<T: Prob, S: AsRef<str>>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    set: &[S],
) -> Result<LevelTable<T>> {
    let set: Vec<&str> = set.iter().map(AsRef::as_ref).collect();
    let st = Strata::new(net, treatment, outcome, &set)?;
    let mut rows = vec![vec![T::zero(); st.states()]; st.levels()];
    for k in 0..st.n_strata {
        let ps = st.p_s(k);
        if ps <= T::zero() {
            continue;
        }
        for (z, row) in rows.iter_mut().enumerate() {
            let pzs = st.p_zs(z, k);
            if pzs <= T::zero() {
                return Err(st.positivity_error(z, k));
            }
            for (y, cell) in row.iter_mut().enumerate() {
                *cell = *cell + st.p(z, k, y) / pzs * ps;
            }
        }
    }
    Ok(LevelTable {
        treatment: st.treatment,
        outcome: st.outcome,
        rows,
    })
}

/// The observational conditional `p(y | z)` for every level `z`.
pub fn unadjusted_estimate<T: Prob>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
) -> Result<LevelTable<T>> {
    check_roles(net, treatment, outcome, &[])?;
    let joint = net.joint()?.marginal(&[treatment, outcome])?;
    let tv = joint.scope()[0].clone();
    let ov = joint.scope()[1].clone();
    let rows = tv
        .states()
        .iter()
        .map(|level| {
            joint
                .condition(&[(treatment, level.as_str())])
                .map(|f| f.values().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelTable {
        treatment: tv,
        outcome: ov,
        rows,
    })
}

/// Average causal effect `E[Y | do(z1)] - E[Y | do(z0)]`.
///
/// `values` defaults to [`OutcomeValues::default_for`] the outcome.
pub fn ace<T: Prob>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    level1: &str,
    level0: &str,
    values: Option<&OutcomeValues<T>>,
) -> Result<T> {
    let ov = net.variable(outcome)?;
    let default;
    let values = match values {
        Some(v) => v,
        None => {
            default = OutcomeValues::default_for(ov);
            &default
        }
    };
    let tv = net.variable(treatment)?;
    tv.state_index(level1)?;
    tv.state_index(level0)?;
    let e1 = values.expectation(
        interventional_distribution(net, &[outcome], &[(treatment, level1)])?.values(),
    );
    let e0 = values.expectation(
        interventional_distribution(net, &[outcome], &[(treatment, level0)])?.values(),
    );
    Ok(e1 - e0)
}

/// Difference of expectations between two levels of a table.
pub fn table_contrast<T: Prob>(
    table: &LevelTable<T>,
    level1: &str,
    level0: &str,
    values: &OutcomeValues<T>,
) -> Result<T> {
    Ok(values.expectation(table.at(level1)?) - values.expectation(table.at(level0)?))
}
