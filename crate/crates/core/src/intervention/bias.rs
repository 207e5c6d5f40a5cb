use serde::Serialize;

use super::{
    adjusted_estimate, check_roles, table_contrast, true_effect, unadjusted_estimate, LevelTable,
    OutcomeValues, Strata,
};
use crate::bayesnet::DiscreteBayesNet;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Bias from conditioning on `covariates` instead of ignoring them:
///
/// `sum_{y,x} y p(y|z1,x)[p(x) - p(x|z1)] - sum_{y,x} y p(y|z0,x)[p(x) - p(x|z0)]`
///
/// Evaluated straight from the joint, independently of the estimator
/// functions; it equals `ace_adjusted - ace_unadjusted`.
pub fn conditioning_bias<T: Prob, S: AsRef<str>>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    covariates: &[S],
    level1: &str,
    level0: &str,
    values: Option<&OutcomeValues<T>>,
) -> Result<T> {
    let covariates: Vec<&str> = covariates.iter().map(AsRef::as_ref).collect();
    check_roles(net, treatment, outcome, &covariates)?;
    let st = Strata::new(net, treatment, outcome, &covariates)?;
    let values = values
        .cloned()
        .unwrap_or_else(|| OutcomeValues::default_for(&st.outcome));
    let z1 = st.treatment.state_index(level1)?;
    let z0 = st.treatment.state_index(level0)?;
    let term = |z: usize| -> Result<T> {
        let pz = st.p_z(z);
        if pz <= T::zero() {
            return Err(Error::ZeroProbabilityEvidence(format!(
                "{}={}",
                st.treatment.name(),
                st.treatment.state(z)
            )));
        }
        let mut acc = T::zero();
        for k in 0..st.n_strata {
            let px = st.p_s(k);
            if px <= T::zero() {
                continue;
            }
            let pzx = st.p_zs(z, k);
            if pzx <= T::zero() {
                return Err(st.positivity_error(z, k));
            }
            let px_given_z = pzx / pz;
            for (y, &yv) in values.values().iter().enumerate() {
                acc = acc + yv * (st.p(z, k, y) / pzx) * (px - px_given_z);
            }
        }
        Ok(acc)
    };
    Ok(term(z1)? - term(z0)?)
}

/// Estimates from one adjustment set, with their errors against the truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedEntry<T> {
    pub set: Vec<String>,
    pub backdoor_admissible: bool,
    pub table: LevelTable<T>,
    pub ace: T,
    /// Estimated minus true expected outcome, per treatment level.
    pub level_errors: Vec<T>,
    pub ace_error: T,
    /// `ace - ace_unadjusted`, computed by the closed-form bias expression.
    pub conditioning_bias: T,
}

/// True, adjusted and unadjusted effects of one treatment on one outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectReport<T> {
    pub treatment: String,
    pub outcome: String,
    pub level1: String,
    pub level0: String,
    pub outcome_values: Vec<T>,
    pub truth: LevelTable<T>,
    pub unadjusted: LevelTable<T>,
    pub adjusted: Vec<AdjustedEntry<T>>,
    pub ace_true: T,
    pub ace_unadjusted: T,
    pub unadjusted_level_errors: Vec<T>,
    pub unadjusted_ace_error: T,
}

/// Computes every estimate for each covariate set and cross-checks the
/// closed-form bias against the difference of contrasts.
pub fn effect_report<T: Prob, S: AsRef<str>>(
    net: &DiscreteBayesNet<T>,
    treatment: &str,
    outcome: &str,
    covariate_sets: &[Vec<S>],
    level1: &str,
    level0: &str,
) -> Result<EffectReport<T>> {
    check_roles(net, treatment, outcome, &[])?;
    let values = OutcomeValues::default_for(net.variable(outcome)?);
    let truth = true_effect(net, treatment, outcome)?;
    let unadjusted = unadjusted_estimate(net, treatment, outcome)?;
    let ace_true = table_contrast(&truth, level1, level0, &values)?;
    let ace_unadjusted = table_contrast(&unadjusted, level1, level0, &values)?;
    let true_means = truth.expectations(&values);
    let diff = |t: &LevelTable<T>| -> Vec<T> {
        t.expectations(&values)
            .into_iter()
            .zip(&true_means)
            .map(|(e, &m)| e - m)
            .collect()
    };
    let mut adjusted = Vec::with_capacity(covariate_sets.len());
    for set in covariate_sets {
        let names: Vec<&str> = set.iter().map(AsRef::as_ref).collect();
        let table = adjusted_estimate(net, treatment, outcome, &names)?;
        let ace = table_contrast(&table, level1, level0, &values)?;
        let bias = conditioning_bias(
            net,
            treatment,
            outcome,
            &names,
            level1,
            level0,
            Some(&values),
        )?;
        let scale = T::one()
            + values
                .values()
                .iter()
                .fold(T::zero(), |m, v| m.max(v.abs()));
        if ((ace - ace_unadjusted) - bias).abs() > T::arith_tol() * T::lit(10.0) * scale {
            return Err(Error::Domain(format!(
                "bias identity failed for [{}]: {} vs {}",
                names.join(", "),
                ace - ace_unadjusted,
                bias
            )));
        }
        adjusted.push(AdjustedEntry {
            set: names.iter().map(|s| s.to_string()).collect(),
            backdoor_admissible: net.dag().backdoor_admissible(treatment, outcome, &names)?,
            level_errors: diff(&table),
            ace_error: ace - ace_true,
            table,
            ace,
            conditioning_bias: bias,
        });
    }
    Ok(EffectReport {
        treatment: treatment.to_string(),
        outcome: outcome.to_string(),
        level1: level1.to_string(),
        level0: level0.to_string(),
        outcome_values: values.values().to_vec(),
        unadjusted_level_errors: diff(&unadjusted),
        unadjusted_ace_error: ace_unadjusted - ace_true,
        truth,
        unadjusted,
        adjusted,
        ace_true,
        ace_unadjusted,
    })
}
