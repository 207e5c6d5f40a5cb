use std::collections::HashSet;

use serde::Serialize;

use super::variable::{next_config, strides, Variable};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// A nonnegative table over an ordered scope of variables.
///
/// Values are stored row-major: the first scope variable varies slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor<T> {
    scope: Vec<Variable>,
    values: Vec<T>,
}

impl<T: Prob> Factor<T> {
    pub fn new(scope: Vec<Variable>, values: Vec<T>) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &scope {
            if !names.insert(v.name()) {
                return Err(Error::Duplicate(v.name().to_string()));
            }
        }
        let size: usize = scope.iter().map(Variable::cardinality).product();
        if values.len() != size {
            return Err(Error::Validation(format!(
                "factor has {} values, scope needs {size}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(Error::Validation(format!(
                "factor entry {bad} is not a nonnegative real"
            )));
        }
        Ok(Factor { scope, values })
    }

    /// Factor with an empty scope holding a single value.
    pub fn scalar(value: T) -> Self {
        Factor {
            scope: Vec::new(),
            values: vec![value],
        }
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn cards(&self) -> Vec<usize> {
        self.scope.iter().map(Variable::cardinality).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.scope
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.scope[self.position(name)?])
    }

    pub fn sum(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Entry at a configuration of state indices, in scope order.
    pub fn at(&self, config: &[usize]) -> T {
        let idx: usize = config
            .iter()
            .zip(strides(&self.cards()))
            .map(|(c, s)| c * s)
            .sum();
        self.values[idx]
    }

    /// Entry at a full assignment given as `(variable, state label)` pairs.
    pub fn get<S: AsRef<str>>(&self, assignment: &[(S, S)]) -> Result<T> {
        let mut config = vec![usize::MAX; self.scope.len()];
        for (var, state) in assignment {
            let pos = self.position(var.as_ref())?;
            config[pos] = self.scope[pos].state_index(state.as_ref())?;
        }
        if let Some(missing) = config.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "assignment does not fix `{}`",
                self.scope[missing].name()
            )));
        }
        Ok(self.at(&config))
    }

    /// Every configuration paired with its value, in storage order.
    pub fn entries(&self) -> Vec<(Vec<usize>, T)> {
        let cards = self.cards();
        let mut cfg = vec![0; cards.len()];
        let mut out = Vec::with_capacity(self.values.len());
        for &v in &self.values {
            out.push((cfg.clone(), v));
            next_config(&mut cfg, &cards);
        }
        out
    }

    pub fn normalized(&self) -> Result<Self> {
        let total = self.sum();
        if total <= T::zero() {
            return Err(Error::ZeroProbabilityEvidence(
                "factor has zero mass".into(),
            ));
        }
        Ok(Factor {
            scope: self.scope.clone(),
            values: self.values.iter().map(|&v| v / total).collect(),
        })
    }

    /// Sums out everything not in `keep`; the result's scope follows `keep`'s order.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let mut positions = Vec::with_capacity(keep.len());
        for name in keep {
            let p = self.position(name.as_ref())?;
            if positions.contains(&p) {
                return Err(Error::Duplicate(name.as_ref().to_string()));
            }
            positions.push(p);
        }
        let scope: Vec<Variable> = positions.iter().map(|&p| self.scope[p].clone()).collect();
        let out_cards: Vec<usize> = scope.iter().map(Variable::cardinality).collect();
        let out_strides = strides(&out_cards);
        // stride contributed by each source dimension to the output index
        let mut map = vec![0usize; self.scope.len()];
        for (k, &p) in positions.iter().enumerate() {
            map[p] = out_strides[k];
        }
        let cards = self.cards();
        let mut values = vec![T::zero(); out_cards.iter().product()];
        let mut cfg = vec![0; cards.len()];
        for &v in &self.values {
            let idx: usize = cfg.iter().zip(&map).map(|(c, m)| c * m).sum();
            values[idx] = values[idx] + v;
            next_config(&mut cfg, &cards);
        }
        Ok(Factor { scope, values })
    }

    /// Restricts to `evidence` and drops the evidence variables, without renormalizing.
    pub fn reduce<S: AsRef<str>>(&self, evidence: &[(S, S)]) -> Result<Self> {
        let mut fixed = vec![None; self.scope.len()];
        for (var, state) in evidence {
            let p = self.position(var.as_ref())?;
            let s = self.scope[p].state_index(state.as_ref())?;
            match fixed[p] {
                Some(prev) if prev != s => {
                    return Err(Error::InvalidArgument(format!(
                        "conflicting evidence for `{}`",
                        var.as_ref()
                    )))
                }
                _ => fixed[p] = Some(s),
            }
        }
        let keep: Vec<usize> = (0..self.scope.len())
            .filter(|&i| fixed[i].is_none())
            .collect();
        let scope: Vec<Variable> = keep.iter().map(|&i| self.scope[i].clone()).collect();
        let cards = self.cards();
        let mut values = Vec::with_capacity(scope.iter().map(Variable::cardinality).product());
        let mut cfg = vec![0; cards.len()];
        for &v in &self.values {
            if cfg
                .iter()
                .zip(&fixed)
                .all(|(c, f)| f.is_none_or(|s| s == *c))
            {
                values.push(v);
            }
            next_config(&mut cfg, &cards);
        }
        Ok(Factor { scope, values })
    }

    /// Conditional distribution of the remaining variables given `evidence`.
    pub fn condition<S: AsRef<str>>(&self, evidence: &[(S, S)]) -> Result<Self> {
        let reduced = self.reduce(evidence)?;
        if reduced.sum() <= T::zero() {
            let desc = evidence
                .iter()
                .map(|(v, s)| format!("{}={}", v.as_ref(), s.as_ref()))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::ZeroProbabilityEvidence(desc));
        }
        reduced.normalized()
    }

    fn same_scope(&self, other: &Self) -> Result<()> {
        if self.scope != other.scope {
            return Err(Error::InvalidArgument(
                "factors have different scopes".into(),
            ));
        }
        Ok(())
    }

    /// Total-variation distance, half the L1 distance.
    pub fn total_variation(&self, other: &Self) -> Result<T> {
        self.same_scope(other)?;
        let l1: T = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b).abs())
            .sum();
        Ok(l1 / T::lit(2.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.same_scope(other)?;
        Ok(crate::scalar::max_abs_diff(&self.values, &other.values))
    }
}
