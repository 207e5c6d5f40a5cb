use serde::Serialize;

use crate::error::{Error, Result};

/// A discrete variable with an ordered list of state labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new<N, I, S>(name: N, states: I) -> Result<Self>
    where
        N: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.len() < 2 {
            return Err(Error::Validation(format!(
                "variable `{name}` needs at least two states"
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::Validation(format!(
                    "duplicate state label `{s}` in variable `{name}`"
                )));
            }
        }
        Ok(Variable { name, states })
    }

    /// A variable with states `"0"` and `"1"`.
    pub fn binary(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            states: vec!["0".into(), "1".into()],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownState {
                var: self.name.clone(),
                state: label.to_string(),
            })
    }

    pub fn state(&self, i: usize) -> &str {
        &self.states[i]
    }
}

/// Row-major mixed-radix indexing: the first dimension varies slowest.
pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

/// Advances a mixed-radix counter; returns false after the last configuration.
pub(crate) fn next_config(cfg: &mut [usize], cards: &[usize]) -> bool {
    for i in (0..cfg.len()).rev() {
        cfg[i] += 1;
        if cfg[i] < cards[i] {
            return true;
        }
        cfg[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_lookup() {
        let v = Variable::new("Smoker", ["no", "yes"]).unwrap();
        assert_eq!(v.state_index("yes").unwrap(), 1);
        assert!(matches!(
            v.state_index("maybe"),
            Err(Error::UnknownState { .. })
        ));
        assert!(Variable::new("A", ["x", "x"]).is_err());
        assert!(Variable::new("A", ["x"]).is_err());
    }

    #[test]
    fn radix_counter() {
        let cards = [2, 3];
        assert_eq!(strides(&cards), [3, 1]);
        let mut cfg = [0, 0];
        let mut seen = vec![cfg.to_vec()];
        while next_config(&mut cfg, &cards) {
            seen.push(cfg.to_vec());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], [0, 1]);
        assert_eq!(seen[3], [1, 0]);
    }
}
