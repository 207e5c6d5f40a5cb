use std::fmt;

use serde::Serialize;

use crate::bayesnet::DiscreteBayesNet;
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// How observing one cause shifts belief in the other once their common
/// effect is seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionClass {
    /// `p(w=1 | x=1, u=1) > p(w=1 | x=1, u=0)`
    Monotonic,
    /// `p(w=1 | x=1, u=1) < p(w=1 | x=1, u=0)`
    ExplainingAway,
    None,
    /// Reserved for multi-state causes whose shifts disagree in sign.
    Mixed,
}

impl InteractionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionClass::Monotonic => "monotonic",
            InteractionClass::ExplainingAway => "explaining_away",
            InteractionClass::None => "none",
            InteractionClass::Mixed => "mixed",
        }
    }
}

impl fmt::Display for InteractionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `p(w=1 | x=1, u=1) - p(w=1 | x=1, u=0)` from the exact joint.
pub fn interaction_delta<T: Prob>(
    net: &DiscreteBayesNet<T>,
    u: &str,
    w: &str,
    x: &str,
) -> Result<T> {
    for v in [u, w, x] {
        if net.variable(v)?.cardinality() != 2 {
            return Err(Error::Structure(format!("`{v}` is not binary")));
        }
    }
    let parents = net.dag().parents(x)?;
    if u == w || !parents.contains(&u) || !parents.contains(&w) {
        return Err(Error::Structure(format!(
            "`{u}` and `{w}` must both be parents of `{x}`"
        )));
    }
    let state = |v: &str| net.variable(v).map(|var| var.state(1).to_string());
    let (u1, w1, x1) = (state(u)?, state(w)?, state(x)?);
    let u0 = net.variable(u)?.state(0).to_string();
    let with_u1 = net.query(&[w], &[(x, x1.as_str()), (u, u1.as_str())])?;
    let with_u0 = net.query(&[w], &[(x, x1.as_str()), (u, u0.as_str())])?;
    let idx = net.variable(w)?.state_index(&w1)?;
    Ok(with_u1.values()[idx] - with_u0.values()[idx])
}

/// Classifies the interaction of two binary causes `u`, `w` of `x`.
pub fn classify_interaction<T: Prob>(
    net: &DiscreteBayesNet<T>,
    u: &str,
    w: &str,
    x: &str,
) -> Result<InteractionClass> {
    let delta = interaction_delta(net, u, w, x)?;
    Ok(classify_delta(delta))
}

pub fn classify_delta<T: Prob>(delta: T) -> InteractionClass {
    let tol = T::arith_tol();
    if delta < -tol {
        InteractionClass::ExplainingAway
    } else if delta > tol {
        InteractionClass::Monotonic
    } else {
        InteractionClass::None
    }
}
