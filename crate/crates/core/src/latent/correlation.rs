//! Feasibility of three pairwise correlations.
//!
//! Three correlations are jointly attainable iff the 3x3 correlation matrix
//! is positive semidefinite, i.e.
//! `r_ac^2 + r_bc^2 + r_ab^2 <= 1 + 2 r_ab r_ac r_bc`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Prob;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Prob> CorrelationInterval<T> {
    pub fn contains(&self, r: T) -> bool {
        self.lo <= r && r <= self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains(T::zero())
    }
}

fn check<T: Prob>(name: &str, r: T) -> Result<()> {
    if r >= -T::one() && r <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {r} is outside [-1, 1]")))
    }
}

/// `1 + 2 r_ab r_ac r_bc - r_ab^2 - r_ac^2 - r_bc^2`; nonnegative iff feasible.
pub fn bound_slack<T: Prob>(r_ab: T, r_ac: T, r_bc: T) -> T {
    T::one() + T::lit(2.0) * r_ab * r_ac * r_bc - r_ab * r_ab - r_ac * r_ac - r_bc * r_bc
}

/// The range of `r_ab` compatible with the other two correlations.
pub fn third_correlation_interval<T: Prob>(r_ac: T, r_bc: T) -> Result<CorrelationInterval<T>> {
    check("r_ac", r_ac)?;
    check("r_bc", r_bc)?;
    let center = r_ac * r_bc;
    let spread = ((T::one() - r_ac * r_ac) * (T::one() - r_bc * r_bc))
        .max(T::zero())
        .sqrt();
    Ok(CorrelationInterval {
        lo: (center - spread).max(-T::one()),
        hi: (center + spread).min(T::one()),
    })
}

/// Whether the three correlations can coexist, with `arith_tol` slack.
pub fn correlation_feasible<T: Prob>(r_ab: T, r_ac: T, r_bc: T) -> Result<bool> {
    check("r_ab", r_ab)?;
    check("r_ac", r_ac)?;
    check("r_bc", r_bc)?;
    Ok(bound_slack(r_ab, r_ac, r_bc) >= -T::arith_tol())
}
