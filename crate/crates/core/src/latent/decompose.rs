//! Common-cause decomposition of a binary association.
//!
//! Given `p(x|y)` and `p(x|y')`, a binary common cause `T` with
//! `p(x|y,t) = p(x|y',t) = p(x|t)` (and likewise for `t'`) places both
//! conditionals on the segment between `p(x|t')` and `p(x|t)`. Each one cuts
//! the segment in the ratio `p(t|.) : p(t'|.)`, so the weights follow from
//! the endpoints alone.

use serde::Serialize;

use crate::bayesnet::{Cpt, DiscreteBayesNet, Variable};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Which endpoint belongs to state `t` of the common cause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `p(x|t') < p(x|t)`: `t` sits at the upper endpoint.
    #[default]
    UpperIsT,
    /// `p(x|t) < p(x|t')`: `t` sits at the lower endpoint.
    LowerIsT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommonCauseDecomposition<T> {
    pub p_x_given_y: T,
    pub p_x_given_yprime: T,
    pub p_x_given_t: T,
    pub p_x_given_tprime: T,
    pub p_t_given_y: T,
    pub p_t_given_yprime: T,
}

/// Residuals of the two identities for `y` and `y'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck<T> {
    pub reconstruction_y: T,
    pub reconstruction_yprime: T,
    pub ratio_y: T,
    pub ratio_yprime: T,
}

impl<T: Prob> IdentityCheck<T> {
    pub fn max_residual(&self) -> T {
        self.reconstruction_y
            .abs()
            .max(self.reconstruction_yprime.abs())
            .max(self.ratio_y.abs())
            .max(self.ratio_yprime.abs())
    }
}

impl<T: Prob> CommonCauseDecomposition<T> {
    pub fn p_tprime_given_y(&self) -> T {
        T::one() - self.p_t_given_y
    }

    pub fn p_tprime_given_yprime(&self) -> T {
        T::one() - self.p_t_given_yprime
    }

    fn residuals(&self, pxy: T, pt: T) -> (T, T) {
        let ptp = T::one() - pt;
        let rec = ptp * self.p_x_given_tprime + pt * self.p_x_given_t - pxy;
        // cross-multiplied form of (p(x|y) - p(x|t')) / (p(x|t) - p(x|y)) = p(t|y) / p(t'|y)
        let ratio = ptp * (pxy - self.p_x_given_tprime) - pt * (self.p_x_given_t - pxy);
        (rec, ratio)
    }

    /// Signed residuals of the reconstruction and dissection-ratio identities.
    pub fn check(&self) -> IdentityCheck<T> {
        let (ry, qy) = self.residuals(self.p_x_given_y, self.p_t_given_y);
        let (ryp, qyp) = self.residuals(self.p_x_given_yprime, self.p_t_given_yprime);
        IdentityCheck {
            reconstruction_y: ry,
            reconstruction_yprime: ryp,
            ratio_y: qy,
            ratio_yprime: qyp,
        }
    }

    /// `(p(x|y) - p(x|t')) / (p(x|t) - p(x|y))`, when the denominator is nonzero.
    pub fn dissection_ratio(&self) -> Option<T> {
        let den = self.p_x_given_t - self.p_x_given_y;
        (den != T::zero()).then(|| (self.p_x_given_y - self.p_x_given_tprime) / den)
    }

    /// A net `T -> Y`, `T -> X` realizing this decomposition for `p(y) = p_y`.
    ///
    /// States `"1"` stand for `t`, `y` and `x`; `"0"` for the primed states.
    pub fn common_cause_net(&self, p_y: T) -> Result<DiscreteBayesNet<T>> {
        unit("p_y", p_y)?;
        let half = T::lit(0.5);
        let p_t = self.p_t_given_y * p_y + self.p_t_given_yprime * (T::one() - p_y);
        // rows for impossible states of T are arbitrary but must be valid
        let p_y_given = |pt_state: T, p_state: T| {
            if p_state > T::zero() {
                (pt_state * p_y / p_state).min(T::one())
            } else {
                half
            }
        };
        let y_given_tprime = p_y_given(self.p_tprime_given_y(), T::one() - p_t);
        let y_given_t = p_y_given(self.p_t_given_y, p_t);
        DiscreteBayesNet::from_cpts(
            vec![
                Variable::binary("T"),
                Variable::binary("Y"),
                Variable::binary("X"),
            ],
            vec![
                Cpt::binary("T", [] as [&str; 0], &[p_t]),
                Cpt::binary("Y", ["T"], &[y_given_tprime, y_given_t]),
                Cpt::binary("X", ["T"], &[self.p_x_given_tprime, self.p_x_given_t]),
            ],
        )
    }
}

fn unit<T: Prob>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} is not a probability")))
    }
}

/// Decomposes with `t` at the upper endpoint.
pub fn decompose_common_cause<T: Prob>(
    p_x_given_y: T,
    p_x_given_yprime: T,
    endpoint_lo: T,
    endpoint_hi: T,
) -> Result<CommonCauseDecomposition<T>> {
    decompose_oriented(
        p_x_given_y,
        p_x_given_yprime,
        endpoint_lo,
        endpoint_hi,
        Orientation::UpperIsT,
    )
}

pub fn decompose_oriented<T: Prob>(
    p_x_given_y: T,
    p_x_given_yprime: T,
    endpoint_lo: T,
    endpoint_hi: T,
    orientation: Orientation,
) -> Result<CommonCauseDecomposition<T>> {
    unit("p(x|y)", p_x_given_y)?;
    unit("p(x|y')", p_x_given_yprime)?;
    unit("lower endpoint", endpoint_lo)?;
    unit("upper endpoint", endpoint_hi)?;
    if endpoint_lo > endpoint_hi {
        return Err(Error::InfeasibleEndpoints(format!(
            "lower endpoint {endpoint_lo} exceeds upper endpoint {endpoint_hi}"
        )));
    }
    let (lo_in, hi_in) = (
        p_x_given_y.min(p_x_given_yprime),
        p_x_given_y.max(p_x_given_yprime),
    );
    if endpoint_lo == endpoint_hi && lo_in != hi_in {
        return Err(Error::DegenerateEndpoints);
    }
    if endpoint_lo > lo_in || endpoint_hi < hi_in {
        return Err(Error::InfeasibleEndpoints(format!(
            "[{endpoint_lo}, {endpoint_hi}] does not contain [{lo_in}, {hi_in}]"
        )));
    }
    let width = endpoint_hi - endpoint_lo;
    let upper_weight = |p: T| {
        if width > T::zero() {
            ((p - endpoint_lo) / width).max(T::zero()).min(T::one())
        } else {
            // both inputs equal both endpoints; any split works, T independent of Y
            T::lit(0.5)
        }
    };
    let (p_x_given_t, p_x_given_tprime, w_y, w_yp) = match orientation {
        Orientation::UpperIsT => (
            endpoint_hi,
            endpoint_lo,
            upper_weight(p_x_given_y),
            upper_weight(p_x_given_yprime),
        ),
        Orientation::LowerIsT => (
            endpoint_lo,
            endpoint_hi,
            T::one() - upper_weight(p_x_given_y),
            T::one() - upper_weight(p_x_given_yprime),
        ),
    };
    Ok(CommonCauseDecomposition {
        p_x_given_y,
        p_x_given_yprime,
        p_x_given_t,
        p_x_given_tprime,
        p_t_given_y: w_y,
        p_t_given_yprime: w_yp,
    })
}

/// Picks endpoints `min - margin` and `max + margin`, clamped to `[0, 1]`.
pub fn decompose_with_margin<T: Prob>(
    p_x_given_y: T,
    p_x_given_yprime: T,
    margin: T,
    orientation: Orientation,
) -> Result<CommonCauseDecomposition<T>> {
    if margin.is_nan() || margin < T::zero() {
        return Err(Error::Domain(format!("margin {margin} is negative")));
    }
    let lo = (p_x_given_y.min(p_x_given_yprime) - margin).max(T::zero());
    let hi = (p_x_given_y.max(p_x_given_yprime) + margin).min(T::one());
    decompose_oriented(p_x_given_y, p_x_given_yprime, lo, hi, orientation)
}

/// Default margin for [`decompose_with_margin`].
pub const DEFAULT_MARGIN: f64 = 0.05;
