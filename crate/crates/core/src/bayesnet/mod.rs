//! Discrete Bayesian networks: variables, CPTs, factors, exact inference by
//! joint enumeration, and seeded forward sampling.

mod cpt;
mod factor;
mod net;
mod sample;
mod variable;

pub use cpt::Cpt;
pub use factor::Factor;
pub use net::{DiscreteBayesNet, DEFAULT_JOINT_CAP};
pub use sample::{empirical_joint, forward_sample, Dataset};
pub use variable::Variable;
