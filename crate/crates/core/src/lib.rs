//! Exact reasoning about confounding in discrete causal Bayesian networks.
//!
//! The crate covers DAGs and d-separation ([`graph`]), discrete networks with
//! exact enumeration and seeded sampling ([`bayesnet`]), interventions and
//! the estimators compared against them ([`intervention`]), and latent
//! confounding scenarios ([`latent`]).
//!
//! Numeric code is generic over [`Prob`], implemented for `f64` and `f32`.
//! The aliases below fix the scalar to `f64` (or `f32` with a `32` suffix).

pub mod bayesnet;
pub mod error;
pub mod format;
pub mod graph;
pub mod intervention;
pub mod latent;
pub mod scalar;

pub use error::{Error, ErrorClass, Result};
pub use graph::Dag;
pub use scalar::Prob;

pub type Net = bayesnet::DiscreteBayesNet<f64>;
pub type Net32 = bayesnet::DiscreteBayesNet<f32>;
pub type Cpt64 = bayesnet::Cpt<f64>;
pub type Cpt32 = bayesnet::Cpt<f32>;
pub type Factor64 = bayesnet::Factor<f64>;
pub type Factor32 = bayesnet::Factor<f32>;
pub type Scenario = latent::ScenarioParams<f64>;
pub type Scenario32 = latent::ScenarioParams<f32>;
