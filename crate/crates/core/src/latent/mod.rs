//! Latent-structure scenarios and the tools for reasoning about them:
//! parameterized templates, exact bias scans, the common-cause
//! decomposition, correlation bounds and interaction classification.

mod correlation;
mod decompose;
mod interaction;
mod scan;
mod scenario;

pub use correlation::{
    bound_slack, correlation_feasible, third_correlation_interval, CorrelationInterval,
};
pub use decompose::{
    decompose_common_cause, decompose_oriented, decompose_with_margin, CommonCauseDecomposition,
    IdentityCheck, Orientation, DEFAULT_MARGIN,
};
pub use interaction::{classify_delta, classify_interaction, interaction_delta, InteractionClass};
pub use scan::{
    bias_scan, dependence_strength, evaluate_cell, mutual_information, write_scan_csv, CellMetrics,
    GridAxis, GridSpec, ScanOptions, ScanResult, ScanRoles, ScanSummary, StrengthBand, Tally,
    Winner,
};
pub use scenario::{ScenarioParams, Template};
