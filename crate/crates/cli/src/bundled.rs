//! Example models shipped inside the binary.

use std::path::Path;

use confound::bayesnet::DiscreteBayesNet;

use crate::{parse_model, CliError};

pub const MODELS: [(&str, &str); 8] = [
    ("fig1_left", include_str!("../models/fig1_left.model")),
    ("fig1_right", include_str!("../models/fig1_right.model")),
    ("fig2_model1", include_str!("../models/fig2_model1.model")),
    ("fig2_model2", include_str!("../models/fig2_model2.model")),
    (
        "modelA_observed",
        include_str!("../models/modelA_observed.model"),
    ),
    ("modelB", include_str!("../models/modelB.model")),
    ("modelC", include_str!("../models/modelC.model")),
    ("modelD", include_str!("../models/modelD.model")),
];

/// Text of a bundled model, by name with or without the `.model` suffix.
pub fn text(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".model").unwrap_or(name);
    MODELS.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
}

/// Reads `source` as a file path if it exists, else as a bundled model name.
pub fn load_text(source: &str) -> Result<String, CliError> {
    let path = Path::new(source);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{source}: {e}")));
    }
    text(source).map(str::to_string).ok_or_else(|| {
        let names: Vec<&str> = MODELS.iter().map(|(n, _)| *n).collect();
        CliError::usage(format!(
            "`{source}` is neither a file nor a bundled model ({})",
            names.join(", ")
        ))
    })
}

pub fn load(source: &str) -> Result<DiscreteBayesNet<f64>, CliError> {
    parse_model(&load_text(source)?)
}
