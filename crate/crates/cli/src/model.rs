//! The JSON model-file format.
//!
//! ```json
//! {
//!   "variables": [{ "name": "X", "states": ["0", "1"] }],
//!   "edges": [["X", "Y"]],
//!   "cpts": { "X": { "parents": [], "table": [[0.5, 0.5]] } }
//! }
//! ```
//!
//! Table rows enumerate parent configurations with the first listed parent
//! varying slowest; columns follow the child's state list. Unknown fields are
//! rejected. [`ModelFile::to_text`] is the canonical serialization.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use confound::bayesnet::{Cpt, DiscreteBayesNet, Variable};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptSpec {
    pub parents: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub variables: Vec<VariableSpec>,
    pub edges: Vec<(String, String)>,
    pub cpts: BTreeMap<String, CptSpec>,
}

/// Where a model file went wrong: a text position for syntax errors, a
/// field path for structural ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Text { line: usize, column: usize },
    Field(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub location: Location,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::Text { line, column } => {
                write!(f, "line {line}, column {column}: {}", self.reason)
            }
            Location::Field(path) => write!(f, "{path}: {}", self.reason),
        }
    }
}

impl std::error::Error for ParseError {}

fn field_error(path: impl Into<String>, reason: impl Into<String>) -> ParseError {
    ParseError {
        location: Location::Field(path.into()),
        reason: reason.into(),
    }
}

impl ModelFile {
    /// Parses the text and checks its shape. Probability invariants are left
    /// to [`DiscreteBayesNet`] validation.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let model: ModelFile = serde_json::from_str(text).map_err(|e| ParseError {
            location: Location::Text {
                line: e.line(),
                column: e.column(),
            },
            reason: e
                .to_string()
                .split(" at line ")
                .next()
                .unwrap_or_default()
                .to_string(),
        })?;
        model.check_shape()?;
        Ok(model)
    }

    fn check_shape(&self) -> Result<(), ParseError> {
        let mut names = HashSet::new();
        let mut cards = BTreeMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            if !names.insert(v.name.as_str()) {
                return Err(field_error(
                    format!("variables[{i}].name"),
                    format!("duplicate variable `{}`", v.name),
                ));
            }
            cards.insert(v.name.as_str(), v.states.len());
        }
        for (i, (p, c)) in self.edges.iter().enumerate() {
            for end in [p, c] {
                if !names.contains(end.as_str()) {
                    return Err(field_error(
                        format!("edges[{i}]"),
                        format!("unknown variable `{end}`"),
                    ));
                }
            }
        }
        for v in &self.variables {
            if !self.cpts.contains_key(&v.name) {
                return Err(field_error("cpts", format!("missing CPT for `{}`", v.name)));
            }
        }
        for (child, cpt) in &self.cpts {
            let path = format!("cpts.{child}");
            let Some(&card) = cards.get(child.as_str()) else {
                return Err(field_error(
                    path,
                    format!("CPT for unknown variable `{child}`"),
                ));
            };
            let mut rows = 1usize;
            for p in &cpt.parents {
                let Some(&pc) = cards.get(p.as_str()) else {
                    return Err(field_error(
                        format!("{path}.parents"),
                        format!("unknown variable `{p}`"),
                    ));
                };
                rows = rows.saturating_mul(pc);
            }
            if cpt.table.len() != rows {
                return Err(field_error(
                    format!("{path}.table"),
                    format!("CPT `{child}` needs {rows} rows, found {}", cpt.table.len()),
                ));
            }
            for (r, row) in cpt.table.iter().enumerate() {
                if row.len() != card {
                    return Err(field_error(
                        format!("{path}.table[{r}]"),
                        format!(
                            "CPT `{child}` row needs {card} entries, found {}",
                            row.len()
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Builds and validates the network.
    pub fn to_net(&self) -> confound::Result<DiscreteBayesNet<f64>> {
        let variables = self
            .variables
            .iter()
            .map(|v| Variable::new(v.name.clone(), v.states.iter().cloned()))
            .collect::<confound::Result<Vec<_>>>()?;
        let cpts = self
            .variables
            .iter()
            .filter_map(|v| self.cpts.get_key_value(&v.name))
            .map(|(child, c)| Cpt::new(child.clone(), c.parents.iter().cloned(), c.table.clone()))
            .collect();
        DiscreteBayesNet::from_parts(variables, &self.edges, cpts)
    }

    pub fn from_net(net: &DiscreteBayesNet<f64>) -> Self {
        ModelFile {
            variables: net
                .variables()
                .iter()
                .map(|v| VariableSpec {
                    name: v.name().to_string(),
                    states: v.states().to_vec(),
                })
                .collect(),
            edges: net
                .dag()
                .edges()
                .into_iter()
                .map(|(p, c)| (p.to_string(), c.to_string()))
                .collect(),
            cpts: net
                .cpts()
                .iter()
                .map(|c| {
                    (
                        c.child().to_string(),
                        CptSpec {
                            parents: c.parents().to_vec(),
                            table: c.rows().to_vec(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// Canonical text: one variable, edge or table row per line, compact
    /// JSON within a line, trailing newline.
    pub fn to_text(&self) -> String {
        let mut out = String::from("{\n");
        let block = |out: &mut String, items: Vec<String>| {
            if items.is_empty() {
                out.push_str("[]");
            } else {
                out.push_str("[\n");
                out.push_str(&items.join(",\n"));
                out.push_str("\n  ]");
            }
        };
        out.push_str("  \"variables\": ");
        block(
            &mut out,
            self.variables
                .iter()
                .map(|v| format!("    {}", compact(v)))
                .collect(),
        );
        out.push_str(",\n  \"edges\": ");
        block(
            &mut out,
            self.edges
                .iter()
                .map(|e| format!("    {}", compact(e)))
                .collect(),
        );
        out.push_str(",\n  \"cpts\": {");
        let cpts: Vec<String> = self
            .cpts
            .iter()
            .map(|(child, c)| {
                let rows: Vec<String> = c
                    .table
                    .iter()
                    .map(|r| format!("      {}", compact(r)))
                    .collect();
                format!(
                    "    {}: {{\"parents\": {}, \"table\": [\n{}\n    ]}}",
                    compact(child),
                    compact(&c.parents),
                    rows.join(",\n")
                )
            })
            .collect();
        if !cpts.is_empty() {
            out.push('\n');
            out.push_str(&cpts.join(",\n"));
            out.push_str("\n  ");
        }
        out.push_str("}\n}\n");
        out
    }
}

fn compact<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("model fields serialize")
}

/// Parses and validates in one step.
pub fn parse_model(text: &str) -> Result<DiscreteBayesNet<f64>, crate::CliError> {
    let file = ModelFile::parse(text)?;
    Ok(file.to_net()?)
}
