//! Parameterized template graphs for the confounding scenarios.
//!
//! All template variables are binary with states `"0"` and `"1"`. A template
//! parameter is `p(node = 1 | parent configuration)` and is named
//! `p_<node>` for roots or `p_<node>_<parent><state>...` otherwise, e.g.
//! `p_y_z1w0` for `p(y = 1 | z = 1, w = 0)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bayesnet::{Cpt, DiscreteBayesNet, Variable};
use crate::error::{Error, Result};
use crate::scalar::Prob;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    /// X confounds Z -> Y: X -> Z, X -> Y, Z -> Y.
    Model1Fig1,
    /// X is a second cause of Y only: X -> Y, Z -> Y.
    Model2Fig1,
    /// Hidden causes U, W of X, with X -> Z, X -> Y as well.
    Model1Fig2,
    /// Observed-level view: X associated with both Z and Y, written as the
    /// complete DAG X -> Z, X -> Y, Z -> Y.
    ModelA,
    /// M-structure with independent hidden causes U and W.
    ModelB,
    /// A single hidden cause V of Z, X and Y.
    ModelC,
    /// M-structure with dependent hidden causes, U -> W.
    ModelD,
}

type Structure = &'static [(&'static str, &'static [&'static str])];

impl Template {
    pub const ALL: [Template; 7] = [
        Template::Model1Fig1,
        Template::Model2Fig1,
        Template::Model1Fig2,
        Template::ModelA,
        Template::ModelB,
        Template::ModelC,
        Template::ModelD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Model1Fig1 => "model1_fig1",
            Template::Model2Fig1 => "model2_fig1",
            Template::Model1Fig2 => "model1_fig2",
            Template::ModelA => "modelA",
            Template::ModelB => "modelB",
            Template::ModelC => "modelC",
            Template::ModelD => "modelD",
        }
    }

    /// Nodes in declaration order with their ordered parent lists.
    pub fn structure(self) -> Structure {
        match self {
            Template::Model1Fig1 | Template::ModelA => {
                &[("X", &[]), ("Z", &["X"]), ("Y", &["Z", "X"])]
            }
            Template::Model2Fig1 => &[("X", &[]), ("Z", &[]), ("Y", &["Z", "X"])],
            Template::Model1Fig2 => &[
                ("U", &[]),
                ("W", &[]),
                ("X", &["U", "W"]),
                ("Z", &["U", "X"]),
                ("Y", &["Z", "X", "W"]),
            ],
            Template::ModelB => &[
                ("U", &[]),
                ("W", &[]),
                ("X", &["U", "W"]),
                ("Z", &["U"]),
                ("Y", &["Z", "W"]),
            ],
            Template::ModelC => &[("V", &[]), ("Z", &["V"]), ("X", &["V"]), ("Y", &["Z", "V"])],
            Template::ModelD => &[
                ("U", &[]),
                ("W", &["U"]),
                ("X", &["U", "W"]),
                ("Z", &["U"]),
                ("Y", &["Z", "W"]),
            ],
        }
    }

    /// Parameter names in structure order.
    pub fn parameter_names(self) -> Vec<String> {
        self.structure()
            .iter()
            .flat_map(|(node, parents)| row_names(node, parents))
            .collect()
    }

    /// The reference parameterization bundled with each template.
    pub fn default_values(self) -> &'static [f64] {
        match self {
            Template::Model1Fig1 => &[0.5, 0.2, 0.8, 0.1, 0.5, 0.6, 0.9],
            Template::Model2Fig1 => &[0.5, 0.5, 0.1, 0.5, 0.6, 0.9],
            Template::Model1Fig2 => &[
                0.4, 0.6, 0.1, 0.7, 0.6, 0.95, 0.2, 0.5, 0.6, 0.9, 0.1, 0.3, 0.2, 0.5, 0.4, 0.6,
                0.5, 0.9,
            ],
            // observational margin of the ModelB defaults over (X, Z, Y)
            Template::ModelA => &[
                0.6,
                0.395,
                0.57,
                0.2966942148760331,
                0.4581395348837209,
                0.5329113924050635,
                0.7771929824561404,
            ],
            Template::ModelB => &[0.4, 0.6, 0.1, 0.7, 0.6, 0.95, 0.3, 0.8, 0.2, 0.5, 0.4, 0.9],
            Template::ModelC => &[0.5, 0.2, 0.7, 0.1, 0.8, 0.2, 0.6, 0.4, 0.9],
            Template::ModelD => &[
                0.4, 0.3, 0.8, 0.1, 0.7, 0.6, 0.95, 0.3, 0.8, 0.2, 0.5, 0.4, 0.9,
            ],
        }
    }

    /// The two hidden causes of the covariate, when the template has them.
    pub fn hidden_causes(self) -> Option<(&'static str, &'static str)> {
        match self {
            Template::Model1Fig2 | Template::ModelB | Template::ModelD => Some(("U", "W")),
            _ => None,
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Template::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown template `{s}`")))
    }
}

fn row_names(node: &str, parents: &[&str]) -> Vec<String> {
    let base = format!("p_{}", node.to_lowercase());
    if parents.is_empty() {
        return vec![base];
    }
    (0..1usize << parents.len())
        .map(|row| {
            let mut name = base.clone();
            name.push('_');
            for (k, p) in parents.iter().enumerate() {
                // first parent varies slowest
                let bit = (row >> (parents.len() - 1 - k)) & 1;
                name.push_str(&p.to_lowercase());
                name.push_str(&bit.to_string());
            }
            name
        })
        .collect()
}

/// A template together with a value for each of its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioParams<T> {
    template: Template,
    values: BTreeMap<String, T>,
}

impl<T: Prob> ScenarioParams<T> {
    /// Requires exactly the template's parameters, each in `[0, 1]`.
    pub fn new(template: Template, values: BTreeMap<String, T>) -> Result<Self> {
        let names = template.parameter_names();
        if let Some(extra) = values.keys().find(|k| !names.contains(k)) {
            return Err(Error::Validation(format!(
                "`{extra}` is not a parameter of {template}"
            )));
        }
        if let Some(missing) = names.iter().find(|n| !values.contains_key(*n)) {
            return Err(Error::Validation(format!(
                "{template} is missing parameter `{missing}`"
            )));
        }
        for (k, &v) in &values {
            check_unit(k, v)?;
        }
        Ok(ScenarioParams { template, values })
    }

    pub fn defaults(template: Template) -> Self {
        let values = template
            .parameter_names()
            .into_iter()
            .zip(template.default_values())
            .map(|(n, &v)| (n, T::lit(v)))
            .collect();
        ScenarioParams { template, values }
    }

    pub fn template(&self) -> Template {
        self.template
    }

    pub fn values(&self) -> &BTreeMap<String, T> {
        &self.values
    }

    pub fn get(&self, name: &str) -> Result<T> {
        self.values.get(name).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("`{name}` is not a parameter of {}", self.template))
        })
    }

    pub fn set(&mut self, name: &str, value: T) -> Result<()> {
        check_unit(name, value)?;
        match self.values.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::InvalidArgument(format!(
                "`{name}` is not a parameter of {}",
                self.template
            ))),
        }
    }

    pub fn with(mut self, name: &str, value: T) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    /// The template's net with these CPT entries.
    pub fn build(&self) -> Result<DiscreteBayesNet<T>> {
        let structure = self.template.structure();
        let variables = structure
            .iter()
            .map(|(n, _)| Variable::binary(*n))
            .collect();
        let cpts = structure
            .iter()
            .map(|(node, parents)| {
                let p_one: Vec<T> = row_names(node, parents)
                    .iter()
                    .map(|n| self.values[n])
                    .collect();
                Cpt::binary(*node, parents.iter().copied(), &p_one)
            })
            .collect();
        DiscreteBayesNet::from_cpts(variables, cpts)
    }
}

fn check_unit<T: Prob>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "parameter `{name}` = {v} is not in [0, 1]"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_follow_parent_order() {
        assert_eq!(
            Template::ModelB.parameter_names(),
            [
                "p_u", "p_w", "p_x_u0w0", "p_x_u0w1", "p_x_u1w0", "p_x_u1w1", "p_z_u0", "p_z_u1",
                "p_y_z0w0", "p_y_z0w1", "p_y_z1w0", "p_y_z1w1"
            ]
        );
        for t in Template::ALL {
            assert_eq!(t.parameter_names().len(), t.default_values().len(), "{t}");
            assert_eq!(t.name().parse::<Template>().unwrap(), t);
        }
    }

    #[test]
    fn model_b_structure() {
        let net = ScenarioParams::<f64>::defaults(Template::ModelB)
            .build()
            .unwrap();
        assert_eq!(net.len(), 5);
        assert!(net.dag().d_separated(&["W"], &["Z"], &[]).unwrap());
        let p = net.query(&["X"], &[("U", "1"), ("W", "0")]).unwrap();
        assert!((p.values()[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn model_c_structure() {
        let net = ScenarioParams::<f64>::defaults(Template::ModelC)
            .build()
            .unwrap();
        assert_eq!(net.len(), 4);
        let mut edges: Vec<_> = net.dag().edges();
        edges.sort();
        assert_eq!(edges, [("V", "X"), ("V", "Y"), ("V", "Z"), ("Z", "Y")]);
    }

    #[test]
    fn half_parameters_give_independence() {
        let mut sp = ScenarioParams::<f64>::defaults(Template::ModelD);
        for name in Template::ModelD.parameter_names() {
            sp.set(&name, 0.5).unwrap();
        }
        let net = sp.build().unwrap();
        let j = net.joint().unwrap();
        assert!(j.values().iter().all(|&v| (v - 1.0 / 32.0).abs() < 1e-15));
    }

    #[test]
    fn schema_is_enforced() {
        let mut m = ScenarioParams::<f64>::defaults(Template::ModelC)
            .values()
            .clone();
        m.insert("p_q".into(), 0.5);
        assert!(ScenarioParams::new(Template::ModelC, m.clone()).is_err());
        m.remove("p_q");
        m.remove("p_v");
        assert!(ScenarioParams::new(Template::ModelC, m.clone()).is_err());
        m.insert("p_v".into(), 1.5);
        assert!(matches!(
            ScenarioParams::new(Template::ModelC, m),
            Err(Error::Validation(_))
        ));
        assert!("modelQ".parse::<Template>().is_err());
    }

    #[test]
    fn model_a_is_model_b_margin() {
        let b = ScenarioParams::<f64>::defaults(Template::ModelB)
            .build()
            .unwrap();
        let a = ScenarioParams::<f64>::defaults(Template::ModelA)
            .build()
            .unwrap();
        let jb = b.joint().unwrap().marginal(&["X", "Z", "Y"]).unwrap();
        let ja = a.joint().unwrap();
        assert!(ja.max_abs_diff(&jb).unwrap() < 1e-12);
    }
}
