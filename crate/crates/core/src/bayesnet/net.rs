use super::cpt::Cpt;
use super::factor::Factor;
use super::variable::{next_config, strides, Variable};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::scalar::Prob;

/// Default cap on the number of joint configurations enumerated at once.
pub const DEFAULT_JOINT_CAP: u128 = 1 << 24;

/// A DAG over discrete variables with one CPT per node.
///
/// Variables, CPTs and DAG nodes share one index space: declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBayesNet<T> {
    dag: Dag,
    variables: Vec<Variable>,
    cpts: Vec<Cpt<T>>,
    joint_cap: u128,
}

impl<T: Prob> DiscreteBayesNet<T> {
    /// Builds and validates a net. The DAG comes from `edges`; each CPT must
    /// list exactly the parents implied by those edges, in edge order.
    pub fn from_parts<S: AsRef<str>>(
        variables: Vec<Variable>,
        edges: &[(S, S)],
        cpts: Vec<Cpt<T>>,
    ) -> Result<Self> {
        let dag = Dag::new(variables.iter().map(|v| v.name().to_string()), edges)?;
        let mut slots: Vec<Option<Cpt<T>>> = vec![None; variables.len()];
        for cpt in cpts {
            let i = dag.index_of(cpt.child()).map_err(|_| {
                Error::Validation(format!("CPT for unknown variable `{}`", cpt.child()))
            })?;
            if slots[i].is_some() {
                return Err(Error::Validation(format!(
                    "duplicate CPT for `{}`",
                    cpt.child()
                )));
            }
            slots[i] = Some(cpt);
        }
        let cpts = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| Error::Validation(format!("missing CPT for `{}`", dag.name(i))))
            })
            .collect::<Result<Vec<_>>>()?;
        let net = DiscreteBayesNet {
            dag,
            variables,
            cpts,
            joint_cap: DEFAULT_JOINT_CAP,
        };
        net.validate()?;
        Ok(net)
    }

    /// Builds a net whose edges are read off the CPT parent lists.
    pub fn from_cpts(variables: Vec<Variable>, cpts: Vec<Cpt<T>>) -> Result<Self> {
        let edges: Vec<(String, String)> = cpts
            .iter()
            .flat_map(|c| {
                c.parents()
                    .iter()
                    .map(move |p| (p.clone(), c.child().to_string()))
            })
            .collect();
        Self::from_parts(variables, &edges, cpts)
    }

    /// Checks every structural and numeric invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let tol = T::input_tol();
        for (i, (var, cpt)) in self.variables.iter().zip(&self.cpts).enumerate() {
            let name = var.name();
            let dag_parents: Vec<&str> = self
                .dag
                .parent_indices(i)
                .iter()
                .map(|&p| self.dag.name(p))
                .collect();
            if cpt.child() != name
                || cpt
                    .parents()
                    .iter()
                    .map(String::as_str)
                    .ne(dag_parents.iter().copied())
            {
                return Err(Error::Validation(format!(
                    "parent mismatch for `{name}`: CPT lists [{}], graph has [{}]",
                    cpt.parents().join(", "),
                    dag_parents.join(", ")
                )));
            }
            let rows: usize = self
                .dag
                .parent_indices(i)
                .iter()
                .map(|&p| self.variables[p].cardinality())
                .product();
            if cpt.rows().len() != rows {
                return Err(Error::Validation(format!(
                    "row count for `{name}`: expected {rows}, found {}",
                    cpt.rows().len()
                )));
            }
            for (r, row) in cpt.rows().iter().enumerate() {
                if row.len() != var.cardinality() {
                    return Err(Error::Validation(format!(
                        "column count for `{name}` row {r}: expected {}, found {}",
                        var.cardinality(),
                        row.len()
                    )));
                }
                if let Some(p) = row.iter().find(|p| !(**p >= T::zero() && **p <= T::one())) {
                    return Err(Error::Validation(format!(
                        "entry out of range for `{name}` row {r}: {p}"
                    )));
                }
                let sum: T = row.iter().copied().sum();
                if (sum - T::one()).abs() > tol {
                    return Err(Error::Validation(format!(
                        "row sum for `{name}` row {r} is {sum}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn cpts(&self) -> &[Cpt<T>] {
        &self.cpts
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.dag
            .index_of(name)
            .map_err(|_| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, name: &str) -> Result<&Variable> {
        Ok(&self.variables[self.index_of(name)?])
    }

    pub fn cpt(&self, name: &str) -> Result<&Cpt<T>> {
        Ok(&self.cpts[self.index_of(name)?])
    }

    pub fn joint_cap(&self) -> u128 {
        self.joint_cap
    }

    /// Returns a copy that enumerates at most `cap` configurations.
    pub fn with_joint_cap(mut self, cap: u128) -> Self {
        self.joint_cap = cap;
        self
    }

    /// Replaces one CPT and revalidates.
    pub fn with_cpt(&self, cpt: Cpt<T>) -> Result<Self> {
        let i = self.index_of(cpt.child())?;
        let mut net = self.clone();
        net.cpts[i] = cpt;
        net.validate()?;
        Ok(net)
    }

    /// Total number of joint configurations.
    pub fn config_count(&self) -> u128 {
        self.variables
            .iter()
            .map(|v| v.cardinality() as u128)
            .product()
    }

    /// Row index into node `i`'s CPT for a full configuration.
    #[inline]
    pub(crate) fn cpt_row(&self, i: usize, config: &[usize]) -> usize {
        let parents = self.dag.parent_indices(i);
        let mut row = 0;
        for &p in parents {
            row = row * self.variables[p].cardinality() + config[p];
        }
        row
    }

    /// Visits every configuration consistent with `clamp`, passing the product
    /// of CPT entries of the nodes that are not clamped.
    ///
    /// With nothing clamped this is the joint `p(x) = prod_i p(x_i | pa_i)`;
    /// clamping intervened nodes gives the truncated product.
    pub(crate) fn for_each_truncated<F>(&self, clamp: &[Option<usize>], mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize], T),
    {
        let free: Vec<usize> = (0..self.len()).filter(|&i| clamp[i].is_none()).collect();
        let size: u128 = free
            .iter()
            .map(|&i| self.variables[i].cardinality() as u128)
            .product();
        if size > self.joint_cap {
            return Err(Error::SizeCapExceeded {
                size,
                cap: self.joint_cap,
            });
        }
        let free_cards: Vec<usize> = free
            .iter()
            .map(|&i| self.variables[i].cardinality())
            .collect();
        let mut config: Vec<usize> = clamp.iter().map(|c| c.unwrap_or(0)).collect();
        let mut counter = vec![0; free.len()];
        loop {
            for (k, &i) in free.iter().enumerate() {
                config[i] = counter[k];
            }
            let mut w = T::one();
            for &i in &free {
                w = w * self.cpts[i].prob(self.cpt_row(i, &config), config[i]);
            }
            visit(&config, w);
            if !next_config(&mut counter, &free_cards) {
                break;
            }
        }
        Ok(())
    }

    /// The full joint distribution over all variables in declaration order.
    pub fn joint(&self) -> Result<Factor<T>> {
        let cards: Vec<usize> = self.variables.iter().map(Variable::cardinality).collect();
        let st = strides(&cards);
        let mut values = vec![T::zero(); cards.iter().product()];
        self.for_each_truncated(&vec![None; self.len()], |cfg, w| {
            let idx: usize = cfg.iter().zip(&st).map(|(c, s)| c * s).sum();
            values[idx] = w;
        })?;
        Factor::new(self.variables.clone(), values)
    }

    /// `p(targets | evidence)` computed from the exact joint.
    pub fn query<S: AsRef<str>>(&self, targets: &[S], evidence: &[(S, S)]) -> Result<Factor<T>> {
        let mut keep: Vec<&str> = targets.iter().map(AsRef::as_ref).collect();
        for (v, _) in evidence {
            if keep.contains(&v.as_ref()) {
                return Err(Error::InvalidArgument(format!(
                    "`{}` is both a target and evidence",
                    v.as_ref()
                )));
            }
            keep.push(v.as_ref());
        }
        for name in &keep {
            self.index_of(name)?;
        }
        self.joint()?.marginal(&keep)?.condition(evidence)
    }

    /// Variables that descend from `name`, `name` included.
    pub fn descendants(&self, name: &str) -> Result<Vec<&str>> {
        self.index_of(name)?;
        self.dag.descendants(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_left() -> DiscreteBayesNet<f64> {
        DiscreteBayesNet::from_cpts(
            vec![
                Variable::binary("X"),
                Variable::binary("Z"),
                Variable::binary("Y"),
            ],
            vec![
                Cpt::binary("X", [] as [&str; 0], &[0.5]),
                Cpt::binary("Z", ["X"], &[0.2, 0.8]),
                Cpt::binary("Y", ["Z", "X"], &[0.1, 0.5, 0.6, 0.9]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn joint_entry_is_product() {
        let j = fig1_left().joint().unwrap();
        let p = j.get(&[("X", "1"), ("Z", "1"), ("Y", "1")]).unwrap();
        assert!((p - 0.36).abs() < 1e-15);
        assert!((j.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_and_independent_nodes() {
        let one = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A")],
            vec![Cpt::binary("A", [] as [&str; 0], &[0.25])],
        )
        .unwrap();
        assert_eq!(one.joint().unwrap().values(), &[0.75, 0.25]);
        let coins = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A"), Variable::binary("B")],
            vec![
                Cpt::binary("A", [] as [&str; 0], &[0.5]),
                Cpt::binary("B", [] as [&str; 0], &[0.5]),
            ],
        )
        .unwrap();
        assert!(coins.joint().unwrap().values().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn query_y_given_z() {
        let q = fig1_left().query(&["Y"], &[("Z", "1")]).unwrap();
        assert!((q.get(&[("Y", "1")]).unwrap() - 0.84).abs() < 1e-12);
        let zero = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A"), Variable::binary("B")],
            vec![
                Cpt::binary("A", [] as [&str; 0], &[0.0]),
                Cpt::binary("B", ["A"], &[0.5, 0.5]),
            ],
        )
        .unwrap();
        assert!(matches!(
            zero.query(&["B"], &[("A", "1")]),
            Err(Error::ZeroProbabilityEvidence(_))
        ));
        assert!(matches!(
            zero.query(&["Q"], &[]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn validation_failures() {
        let err = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A")],
            vec![Cpt::new("A", [] as [&str; 0], vec![vec![0.5, 0.4]])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row sum"), "{err}");

        let err = DiscreteBayesNet::from_parts(
            vec![Variable::binary("A"), Variable::binary("B")],
            &[("A", "B")],
            vec![
                Cpt::binary("A", [] as [&str; 0], &[0.5]),
                Cpt::binary("B", [] as [&str; 0], &[0.5]),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("parent mismatch"), "{err}");

        let err = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A"), Variable::binary("B")],
            vec![
                Cpt::binary("A", [] as [&str; 0], &[0.5]),
                Cpt::binary("B", ["A"], &[0.5]),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row count"), "{err}");

        let err =
            DiscreteBayesNet::<f64>::from_cpts(vec![Variable::binary("A")], vec![]).unwrap_err();
        assert!(err.to_string().contains("missing CPT"), "{err}");
    }

    #[test]
    fn zero_probability_rows_are_allowed() {
        let net = DiscreteBayesNet::from_cpts(
            vec![Variable::binary("A"), Variable::binary("B")],
            vec![
                Cpt::binary("A", [] as [&str; 0], &[1.0]),
                Cpt::binary("B", ["A"], &[0.0, 1.0]),
            ],
        );
        assert!(net.is_ok());
    }

    #[test]
    fn size_cap() {
        let net = fig1_left().with_joint_cap(4);
        assert_eq!(
            net.joint().unwrap_err(),
            Error::SizeCapExceeded { size: 8, cap: 4 }
        );
    }
}
