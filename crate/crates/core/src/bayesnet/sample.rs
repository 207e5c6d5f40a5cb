//! Seeded ancestral sampling and relative-frequency estimation.
//!
//! Draws come from ChaCha20 seeded with `SeedableRng::seed_from_u64(seed)`.
//! Nodes are sampled in topological order, one uniform per node per row:
//! `u = (next_u64 >> 11) * 2^-53`, and the drawn state is the first state
//! (in declaration order) whose cumulative probability exceeds `u`. The
//! mapping depends only on the seed, the net and `n`, so datasets are
//! reproducible bit for bit.

use std::io::{Read, Write};

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use super::factor::Factor;
use super::net::DiscreteBayesNet;
use super::variable::{strides, Variable};
use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Rows of joint assignments stored as state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    variables: Vec<Variable>,
    cells: Vec<usize>,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len() * variables.len());
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != variables.len() {
                return Err(Error::Validation(format!(
                    "row {r} has {} cells",
                    row.len()
                )));
            }
            for (v, &s) in variables.iter().zip(&row) {
                if s >= v.cardinality() {
                    return Err(Error::Validation(format!(
                        "row {r}: state index {s} out of range for `{}`",
                        v.name()
                    )));
                }
            }
            cells.extend(row);
        }
        Ok(Dataset { variables, cells })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        if self.variables.is_empty() {
            0
        } else {
            self.cells.len() / self.variables.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let w = self.variables.len();
        &self.cells[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks(self.variables.len().max(1))
    }

    /// Writes a header of variable names followed by one state label per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.variables.iter().map(Variable::name))
            .map_err(io)?;
        for row in self.rows() {
            w.write_record(row.iter().zip(&self.variables).map(|(&s, v)| v.state(s)))
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    /// Reads a dataset written by [`Dataset::write_csv`]; columns are matched by name.
    pub fn read_csv<R: Read>(input: R, variables: &[Variable]) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let io = |e: csv::Error| Error::Io(e.to_string());
        let header = r.headers().map_err(io)?.clone();
        let mut columns = Vec::with_capacity(variables.len());
        for v in variables {
            let c = header
                .iter()
                .position(|h| h == v.name())
                .ok_or_else(|| Error::Io(format!("missing column `{}`", v.name())))?;
            columns.push(c);
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            let row = columns
                .iter()
                .zip(variables)
                .map(|(&c, v)| v.state_index(rec.get(c).unwrap_or_default()))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Dataset::new(variables.to_vec(), rows)
    }
}

#[inline]
fn unit_f64(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `n` rows ancestrally with a ChaCha20 stream seeded from `seed`.
pub fn forward_sample<T: Prob>(net: &DiscreteBayesNet<T>, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be at least 1".into(),
        ));
    }
    net.validate()?;
    let order = net.dag().topological_indices();
    // cumulative rows in f64 so the draw does not depend on the scalar type's rounding
    let cumulative: Vec<Vec<Vec<f64>>> = net
        .cpts()
        .iter()
        .map(|cpt| {
            cpt.rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .scan(0.0, |acc, p| {
                            *acc += p.to_f64_lossy();
                            Some(*acc)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let width = net.len();
    let mut cells = vec![0usize; n * width];
    for row in cells.chunks_mut(width) {
        for &i in &order {
            let cum = &cumulative[i][net.cpt_row(i, row)];
            let u = unit_f64(&mut rng);
            row[i] = match cum.iter().position(|&c| u < c) {
                Some(s) => s,
                // u landed above a row total a hair below 1
                None => {
                    let probs = &net.cpts()[i].rows()[net.cpt_row(i, row)];
                    probs.iter().rposition(|p| *p > T::zero()).unwrap_or(0)
                }
            };
        }
    }
    Ok(Dataset {
        variables: net.variables().to_vec(),
        cells,
    })
}

/// Relative frequencies of the full configurations in `data`.
pub fn empirical_joint<T: Prob>(data: &Dataset) -> Result<Factor<T>> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let cards: Vec<usize> = data.variables.iter().map(Variable::cardinality).collect();
    let st = strides(&cards);
    let mut counts = vec![0u64; cards.iter().product()];
    for row in data.rows() {
        let idx: usize = row.iter().zip(&st).map(|(c, s)| c * s).sum();
        counts[idx] += 1;
    }
    let n = T::from_usize(data.len()).expect("row count fits scalar");
    let values = counts
        .into_iter()
        .map(|c| T::from_u64(c).expect("count fits scalar") / n)
        .collect();
    Factor::new(data.variables.clone(), values)
}
