use serde::Serialize;

use crate::scalar::Prob;

/// Conditional probability table `p(child | parents)`.
///
/// Rows enumerate parent configurations with the first listed parent varying
/// slowest; columns follow the child's state order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cpt<T> {
    child: String,
    parents: Vec<String>,
    table: Vec<Vec<T>>,
}

impl<T: Prob> Cpt<T> {
    pub fn new<C, P, S>(child: C, parents: P, table: Vec<Vec<T>>) -> Self
    where
        C: Into<String>,
        P: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Cpt {
            child: child.into(),
            parents: parents.into_iter().map(Into::into).collect(),
            table,
        }
    }

    /// A table for a binary child given `p(child = 1 | row)` for each row.
    pub fn binary<C, P, S>(child: C, parents: P, p_one: &[T]) -> Self
    where
        C: Into<String>,
        P: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let table = p_one.iter().map(|&p| vec![T::one() - p, p]).collect();
        Self::new(child, parents, table)
    }

    pub fn child(&self) -> &str {
        &self.child
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.table
    }

    #[inline]
    pub fn prob(&self, row: usize, state: usize) -> T {
        self.table[row][state]
    }
}
