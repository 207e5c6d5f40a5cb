//! Directed acyclic graphs and the structural criteria used for interventions.
//!
//! Nodes are case-sensitive string identifiers. Their declaration order is the
//! tie-breaker everywhere a choice has to be made (topological order, set
//! printing), so every result is deterministic.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

/// An immutable DAG with parent sets kept in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG from a node list and `(parent, child)` edges.
    ///
    /// Parent lists follow the order in which the edges are given.
    pub fn new<N, S>(nodes: N, edges: &[(S, S)]) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<String>,
        S: AsRef<str>,
    {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Duplicate(n.clone()));
            }
        }
        let mut parents = vec![Vec::new(); nodes.len()];
        for (p, c) in edges {
            let (p, c) = (p.as_ref(), c.as_ref());
            let pi = *index
                .get(p)
                .ok_or_else(|| Error::UnknownNode(p.to_string()))?;
            let ci = *index
                .get(c)
                .ok_or_else(|| Error::UnknownNode(c.to_string()))?;
            if pi == ci {
                return Err(Error::Cycle(p.to_string()));
            }
            if parents[ci].contains(&pi) {
                return Err(Error::Duplicate(format!("{p} -> {c}")));
            }
            parents[ci].push(pi);
        }
        Self::from_indices(nodes, index, parents)
    }

    fn from_indices(
        nodes: Vec<String>,
        index: HashMap<String, usize>,
        parents: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let mut children = vec![Vec::new(); nodes.len()];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let dag = Dag {
            nodes,
            index,
            parents,
            children,
        };
        dag.kahn()?;
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn parent_indices(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn child_indices(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn parents(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.index_of(name)?;
        Ok(self.parents[i].iter().map(|&p| self.name(p)).collect())
    }

    pub fn children(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.index_of(name)?;
        Ok(self.children[i].iter().map(|&c| self.name(c)).collect())
    }

    /// All edges as `(parent, child)`, grouped by child in declaration order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .map(|(p, c)| (self.name(p), self.name(c)))
            .collect()
    }

    /// Resolves a list of names to sorted, deduplicated indices.
    pub fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<BTreeSet<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Kahn's algorithm, always releasing the ready node declared first.
    fn kahn(&self) -> Result<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &c in &self.children[i] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n)
                .filter(|&i| indeg[i] > 0)
                .map(|i| self.nodes[i].as_str())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::Cycle(stuck));
        }
        Ok(order)
    }

    /// Topological order as node indices.
    pub fn topological_indices(&self) -> Vec<usize> {
        self.kahn().expect("Dag is acyclic by construction")
    }

    /// Topological order; among nodes that are simultaneously ready, the one
    /// declared first comes first.
    pub fn topological_order(&self) -> Vec<&str> {
        self.topological_indices()
            .into_iter()
            .map(|i| self.name(i))
            .collect()
    }

    /// Nodes reachable from `from` along directed edges, `from` included.
    pub fn descendants_of(&self, from: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.closure(from, &self.children)
    }

    /// Nodes with a directed path into `to`, `to` included.
    pub fn ancestors_of(&self, to: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.closure(to, &self.parents)
    }

    fn closure(&self, start: &BTreeSet<usize>, adj: &[Vec<usize>]) -> BTreeSet<usize> {
        let mut seen = start.clone();
        let mut stack: Vec<usize> = start.iter().copied().collect();
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        seen
    }

    pub fn descendants(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.index_of(name)?;
        Ok(self
            .descendants_of(&BTreeSet::from([i]))
            .into_iter()
            .map(|j| self.name(j))
            .collect())
    }

    /// d-separation of `a` and `b` given `s`.
    ///
    /// Uses the reachable-set ("Bayes ball") traversal over (node, direction)
    /// states, so it runs in time linear in the number of edges.
    pub fn d_separated<S: AsRef<str>>(&self, a: &[S], b: &[S], s: &[S]) -> Result<bool> {
        let a = self.indices(a)?;
        let b = self.indices(b)?;
        let s = self.indices(s)?;
        if !a.is_disjoint(&b) || !a.is_disjoint(&s) || !b.is_disjoint(&s) {
            return Err(Error::InvalidArgument(
                "d-separation sets must be pairwise disjoint".into(),
            ));
        }
        let reach = self.reachable(&a, &s);
        Ok(b.is_disjoint(&reach))
    }

    /// Nodes d-connected to `sources` given `given`, excluding members of `given`.
    pub fn reachable(&self, sources: &BTreeSet<usize>, given: &BTreeSet<usize>) -> BTreeSet<usize> {
        #[derive(Clone, Copy)]
        enum Dir {
            // arrived from a child, moving against edge direction
            Up,
            // arrived from a parent, moving along edge direction
            Down,
        }
        let observed_anc = self.ancestors_of(given);
        let n = self.nodes.len();
        let mut visited = vec![[false; 2]; n];
        let mut queue: VecDeque<(usize, Dir)> = sources.iter().map(|&i| (i, Dir::Up)).collect();
        let mut reach = BTreeSet::new();
        while let Some((v, d)) = queue.pop_front() {
            let slot = match d {
                Dir::Up => 0,
                Dir::Down => 1,
            };
            if visited[v][slot] {
                continue;
            }
            visited[v][slot] = true;
            let observed = given.contains(&v);
            if !observed {
                reach.insert(v);
            }
            match d {
                Dir::Up if !observed => {
                    queue.extend(self.parents[v].iter().map(|&p| (p, Dir::Up)));
                    queue.extend(self.children[v].iter().map(|&c| (c, Dir::Down)));
                }
                Dir::Up => {}
                Dir::Down => {
                    if !observed {
                        queue.extend(self.children[v].iter().map(|&c| (c, Dir::Down)));
                    }
                    if observed_anc.contains(&v) {
                        queue.extend(self.parents[v].iter().map(|&p| (p, Dir::Up)));
                    }
                }
            }
        }
        reach
    }

    /// Back-door criterion for adjusting `treatment -> outcome` by `set`.
    ///
    /// No member of `set` may descend from the treatment, and `set` must block
    /// every path that leaves the treatment through an incoming edge. The
    /// latter is checked as d-separation in the graph with the treatment's
    /// outgoing edges removed.
    pub fn backdoor_admissible<S: AsRef<str>>(
        &self,
        treatment: &str,
        outcome: &str,
        set: &[S],
    ) -> Result<bool> {
        let t = self.index_of(treatment)?;
        let o = self.index_of(outcome)?;
        let s = self.indices(set)?;
        if t == o {
            return Err(Error::InvalidArgument(
                "treatment and outcome must differ".into(),
            ));
        }
        if s.contains(&t) || s.contains(&o) {
            return Err(Error::InvalidArgument(
                "adjustment set must exclude treatment and outcome".into(),
            ));
        }
        let desc = self.descendants_of(&BTreeSet::from([t]));
        if !s.is_disjoint(&desc) {
            return Ok(false);
        }
        let mut pruned = self.clone();
        pruned.children[t].clear();
        for ps in pruned.parents.iter_mut() {
            ps.retain(|&p| p != t);
        }
        let reach = pruned.reachable(&BTreeSet::from([t]), &s);
        Ok(!reach.contains(&o))
    }

    /// The graph after intervening on `intervened`: those nodes lose all parents.
    pub fn mutilate<S: AsRef<str>>(&self, intervened: &[S]) -> Result<Dag> {
        let cut = self.indices(intervened)?;
        let parents = self
            .parents
            .iter()
            .enumerate()
            .map(|(i, ps)| {
                if cut.contains(&i) {
                    Vec::new()
                } else {
                    ps.clone()
                }
            })
            .collect();
        Self::from_indices(self.nodes.clone(), self.index.clone(), parents)
    }
}
