//! Shared generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use confound::bayesnet::{Cpt, DiscreteBayesNet, Variable};
use confound::latent::{ScenarioParams, Template};
use confound::Dag;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random DAG on `n` nodes named `N0..`; declaration order is shuffled
/// relative to the hidden causal order.
pub fn random_dag(
    rng: &mut StdRng,
    n: usize,
    density: f64,
) -> (Vec<String>, Vec<(String, String)>) {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.random_bool(density) {
                edges.push((names[order[i]].clone(), names[order[j]].clone()));
            }
        }
    }
    (names, edges)
}

/// Random strictly positive CPT rows for every node of `dag`.
pub fn random_net(rng: &mut StdRng, dag: &Dag, cards: &[usize]) -> DiscreteBayesNet<f64> {
    let variables: Vec<Variable> = dag
        .nodes()
        .iter()
        .zip(cards)
        .map(|(n, &k)| Variable::new(n.clone(), (0..k).map(|s| s.to_string())).unwrap())
        .collect();
    let cpts = (0..dag.len())
        .map(|i| {
            let parents = dag.parent_indices(i);
            let rows: usize = parents.iter().map(|&p| cards[p]).product();
            let table = (0..rows)
                .map(|_| {
                    let w: Vec<f64> = (0..cards[i]).map(|_| rng.random_range(0.05..1.0)).collect();
                    let s: f64 = w.iter().sum();
                    w.into_iter().map(|v| v / s).collect()
                })
                .collect();
            Cpt::new(
                dag.name(i),
                parents.iter().map(|&p| dag.name(p).to_string()),
                table,
            )
        })
        .collect();
    let edges: Vec<(&str, &str)> = dag.edges();
    DiscreteBayesNet::from_parts(variables, &edges, cpts).unwrap()
}

/// Template defaults with every parameter redrawn uniformly from `[lo, hi]`.
pub fn random_scenario(
    rng: &mut StdRng,
    template: Template,
    lo: f64,
    hi: f64,
) -> ScenarioParams<f64> {
    let mut sp = ScenarioParams::defaults(template);
    for name in template.parameter_names() {
        sp.set(&name, rng.random_range(lo..=hi)).unwrap();
    }
    sp
}

/// Every subset of `items`, in binary-counter order.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1usize << items.len())
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// d-separation by enumerating every simple path in the skeleton.
pub fn dsep_by_paths(
    dag: &Dag,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    s: &BTreeSet<usize>,
) -> bool {
    let n = dag.len();
    let desc_in_s: Vec<bool> = (0..n)
        .map(|v| {
            dag.descendants_of(&BTreeSet::from([v]))
                .iter()
                .any(|x| s.contains(x))
        })
        .collect();
    let is_edge = |p: usize, c: usize| dag.parent_indices(c).contains(&p);
    let mut neighbours = vec![Vec::new(); n];
    for c in 0..n {
        for &p in dag.parent_indices(c) {
            neighbours[c].push(p);
            neighbours[p].push(c);
        }
    }
    fn walk(
        path: &mut Vec<usize>,
        b: &BTreeSet<usize>,
        nb: &[Vec<usize>],
        active: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let last = *path.last().unwrap();
        if path.len() > 1 && b.contains(&last) {
            return active(path);
        }
        for &next in &nb[last] {
            if path.contains(&next) {
                continue;
            }
            path.push(next);
            if walk(path, b, nb, active) {
                return true;
            }
            path.pop();
        }
        false
    }
    let active = |path: &[usize]| {
        path.windows(3).all(|w| {
            let collider = is_edge(w[0], w[1]) && is_edge(w[2], w[1]);
            if collider {
                desc_in_s[w[1]]
            } else {
                !s.contains(&w[1])
            }
        })
    };
    for &start in a {
        let mut path = vec![start];
        if walk(&mut path, b, &neighbours, &active) {
            return false;
        }
    }
    true
}

/// Probability of one full configuration straight from the CPTs.
pub fn config_prob(net: &DiscreteBayesNet<f64>, cfg: &[usize]) -> f64 {
    net.cpts()
        .iter()
        .enumerate()
        .map(|(i, cpt)| {
            let mut row = 0;
            for p in cpt.parents() {
                let j = net.index_of(p).unwrap();
                row = row * net.variables()[j].cardinality() + cfg[j];
            }
            cpt.prob(row, cfg[i])
        })
        .product()
}

/// All full configurations of `net`, last variable fastest.
pub fn configs(net: &DiscreteBayesNet<f64>) -> Vec<Vec<usize>> {
    let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
    let mut out = vec![vec![]];
    for &k in &cards {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                (0..k).map(move |s| {
                    let mut c = c.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    out
}

/// `p(target = t | evidence)` by a double loop over full configurations.
pub fn brute_conditional(
    net: &DiscreteBayesNet<f64>,
    target: &[(usize, usize)],
    evidence: &[(usize, usize)],
) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for cfg in configs(net) {
        if evidence.iter().all(|&(i, s)| cfg[i] == s) {
            let p = config_prob(net, &cfg);
            den += p;
            if target.iter().all(|&(i, s)| cfg[i] == s) {
                num += p;
            }
        }
    }
    num / den
}

/// `p(y = 1 | do(z))` for binary templates by summing the truncated product.
pub fn brute_do(net: &DiscreteBayesNet<f64>, z: &str, y: &str, level: usize) -> f64 {
    let zi = net.index_of(z).unwrap();
    let yi = net.index_of(y).unwrap();
    let mut total = 0.0;
    for cfg in configs(net) {
        if cfg[zi] != level || cfg[yi] != 1 {
            continue;
        }
        let p: f64 = net
            .cpts()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != zi)
            .map(|(i, cpt)| {
                let mut row = 0;
                for p in cpt.parents() {
                    let j = net.index_of(p).unwrap();
                    row = row * 2 + cfg[j];
                }
                cpt.prob(row, cfg[i])
            })
            .product();
        total += p;
    }
    total
}
