//! Exhaustive search for reduced graphs of groups with prescribed Euler characteristic.
//!
//! Every connected reduced graph arises from a single vertex by repeatedly adding a loop, an
//! edge between existing vertices, or a new vertex on a reduced edge. Each move raises
//! `S = Σ q/m_e − Σ q/m_v = −q·χ` by at least one, so the search stops at `S = n − 1`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{canonical_form, Edge, GraphOfGroups};
use crate::arith::{divisors, units_mod};

/// Optional restrictions taken from the structural lemmas of the non-lifting argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Only graphs with one vertex, of order `q`.
    pub single_vertex_of_order_q: bool,
    /// Every non-loop edge has the trivial group.
    pub tree_edges_trivial: bool,
}

impl SearchConfig {
    pub fn pruned() -> Self {
        Self {
            single_vertex_of_order_q: true,
            tree_edges_trivial: true,
        }
    }

    pub fn exhaustive() -> Self {
        Self {
            single_vertex_of_order_q: false,
            tree_edges_trivial: false,
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self::pruned()
    }
}

fn push_edge(g: &GraphOfGroups, e: Edge) -> GraphOfGroups {
    let mut edges = g.edges().to_vec();
    edges.push(e);
    GraphOfGroups::new(g.vertices().to_vec(), edges).expect("moves preserve validity")
}

fn children(g: &GraphOfGroups, q: u64, budget: i64, config: SearchConfig) -> Vec<GraphOfGroups> {
    let s = g.scaled_deficiency(q).expect("orders divide q");
    let room = budget - s;
    let m = g.vertices();
    let mut out = Vec::new();
    for (x, &mx) in m.iter().enumerate() {
        for me in divisors(mx) {
            if ((q / me) as i64) > room {
                continue;
            }
            for rho in units_mod(me) {
                out.push(push_edge(g, Edge::new(x, x, me, 1, rho)));
            }
        }
    }
    for x in 0..m.len() {
        for y in x + 1..m.len() {
            for me in reduced_edge_orders(m[x], m[y], config) {
                if ((q / me) as i64) > room {
                    continue;
                }
                for rho in units_mod(me) {
                    out.push(push_edge(g, Edge::new(x, y, me, 1, rho)));
                }
            }
        }
    }
    if !config.single_vertex_of_order_q {
        for (x, &mx) in m.iter().enumerate() {
            for mw in divisors(q) {
                for me in reduced_edge_orders(mx, mw, config) {
                    let cost = (q / me) as i64 - (q / mw) as i64;
                    if cost > room {
                        continue;
                    }
                    let mut vertices = m.to_vec();
                    vertices.push(mw);
                    let mut edges = g.edges().to_vec();
                    // A lone new edge can always be rescaled to units (1, 1).
                    edges.push(Edge::new(x, m.len(), me, 1, 1));
                    out.push(GraphOfGroups::new(vertices, edges).expect("valid"));
                }
            }
        }
    }
    out
}

/// Edge orders allowed on a non-loop edge between groups of orders `a` and `b`.
fn reduced_edge_orders(a: u64, b: u64, config: SearchConfig) -> Vec<u64> {
    use num_integer::Integer;
    divisors(a.gcd(&b))
        .into_iter()
        .filter(|&me| me != a && me != b)
        .filter(|&me| !config.tree_edges_trivial || me == 1)
        .collect()
}

/// All reduced graphs of groups (up to isomorphism) with orders dividing `q` and
/// `χ = (1 − n)/q`, in canonical form and sorted.
pub fn enumerate_graphs(n: usize, q: u64, config: SearchConfig) -> Vec<GraphOfGroups> {
    assert!(q >= 1 && n >= 1);
    let budget = n as i64 - 1;
    let seeds: Vec<u64> = if config.single_vertex_of_order_q {
        vec![q]
    } else {
        divisors(q)
    };
    let mut frontier: BTreeSet<GraphOfGroups> = seeds
        .into_iter()
        .map(|m| GraphOfGroups::new(vec![m], vec![]).expect("single vertex"))
        .collect();
    let mut found: BTreeSet<GraphOfGroups> = BTreeSet::new();
    while !frontier.is_empty() {
        for g in &frontier {
            if g.scaled_deficiency(q) == Some(budget) {
                found.insert(g.clone());
            }
        }
        let level: Vec<&GraphOfGroups> = frontier
            .iter()
            .filter(|g| g.scaled_deficiency(q).expect("orders divide q") < budget)
            .collect();
        let next: Vec<GraphOfGroups> = level
            .par_iter()
            .flat_map_iter(|g| children(g, q, budget, config))
            .map(|c| canonical_form(&c))
            .collect();
        frontier = next.into_iter().collect();
    }
    found.into_iter().collect()
}
