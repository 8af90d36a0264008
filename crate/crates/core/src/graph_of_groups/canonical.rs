//! Canonical representatives of graphs of groups up to isomorphism.
//!
//! The moves are vertex relabelling, edge reversal, and rescaling any vertex or edge group
//! by an automorphism. An edge is summarised by the ratio `ρ = unit_v / unit_u mod m_e`, which
//! absorbs edge rescaling; rescaling `x_v` by `r_v` sends `ρ ↦ ρ·r_u·r_v⁻¹`.

use std::collections::BTreeMap;

use super::{Edge, GraphOfGroups};
use crate::arith::{inverse_mod, units_mod};

type EdgeKey = (usize, usize, u64, u64);

/// Iterated colour refinement seeded by vertex order; colours are canonical integers.
fn refine_colours(g: &GraphOfGroups) -> Vec<usize> {
    let n = g.vertex_count();
    let mut colour = rank_values(g.vertices().to_vec());
    let mut classes = count_distinct(&colour);
    loop {
        let mut neighbourhood: Vec<Vec<(u64, bool, usize, u64)>> = vec![Vec::new(); n];
        for e in g.edges() {
            if e.is_loop() {
                let rho = ratio(e);
                let inv = inverse_mod(rho, e.order).expect("unit");
                neighbourhood[e.u].push((e.order, true, colour[e.u], rho.min(inv)));
            } else {
                neighbourhood[e.u].push((e.order, false, colour[e.v], 0));
                neighbourhood[e.v].push((e.order, false, colour[e.u], 0));
            }
        }
        let signatures: Vec<_> = (0..n)
            .map(|v| {
                let mut nb = std::mem::take(&mut neighbourhood[v]);
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let next = rank_values(signatures);
        let next_classes = count_distinct(&next);
        colour = next;
        if next_classes == classes {
            return colour;
        }
        classes = next_classes;
    }
}

fn rank_values<T: Ord + Clone>(values: Vec<T>) -> Vec<usize> {
    let mut distinct: Vec<T> = values.clone();
    distinct.sort();
    distinct.dedup();
    let index: BTreeMap<T, usize> = distinct
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    values.iter().map(|t| index[t]).collect()
}

fn count_distinct(colour: &[usize]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn ratio(e: &Edge) -> u64 {
    if e.order == 1 {
        return 1;
    }
    e.unit_v * inverse_mod(e.unit_u, e.order).expect("unit") % e.order
}

struct Search<'a> {
    g: &'a GraphOfGroups,
    classes: Vec<Vec<usize>>,
    position_class: Vec<usize>,
    label: Vec<usize>,
    scale: Vec<u64>,
    units: Vec<Vec<u64>>,
    best: Option<Vec<EdgeKey>>,
}

impl Search<'_> {
    fn key(&self) -> Vec<EdgeKey> {
        let mut keys: Vec<EdgeKey> = self
            .g
            .edges()
            .iter()
            .map(|e| {
                let m = e.order;
                let (a, b) = (self.label[e.u], self.label[e.v]);
                if m == 1 {
                    return (a.min(b), a.max(b), 1, 1);
                }
                let r_inv_v = inverse_mod(self.scale[e.v] % m, m).expect("unit");
                let rho = ratio(e) * (self.scale[e.u] % m) % m * r_inv_v % m;
                let rho_inv = inverse_mod(rho, m).expect("unit");
                (a, b, m, rho).min((b, a, m, rho_inv))
            })
            .collect();
        keys.sort_unstable();
        keys
    }

    fn scales(&mut self, v: usize) {
        if v == self.g.vertex_count() {
            let key = self.key();
            if self.best.as_ref().is_none_or(|b| key < *b) {
                self.best = Some(key);
            }
            return;
        }
        for i in 0..self.units[v].len() {
            self.scale[v] = self.units[v][i];
            self.scales(v + 1);
        }
    }

    /// Assigns labels in increasing order, each drawn from the class owning that position.
    fn labels(&mut self, pos: usize, used: &mut [bool]) {
        if pos == self.position_class.len() {
            self.scales(0);
            return;
        }
        let class = self.position_class[pos];
        for i in 0..self.classes[class].len() {
            let v = self.classes[class][i];
            if used[v] {
                continue;
            }
            used[v] = true;
            self.label[v] = pos;
            self.labels(pos + 1, used);
            used[v] = false;
        }
    }
}

/// Lexicographically least labelled form over all isomorphic decorations.
///
/// Vertices are ordered by refined colour, then by the best edge list; each edge is written
/// with `unit_u = 1` and the orientation giving the smaller tuple.
pub fn canonical_form(g: &GraphOfGroups) -> GraphOfGroups {
    let colour = refine_colours(g);
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colour.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let vertices: Vec<u64> = classes
        .iter()
        .flat_map(|members| members.iter().map(|&v| g.vertices()[v]))
        .collect();
    let position_class = classes
        .iter()
        .enumerate()
        .flat_map(|(c, members)| std::iter::repeat_n(c, members.len()))
        .collect();
    let mut search = Search {
        g,
        classes,
        position_class,
        label: vec![0; g.vertex_count()],
        scale: vec![1; g.vertex_count()],
        units: g.vertices().iter().map(|&m| units_mod(m)).collect(),
        best: None,
    };
    let mut used = vec![false; g.vertex_count()];
    search.labels(0, &mut used);
    let edges = search
        .best
        .expect("at least one labelling")
        .into_iter()
        .map(|(a, b, m, rho)| Edge::new(a, b, m, 1, rho))
        .collect();
    GraphOfGroups::new(vertices, edges).expect("relabelling preserves validity")
}
