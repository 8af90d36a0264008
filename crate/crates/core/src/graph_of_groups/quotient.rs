use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{GogError, GraphOfGroups, UnionFind};
use crate::arith::units_mod;
use crate::exact_linalg::IntMatrix;

/// Homomorphism from the fundamental group onto `Z_q`.
///
/// `edge_images[e]` is the image of the stable letter `t_e`; it is zero on tree edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuotientMap {
    pub q: u64,
    pub tree: Vec<usize>,
    pub vertex_images: Vec<u64>,
    pub edge_images: Vec<u64>,
}

impl QuotientMap {
    /// Checks injectivity on vertex groups, every edge relation mod `q`, and surjectivity.
    pub fn validate(&self, g: &GraphOfGroups) -> Result<(), GogError> {
        let bad = |msg: String| Err(GogError::InvalidQuotient(msg));
        let q = self.q;
        if q == 0 {
            return bad("q must be positive".into());
        }
        g.check_spanning_tree(&self.tree)
            .map_err(|e| GogError::InvalidQuotient(e.to_string()))?;
        if self.vertex_images.len() != g.vertex_count() || self.edge_images.len() != g.edge_count()
        {
            return bad("image lists do not match the graph".into());
        }
        for (v, (&m, &a)) in g.vertices().iter().zip(&self.vertex_images).enumerate() {
            if a >= q || !q.is_multiple_of(m) || q / a.gcd(&q) != m {
                return bad(format!(
                    "vertex {v}: image {a} does not have order {m} in Z_{q}"
                ));
            }
        }
        for &t in &self.tree {
            if self.edge_images[t] != 0 {
                return bad(format!("tree edge {t} has nonzero stable-letter image"));
            }
        }
        for j in 0..g.edge_count() {
            if self.edge_images[j] >= q {
                return bad(format!("edge {j}: image not reduced mod {q}"));
            }
            if !edge_relation_holds(g, j, &self.vertex_images, q) {
                return bad(format!("edge {j} relation fails mod {q}"));
            }
        }
        let generated = self
            .vertex_images
            .iter()
            .chain(&self.edge_images)
            .fold(q, |acc, &x| acc.gcd(&x));
        if generated != 1 {
            return bad(format!(
                "images generate a proper subgroup of index {generated}"
            ));
        }
        Ok(())
    }
}

impl fmt::Display for QuotientMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.vertex_images.iter().map(u64::to_string).collect();
        let ts: Vec<String> = self.edge_images.iter().map(u64::to_string).collect();
        write!(f, "Z_{}: x=[{}] t=[{}]", self.q, xs.join(","), ts.join(","))
    }
}

fn edge_relation_holds(g: &GraphOfGroups, j: usize, images: &[u64], q: u64) -> bool {
    let e = &g.edges()[j];
    let m = g.vertices();
    let lhs = (e.unit_u * (m[e.u] / e.order)) % q * images[e.u] % q;
    let rhs = (e.unit_v * (m[e.v] / e.order)) % q * images[e.v] % q;
    lhs == rhs
}

/// Rank of the kernel of any surjection onto `Z_q` with torsion-free kernel: `1 − q·χ`.
pub fn kernel_rank(g: &GraphOfGroups, q: u64) -> Option<i64> {
    g.scaled_deficiency(q).map(|s| s + 1)
}

/// The solution set of a quotient problem, factored as
/// (vertex assignments) × (stable-letter assignments) subject to a joint surjectivity test.
pub(crate) struct QuotientSpace {
    pub q: u64,
    pub tree: Vec<usize>,
    pub free_edges: Vec<usize>,
    pub vertex_assignments: Vec<Vec<u64>>,
    /// `gcd(q, images)` of each vertex assignment.
    pub vertex_gcds: Vec<u64>,
    pub edge_count: usize,
}

impl QuotientSpace {
    pub fn new(g: &GraphOfGroups, q: u64) -> Self {
        let tree = g.spanning_tree();
        let free_edges: Vec<usize> = (0..g.edge_count()).filter(|j| !tree.contains(j)).collect();
        let vertex_assignments = vertex_assignments(g, q);
        let vertex_gcds = vertex_assignments
            .iter()
            .map(|a| a.iter().fold(q, |acc, &x| acc.gcd(&x)))
            .collect();
        Self {
            q,
            tree,
            free_edges,
            vertex_assignments,
            vertex_gcds,
            edge_count: g.edge_count(),
        }
    }

    /// Stable-letter images on the free edges, in lexicographic order.
    pub fn stable_assignments(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let k = self.free_edges.len();
        let q = self.q;
        let total = if self.vertex_assignments.is_empty() {
            0
        } else {
            q.checked_pow(k as u32)
                .expect("stable-letter search space overflows u64")
        };
        (0..total).map(move |mut idx| {
            let mut s = vec![0u64; k];
            for slot in s.iter_mut().rev() {
                *slot = idx % q;
                idx /= q;
            }
            s
        })
    }

    /// Indices of vertex assignments that together with `stable` generate `Z_q`.
    pub fn surjective_with<'a>(&'a self, stable: &[u64]) -> impl Iterator<Item = usize> + 'a {
        let sg = stable.iter().fold(self.q, |acc, &x| acc.gcd(&x));
        self.vertex_gcds
            .iter()
            .enumerate()
            .filter(move |(_, &vg)| vg.gcd(&sg) == 1)
            .map(|(i, _)| i)
    }

    pub fn edge_images(&self, stable: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.edge_count];
        for (&j, &s) in self.free_edges.iter().zip(stable) {
            out[j] = s;
        }
        out
    }

    pub fn map(&self, vertex_index: usize, stable: &[u64]) -> QuotientMap {
        QuotientMap {
            q: self.q,
            tree: self.tree.clone(),
            vertex_images: self.vertex_assignments[vertex_index].clone(),
            edge_images: self.edge_images(stable),
        }
    }
}

/// All vertex-image tuples with exact orders `m_v` satisfying every edge relation mod `q`.
fn vertex_assignments(g: &GraphOfGroups, q: u64) -> Vec<Vec<u64>> {
    let m = g.vertices();
    if m.iter().any(|&mv| !q.is_multiple_of(mv)) {
        return Vec::new();
    }
    let options: Vec<Vec<u64>> = m
        .iter()
        .map(|&mv| {
            units_mod(mv)
                .into_iter()
                .map(|u| (q / mv) * u % q)
                .collect()
        })
        .collect();
    // Edges become checkable once both endpoints are assigned.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); m.len()];
    for (j, e) in g.edges().iter().enumerate() {
        checks[e.u.max(e.v)].push(j);
    }
    let mut out = Vec::new();
    let mut current = vec![0u64; m.len()];
    fn go(
        v: usize,
        g: &GraphOfGroups,
        q: u64,
        options: &[Vec<u64>],
        checks: &[Vec<usize>],
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if v == options.len() {
            out.push(current.clone());
            return;
        }
        for &a in &options[v] {
            current[v] = a;
            if checks[v]
                .iter()
                .all(|&j| edge_relation_holds(g, j, current, q))
            {
                go(v + 1, g, q, options, checks, current, out);
            }
        }
    }
    go(0, g, q, &options, &checks, &mut current, &mut out);
    out
}

/// Every surjection onto `Z_q` injective on vertex groups, relative to the default maximal tree.
///
/// Ordered by stable-letter images (lexicographic), then vertex images.
pub fn torsion_free_quotients(g: &GraphOfGroups, q: u64) -> Vec<QuotientMap> {
    let space = QuotientSpace::new(g, q);
    let mut out = Vec::new();
    for stable in space.stable_assignments() {
        for i in space.surjective_with(&stable) {
            out.push(space.map(i, &stable));
        }
    }
    out
}

/// Finite graph covering the graph of groups, with the deck generator as permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverGraph {
    /// `(v, c)` with `c ∈ Z_{q/m_v}`.
    pub vertex_labels: Vec<(usize, u64)>,
    /// `(e, c)` with `c ∈ Z_{q/m_e}`.
    pub edge_labels: Vec<(usize, u64)>,
    /// Oriented edges `(tail, head)` as vertex indices.
    pub edges: Vec<(usize, usize)>,
    pub deck_vertices: Vec<usize>,
    pub deck_edges: Vec<usize>,
}

impl CoverGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count());
        let mut parts = self.vertex_count();
        for &(a, b) in &self.edges {
            if uf.union(a, b) {
                parts -= 1;
            }
        }
        parts
    }

    pub fn first_betti(&self) -> usize {
        self.edge_count() + self.component_count() - self.vertex_count()
    }

    /// Action of the deck generator on first homology, in the fundamental-cycle basis of the
    /// spanning tree chosen greedily by edge index.
    pub fn homology_action(&self) -> IntMatrix {
        let (k, entries) = self.homology_action_i64();
        IntMatrix::from_i64(k, k, &entries).expect("square")
    }

    pub(crate) fn homology_action_i64(&self) -> (usize, Vec<i64>) {
        let nv = self.vertex_count();
        let ne = self.edge_count();
        let mut uf = UnionFind::new(nv);
        let mut in_tree = vec![false; ne];
        let mut adjacency: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); nv];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if uf.union(a, b) {
                in_tree[i] = true;
                adjacency[a].push((b, i, 1));
                adjacency[b].push((a, i, -1));
            }
        }
        // path[x]: signed tree chain from the root of x's component to x.
        let mut path: Vec<Option<Vec<i64>>> = vec![None; nv];
        for root in 0..nv {
            if path[root].is_some() {
                continue;
            }
            path[root] = Some(vec![0; ne]);
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(y, i, sign) in &adjacency[x] {
                    if path[y].is_none() {
                        let mut p = path[x].clone().expect("visited");
                        p[i] += sign;
                        path[y] = Some(p);
                        queue.push_back(y);
                    }
                }
            }
        }
        let free: Vec<usize> = (0..ne).filter(|&i| !in_tree[i]).collect();
        let k = free.len();
        let mut entries = vec![0i64; k * k];
        for (col, &i) in free.iter().enumerate() {
            let (a, b) = self.edges[i];
            let pa = path[a].as_ref().expect("visited");
            let pb = path[b].as_ref().expect("visited");
            let mut image = vec![0i64; ne];
            for j in 0..ne {
                let z = pa[j] - pb[j] + i64::from(j == i);
                image[self.deck_edges[j]] += z;
            }
            for (row, &r) in free.iter().enumerate() {
                entries[row * k + col] = image[r];
            }
        }
        (k, entries)
    }
}

/// Cover determined by the stable-letter images alone.
pub(crate) fn build_cover(g: &GraphOfGroups, q: u64, edge_images: &[u64]) -> CoverGraph {
    let m = g.vertices();
    let mut offset = Vec::with_capacity(m.len());
    let mut vertex_labels = Vec::new();
    for (v, &mv) in m.iter().enumerate() {
        offset.push(vertex_labels.len());
        vertex_labels.extend((0..q / mv).map(|c| (v, c)));
    }
    let mut deck_vertices = vec![0; vertex_labels.len()];
    for (i, &(v, c)) in vertex_labels.iter().enumerate() {
        let width = q / m[v];
        deck_vertices[i] = offset[v] + ((c + 1) % width) as usize;
    }
    let mut edge_labels = Vec::new();
    let mut edges = Vec::new();
    let mut edge_offset = Vec::with_capacity(g.edge_count());
    for (j, e) in g.edges().iter().enumerate() {
        edge_offset.push(edge_labels.len());
        let s = edge_images[j];
        for c in 0..q / e.order {
            edge_labels.push((j, c));
            let tail = offset[e.u] + (c % (q / m[e.u])) as usize;
            let head = offset[e.v] + ((c + s) % (q / m[e.v])) as usize;
            edges.push((tail, head));
        }
    }
    let deck_edges = edge_labels
        .iter()
        .map(|&(j, c)| edge_offset[j] + ((c + 1) % (q / g.edges()[j].order)) as usize)
        .collect();
    CoverGraph {
        vertex_labels,
        edge_labels,
        edges,
        deck_vertices,
        deck_edges,
    }
}

/// Covering graph of the kernel of `f`, with the deck action of `1 ∈ Z_q`.
pub fn covering_graph(g: &GraphOfGroups, f: &QuotientMap) -> Result<CoverGraph, GogError> {
    f.validate(g)?;
    Ok(build_cover(g, f.q, &f.edge_images))
}

/// Action of a generator of `Z_q` on the first homology of the kernel.
pub fn induced_kernel_action(g: &GraphOfGroups, f: &QuotientMap) -> Result<IntMatrix, GogError> {
    Ok(covering_graph(g, f)?.homology_action())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effectiveness {
    pub effective: bool,
    pub central_order: u64,
}

impl fmt::Display for Effectiveness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.effective {
            write!(f, "effective: no nontrivial central vertex subgroup")
        } else {
            write!(
                f,
                "not effective: a central vertex subgroup of order {} acts trivially on the kernel",
                self.central_order
            )
        }
    }
}

pub fn is_effective(g: &GraphOfGroups, f: &QuotientMap) -> Result<Effectiveness, GogError> {
    f.validate(g)?;
    let central_order = g.central_vertex_subgroup();
    Ok(Effectiveness {
        effective: central_order == 1,
        central_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{matrix_order, MatrixOrder};
    use crate::graph_of_groups::Edge;
    use num_rational::Rational64;

    #[test]
    fn single_vertex_quotients() {
        let g = GraphOfGroups::bouquet(6, &[]).unwrap();
        let maps = torsion_free_quotients(&g, 6);
        let images: Vec<u64> = maps.iter().map(|f| f.vertex_images[0]).collect();
        assert_eq!(images, vec![1, 5]);
        // Oracle: brute force over all six images.
        let brute: Vec<u64> = (0..6).filter(|&a| 6 / a.gcd(&6) == 6).collect();
        assert_eq!(images, brute);
        assert_eq!(kernel_rank(&g, 6), Some(0));

        let four = GraphOfGroups::bouquet(4, &[]).unwrap();
        assert!(torsion_free_quotients(&four, 6).is_empty());
    }

    #[test]
    fn trivial_loop_quotients() {
        let g = GraphOfGroups::bouquet(1, &[(1, 1, 1)]).unwrap();
        let maps = torsion_free_quotients(&g, 6);
        let t: Vec<u64> = maps.iter().map(|f| f.edge_images[0]).collect();
        assert_eq!(t, vec![1, 5]);
        assert_eq!(g.euler_char(), Rational64::from(0));
        assert_eq!(kernel_rank(&g, 6), Some(1));
    }

    #[test]
    fn hexagon_cover() {
        let g = GraphOfGroups::bouquet(1, &[(1, 1, 1)]).unwrap();
        let f = &torsion_free_quotients(&g, 6)[0];
        let cover = covering_graph(&g, f).unwrap();
        assert_eq!((cover.vertex_count(), cover.edge_count()), (6, 6));
        assert_eq!(cover.component_count(), 1);
        assert_eq!(cover.first_betti(), 1);
        assert_eq!(
            induced_kernel_action(&g, f).unwrap(),
            IntMatrix::identity(1)
        );
    }

    #[test]
    fn point_cover() {
        let g = GraphOfGroups::bouquet(6, &[]).unwrap();
        let f = &torsion_free_quotients(&g, 6)[0];
        let cover = covering_graph(&g, f).unwrap();
        assert_eq!((cover.vertex_count(), cover.edge_count()), (1, 0));
        assert_eq!(cover.euler_characteristic(), 1);
    }

    #[test]
    fn two_six_six_bouquet_cover() {
        let g = GraphOfGroups::bouquet(6, &[(2, 1, 1), (6, 1, 1), (6, 1, 1)]).unwrap();
        let maps = torsion_free_quotients(&g, 6);
        assert_eq!(maps.len(), 2 * 216);
        for f in maps.iter().step_by(37) {
            let cover = covering_graph(&g, f).unwrap();
            assert_eq!(cover.euler_characteristic(), -4);
            assert_eq!(cover.first_betti(), 5);
            let m = induced_kernel_action(&g, f).unwrap();
            assert!(m.pow(6).unwrap().is_identity());
        }
    }

    #[test]
    fn bouquet_of_six_trivial_loops() {
        // One loop winds once around Z_6; the others lift to six disjoint copies each.
        let g = GraphOfGroups::bouquet(1, &[(1, 1, 1); 6]).unwrap();
        let f = QuotientMap {
            q: 6,
            tree: vec![],
            vertex_images: vec![0],
            edge_images: vec![1, 0, 0, 0, 0, 0],
        };
        f.validate(&g).unwrap();
        let cover = covering_graph(&g, &f).unwrap();
        assert_eq!(cover.first_betti() as i64, kernel_rank(&g, 6).unwrap());
        let m = induced_kernel_action(&g, &f).unwrap();
        assert_eq!(m.rows(), 31);
        let MatrixOrder::Finite(k) = matrix_order(&m).unwrap() else {
            panic!("deck action has finite order");
        };
        assert_eq!(6 % k, 0);
        // Oracle: trace = Lefschetz count of cycles fixed by the rotation = the loop itself.
        assert_eq!(m.trace().unwrap(), 1.into());
    }

    #[test]
    fn invalid_maps_are_rejected() {
        let g = GraphOfGroups::bouquet(6, &[(6, 1, 1)]).unwrap();
        let mut f = torsion_free_quotients(&g, 6)[0].clone();
        f.vertex_images[0] = 2;
        assert!(covering_graph(&g, &f).is_err());
        let two = GraphOfGroups::new(vec![2, 2], vec![Edge::new(0, 1, 1, 1, 1)]).unwrap();
        let f = QuotientMap {
            q: 2,
            tree: vec![0],
            vertex_images: vec![1, 1],
            edge_images: vec![1],
        };
        assert!(f.validate(&two).is_err());
    }

    #[test]
    fn twisted_loop_relation_restricts_vertex_images() {
        // x ↦ a needs 5·a ≡ a, impossible for an element of order 6.
        let g = GraphOfGroups::bouquet(6, &[(6, 1, 5)]).unwrap();
        assert!(torsion_free_quotients(&g, 6).is_empty());
    }

    #[test]
    fn effectiveness_examples() {
        let bouquet = GraphOfGroups::bouquet(6, &[(2, 1, 1), (6, 1, 1), (6, 1, 1)]).unwrap();
        let f = &torsion_free_quotients(&bouquet, 6)[0];
        let report = is_effective(&bouquet, f).unwrap();
        assert!(!report.effective);
        assert_eq!(report.central_order, 2);

        // The twisted 3-loop forces x = 2x in any abelian quotient, so no valid map exists;
        // effectiveness is then a property of the graph alone.
        let three = GraphOfGroups::bouquet(3, &[(3, 1, 2), (1, 1, 1), (1, 1, 1)]).unwrap();
        assert!(torsion_free_quotients(&three, 6).is_empty());
        assert_eq!(three.central_vertex_subgroup(), 1);

        // An effective graph with a valid quotient: two order-3 vertices along a trivial edge,
        // each carrying a trivial loop, joined again by a 3-edge with units (1, 2).
        let g = GraphOfGroups::new(
            vec![3, 3],
            vec![
                Edge::new(0, 1, 1, 1, 1),
                Edge::new(0, 1, 3, 1, 2),
                Edge::new(0, 0, 1, 1, 1),
            ],
        )
        .unwrap();
        let maps = torsion_free_quotients(&g, 6);
        assert!(!maps.is_empty());
        let report = is_effective(&g, &maps[0]).unwrap();
        assert!(report.effective, "{report}");
    }
}
