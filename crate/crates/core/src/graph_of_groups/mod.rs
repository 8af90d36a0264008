//! Finite graphs of finite cyclic groups.
//!
//! A vertex carries `Z_{m_v}`. An edge `e = (u, v)` carries `Z_{m_e}` with embeddings
//! `gen_e ↦ unit_u·(m_u/m_e)·x_u` and `gen_e ↦ unit_v·(m_v/m_e)·x_v`. For an edge outside
//! the chosen maximal tree the stable letter satisfies `t_e ι_v(y) t_e⁻¹ = ι_u(y)`.

mod canonical;
mod certificate;
mod enumerate;
mod quotient;

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{inverse_mod, normalize_unit};
use crate::exact_linalg::{cokernel, FinGenAbGroup, IntMatrix, LinalgError};

pub use canonical::canonical_form;
pub use certificate::{
    analyze_candidate, enumerate_candidates, replay, verify_phi_nonlift, ActionClass,
    ActionInvariants, CandidateTrace, Certificate, Filter, Problem, SearchBounds, Survivor,
    TargetProfile, Verdict, CERTIFICATE_SCHEMA_VERSION,
};
pub use enumerate::{enumerate_graphs, SearchConfig};
pub use quotient::{
    covering_graph, induced_kernel_action, is_effective, kernel_rank, torsion_free_quotients,
    CoverGraph, Effectiveness, QuotientMap,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GogError {
    #[error("a graph of groups needs at least one vertex")]
    NoVertices,
    #[error("vertex {0} has order 0")]
    ZeroVertexOrder(usize),
    #[error("edge {edge} has endpoint {endpoint} but there are only {vertices} vertices")]
    EndpointOutOfRange {
        edge: usize,
        endpoint: usize,
        vertices: usize,
    },
    #[error("edge {edge} has order {order}, which does not divide the order {vertex_order} of vertex {vertex}")]
    EdgeOrder {
        edge: usize,
        order: u64,
        vertex: usize,
        vertex_order: u64,
    },
    #[error("edge {edge} has unit {unit}, which is not invertible mod {order}")]
    NotAUnit { edge: usize, unit: u64, order: u64 },
    #[error("underlying graph is not connected")]
    Disconnected,
    #[error("edge set is not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("invalid quotient map: {0}")]
    InvalidQuotient(String),
    #[error("target matrix: {0}")]
    Target(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub order: u64,
    pub unit_u: u64,
    pub unit_v: u64,
}

impl Edge {
    pub fn new(u: usize, v: usize, order: u64, unit_u: u64, unit_v: u64) -> Self {
        Self {
            u,
            v,
            order,
            unit_u,
            unit_v,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: Vec<u64>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for GraphOfGroups {
    type Error = GogError;

    fn try_from(raw: RawGraph) -> Result<Self, GogError> {
        GraphOfGroups::new(raw.vertices, raw.edges)
    }
}

/// Connected graph of finite cyclic groups with explicit embedding units.
///
/// Units are stored reduced into `1..m_e` (or `1` when `m_e = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct GraphOfGroups {
    vertices: Vec<u64>,
    edges: Vec<Edge>,
}

impl GraphOfGroups {
    pub fn new(vertices: Vec<u64>, edges: Vec<Edge>) -> Result<Self, GogError> {
        if vertices.is_empty() {
            return Err(GogError::NoVertices);
        }
        if let Some(i) = vertices.iter().position(|&m| m == 0) {
            return Err(GogError::ZeroVertexOrder(i));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, e) in edges.into_iter().enumerate() {
            for endpoint in [e.u, e.v] {
                if endpoint >= vertices.len() {
                    return Err(GogError::EndpointOutOfRange {
                        edge: i,
                        endpoint,
                        vertices: vertices.len(),
                    });
                }
                let m = vertices[endpoint];
                if e.order == 0 || !m.is_multiple_of(e.order) {
                    return Err(GogError::EdgeOrder {
                        edge: i,
                        order: e.order,
                        vertex: endpoint,
                        vertex_order: m,
                    });
                }
            }
            for unit in [e.unit_u, e.unit_v] {
                if unit.gcd(&e.order) != 1 {
                    return Err(GogError::NotAUnit {
                        edge: i,
                        unit,
                        order: e.order,
                    });
                }
            }
            normalized.push(Edge {
                unit_u: normalize_unit(e.unit_u as i64, e.order),
                unit_v: normalize_unit(e.unit_v as i64, e.order),
                ..e
            });
        }
        let g = Self {
            vertices,
            edges: normalized,
        };
        if !g.is_connected() {
            return Err(GogError::Disconnected);
        }
        Ok(g)
    }

    /// One vertex of order `m` with the given loops `(order, unit_u, unit_v)`.
    pub fn bouquet(m: u64, loops: &[(u64, u64, u64)]) -> Result<Self, GogError> {
        let edges = loops
            .iter()
            .map(|&(order, a, b)| Edge::new(0, 0, order, a, b))
            .collect();
        Self::new(vec![m], edges)
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `ι_x(s)` for the end of edge `e` sitting at vertex `x ∈ {u, v}`.
    fn embed(&self, e: &Edge, at_u: bool, s: u64) -> u64 {
        let (x, unit) = if at_u {
            (e.u, e.unit_u)
        } else {
            (e.v, e.unit_v)
        };
        let m = self.vertices[x];
        (unit * (m / e.order) % m) * (s % e.order) % m
    }

    /// Preimage of `c ∈ Z_{m_x}` under `ι_x`, if `c` lies in the image.
    fn pull_back(&self, e: &Edge, at_u: bool, c: u64) -> Option<u64> {
        let (x, unit) = if at_u {
            (e.u, e.unit_u)
        } else {
            (e.v, e.unit_v)
        };
        let index = self.vertices[x] / e.order;
        if !c.is_multiple_of(index) {
            return None;
        }
        let inv = inverse_mod(unit, e.order).expect("units are invertible");
        Some((c / index) % e.order * inv % e.order)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        let mut parts = n;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts == 1
    }

    /// `Σ 1/|G_v| − Σ 1/|G_e|`.
    pub fn euler_char(&self) -> Rational64 {
        let vs: Rational64 = self
            .vertices
            .iter()
            .map(|&m| Rational64::new(1, m as i64))
            .sum();
        let es: Rational64 = self
            .edges
            .iter()
            .map(|e| Rational64::new(1, e.order as i64))
            .sum();
        vs - es
    }

    /// Maximal tree chosen greedily by edge index.
    pub fn spanning_tree(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| uf.union(e.u, e.v))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn check_spanning_tree(&self, tree: &[usize]) -> Result<(), GogError> {
        let n = self.vertices.len();
        if tree.len() + 1 != n {
            return Err(GogError::NotSpanningTree(format!(
                "{} edges for {} vertices",
                tree.len(),
                n
            )));
        }
        let mut uf = UnionFind::new(n);
        for &i in tree {
            let e = self
                .edges
                .get(i)
                .ok_or_else(|| GogError::NotSpanningTree(format!("edge index {i} out of range")))?;
            if !uf.union(e.u, e.v) {
                return Err(GogError::NotSpanningTree(format!(
                    "edge {i} closes a cycle"
                )));
            }
        }
        Ok(())
    }

    /// Abelianisation of the fundamental group, computed with the default maximal tree.
    pub fn abelianization(&self) -> FinGenAbGroup {
        self.abelianization_with_tree(&self.spanning_tree())
            .expect("default tree is spanning")
    }

    /// Generators `x_v` and one `t_e` per edge outside `tree`; relations `m_v·x_v = 0` and
    /// `unit_u·(m_u/m_e)·x_u = unit_v·(m_v/m_e)·x_v` for every edge.
    pub fn abelianization_with_tree(&self, tree: &[usize]) -> Result<FinGenAbGroup, GogError> {
        self.check_spanning_tree(tree)?;
        let nv = self.vertices.len();
        let free = self.edges.len() - tree.len();
        let rows = nv + free;
        let cols = nv + self.edges.len();
        let mut entries = vec![BigInt::from(0); rows * cols];
        for (v, &m) in self.vertices.iter().enumerate() {
            entries[v * cols + v] = BigInt::from(m);
        }
        for (j, e) in self.edges.iter().enumerate() {
            let col = nv + j;
            let a = (e.unit_u * (self.vertices[e.u] / e.order)) as i64;
            let b = (e.unit_v * (self.vertices[e.v] / e.order)) as i64;
            entries[e.u * cols + col] += a;
            entries[e.v * cols + col] -= b;
        }
        Ok(cokernel(&IntMatrix::new(rows, cols, entries)?))
    }

    /// `Σ q/m_e − Σ q/m_v = −q·χ`, the kernel rank minus one; `None` unless every order divides `q`.
    pub fn scaled_deficiency(&self, q: u64) -> Option<i64> {
        let mut s: i64 = 0;
        for &m in &self.vertices {
            if !q.is_multiple_of(m) {
                return None;
            }
            s -= (q / m) as i64;
        }
        for e in &self.edges {
            s += (q / e.order) as i64;
        }
        Some(s)
    }

    /// Non-loop edges whose group equals an endpoint group are absent.
    pub fn is_reduced(&self) -> bool {
        self.first_contractible().is_none()
    }

    fn first_contractible(&self) -> Option<usize> {
        self.edges.iter().position(|e| {
            !e.is_loop() && (e.order == self.vertices[e.u] || e.order == self.vertices[e.v])
        })
    }

    /// Contracts non-loop edges whose group equals an endpoint group, lowest index first.
    pub fn reduce(&self) -> GraphOfGroups {
        let mut g = self.clone();
        while let Some(i) = g.first_contractible() {
            g = g.contract(i);
        }
        g
    }

    /// Contracts edge `i`, absorbing the endpoint whose group it fills into the other one.
    fn contract(&self, i: usize) -> GraphOfGroups {
        let e = &self.edges[i];
        // `gone` is absorbed into `kept`; `gone_unit`/`kept_unit` are the ends of e there.
        let (gone, kept, gone_unit, kept_unit) = if e.order == self.vertices[e.u] {
            (e.u, e.v, e.unit_u, e.unit_v)
        } else {
            (e.v, e.u, e.unit_v, e.unit_u)
        };
        let m_gone = self.vertices[gone];
        // x_gone ↦ r·(m_kept/m_gone)·x_kept
        let r = kept_unit * inverse_mod(gone_unit, m_gone).expect("unit") % m_gone.max(1);
        let relabel = |x: usize| -> usize {
            let x = if x == gone { kept } else { x };
            if x > gone {
                x - 1
            } else {
                x
            }
        };
        let mut vertices = self.vertices.clone();
        vertices.remove(gone);
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, f)| {
                let mut f = f.clone();
                if f.u == gone {
                    f.unit_u = normalize_unit((f.unit_u * r) as i64, f.order);
                }
                if f.v == gone {
                    f.unit_v = normalize_unit((f.unit_v * r) as i64, f.order);
                }
                f.u = relabel(f.u);
                f.v = relabel(f.v);
                f
            })
            .collect();
        GraphOfGroups { vertices, edges }
    }

    /// Order of the largest subgroup of vertex groups that every edge identifies compatibly and
    /// every stable letter centralises.
    ///
    /// An element `a` of the root group propagates along each edge through the unique edge
    /// element mapping to it; it counts when it lies in every edge image it meets and all
    /// propagations agree.
    pub fn central_vertex_subgroup(&self) -> u64 {
        (0..self.vertices[0])
            .filter(|&a| self.propagate_central(a).is_some())
            .count() as u64
    }

    fn propagate_central(&self, a: u64) -> Option<Vec<u64>> {
        let n = self.vertices.len();
        let mut value: Vec<Option<u64>> = vec![None; n];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (j, e) in self.edges.iter().enumerate() {
            incident[e.u].push(j);
            if !e.is_loop() {
                incident[e.v].push(j);
            }
        }
        value[0] = Some(a);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let cx = value[x].expect("queued vertices are assigned");
            for &j in &incident[x] {
                let e = &self.edges[j];
                let from_u = e.u == x;
                let s = self.pull_back(e, from_u, cx)?;
                let (y, at_u) = if from_u { (e.v, false) } else { (e.u, true) };
                let cy = self.embed(e, at_u, s);
                match value[y] {
                    Some(existing) if existing != cy => return None,
                    Some(_) => {}
                    None => {
                        value[y] = Some(cy);
                        queue.push_back(y);
                    }
                }
            }
        }
        Some(value.into_iter().map(|c| c.expect("connected")).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, GogError> {
        serde_json::from_str(text).map_err(|e| GogError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialisation is infallible")
    }
}

impl fmt::Display for GraphOfGroups {
    /// `[6] 0-0:2(1,1) 0-0:6(1,5)`: vertex orders, then `u-v:order(unit_u,unit_v)` per edge.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(u64::to_string).collect();
        write!(f, "[{}]", vs.join(","))?;
        for e in &self.edges {
            write!(f, " {}-{}:{}({},{})", e.u, e.v, e.order, e.unit_u, e.unit_v)?;
        }
        Ok(())
    }
}

pub(crate) fn format_rational(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns `false` when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}
