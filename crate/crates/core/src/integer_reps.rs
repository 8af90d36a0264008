//! Integral representations of `Z_p` and their realisation by graph actions.
//!
//! A `Z_p`-lattice is standard when it splits into trivial (rank 1), cyclotomic (rank `p − 1`)
//! and regular (rank `p`) summands. Standard lattices are realised by actions on finite graphs
//! with a global fixed point, which yields explicit lifts to `Aut F_n`.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::exact_linalg::{cokernel, IntMatrix, LinalgError};
use crate::free_groups::{FreeAutomorphism, FreeGroupError, FreeWord};

/// Largest prime below which every `Z_p`-lattice is standard.
pub const STANDARD_PRIME_BOUND: u64 = 23;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegerRepError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix does not satisfy M^{0} = I")]
    NotPeriodic(u64),
    #[error("the identity matrix has no order-{0} subgroup to lift")]
    TrivialAction(u64),
    #[error("rank data admit no decomposition: {0}")]
    InconsistentRanks(String),
    #[error("invalid equivariant graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    FreeGroup(#[from] FreeGroupError),
}

/// Multiplicities of trivial (`a`), cyclotomic (`b`) and regular (`c`) summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompositionType {
    pub p: u64,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl DecompositionType {
    pub fn new(p: u64, a: usize, b: usize, c: usize) -> Result<Self, IntegerRepError> {
        if !is_prime(p) {
            return Err(IntegerRepError::NotPrime(p));
        }
        Ok(Self { p, a, b, c })
    }

    pub fn rank(&self) -> usize {
        let p = self.p as usize;
        self.a + self.b * (p - 1) + self.c * p
    }

    pub fn is_trivial_action(&self) -> bool {
        self.b == 0 && self.c == 0
    }
}

impl fmt::Display for DecompositionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a,b,c) = ({},{},{})", self.a, self.b, self.c)
    }
}

fn check_period(m: &IntMatrix, p: u64) -> Result<(), IntegerRepError> {
    if !is_prime(p) {
        return Err(IntegerRepError::NotPrime(p));
    }
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "decomposition_type",
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    if !m.pow(p)?.is_identity() {
        return Err(IntegerRepError::NotPeriodic(p));
    }
    Ok(())
}

/// Summand multiplicities of a `Z_p`-lattice from conjugacy-invariant data.
///
/// `a + c = n − rank(M − I)` and `(b + c)(p − 1) = n − rank(1 + M + … + M^{p−1})`; these two
/// equations imply the rank identity, so `b` is read from `coker(M − I)`, where each
/// cyclotomic summand contributes one `Z_p` and the other summands contribute `Z`.
pub fn decomposition_type(m: &IntMatrix, p: u64) -> Result<DecompositionType, IntegerRepError> {
    check_period(m, p)?;
    let n = m.rows();
    let mmi = m.minus_identity()?;
    let fixed = n - mmi.rank();
    let mut norm = IntMatrix::zeros(n, n);
    let mut power = IntMatrix::identity(n);
    for _ in 0..p {
        norm = &norm + &power;
        power = &power * m;
    }
    let pm1 = (p - 1) as usize;
    let norm_kernel = n - norm.rank();
    if !norm_kernel.is_multiple_of(pm1) {
        return Err(IntegerRepError::InconsistentRanks(format!(
            "kernel of the norm has rank {norm_kernel}, not a multiple of {pm1}"
        )));
    }
    let nonfixed = norm_kernel / pm1;
    let coinv = cokernel(&mmi);
    let pb = BigInt::from(p);
    if coinv.torsion().iter().any(|d| d != &pb) {
        return Err(IntegerRepError::InconsistentRanks(format!(
            "coinvariants {coinv} have torsion other than Z_{p}"
        )));
    }
    let b = coinv.torsion().len();
    if b > nonfixed || nonfixed - b > fixed {
        return Err(IntegerRepError::InconsistentRanks(format!(
            "fixed rank {fixed}, norm-kernel rank {norm_kernel}, {b} cyclotomic summands"
        )));
    }
    let c = nonfixed - b;
    let d = DecompositionType {
        p,
        a: fixed - c,
        b,
        c,
    };
    debug_assert_eq!(d.rank(), n);
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Standardness {
    Standard,
    /// Cyclotomic summands at `p ≥ 23` may be twisted by a non-principal ideal.
    Unknown,
}

pub fn is_standard(m: &IntMatrix, p: u64) -> Result<Standardness, IntegerRepError> {
    let d = decomposition_type(m, p)?;
    Ok(if p < STANDARD_PRIME_BOUND || d.b == 0 {
        Standardness::Standard
    } else {
        Standardness::Unknown
    })
}

/// Finite graph with an orientation-preserving `Z_p`-action fixing a base vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantGraph {
    pub p: u64,
    pub vertex_count: usize,
    /// Oriented edges `(tail, head)`.
    pub edges: Vec<(usize, usize)>,
    pub vertex_perm: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub base: usize,
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&x| x < perm.len() && !std::mem::replace(&mut seen[x], true))
}

fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &x) in perm.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

impl EquivariantGraph {
    pub fn validate(&self) -> Result<(), IntegerRepError> {
        let bad = |s: &str| Err(IntegerRepError::InvalidGraph(s.to_string()));
        if !is_prime(self.p) {
            return Err(IntegerRepError::NotPrime(self.p));
        }
        if self.vertex_perm.len() != self.vertex_count || self.edge_perm.len() != self.edges.len() {
            return bad("permutation sizes do not match the graph");
        }
        if !is_permutation(&self.vertex_perm) || !is_permutation(&self.edge_perm) {
            return bad("action is not a permutation");
        }
        if self.base >= self.vertex_count || self.vertex_perm[self.base] != self.base {
            return bad("base vertex is not fixed");
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if a >= self.vertex_count || b >= self.vertex_count {
                return bad("edge endpoint out of range");
            }
            if self.edges[self.edge_perm[i]] != (self.vertex_perm[a], self.vertex_perm[b]) {
                return bad("action does not respect incidence");
            }
        }
        let period_ok = |perm: &[usize]| {
            (0..perm.len()).all(|mut x| {
                let start = x;
                for _ in 0..self.p {
                    x = perm[x];
                }
                x == start
            })
        };
        if !period_ok(&self.vertex_perm) || !period_ok(&self.edge_perm) {
            return bad("action does not have order dividing p");
        }
        if self.spanning_tree().is_none() {
            return bad("graph is disconnected");
        }
        Ok(())
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    /// Base-rooted breadth-first tree, scanning edges in index order. Returns `parent[v]` as
    /// `(edge, tail_is_parent)`, or `None` if some vertex is unreachable.
    fn spanning_tree(&self) -> Option<Vec<Option<(usize, bool)>>> {
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(x) = queue.pop_front() {
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                let (other, forward) = if a == x {
                    (b, true)
                } else if b == x {
                    (a, false)
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    parent[other] = Some((i, forward));
                    queue.push_back(other);
                }
            }
        }
        seen.iter().all(|&s| s).then_some(parent)
    }

    /// Edges outside the base-rooted tree, in index order; they form the free basis of `π₁`.
    pub fn basis_edges(&self) -> Vec<usize> {
        let parent = self.spanning_tree().expect("connected");
        let tree: Vec<usize> = parent.iter().flatten().map(|&(e, _)| e).collect();
        (0..self.edges.len())
            .filter(|e| !tree.contains(e))
            .collect()
    }

    /// Oriented tree path from the base to `v`, as `(edge, forward)` steps.
    fn path_from_base(&self, parent: &[Option<(usize, bool)>], mut v: usize) -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        while v != self.base {
            let (e, forward) = parent[v].expect("tree reaches every vertex");
            steps.push((e, forward));
            let (a, b) = self.edges[e];
            v = if forward { a } else { b };
        }
        steps.reverse();
        steps
    }

    /// Automorphism of `π₁(graph, base)` induced by the permutation pair.
    fn automorphism_for(&self, edge_perm: &[usize]) -> Result<Vec<FreeWord>, IntegerRepError> {
        let parent = self.spanning_tree().expect("connected");
        let basis = self.basis_edges();
        let rank = basis.len();
        let letter = |e: usize| basis.iter().position(|&x| x == e).map(|k| k as i64 + 1);
        basis
            .iter()
            .map(|&e| {
                let (a, b) = self.edges[e];
                let mut steps = self.path_from_base(&parent, a);
                steps.push((e, true));
                steps.extend(
                    self.path_from_base(&parent, b)
                        .into_iter()
                        .rev()
                        .map(|(f, fwd)| (f, !fwd)),
                );
                let raw: Vec<i64> = steps
                    .into_iter()
                    .filter_map(|(f, fwd)| letter(edge_perm[f]).map(|k| if fwd { k } else { -k }))
                    .collect();
                Ok(FreeWord::reduce(rank, &raw)?)
            })
            .collect()
    }

    pub fn induced_free_automorphism(&self) -> Result<FreeAutomorphism, IntegerRepError> {
        self.validate()?;
        let images = self.automorphism_for(&self.edge_perm)?;
        let inverse_images = self.automorphism_for(&inverse_permutation(&self.edge_perm))?;
        Ok(FreeAutomorphism::new(images, inverse_images)?)
    }

    pub fn induced_h1_action(&self) -> Result<IntMatrix, IntegerRepError> {
        Ok(self.induced_free_automorphism()?.abelianize())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialisation is infallible")
    }
}

/// Graph with a fixed base vertex realising the given summand multiplicities.
///
/// Trivial summands are fixed loops at the base. Each regular summand is a bouquet of `p`
/// loops at the base, rotated. Each cyclotomic summand is a fixed auxiliary vertex joined to
/// the base by `p` rotated edges.
pub fn build_graph_realization(d: &DecompositionType) -> Result<EquivariantGraph, IntegerRepError> {
    if !is_prime(d.p) {
        return Err(IntegerRepError::NotPrime(d.p));
    }
    let p = d.p as usize;
    let mut g = EquivariantGraph {
        p: d.p,
        vertex_count: 1,
        edges: Vec::new(),
        vertex_perm: vec![0],
        edge_perm: Vec::new(),
        base: 0,
    };
    for _ in 0..d.a {
        g.edge_perm.push(g.edges.len());
        g.edges.push((0, 0));
    }
    let orbit = |g: &mut EquivariantGraph, head: usize| {
        let start = g.edges.len();
        for k in 0..p {
            g.edges.push((0, head));
            g.edge_perm.push(start + (k + 1) % p);
        }
    };
    for _ in 0..d.c {
        orbit(&mut g, 0);
    }
    for _ in 0..d.b {
        let w = g.vertex_count;
        g.vertex_count += 1;
        g.vertex_perm.push(w);
        orbit(&mut g, w);
    }
    g.validate()?;
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftDecision {
    Lifts {
        decomposition: DecompositionType,
        graph: EquivariantGraph,
        automorphism: FreeAutomorphism,
    },
    /// Standardness could not be certified, so neither answer is claimed.
    Unknown {
        decomposition: DecompositionType,
        reason: String,
    },
}

/// Decides whether `⟨M⟩ ≅ Z_p` lifts to `Out F_n`, with an explicit automorphism when it does.
pub fn lift_decision(m: &IntMatrix, p: u64) -> Result<LiftDecision, IntegerRepError> {
    let d = decomposition_type(m, p)?;
    if m.is_identity() {
        return Err(IntegerRepError::TrivialAction(p));
    }
    match is_standard(m, p)? {
        Standardness::Standard => {
            let graph = build_graph_realization(&d)?;
            let automorphism = graph.induced_free_automorphism()?;
            Ok(LiftDecision::Lifts {
                decomposition: d,
                graph,
                automorphism,
            })
        }
        Standardness::Unknown => Ok(LiftDecision::Unknown {
            decomposition: d,
            reason: format!(
                "{} cyclotomic summand(s) at p = {p} >= {STANDARD_PRIME_BOUND}; \
                 an ideal-class computation would be needed",
                d.b
            ),
        }),
    }
}

/// Companion matrix of `1 + λ + … + λ^{p−1}`, the cyclotomic block.
pub fn cyclotomic_block(p: u64) -> IntMatrix {
    let k = (p - 1) as usize;
    let mut e = vec![0i64; k * k];
    for i in 1..k {
        e[i * k + i - 1] = 1;
    }
    for i in 0..k {
        e[i * k + k - 1] = -1;
    }
    IntMatrix::from_i64(k, k, &e).expect("square")
}

/// Cyclic permutation matrix of size `p`, the regular block.
pub fn regular_block(p: u64) -> IntMatrix {
    let k = p as usize;
    let mut e = vec![0i64; k * k];
    for i in 0..k {
        e[((i + 1) % k) * k + i] = 1;
    }
    IntMatrix::from_i64(k, k, &e).expect("square")
}

/// Block-diagonal standard representative `I_a ⊕ C^b ⊕ R^c`.
pub fn standard_representative(d: &DecompositionType) -> IntMatrix {
    let mut m = IntMatrix::identity(d.a);
    for _ in 0..d.b {
        m = m.direct_sum(&cyclotomic_block(d.p));
    }
    for _ in 0..d.c {
        m = m.direct_sum(&regular_block(d.p));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{matrix_order, MatrixOrder};

    fn dt(p: u64, a: usize, b: usize, c: usize) -> DecompositionType {
        DecompositionType::new(p, a, b, c).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(
            decomposition_type(&regular_block(3), 3).unwrap(),
            dt(3, 0, 0, 1)
        );
        assert_eq!(
            decomposition_type(&cyclotomic_block(3), 3).unwrap(),
            dt(3, 0, 1, 0)
        );
        assert_eq!(
            decomposition_type(&IntMatrix::identity(4), 5).unwrap(),
            dt(5, 4, 0, 0)
        );
        let minus = -&IntMatrix::identity(3);
        assert_eq!(decomposition_type(&minus, 2).unwrap(), dt(2, 0, 3, 0));
    }

    #[test]
    fn decomposition_errors() {
        assert!(matches!(
            decomposition_type(&regular_block(3), 4),
            Err(IntegerRepError::NotPrime(4))
        ));
        assert!(matches!(
            decomposition_type(&regular_block(3), 5),
            Err(IntegerRepError::NotPeriodic(5))
        ));
    }

    #[test]
    fn standardness() {
        assert_eq!(
            is_standard(&regular_block(3), 3).unwrap(),
            Standardness::Standard
        );
        assert_eq!(
            is_standard(&regular_block(23), 23).unwrap(),
            Standardness::Standard
        );
        assert_eq!(
            is_standard(&cyclotomic_block(23), 23).unwrap(),
            Standardness::Unknown
        );
    }

    #[test]
    fn cyclotomic_block_has_cyclotomic_char_poly() {
        for p in [2u64, 3, 5, 7] {
            let cp = cyclotomic_block(p).char_poly().unwrap();
            assert!(cp.iter().all(|c| c == &BigInt::from(1)), "p = {p}");
        }
    }

    #[test]
    fn regular_realisation_is_a_rotated_bouquet() {
        let g = build_graph_realization(&dt(3, 0, 0, 1)).unwrap();
        assert_eq!(g.vertex_count, 1);
        assert_eq!(g.edges.len(), 3);
        let m = g.induced_h1_action().unwrap();
        assert_eq!(m, regular_block(3));
    }

    #[test]
    fn trivial_realisation_is_identity() {
        for a in 1..4 {
            let g = build_graph_realization(&dt(5, a, 0, 0)).unwrap();
            assert_eq!(g.induced_h1_action().unwrap(), IntMatrix::identity(a));
        }
    }

    #[test]
    fn mixed_realisation_round_trips() {
        let d = dt(5, 1, 1, 1);
        let g = build_graph_realization(&d).unwrap();
        let m = g.induced_h1_action().unwrap();
        assert_eq!(m.rows(), 10);
        assert_eq!(matrix_order(&m).unwrap(), MatrixOrder::Finite(5));
        assert_eq!(decomposition_type(&m, 5).unwrap(), d);
        let psi = g.induced_free_automorphism().unwrap();
        assert!(psi.power(5).is_inner(&FreeWord::identity(10)).unwrap());
    }

    #[test]
    fn lift_decisions() {
        match lift_decision(&regular_block(3), 3).unwrap() {
            LiftDecision::Lifts {
                automorphism,
                decomposition,
                ..
            } => {
                assert_eq!(decomposition, dt(3, 0, 0, 1));
                assert_eq!(automorphism.abelianize(), regular_block(3));
            }
            other => panic!("expected a lift, got {other:?}"),
        }
        assert!(matches!(
            lift_decision(&cyclotomic_block(23), 23).unwrap(),
            LiftDecision::Unknown { .. }
        ));
        assert!(lift_decision(&IntMatrix::identity(3), 3).is_err());
    }

    #[test]
    fn malformed_graphs_are_rejected() {
        let mut g = build_graph_realization(&dt(3, 0, 1, 0)).unwrap();
        g.edge_perm = vec![0, 2, 1];
        assert!(g.validate().is_err());
        let mut g = build_graph_realization(&dt(3, 0, 1, 0)).unwrap();
        g.vertex_perm = vec![1, 0];
        assert!(g.validate().is_err());
        let g = EquivariantGraph {
            p: 3,
            vertex_count: 2,
            edges: vec![],
            vertex_perm: vec![0, 1],
            edge_perm: vec![],
            base: 0,
        };
        assert!(g.validate().is_err());
    }
}
