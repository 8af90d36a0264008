//! Surface-group arithmetic: automorphism bounds, finite-order symplectic matrices, a fixed-point
//! obstruction, free cyclic covers, and tables of maximal finite orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{is_symplectic, matrix_order, IntMatrix, LinalgError, MatrixOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus {0} is below 2")]
    GenusTooSmall(u64),
    #[error("no element of SL(2,Z) has order {0}; admissible orders are 1, 2, 3, 4, 6")]
    InadmissibleOrder(u64),
    #[error("block {0} is not a 2x2 matrix of determinant 1")]
    NotUnimodular(usize),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix does not satisfy M^{0} = I")]
    NotPeriodic(u64),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("rank {0} is below 2")]
    RankTooSmall(u64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn require_genus(g: u64) -> Result<(), SurfaceError> {
    if g < 2 {
        Err(SurfaceError::GenusTooSmall(g))
    } else {
        Ok(())
    }
}

/// Maximal order of a conformal automorphism group of a closed genus-`g` surface.
pub fn hurwitz_bound(g: u64) -> Result<u64, SurfaceError> {
    require_genus(g)?;
    Ok(84 * (g - 1))
}

/// Maximal order of a single periodic conformal automorphism.
pub fn wiman_bound(g: u64) -> Result<u64, SurfaceError> {
    require_genus(g)?;
    Ok(4 * g + 2)
}

/// Order `12^g · g!` of the block-permutation subgroup of `Sp(2g, Z)`.
pub fn block_subgroup_order(g: u64) -> BigInt {
    (1..=g).fold(BigInt::from(12).pow(g as u32), |acc, k| acc * k)
}

/// Finite orders of elements of `SL(2, Z)`.
pub const SL2_ORDERS: [u64; 5] = [1, 2, 3, 4, 6];

pub fn sl2_torsion(d: u64) -> Result<IntMatrix, SurfaceError> {
    let e: [i64; 4] = match d {
        1 => [1, 0, 0, 1],
        2 => [-1, 0, 0, -1],
        3 => [0, 1, -1, -1],
        4 => [0, 1, -1, 0],
        6 => [0, 1, -1, 1],
        _ => return Err(SurfaceError::InadmissibleOrder(d)),
    };
    Ok(IntMatrix::from_i64(2, 2, &e).expect("2x2"))
}

/// Block-diagonal matrix in the basis `a₁, b₁, …, a_g, b_g`.
pub fn block_symplectic(blocks: &[IntMatrix]) -> Result<IntMatrix, SurfaceError> {
    let mut m = IntMatrix::identity(0);
    for (i, b) in blocks.iter().enumerate() {
        if b.rows() != 2 || b.cols() != 2 || !b.determinant()?.is_one() {
            return Err(SurfaceError::NotUnimodular(i));
        }
        m = m.direct_sum(b);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionVerdict {
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionWitness {
    Lefschetz {
        power: u64,
        #[serde(with = "crate::serde_int")]
        number: BigInt,
    },
    Bound {
        name: String,
        bound: u64,
        order: u64,
    },
}

impl ObstructionWitness {
    fn obstructs(&self) -> bool {
        match self {
            ObstructionWitness::Lefschetz { number, .. } => number.is_negative(),
            ObstructionWitness::Bound { bound, order, .. } => order > bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub verdict: ObstructionVerdict,
    pub witnesses: Vec<ObstructionWitness>,
    pub note: String,
}

impl ObstructionReport {
    fn from_witnesses(witnesses: Vec<ObstructionWitness>, note: &str) -> Self {
        let verdict = if witnesses.iter().any(ObstructionWitness::obstructs) {
            ObstructionVerdict::Obstructed
        } else {
            ObstructionVerdict::Inconclusive
        };
        Self {
            verdict,
            witnesses,
            note: note.to_string(),
        }
    }

    pub fn is_obstructed(&self) -> bool {
        self.verdict == ObstructionVerdict::Obstructed
    }
}

const LEFSCHETZ_NOTE: &str = "L(f^k) = 2 - tr(M^k) counts the isolated index-one fixed points of \
a periodic orientation-preserving map, so L < 0 rules out a periodic realisation; L >= 0 for all \
powers is only necessary, and an Inconclusive verdict does not certify a lift";

/// Lefschetz numbers `L_k = 2 − tr(M^k)` for `k = 1..d−1`.
pub fn lefschetz_obstruction(m: &IntMatrix, d: u64) -> Result<ObstructionReport, SurfaceError> {
    if d == 0 {
        return Err(SurfaceError::ZeroOrder);
    }
    if !is_symplectic(m)? {
        return Err(SurfaceError::NotSymplectic);
    }
    if !m.pow(d)?.is_identity() {
        return Err(SurfaceError::NotPeriodic(d));
    }
    let mut witnesses = Vec::new();
    let mut power = IntMatrix::identity(m.rows());
    for k in 1..d {
        power = &power * m;
        witnesses.push(ObstructionWitness::Lefschetz {
            power: k,
            number: BigInt::from(2) - power.trace()?,
        });
    }
    Ok(ObstructionReport::from_witnesses(witnesses, LEFSCHETZ_NOTE))
}

/// A cyclic element of the block-permutation subgroup: disjoint cycles on the `g` symplectic
/// pairs, each cycle `(ℓ, d)` carrying one twist block of order `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicBlockElement {
    pub genus: u64,
    pub cycles: Vec<(u64, u64)>,
    pub order: u64,
    pub matrix: IntMatrix,
}

/// Order `lcm(ℓ·d)` over the cycles.
fn cycle_type_order(cycles: &[(u64, u64)]) -> u64 {
    cycles.iter().fold(1, |acc, &(l, d)| acc.lcm(&(l * d)))
}

/// Builds the element with the given cycle type, cycles occupying consecutive pairs.
pub fn cyclic_block_element(cycles: &[(u64, u64)]) -> Result<CyclicBlockElement, SurfaceError> {
    let genus: u64 = cycles.iter().map(|&(l, _)| l).sum();
    let n = 2 * genus as usize;
    let mut e = vec![BigInt::from(0); n * n];
    let mut start = 0usize;
    for &(l, d) in cycles {
        let twist = sl2_torsion(d)?;
        let l = l as usize;
        for j in 0..l {
            let src = start + j;
            let dst = start + (j + 1) % l;
            for r in 0..2 {
                for c in 0..2 {
                    let v = if j + 1 == l {
                        twist.get(r, c).clone()
                    } else {
                        BigInt::from(i64::from(r == c))
                    };
                    e[(2 * dst + r) * n + 2 * src + c] = v;
                }
            }
        }
        start += l;
    }
    let matrix = IntMatrix::new(n, n, e)?;
    Ok(CyclicBlockElement {
        genus,
        cycles: cycles.to_vec(),
        order: cycle_type_order(cycles),
        matrix,
    })
}

/// Partitions of `g` as non-decreasing part lists, in lexicographic order.
fn partitions(g: u64) -> Vec<Vec<u64>> {
    fn go(rest: u64, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in min..=rest {
            prefix.push(part);
            go(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(g, 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Largest-order cycle type for a partition, with the lexicographically least twists.
fn best_twists(parts: &[u64]) -> (u64, Vec<u64>) {
    use std::collections::BTreeMap;
    let mut states: BTreeMap<u64, Vec<u64>> = BTreeMap::from([(1, Vec::new())]);
    for &l in parts {
        let mut next: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (order, twists) in &states {
            for d in SL2_ORDERS {
                let o = order.lcm(&(l * d));
                let mut t = twists.clone();
                t.push(d);
                let slot = next.entry(o).or_insert_with(|| t.clone());
                if t < *slot {
                    *slot = t;
                }
            }
        }
        states = next;
    }
    states.into_iter().next_back().expect("non-empty")
}

/// Maximal-order cyclic element of the block-permutation subgroup, ties broken by the least
/// partition and then the least twists.
pub fn max_cyclic_block_element(g: u64) -> Result<CyclicBlockElement, SurfaceError> {
    require_genus(g)?;
    let mut best: Option<(u64, Vec<(u64, u64)>)> = None;
    for parts in partitions(g) {
        let (order, twists) = best_twists(&parts);
        if best.as_ref().is_none_or(|(o, _)| order > *o) {
            best = Some((order, parts.iter().copied().zip(twists).collect()));
        }
    }
    let (_, cycles) = best.expect("g has a partition");
    cyclic_block_element(&cycles)
}

/// A symplectic matrix of finite order above the Wiman bound, if the block subgroup has one.
pub fn wiman_violation_symplectic(g: u64) -> Result<Option<CyclicBlockElement>, SurfaceError> {
    let best = max_cyclic_block_element(g)?;
    Ok((best.order > wiman_bound(g)?).then_some(best))
}

/// Report for the strongest block-subgroup element against the Wiman bound.
pub fn wiman_obstruction(g: u64) -> Result<ObstructionReport, SurfaceError> {
    let best = max_cyclic_block_element(g)?;
    let witness = ObstructionWitness::Bound {
        name: "wiman".to_string(),
        bound: wiman_bound(g)?,
        order: best.order,
    };
    Ok(ObstructionReport::from_witnesses(
        vec![witness],
        "a cyclic subgroup of Out exceeding 4g+2 cannot be realised by a periodic map",
    ))
}

/// Genus `m(h − 1) + 1` of a free `Z_m` cover of a genus-`h` surface.
pub fn free_action_genus(m: u64, h: u64) -> Result<u64, SurfaceError> {
    if m == 0 {
        return Err(SurfaceError::ZeroOrder);
    }
    require_genus(h)?;
    Ok(m * (h - 1) + 1)
}

/// Rank `n′` with `1 − n = m(1 − n′)` and `n′ ≥ 2`, if one exists.
pub fn free_by_free_parameters(n: u64, m: u64) -> Option<u64> {
    if n < 2 || m < 2 || !(n - 1).is_multiple_of(m) {
        return None;
    }
    let n_prime = (n - 1) / m + 1;
    (n_prime >= 2).then_some(n_prime)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalOrder {
    /// `2ⁿn!` is the maximal finite subgroup order of `GL(n, Z)`.
    None,
    Known(#[serde(with = "crate::serde_int")] BigInt),
    /// Exceeds `2ⁿn!`; no value is recorded.
    LargerThanHyperoctahedral,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxOrderTable {
    pub rank: u64,
    /// `2ⁿn!` for `n > 2`.
    #[serde(with = "crate::serde_int::option")]
    pub out_fn: Option<BigInt>,
    /// `2ⁿ` for `n > 3`.
    #[serde(with = "crate::serde_int::option")]
    pub out_fn_abelian: Option<BigInt>,
    pub gl_exceptional: ExceptionalOrder,
}

pub fn max_order_tables(n: u64) -> Result<MaxOrderTable, SurfaceError> {
    if n < 2 {
        return Err(SurfaceError::RankTooSmall(n));
    }
    let hyperoctahedral = (1..=n).fold(BigInt::from(2).pow(n as u32), |acc, k| acc * k);
    let gl_exceptional = match n {
        2 => ExceptionalOrder::Known(BigInt::from(12u64)),
        4 => ExceptionalOrder::Known(BigInt::from(1152u64)),
        6 => ExceptionalOrder::Known(BigInt::from(51840u64)),
        7 => ExceptionalOrder::Known(BigInt::from(2903040u64)),
        8 => ExceptionalOrder::Known(BigInt::from(696729600u64)),
        9 | 10 => ExceptionalOrder::LargerThanHyperoctahedral,
        _ => ExceptionalOrder::None,
    };
    Ok(MaxOrderTable {
        rank: n,
        out_fn: (n > 2).then_some(hyperoctahedral),
        out_fn_abelian: (n > 3).then(|| BigInt::from(2).pow(n as u32)),
        gl_exceptional,
    })
}

/// Order of a symplectic matrix, as a checked `u64`.
pub fn symplectic_order(m: &IntMatrix) -> Result<Option<u64>, SurfaceError> {
    if !is_symplectic(m)? {
        return Err(SurfaceError::NotSymplectic);
    }
    Ok(match matrix_order(m)? {
        MatrixOrder::Finite(k) => Some(k),
        MatrixOrder::Infinite => None,
    })
}
