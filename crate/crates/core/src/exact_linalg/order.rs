use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{IntMatrix, LinalgError};
use crate::arith::euler_phi;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixOrder {
    Finite(u64),
    Infinite,
}

impl MatrixOrder {
    pub fn finite(self) -> Option<u64> {
        match self {
            MatrixOrder::Finite(k) => Some(k),
            MatrixOrder::Infinite => None,
        }
    }
}

/// For each order `k` realisable by a finite-order element of `GL(n, Z)`, the smallest
/// total cyclotomic degree `Σ φ(dᵢ)` over multisets with `lcm(dᵢ) = k`.
fn order_costs(n: usize) -> BTreeMap<u64, usize> {
    let n64 = n as u64;
    // φ(d) ≥ √(d/2), so nothing beyond 2n² can fit.
    let limit = (2 * n64 * n64).max(2);
    let mut best: BTreeMap<u64, usize> = BTreeMap::from([(1, 0)]);
    for d in 2..=limit {
        let cost = euler_phi(d) as usize;
        if cost > n {
            continue;
        }
        let snapshot: Vec<(u64, usize)> = best.iter().map(|(&l, &c)| (l, c)).collect();
        for (l, c) in snapshot {
            let total = c + cost;
            if total > n {
                continue;
            }
            let l2 = l.lcm(&d);
            let slot = best.entry(l2).or_insert(usize::MAX);
            if total < *slot {
                *slot = total;
            }
        }
    }
    best
}

/// Every finite order an element of `GL(n, Z)` can have, ascending.
pub fn admissible_orders(n: usize) -> Vec<u64> {
    order_costs(n).into_keys().collect()
}

/// Largest finite order of an element of `GL(n, Z)`.
pub fn max_torsion_order_gl(n: usize) -> u64 {
    admissible_orders(n).into_iter().max().unwrap_or(1)
}

const SIEVE_PRIME: u64 = (1 << 61) - 1;

fn mod_matrix(m: &IntMatrix) -> Vec<u64> {
    let p = BigInt::from(SIEVE_PRIME);
    m.entries()
        .iter()
        .map(|x| x.mod_floor(&p).to_u64().expect("reduced below p"))
        .collect()
}

fn mod_mul(a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let p = SIEVE_PRIME as u128;
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc = (acc + a[i * n + k] as u128 * b[k * n + j] as u128) % p;
            }
            out[i * n + j] = acc as u64;
        }
    }
    out
}

fn mod_pow(a: &[u64], mut k: u64, n: usize) -> Vec<u64> {
    let mut acc: Vec<u64> = (0..n * n).map(|i| u64::from(i / n == i % n)).collect();
    let mut base = a.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            acc = mod_mul(&acc, &base, n);
        }
        k >>= 1;
        if k > 0 {
            base = mod_mul(&base, &base, n);
        }
    }
    acc
}

fn mod_is_identity(a: &[u64], n: usize) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, &x)| x == u64::from(i / n == i % n))
}

/// Multiplicative order of a unimodular matrix.
///
/// Candidates are the admissible orders for the dimension, tried in ascending order.
/// A residue check modulo a large prime discards most candidates; every positive answer
/// is confirmed by exact multiplication.
pub fn matrix_order(m: &IntMatrix) -> Result<MatrixOrder, LinalgError> {
    m.require_square("matrix_order")?;
    let det = m.determinant()?;
    if !det.abs().is_one() {
        return Err(LinalgError::NotUnimodular(det));
    }
    let n = m.rows();
    let reduced = mod_matrix(m);
    for k in admissible_orders(n) {
        if !mod_is_identity(&mod_pow(&reduced, k, n), n) {
            continue;
        }
        if m.pow(k)?.is_identity() {
            return Ok(MatrixOrder::Finite(k));
        }
    }
    Ok(MatrixOrder::Infinite)
}
