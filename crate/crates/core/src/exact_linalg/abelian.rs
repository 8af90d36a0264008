use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{smith_normal_form, IntMatrix, LinalgError};
use crate::serde_int;

/// Finitely generated abelian group `Z^free_rank ⊕ Z_{d₁} ⊕ … ⊕ Z_{d_k}` in invariant-factor form.
///
/// Every stored factor is at least 2 and each divides the next.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinGenAbGroup {
    free_rank: usize,
    #[serde(with = "serde_int::vec")]
    torsion: Vec<BigInt>,
}

impl FinGenAbGroup {
    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Accepts an already-canonical invariant factor chain (factors equal to 1 are dropped).
    pub fn from_invariant_factors<T: Clone + Into<BigInt>>(
        free_rank: usize,
        factors: &[T],
    ) -> Result<Self, LinalgError> {
        let torsion: Vec<BigInt> = factors
            .iter()
            .cloned()
            .map(Into::into)
            .filter(|d: &BigInt| !d.is_one())
            .collect();
        if let Some(bad) = torsion.iter().find(|d| *d < &BigInt::from(2)) {
            return Err(LinalgError::BadInvariantFactor(bad.clone()));
        }
        if torsion.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(LinalgError::DivisibilityChain);
        }
        Ok(Self { free_rank, torsion })
    }

    /// Canonicalises `Z^free_rank ⊕ ⊕ Z_{m_i}` for arbitrary cyclic orders `m_i ≥ 1`.
    pub fn from_cyclic_orders<T: Clone + Into<BigInt>>(free_rank: usize, orders: &[T]) -> Self {
        let diag: Vec<BigInt> = orders.iter().cloned().map(Into::into).collect();
        let mut g = cokernel(&IntMatrix::diagonal(&diag));
        g.free_rank += free_rank;
        g
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for FinGenAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z_{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Quotient of `Z^rows` by the column span of `m`, in canonical form.
pub fn cokernel(m: &IntMatrix) -> FinGenAbGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let nonzero: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    let free_rank = m.rows() - nonzero.len();
    let torsion = nonzero
        .into_iter()
        .map(|d| d.abs())
        .filter(|d| !d.is_one())
        .collect();
    FinGenAbGroup { free_rank, torsion }
}
