//! Exact integer linear algebra: matrices, Smith normal form, cokernels, orders.

mod abelian;
pub mod io;
mod matrix;
mod order;
mod smith;

use num_bigint::BigInt;
use thiserror::Error;

pub use abelian::{cokernel, FinGenAbGroup};
pub use matrix::IntMatrix;
pub use order::{admissible_orders, matrix_order, max_torsion_order_gl, MatrixOrder};
pub use smith::{smith_normal_form, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot {op}: {left:?} and {right:?} matrices")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} needs a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(BigInt),
    #[error("symplectic test needs even size, got {0}")]
    OddDimension(usize),
    #[error("matrix does not satisfy M^{0} = I")]
    NotPeriodic(u64),
    #[error("vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("invariant factor {0} is not at least 2")]
    BadInvariantFactor(BigInt),
    #[error("invariant factors do not form a divisibility chain")]
    DivisibilityChain,
    #[error("parse error: {0}")]
    Parse(String),
}

/// The standard alternating form on `a₁, b₁, …, a_g, b_g`.
pub fn standard_symplectic_form(g: usize) -> IntMatrix {
    let n = 2 * g;
    let mut e = vec![0i64; n * n];
    for i in 0..g {
        e[(2 * i) * n + 2 * i + 1] = 1;
        e[(2 * i + 1) * n + 2 * i] = -1;
    }
    IntMatrix::from_i64(n, n, &e).expect("sizes agree")
}

/// `Mᵀ J M = J` for the standard form `J`.
pub fn is_symplectic(m: &IntMatrix) -> Result<bool, LinalgError> {
    m.require_square("is_symplectic")?;
    if !m.rows().is_multiple_of(2) {
        return Err(LinalgError::OddDimension(m.rows()));
    }
    let j = standard_symplectic_form(m.rows() / 2);
    Ok(&(&m.transpose() * &j) * m == j)
}

/// Abelianisation of the extension `1 → Z^n → Ē → Z_q → 1` where the generator `t` of `Z_q`
/// acts by `M` and `t^q = a`.
///
/// Presented on `e₁, …, e_n, t` with relations `(M − I)e_j = 0` and `q·t − Σ aᵢeᵢ = 0`.
pub fn extension_abelianization(
    m: &IntMatrix,
    q: u64,
    a: &[BigInt],
) -> Result<FinGenAbGroup, LinalgError> {
    m.require_square("extension_abelianization")?;
    let n = m.rows();
    if a.len() != n {
        return Err(LinalgError::VectorLength {
            expected: n,
            found: a.len(),
        });
    }
    if !m.pow(q)?.is_identity() {
        return Err(LinalgError::NotPeriodic(q));
    }
    let mmi = m.minus_identity()?;
    let mut entries = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..n {
        entries.extend(mmi.row(i).iter().cloned());
        entries.push(-&a[i]);
    }
    entries.extend(std::iter::repeat_n(BigInt::from(0), n));
    entries.push(BigInt::from(q));
    Ok(cokernel(&IntMatrix::new(n + 1, n + 1, entries)?))
}

/// The six-periodic matrix `φ ⊕ I_{n−2}` with `φ(e₁) = −e₂`, `φ(e₂) = e₁ + e₂`.
pub fn phi_target(n: usize) -> IntMatrix {
    assert!(n >= 2, "phi needs rank at least 2");
    let phi = IntMatrix::from_i64(2, 2, &[0, 1, -1, 1]).expect("2x2");
    phi.direct_sum(&IntMatrix::identity(n - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn phi_acts_as_described() {
        let phi = phi_target(2);
        assert_eq!(phi.column(0), ints(&[0, -1]));
        assert_eq!(phi.column(1), ints(&[1, 1]));
    }

    #[test]
    fn symplectic_examples() {
        assert!(is_symplectic(&IntMatrix::identity(4)).unwrap());
        assert!(is_symplectic(&phi_target(2)).unwrap());
        assert!(!is_symplectic(&IntMatrix::diagonal(&[2, 1])).unwrap());
        assert!(is_symplectic(&IntMatrix::identity(3)).is_err());
    }

    #[test]
    fn split_extension_of_phi() {
        for n in 2..=6 {
            let g = extension_abelianization(&phi_target(n), 6, &vec![BigInt::from(0); n]).unwrap();
            assert_eq!(
                g,
                FinGenAbGroup::from_invariant_factors(n - 2, &[6]).unwrap()
            );
        }
    }

    #[test]
    fn trivial_monodromy() {
        for n in 0..4 {
            let g = extension_abelianization(&IntMatrix::identity(n), 1, &vec![BigInt::from(0); n])
                .unwrap();
            assert_eq!(g, FinGenAbGroup::free(n));
        }
    }

    /// Determinantal-divisor oracle for M = φ, q = 6, a = e₁: the 3×3 presentation has
    /// determinant 6, and its (φ − I) block is a 2×2 minor equal to 1, so d₁ = d₂ = 1, d₃ = 6.
    #[test]
    fn phi_with_cocycle_e1() {
        let a = ints(&[1, 0]);
        let g = extension_abelianization(&phi_target(2), 6, &a).unwrap();
        // det [[-1, 1, -1], [-1, 0, 0], [0, 0, 6]] = 6 · det(φ − I) = 6
        let pres = IntMatrix::from_i64(3, 3, &[-1, 1, -1, -1, 0, 0, 0, 0, 6]).unwrap();
        assert_eq!(pres.determinant().unwrap(), BigInt::from(6));
        assert!(g.is_finite());
        let order = g.torsion_order();
        assert!(BigInt::from(6).is_multiple_of(&order));
        assert_eq!(g, FinGenAbGroup::from_invariant_factors(0, &[6]).unwrap());
    }

    #[test]
    fn non_periodic_monodromy_is_rejected() {
        let err = extension_abelianization(&phi_target(2), 4, &ints(&[0, 0]));
        assert_eq!(err, Err(LinalgError::NotPeriodic(4)));
        assert!(extension_abelianization(&phi_target(2), 6, &ints(&[0])).is_err());
    }
}
