use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LinalgError;

/// Dense integer matrix with arbitrary-precision entries, stored row-major.
///
/// Values are immutable once built; every operation returns a fresh matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, LinalgError> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    /// Builds a matrix from nested rows. An empty outer vector gives the 0×0 matrix.
    pub fn from_rows<T: Clone + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRow {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().cloned().map(Into::into));
        }
        Self::new(rows.len(), cols, entries)
    }

    pub(crate) fn from_nested(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> Self {
        debug_assert_eq!(data.len(), rows);
        let entries: Vec<BigInt> = data.into_iter().flatten().collect();
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Square matrix with the given diagonal.
    pub fn diagonal<T: Clone + Into<BigInt>>(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub(crate) fn to_nested(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64` when every one fits.
    pub fn to_i64_entries(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "multiply",
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut entries = vec![BigInt::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        entries[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        })
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<Self, LinalgError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(LinalgError::DimensionMismatch {
                op,
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * k).collect(),
        }
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> Result<Self, LinalgError> {
        self.require_square("minus_identity")?;
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + i] -= 1;
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u64) -> Result<Self, LinalgError> {
        self.require_square("pow")?;
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let rows = self.rows + other.rows;
        let cols = self.cols + other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * cols + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.entries[(self.rows + i) * cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Result<BigInt, LinalgError> {
        self.require_square("trace")?;
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        self.require_square("determinant")?;
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_nested();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = t / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a = self.to_nested();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..self.rows {
                if a[i][col].is_zero() {
                    continue;
                }
                let g = a[rank][col].gcd(&a[i][col]);
                let fp = &a[i][col] / &g;
                let fi = &a[rank][col] / &g;
                for j in col..self.cols {
                    let t = &a[i][j] * &fi - &a[rank][j] * &fp;
                    a[i][j] = t;
                }
                let content = a[i][col..].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                if !content.is_zero() && !content.is_one() {
                    for x in &mut a[i][col..] {
                        *x = &*x / &content;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Characteristic polynomial `det(λI - M)`, coefficients from the constant term upward.
    /// Computed by the Faddeev–LeVerrier recurrence; every division is exact over the integers.
    pub fn char_poly(&self) -> Result<Vec<BigInt>, LinalgError> {
        self.require_square("char_poly")?;
        let n = self.rows;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut mk = Self::zeros(n, n);
        for k in 1..=n {
            let mut next = self * &mk;
            for i in 0..n {
                next.entries[i * n + i] += &coeffs[n - k + 1];
            }
            mk = next;
            let tr = (self * &mk).trace()?;
            coeffs[n - k] = -tr / BigInt::from(k);
        }
        Ok(coeffs)
    }

    /// Basis of the integer kernel `{x ∈ Z^cols : M x = 0}`, as matrix columns.
    pub fn integer_kernel(&self) -> Self {
        let snf = super::smith_normal_form(self);
        let r = snf.rank();
        let n = self.cols;
        let mut out = Self::zeros(n, n - r);
        for j in r..n {
            for i in 0..n {
                out.entries[i * (n - r) + (j - r)] = snf.v.get(i, j).clone();
            }
        }
        out
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;

    fn neg(self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::io::format_matrix_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e).unwrap()
    }

    #[test]
    fn entry_count_is_checked() {
        assert!(IntMatrix::from_i64(2, 2, &[1, 2, 3]).is_err());
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn zero_by_zero_is_legal() {
        let z = IntMatrix::identity(0);
        assert!(z.is_identity());
        assert_eq!(z.determinant().unwrap(), BigInt::one());
        assert_eq!(z.rank(), 0);
        assert_eq!(z.char_poly().unwrap(), vec![BigInt::one()]);
    }

    #[test]
    fn phi_cubed_is_minus_identity() {
        let phi = m(2, 2, &[0, 1, -1, 1]);
        let cube = phi.pow(3).unwrap();
        assert_eq!(cube, -&IntMatrix::identity(2));
        assert!(phi.pow(6).unwrap().is_identity());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = m(3, 3, &[2, -1, 0, 4, 3, 5, -2, 7, 1]);
        // 2(3-35) + 1(4+10) + 0
        assert_eq!(a.determinant().unwrap(), BigInt::from(-50));
        let b = m(3, 3, &[0, 1, 2, 0, 3, 4, 5, 6, 7]);
        assert_eq!(b.determinant().unwrap(), BigInt::from(5 * (4 - 6)));
    }

    #[test]
    fn rank_of_degenerate_matrices() {
        assert_eq!(m(2, 3, &[1, 2, 3, 2, 4, 6]).rank(), 1);
        assert_eq!(m(3, 3, &[1, 1, 1, 1, 1, 1, 1, 1, 1]).rank(), 1);
        assert_eq!(m(2, 2, &[0, 0, 0, 0]).rank(), 0);
        assert_eq!(m(3, 2, &[0, 2, 0, 3, 1, 0]).rank(), 2);
    }

    #[test]
    fn char_poly_of_phi_is_sixth_cyclotomic() {
        let phi = m(2, 2, &[0, 1, -1, 1]);
        let cp: Vec<i64> = phi
            .char_poly()
            .unwrap()
            .iter()
            .map(|x| x.to_i64().unwrap())
            .collect();
        assert_eq!(cp, vec![1, -1, 1]);
    }

    #[test]
    fn integer_kernel_spans_fixed_vectors() {
        let phi_plus = m(2, 2, &[0, 1, -1, 1]).direct_sum(&IntMatrix::identity(2));
        let k = phi_plus.minus_identity().unwrap().integer_kernel();
        assert_eq!(k.cols(), 2);
        assert!((&phi_plus.minus_identity().unwrap() * &k).is_zero());
    }
}
