use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `D = U·M·V` with `U`, `V` unimodular and `D` diagonal with `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal of `D`, including trailing zeros, of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            for row in &mut self.v {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q · row_k
    fn row_axpy(&mut self, i: usize, k: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = q * &self.a[k][j];
            self.a[i][j] -= t;
        }
        for j in 0..self.rows {
            let t = q * &self.u[k][j];
            self.u[i][j] -= t;
        }
    }

    /// col_j -= q · col_k
    fn col_axpy(&mut self, j: usize, k: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = q * &self.a[i][k];
            self.a[i][j] -= t;
        }
        for i in 0..self.cols {
            let t = q * &self.v[i][k];
            self.v[i][j] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        for x in &mut self.u[i] {
            *x = -&*x;
        }
    }

    /// Position of the smallest nonzero |entry| in the trailing block starting at (t, t).
    fn min_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Smallest nonzero |entry| in row t or column t (at or beyond the pivot).
    fn min_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let mut best_abs: Option<BigInt> = None;
        let mut consider = |i: usize, j: usize, x: &BigInt| {
            if !x.is_zero() && best_abs.as_ref().is_none_or(|b| x.abs() < *b) {
                best_abs = Some(x.abs());
                best = (i, j);
            }
        };
        for i in t..self.rows {
            consider(i, t, &self.a[i][t]);
        }
        for j in t + 1..self.cols {
            consider(t, j, &self.a[t][j]);
        }
        best
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = Work {
        a: m.to_nested(),
        u: IntMatrix::identity(rows).to_nested(),
        v: IntMatrix::identity(cols).to_nested(),
        rows,
        cols,
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.min_in_block(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !w.a[i][t].is_zero() {
                    let q = &w.a[i][t] / &w.a[t][t];
                    w.row_axpy(i, t, &q);
                    dirty |= !w.a[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !w.a[t][j].is_zero() {
                    let q = &w.a[t][j] / &w.a[t][t];
                    w.col_axpy(j, t, &q);
                    dirty |= !w.a[t][j].is_zero();
                }
            }
            if dirty {
                let (i, j) = w.min_in_cross(t);
                w.swap_rows(t, i);
                w.swap_cols(t, j);
                continue;
            }
            // Row and column are clear; enforce divisibility on the trailing block.
            let pivot = w.a[t][t].clone();
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&w.a[i][j] % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    w.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }

    SmithForm {
        u: IntMatrix::from_nested(rows, rows, w.u),
        d: IntMatrix::from_nested(rows, cols, w.a),
        v: IntMatrix::from_nested(cols, cols, w.v),
    }
}
