//! Seeded fixtures shared by the benchmarks.

use outlift::IntMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense `rows × cols` matrix with entries in `[-bound, bound]`.
pub fn random_matrix(seed: u64, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<i64> = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    IntMatrix::from_i64(rows, cols, &entries).expect("sizes agree")
}

/// Product of `steps` random elementary matrices; determinant ±1.
pub fn random_unimodular(seed: u64, n: usize, steps: usize) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut e = vec![0i64; n * n];
        for d in 0..n {
            e[d * n + d] = 1;
        }
        e[i * n + j] = k;
        m = &IntMatrix::from_i64(n, n, &e).expect("square") * &m;
    }
    m
}

/// `P · M · P⁻¹` for a random product `P` of elementary matrices.
pub fn random_conjugate(seed: u64, m: &IntMatrix, steps: usize) -> IntMatrix {
    let n = m.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = m.clone();
    if n < 2 {
        return out;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut e = vec![0i64; n * n];
        let mut f = vec![0i64; n * n];
        for d in 0..n {
            e[d * n + d] = 1;
            f[d * n + d] = 1;
        }
        e[i * n + j] = k;
        f[i * n + j] = -k;
        let p = IntMatrix::from_i64(n, n, &e).expect("square");
        let p_inv = IntMatrix::from_i64(n, n, &f).expect("square");
        out = &(&p * &out) * &p_inv;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn fixtures_are_deterministic_and_well_formed() {
        assert_eq!(random_matrix(7, 3, 4, 9), random_matrix(7, 3, 4, 9));
        let u = random_unimodular(3, 5, 40);
        assert!(u.determinant().unwrap().abs() == 1.into());
        let m = outlift::phi_target(4);
        let c = random_conjugate(11, &m, 20);
        assert_eq!(c.char_poly().unwrap(), m.char_poly().unwrap());
    }
}
