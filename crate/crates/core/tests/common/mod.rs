#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use outlift::arith::{divisors, units_mod};
use outlift::graph_of_groups::{Edge, GraphOfGroups};
use outlift::IntMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let e: Vec<i64> = (0..rows * cols)
        .map(|_| rng.gen_range(-bound..=bound))
        .collect();
    IntMatrix::from_i64(rows, cols, &e).unwrap()
}

fn elementary(n: usize, i: usize, j: usize, k: i64) -> IntMatrix {
    let mut e = vec![0i64; n * n];
    for d in 0..n {
        e[d * n + d] = 1;
    }
    e[i * n + j] = k;
    IntMatrix::from_i64(n, n, &e).unwrap()
}

/// Random unimodular `P` together with `P⁻¹`.
pub fn random_unimodular_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    steps: usize,
) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(n);
    let mut p_inv = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            p = -&p;
            p_inv = -&p_inv;
        }
        return (p, p_inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = if rng.gen_bool(0.5) { 1 } else { -1 };
        p = &elementary(n, i, j, k) * &p;
        p_inv = &p_inv * &elementary(n, i, j, -k);
    }
    (p, p_inv)
}

pub fn conjugate(rng: &mut ChaCha8Rng, m: &IntMatrix, steps: usize) -> IntMatrix {
    let (p, p_inv) = random_unimodular_pair(rng, m.rows(), steps);
    &(&p * m) * &p_inv
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Random connected graph of groups with orders dividing `q`.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    q: u64,
    max_vertices: usize,
    extra_edges: usize,
) -> GraphOfGroups {
    let ds = divisors(q);
    let nv = rng.gen_range(1..=max_vertices);
    let vertices: Vec<u64> = (0..nv).map(|_| *ds.choose(rng).unwrap()).collect();
    let mut edges = Vec::new();
    let random_edge = |rng: &mut ChaCha8Rng, u: usize, v: usize| {
        let g = vertices[u].gcd(&vertices[v]);
        let m = *divisors(g).choose(rng).unwrap();
        let units = units_mod(m);
        let a = *units.choose(rng).unwrap();
        let b = *units.choose(rng).unwrap();
        Edge::new(u, v, m, a, b)
    };
    for v in 1..nv {
        let u = rng.gen_range(0..v);
        edges.push(random_edge(rng, u, v));
    }
    for _ in 0..rng.gen_range(0..=extra_edges) {
        let u = rng.gen_range(0..nv);
        let v = rng.gen_range(0..nv);
        edges.push(random_edge(rng, u, v));
    }
    GraphOfGroups::new(vertices, edges).unwrap()
}
