//! Small-integer number theory shared by the modules.

use num_integer::Integer;

pub fn euler_phi(mut n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Units of `Z/m`, as representatives in `1..=m` (so `Z/1` has the single unit 1).
pub fn units_mod(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![1];
    }
    (1..m).filter(|u| u.gcd(&m) == 1).collect()
}

/// Canonical representative of a unit mod `m`: in `1..m`, or `1` when `m == 1`.
pub fn normalize_unit(u: i64, m: u64) -> u64 {
    let r = u.rem_euclid(m as i64) as u64;
    if m == 1 {
        1
    } else {
        r
    }
}

/// Inverse of `u` modulo `m` (`gcd(u, m) = 1` required).
pub fn inverse_mod(u: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let e = (u as i64).extended_gcd(&(m as i64));
    if e.gcd != 1 {
        return None;
    }
    Some(normalize_unit(e.x, m))
}

/// Additive order of `x` in `Z/q`.
pub fn additive_order(x: u64, q: u64) -> u64 {
    q / x.gcd(&q)
}
