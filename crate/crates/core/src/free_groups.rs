//! Words and automorphisms of free groups.
//!
//! Generators of `F_n` are `1..=n`; a negative letter is the inverse generator.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeGroupError {
    #[error("letter {letter} is out of range for rank {rank}")]
    LetterOutOfRange { letter: i64, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("expected {expected} words, got {found}")]
    WordCount { expected: usize, found: usize },
    #[error("images and inverse images do not compose to the identity on generator {0}")]
    NotInverse(usize),
    #[error("witness order must be at least 2, got {0}")]
    WitnessOrder(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A freely reduced word over a fixed ambient rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

fn push_reduced(acc: &mut Vec<i32>, x: i32) {
    if acc.last() == Some(&-x) {
        acc.pop();
    } else {
        acc.push(x);
    }
}

impl FreeWord {
    /// Freely reduces a raw letter sequence.
    pub fn reduce(rank: usize, raw: &[i64]) -> Result<Self, FreeGroupError> {
        let mut letters = Vec::with_capacity(raw.len());
        for &x in raw {
            if x == 0 || x.unsigned_abs() as usize > rank {
                return Err(FreeGroupError::LetterOutOfRange { letter: x, rank });
            }
            push_reduced(&mut letters, x as i32);
        }
        Ok(Self { rank, letters })
    }

    pub fn identity(rank: usize) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator with 1-based index `i`.
    pub fn generator(rank: usize, i: usize) -> Self {
        assert!((1..=rank).contains(&i), "generator {i} outside rank {rank}");
        Self {
            rank,
            letters: vec![i as i32],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&x| -x).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self, FreeGroupError> {
        check_rank(self.rank, other.rank)?;
        let mut letters = self.letters.clone();
        for &x in &other.letters {
            push_reduced(&mut letters, x);
        }
        Ok(Self {
            rank: self.rank,
            letters,
        })
    }

    /// `w x w⁻¹`.
    pub fn conjugate_by(&self, w: &Self) -> Result<Self, FreeGroupError> {
        w.concat(self)?.concat(&w.inverse())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.rank];
        for &x in &self.letters {
            out[x.unsigned_abs() as usize - 1] += i64::from(x.signum());
        }
        out
    }

    /// Parses space-separated signed generator indices; `.` or an empty string is the empty word.
    pub fn parse(rank: usize, s: &str) -> Result<Self, FreeGroupError> {
        let s = s.trim();
        if s.is_empty() || s == "." {
            return Ok(Self::identity(rank));
        }
        let raw: Vec<i64> = s
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| FreeGroupError::Parse(format!("bad letter {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        Self::reduce(rank, &raw)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str(".");
        }
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

fn check_rank(left: usize, right: usize) -> Result<(), FreeGroupError> {
    if left == right {
        Ok(())
    } else {
        Err(FreeGroupError::RankMismatch { left, right })
    }
}

/// An automorphism of `F_n`, carried together with its inverse so invertibility is certified.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<FreeWord>,
    inverse_images: Vec<FreeWord>,
}

fn substitute(images: &[FreeWord], rank: usize, w: &FreeWord) -> FreeWord {
    let mut letters = Vec::new();
    for &x in &w.letters {
        let img = &images[x.unsigned_abs() as usize - 1];
        if x > 0 {
            for &y in &img.letters {
                push_reduced(&mut letters, y);
            }
        } else {
            for &y in img.letters.iter().rev() {
                push_reduced(&mut letters, -y);
            }
        }
    }
    FreeWord { rank, letters }
}

impl FreeAutomorphism {
    /// Checks that both compositions fix every generator.
    pub fn new(
        images: Vec<FreeWord>,
        inverse_images: Vec<FreeWord>,
    ) -> Result<Self, FreeGroupError> {
        let rank = images.len();
        if inverse_images.len() != rank {
            return Err(FreeGroupError::WordCount {
                expected: rank,
                found: inverse_images.len(),
            });
        }
        for w in images.iter().chain(&inverse_images) {
            check_rank(rank, w.rank)?;
        }
        for i in 1..=rank {
            let x = FreeWord::generator(rank, i);
            let there_and_back = substitute(&images, rank, &substitute(&inverse_images, rank, &x));
            let back_and_there = substitute(&inverse_images, rank, &substitute(&images, rank, &x));
            if there_and_back != x || back_and_there != x {
                return Err(FreeGroupError::NotInverse(i));
            }
        }
        Ok(Self {
            rank,
            images,
            inverse_images,
        })
    }

    pub fn identity(rank: usize) -> Self {
        let gens: Vec<FreeWord> = (1..=rank).map(|i| FreeWord::generator(rank, i)).collect();
        Self {
            rank,
            images: gens.clone(),
            inverse_images: gens,
        }
    }

    /// Inner automorphism `x ↦ w x w⁻¹`.
    pub fn conjugation(w: &FreeWord) -> Self {
        let rank = w.rank;
        let winv = w.inverse();
        let conj = |by: &FreeWord| -> Vec<FreeWord> {
            (1..=rank)
                .map(|i| {
                    FreeWord::generator(rank, i)
                        .conjugate_by(by)
                        .expect("same rank")
                })
                .collect()
        };
        Self {
            rank,
            images: conj(w),
            inverse_images: conj(&winv),
        }
    }

    /// Permutes generators: `x_i ↦ x_{perm[i]}` (0-based permutation).
    pub fn permutation(perm: &[usize]) -> Result<Self, FreeGroupError> {
        let rank = perm.len();
        let mut inv = vec![usize::MAX; rank];
        for (i, &p) in perm.iter().enumerate() {
            if p >= rank || inv[p] != usize::MAX {
                return Err(FreeGroupError::Parse(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            inv[p] = i;
        }
        Self::new(
            perm.iter()
                .map(|&p| FreeWord::generator(rank, p + 1))
                .collect(),
            inv.iter()
                .map(|&p| FreeWord::generator(rank, p + 1))
                .collect(),
        )
    }

    /// Elementary Nielsen move `x_i ↦ x_i^{-1}` (1-based).
    pub fn inversion(rank: usize, i: usize) -> Self {
        let mut images: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
        images[i - 1] = images[i - 1].inverse();
        Self {
            rank,
            inverse_images: images.clone(),
            images,
        }
    }

    /// Elementary Nielsen move `x_i ↦ x_i x_j^{±1}` (1-based, `i ≠ j`).
    pub fn transvection(rank: usize, i: usize, j: usize, sign: i32) -> Self {
        assert!(i != j, "transvection needs distinct generators");
        let gens: Vec<FreeWord> = (1..=rank).map(|k| FreeWord::generator(rank, k)).collect();
        let xj = if sign >= 0 {
            gens[j - 1].clone()
        } else {
            gens[j - 1].inverse()
        };
        let mut images = gens.clone();
        let mut inverse_images = gens.clone();
        images[i - 1] = gens[i - 1].concat(&xj).expect("same rank");
        inverse_images[i - 1] = gens[i - 1].concat(&xj.inverse()).expect("same rank");
        Self {
            rank,
            images,
            inverse_images,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[FreeWord] {
        &self.inverse_images
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord, FreeGroupError> {
        check_rank(self.rank, w.rank)?;
        Ok(substitute(&self.images, self.rank, w))
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self, FreeGroupError> {
        check_rank(self.rank, other.rank)?;
        let images = other
            .images
            .iter()
            .map(|w| substitute(&self.images, self.rank, w))
            .collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, self.rank, w))
            .collect();
        Ok(Self {
            rank: self.rank,
            images,
            inverse_images,
        })
    }

    pub fn power(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.rank);
        for _ in 0..k {
            acc = self.compose(&acc).expect("same rank");
        }
        acc
    }

    /// Whether this automorphism is exactly `x ↦ w x w⁻¹` on every generator.
    pub fn is_inner(&self, w: &FreeWord) -> Result<bool, FreeGroupError> {
        check_rank(self.rank, w.rank)?;
        for (i, img) in self.images.iter().enumerate() {
            if *img != FreeWord::generator(self.rank, i + 1).conjugate_by(w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exponent-sum matrix; column `j` is the image of the `j`-th generator in `Z^n`.
    pub fn abelianize(&self) -> IntMatrix {
        let n = self.rank;
        let mut entries = vec![BigInt::from(0); n * n];
        for (j, img) in self.images.iter().enumerate() {
            for (i, e) in img.exponent_sums().into_iter().enumerate() {
                entries[i * n + j] = BigInt::from(e);
            }
        }
        IntMatrix::new(n, n, entries).expect("square")
    }

    /// Reads `n` image lines followed by `n` inverse-image lines.
    pub fn parse(text: &str) -> Result<Self, FreeGroupError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if !lines.len().is_multiple_of(2) {
            return Err(FreeGroupError::Parse(format!(
                "expected an even number of word lines, found {}",
                lines.len()
            )));
        }
        let rank = lines.len() / 2;
        let words: Vec<FreeWord> = lines
            .iter()
            .map(|l| FreeWord::parse(rank, l))
            .collect::<Result<_, _>>()?;
        let (images, inverse_images) = words.split_at(rank);
        Self::new(images.to_vec(), inverse_images.to_vec())
    }
}

impl fmt::Display for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in self.images.iter().chain(&self.inverse_images) {
            writeln!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Conjugation by `a` on the kernel of `F₂ = ⟨a, b⟩ → Z_m` (`a ↦ 1`, `b ↦ 0`).
///
/// The kernel is free on `b₀, …, b_{m−1}, z` with `bᵢ = aⁱ b a⁻ⁱ` and `z = aᵐ`, so it has
/// rank `m + 1`; these are generators `1..=m` and `m + 1`. The automorphism sends
/// `bᵢ ↦ b_{i+1}`, `b_{m−1} ↦ z b₀ z⁻¹`, `z ↦ z`. Its `m`-th power is conjugation by `z`,
/// while its abelianisation has order exactly `m`.
pub fn conjugation_witness(m: u64) -> Result<FreeAutomorphism, FreeGroupError> {
    if m < 2 {
        return Err(FreeGroupError::WitnessOrder(m));
    }
    let m = m as usize;
    let rank = m + 1;
    let b = |i: usize| FreeWord::generator(rank, i + 1);
    let z = FreeWord::generator(rank, rank);
    let mut images = Vec::with_capacity(rank);
    let mut inverse_images = Vec::with_capacity(rank);
    for i in 0..m {
        images.push(if i + 1 < m {
            b(i + 1)
        } else {
            b(0).conjugate_by(&z)?
        });
        inverse_images.push(if i == 0 {
            b(m - 1).conjugate_by(&z.inverse())?
        } else {
            b(i - 1)
        });
    }
    images.push(z.clone());
    inverse_images.push(z);
    FreeAutomorphism::new(images, inverse_images)
}
