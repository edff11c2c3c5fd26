//! Test-side oracles. Everything here is computed from definitions by brute
//! force and shares no code paths with the library beyond data types.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qmeasure::rational::ComplexRational;
use qmeasure::{HistoriesTheory, MeasureSource, SampleSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn c(re: i64, im: i64) -> ComplexRational {
    Complex::new(r(re, 1), r(im, 1))
}

/// `mu(A) = sum_{i,j in A} Re D(i, j)` straight from the matrix.
pub fn mu_from_matrix(matrix: &[Vec<ComplexRational>], mask: u32) -> BigRational {
    let n = matrix.len();
    let mut total = BigRational::zero();
    for i in (0..n).filter(|i| mask >> i & 1 == 1) {
        for j in (0..n).filter(|j| mask >> j & 1 == 1) {
            total += &matrix[i][j].re;
        }
    }
    total
}

pub fn mu_table(theory: &HistoriesTheory) -> Vec<BigRational> {
    match theory.source() {
        MeasureSource::Table(values) => values.clone(),
        MeasureSource::Decoherence(m) => (0..1u32 << m.len())
            .map(|mask| mu_from_matrix(m, mask))
            .collect(),
    }
}

pub fn is_null(value: &BigRational, eps: &BigRational) -> bool {
    if eps.is_zero() {
        value.is_zero()
    } else {
        value < eps
    }
}

/// `negligible[A]`: some superset of `A` is null, found by walking the
/// subsets of the complement of `A`.
pub fn negligible(table: &[BigRational], eps: &BigRational) -> Vec<bool> {
    let size = table.len() as u32;
    let full = size - 1;
    (0..size)
        .map(|a| {
            let rest = full & !a;
            let mut s = rest;
            loop {
                if is_null(&table[(a | s) as usize], eps) {
                    return true;
                }
                if s == 0 {
                    return false;
                }
                s = (s - 1) & rest;
            }
        })
        .collect()
}

/// Primitive duals of the uniform measure on `histories` points: with
/// `k = ceil(eps * histories)` an event is eps-null iff it has fewer than
/// `k` points, so the primitives are exactly the `k`-point events.
pub fn uniform_primitives(histories: usize, k: u32) -> Vec<u32> {
    (1..1u32 << histories)
        .filter(|m| m.count_ones() == k)
        .collect()
}

/// Non-negligible events all of whose proper subsets are negligible.
pub fn minimal_non_negligible(negligible: &[bool]) -> Vec<u32> {
    let size = negligible.len() as u32;
    (1..size)
        .filter(|&a| !negligible[a as usize])
        .filter(|&a| {
            (0..a)
                .filter(|b| b & a == *b)
                .all(|b| negligible[b as usize])
        })
        .collect()
}

pub fn primitive_masks(theory: &HistoriesTheory, eps: &BigRational) -> Vec<u32> {
    minimal_non_negligible(&negligible(&mu_table(theory), eps))
}

/// Row `n` of Pascal's triangle.
pub fn pascal_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        for w in row.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigUint::one());
        row = next;
    }
    row
}

/// `sum_{k <= h} C(n, k)`.
pub fn tail_count(row: &[BigUint], h: usize) -> BigUint {
    row[..=h].iter().sum()
}

/// Greatest `h` with `tail_count(h) / 2^n < num / den` for the fair coin.
pub fn fair_threshold(n: usize, num: u64, den: u64) -> Option<usize> {
    let row = pascal_row(n);
    let scale = BigUint::one() << n;
    let mut running = BigUint::zero();
    let mut last = None;
    for (h, c) in row.iter().enumerate() {
        running += c;
        if &running * den < &scale * num {
            last = Some(h);
        } else {
            break;
        }
    }
    last
}

pub fn as_int(value: &BigUint) -> BigInt {
    BigInt::from(value.clone())
}

pub fn random_table_theory(n: usize, rng: &mut ChaCha8Rng) -> HistoriesTheory {
    let values = (0..1usize << n)
        .map(|m| {
            if m == 0 {
                BigRational::zero()
            } else {
                r(rng.random_range(0..=6), 6)
            }
        })
        .collect();
    HistoriesTheory::new(
        SampleSpace::indexed(n).unwrap(),
        MeasureSource::Table(values),
    )
    .unwrap()
}

/// Classical weights with some exact zeros, summing to 1 unless all vanish.
pub fn random_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<BigRational> {
    let raw: Vec<i64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.3) {
                0
            } else {
                rng.random_range(1..=5)
            }
        })
        .collect();
    let total = raw.iter().sum::<i64>().max(1);
    raw.into_iter().map(|w| r(w, total)).collect()
}

pub fn random_classical(n: usize, rng: &mut ChaCha8Rng) -> HistoriesTheory {
    HistoriesTheory::classical(SampleSpace::indexed(n).unwrap(), &random_weights(n, rng)).unwrap()
}

/// Positive semidefinite `D` as a sum of rank-one Gaussian-integer terms.
pub fn random_decoherence_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<ComplexRational>> {
    let mut m = vec![vec![c(0, 0); n]; n];
    for _ in 0..rng.random_range(1..=3) {
        let v: Vec<ComplexRational> = (0..n)
            .map(|_| c(rng.random_range(-2..=2), rng.random_range(-2..=2)))
            .collect();
        for i in 0..n {
            for j in 0..n {
                m[i][j] = &m[i][j] + &v[i] * v[j].conj();
            }
        }
    }
    m
}

pub fn random_decoherence(n: usize, rng: &mut ChaCha8Rng) -> HistoriesTheory {
    let m = random_decoherence_matrix(n, rng);
    HistoriesTheory::new(
        SampleSpace::indexed(n).unwrap(),
        MeasureSource::Decoherence(m),
    )
    .unwrap()
}

/// Every ordered triple of pairwise disjoint masks (empty allowed).
pub fn disjoint_triples(n: usize) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let (mut a, mut b, mut c) = (0u32, 0u32, 0u32);
        let mut x = code;
        for i in 0..n {
            match x % 4 {
                1 => a |= 1 << i,
                2 => b |= 1 << i,
                3 => c |= 1 << i,
                _ => {}
            }
            x /= 4;
        }
        out.push((a, b, c));
    }
    out
}

/// Set partitions of `0..n` as block masks, by assigning each element to an
/// existing block or a new one.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for k in 0..blocks.len() {
            blocks[k] |= 1 << i;
            go(i + 1, n, blocks, out);
            blocks[k] &= !(1 << i);
        }
        blocks.push(1 << i);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}
