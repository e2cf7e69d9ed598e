#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qprefix::codec::Ensemble;
use qprefix::hilbert::Ket;
use qprefix::{BitString, QubitString};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_ensemble(name: &str) -> Ensemble {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn strange_basis() -> Vec<QubitString> {
    vec![
        QubitString::from_real(&[("1", FRAC_1_SQRT_2), ("01", FRAC_1_SQRT_2)]),
        QubitString::from_real(&[("10", FRAC_1_SQRT_2), ("010", -FRAC_1_SQRT_2)]),
    ]
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Leaves of a random binary tree grown by `splits` splits, some dropped.
pub fn random_prefix_code<R: Rng>(
    rng: &mut R,
    max_splits: usize,
    min_words: usize,
) -> Vec<BitString> {
    loop {
        let mut leaves = vec![BitString::empty()];
        for _ in 0..rng.random_range(1..=max_splits) {
            let i = rng.random_range(0..leaves.len());
            let leaf = leaves.swap_remove(i);
            let (mut a, mut b) = (leaf.clone(), leaf);
            a.push(false);
            b.push(true);
            leaves.push(a);
            leaves.push(b);
        }
        leaves.retain(|_| rng.random_bool(0.75));
        if leaves.len() >= min_words {
            leaves.sort();
            return leaves;
        }
    }
}

/// Unitary from the QR factor of a random complex matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, k: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(k, k, |_, _| random_complex(rng));
    m.qr().q()
}

/// Columns of `u` expressed on the orthonormal set `basis`.
pub fn rotate(basis: &[QubitString], u: &DMatrix<Complex64>) -> Vec<QubitString> {
    (0..u.ncols())
        .map(|j| {
            basis
                .iter()
                .enumerate()
                .fold(QubitString::zero(), |acc, (i, b)| {
                    acc.add_scaled(u[(i, j)], b)
                })
        })
        .collect()
}

/// Rotation that only mixes words of equal length, so every output vector is
/// a length eigenvector.
pub fn rotate_within_lengths<R: Rng>(rng: &mut R, words: &[BitString]) -> Vec<QubitString> {
    let mut out = Vec::new();
    let mut lengths: Vec<usize> = words.iter().map(BitString::len).collect();
    lengths.dedup();
    for l in lengths {
        let block: Vec<QubitString> = words
            .iter()
            .filter(|w| w.len() == l)
            .cloned()
            .map(QubitString::basis)
            .collect();
        let u = random_unitary(rng, block.len());
        out.extend(rotate(&block, &u));
    }
    out
}

pub fn random_span_element<R: Rng>(rng: &mut R, basis: &[QubitString]) -> QubitString {
    basis
        .iter()
        .fold(QubitString::zero(), |acc, b| {
            acc.add_scaled(random_complex(rng), b)
        })
        .normalized()
        .unwrap()
}

pub fn random_qstring<R: Rng>(rng: &mut R, max_terms: usize, max_len: usize) -> QubitString {
    let terms: Vec<(BitString, Complex64)> = (0..rng.random_range(1..=max_terms))
        .map(|_| {
            let len = rng.random_range(0..=max_len);
            let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
            (BitString::from_bits(bits), random_complex(rng))
        })
        .collect();
    let q = QubitString::from_terms(terms);
    if q.is_zero() {
        QubitString::ket("1")
    } else {
        q.normalized().unwrap()
    }
}

/// Probabilities with three decimals, each at least 0.001.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut cuts: Vec<u32> = (0..n - 1)
        .map(|_| rng.random_range(1..1000 - n as u32))
        .collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut ks = Vec::with_capacity(n);
    for (i, &cut) in cuts.iter().enumerate() {
        let cut = cut + i as u32 + 1;
        ks.push(cut - prev);
        prev = cut;
    }
    ks.push(1000 - prev);
    ks.into_iter().map(|k| k as f64 / 1000.0).collect()
}

pub fn random_ket<R: Rng>(rng: &mut R, d: usize) -> Ket {
    let k = Ket::from_fn(d, |_, _| random_complex(rng));
    let n = k.norm();
    k / c(n, 0.0)
}

/// Random ensemble mixing fresh vectors with repeated, parallel and
/// dependent ones.
pub fn random_ensemble<R: Rng>(rng: &mut R, n: usize, d: usize) -> Ensemble {
    let p = random_distribution(rng, n);
    let mut vectors: Vec<Ket> = Vec::with_capacity(n);
    for _ in 0..n {
        let v = if vectors.is_empty() {
            random_ket(rng, d)
        } else {
            match rng.random_range(0..10) {
                0 | 1 => vectors.choose(rng).unwrap().clone(),
                2 => {
                    let phase =
                        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                    vectors.choose(rng).unwrap() * phase
                }
                3 | 4 => {
                    let a = vectors.choose(rng).unwrap();
                    let b = vectors.choose(rng).unwrap();
                    let mix = a * random_complex(rng) + b * random_complex(rng);
                    let n = mix.norm();
                    if n < 1e-3 {
                        random_ket(rng, d)
                    } else {
                        mix / c(n, 0.0)
                    }
                }
                _ => random_ket(rng, d),
            }
        };
        vectors.push(v);
    }
    Ensemble::from_pairs(d, p.into_iter().zip(vectors).collect()).unwrap()
}

pub fn random_span_ket<R: Rng>(rng: &mut R, e: &Ensemble) -> Ket {
    let mut v = Ket::zeros(e.dimension());
    for s in e.states() {
        v += &s.vector * random_complex(rng);
    }
    let n = v.norm();
    if n < 1e-6 {
        return e.states()[0].vector.clone();
    }
    v / c(n, 0.0)
}
