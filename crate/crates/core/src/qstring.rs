//! Indeterminate-length qubit strings.
//!
//! A [`QubitString`] is a finite superposition of classical bit strings of
//! possibly different lengths, i.e. an element of the Fock space
//! `⊕ₙ (ℂ²)^⊗n`. Classical strings of different lengths are orthogonal, so
//! the inner product only pairs up identical support strings.
//!
//! The length operator is never materialized; base length and average length
//! are computed from the support directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Comparison tolerance for norms, overlaps and amplitude tests.
pub const EPS: f64 = 1e-9;

/// Terms whose squared magnitude falls below this are dropped after arithmetic.
pub const PRUNE_NORM_SQR: f64 = 1e-24;

pub type Amplitude = Complex64;

const WORD: usize = 64;

/// A classical bit string, packed most-significant-bit first.
///
/// Ordering is by length first, then lexicographic on the bits, which makes
/// the support of a [`QubitString`] iterate shortlex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    /// The empty string λ.
    pub fn empty() -> Self {
        Self::default()
    }

    /// `len` zeros.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u128, len: usize) -> Self {
        assert!(len <= 128, "from_value supports at most 128 bits");
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::empty();
        for b in bits {
            s.push(b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD] >> (WORD - 1 - i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (WORD - 1 - i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Classical concatenation `self ∘ other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    /// The first `k` bits.
    pub fn prefix(&self, k: usize) -> BitString {
        assert!(k <= self.len);
        BitString::from_bits((0..k).map(|i| self.get(i)))
    }

    /// Bits from position `k` to the end.
    pub fn suffix_from(&self, k: usize) -> BitString {
        assert!(k <= self.len);
        BitString::from_bits((k..self.len).map(|i| self.get(i)))
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && (0..self.len).all(|i| self.get(i) == other.get(i))
    }

    /// Right-pads with zeros up to `len` bits.
    pub fn padded(&self, len: usize) -> BitString {
        assert!(len >= self.len);
        let mut out = self.clone();
        while out.len < len {
            out.push(false);
        }
        out
    }

    pub fn is_all_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Value of the first `k` bits read as a big-endian integer.
    pub fn prefix_value(&self, k: usize) -> usize {
        assert!(k <= self.len && k < usize::BITS as usize);
        (0..k).fold(0usize, |acc, i| (acc << 1) | self.get(i) as usize)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("λ")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BadBits(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite superposition `Σ αₛ |s⟩` of classical bit strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QubitString {
    terms: BTreeMap<BitString, Amplitude>,
}

impl QubitString {
    /// The zero vector.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The classical basis state `|s⟩`.
    pub fn basis(s: BitString) -> Self {
        let mut q = Self::zero();
        q.terms.insert(s, Amplitude::new(1.0, 0.0));
        q
    }

    /// Parses `bits` as a classical basis state; panics on bad input.
    pub fn ket(bits: &str) -> Self {
        Self::basis(bits.parse().expect("bit string of '0'/'1'"))
    }

    /// Sums the given terms, merging repeated strings and pruning dust.
    pub fn from_terms<I: IntoIterator<Item = (BitString, Amplitude)>>(terms: I) -> Self {
        let mut q = Self::zero();
        for (s, a) in terms {
            *q.terms.entry(s).or_default() += a;
        }
        q.prune();
        q
    }

    /// Real superposition from `(bits, amplitude)` pairs.
    pub fn from_real(pairs: &[(&str, f64)]) -> Self {
        Self::from_terms(pairs.iter().map(|&(b, a)| {
            (
                b.parse().expect("bit string of '0'/'1'"),
                Amplitude::new(a, 0.0),
            )
        }))
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm_sqr() >= PRUNE_NORM_SQR);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BitString, &Amplitude)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BitString> {
        self.terms.keys()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn amplitude(&self, s: &BitString) -> Amplitude {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EPS
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::EmptySupport);
        }
        Ok(self.scaled(Amplitude::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, c: Amplitude) -> Self {
        Self::from_terms(self.terms.iter().map(|(s, a)| (s.clone(), a * c)))
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: Amplitude, other: &QubitString) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(s, a)| (s.clone(), *a))
                .chain(other.terms.iter().map(|(s, a)| (s.clone(), a * c))),
        )
    }

    /// Length of the longest string in the support.
    pub fn base_length(&self) -> Result<usize> {
        self.terms
            .keys()
            .map(BitString::len)
            .max()
            .ok_or(Error::EmptySupport)
    }

    /// Expected length `⟨ψ|Λ|ψ⟩` of a normalized string.
    pub fn avg_length(&self) -> Result<f64> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized(self.norm_sqr()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(s, a)| a.norm_sqr() * s.len() as f64)
            .sum())
    }

    /// `Some(n)` when every support string has length `n`.
    pub fn length_eigenvalue(&self) -> Option<usize> {
        let mut lens = self.terms.keys().map(BitString::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    /// `⟨self|other⟩`, antilinear in the first argument.
    pub fn inner(&self, other: &QubitString) -> Amplitude {
        let (small, large, flip) = if self.terms.len() <= other.terms.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let z: Amplitude = small
            .terms
            .iter()
            .filter_map(|(s, a)| large.terms.get(s).map(|b| a.conj() * b))
            .sum();
        if flip {
            z.conj()
        } else {
            z
        }
    }

    /// Pads every support string with trailing zeros up to `l_max` bits.
    pub fn zero_extended(&self, l_max: usize) -> Result<Self> {
        let base_length = self.terms.keys().map(BitString::len).max().unwrap_or(0);
        if base_length > l_max {
            return Err(Error::RegisterTooSmall { base_length, l_max });
        }
        // strings differing only in trailing zeros pad to the same word and add up
        Ok(Self::from_terms(
            self.terms.iter().map(|(s, a)| (s.padded(l_max), *a)),
        ))
    }

    /// Bilinear extension of classical concatenation, `Σ αₛ βₜ |s∘t⟩`.
    pub fn concat(&self, other: &QubitString) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .flat_map(|(s, a)| other.terms.iter().map(move |(t, b)| (s.concat(t), a * b))),
        )
    }

    /// Concatenation with a single classical suffix, `Σ αₓ |x∘s⟩`.
    pub fn concat_bits(&self, suffix: &BitString) -> Self {
        Self::from_terms(self.terms.iter().map(|(x, a)| (x.concat(suffix), *a)))
    }
}

impl fmt::Display for QubitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (s, a)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{:?}⟩", a.re, a.im, s)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    bits: BitString,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct QubitStringRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for QubitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        QubitStringRepr {
            terms: self
                .terms
                .iter()
                .map(|(s, a)| TermRepr {
                    bits: s.clone(),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QubitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = QubitStringRepr::deserialize(deserializer)?;
        if let Some(t) = repr
            .terms
            .iter()
            .find(|t| !t.re.is_finite() || !t.im.is_finite())
        {
            return Err(serde::de::Error::custom(format!(
                "non-finite amplitude for |{}⟩",
                t.bits
            )));
        }
        Ok(QubitString::from_terms(
            repr.terms
                .into_iter()
                .map(|t| (t.bits, Amplitude::new(t.re, t.im))),
        ))
    }
}
