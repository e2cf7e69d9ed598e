//! Optimal lossless prefix codes for quantum ensembles.
//!
//! The optimal expected base length of a lossless prefix code for an ensemble
//! `{pᵢ, |ψᵢ⟩}` is the smallest monotone entropy over all sequential
//! projections of the ensemble. This module enumerates the sequential
//! projections, solves the monotone-entropy integer program exactly, and
//! builds the code: the k-th Gram-Schmidt vector of the chosen
//! representatives is mapped to the k-th canonical classical code word.

use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{kron, HilbertVector, Ket};
use crate::prefix::{gram_schmidt, is_prefix_free, projection_residual, DEPENDENCY_TOL};
use crate::qstring::{BitString, QubitString, EPS};

/// Tolerance for comparing probabilities and objective values.
pub const PROB_TOL: f64 = 1e-12;

/// Largest ensemble accepted by [`sequential_projections`].
pub const MAX_ENUMERATED_STATES: usize = 20;

/// Longest code word representable in exact Kraft arithmetic.
pub const MAX_CODEWORD_LENGTH: u32 = 127;

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleState {
    pub probability: f64,
    pub vector: Ket,
}

/// A probability-weighted list of unit vectors in a `dimension`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dimension: usize,
    states: Vec<EnsembleState>,
}

impl Ensemble {
    pub fn new(dimension: usize, states: Vec<EnsembleState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble has no states".into()));
        }
        if dimension == 0 {
            return Err(Error::InvalidEnsemble("dimension must be positive".into()));
        }
        let mut total = 0.0;
        for (i, st) in states.iter().enumerate() {
            if !(st.probability.is_finite() && st.probability > 0.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "state {i} has non-positive probability {}",
                    st.probability
                )));
            }
            if st.vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: st.vector.len(),
                });
            }
            if st
                .vector
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return Err(Error::InvalidEnsemble(format!(
                    "state {i} has a non-finite amplitude"
                )));
            }
            let norm = st.vector.norm();
            if (norm - 1.0).abs() > EPS {
                return Err(Error::InvalidEnsemble(format!("state {i} has norm {norm}")));
            }
            total += st.probability;
        }
        if (total - 1.0).abs() > EPS {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { dimension, states })
    }

    /// Convenience constructor from `(probability, vector)` pairs.
    pub fn from_pairs(dimension: usize, pairs: Vec<(f64, Ket)>) -> Result<Self> {
        Self::new(
            dimension,
            pairs
                .into_iter()
                .map(|(probability, vector)| EnsembleState {
                    probability,
                    vector,
                })
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn states(&self) -> &[EnsembleState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.probability).collect()
    }

    pub fn vectors(&self) -> Vec<Ket> {
        self.states.iter().map(|s| s.vector.clone()).collect()
    }

    /// Dimension of the span of the ensemble states.
    pub fn span_dimension(&self) -> usize {
        gram_schmidt(&self.vectors(), DEPENDENCY_TOL).basis.len()
    }
}

/// `{pᵢqⱼ, ψᵢ⊗φⱼ}`, with `j` varying fastest.
pub fn tensor_ensemble(e: &Ensemble, f: &Ensemble) -> Ensemble {
    let states = e
        .states
        .iter()
        .flat_map(|a| {
            f.states.iter().map(move |b| EnsembleState {
                probability: a.probability * b.probability,
                vector: kron(&a.vector, &b.vector),
            })
        })
        .collect();
    Ensemble {
        dimension: e.dimension * f.dimension,
        states,
    }
}

fn check_distribution(p: &[f64], strictly_positive: bool) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    for (i, &x) in p.iter().enumerate() {
        let ok = x.is_finite() && if strictly_positive { x > 0.0 } else { x >= 0.0 };
        if !ok {
            return Err(Error::InvalidDistribution(format!("entry {i} is {x}")));
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > EPS {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p, false)?;
    Ok(-p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>())
}

/// Fails unless `lengths` is nondecreasing and satisfies `Σ 2^{-ℓᵢ} ≤ 1` exactly.
pub fn check_kraft(lengths: &[u32]) -> Result<()> {
    if let Some(i) = (1..lengths.len()).find(|&i| lengths[i] < lengths[i - 1]) {
        return Err(Error::NotMonotone(i));
    }
    let Some(&max) = lengths.iter().max() else {
        return Ok(());
    };
    if max > MAX_CODEWORD_LENGTH {
        return Err(Error::LimitExceeded {
            what: "code word length",
            got: max as usize,
            max: MAX_CODEWORD_LENGTH as usize,
        });
    }
    let full = 1u128 << max;
    let mut used = 0u128;
    for &l in lengths {
        used = used
            .checked_add(1u128 << (max - l))
            .ok_or(Error::KraftViolation)?;
    }
    if used > full {
        return Err(Error::KraftViolation);
    }
    Ok(())
}

/// Nondecreasing code-word lengths satisfying the Kraft inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthAssignment {
    pub lengths: Vec<u32>,
    /// `Σ pᵢ ℓᵢ` for the distribution the lengths were chosen for.
    pub objective: f64,
}

impl LengthAssignment {
    pub fn new(lengths: Vec<u32>, p: &[f64]) -> Result<Self> {
        if lengths.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                got: lengths.len(),
            });
        }
        check_kraft(&lengths)?;
        let objective = p.iter().zip(&lengths).map(|(&x, &l)| x * l as f64).sum();
        Ok(Self { lengths, objective })
    }
}

/// Length cap for the monotone-entropy search.
///
/// The staircase `(1, 2, …, n−1, n−1)` is Kraft-tight, so an optimum never
/// needs a word longer than `n − 1`.
pub fn monotone_length_cap(n: usize) -> u32 {
    match n {
        0 | 1 => 0,
        _ => (n as u32 - 1).max(usize::BITS - (n - 1).leading_zeros()),
    }
}

struct MonotoneSearch<'a> {
    p: &'a [f64],
    tail_mass: Vec<f64>,
    cap: u32,
    full: u128,
    best: f64,
    best_lengths: Vec<u32>,
    current: Vec<u32>,
}

impl MonotoneSearch<'_> {
    fn run(&mut self, i: usize, min_len: u32, used: u128, partial: f64) {
        let n = self.p.len();
        if i == n {
            if partial < self.best - PROB_TOL {
                self.best = partial;
                self.best_lengths.clone_from(&self.current);
            }
            return;
        }
        let rest = (n - i - 1) as u128;
        for l in min_len..=self.cap {
            // every later word is at least l long
            if partial + self.tail_mass[i] * l as f64 >= self.best - PROB_TOL {
                break;
            }
            let w = 1u128 << (self.cap - l);
            if used + w + rest > self.full {
                continue;
            }
            self.current.push(l);
            self.run(i + 1, l, used + w, partial + self.p[i] * l as f64);
            self.current.pop();
        }
    }
}

/// Monotone entropy `min{Σ pᵢℓᵢ | Σ2^{-ℓᵢ} ≤ 1, ℓ₁ ≤ … ≤ ℓₙ}`.
///
/// Branch and bound over nondecreasing tuples in lexicographic order with
/// exact integer Kraft accounting; among minimizers the lexicographically
/// smallest tuple is returned. The order of `p` matters.
pub fn monotone_entropy(p: &[f64]) -> Result<LengthAssignment> {
    check_distribution(p, true)?;
    let n = p.len();
    let cap = monotone_length_cap(n);
    if cap > MAX_CODEWORD_LENGTH {
        return Err(Error::LimitExceeded {
            what: "monotone entropy size",
            got: n,
            max: MAX_CODEWORD_LENGTH as usize + 1,
        });
    }
    let mut tail_mass = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail_mass[i] = tail_mass[i + 1] + p[i];
    }
    // uniform ⌈log₂ n⌉ is always feasible; seed just above it so that an equal
    // but lexicographically smaller tuple still replaces it
    let uniform = usize::BITS - (n.max(1) - 1).leading_zeros();
    let mut search = MonotoneSearch {
        p,
        tail_mass,
        cap,
        full: 1u128 << cap,
        best: uniform as f64 + 2.0 * PROB_TOL,
        best_lengths: vec![uniform; n],
        current: Vec::with_capacity(n),
    };
    search.run(0, 0, 0, 0.0);
    LengthAssignment::new(search.best_lengths, p)
}

/// Canonical prefix code for nondecreasing lengths: each word is the
/// numerically smallest one of its length not extending an earlier word.
pub fn canonical_codewords(lengths: &[u32]) -> Result<Vec<BitString>> {
    check_kraft(lengths)?;
    let mut out = Vec::with_capacity(lengths.len());
    let mut code = 0u128;
    for (i, &l) in lengths.iter().enumerate() {
        if i > 0 {
            code = (code + 1) << (l - lengths[i - 1]);
        }
        out.push(BitString::from_value(code, l as usize));
    }
    Ok(out)
}

/// A probability vector obtained by greedily absorbing linearly dependent
/// states, together with the grouping that produced it. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequentialProjection {
    pub probs: Vec<f64>,
    pub groups: Vec<Vec<usize>>,
    pub reps: Vec<usize>,
}

impl SequentialProjection {
    fn empty() -> Self {
        Self {
            probs: Vec::new(),
            groups: Vec::new(),
            reps: Vec::new(),
        }
    }

    fn key(&self) -> Vec<i64> {
        probability_key(&self.probs)
    }
}

/// Probabilities on a 1e-12 grid, for deduplication.
pub(crate) fn probability_key(p: &[f64]) -> Vec<i64> {
    p.iter().map(|x| (x / PROB_TOL).round() as i64).collect()
}

struct ProjectionEnumerator<'a> {
    probs: Vec<f64>,
    vectors: &'a [Ket],
    all: u32,
    memo: HashMap<u32, Rc<Vec<SequentialProjection>>>,
}

impl ProjectionEnumerator<'_> {
    /// Distinct continuations from a span-closed set of consumed indices.
    /// The span of the consumed states depends only on the set, so the
    /// result is memoized on it.
    fn tails(&mut self, consumed: u32, basis: &[Ket]) -> Rc<Vec<SequentialProjection>> {
        if consumed == self.all {
            return Rc::new(vec![SequentialProjection::empty()]);
        }
        if let Some(t) = self.memo.get(&consumed) {
            return Rc::clone(t);
        }
        let n = self.vectors.len();
        let mut out = Vec::new();
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        for rep in (0..n).filter(|i| consumed & (1 << i) == 0) {
            let r = projection_residual(basis, &self.vectors[rep]);
            let norm = r.norm();
            let mut next_basis = basis.to_vec();
            next_basis.push(r.scaled(Complex64::new(1.0 / norm, 0.0)));

            let group: Vec<usize> = (0..n)
                .filter(|&j| consumed & (1 << j) == 0)
                .filter(|&j| {
                    j == rep
                        || projection_residual(&next_basis, &self.vectors[j]).norm()
                            < DEPENDENCY_TOL
                })
                .collect();
            let mass: f64 = group.iter().map(|&j| self.probs[j]).sum();
            let next = group.iter().fold(consumed, |m, &j| m | (1 << j));

            for tail in self.tails(next, &next_basis).iter() {
                let mut proj = SequentialProjection {
                    probs: Vec::with_capacity(tail.probs.len() + 1),
                    groups: Vec::with_capacity(tail.groups.len() + 1),
                    reps: Vec::with_capacity(tail.reps.len() + 1),
                };
                proj.probs.push(mass);
                proj.probs.extend_from_slice(&tail.probs);
                proj.groups.push(group.clone());
                proj.groups.extend(tail.groups.iter().cloned());
                proj.reps.push(rep);
                proj.reps.extend_from_slice(&tail.reps);
                if seen.insert(proj.key(), ()).is_none() {
                    out.push(proj);
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(consumed, Rc::clone(&out));
        out
    }
}

/// All distinct sequential projections of `e`, one witness grouping each, in
/// the order first reached by a depth-first search choosing lowest indices
/// first.
pub fn sequential_projections(e: &Ensemble) -> Result<Vec<SequentialProjection>> {
    let n = e.len();
    if n > MAX_ENUMERATED_STATES {
        return Err(Error::LimitExceeded {
            what: "sequential projection ensemble size",
            got: n,
            max: MAX_ENUMERATED_STATES,
        });
    }
    let vectors = e.vectors();
    let mut en = ProjectionEnumerator {
        probs: e.probabilities(),
        vectors: &vectors,
        all: ((1u64 << n) - 1) as u32,
        memo: HashMap::new(),
    };
    let tails = en.tails(0, &[]);
    Ok(tails.as_ref().clone())
}

/// A sequential projection scored by its monotone entropy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoredProjection {
    pub projection: SequentialProjection,
    pub lengths: LengthAssignment,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateResult {
    pub rate: f64,
    pub projection: SequentialProjection,
    pub lengths: LengthAssignment,
}

/// Every distinct sequential projection with its optimal length assignment.
pub fn scored_projections(e: &Ensemble) -> Result<Vec<ScoredProjection>> {
    sequential_projections(e)?
        .into_iter()
        .map(|projection| {
            let lengths = monotone_entropy(&projection.probs)?;
            Ok(ScoredProjection {
                projection,
                lengths,
            })
        })
        .collect()
}

/// Optimal expected base length `R = min H_mon(p′)` over sequential
/// projections `p′`; ties go to the first projection in enumeration order.
pub fn optimal_rate(e: &Ensemble) -> Result<RateResult> {
    let scored = scored_projections(e)?;
    let min = scored
        .iter()
        .map(|s| s.lengths.objective)
        .fold(f64::INFINITY, f64::min);
    let best = scored
        .into_iter()
        .find(|s| s.lengths.objective <= min + PROB_TOL)
        .ok_or_else(|| Error::Internal("no sequential projection".into()))?;
    Ok(RateResult {
        rate: best.lengths.objective,
        projection: best.projection,
        lengths: best.lengths,
    })
}

/// An isometry from the span of an ensemble onto the span of classical
/// prefix-free code words.
#[derive(Clone, Debug)]
pub struct LosslessCode {
    dimension: usize,
    codewords: Vec<BitString>,
    /// Row k is `⟨v_k|`, so `(isometry · ψ)_k = ⟨v_k|ψ⟩`.
    isometry: DMatrix<Complex64>,
    basis: Vec<Ket>,
    projection: SequentialProjection,
    lengths: Vec<u32>,
    rate: f64,
}

/// Builds an optimal code for `e`.
pub fn build_code(e: &Ensemble) -> Result<LosslessCode> {
    let best = optimal_rate(e)?;
    let reps: Vec<Ket> = best
        .projection
        .reps
        .iter()
        .map(|&i| e.states[i].vector.clone())
        .collect();
    let gs = gram_schmidt(&reps, DEPENDENCY_TOL);
    if gs.basis.len() != reps.len() {
        return Err(Error::Internal(
            "representatives of a sequential projection became dependent".into(),
        ));
    }
    let codewords = canonical_codewords(&best.lengths.lengths)?;
    let isometry = isometry_from_basis(e.dimension, &gs.basis);
    Ok(LosslessCode {
        dimension: e.dimension,
        codewords,
        isometry,
        basis: gs.basis,
        projection: best.projection,
        lengths: best.lengths.lengths,
        rate: best.rate,
    })
}

fn isometry_from_basis(dimension: usize, basis: &[Ket]) -> DMatrix<Complex64> {
    DMatrix::from_fn(basis.len(), dimension, |r, c| basis[r][c].conj())
}

impl LosslessCode {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn isometry(&self) -> &DMatrix<Complex64> {
        &self.isometry
    }

    /// Orthonormal basis `v_k` of the input span, matched to `codewords[k]`.
    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }

    pub fn projection(&self) -> &SequentialProjection {
        &self.projection
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `Σ_k ⟨v_k|ψ⟩ |c_k⟩`.
    pub fn encode(&self, psi: &Ket) -> Result<QubitString> {
        if psi.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: psi.len(),
            });
        }
        let coeffs = &self.isometry * psi;
        let residual = self
            .basis
            .iter()
            .zip(coeffs.iter())
            .fold(psi.clone(), |r, (v, c)| r - v * *c)
            .norm();
        if residual >= DEPENDENCY_TOL {
            return Err(Error::NotEncodable(residual));
        }
        Ok(QubitString::from_terms(
            self.codewords.iter().cloned().zip(coeffs.iter().copied()),
        ))
    }

    /// Inverse of [`encode`](Self::encode) on the code space.
    pub fn decode(&self, q: &QubitString) -> Result<Ket> {
        let coeffs: Vec<Complex64> = self.codewords.iter().map(|c| q.amplitude(c)).collect();
        let outside: f64 = q
            .terms()
            .filter(|(s, _)| !self.codewords.contains(s))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let residual = outside.sqrt();
        if residual >= DEPENDENCY_TOL {
            return Err(Error::NotDecodable(residual));
        }
        Ok(self
            .basis
            .iter()
            .zip(coeffs)
            .fold(Ket::zeros(self.dimension), |acc, (v, c)| acc + v * c))
    }

    /// `Σⱼ pⱼ L(C(ψⱼ))` over the states of `e`.
    pub fn expected_base_length(&self, e: &Ensemble) -> Result<f64> {
        e.states
            .iter()
            .map(|s| Ok(s.probability * self.encode(&s.vector)?.base_length()? as f64))
            .sum()
    }
}

/// Expected base length of `C_E(ψᵢ) ∘ C_F(φⱼ)` under `{pᵢqⱼ}`: the rate of
/// the concatenated code for `E ⊗ F`.
pub fn concatenated_rate(
    code_e: &LosslessCode,
    e: &Ensemble,
    code_f: &LosslessCode,
    f: &Ensemble,
) -> Result<f64> {
    let mut total = 0.0;
    for a in e.states() {
        let ca = code_e.encode(&a.vector)?;
        for b in f.states() {
            let cb = code_f.encode(&b.vector)?;
            total += a.probability * b.probability * ca.concat(&cb).base_length()? as f64;
        }
    }
    Ok(total)
}

// ---- file formats ----

#[derive(Serialize, Deserialize)]
struct StateRepr {
    p: f64,
    amps: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleRepr {
    dimension: usize,
    states: Vec<StateRepr>,
}

fn ket_from_pairs(amps: &[[f64; 2]]) -> Ket {
    Ket::from_iterator(
        amps.len(),
        amps.iter().map(|&[re, im]| Complex64::new(re, im)),
    )
}

fn ket_to_pairs(k: &Ket) -> Vec<[f64; 2]> {
    k.iter().map(|z| [z.re, z.im]).collect()
}

impl Serialize for Ensemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnsembleRepr {
            dimension: self.dimension,
            states: self
                .states
                .iter()
                .map(|st| StateRepr {
                    p: st.probability,
                    amps: ket_to_pairs(&st.vector),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EnsembleRepr::deserialize(d)?;
        Ensemble::new(
            repr.dimension,
            repr.states
                .iter()
                .map(|s| EnsembleState {
                    probability: s.p,
                    vector: ket_from_pairs(&s.amps),
                })
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// JSON form of a single ambient vector: `{"amps": [[re, im], …]}`.
#[derive(Serialize, Deserialize)]
pub struct VectorFile {
    pub amps: Vec<[f64; 2]>,
}

impl VectorFile {
    pub fn from_ket(k: &Ket) -> Self {
        Self {
            amps: ket_to_pairs(k),
        }
    }

    pub fn to_ket(&self) -> Ket {
        ket_from_pairs(&self.amps)
    }
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    dimension: usize,
    codewords: Vec<BitString>,
    isometry: Vec<Vec<[f64; 2]>>,
    projection: SequentialProjection,
    lengths: Vec<u32>,
    rate: f64,
}

impl Serialize for LosslessCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodeRepr {
            dimension: self.dimension,
            codewords: self.codewords.clone(),
            isometry: (0..self.isometry.nrows())
                .map(|r| self.isometry.row(r).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            projection: self.projection.clone(),
            lengths: self.lengths.clone(),
            rate: self.rate,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LosslessCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CodeRepr::deserialize(d)?;
        LosslessCode::from_repr(repr).map_err(serde::de::Error::custom)
    }
}

impl LosslessCode {
    fn from_repr(repr: CodeRepr) -> Result<Self> {
        let d = repr.codewords.len();
        if repr.isometry.len() != d || repr.lengths.len() != d {
            return Err(Error::InvalidCode(format!(
                "{d} code words but {} isometry rows and {} lengths",
                repr.isometry.len(),
                repr.lengths.len()
            )));
        }
        if let Some(row) = repr.isometry.iter().find(|r| r.len() != repr.dimension) {
            return Err(Error::DimensionMismatch {
                expected: repr.dimension,
                got: row.len(),
            });
        }
        for (w, &l) in repr.codewords.iter().zip(&repr.lengths) {
            if w.len() != l as usize {
                return Err(Error::InvalidCode(format!(
                    "code word {w} is not {l} bits long"
                )));
            }
        }
        check_classical_prefix_free(&repr.codewords)?;
        let basis: Vec<Ket> = repr
            .isometry
            .iter()
            .map(|row| ket_from_pairs(row).map(|z| z.conj()))
            .collect();
        crate::prefix::check_orthonormal(&basis)?;
        Ok(Self {
            dimension: repr.dimension,
            isometry: isometry_from_basis(repr.dimension, &basis),
            codewords: repr.codewords,
            basis,
            projection: repr.projection,
            lengths: repr.lengths,
            rate: repr.rate,
        })
    }
}

/// Fails with the first offending pair if some word is a prefix of another
/// (or a duplicate).
pub fn check_classical_prefix_free(words: &[BitString]) -> Result<()> {
    let kets: Vec<QubitString> = words.iter().cloned().map(QubitString::basis).collect();
    if let Some(w) = is_prefix_free(&kets).witness {
        return Err(Error::NotPrefixFree(
            words[w.psi].clone(),
            words[w.phi].clone(),
        ));
    }
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            if words[i] == words[j] {
                return Err(Error::NotPrefixFree(words[i].clone(), words[j].clone()));
            }
        }
    }
    Ok(())
}
