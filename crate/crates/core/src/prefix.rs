//! Prefix-free sets of qubit strings.
//!
//! Prefix-freedom is tested with the classical-suffix criterion: a set `M` is
//! prefix-free iff `⟨φ|ψ∘s⟩ = 0` for all `φ, ψ ∈ M` and every nonempty
//! classical string `s`. Only suffixes that complete some support string of
//! `ψ` into a support string of `φ` can give a nonzero overlap, so those are
//! the only ones enumerated.
//!
//! The module also evaluates the quantum Kraft chain
//! `Σ 2^{-L(eᵢ)} ≤ Σ 2^{-ℓ̄(eᵢ)} ≤ Tr(2^{-Λ} P) ≤ 1`, the reduced prefix states
//! of zero-extended strings, and provides Gram-Schmidt for both qubit strings
//! and ambient kets.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::HilbertVector;
use crate::qstring::{BitString, QubitString, EPS};

/// Residual norm below which a vector counts as linearly dependent.
pub const DEPENDENCY_TOL: f64 = 1e-7;

/// Largest register prefix for which a dense reduced state is built.
pub const MAX_FRAGMENT_QUBITS: usize = 12;

/// A failing instance of the prefix condition: `⟨M[phi] | M[psi] ∘ suffix⟩ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrefixWitness {
    pub phi: usize,
    pub psi: usize,
    pub suffix: BitString,
    #[serde(serialize_with = "serialize_complex")]
    pub overlap: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrefixCheck {
    pub prefix_free: bool,
    pub witness: Option<PrefixWitness>,
}

fn serialize_complex<S: serde::Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Suffixes `s ≠ λ` for which `⟨phi|psi∘s⟩` can be nonzero.
fn candidate_suffixes(phi: &QubitString, psi: &QubitString) -> BTreeSet<BitString> {
    let mut out = BTreeSet::new();
    for t in phi.support() {
        for x in psi.support() {
            if x.len() < t.len() && x.is_prefix_of(t) {
                out.insert(t.suffix_from(x.len()));
            }
        }
    }
    out
}

/// Checks the prefix condition on every ordered pair of `set`, including each
/// element against itself. The first violation in (φ, ψ, shortlex suffix)
/// order is reported.
pub fn is_prefix_free(set: &[QubitString]) -> PrefixCheck {
    for (a, phi) in set.iter().enumerate() {
        for (b, psi) in set.iter().enumerate() {
            for s in candidate_suffixes(phi, psi) {
                let overlap = phi.inner(&psi.concat_bits(&s));
                if overlap.norm() > EPS {
                    return PrefixCheck {
                        prefix_free: false,
                        witness: Some(PrefixWitness {
                            phi: a,
                            psi: b,
                            suffix: s,
                            overlap,
                        }),
                    };
                }
            }
        }
    }
    PrefixCheck {
        prefix_free: true,
        witness: None,
    }
}

/// Fails unless `vectors` are pairwise orthonormal within [`EPS`].
pub fn check_orthonormal<V: HilbertVector>(vectors: &[V]) -> Result<()> {
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (vectors[i].inner(&vectors[j]) - Complex64::new(target, 0.0)).norm();
            if deviation > EPS {
                return Err(Error::NotOrthonormal { i, j, deviation });
            }
        }
    }
    Ok(())
}

/// Decides whether the subspace spanned by an orthonormal basis is prefix-free.
///
/// Any orthonormal basis of a prefix-free subspace is itself prefix-free, so
/// checking the given basis certifies the whole span.
pub fn subspace_prefix_free(basis: &[QubitString]) -> Result<bool> {
    check_orthonormal(basis)?;
    Ok(is_prefix_free(basis).prefix_free)
}

/// An orthonormal, prefix-free system of qubit strings.
#[derive(Clone, Debug)]
pub struct PrefixBasis {
    vectors: Vec<QubitString>,
    classical: bool,
}

impl PrefixBasis {
    pub fn new(vectors: Vec<QubitString>) -> Result<Self> {
        check_orthonormal(&vectors)?;
        let check = is_prefix_free(&vectors);
        if let Some(w) = check.witness {
            return Err(Error::PrefixViolation {
                phi: w.phi,
                psi: w.psi,
                suffix: w.suffix,
            });
        }
        let classical = vectors.iter().all(|v| v.support_size() == 1);
        Ok(Self { vectors, classical })
    }

    /// Basis of classical code words `|c₁⟩, |c₂⟩, …`.
    pub fn classical(words: &[BitString]) -> Result<Self> {
        Self::new(words.iter().cloned().map(QubitString::basis).collect())
    }

    pub fn vectors(&self) -> &[QubitString] {
        &self.vectors
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// The three sums of the quantum Kraft inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KraftChain {
    pub sum_base: f64,
    pub sum_avg: f64,
    pub trace_term: f64,
}

impl KraftChain {
    /// `sum_base ≤ sum_avg ≤ trace_term ≤ 1`, each step within `tol`.
    pub fn is_ordered(&self, tol: f64) -> bool {
        self.sum_base <= self.sum_avg + tol
            && self.sum_avg <= self.trace_term + tol
            && self.trace_term <= 1.0 + tol
    }

    /// Whether the left three terms coincide within `tol`.
    pub fn is_tight(&self, tol: f64) -> bool {
        (self.sum_base - self.sum_avg).abs() <= tol && (self.sum_avg - self.trace_term).abs() <= tol
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sum_base, self.sum_avg, self.trace_term]
    }
}

pub fn kraft_chain(basis: &PrefixBasis) -> KraftChain {
    let mut chain = KraftChain {
        sum_base: 0.0,
        sum_avg: 0.0,
        trace_term: 0.0,
    };
    for e in basis.vectors() {
        // basis vectors are normalized and nonzero by construction
        let base = e.base_length().expect("nonzero basis vector");
        let avg = e.avg_length().expect("normalized basis vector");
        chain.sum_base += (-(base as f64)).exp2();
        chain.sum_avg += (-avg).exp2();
        chain.trace_term += e
            .terms()
            .map(|(s, a)| a.norm_sqr() * (-(s.len() as f64)).exp2())
            .sum::<f64>();
    }
    chain
}

/// Reduced state of the first `qubits` qubits of a register.
#[derive(Clone, Debug)]
pub struct DensityFragment {
    qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityFragment {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .all(|z| z.norm() <= tol)
    }

    /// `⟨ψ|ρ|ψ⟩` for a qubit string living on exactly `qubits` qubits.
    pub fn expectation(&self, psi: &QubitString) -> Result<f64> {
        match psi.length_eigenvalue() {
            Some(n) if n == self.qubits => {}
            Some(n) => {
                return Err(Error::DimensionMismatch {
                    expected: self.qubits,
                    got: n,
                })
            }
            None => return Err(Error::NotLengthEigenvector(0)),
        }
        let coords: Vec<(usize, Complex64)> = psi
            .terms()
            .map(|(s, a)| (s.prefix_value(self.qubits), *a))
            .collect();
        let mut acc = Complex64::default();
        for &(r, a) in &coords {
            for &(c, b) in &coords {
                acc += a.conj() * self.matrix[(r, c)] * b;
            }
        }
        Ok(acc.re)
    }
}

/// Partial trace of `|φ_zef⟩⟨φ_zef|` over register qubits `n+1 … l_max`.
pub fn reduced_prefix_state(phi: &QubitString, n: usize, l_max: usize) -> Result<DensityFragment> {
    if n > l_max {
        return Err(Error::BadRestriction { n, l_max });
    }
    if n > MAX_FRAGMENT_QUBITS {
        return Err(Error::FragmentTooLarge(n));
    }
    if !phi.is_normalized() {
        return Err(Error::NotNormalized(phi.norm_sqr()));
    }
    let zef = phi.zero_extended(l_max)?;

    // group amplitudes by the traced-out tail, keyed by the kept prefix
    let mut by_tail: BTreeMap<BitString, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (s, a) in zef.terms() {
        by_tail
            .entry(s.suffix_from(n))
            .or_default()
            .push((s.prefix_value(n), *a));
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for column in by_tail.values() {
        for &(r, a) in column {
            for &(c, b) in column {
                matrix[(r, c)] += a * b.conj();
            }
        }
    }
    Ok(DensityFragment { qubits: n, matrix })
}

/// Prefix test through reduced states, for orthonormal length eigenvectors:
/// every pair `φ ≠ ψ` must satisfy `⟨ψ|φ^{ℓ(ψ)}|ψ⟩ = 0`.
pub fn distinguishable_by_prefix(set: &[QubitString]) -> Result<bool> {
    let mut lengths = Vec::with_capacity(set.len());
    for (i, v) in set.iter().enumerate() {
        lengths.push(
            v.length_eigenvalue()
                .ok_or(Error::NotLengthEigenvector(i))?,
        );
    }
    check_orthonormal(set)?;
    let l_max = lengths.iter().copied().max().unwrap_or(0);
    for (i, phi) in set.iter().enumerate() {
        for (j, psi) in set.iter().enumerate() {
            if i == j {
                continue;
            }
            let rho = reduced_prefix_state(phi, lengths[j], l_max)?;
            if rho.expectation(psi)? > EPS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Output of [`gram_schmidt`].
#[derive(Clone, Debug)]
pub struct GramSchmidt<V> {
    /// Orthonormal vectors, in input order of the vectors that produced them.
    pub basis: Vec<V>,
    /// Per input vector: whether it was found to lie in the span of its predecessors.
    pub dependent: Vec<bool>,
    /// Per basis vector: index of the input that produced it.
    pub sources: Vec<usize>,
}

/// Component of `v` orthogonal to the orthonormal set `basis`.
///
/// Two projection sweeps are made; a single classical sweep loses
/// orthogonality for nearly dependent inputs.
pub fn projection_residual<V: HilbertVector>(basis: &[V], v: &V) -> V {
    let mut r = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.inner(&r);
            r = r.add_scaled(-c, b);
        }
    }
    r
}

/// Orthonormalizes `vectors` in order; inputs whose residual norm drops
/// below `tol` are flagged dependent and skipped.
pub fn gram_schmidt<V: HilbertVector>(vectors: &[V], tol: f64) -> GramSchmidt<V> {
    let mut out = GramSchmidt {
        basis: Vec::new(),
        dependent: Vec::with_capacity(vectors.len()),
        sources: Vec::new(),
    };
    for (i, v) in vectors.iter().enumerate() {
        let r = projection_residual(&out.basis, v);
        let n = r.norm();
        if n < tol {
            out.dependent.push(true);
        } else {
            out.dependent.push(false);
            out.basis.push(r.scaled(Complex64::new(1.0 / n, 0.0)));
            out.sources.push(i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstring::Amplitude;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn strange_basis() -> Vec<QubitString> {
        vec![
            QubitString::from_real(&[("1", FRAC_1_SQRT_2), ("01", FRAC_1_SQRT_2)]),
            QubitString::from_real(&[("10", FRAC_1_SQRT_2), ("010", -FRAC_1_SQRT_2)]),
        ]
    }

    fn kets(words: &[&str]) -> Vec<QubitString> {
        words.iter().map(|w| QubitString::ket(w)).collect()
    }

    #[test]
    fn prefix_free_examples() {
        assert!(is_prefix_free(&kets(&["0", "10", "11"])).prefix_free);
        assert!(is_prefix_free(&strange_basis()).prefix_free);

        let check = is_prefix_free(&kets(&["0", "01"]));
        assert!(!check.prefix_free);
        let w = check.witness.unwrap();
        assert_eq!(
            (w.phi, w.psi, w.suffix.to_string()),
            (1, 0, "1".to_string())
        );
    }

    #[test]
    fn empty_string_is_prefix_of_everything() {
        assert!(!is_prefix_free(&kets(&["", "0"])).prefix_free);
        assert!(is_prefix_free(&kets(&[""])).prefix_free);
    }

    #[test]
    fn subspace_examples() {
        assert!(subspace_prefix_free(&kets(&["0", "10", "11"])).unwrap());
        assert!(subspace_prefix_free(&strange_basis()).unwrap());
        let rotated = vec![
            QubitString::from_real(&[("0", FRAC_1_SQRT_2), ("10", FRAC_1_SQRT_2)]),
            QubitString::from_real(&[("0", FRAC_1_SQRT_2), ("10", -FRAC_1_SQRT_2)]),
        ];
        assert!(subspace_prefix_free(&rotated).unwrap());
        let skewed = vec![
            QubitString::ket("0"),
            QubitString::from_real(&[("0", 0.6), ("1", 0.8)]),
        ];
        assert!(matches!(
            subspace_prefix_free(&skewed),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn kraft_chain_examples() {
        let complete = kraft_chain(&PrefixBasis::new(kets(&["0", "10", "11"])).unwrap());
        assert_eq!(complete.as_array(), [1.0, 1.0, 1.0]);

        // 2⁻²+2⁻³; 2^{-3/2}+2^{-5/2}; ½(2⁻¹+2⁻²)+½(2⁻²+2⁻³)
        let strange = kraft_chain(&PrefixBasis::new(strange_basis()).unwrap());
        let expected = [
            0.25 + 0.125,
            2f64.powf(-1.5) + 2f64.powf(-2.5),
            0.5 * (0.5 + 0.25) + 0.5 * (0.25 + 0.125),
        ];
        for (got, want) in strange.as_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((strange.sum_avg - 0.530330085890).abs() < 1e-11);
        assert!(strange.is_ordered(EPS));
        assert!(!strange.is_tight(1e-3));

        let incomplete = kraft_chain(&PrefixBasis::new(kets(&["0", "10"])).unwrap());
        assert_eq!(incomplete.as_array(), [0.75, 0.75, 0.75]);
    }

    #[test]
    fn prefix_basis_rejects_violations() {
        assert!(matches!(
            PrefixBasis::new(kets(&["0", "01"])),
            Err(Error::PrefixViolation { phi: 1, psi: 0, .. })
        ));
        assert!(PrefixBasis::new(kets(&["0", "10"])).unwrap().is_classical());
        assert!(!PrefixBasis::new(strange_basis()).unwrap().is_classical());
    }

    #[test]
    fn reduced_state_examples() {
        let rho = reduced_prefix_state(&QubitString::ket("10"), 1, 2).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 1.0).abs() < EPS);
        assert!(rho.matrix()[(0, 0)].norm() < EPS);

        let bell = QubitString::from_real(&[("00", FRAC_1_SQRT_2), ("11", FRAC_1_SQRT_2)]);
        let rho = reduced_prefix_state(&bell, 1, 2).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < EPS);
        assert!((rho.matrix()[(1, 1)].re - 0.5).abs() < EPS);
        assert!(rho.matrix()[(0, 1)].norm() < EPS);

        let plus_tail = QubitString::from_real(&[("10", FRAC_1_SQRT_2), ("11", FRAC_1_SQRT_2)]);
        let rho = reduced_prefix_state(&plus_tail, 1, 2).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 1.0).abs() < EPS);
        assert!(rho.expectation(&QubitString::ket("0")).unwrap().abs() < EPS);
        assert!(rho.is_hermitian(EPS));
        assert!((rho.trace() - 1.0).abs() < EPS);
    }

    #[test]
    fn reduced_state_preconditions() {
        let q = QubitString::ket("101");
        assert!(matches!(
            reduced_prefix_state(&q, 3, 2),
            Err(Error::BadRestriction { .. })
        ));
        assert!(matches!(
            reduced_prefix_state(&q, 1, 2),
            Err(Error::RegisterTooSmall { .. })
        ));
        assert!(matches!(
            reduced_prefix_state(&QubitString::ket(&"0".repeat(13)), 13, 13),
            Err(Error::FragmentTooLarge(13))
        ));
    }

    #[test]
    fn distinguishability_examples() {
        assert!(distinguishable_by_prefix(&kets(&["0", "10", "11"])).unwrap());
        assert!(!distinguishable_by_prefix(&kets(&["0", "01"])).unwrap());
        assert!(matches!(
            distinguishable_by_prefix(&strange_basis()),
            Err(Error::NotLengthEigenvector(0))
        ));
    }

    #[test]
    fn gram_schmidt_examples() {
        let gs = gram_schmidt(&kets(&["0", "1"]), DEPENDENCY_TOL);
        assert_eq!(gs.basis, kets(&["0", "1"]));
        assert_eq!(gs.dependent, [false, false]);

        let plus = QubitString::from_real(&[("0", FRAC_1_SQRT_2), ("1", FRAC_1_SQRT_2)]);
        let gs = gram_schmidt(
            &[QubitString::ket("0"), plus, QubitString::ket("1")],
            DEPENDENCY_TOL,
        );
        assert_eq!(gs.dependent, [false, false, true]);
        assert_eq!(gs.sources, [0, 1]);
        assert!(
            (gs.basis[1].inner(&QubitString::ket("1")) - Amplitude::new(1.0, 0.0)).norm() < EPS
        );

        let first = QubitString::from_real(&[("1", FRAC_1_SQRT_2), ("01", FRAC_1_SQRT_2)]);
        let gs = gram_schmidt(&[first.clone(), QubitString::ket("1")], DEPENDENCY_TOL);
        assert_eq!(gs.basis[0], first);
        let want = QubitString::from_real(&[("1", FRAC_1_SQRT_2), ("01", -FRAC_1_SQRT_2)]);
        assert!((gs.basis[1].inner(&want) - Amplitude::new(1.0, 0.0)).norm() < EPS);
    }
}
