//! Minimal inner-product-space abstraction shared by qubit strings and
//! ambient (finite-dimensional) state vectors.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::qstring::QubitString;

/// A vector in a finite-dimensional ambient Hilbert space.
pub type Ket = DVector<Complex64>;

pub trait HilbertVector: Clone {
    /// `⟨self|other⟩`, antilinear in `self`.
    fn inner(&self, other: &Self) -> Complex64;

    /// `self + c·other`.
    fn add_scaled(&self, c: Complex64, other: &Self) -> Self;

    fn scaled(&self, c: Complex64) -> Self;

    fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

impl HilbertVector for QubitString {
    fn inner(&self, other: &Self) -> Complex64 {
        QubitString::inner(self, other)
    }

    fn add_scaled(&self, c: Complex64, other: &Self) -> Self {
        QubitString::add_scaled(self, c, other)
    }

    fn scaled(&self, c: Complex64) -> Self {
        QubitString::scaled(self, c)
    }
}

impl HilbertVector for Ket {
    fn inner(&self, other: &Self) -> Complex64 {
        self.dotc(other)
    }

    fn add_scaled(&self, c: Complex64, other: &Self) -> Self {
        self + other * c
    }

    fn scaled(&self, c: Complex64) -> Self {
        self * c
    }
}

/// Builds a ket from real components.
pub fn ket_from_real(components: &[f64]) -> Ket {
    Ket::from_iterator(
        components.len(),
        components.iter().map(|&x| Complex64::new(x, 0.0)),
    )
}

/// Computational basis vector `|index⟩` in dimension `dim`.
pub fn basis_ket(dim: usize, index: usize) -> Ket {
    let mut k = Ket::zeros(dim);
    k[index] = Complex64::new(1.0, 0.0);
    k
}

/// Kronecker product `a ⊗ b`, with `b` as the fast index.
pub fn kron(a: &Ket, b: &Ket) -> Ket {
    Ket::from_iterator(
        a.len() * b.len(),
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotc_is_antilinear_in_first_argument() {
        let a = Ket::from_vec(vec![Complex64::new(0.0, 1.0)]);
        let b = Ket::from_vec(vec![Complex64::new(1.0, 0.0)]);
        assert_eq!(HilbertVector::inner(&a, &b), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn kron_ordering() {
        let k = kron(&basis_ket(3, 1), &basis_ket(3, 2));
        assert_eq!(k, basis_ket(9, 5));
    }
}
