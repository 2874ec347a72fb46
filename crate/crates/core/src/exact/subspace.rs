use crate::exact::Matrix;
use crate::scalar::Scalar;

/// A linear subspace of `T^n` held as an explicit basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    ambient_dim: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Scalar> Subspace<T> {
    /// Caller guarantees the vectors are linearly independent.
    pub(crate) fn from_independent(ambient_dim: usize, basis: Vec<Vec<T>>) -> Self {
        debug_assert!(basis.iter().all(|b| b.len() == ambient_dim));
        Self { ambient_dim, basis }
    }

    /// Span of arbitrary vectors; dependent ones are dropped.
    pub fn span(ambient_dim: usize, vectors: &[Vec<T>]) -> Self {
        if vectors.is_empty() {
            return Self::trivial(ambient_dim);
        }
        let m = Matrix::from_rows(vectors.to_vec(), ambient_dim).expect("vector length");
        let keep = m.independent_rows();
        Self {
            ambient_dim,
            basis: keep.into_iter().map(|i| vectors[i].clone()).collect(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::<T>::identity(ambient_dim).to_rows(),
        }
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    /// `ambient_dim x dim` matrix whose columns are the basis vectors.
    pub fn basis_matrix(&self) -> Matrix<T> {
        Matrix::from_columns(&self.basis, self.ambient_dim).expect("basis length")
    }

    /// The vector `sum_i coeffs[i] * basis[i]`.
    pub fn combine(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.ambient_dim];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(b) {
                *o = o.clone() + c.clone() * v.clone();
            }
        }
        out
    }

    pub fn contains(&self, v: &[T]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Matrix::from_rows(rows, self.ambient_dim)
            .expect("vector length")
            .rank()
            == self.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&e| Rational::from_int(e)).collect()
    }

    #[test]
    fn span_drops_dependent_vectors() {
        let s = Subspace::span(3, &[v(&[1, 0, 1]), v(&[2, 0, 2]), v(&[0, 1, 0])]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(&[3, 5, 3])));
        assert!(!s.contains(&v(&[1, 0, 0])));
    }

    #[test]
    fn full_and_trivial() {
        let f = Subspace::<Rational>::full(3);
        assert_eq!(f.dim(), 3);
        assert!(f.contains(&v(&[4, -1, 7])));
        let t = Subspace::<Rational>::trivial(2);
        assert!(t.contains(&v(&[0, 0])));
        assert!(!t.contains(&v(&[0, 1])));
    }
}
