use crate::field::{Field, Scalar};

use super::Matrix;

/// A subspace of 𝕂ⁿ stored as the nonzero rows of its reduced echelon basis.
///
/// Equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(field: Field, ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length differs from ambient dimension");
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        let m = Matrix::from_rows(field, vectors.to_vec()).expect("vectors over the subspace field");
        let ech = m.rref();
        let basis = (0..ech.pivots.len()).map(|i| ech.reduced.row(i).to_vec()).collect();
        Subspace {
            field,
            ambient,
            basis,
            pivots: ech.pivots,
        }
    }

    /// Span of the columns of `m`.
    pub fn column_space(m: &Matrix) -> Self {
        Self::span(m.field(), m.rows(), &m.columns())
    }

    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let id = Matrix::identity(field, ambient);
        Subspace {
            field,
            ambient,
            basis: id.row_vecs(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Canonical basis vectors.
    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    /// `ambient × dim` matrix with the canonical basis as columns.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.field, self.ambient, &self.basis)
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates outside the pivot set; the standard vectors there span a complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient);
        // Reduce v against the echelon rows; membership iff nothing survives.
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, b) in r.iter_mut().zip(row) {
                *x = &*x - &(&c * b);
            }
        }
        r.iter().all(Scalar::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Self::span(self.field, self.ambient, &vs)
    }

    /// Functionals vanishing on `self`, as row vectors.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Self::full(self.field, self.ambient);
        }
        Matrix::from_rows(self.field, self.basis.clone()).unwrap().kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut eqs = self.annihilator().basis;
        eqs.extend(other.annihilator().basis);
        if eqs.is_empty() {
            return Self::full(self.field, self.ambient);
        }
        Matrix::from_rows(self.field, eqs).unwrap().kernel()
    }

    /// Image under `m` (an `k × ambient` matrix).
    pub fn image(&self, m: &Matrix) -> Subspace {
        let vs: Vec<Vec<Scalar>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Self::span(self.field, m.rows(), &vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(f: Field, xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn canonical_equality() {
        let q = Field::Rationals;
        let a = Subspace::span(q, 3, &[v(q, &[1, 1, 0]), v(q, &[0, 1, 1])]);
        let b = Subspace::span(q, 3, &[v(q, &[1, 2, 1]), v(q, &[2, 1, -1]), v(q, &[1, 0, -1])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&v(q, &[3, 5, 2])));
        assert!(!a.contains(&v(q, &[1, 0, 0])));
    }

    #[test]
    fn intersection_and_annihilator() {
        let q = Field::Rationals;
        let xy = Subspace::span(q, 3, &[v(q, &[1, 0, 0]), v(q, &[0, 1, 0])]);
        let yz = Subspace::span(q, 3, &[v(q, &[0, 1, 0]), v(q, &[0, 0, 1])]);
        assert_eq!(xy.intersect(&yz), Subspace::span(q, 3, &[v(q, &[0, 1, 0])]));
        assert_eq!(xy.annihilator(), Subspace::span(q, 3, &[v(q, &[0, 0, 1])]));
        assert_eq!(xy.sum(&yz), Subspace::full(q, 3));
        assert_eq!(Subspace::zero(q, 3).intersect(&xy).dim(), 0);
        assert_eq!(xy.non_pivots(), vec![2]);
    }
}
