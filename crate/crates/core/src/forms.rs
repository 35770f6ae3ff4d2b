//! Symmetric bilinear forms, their radicals, restrictions and quotients.

use crate::field::{Field, Scalar};
use crate::linalg::{Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("Gram matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("subspace is not contained in the radical")]
    NotInRadical,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// A symmetric bilinear form given by its Gram matrix in the standard basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinearForm {
    gram: Matrix,
}

impl BilinearForm {
    pub fn new(gram: Matrix) -> Result<Self, FormError> {
        if !gram.is_square() {
            return Err(FormError::NotSquare(gram.rows(), gram.cols()));
        }
        for i in 0..gram.rows() {
            for j in 0..i {
                if gram.get(i, j) != gram.get(j, i) {
                    return Err(FormError::NotSymmetric(i, j));
                }
            }
        }
        Ok(BilinearForm { gram })
    }

    pub fn zero(field: Field, dim: usize) -> Self {
        BilinearForm {
            gram: Matrix::zeros(field, dim, dim),
        }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn into_gram(self) -> Matrix {
        self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> Field {
        self.gram.field()
    }

    pub fn evaluate(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        self.gram.bilinear(x, y)
    }

    /// `{x : ⟨x, V⟩ = 0}`.
    pub fn radical(&self) -> Subspace {
        self.gram.kernel()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.gram.is_zero()
    }

    /// Gram matrix `Bᵀ G B` of the form on the columns of `basis`.
    pub fn congruent(&self, basis: &Matrix) -> BilinearForm {
        BilinearForm {
            gram: basis.transpose().matmul(&self.gram).matmul(basis),
        }
    }

    /// The form on `s` in its canonical basis.
    pub fn restrict(&self, s: &Subspace) -> BilinearForm {
        assert_eq!(s.ambient(), self.dim());
        self.congruent(&s.basis_matrix())
    }

    /// ⟨x,x⟩ = 0 for all x. In odd characteristic and characteristic zero this
    /// forces the form to vanish.
    pub fn is_alternating(&self) -> bool {
        let diag_zero = self.gram.diagonal_entries().iter().all(Scalar::is_zero);
        diag_zero && (self.field().characteristic() == 2 || self.gram.is_zero())
    }

    /// Quotient by a subspace of the radical, realised on the complement spanned
    /// by the standard vectors at the non-pivot coordinates of `s`.
    pub fn quotient_by(&self, s: &Subspace) -> Result<QuotientForm, FormError> {
        if s.ambient() != self.dim() {
            return Err(FormError::DimensionMismatch(s.ambient(), self.dim()));
        }
        if !self.radical().contains_subspace(s) {
            return Err(FormError::NotInRadical);
        }
        let coords = s.non_pivots();
        let section = Matrix::from_fn(self.field(), self.dim(), coords.len(), |i, j| {
            if coords[j] == i {
                self.field().one()
            } else {
                self.field().zero()
            }
        });
        let form = self.congruent(&section);
        Ok(QuotientForm {
            killed: s.clone(),
            coords,
            section,
            form,
        })
    }

    /// `Σ c_j · G_j`.
    pub fn linear_combination(field: Field, dim: usize, coeffs: &[Scalar], forms: &[BilinearForm]) -> BilinearForm {
        let mut acc = Matrix::zeros(field, dim, dim);
        for (c, f) in coeffs.iter().zip(forms) {
            if !c.is_zero() {
                acc = acc.add(&f.gram.scale(c));
            }
        }
        BilinearForm { gram: acc }
    }
}

/// A form on `V / killed`, represented on the coordinate complement `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientForm {
    killed: Subspace,
    coords: Vec<usize>,
    section: Matrix,
    form: BilinearForm,
}

impl QuotientForm {
    pub fn killed(&self) -> &Subspace {
        &self.killed
    }

    /// `n × k` matrix whose columns span the complement.
    pub fn section(&self) -> &Matrix {
        &self.section
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn gram_q(&self) -> &Matrix {
        self.form.gram()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinates of `x + killed` in the section basis.
    pub fn project(&self, x: &[Scalar]) -> Vec<Scalar> {
        project_along(&self.killed, &self.coords, x)
    }

    pub fn lift(&self, y: &[Scalar]) -> Vec<Scalar> {
        self.section.mul_vec(y)
    }

    pub fn lift_subspace(&self, s: &Subspace) -> Subspace {
        s.image(&self.section)
    }
}

/// Projection of `x` along `s` onto the span of the standard vectors at `coords`
/// (the non-pivot coordinates of `s`), returned in those coordinates.
pub(crate) fn project_along(s: &Subspace, coords: &[usize], x: &[Scalar]) -> Vec<Scalar> {
    let mut r = x.to_vec();
    for (row, &p) in s.basis().iter().zip(s.pivots()) {
        let c = r[p].clone();
        if c.is_zero() {
            continue;
        }
        for (v, b) in r.iter_mut().zip(row) {
            *v = &*v - &(&c * b);
        }
    }
    coords.iter().map(|&c| r[c].clone()).collect()
}

pub fn radical(f: &BilinearForm) -> Subspace {
    f.radical()
}

pub fn quotient_by(f: &BilinearForm, s: &Subspace) -> Result<QuotientForm, FormError> {
    f.quotient_by(s)
}

pub fn restrict(f: &BilinearForm, s: &Subspace) -> BilinearForm {
    f.restrict(s)
}

pub fn is_alternating(f: &BilinearForm) -> bool {
    f.is_alternating()
}
