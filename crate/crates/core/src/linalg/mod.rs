//! Dense exact linear algebra: echelon forms, kernels, solving, inverses,
//! characteristic polynomials, roots in the base field and eigenspaces.

mod matrix;
mod poly;
mod subspace;

pub use matrix::{combine, dot, Echelon, Matrix};
pub use poly::Poly;
pub use subspace::Subspace;

use crate::field::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("no solution")]
    NoSolution,
    #[error("root finding is not supported over {0}")]
    UnsupportedField(Field),
    #[error("the zero polynomial has every element as a root")]
    ZeroPolynomial,
}

pub fn kernel(m: &Matrix) -> Subspace {
    m.kernel()
}

pub fn solve_matrix_equation(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    a.solve(b)
}

pub fn char_poly(m: &Matrix) -> Poly {
    m.char_poly()
}

pub fn roots_in_field(p: &Poly) -> Result<Vec<(Scalar, usize)>, LinalgError> {
    p.roots_in_field()
}

pub fn eigenspace(m: &Matrix, lambda: &Scalar) -> Subspace {
    m.eigenspace(lambda)
}

#[cfg(test)]
pub(crate) mod testutil {
    use proptest::prelude::*;

    use super::Matrix;
    use crate::field::Field;

    pub fn fields() -> impl Strategy<Value = Field> {
        prop::sample::select(vec![
            Field::Rationals,
            Field::prime(2).unwrap(),
            Field::prime(3).unwrap(),
            Field::prime(5).unwrap(),
            Field::prime(7).unwrap(),
        ])
    }

    pub fn matrix(f: Field, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-4i64..5, rows * cols).prop_map(move |xs| {
            Matrix::new(f, rows, cols, xs.iter().map(|&x| f.from_i64(x)).collect()).unwrap()
        })
    }

    /// Symmetric matrix built from an independent upper triangle.
    pub fn symmetric(f: Field, n: usize) -> impl Strategy<Value = Matrix> {
        matrix(f, n, n).prop_map(move |m| Matrix::from_fn(f, n, n, |i, j| m.get(i.min(j), i.max(j)).clone()))
    }

    pub fn any_matrix(max: usize) -> impl Strategy<Value = Matrix> {
        (fields(), 1..=max, 1..=max).prop_flat_map(|(f, r, c)| matrix(f, r, c))
    }

    pub fn square(max: usize) -> impl Strategy<Value = Matrix> {
        (fields(), 1..=max).prop_flat_map(|(f, n)| matrix(f, n, n))
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::testutil::*;
    use super::*;

    /// Independent determinant by cofactor expansion.
    fn cofactor_det(m: &Matrix) -> Scalar {
        let n = m.rows();
        if n == 0 {
            return m.field().one();
        }
        let mut acc = m.field().zero();
        for j in 0..n {
            let minor = Matrix::from_fn(m.field(), n - 1, n - 1, |r, c| {
                m.get(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let term = m.get(0, j) * &cofactor_det(&minor);
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rank_nullity(m in any_matrix(6)) {
            prop_assert_eq!(m.rank() + m.kernel().dim(), m.cols());
            for v in m.kernel().basis() {
                prop_assert!(m.mul_vec(v).iter().all(Scalar::is_zero));
            }
        }

        #[test]
        fn inverse_round_trip(m in square(6)) {
            if let Some(inv) = m.inverse() {
                prop_assert_eq!(m.matmul(&inv), Matrix::identity(m.field(), m.rows()));
                prop_assert_eq!(inv.matmul(&m), Matrix::identity(m.field(), m.rows()));
            } else {
                prop_assert!(m.det().is_zero());
            }
        }

        #[test]
        fn solutions_satisfy_equation((a, b) in (fields(), 1usize..5, 1usize..5, 1usize..4)
            .prop_flat_map(|(f, r, c, k)| (matrix(f, r, c), matrix(f, r, k)))) {
            match a.solve(&b) {
                Ok(p) => prop_assert_eq!(a.matmul(&p), b),
                Err(e) => {
                    prop_assert_eq!(e, LinalgError::NoSolution);
                    let ca = Subspace::column_space(&a);
                    prop_assert!(!ca.contains_subspace(&Subspace::column_space(&b)));
                }
            }
        }

        #[test]
        fn det_matches_cofactor(m in square(5)) {
            prop_assert_eq!(m.det(), cofactor_det(&m));
        }

        #[test]
        fn char_poly_matches_determinant(m in square(5)) {
            // n+1 points pin a monic degree-n polynomial; small prime fields use every element.
            let f = m.field();
            let cp = m.char_poly();
            prop_assert_eq!(cp.degree(), Some(m.rows()));
            prop_assert!(cp.lead().unwrap().is_one());
            for lam in f.enumerate_elements(m.rows() + 1) {
                let shifted = Matrix::identity(f, m.rows()).scale(&lam).sub(&m);
                prop_assert_eq!(cp.eval(&lam), cofactor_det(&shifted));
            }
        }

        #[test]
        fn eigenspaces_of_roots_are_nonzero(m in square(4)) {
            for (r, _) in m.char_poly().roots_in_field().unwrap() {
                let e = m.eigenspace(&r);
                prop_assert!(e.dim() >= 1);
                for v in e.basis() {
                    let mv = m.mul_vec(v);
                    let rv: Vec<Scalar> = v.iter().map(|x| x * &r).collect();
                    prop_assert_eq!(mv, rv);
                }
            }
        }
    }
}
