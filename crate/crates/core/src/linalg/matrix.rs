use std::fmt;
use std::ops::Index;

use crate::field::{Field, Scalar};

use super::{LinalgError, Poly, Subspace};

/// Dense row-major matrix over one exact field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Row-reduced echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(LinalgError::FieldMismatch(field, bad.field()));
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    /// Integer-entry matrix, mainly for tests and examples.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let data = rows
            .iter()
            .map(|row| row.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, data).expect("well-formed integer matrix")
    }

    /// Matrix whose columns are the given vectors of length `n`.
    pub fn from_columns(field: Field, n: usize, columns: &[Vec<Scalar>]) -> Self {
        Self::from_fn(field, n, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field, rows, cols, data }
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.zero())
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn diagonal(field: Field, entries: &[Scalar]) -> Self {
        let n = entries.len();
        Self::from_fn(field, n, n, |i, j| if i == j { entries[i].clone() } else { field.zero() })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry from another field");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn check_same(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "matrices over different fields");
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Self::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `xᵀ · self · y`.
    pub fn bilinear(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let my = self.mul_vec(y);
        dot(self.field, x, &my)
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// First off-diagonal nonzero position, if any.
    pub fn off_diagonal_nonzero(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && !self.get(i, j).is_zero())
    }

    /// Row reduction where only the first `pivot_cols` columns may hold pivots.
    fn rref_limited(&self, pivot_cols: usize) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = &m.data[idx] * &inv;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let sub = &factor * m.get(r, j);
                    let idx = i * m.cols + j;
                    m.data[idx] = &m.data[idx] - &sub;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rref(&self) -> Echelon {
        self.rref_limited(self.cols)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Right null space `{x : self·x = 0}` in canonical form.
    pub fn kernel(&self) -> Subspace {
        let Echelon { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<Scalar>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -reduced.get(i, f);
                }
                v
            })
            .collect();
        Subspace::span(self.field, self.cols, &vectors)
    }

    /// One `P` with `self · P = b`, free variables set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same(b);
        if self.rows != b.rows {
            return Err(LinalgError::Shape("row counts differ".into()));
        }
        let n = self.cols;
        let Echelon { reduced, pivots } = self.hstack(b).rref_limited(n);
        for i in pivots.len()..reduced.rows {
            if (0..b.cols).any(|j| !reduced.get(i, n + j).is_zero()) {
                return Err(LinalgError::NoSolution);
            }
        }
        let mut p = Matrix::zeros(self.field, n, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                p.set(pc, j, reduced.get(i, n + j).clone());
            }
        }
        Ok(p)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let id = Matrix::identity(self.field, self.rows);
        let Echelon { reduced, pivots } = self.hstack(&id).rref_limited(self.cols);
        (pivots.len() == self.rows).then(|| {
            let idx: Vec<usize> = (self.cols..2 * self.cols).collect();
            reduced.select_columns(&idx)
        })
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return self.field.zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for i in c + 1..n {
                let factor = m.get(i, c) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let sub = &factor * m.get(c, j);
                    m.data[i * n + j] = &m.data[i * n + j] - &sub;
                }
            }
        }
        det
    }

    /// Monic `det(xI − self)` via reduction to upper Hessenberg form.
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let f = self.field;
        let mut h = self.clone();
        // Similarity transforms to Hessenberg form.
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !h.get(i, m - 1).is_zero()) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let t = h.get(m, m - 1).clone();
            for i in m + 1..n {
                let u = h.get(i, m - 1) / &t;
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let sub = &u * h.get(m, j);
                    h.data[i * n + j] = &h.data[i * n + j] - &sub;
                }
                for r in 0..n {
                    let add = &u * h.get(r, i);
                    h.data[r * n + m] = &h.data[r * n + m] + &add;
                }
            }
        }
        // p_{k+1} = (x − h_kk) p_k − Σ_{i<k} h_ik (Π_{j=i+1..k} h_{j,j−1}) p_i
        let mut ps: Vec<Poly> = vec![Poly::one(f)];
        for k in 0..n {
            let mut next = ps[k].mul(&Poly::linear_root(f, h.get(k, k).clone()));
            let mut prod = f.one();
            for i in (0..k).rev() {
                prod = &prod * h.get(i + 1, i);
                let c = &prod * h.get(i, k);
                if !c.is_zero() {
                    next = next.sub(&ps[i].scale(&c));
                }
            }
            ps.push(next);
        }
        ps.pop().unwrap()
    }

    pub fn eigenspace(&self, lambda: &Scalar) -> Subspace {
        assert!(self.is_square());
        let shifted = self.sub(&Matrix::identity(self.field, self.rows).scale(lambda));
        shifted.kernel()
    }

    /// Entrywise map into another field.
    pub fn try_map<E>(&self, field: Field, mut f: impl FnMut(&Scalar) -> Result<Scalar, E>) -> Result<Matrix, E> {
        let data = self.data.iter().map(&mut f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        self.get(i, j)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn dot(field: Field, x: &[Scalar], y: &[Scalar]) -> Scalar {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(field.zero(), |acc, (a, b)| acc + a * b)
}

/// `Σ c_j · v_j` for vectors of length `n`.
pub fn combine(field: Field, n: usize, coeffs: &[Scalar], vectors: &[Vec<Scalar>]) -> Vec<Scalar> {
    let mut out = vec![field.zero(); n];
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o = &*o + &(c * x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(q(), 3).kernel().dim(), 0);
        let gf3 = Field::prime(3).unwrap();
        assert_eq!(Matrix::zeros(gf3, 2, 2).kernel(), Subspace::full(gf3, 2));
        let k = Matrix::from_i64(q(), &[&[1, 0], &[0, 0]]).kernel();
        assert_eq!(k, Subspace::span(q(), 2, &[vec![q().zero(), q().one()]]));
    }

    #[test]
    fn solve_examples() {
        let b = Matrix::from_i64(q(), &[&[3, -1], &[7, 2]]);
        assert_eq!(Matrix::identity(q(), 2).solve(&b).unwrap(), b);

        // Frozen by hand: the free variable x₂ is zeroed, so P = [[2,0],[0,0]].
        let a = Matrix::from_i64(q(), &[&[1, 0], &[0, 0]]);
        let b = Matrix::from_i64(q(), &[&[2, 0], &[0, 0]]);
        let p = a.solve(&b).unwrap();
        assert_eq!(p, Matrix::from_i64(q(), &[&[2, 0], &[0, 0]]));
        assert_eq!(a.matmul(&p), b);

        assert_eq!(a.solve(&Matrix::identity(q(), 2)), Err(LinalgError::NoSolution));
    }

    #[test]
    fn char_poly_examples() {
        let d = Matrix::from_i64(q(), &[&[2, 0], &[0, 3]]);
        assert_eq!(d.char_poly(), Poly::from_i64(q(), &[6, -5, 1]));
        assert_eq!(Matrix::zeros(q(), 2, 2).char_poly(), Poly::from_i64(q(), &[0, 0, 1]));
        let gf3 = Field::prime(3).unwrap();
        let swap = Matrix::from_i64(gf3, &[&[0, 1], &[1, 0]]);
        // det(xI − S) = x² − 1
        assert_eq!(swap.char_poly(), Poly::from_i64(gf3, &[-1, 0, 1]));
    }

    #[test]
    fn eigenspace_examples() {
        let d = Matrix::from_i64(q(), &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let e = |i: usize| {
            let mut v = vec![q().zero(); 3];
            v[i] = q().one();
            v
        };
        assert_eq!(d.eigenspace(&q().from_i64(2)), Subspace::span(q(), 3, &[e(0), e(1)]));
        assert_eq!(d.eigenspace(&q().from_i64(7)).dim(), 0);
        let swap = Matrix::from_i64(q(), &[&[0, 1], &[1, 0]]);
        assert_eq!(
            swap.eigenspace(&q().one()),
            Subspace::span(q(), 2, &[vec![q().one(), q().one()]])
        );
    }

    #[test]
    fn inverse_and_det() {
        let a = Matrix::from_i64(q(), &[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), q().one());
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(q(), 2));
        assert!(Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn rejects_mixed_fields() {
        let gf3 = Field::prime(3).unwrap();
        let bad = Matrix::new(q(), 1, 2, vec![q().one(), gf3.one()]);
        assert!(matches!(bad, Err(LinalgError::FieldMismatch(..))));
        assert!(Matrix::new(q(), 2, 2, vec![q().one()]).is_err());
    }
}
