//! Representing operators `T_i` with `⟨x,y⟩_i = ⟨T_i x, y⟩₀` and their joint
//! root-space decomposition.

use std::fmt;

use crate::field::{Field, Scalar};
use crate::forms::BilinearForm;
use crate::linalg::{LinalgError, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("the radical of the base form is not contained in the radical of member {0}")]
    RadicalNotContained(usize),
    #[error("forms live on different spaces")]
    Incompatible,
}

/// Why refinement of a piece stalled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StallReason {
    /// Some eigenvalue lies outside the ground field.
    EigenvalueOutsideField,
    /// All eigenvalues lie in the field but an eigenspace is too small.
    Defective,
    /// Root finding is unavailable over this field.
    UnsupportedField,
    /// The piece, a joint eigenspace of earlier operators, is not invariant; the operators do not commute.
    NotInvariant,
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StallReason::EigenvalueOutsideField => "eigenvalue outside ground field",
            StallReason::Defective => "operator not diagonalizable on piece",
            StallReason::UnsupportedField => "root finding unsupported over this field",
            StallReason::NotInvariant => "piece not invariant under the operator",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("operator {operator} is not diagonalizable on a piece of dimension {}: {reason}", piece.dim())]
pub struct NotSimultaneouslyDiagonalizable {
    pub operator: usize,
    pub piece: Subspace,
    pub reason: StallReason,
}

/// `P` with `G_i = G₀ P`, vanishing on `rad(G₀)` and mapping into the
/// coordinate complement of `rad(G₀)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentingOperator {
    matrix: Matrix,
    base_gram: Matrix,
    target_index: usize,
}

impl RepresentingOperator {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn base_gram(&self) -> &Matrix {
        &self.base_gram
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    /// Checks `G_i = G₀P`, `PᵀG₀ = G₀P`, `P·rad(G₀) = 0` and `im P ⊆ W`.
    pub fn invariants_hold(&self, target: &BilinearForm) -> bool {
        let g0p = self.base_gram.matmul(&self.matrix);
        let rad = self.base_gram.kernel();
        let w_rows = rad.pivots();
        &g0p == target.gram()
            && self.matrix.transpose().matmul(&self.base_gram) == g0p
            && rad.basis().iter().all(|r| self.matrix.mul_vec(r).iter().all(Scalar::is_zero))
            && w_rows
                .iter()
                .all(|&i| self.matrix.row(i).iter().all(Scalar::is_zero))
    }
}

/// Operator representing `fi` relative to `f0`; `target_index` labels `fi` in its family.
pub fn represent(f0: &BilinearForm, fi: &BilinearForm, target_index: usize) -> Result<RepresentingOperator, OperatorError> {
    if f0.dim() != fi.dim() || f0.field() != fi.field() {
        return Err(OperatorError::Incompatible);
    }
    let r0 = f0.radical();
    if !fi.radical().contains_subspace(&r0) {
        return Err(OperatorError::RadicalNotContained(target_index));
    }
    // P = S (SᵀG₀S)⁻¹ SᵀG_i with S the coordinate section of the complement.
    let q = f0.quotient_by(&r0).expect("radical lies in itself");
    let s = q.section();
    let st = s.transpose();
    let x = q
        .gram_q()
        .solve(&st.matmul(fi.gram()))
        .map_err(|_| OperatorError::RadicalNotContained(target_index))?;
    let op = RepresentingOperator {
        matrix: s.matmul(&x),
        base_gram: f0.gram().clone(),
        target_index,
    };
    assert!(op.invariants_hold(fi), "representing operator invariants violated");
    Ok(op)
}

/// A joint eigenvalue tuple with its root space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootDatum {
    pub values: Vec<Scalar>,
    pub space: Subspace,
}

/// Refines `ambient` into joint eigenspaces of `ops`, processing operators in
/// order. Pieces come out sorted by pivot positions; ties keep refinement order
/// (eigenvalues ascending).
pub fn joint_root_decomposition(ops: &[Matrix], ambient: &Subspace) -> Result<Vec<RootDatum>, NotSimultaneouslyDiagonalizable> {
    let mut pieces = vec![RootDatum {
        values: Vec::new(),
        space: ambient.clone(),
    }];
    if ambient.is_zero() {
        return Ok(Vec::new());
    }
    for (op_idx, t) in ops.iter().enumerate() {
        let mut next = Vec::new();
        for piece in pieces {
            for (lambda, space) in split_piece(t, &piece.space, op_idx)? {
                let mut values = piece.values.clone();
                values.push(lambda);
                next.push(RootDatum { values, space });
            }
        }
        pieces = next;
    }
    pieces.sort_by(|a, b| a.space.pivots().cmp(b.space.pivots()));
    Ok(pieces)
}

fn split_piece(t: &Matrix, u: &Subspace, op_idx: usize) -> Result<Vec<(Scalar, Subspace)>, NotSimultaneouslyDiagonalizable> {
    let stall = |reason| NotSimultaneouslyDiagonalizable {
        operator: op_idx,
        piece: u.clone(),
        reason,
    };
    let b = u.basis_matrix();
    // X with B·X = T·B is T restricted to U in the basis B.
    let x = match b.solve(&t.matmul(&b)) {
        Ok(x) => x,
        Err(LinalgError::NoSolution) => return Err(stall(StallReason::NotInvariant)),
        Err(e) => unreachable!("shapes agree: {e}"),
    };
    let k = u.dim();
    let c = x.get(0, 0).clone();
    if x == Matrix::identity(x.field(), k).scale(&c) {
        return Ok(vec![(c, u.clone())]);
    }
    let roots = match x.char_poly().roots_in_field() {
        Ok(r) => r,
        Err(LinalgError::UnsupportedField(_)) => return Err(stall(StallReason::UnsupportedField)),
        Err(e) => unreachable!("characteristic polynomials are monic: {e}"),
    };
    let mut out = Vec::with_capacity(roots.len());
    let mut total = 0;
    for (lambda, _) in &roots {
        let e = x.eigenspace(lambda);
        total += e.dim();
        out.push((lambda.clone(), e.image(&b)));
    }
    if total < k {
        let mult: usize = roots.iter().map(|(_, m)| m).sum();
        let reason = if mult < k {
            StallReason::EigenvalueOutsideField
        } else {
            StallReason::Defective
        };
        return Err(stall(reason));
    }
    Ok(out)
}

/// A pair of root spaces that fail to be orthogonal, or a root space on which
/// a member is not proportional to the base form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrthogonalityWitness {
    NonOrthogonal {
        form: usize,
        roots: (usize, usize),
        vectors: (Vec<Scalar>, Vec<Scalar>),
    },
    NotProportional {
        form: usize,
        root: usize,
    },
}

/// Checks that distinct root spaces are orthogonal under every form and returns
/// `c[i][α]` with `f_i|V_α = c[i][α] · f₀|V_α`.
pub fn verify_pairwise_orthogonality(
    roots: &[RootDatum],
    base: &BilinearForm,
    forms: &[BilinearForm],
) -> Result<Vec<Vec<Scalar>>, OrthogonalityWitness> {
    for (i, f) in forms.iter().enumerate() {
        for a in 0..roots.len() {
            for b in a + 1..roots.len() {
                for x in roots[a].space.basis() {
                    for y in roots[b].space.basis() {
                        if !f.evaluate(x, y).is_zero() {
                            return Err(OrthogonalityWitness::NonOrthogonal {
                                form: i,
                                roots: (a, b),
                                vectors: (x.clone(), y.clone()),
                            });
                        }
                    }
                }
            }
        }
    }
    let base_blocks: Vec<Matrix> = roots.iter().map(|r| base.restrict(&r.space).into_gram()).collect();
    forms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            roots
                .iter()
                .zip(&base_blocks)
                .enumerate()
                .map(|(a, (r, g0))| {
                    let gi = f.restrict(&r.space).into_gram();
                    proportionality(g0, &gi, base.field()).ok_or(OrthogonalityWitness::NotProportional { form: i, root: a })
                })
                .collect()
        })
        .collect()
}

/// `c` with `gi = c · g0`, taking `c = 0` when both vanish.
fn proportionality(g0: &Matrix, gi: &Matrix, field: Field) -> Option<Scalar> {
    let c = match g0.entries().iter().position(|x| !x.is_zero()) {
        Some(k) => &gi.entries()[k] / &g0.entries()[k],
        None => field.zero(),
    };
    (g0.scale(&c) == *gi).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn form(f: Field, rows: &[&[i64]]) -> BilinearForm {
        BilinearForm::new(Matrix::from_i64(f, rows)).unwrap()
    }

    fn vecs(f: Field, xs: &[&[i64]]) -> Vec<Vec<Scalar>> {
        xs.iter().map(|r| r.iter().map(|&v| f.from_i64(v)).collect()).collect()
    }

    #[test]
    fn represent_examples() {
        let p = represent(&form(Q, &[&[1, 0], &[0, 1]]), &form(Q, &[&[2, 0], &[0, 3]]), 1).unwrap();
        assert_eq!(p.matrix(), &Matrix::from_i64(Q, &[&[2, 0], &[0, 3]]));

        let p = represent(&form(Q, &[&[1, 0], &[0, 0]]), &form(Q, &[&[5, 0], &[0, 0]]), 1).unwrap();
        assert_eq!(p.matrix(), &Matrix::from_i64(Q, &[&[5, 0], &[0, 0]]));

        let err = represent(&form(Q, &[&[1, 0], &[0, 0]]), &form(Q, &[&[0, 0], &[0, 1]]), 1);
        assert_eq!(err, Err(OperatorError::RadicalNotContained(1)));
    }

    #[test]
    fn decomposition_of_diagonal_operators() {
        let t1 = Matrix::from_i64(Q, &[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        let t2 = Matrix::from_i64(Q, &[&[5, 0, 0], &[0, 7, 0], &[0, 0, 7]]);
        let roots = joint_root_decomposition(&[t1, t2], &Subspace::full(Q, 3)).unwrap();
        let got: Vec<(Vec<Scalar>, Subspace)> = roots.into_iter().map(|r| (r.values, r.space)).collect();
        let e = vecs(Q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            got,
            vec![
                (vecs(Q, &[&[2, 5]])[0].clone(), Subspace::span(Q, 3, &[e[0].clone()])),
                (vecs(Q, &[&[2, 7]])[0].clone(), Subspace::span(Q, 3, &[e[1].clone()])),
                (vecs(Q, &[&[3, 7]])[0].clone(), Subspace::span(Q, 3, &[e[2].clone()])),
            ]
        );
    }

    #[test]
    fn jordan_block_stalls() {
        let t = Matrix::from_i64(Q, &[&[0, 1], &[0, 0]]);
        let err = joint_root_decomposition(&[t], &Subspace::full(Q, 2)).unwrap_err();
        assert_eq!(err.operator, 0);
        assert_eq!(err.reason, StallReason::Defective);
        let rot = Matrix::from_i64(Q, &[&[0, -1], &[1, 0]]);
        let err = joint_root_decomposition(&[rot], &Subspace::full(Q, 2)).unwrap_err();
        assert_eq!(err.reason, StallReason::EigenvalueOutsideField);
    }

    #[test]
    fn swap_over_gf3() {
        let gf3 = Field::prime(3).unwrap();
        let t = Matrix::from_i64(gf3, &[&[0, 1], &[1, 0]]);
        let roots = joint_root_decomposition(&[t], &Subspace::full(gf3, 2)).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].values, vec![gf3.from_i64(1)]);
        assert_eq!(roots[0].space, Subspace::span(gf3, 2, &vecs(gf3, &[&[1, 1]])));
        assert_eq!(roots[1].values, vec![gf3.from_i64(2)]);
        assert_eq!(roots[1].space, Subspace::span(gf3, 2, &vecs(gf3, &[&[1, -1]])));

        let base = form(gf3, &[&[1, 0], &[0, 1]]);
        let g1 = form(gf3, &[&[0, 1], &[1, 0]]);
        let c = verify_pairwise_orthogonality(&roots, &base, &[base.clone(), g1]).unwrap();
        assert_eq!(c[0], vec![gf3.one(), gf3.one()]);
        assert_eq!(c[1], vec![gf3.from_i64(1), gf3.from_i64(2)]);
    }

    #[test]
    fn corrupted_roots_give_witness() {
        let base = form(Q, &[&[1, 0], &[0, 1]]);
        let e = vecs(Q, &[&[1, 0], &[1, 1]]);
        let roots = vec![
            RootDatum { values: vec![Q.one()], space: Subspace::span(Q, 2, &[e[0].clone()]) },
            RootDatum { values: vec![Q.zero()], space: Subspace::span(Q, 2, &[e[1].clone()]) },
        ];
        let w = verify_pairwise_orthogonality(&roots, &base, std::slice::from_ref(&base)).unwrap_err();
        assert!(matches!(w, OrthogonalityWitness::NonOrthogonal { form: 0, roots: (0, 1), .. }));
    }

    #[test]
    fn scalars_for_diagonal_family() {
        let base = form(Q, &[&[1, 0], &[0, 1]]);
        let g = form(Q, &[&[2, 0], &[0, 3]]);
        let t = represent(&base, &g, 1).unwrap();
        let roots = joint_root_decomposition(&[t.matrix().clone()], &Subspace::full(Q, 2)).unwrap();
        let c = verify_pairwise_orthogonality(&roots, &base, &[base.clone(), g]).unwrap();
        assert_eq!(c[1], vec![Q.from_i64(2), Q.from_i64(3)]);
    }

    #[test]
    fn noncommuting_operators_stall() {
        let ops = [Matrix::from_i64(Q, &[&[1, 0], &[0, 2]]), Matrix::from_i64(Q, &[&[0, 1], &[1, 0]])];
        let err = joint_root_decomposition(&ops, &Subspace::full(Q, 2)).unwrap_err();
        assert_eq!((err.operator, err.reason, err.piece.dim()), (1, StallReason::NotInvariant, 1));
    }
}
