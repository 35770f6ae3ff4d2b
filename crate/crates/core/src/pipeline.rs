//! Simultaneous orthogonalization: per-root orthogonal bases, the nondegenerate
//! and degenerate pipelines, the full decision procedure and its certificates.

use std::fmt;

use crate::family::{family_radical, nondegenerate_combination, FormFamily, NotFound};
use crate::field::{Field, Scalar};
use crate::forms::BilinearForm;
use crate::linalg::{Matrix, Subspace};
use crate::operators::{
    joint_root_decomposition, represent, verify_pairwise_orthogonality, OperatorError, RootDatum, StallReason,
};

/// Default number of determinant evaluations in the combination search.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// The form playing the role of `⟨·,·⟩₀`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseChoice {
    Member(usize),
    /// `Σ x_j G_j`, adjoined to the family.
    Combination(Vec<Scalar>),
}

impl BaseChoice {
    /// The base form on the ambient space.
    pub fn form(&self, family: &FormFamily) -> BilinearForm {
        match self {
            BaseChoice::Member(i) => family.members()[*i].clone(),
            BaseChoice::Combination(c) => family.combination(c),
        }
    }

    /// Members with a representing operator, in family order.
    pub fn operator_indices(&self, members: usize) -> Vec<usize> {
        match self {
            BaseChoice::Member(b) => (0..members).filter(|i| i != b).collect(),
            BaseChoice::Combination(_) => (0..members).collect(),
        }
    }
}

/// A basis diagonalizing every member, with its root decomposition.
///
/// `roots[α].values` lists `α(T_i)` over [`BaseChoice::operator_indices`];
/// `scalars[i][α]` is `c_{i,α}` for every member `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoCertificate {
    pub basis: Matrix,
    pub diagonals: Vec<Vec<Scalar>>,
    pub roots: Vec<RootDatum>,
    pub scalars: Vec<Vec<Scalar>>,
    pub radical_tail: usize,
    pub base: Option<BaseChoice>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateViolation {
    #[error("basis has shape {rows}x{cols}, expected {dim}x{dim}")]
    Shape { rows: usize, cols: usize, dim: usize },
    #[error("basis over {found}, family over {expected}")]
    FieldMismatch { expected: Field, found: Field },
    #[error("basis is singular")]
    Singular,
    #[error("{found} diagonals for {expected} forms")]
    DiagonalCount { expected: usize, found: usize },
    #[error("form {form} has nonzero entry {value} at ({row}, {col}) in the certificate basis")]
    OffDiagonal { form: usize, row: usize, col: usize, value: Scalar },
    #[error("diagonal {index} of form {form} is {actual}, certificate says {claimed}")]
    DiagonalMismatch { form: usize, index: usize, claimed: Scalar, actual: Scalar },
    #[error("radical tail {0} exceeds the dimension")]
    TailTooLong(usize),
    #[error("tail column {0} is not in the family radical")]
    TailNotRadical(usize),
    #[error("root data inconsistent: {0}")]
    Roots(String),
}

impl OrthoCertificate {
    /// Certificate carrying only a basis, checked against `family`.
    pub fn from_basis(family: &FormFamily, basis: Matrix) -> Result<Self, CertificateViolation> {
        let diagonals = family
            .members()
            .iter()
            .map(|m| m.congruent(&basis).gram().diagonal_entries())
            .collect();
        let cert = OrthoCertificate {
            basis,
            diagonals,
            roots: Vec::new(),
            scalars: Vec::new(),
            radical_tail: 0,
            base: None,
        };
        cert.verify(family)?;
        Ok(cert)
    }

    pub fn combination(&self) -> Option<&[Scalar]> {
        match &self.base {
            Some(BaseChoice::Combination(c)) => Some(c),
            _ => None,
        }
    }

    /// Exact replay of every claim against `family`.
    pub fn verify(&self, family: &FormFamily) -> Result<(), CertificateViolation> {
        let n = family.dim();
        let b = &self.basis;
        if b.rows() != n || b.cols() != n {
            return Err(CertificateViolation::Shape { rows: b.rows(), cols: b.cols(), dim: n });
        }
        if b.field() != family.field() {
            return Err(CertificateViolation::FieldMismatch { expected: family.field(), found: b.field() });
        }
        if b.rank() != n {
            return Err(CertificateViolation::Singular);
        }
        if self.diagonals.len() != family.len() {
            return Err(CertificateViolation::DiagonalCount { expected: family.len(), found: self.diagonals.len() });
        }
        for (form, (m, claimed)) in family.members().iter().zip(&self.diagonals).enumerate() {
            let g = m.congruent(b).into_gram();
            if let Some((row, col)) = g.off_diagonal_nonzero() {
                return Err(CertificateViolation::OffDiagonal { form, row, col, value: g.get(row, col).clone() });
            }
            if claimed.len() != n {
                return Err(CertificateViolation::DiagonalCount { expected: n, found: claimed.len() });
            }
            for (index, (c, a)) in claimed.iter().zip(g.diagonal_entries()).enumerate() {
                if *c != a {
                    return Err(CertificateViolation::DiagonalMismatch { form, index, claimed: c.clone(), actual: a });
                }
            }
        }
        if self.radical_tail > n {
            return Err(CertificateViolation::TailTooLong(self.radical_tail));
        }
        let rad = family_radical(family);
        for j in n - self.radical_tail..n {
            if !rad.contains(&b.column(j)) {
                return Err(CertificateViolation::TailNotRadical(j));
            }
        }
        match &self.base {
            Some(base) => self.verify_roots(family, base),
            None if self.roots.is_empty() && self.scalars.is_empty() => Ok(()),
            None => Err(CertificateViolation::Roots("root data without a base form".into())),
        }
    }

    fn verify_roots(&self, family: &FormFamily, base: &BaseChoice) -> Result<(), CertificateViolation> {
        let bad = |s: &str| Err(CertificateViolation::Roots(s.into()));
        if let BaseChoice::Member(i) = base {
            if *i >= family.len() {
                return bad("base index out of range");
            }
        }
        if let BaseChoice::Combination(c) = base {
            if c.len() != family.len() || c.iter().any(|x| x.field() != family.field()) {
                return bad("combination has the wrong length or field");
            }
        }
        let f0 = base.form(family);
        let ops = base.operator_indices(family.len());
        let total: usize = self.roots.iter().map(|r| r.space.dim()).sum();
        if total + self.radical_tail != family.dim() {
            return bad("root spaces and radical tail do not fill the space");
        }
        if self.scalars.len() != family.len() || self.scalars.iter().any(|row| row.len() != self.roots.len()) {
            return bad("scalar table has the wrong shape");
        }
        for (a, r) in self.roots.iter().enumerate() {
            if r.values.len() != ops.len() {
                return bad("root tuple has the wrong length");
            }
            if r.space.field() != family.field() || r.space.ambient() != family.dim() {
                return bad("root space lives elsewhere");
            }
            if self.roots[..a].iter().any(|s| s.values == r.values) {
                return bad("repeated root tuple");
            }
            let g0 = f0.restrict(&r.space).into_gram();
            for (i, m) in family.members().iter().enumerate() {
                if m.restrict(&r.space).into_gram() != g0.scale(&self.scalars[i][a]) {
                    return bad("restricted form is not the recorded multiple of the base");
                }
            }
            for (j, &i) in ops.iter().enumerate() {
                if self.scalars[i][a] != r.values[j] {
                    return bad("scalar disagrees with root value");
                }
            }
            if let BaseChoice::Member(b) = base {
                if !self.scalars[*b][a].is_one() {
                    return bad("base scalar is not one");
                }
            }
        }
        Ok(())
    }
}

/// A reason no basis can diagonalize the family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// A representing operator has no eigenbasis on `piece` (a subspace of the ambient space).
    NotDiagonalizable { operator: usize, piece: Subspace, reason: StallReason },
    /// The base form is alternating and nonzero on a root space; `pair` spans a hyperbolic plane.
    Alternating { root: Vec<Scalar>, pair: (Vec<Scalar>, Vec<Scalar>) },
    /// Every linear combination is degenerate modulo the family radical.
    IdenticallySingular,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::NotDiagonalizable { operator, piece, reason } => {
                write!(f, "operator for member {operator} on a {}-dimensional piece: {reason}", piece.dim())
            }
            Obstruction::Alternating { .. } => write!(f, "base form alternating on a root space"),
            Obstruction::IdenticallySingular => write!(f, "every linear combination is degenerate"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndeterminateReason {
    BudgetExhausted,
    SmallFieldExhausted,
    RootFindingUnsupported,
}

impl fmt::Display for IndeterminateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndeterminateReason::BudgetExhausted => "combination search budget exhausted",
            IndeterminateReason::SmallFieldExhausted => "field too small for the combination search",
            IndeterminateReason::RootFindingUnsupported => "root finding unsupported over this field",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certificate(OrthoCertificate),
    NotSimultaneouslyOrthogonalizable(Obstruction),
    Indeterminate(IndeterminateReason),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("member index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("base member {0} is degenerate")]
    BaseDegenerate(usize),
    #[error("the radical of the base is not contained in the radical of member {0}")]
    RadicalNotContained(usize),
    #[error("not simultaneously orthogonalizable: {0}")]
    NotSimultaneouslyOrthogonalizable(Obstruction),
    #[error("root finding unsupported over {0}")]
    Unsupported(Field),
}

/// `f` is alternating and nonzero on the span of the subspace being diagonalized.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("form is alternating and nonzero")]
pub struct NotDiagonalizable {
    pub pair: (Vec<Scalar>, Vec<Scalar>),
}

fn add(x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scaled(x: &[Scalar], c: &Scalar) -> Vec<Scalar> {
    x.iter().map(|a| a * c).collect()
}

/// `{y : ⟨v, y⟩ = 0 for all v in vs}`.
fn perp(f: &BilinearForm, vs: &[Vec<Scalar>]) -> Subspace {
    let rows: Vec<Vec<Scalar>> = vs.iter().map(|v| f.gram().mul_vec(v)).collect();
    Matrix::from_rows(f.field(), rows).expect("rows of equal length").kernel()
}

/// Orthogonal basis of `f` restricted to `s`.
///
/// Greedy splitting along anisotropic vectors. In characteristic 2 an alternating
/// residual `U` next to an earlier anisotropic `x` (norm `a`) is absorbed: for
/// `u, w ∈ U` with `⟨u,w⟩ = b ≠ 0` and `c = a/b`, the vectors `x+u`, `x+cw`,
/// `x+u+cw` are pairwise orthogonal of norm `a` and replace `x`. Failure therefore
/// means the whole restriction is alternating and nonzero.
pub fn orthogonal_basis_of_form(f: &BilinearForm, s: &Subspace) -> Result<Vec<Vec<Scalar>>, NotDiagonalizable> {
    let char2 = f.field().characteristic() == 2;
    let mut u = s.clone();
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    while !u.is_zero() {
        let basis = u.basis().to_vec();
        let v = match basis.iter().find(|v| !f.evaluate(v, v).is_zero()) {
            Some(v) => v.clone(),
            None => {
                let pair = (0..basis.len())
                    .flat_map(|j| (j + 1..basis.len()).map(move |k| (j, k)))
                    .find(|&(j, k)| !f.evaluate(&basis[j], &basis[k]).is_zero());
                let Some((j, k)) = pair else {
                    out.extend(basis);
                    break;
                };
                let (p, q) = (basis[j].clone(), basis[k].clone());
                if !char2 {
                    add(&p, &q)
                } else {
                    let Some(xi) = out.iter().position(|x| !f.evaluate(x, x).is_zero()) else {
                        return Err(NotDiagonalizable { pair: (p, q) });
                    };
                    let x = out[xi].clone();
                    let c = &f.evaluate(&x, &x) / &f.evaluate(&p, &q);
                    let cq = scaled(&q, &c);
                    let xp = add(&x, &p);
                    let replacement = [xp.clone(), add(&x, &cq), add(&xp, &cq)];
                    out.splice(xi..=xi, replacement);
                    u = u.intersect(&perp(f, &[p, q]));
                    continue;
                }
            }
        };
        u = u.intersect(&perp(f, std::slice::from_ref(&v)));
        out.push(v);
    }
    Ok(out)
}

enum CoreFailure {
    Obstruction(Obstruction),
    Unsupported,
}

/// Output of the pipeline on a space where `base` is nondegenerate.
struct Core {
    vectors: Vec<Vec<Scalar>>,
    roots: Vec<RootDatum>,
    scalars: Vec<Vec<Scalar>>,
}

fn nondegenerate_core(members: &[BilinearForm], base: &BilinearForm, choice: &BaseChoice) -> Result<Core, CoreFailure> {
    let k = base.dim();
    let ops_idx = choice.operator_indices(members.len());
    let ops: Vec<Matrix> = ops_idx
        .iter()
        .map(|&i| represent(base, &members[i], i).expect("nondegenerate base represents every member").matrix().clone())
        .collect();
    let roots = joint_root_decomposition(&ops, &Subspace::full(base.field(), k)).map_err(|e| {
        if e.reason == StallReason::UnsupportedField {
            CoreFailure::Unsupported
        } else {
            CoreFailure::Obstruction(Obstruction::NotDiagonalizable {
                operator: ops_idx[e.operator],
                piece: e.piece,
                reason: e.reason,
            })
        }
    })?;
    let mut vectors = Vec::with_capacity(k);
    for r in &roots {
        match orthogonal_basis_of_form(base, &r.space) {
            Ok(vs) => vectors.extend(vs),
            Err(NotDiagonalizable { pair }) => {
                return Err(CoreFailure::Obstruction(Obstruction::Alternating { root: r.values.clone(), pair }))
            }
        }
    }
    let scalars = verify_pairwise_orthogonality(&roots, base, members).expect("root spaces of self-adjoint operators are orthogonal");
    Ok(Core { vectors, roots, scalars })
}

/// Lifts a core computed on the complement through `section` and appends `radical`.
fn assemble(family: &FormFamily, section: &Matrix, radical: &Subspace, core: Core, base: BaseChoice) -> OrthoCertificate {
    let mut columns: Vec<Vec<Scalar>> = core.vectors.iter().map(|v| section.mul_vec(v)).collect();
    // Stable: columns ordered by leading coordinate, root order breaks ties.
    columns.sort_by_key(|v| v.iter().position(|x| !x.is_zero()));
    columns.extend(radical.basis().iter().cloned());
    let basis = Matrix::from_columns(family.field(), family.dim(), &columns);
    let roots = core
        .roots
        .into_iter()
        .map(|r| RootDatum {
            values: r.values,
            space: r.space.image(section),
        })
        .collect();
    let diagonals = family
        .members()
        .iter()
        .map(|m| m.congruent(&basis).gram().diagonal_entries())
        .collect();
    let cert = OrthoCertificate {
        basis,
        diagonals,
        roots,
        scalars: core.scalars,
        radical_tail: radical.dim(),
        base: Some(base),
    };
    if let Err(v) = cert.verify(family) {
        panic!("emitted certificate fails its own replay: {v}");
    }
    cert
}

fn lift_obstruction(o: Obstruction, section: &Matrix) -> Obstruction {
    match o {
        Obstruction::NotDiagonalizable { operator, piece, reason } => Obstruction::NotDiagonalizable {
            operator,
            piece: piece.image(section),
            reason,
        },
        Obstruction::Alternating { root, pair } => Obstruction::Alternating {
            root,
            pair: (section.mul_vec(&pair.0), section.mul_vec(&pair.1)),
        },
        other => other,
    }
}

fn quotient_family(family: &FormFamily, killed: &Subspace) -> (Vec<BilinearForm>, Matrix) {
    let quotients: Vec<_> = family
        .members()
        .iter()
        .map(|m| m.quotient_by(killed).expect("killed subspace lies in every radical"))
        .collect();
    let section = quotients[0].section().clone();
    (quotients.into_iter().map(|q| q.form().clone()).collect(), section)
}

fn run_core(
    family: &FormFamily,
    qforms: &[BilinearForm],
    section: &Matrix,
    radical: &Subspace,
    base: &BilinearForm,
    choice: BaseChoice,
) -> Result<OrthoCertificate, PipelineError> {
    match nondegenerate_core(qforms, base, &choice) {
        Ok(core) => Ok(assemble(family, section, radical, core, choice)),
        Err(CoreFailure::Unsupported) => Err(PipelineError::Unsupported(family.field())),
        Err(CoreFailure::Obstruction(o)) => Err(PipelineError::NotSimultaneouslyOrthogonalizable(lift_obstruction(o, section))),
    }
}

/// Pipeline with a nondegenerate member as base.
pub fn orthogonalize_nondegenerate(family: &FormFamily, base_index: usize) -> Result<OrthoCertificate, PipelineError> {
    let base = family.members().get(base_index).ok_or(PipelineError::IndexOutOfRange(base_index))?;
    if !base.is_nondegenerate() {
        return Err(PipelineError::BaseDegenerate(base_index));
    }
    let n = family.dim();
    let id = Matrix::identity(family.field(), n);
    let zero = Subspace::zero(family.field(), n);
    run_core(family, family.members(), &id, &zero, base, BaseChoice::Member(base_index))
}

/// Pipeline with a possibly degenerate base whose radical lies in every member's radical.
pub fn orthogonalize_degenerate(family: &FormFamily, base_index: usize) -> Result<OrthoCertificate, PipelineError> {
    let base = family.members().get(base_index).ok_or(PipelineError::IndexOutOfRange(base_index))?;
    let r0 = base.radical();
    for (i, m) in family.members().iter().enumerate() {
        if !m.radical().contains_subspace(&r0) {
            return Err(PipelineError::RadicalNotContained(i));
        }
    }
    let (qforms, section) = quotient_family(family, &r0);
    let qbase = qforms[base_index].clone();
    run_core(family, &qforms, &section, &r0, &qbase, BaseChoice::Member(base_index))
}

/// Full decision procedure with the default search budget.
pub fn check_so(family: &FormFamily) -> Verdict {
    check_so_with_budget(family, DEFAULT_BUDGET)
}

pub fn check_so_with_budget(family: &FormFamily, budget: u64) -> Verdict {
    let rad = family_radical(family);
    let (qforms, section) = quotient_family(family, &rad);
    let (base, choice) = match qforms.iter().position(BilinearForm::is_nondegenerate) {
        Some(b) => (qforms[b].clone(), BaseChoice::Member(b)),
        None => {
            let qfam = FormFamily::new(qforms.clone()).expect("quotients share field and dimension");
            match nondegenerate_combination(&qfam, budget) {
                Ok(c) => (qfam.combination(&c), BaseChoice::Combination(c)),
                Err(NotFound::IdenticallySingular) => {
                    return Verdict::NotSimultaneouslyOrthogonalizable(Obstruction::IdenticallySingular)
                }
                Err(NotFound::BudgetExhausted) => return Verdict::Indeterminate(IndeterminateReason::BudgetExhausted),
                Err(NotFound::SmallFieldExhausted) => {
                    return Verdict::Indeterminate(IndeterminateReason::SmallFieldExhausted)
                }
            }
        }
    };
    match run_core(family, &qforms, &section, &rad, &base, choice) {
        Ok(cert) => Verdict::Certificate(cert),
        Err(PipelineError::NotSimultaneouslyOrthogonalizable(o)) => Verdict::NotSimultaneouslyOrthogonalizable(o),
        Err(PipelineError::Unsupported(_)) => Verdict::Indeterminate(IndeterminateReason::RootFindingUnsupported),
        Err(e) => unreachable!("quotient pipeline cannot fail with {e}"),
    }
}

impl From<OperatorError> for PipelineError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::RadicalNotContained(i) => PipelineError::RadicalNotContained(i),
            OperatorError::Incompatible => PipelineError::IndexOutOfRange(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    fn fam(f: Field, ms: &[&[&[i64]]]) -> FormFamily {
        FormFamily::new(ms.iter().map(|m| BilinearForm::new(Matrix::from_i64(f, m)).unwrap()).collect()).unwrap()
    }

    fn ints(f: Field, xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    fn columns_as_set(m: &Matrix) -> Vec<Vec<Scalar>> {
        let mut c = m.columns();
        c.sort_by_key(|v| format!("{v:?}"));
        c
    }

    #[test]
    fn orthogonal_basis_examples() {
        let f = BilinearForm::new(Matrix::from_i64(Q, &[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]])).unwrap();
        let b = orthogonal_basis_of_form(&f, &Subspace::full(Q, 3)).unwrap();
        assert_eq!(Matrix::from_columns(Q, 3, &b), Matrix::identity(Q, 3));

        let h = BilinearForm::new(Matrix::from_i64(Q, &[&[0, 1], &[1, 0]])).unwrap();
        let b = orthogonal_basis_of_form(&h, &Subspace::full(Q, 2)).unwrap();
        assert_eq!(b, vec![ints(Q, &[1, 1]), ints(Q, &[1, -1])]);
        let d = h.congruent(&Matrix::from_columns(Q, 2, &b));
        assert_eq!(d.gram(), &Matrix::from_i64(Q, &[&[2, 0], &[0, -2]]));

        let gf2 = Field::prime(2).unwrap();
        let h2 = BilinearForm::new(Matrix::from_i64(gf2, &[&[0, 1], &[1, 0]])).unwrap();
        assert!(orthogonal_basis_of_form(&h2, &Subspace::full(gf2, 2)).is_err());
    }

    #[test]
    fn char_two_residual_is_absorbed() {
        // diag(1) ⊕ hyperbolic plane over GF(2) is isometric to the identity on 𝔽₂³.
        let gf2 = Field::prime(2).unwrap();
        let f = BilinearForm::new(Matrix::from_i64(gf2, &[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]])).unwrap();
        let b = orthogonal_basis_of_form(&f, &Subspace::full(gf2, 3)).unwrap();
        let m = Matrix::from_columns(gf2, 3, &b);
        assert_eq!(m.rank(), 3);
        assert_eq!(f.congruent(&m).gram(), &Matrix::identity(gf2, 3));
    }

    #[test]
    fn nondegenerate_examples() {
        let f = fam(Q, &[&[&[1, 0], &[0, 1]], &[&[2, 0], &[0, 3]]]);
        let c = orthogonalize_nondegenerate(&f, 0).unwrap();
        assert_eq!(c.basis, Matrix::identity(Q, 2));
        assert_eq!(c.diagonals, vec![ints(Q, &[1, 1]), ints(Q, &[2, 3])]);
        let vals: Vec<Vec<Scalar>> = c.roots.iter().map(|r| r.values.clone()).collect();
        assert_eq!(vals, vec![ints(Q, &[2]), ints(Q, &[3])]);

        let f = fam(Q, &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]]);
        let c = orthogonalize_nondegenerate(&f, 0).unwrap();
        let want = Matrix::from_columns(Q, 2, &[ints(Q, &[1, 1]), ints(Q, &[1, -1])]);
        assert_eq!(columns_as_set(&c.basis), columns_as_set(&want));
        let mut vals: Vec<Vec<Scalar>> = c.roots.iter().map(|r| r.values.clone()).collect();
        vals.sort_by_key(|v| format!("{v:?}"));
        let mut want_vals = vec![ints(Q, &[1]), ints(Q, &[-1])];
        want_vals.sort_by_key(|v| format!("{v:?}"));
        assert_eq!(vals, want_vals);
        for (form, d) in c.diagonals.iter().enumerate() {
            for (j, col) in c.basis.columns().iter().enumerate() {
                assert_eq!(d[j], f.members()[form].evaluate(col, col));
            }
        }
    }

    #[test]
    fn degenerate_examples() {
        let f = fam(Q, &[&[&[1, 0], &[0, 0]], &[&[5, 0], &[0, 0]]]);
        let c = orthogonalize_degenerate(&f, 0).unwrap();
        assert_eq!(c.basis, Matrix::identity(Q, 2));
        assert_eq!(c.diagonals, vec![ints(Q, &[1, 0]), ints(Q, &[5, 0])]);
        assert_eq!(c.radical_tail, 1);

        let f = fam(Q, &[&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]], &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]]);
        let c = orthogonalize_degenerate(&f, 0).unwrap();
        let head = Matrix::from_columns(Q, 3, &c.basis.columns()[..2]);
        let want = Matrix::from_columns(Q, 3, &[ints(Q, &[1, 1, 0]), ints(Q, &[1, -1, 0])]);
        assert_eq!(columns_as_set(&head), columns_as_set(&want));
        assert_eq!(c.basis.column(2), ints(Q, &[0, 0, 1]));

        let f = fam(Q, &[&[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]]);
        assert_eq!(orthogonalize_degenerate(&f, 0), Err(PipelineError::RadicalNotContained(1)));
    }

    #[test]
    fn check_so_examples() {
        let f = fam(Q, &[&[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]]);
        let Verdict::Certificate(c) = check_so(&f) else { panic!() };
        assert_eq!(c.combination(), Some(&ints(Q, &[1, 1])[..]));
        assert_eq!(c.basis, Matrix::identity(Q, 2));

        let f = fam(Q, &[&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]], &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]]);
        let Verdict::Certificate(c) = check_so(&f) else { panic!() };
        assert_eq!(c.radical_tail, 1);
        assert_eq!(c.basis.column(2), ints(Q, &[0, 0, 1]));

        let f = fam(Q, &[&[&[1, 0], &[0, 0]], &[&[0, 1], &[1, 0]]]);
        assert!(matches!(
            check_so(&f),
            Verdict::NotSimultaneouslyOrthogonalizable(Obstruction::NotDiagonalizable { operator: 0, .. })
        ));
    }

    #[test]
    fn char_two_alternating_is_rejected() {
        let gf2 = Field::prime(2).unwrap();
        let f = fam(gf2, &[&[&[0, 1], &[1, 0]]]);
        let Verdict::NotSimultaneouslyOrthogonalizable(Obstruction::Alternating { pair, .. }) = check_so(&f) else {
            panic!()
        };
        assert!(!f.members()[0].evaluate(&pair.0, &pair.1).is_zero());
    }

    #[test]
    fn identically_singular_is_a_disproof() {
        // Nilpotent pencil: span{e₁} is isotropic for both forms but lies in neither radical.
        let f = fam(Q, &[&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]], &[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]]]);
        assert!(family_radical(&f).is_zero());
        assert_eq!(check_so(&f), Verdict::NotSimultaneouslyOrthogonalizable(Obstruction::IdenticallySingular));
    }

    #[test]
    fn small_field_is_indeterminate() {
        let gf2 = Field::prime(2).unwrap();
        let f = fam(gf2, &[&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 1]], &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]]);
        assert_eq!(check_so(&f), Verdict::Indeterminate(IndeterminateReason::SmallFieldExhausted));
    }

    #[test]
    fn diagonal_families_give_permutation_bases() {
        let f = fam(Q, &[&[&[2, 0, 0], &[0, 0, 0], &[0, 0, 5]], &[&[0, 0, 0], &[0, 3, 0], &[0, 0, 5]]]);
        let Verdict::Certificate(c) = check_so(&f) else { panic!() };
        for j in 0..3 {
            let col = c.basis.column(j);
            assert_eq!(col.iter().filter(|x| !x.is_zero()).count(), 1);
            assert!(col.iter().all(|x| x.is_zero() || x.is_one()));
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let f = fam(Q, &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 0]]]);
        let Verdict::Certificate(mut c) = check_so(&f) else { panic!() };
        c.basis.set(0, 0, Q.from_i64(7));
        assert!(matches!(c.verify(&f), Err(CertificateViolation::OffDiagonal { .. })));
    }

    #[test]
    fn zero_family_is_all_radical() {
        let f = fam(Q, &[&[&[0, 0], &[0, 0]]]);
        let Verdict::Certificate(c) = check_so(&f) else { panic!() };
        assert_eq!(c.radical_tail, 2);
        assert!(c.roots.is_empty());
    }

    #[test]
    fn noncommuting_operators_are_a_disproof() {
        let gf2 = Field::prime(2).unwrap();
        let f = fam(gf2, &[&[&[0, 0], &[0, 1]], &[&[1, 1], &[1, 0]], &[&[0, 1], &[1, 0]]]);
        match check_so(&f) {
            Verdict::NotSimultaneouslyOrthogonalizable(Obstruction::NotDiagonalizable { reason, .. }) => {
                assert_eq!(reason, StallReason::NotInvariant)
            }
            v => panic!("{v:?}"),
        }
    }
}
