//! Finite families of forms on a common space: family radical, minimal radical
//! support, nondegenerate linear combinations and scalar extension.

use crate::field::{Field, Scalar};
use crate::forms::BilinearForm;
use crate::linalg::Subspace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("a family needs at least one form")]
    Empty,
    #[error("member {index} is over {found}, expected {expected}")]
    FieldMismatch { index: usize, expected: Field, found: Field },
    #[error("member {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("{labels} labels for {members} members")]
    LabelCount { labels: usize, members: usize },
    #[error("no canonical embedding of {from} into {to}")]
    NoCanonicalEmbedding { from: Field, to: Field },
}

/// Non-empty ordered list of forms sharing field and dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFamily {
    field: Field,
    dim: usize,
    members: Vec<BilinearForm>,
    labels: Option<Vec<String>>,
}

impl FormFamily {
    pub fn new(members: Vec<BilinearForm>) -> Result<Self, FamilyError> {
        let first = members.first().ok_or(FamilyError::Empty)?;
        let (field, dim) = (first.field(), first.dim());
        for (index, m) in members.iter().enumerate() {
            if m.field() != field {
                return Err(FamilyError::FieldMismatch { index, expected: field, found: m.field() });
            }
            if m.dim() != dim {
                return Err(FamilyError::DimensionMismatch { index, expected: dim, found: m.dim() });
            }
        }
        Ok(FormFamily { field, dim, members, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, FamilyError> {
        if labels.len() != self.members.len() {
            return Err(FamilyError::LabelCount { labels: labels.len(), members: self.members.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[BilinearForm] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn combination(&self, coeffs: &[Scalar]) -> BilinearForm {
        assert_eq!(coeffs.len(), self.len());
        BilinearForm::linear_combination(self.field, self.dim, coeffs, &self.members)
    }
}

/// `∩ rad(f_i)`.
pub fn family_radical(f: &FormFamily) -> Subspace {
    f.members
        .iter()
        .fold(Subspace::full(f.field, f.dim), |acc, m| acc.intersect(&m.radical()))
}

/// Greedy: keep an index iff it strictly shrinks the running intersection.
/// Falls back to `{0}` when no member shrinks the full space.
pub fn minimal_radical_support(f: &FormFamily) -> Vec<usize> {
    let mut running = Subspace::full(f.field, f.dim);
    let mut kept = Vec::new();
    for (i, m) in f.members.iter().enumerate() {
        let next = running.intersect(&m.radical());
        if next.dim() < running.dim() {
            kept.push(i);
            running = next;
        }
    }
    if kept.is_empty() {
        kept.push(0);
    }
    kept
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, thiserror::Error)]
pub enum NotFound {
    /// The budget ran out before the grid was covered.
    #[error("search budget exhausted")]
    BudgetExhausted,
    /// A full grid of side `dim + 1` vanished, so every combination is degenerate.
    #[error("every linear combination is degenerate")]
    IdenticallySingular,
    /// The field is too small for a grid of side `dim + 1`; the whole field grid vanished.
    #[error("field too small to certify identical singularity")]
    SmallFieldExhausted,
}

/// First coefficient tuple (little-endian counter over a grid of side
/// `min(|𝕂|, dim + 1)`, zero tuple skipped) with `det(Σ x_j G_j) ≠ 0`.
///
/// `det(Σ x_j G_j)` has degree at most `dim` in each `x_j`, so if it vanishes on a
/// grid of side `dim + 1` it is the zero polynomial.
pub fn nondegenerate_combination(f: &FormFamily, budget: u64) -> Result<Vec<Scalar>, NotFound> {
    let m = f.len();
    let side = f.field.order().map_or(f.dim + 1, |q| (q as usize).min(f.dim + 1));
    let values: Vec<Scalar> = f.field.enumerate_elements(side).into_iter().take(side).collect();
    let mut idx = vec![0usize; m];
    let mut spent = 0u64;
    loop {
        // Advance first so the all-zero tuple is skipped.
        let mut k = 0;
        while k < m && idx[k] + 1 == side {
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            return Err(if side == f.dim + 1 {
                NotFound::IdenticallySingular
            } else {
                NotFound::SmallFieldExhausted
            });
        }
        idx[k] += 1;
        if spent == budget {
            return Err(NotFound::BudgetExhausted);
        }
        spent += 1;
        let coeffs: Vec<Scalar> = idx.iter().map(|&i| values[i].clone()).collect();
        if f.combination(&coeffs).is_nondegenerate() {
            return Ok(coeffs);
        }
    }
}

/// Reinterprets every Gram matrix in `target` (ℚ → ℚ(t) or identity).
pub fn base_change(f: &FormFamily, target: Field) -> Result<FormFamily, FamilyError> {
    if f.field == target {
        return Ok(f.clone());
    }
    if f.field != Field::Rationals || target != Field::RationalFunctions {
        return Err(FamilyError::NoCanonicalEmbedding { from: f.field, to: target });
    }
    let members = f
        .members
        .iter()
        .map(|m| {
            let gram = m
                .gram()
                .try_map(target, |s| target.from_rational(s.as_rational().unwrap()).ok_or(()))
                .expect("ℚ embeds in ℚ(t)");
            BilinearForm::new(gram).expect("symmetry is preserved")
        })
        .collect();
    Ok(FormFamily {
        field: target,
        dim: f.dim,
        members,
        labels: f.labels.clone(),
    })
}
