//! Computable ultraproduct fragments.
//!
//! A countable family whose Gram data is eventually constant has every pairing
//! sequence `(⟨x,y⟩_i)_i` eventually constant, so its class modulo any ultrafilter
//! containing the cofinite filter is the tail value. A finite index set with the
//! principal ultrafilter at its last index is the special case where the tail is
//! the last member. Genuinely nonprincipal choices are not representable.

use crate::family::{FamilyError, FormFamily};
use crate::field::Field;
use crate::forms::BilinearForm;
use crate::linalg::{Matrix, Subspace};
use crate::pipeline::{CertificateViolation, OrthoCertificate};

/// Where the double-bracket Gram matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Finite index set; principal ultrafilter at the last index.
    Finite,
    StableTail,
}

/// Members `prefix[0..N]`, then `tail` at every later index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableTailFamily {
    prefix: Vec<BilinearForm>,
    tail: BilinearForm,
    provenance: Provenance,
}

impl StableTailFamily {
    pub fn new(prefix: Vec<BilinearForm>, tail: BilinearForm) -> Result<Self, FamilyError> {
        let mut all = prefix.clone();
        all.push(tail.clone());
        FormFamily::new(all)?;
        Ok(StableTailFamily {
            prefix,
            tail,
            provenance: Provenance::StableTail,
        })
    }

    /// The finite index set read with the principal ultrafilter at its last member.
    pub fn from_finite(f: &FormFamily) -> Self {
        let mut prefix = f.members().to_vec();
        let tail = prefix.pop().expect("families are non-empty");
        StableTailFamily {
            prefix,
            tail,
            provenance: Provenance::Finite,
        }
    }

    pub fn prefix(&self) -> &[BilinearForm] {
        &self.prefix
    }

    pub fn tail(&self) -> &BilinearForm {
        &self.tail
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn field(&self) -> Field {
        self.tail.field()
    }

    pub fn dim(&self) -> usize {
        self.tail.dim()
    }

    /// Member at index `i` (0-based).
    pub fn member(&self, i: usize) -> &BilinearForm {
        self.prefix.get(i).unwrap_or(&self.tail)
    }

    /// The same sequence with the cut moved `k` indices later.
    pub fn extend_prefix(&self, k: usize) -> Self {
        let mut prefix = self.prefix.clone();
        prefix.extend(std::iter::repeat_n(self.tail.clone(), k));
        StableTailFamily {
            prefix,
            tail: self.tail.clone(),
            provenance: self.provenance,
        }
    }

    /// Prefix members followed by the tail, as a finite family.
    pub fn finite_members(&self) -> FormFamily {
        let mut all = self.prefix.clone();
        all.push(self.tail.clone());
        FormFamily::new(all).expect("validated at construction")
    }

    /// Member `i` is the identity with its `(i,i)` entry zeroed, for `i < n`; the tail is the identity.
    pub fn worked_example(field: Field, n: usize) -> Self {
        let prefix = (0..n)
            .map(|i| {
                let mut g = Matrix::identity(field, n);
                g.set(i, i, field.zero());
                BilinearForm::new(g).unwrap()
            })
            .collect();
        StableTailFamily::new(prefix, BilinearForm::new(Matrix::identity(field, n)).unwrap()).unwrap()
    }

    /// Truncation at `n` of the chain with `⟨e_j,e_j⟩_i = 1` for `j ≤ i`, zero
    /// elsewhere; its radicals strictly descend until the tail `I_n`.
    pub fn descending_chain(field: Field, n: usize) -> Self {
        let diag = |k: usize| {
            let entries: Vec<_> = (0..n).map(|j| if j < k { field.one() } else { field.zero() }).collect();
            BilinearForm::new(Matrix::diagonal(field, &entries)).unwrap()
        };
        StableTailFamily::new((1..n).map(diag).collect(), diag(n)).unwrap()
    }
}

/// The form `⟨⟨x,y⟩⟩ = [(⟨x,y⟩_i)_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleBracketForm {
    pub form: BilinearForm,
    pub provenance: Provenance,
}

impl DoubleBracketForm {
    pub fn gram(&self) -> &Matrix {
        self.form.gram()
    }
}

pub fn double_bracket(f: &StableTailFamily) -> DoubleBracketForm {
    DoubleBracketForm {
        form: f.tail.clone(),
        provenance: f.provenance,
    }
}

/// `{x : ⟨⟨x, V⟩⟩ = 0}`.
pub fn pathological_subspace(f: &StableTailFamily) -> Subspace {
    double_bracket(f).form.radical()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UltrafilterReport {
    pub nonpathological: bool,
    pub double_bracket_nondegenerate: bool,
    /// A certificate was supplied and verified.
    pub orthogonalizable: bool,
    /// The certificate basis also diagonalizes the double bracket.
    pub enlarged_family_diagonal: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UltrafilterError {
    #[error("certificate rejected: {0}")]
    Certificate(#[from] CertificateViolation),
    #[error("implication violated: {0}")]
    ImplicationViolated(&'static str),
}

/// Evaluates nonpathology, nondegeneracy of `⟨⟨·,·⟩⟩` and (given a certificate for
/// the prefix and tail) orthogonalizability, then checks the implications
/// `(a) ∧ (c) ⇒ (b)` and `(b) ⇒ (a)`.
pub fn check_ultrafilter_implications(f: &StableTailFamily, certificate: Option<&OrthoCertificate>) -> Result<UltrafilterReport, UltrafilterError> {
    let db = double_bracket(f);
    let nonpathological = pathological_subspace(f).is_zero();
    let nondegenerate = db.form.is_nondegenerate();
    let mut enlarged = None;
    if let Some(cert) = certificate {
        let members = f.finite_members();
        cert.verify(&members)?;
        let mut with_db = members.members().to_vec();
        with_db.push(db.form.clone());
        let enlarged_family = FormFamily::new(with_db).expect("same space");
        enlarged = Some(OrthoCertificate::from_basis(&enlarged_family, cert.basis.clone()).is_ok());
    }
    let report = UltrafilterReport {
        nonpathological,
        double_bracket_nondegenerate: nondegenerate,
        orthogonalizable: certificate.is_some(),
        enlarged_family_diagonal: enlarged,
    };
    if report.nonpathological && report.orthogonalizable && !report.double_bracket_nondegenerate {
        return Err(UltrafilterError::ImplicationViolated("nonpathological and orthogonalizable but degenerate"));
    }
    if report.double_bracket_nondegenerate && !report.nonpathological {
        return Err(UltrafilterError::ImplicationViolated("nondegenerate but pathological"));
    }
    if enlarged == Some(false) {
        return Err(UltrafilterError::ImplicationViolated("certificate does not diagonalize the double bracket"));
    }
    Ok(report)
}
