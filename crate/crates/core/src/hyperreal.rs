//! ℚ(t) ordered at `t → +∞` as a computable model of hyperreals: `t` is an
//! infinite number, `1/t` an infinitesimal, and the standard part is the limit.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::family::FormFamily;
use crate::field::{Field, QPoly, RatFunc, Scalar};
use crate::forms::BilinearForm;
use crate::linalg::{Matrix, Subspace};
use crate::pipeline::{CertificateViolation, OrthoCertificate};

/// Size class of an element of ℚ(t) at `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperClass {
    pub finite: bool,
    pub infinitesimal: bool,
    /// Standard part; `None` iff unbounded.
    pub st: Option<BigRational>,
}

pub fn hyper_classify(x: &RatFunc) -> HyperClass {
    let Some(dn) = x.numer().degree() else {
        return HyperClass {
            finite: true,
            infinitesimal: true,
            st: Some(BigRational::zero()),
        };
    };
    let dd = x.denom().degree().expect("denominators are nonzero");
    match dn.cmp(&dd) {
        Ordering::Less => HyperClass {
            finite: true,
            infinitesimal: true,
            st: Some(BigRational::zero()),
        },
        Ordering::Equal => HyperClass {
            finite: true,
            infinitesimal: false,
            st: Some(x.numer().lead().unwrap() / x.denom().lead().unwrap()),
        },
        Ordering::Greater => HyperClass {
            finite: false,
            infinitesimal: false,
            st: None,
        },
    }
}

/// Eventual sign of `x(i)` for large integers `i`.
pub fn sign(x: &RatFunc) -> Ordering {
    // The canonical denominator is monic, so the numerator's leading coefficient decides.
    match x.numer().lead() {
        None => Ordering::Equal,
        Some(l) if l.is_positive() => Ordering::Greater,
        Some(_) => Ordering::Less,
    }
}

/// The order at `+∞`.
pub fn compare(x: &RatFunc, y: &RatFunc) -> Ordering {
    sign(&x.sub(y))
}

pub fn standard_part(x: &RatFunc) -> Option<BigRational> {
    hyper_classify(x).st
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HyperError {
    #[error("hyperreal families live over Q(t), got {0}")]
    WrongField(Field),
    #[error("entry ({0}, {1}) is unbounded")]
    UnboundedFamily(usize, usize),
    #[error("negligible subspace computations disagree")]
    InternalDisagreement,
    #[error("certificate basis depends on t")]
    CertificateNotConstant,
    #[error("certificate rejected: {0}")]
    Certificate(#[from] CertificateViolation),
}

/// The family `i ↦ gram_t(i)` for large integers `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperFamily {
    form: BilinearForm,
}

impl HyperFamily {
    pub fn new(form: BilinearForm) -> Result<Self, HyperError> {
        if form.field() != Field::RationalFunctions {
            return Err(HyperError::WrongField(form.field()));
        }
        Ok(HyperFamily { form })
    }

    pub fn form(&self) -> &BilinearForm {
        &self.form
    }

    pub fn gram_t(&self) -> &Matrix {
        self.form.gram()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    fn entry(&self, i: usize, j: usize) -> &RatFunc {
        self.gram_t().get(i, j).as_ratfunc().expect("entries over Q(t)")
    }

    fn first_unbounded(&self) -> Option<(usize, usize)> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| !hyper_classify(self.entry(i, j)).finite)
    }
}

/// Every entry finite; bilinearity extends this to all pairs of vectors over ℚ.
pub fn is_bounded_family(f: &HyperFamily) -> bool {
    f.first_unbounded().is_none()
}

/// Entrywise standard part of the Gram matrix, a form over ℚ.
pub fn st_form(f: &HyperFamily) -> Result<BilinearForm, HyperError> {
    if let Some((i, j)) = f.first_unbounded() {
        return Err(HyperError::UnboundedFamily(i, j));
    }
    let n = f.dim();
    let gram = Matrix::from_fn(Field::Rationals, n, n, |i, j| {
        Scalar::Rational(standard_part(f.entry(i, j)).expect("bounded"))
    });
    Ok(BilinearForm::new(gram).expect("standard part keeps symmetry"))
}

fn lcm(a: &QPoly, b: &QPoly) -> QPoly {
    a.mul(b).div_rem(&a.gcd(b)).0.monic()
}

/// `{x ∈ ℚⁿ : every entry of xᵀ·gram_t is infinitesimal}`, solved directly on
/// numerator coefficients.
fn negligible_direct(f: &HyperFamily) -> Subspace {
    let n = f.dim();
    let mut equations: Vec<Vec<Scalar>> = Vec::new();
    for k in 0..n {
        let den = (0..n).fold(QPoly::one(), |acc, j| lcm(&acc, f.entry(j, k).denom()));
        let dd = den.degree().unwrap();
        // G_jk = N_jk / den; Σ x_j N_jk / den is infinitesimal iff its numerator has degree < dd.
        let nums: Vec<QPoly> = (0..n)
            .map(|j| {
                let e = f.entry(j, k);
                e.numer().mul(&den.div_rem(e.denom()).0)
            })
            .collect();
        let top = nums.iter().filter_map(QPoly::degree).max();
        if let Some(top) = top {
            for deg in dd..=top {
                equations.push(nums.iter().map(|p| Scalar::Rational(p.coeff(deg))).collect());
            }
        }
    }
    if equations.is_empty() {
        return Subspace::full(Field::Rationals, n);
    }
    Matrix::from_rows(Field::Rationals, equations).unwrap().kernel()
}

/// Negligible subspace, computed as the st-form radical and directly, cross-checked.
pub fn negligible_subspace(f: &HyperFamily) -> Result<Subspace, HyperError> {
    let via_st = st_form(f)?.radical();
    if negligible_direct(f) != via_st {
        return Err(HyperError::InternalDisagreement);
    }
    Ok(via_st)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StandardPartReport {
    /// The negligible subspace equals the radical of the st-form.
    pub negligible_is_st_radical: bool,
    pub robust: bool,
    pub st_nondegenerate: bool,
    /// The certificate basis diagonalizes the st-form as well.
    pub certificate_diagonalizes_st: Option<bool>,
    /// The certificate basis diagonalizes the family, checked after the enlarged family.
    pub enlarged_implies_family: Option<bool>,
}

/// Replays the four assertions on `f`. A certificate, if given, must be over ℚ(t)
/// with a t-free basis.
pub fn check_standard_part(f: &HyperFamily, certificate: Option<&OrthoCertificate>) -> Result<StandardPartReport, HyperError> {
    let st = st_form(f)?;
    let negligible = negligible_subspace(f)?;
    let robust = negligible.is_zero();
    let st_nondegenerate = st.is_nondegenerate();
    let mut report = StandardPartReport {
        negligible_is_st_radical: negligible == st.radical(),
        robust,
        st_nondegenerate,
        certificate_diagonalizes_st: None,
        enlarged_implies_family: None,
    };
    if let Some(cert) = certificate {
        let family = FormFamily::new(vec![f.form.clone()]).unwrap();
        cert.verify(&family)?;
        let constant = cert
            .basis
            .try_map(Field::Rationals, |s| s.as_ratfunc().and_then(RatFunc::as_constant).map(Scalar::Rational).ok_or(()))
            .map_err(|_| HyperError::CertificateNotConstant)?;
        let st_diag = st.congruent(&constant).gram().is_diagonal();
        report.certificate_diagonalizes_st = Some(st_diag);
        report.enlarged_implies_family = Some(st_diag && f.form.congruent(&cert.basis).gram().is_diagonal());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    const QT: Field = Field::RationalFunctions;

    fn r(s: &str) -> RatFunc {
        QT.parse(s).unwrap().as_ratfunc().unwrap().clone()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn family(rows: &[&[&str]]) -> HyperFamily {
        let data = rows.iter().map(|row| row.iter().map(|s| QT.parse(s).unwrap()).collect()).collect();
        HyperFamily::new(BilinearForm::new(Matrix::from_rows(QT, data).unwrap()).unwrap()).unwrap()
    }

    fn rat_matrix(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(Field::Rationals, rows)
    }

    #[test]
    fn classify_examples() {
        let c = hyper_classify(&r("1/t"));
        assert!(c.infinitesimal && c.finite);
        assert_eq!(c.st, Some(q(0, 1)));
        let c = hyper_classify(&r("(2*t+1)/t"));
        assert!(c.finite && !c.infinitesimal);
        assert_eq!(c.st, Some(q(2, 1)));
        assert_eq!(hyper_classify(&r("t^2")).st, None);
        assert_eq!(compare(&r("1/t"), &r("0")), Ordering::Greater);
        assert_eq!(compare(&r("1000"), &r("t")), Ordering::Less);
        assert_eq!(sign(&r("-1/(t+1)")), Ordering::Less);
    }

    #[test]
    fn bounded_examples() {
        assert!(is_bounded_family(&family(&[&["1", "0"], &["0", "1/t"]])));
        assert!(!is_bounded_family(&family(&[&["t", "0"], &["0", "1"]])));
        assert!(is_bounded_family(&family(&[&["1", "(t+1)/t"], &["(t+1)/t", "3"]])));
    }

    #[test]
    fn st_form_examples() {
        assert_eq!(st_form(&family(&[&["1", "0"], &["0", "1/t"]])).unwrap().gram(), &rat_matrix(&[&[1, 0], &[0, 0]]));
        let f = family(&[&["1", "(2*t+1)/t"], &["(2*t+1)/t", "1"]]);
        assert_eq!(st_form(&f).unwrap().gram(), &rat_matrix(&[&[1, 2], &[2, 1]]));
        assert_eq!(st_form(&family(&[&["t", "0"], &["0", "1"]])), Err(HyperError::UnboundedFamily(0, 0)));
    }

    #[test]
    fn negligible_examples() {
        let qf = Field::Rationals;
        let e2 = vec![qf.zero(), qf.one()];
        assert_eq!(negligible_subspace(&family(&[&["1", "0"], &["0", "1/t"]])).unwrap(), Subspace::span(qf, 2, &[e2]));
        assert!(negligible_subspace(&family(&[&["1", "0"], &["0", "1"]])).unwrap().is_zero());
        assert!(negligible_subspace(&family(&[&["1/t", "0"], &["0", "1/t"]])).unwrap().is_full());
    }

    #[test]
    fn standard_part_examples() {
        let f = family(&[&["1", "0"], &["0", "1/t"]]);
        let fam = FormFamily::new(vec![f.form().clone()]).unwrap();
        let cert = OrthoCertificate::from_basis(&fam, Matrix::identity(QT, 2)).unwrap();
        let rep = check_standard_part(&f, Some(&cert)).unwrap();
        assert!(rep.negligible_is_st_radical && !rep.robust && !rep.st_nondegenerate);
        assert_eq!(rep.certificate_diagonalizes_st, Some(true));
        assert_eq!(rep.enlarged_implies_family, Some(true));

        let f = family(&[&["0", "1"], &["1", "0"]]);
        let fam = FormFamily::new(vec![f.form().clone()]).unwrap();
        let b = Matrix::from_i64(QT, &[&[1, 1], &[1, -1]]);
        let cert = OrthoCertificate::from_basis(&fam, b).unwrap();
        let rep = check_standard_part(&f, Some(&cert)).unwrap();
        assert_eq!(st_form(&f).unwrap().gram(), &rat_matrix(&[&[0, 1], &[1, 0]]));
        assert_eq!(rep.certificate_diagonalizes_st, Some(true));

        let f = family(&[&["1", "1/t"], &["1/t", "1"]]);
        let rep = check_standard_part(&f, None).unwrap();
        assert!(rep.robust && rep.st_nondegenerate);
        assert_eq!(st_form(&f).unwrap().gram(), &rat_matrix(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn t_dependent_basis_is_flagged() {
        let f = family(&[&["1", "0"], &["0", "1"]]);
        let fam = FormFamily::new(vec![f.form().clone()]).unwrap();
        let t = QT.parse("t").unwrap();
        let b = Matrix::diagonal(QT, &[t, QT.one()]);
        let cert = OrthoCertificate::from_basis(&fam, b).unwrap();
        assert_eq!(check_standard_part(&f, Some(&cert)), Err(HyperError::CertificateNotConstant));
    }

    fn finite_ratfunc() -> impl Strategy<Value = RatFunc> {
        (prop::collection::vec(-5i64..6, 1..4), prop::collection::vec(-5i64..6, 0..3), 1i64..4).prop_map(|(num, mut den, lead)| {
            // Denominator degree ≥ numerator degree keeps the value finite.
            den.resize(num.len() - 1, 0);
            den.push(lead);
            RatFunc::new(QPoly::from_ints(&num), QPoly::from_ints(&den)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn standard_part_is_a_ring_morphism(x in finite_ratfunc(), y in finite_ratfunc()) {
            let sx = standard_part(&x).unwrap();
            let sy = standard_part(&y).unwrap();
            prop_assert_eq!(standard_part(&x.add(&y)), Some(&sx + &sy));
            prop_assert_eq!(standard_part(&x.mul(&y)), Some(&sx * &sy));
        }
    }
}
