//! Python bindings. Scalars cross the boundary as canonical strings, matrices as
//! lists of rows, subspaces as lists of basis vectors.

use orthoform::family::{family_radical, nondegenerate_combination};
use orthoform::field::Field;
use orthoform::hyperreal::{hyper_classify, negligible_subspace, st_form};
use orthoform::io::{
    matrix_strings, parse_certificate, parse_family, serialize_certificate, serialize_family, to_pretty, vector_strings, verdict_file,
    FieldDescriptor, ParsedFamily,
};
use orthoform::linalg::{Matrix, Subspace};
use orthoform::oracle::{generate_corpus, oracle_so, OracleOutcome};
use orthoform::pipeline::{check_so_with_budget, OrthoCertificate, Verdict, DEFAULT_BUDGET};
use orthoform::ultrafilter::{double_bracket, pathological_subspace};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn basis_vectors(s: &Subspace) -> Vec<Vec<String>> {
    s.basis().iter().map(|v| vector_strings(v)).collect()
}

fn rows(m: &Matrix) -> Vec<Vec<String>> {
    matrix_strings(m)
}

/// A family of symmetric bilinear forms (finite, stable-tail or hyper mode).
#[pyclass(frozen, module = "orthoform")]
struct Family {
    inner: ParsedFamily,
}

#[pymethods]
impl Family {
    /// `field` is `"Q"`, `"Qt"` or `"GF"` (with `p`); `forms` are Gram matrices of scalar strings.
    #[new]
    #[pyo3(signature = (field, forms, p=None))]
    fn new(field: String, forms: Vec<Vec<Vec<String>>>, p: Option<u64>) -> PyResult<Self> {
        let dim = forms.first().map_or(0, Vec::len);
        let file = orthoform::io::FamilyFile {
            schema: orthoform::io::SCHEMA,
            field: FieldDescriptor { kind: field, p },
            dim,
            mode: Default::default(),
            forms,
            tail: None,
        };
        Family::from_json(&to_pretty(&file))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_family(text).map(|inner| Family { inner }).map_err(value_error)
    }

    fn to_json(&self) -> String {
        serialize_family(&self.inner)
    }

    #[getter]
    fn field(&self) -> String {
        self.inner.field().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.as_finite().dim()
    }

    fn __len__(&self) -> usize {
        self.inner.as_finite().len()
    }

    fn __repr__(&self) -> String {
        let f = self.inner.as_finite();
        format!("Family({} forms on {}^{})", f.len(), f.field(), f.dim())
    }

    /// Basis of the intersection of the member radicals.
    fn radical(&self) -> Vec<Vec<String>> {
        basis_vectors(&family_radical(&self.inner.as_finite()))
    }

    fn member_radical(&self, index: usize) -> PyResult<Vec<Vec<String>>> {
        let f = self.inner.as_finite();
        let m = f.members().get(index).ok_or_else(|| value_error(format!("member {index} out of range")))?;
        Ok(basis_vectors(&m.radical()))
    }

    /// Coefficients of a combination nondegenerate modulo the family radical, if found.
    #[pyo3(signature = (budget=DEFAULT_BUDGET))]
    fn nondegenerate_combination(&self, budget: u64) -> Option<Vec<String>> {
        nondegenerate_combination(&self.inner.as_finite(), budget).ok().map(|c| vector_strings(&c))
    }

    fn double_bracket(&self) -> Vec<Vec<String>> {
        rows(double_bracket(&self.inner.as_stable_tail()).gram())
    }

    fn pathological_subspace(&self) -> Vec<Vec<String>> {
        basis_vectors(&pathological_subspace(&self.inner.as_stable_tail()))
    }

    fn st_form(&self) -> PyResult<Vec<Vec<String>>> {
        match &self.inner {
            ParsedFamily::Hyper(h) => st_form(h).map(|f| rows(f.gram())).map_err(value_error),
            _ => Err(value_error("st_form needs a hyper-mode family")),
        }
    }

    fn negligible_subspace(&self) -> PyResult<Vec<Vec<String>>> {
        match &self.inner {
            ParsedFamily::Hyper(h) => negligible_subspace(h).map(|s| basis_vectors(&s)).map_err(value_error),
            _ => Err(value_error("negligible_subspace needs a hyper-mode family")),
        }
    }
}

/// A simultaneous orthogonalization: the columns of `basis` diagonalize every member.
#[pyclass(frozen, module = "orthoform")]
struct Certificate {
    inner: OrthoCertificate,
}

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_json(text: &str, family: &Family) -> PyResult<Self> {
        let f = family.inner.as_finite();
        parse_certificate(text, f.field(), f.dim(), f.len())
            .map(|inner| Certificate { inner })
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        serialize_certificate(&self.inner)
    }

    #[getter]
    fn basis(&self) -> Vec<Vec<String>> {
        rows(&self.inner.basis)
    }

    #[getter]
    fn diagonals(&self) -> Vec<Vec<String>> {
        self.inner.diagonals.iter().map(|d| vector_strings(d)).collect()
    }

    #[getter]
    fn radical_tail(&self) -> usize {
        self.inner.radical_tail
    }

    /// `None` if the certificate checks out against `family`, else the violation.
    fn violation(&self, family: &Family) -> Option<String> {
        self.inner.verify(&family.inner.as_finite()).err().map(|v| v.to_string())
    }

    fn verify(&self, family: &Family) -> bool {
        self.violation(family).is_none()
    }
}

#[pyclass(frozen, module = "orthoform")]
struct CheckResult {
    verdict: Verdict,
}

#[pymethods]
impl CheckResult {
    /// `"certificate"`, `"not_simultaneously_orthogonalizable"` or `"indeterminate"`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.verdict {
            Verdict::Certificate(_) => "certificate",
            Verdict::NotSimultaneouslyOrthogonalizable(_) => "not_simultaneously_orthogonalizable",
            Verdict::Indeterminate(_) => "indeterminate",
        }
    }

    #[getter]
    fn certificate(&self) -> Option<Certificate> {
        match &self.verdict {
            Verdict::Certificate(c) => Some(Certificate { inner: c.clone() }),
            _ => None,
        }
    }

    #[getter]
    fn detail(&self) -> Option<String> {
        match &self.verdict {
            Verdict::Certificate(_) => None,
            Verdict::NotSimultaneouslyOrthogonalizable(o) => Some(o.to_string()),
            Verdict::Indeterminate(r) => Some(r.to_string()),
        }
    }

    fn to_json(&self) -> String {
        to_pretty(&verdict_file(&self.verdict))
    }

    fn __repr__(&self) -> String {
        format!("CheckResult({})", self.kind())
    }
}

#[pyfunction]
#[pyo3(signature = (family, budget=DEFAULT_BUDGET))]
fn check_so(family: &Family, budget: u64) -> CheckResult {
    CheckResult {
        verdict: check_so_with_budget(&family.inner.as_finite(), budget),
    }
}

/// First diagonalizing basis (as rows of the change-of-basis matrix) over GF(p), or `None`.
#[pyfunction(name = "oracle_so")]
fn oracle(family: &Family) -> PyResult<Option<Vec<Vec<String>>>> {
    match oracle_so(&family.inner.as_finite()).map_err(value_error)? {
        OracleOutcome::Basis(b) => Ok(Some(rows(&b))),
        OracleOutcome::Nonexistent => Ok(None),
    }
}

/// `(finite, infinitesimal, standard_part)` of an element of Q(t) at +∞.
#[pyfunction(name = "hyper_classify")]
fn classify(value: &str) -> PyResult<(bool, bool, Option<String>)> {
    let s = Field::RationalFunctions.parse(value).map_err(value_error)?;
    let c = hyper_classify(s.as_ratfunc().expect("parsed over Q(t)"));
    Ok((c.finite, c.infinitesimal, c.st.map(|q| q.to_string())))
}

/// `(stratum, family_json)` pairs.
#[pyfunction(name = "generate_corpus")]
fn corpus(seed: u64, count: usize) -> Vec<(String, String)> {
    generate_corpus(seed, count)
        .into_iter()
        .map(|e| (e.stratum.name().to_string(), to_pretty(&e.family)))
        .collect()
}

/// Exact simultaneous orthogonalization of symmetric bilinear forms.
#[pymodule(name = "orthoform")]
fn orthoform_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Family>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<CheckResult>()?;
    m.add_function(wrap_pyfunction!(check_so, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(corpus, m)?)?;
    Ok(())
}
