//! JSON exchange format for families, certificates and verdicts.
//!
//! Scalars are always JSON strings in canonical form, so equal values serialize to
//! identical bytes. Struct fields serialize in declaration order.

use serde::{Deserialize, Serialize};

use crate::family::FormFamily;
use crate::field::{Field, ParseScalarError, Scalar};
use crate::forms::BilinearForm;
use crate::hyperreal::HyperFamily;
use crate::linalg::{Matrix, Subspace};
use crate::operators::RootDatum;
use crate::pipeline::{BaseChoice, CertificateViolation, Obstruction, OrthoCertificate, Verdict};
use crate::ultrafilter::StableTailFamily;

pub const SCHEMA: u32 = 1;

pub type StringMatrix = Vec<Vec<String>>;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON at {line}:{column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path} at {line}:{column}: {source}")]
    Scalar {
        path: String,
        line: usize,
        column: usize,
        source: ParseScalarError,
    },
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Invalid(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Finite,
    StableTail,
    Hyper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

impl FieldDescriptor {
    pub fn of(field: Field) -> Self {
        match field {
            Field::Rationals => FieldDescriptor { kind: "Q".into(), p: None },
            Field::Prime(p) => FieldDescriptor {
                kind: "GF".into(),
                p: Some(p.get()),
            },
            Field::RationalFunctions => FieldDescriptor { kind: "Qt".into(), p: None },
        }
    }

    pub fn to_field(&self) -> Result<Field, IoError> {
        match (self.kind.as_str(), self.p) {
            ("Q", None) => Ok(Field::Rationals),
            ("Qt", None) => Ok(Field::RationalFunctions),
            ("GF", Some(p)) => Field::prime(p).map_err(|e| IoError::Invalid(format!("field: {e}"))),
            ("GF", None) => invalid("field: GF requires \"p\""),
            ("Q" | "Qt", Some(_)) => invalid("field: \"p\" is only allowed with GF"),
            (k, _) => invalid(format!("field: unknown kind {k:?}")),
        }
    }
}

/// On-disk family description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub schema: u32,
    pub field: FieldDescriptor,
    pub dim: usize,
    #[serde(default)]
    pub mode: Mode,
    pub forms: Vec<StringMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<StringMatrix>,
}

/// A family file resolved into library types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParsedFamily {
    Finite(FormFamily),
    StableTail(StableTailFamily),
    Hyper(HyperFamily),
}

impl ParsedFamily {
    pub fn field(&self) -> Field {
        match self {
            ParsedFamily::Finite(f) => f.field(),
            ParsedFamily::StableTail(f) => f.field(),
            ParsedFamily::Hyper(f) => f.form().field(),
        }
    }

    /// The members as a finite family; a stable tail contributes one copy of the tail.
    pub fn as_finite(&self) -> FormFamily {
        match self {
            ParsedFamily::Finite(f) => f.clone(),
            ParsedFamily::StableTail(f) => f.finite_members(),
            ParsedFamily::Hyper(f) => FormFamily::new(vec![f.form().clone()]).unwrap(),
        }
    }

    /// The finite-index reading for ultrafilter operations.
    pub fn as_stable_tail(&self) -> StableTailFamily {
        match self {
            ParsedFamily::StableTail(f) => f.clone(),
            other => StableTailFamily::from_finite(&other.as_finite()),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses scalars, locating failures in `text` by the first occurrence of the literal.
struct ScalarReader<'a> {
    field: Field,
    text: &'a str,
}

impl ScalarReader<'_> {
    fn scalar(&self, s: &str, path: &str) -> Result<Scalar, IoError> {
        self.field.parse(s).map_err(|source| {
            let needle = serde_json::to_string(s).unwrap();
            let (line, column) = match self.text.find(&needle) {
                Some(off) => line_column(self.text, off),
                None => (1, 1),
            };
            IoError::Scalar {
                path: path.to_string(),
                line,
                column,
                source,
            }
        })
    }

    fn vector(&self, v: &[String], len: usize, path: &str) -> Result<Vec<Scalar>, IoError> {
        if v.len() != len {
            return invalid(format!("{path}: expected {len} entries, found {}", v.len()));
        }
        v.iter().enumerate().map(|(i, s)| self.scalar(s, &format!("{path}[{i}]"))).collect()
    }

    fn matrix(&self, m: &StringMatrix, rows: usize, cols: Option<usize>, path: &str) -> Result<Matrix, IoError> {
        if m.len() != rows {
            return invalid(format!("{path}: expected {rows} rows, found {}", m.len()));
        }
        let cols = cols.unwrap_or_else(|| m.first().map_or(0, Vec::len));
        let data = m
            .iter()
            .enumerate()
            .map(|(i, row)| self.vector(row, cols, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::new(self.field, rows, cols, data.into_iter().flatten().collect()).expect("shape checked"))
    }

    fn form(&self, m: &StringMatrix, dim: usize, path: &str) -> Result<BilinearForm, IoError> {
        let g = self.matrix(m, dim, Some(dim), path)?;
        BilinearForm::new(g).map_err(|e| IoError::Invalid(format!("{path}: {e}")))
    }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_family(text: &str) -> Result<ParsedFamily, IoError> {
    let file: FamilyFile = from_json(text)?;
    if file.schema != SCHEMA {
        return invalid(format!("schema: unsupported version {}", file.schema));
    }
    let field = file.field.to_field()?;
    let reader = ScalarReader { field, text };
    let forms = file
        .forms
        .iter()
        .enumerate()
        .map(|(i, m)| reader.form(m, file.dim, &format!("forms[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let family_err = |e| IoError::Invalid(format!("forms: {e}"));
    match file.mode {
        Mode::Finite => {
            if file.tail.is_some() {
                return invalid("tail: only allowed with mode \"stable_tail\"");
            }
            Ok(ParsedFamily::Finite(FormFamily::new(forms).map_err(family_err)?))
        }
        Mode::StableTail => {
            let Some(tail) = &file.tail else {
                return invalid("tail: required with mode \"stable_tail\"");
            };
            let tail = reader.form(tail, file.dim, "tail")?;
            Ok(ParsedFamily::StableTail(StableTailFamily::new(forms, tail).map_err(family_err)?))
        }
        Mode::Hyper => {
            if file.tail.is_some() {
                return invalid("tail: only allowed with mode \"stable_tail\"");
            }
            let [form] = <[BilinearForm; 1]>::try_from(forms).map_err(|_| IoError::Invalid("forms: hyper mode takes exactly one Gram matrix".into()))?;
            HyperFamily::new(form).map(ParsedFamily::Hyper).map_err(|e| IoError::Invalid(format!("forms[0]: {e}")))
        }
    }
}

pub fn vector_strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

pub fn matrix_strings(m: &Matrix) -> StringMatrix {
    (0..m.rows()).map(|i| vector_strings(m.row(i))).collect()
}

/// Basis vectors as the columns of an `n × dim` matrix.
pub fn subspace_strings(s: &Subspace) -> StringMatrix {
    matrix_strings(&s.basis_matrix())
}

pub fn family_file(f: &ParsedFamily) -> FamilyFile {
    let field = FieldDescriptor::of(f.field());
    let forms = |ms: &[BilinearForm]| ms.iter().map(|m| matrix_strings(m.gram())).collect();
    match f {
        ParsedFamily::Finite(fam) => FamilyFile {
            schema: SCHEMA,
            field,
            dim: fam.dim(),
            mode: Mode::Finite,
            forms: forms(fam.members()),
            tail: None,
        },
        ParsedFamily::StableTail(st) => FamilyFile {
            schema: SCHEMA,
            field,
            dim: st.dim(),
            mode: Mode::StableTail,
            forms: forms(st.prefix()),
            tail: Some(matrix_strings(st.tail().gram())),
        },
        ParsedFamily::Hyper(h) => FamilyFile {
            schema: SCHEMA,
            field,
            dim: h.dim(),
            mode: Mode::Hyper,
            forms: vec![matrix_strings(h.gram_t())],
            tail: None,
        },
    }
}

pub fn serialize_family(f: &ParsedFamily) -> String {
    to_pretty(&family_file(f))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootFile {
    pub values: Vec<String>,
    pub basis: StringMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseFile {
    Member(usize),
    Combination(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub basis: StringMatrix,
    pub diagonals: Vec<Vec<String>>,
    pub roots: Vec<RootFile>,
    pub scalars: Vec<Vec<String>>,
    pub radical_tail: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combination: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseFile>,
}

pub fn certificate_file(c: &OrthoCertificate) -> CertificateFile {
    CertificateFile {
        basis: matrix_strings(&c.basis),
        diagonals: c.diagonals.iter().map(|d| vector_strings(d)).collect(),
        roots: c
            .roots
            .iter()
            .map(|r| RootFile {
                values: vector_strings(&r.values),
                basis: subspace_strings(&r.space),
            })
            .collect(),
        scalars: c.scalars.iter().map(|s| vector_strings(s)).collect(),
        radical_tail: c.radical_tail,
        combination: c.combination().map(vector_strings),
        base: c.base.as_ref().map(|b| match b {
            BaseChoice::Member(i) => BaseFile::Member(*i),
            BaseChoice::Combination(v) => BaseFile::Combination(vector_strings(v)),
        }),
    }
}

pub fn serialize_certificate(c: &OrthoCertificate) -> String {
    to_pretty(&certificate_file(c))
}

/// Reads a certificate for a family of `members` forms on `field^dim`. Consistency
/// with a family is left to [`OrthoCertificate::verify`].
pub fn parse_certificate(text: &str, field: Field, dim: usize, members: usize) -> Result<OrthoCertificate, IoError> {
    let file: CertificateFile = from_json(text)?;
    let reader = ScalarReader { field, text };
    let basis = reader.matrix(&file.basis, dim, Some(dim), "basis")?;
    let diagonals = file
        .diagonals
        .iter()
        .enumerate()
        .map(|(i, d)| reader.vector(d, dim, &format!("diagonals[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let roots = file
        .roots
        .iter()
        .enumerate()
        .map(|(a, r)| {
            let values = r
                .values
                .iter()
                .enumerate()
                .map(|(j, s)| reader.scalar(s, &format!("roots[{a}].values[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let b = reader.matrix(&r.basis, dim, None, &format!("roots[{a}].basis"))?;
            let space = Subspace::column_space(&b);
            if space.dim() != b.cols() {
                return invalid(format!("roots[{a}].basis: columns are dependent"));
            }
            Ok(RootDatum { values, space })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let scalars = file
        .scalars
        .iter()
        .enumerate()
        .map(|(i, s)| reader.vector(s, roots.len(), &format!("scalars[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let combination = file
        .combination
        .as_ref()
        .map(|c| reader.vector(c, members, "combination"))
        .transpose()?;
    let base = match (&file.base, combination) {
        (Some(BaseFile::Member(i)), None) => Some(BaseChoice::Member(*i)),
        (Some(BaseFile::Member(_)), Some(_)) => return invalid("combination: conflicts with base member"),
        (Some(BaseFile::Combination(v)), c) => {
            let v = reader.vector(v, members, "base.combination")?;
            if c.is_some_and(|c| c != v) {
                return invalid("combination: disagrees with base");
            }
            Some(BaseChoice::Combination(v))
        }
        (None, c) => c.map(BaseChoice::Combination),
    };
    Ok(OrthoCertificate {
        basis,
        diagonals,
        roots,
        scalars,
        radical_tail: file.radical_tail,
        base,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstructionFile {
    NotDiagonalizable { operator: usize, piece: StringMatrix, reason: String },
    Alternating { root: Vec<String>, pair: [Vec<String>; 2] },
    IdenticallySingular,
}

pub fn obstruction_file(o: &Obstruction) -> ObstructionFile {
    match o {
        Obstruction::NotDiagonalizable { operator, piece, reason } => ObstructionFile::NotDiagonalizable {
            operator: *operator,
            piece: subspace_strings(piece),
            reason: reason.to_string(),
        },
        Obstruction::Alternating { root, pair } => ObstructionFile::Alternating {
            root: vector_strings(root),
            pair: [vector_strings(&pair.0), vector_strings(&pair.1)],
        },
        Obstruction::IdenticallySingular => ObstructionFile::IdenticallySingular,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerdictFile {
    Certificate { certificate: CertificateFile },
    NotSimultaneouslyOrthogonalizable { obstruction: ObstructionFile },
    Indeterminate { reason: String },
}

pub fn verdict_file(v: &Verdict) -> VerdictFile {
    match v {
        Verdict::Certificate(c) => VerdictFile::Certificate {
            certificate: certificate_file(c),
        },
        Verdict::NotSimultaneouslyOrthogonalizable(o) => VerdictFile::NotSimultaneouslyOrthogonalizable {
            obstruction: obstruction_file(o),
        },
        Verdict::Indeterminate(r) => VerdictFile::Indeterminate { reason: r.to_string() },
    }
}

/// A rejected certificate; off-diagonal violations carry the offending entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationFile {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

pub fn violation_file(v: &CertificateViolation) -> ViolationFile {
    let (kind, form, entry, value) = match v {
        CertificateViolation::Shape { .. } => ("shape", None, None, None),
        CertificateViolation::FieldMismatch { .. } => ("field_mismatch", None, None, None),
        CertificateViolation::Singular => ("singular", None, None, None),
        CertificateViolation::DiagonalCount { .. } => ("diagonal_count", None, None, None),
        CertificateViolation::OffDiagonal { form, row, col, value } => {
            ("off_diagonal", Some(*form), Some((*row, *col)), Some(value.to_string()))
        }
        CertificateViolation::DiagonalMismatch { form, index, actual, .. } => {
            ("diagonal_mismatch", Some(*form), Some((*index, *index)), Some(actual.to_string()))
        }
        CertificateViolation::TailTooLong(_) => ("tail_too_long", None, None, None),
        CertificateViolation::TailNotRadical(_) => ("tail_not_radical", None, None, None),
        CertificateViolation::Roots(_) => ("roots", None, None, None),
    };
    ViolationFile {
        kind,
        message: v.to_string(),
        form,
        entry,
        value,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::pipeline::check_so;

    const FAMILY: &str = r#"{
  "schema": 1,
  "field": {"kind": "Q"},
  "dim": 2,
  "forms": [[["1", "0"], ["0", "0"]], [["0", "0"], ["0", "1/2"]]]
}"#;

    #[test]
    fn parses_finite_family() {
        let ParsedFamily::Finite(f) = parse_family(FAMILY).unwrap() else { panic!() };
        assert_eq!(f.len(), 2);
        assert_eq!(f.members()[1].gram().get(1, 1), &Field::Rationals.parse("1/2").unwrap());
    }

    #[test]
    fn scalar_error_is_located() {
        let bad = FAMILY.replace("1/2", "1/0");
        match parse_family(&bad) {
            Err(IoError::Scalar { path, line, column, .. }) => {
                assert_eq!(path, "forms[1][1][1]");
                assert_eq!((line, column), (5, 58));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_family("{"), Err(IoError::Json { .. })));
        assert!(matches!(parse_family(&FAMILY.replace("\"dim\": 2", "\"dim\": 3")), Err(IoError::Invalid(_))));
        assert!(matches!(parse_family(&FAMILY.replace("\"schema\": 1", "\"schema\": 2")), Err(IoError::Invalid(_))));
        let asym = FAMILY.replace(r#"[["1", "0"], ["0", "0"]]"#, r#"[["1", "1"], ["0", "0"]]"#);
        assert!(matches!(parse_family(&asym), Err(IoError::Invalid(_))));
        let gf4 = FAMILY.replace(r#"{"kind": "Q"}"#, r#"{"kind": "GF", "p": 4}"#);
        assert!(matches!(parse_family(&gf4), Err(IoError::Invalid(_))));
    }

    #[test]
    fn stable_tail_and_hyper_modes() {
        let st = r#"{"schema":1,"field":{"kind":"GF","p":3},"dim":1,"mode":"stable_tail","forms":[[["0"]]],"tail":[["2"]]}"#;
        let ParsedFamily::StableTail(f) = parse_family(st).unwrap() else { panic!() };
        assert_eq!(f.tail().gram().get(0, 0), &Field::prime(3).unwrap().from_i64(2));
        let h = r#"{"schema":1,"field":{"kind":"Qt"},"dim":2,"mode":"hyper","forms":[[["1","0"],["0","1/t"]]]}"#;
        let parsed = parse_family(h).unwrap();
        assert!(matches!(parsed, ParsedFamily::Hyper(_)));
        assert_eq!(parse_family(&serialize_family(&parsed)).unwrap(), parsed);
        let h_q = h.replace("Qt", "Q").replace("1/t", "0");
        assert!(parse_family(&h_q).is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let parsed = parse_family(FAMILY).unwrap();
        let f = parsed.as_finite();
        let Verdict::Certificate(c) = check_so(&f) else { panic!() };
        let text = serialize_certificate(&c);
        let back = parse_certificate(&text, f.field(), f.dim(), f.len()).unwrap();
        assert_eq!(back, c);
        back.verify(&f).unwrap();
        assert_eq!(serialize_certificate(&back), text);
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        prop_oneof![Just(Field::Rationals), Just(Field::prime(2).unwrap()), Just(Field::prime(7).unwrap())]
    }

    proptest! {
        #[test]
        fn family_round_trip(field in arb_field(), n in 1usize..4, m in 1usize..4, seed in prop::collection::vec(-9i64..10, 48)) {
            let mut it = seed.into_iter().cycle();
            let forms: Vec<BilinearForm> = (0..m)
                .map(|_| {
                    let mut g = Matrix::zeros(field, n, n);
                    for i in 0..n {
                        for j in i..n {
                            let v = field.from_i64(it.next().unwrap());
                            g.set(i, j, v.clone());
                            g.set(j, i, v);
                        }
                    }
                    BilinearForm::new(g).unwrap()
                })
                .collect();
            let parsed = ParsedFamily::Finite(FormFamily::new(forms).unwrap());
            let text = serialize_family(&parsed);
            prop_assert_eq!(parse_family(&text).unwrap(), parsed.clone());
            if let Verdict::Certificate(c) = check_so(&parsed.as_finite()) {
                let back = parse_certificate(&serialize_certificate(&c), field, n, m).unwrap();
                prop_assert_eq!(back, c);
            }
        }
    }
}
