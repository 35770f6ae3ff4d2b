//! Exhaustive ground truth over small prime fields, and a stratified random corpus.
//!
//! The search uses raw `u64` residue arithmetic and shares no code with the
//! pipeline beyond reading Gram entries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::family::FormFamily;
use crate::field::{Field, Scalar};
use crate::forms::BilinearForm;
use crate::io::{family_file, FamilyFile, ParsedFamily};
use crate::linalg::Matrix;

/// Largest `p^(n²)` the oracle will enumerate.
pub const ORACLE_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// The first diagonalizer in enumeration order; its columns are the basis.
    Basis(Matrix),
    Nonexistent,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("exhaustive search needs a prime field, got {0}")]
    UnsupportedField(Field),
    #[error("{p}^({n}²) candidate matrices exceed the budget")]
    OutOfBudget { p: u64, n: usize },
}

fn residue(s: &Scalar) -> u64 {
    match s {
        Scalar::Modular { value, .. } => *value,
        _ => unreachable!("prime field checked"),
    }
}

fn is_invertible(rows: &[Vec<u64>], p: u64) -> bool {
    let n = rows.len();
    let mut a = rows.to_vec();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r][c] != 0) else {
            return false;
        };
        a.swap(c, r);
        let inv = pow_mod(a[c][c], p - 2, p);
        let pivot = a[c].clone();
        for row in &mut a[c + 1..] {
            let f = row[c] * inv % p;
            if f != 0 {
                for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Whether `Pᵀ G P` is diagonal for every `G`, where `p_rows` are the rows of `P`.
fn diagonalizes(p_rows: &[Vec<u64>], grams: &[Vec<Vec<u64>>], p: u64) -> bool {
    let n = p_rows.len();
    let col = |j: usize| -> Vec<u64> { p_rows.iter().map(|r| r[j]).collect() };
    let cols: Vec<Vec<u64>> = (0..n).map(col).collect();
    grams.iter().all(|g| {
        let gc: Vec<Vec<u64>> = cols
            .iter()
            .map(|c| (0..n).map(|i| (0..n).fold(0, |acc, k| (acc + g[i][k] * c[k]) % p)).collect())
            .collect();
        (0..n).all(|j| (j + 1..n).all(|k| (0..n).fold(0, |acc, i| (acc + cols[j][i] * gc[k][i]) % p) == 0))
    })
}

/// Row number `idx` of length `n`: entry `j` is digit `j` of `idx` in base `p`.
fn decode_row(mut idx: u64, n: usize, p: u64) -> Vec<u64> {
    (0..n)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

/// Searches `GL(n, p)` in row-lexicographic order, row 0 most significant and each
/// row read as a base-`p` number with column 0 least significant, so the identity
/// is the first invertible matrix.
pub fn oracle_so(family: &FormFamily) -> Result<OracleOutcome, OracleError> {
    let field = family.field();
    let Field::Prime(modulus) = field else {
        return Err(OracleError::UnsupportedField(field));
    };
    let p = modulus.get();
    let n = family.dim();
    let too_big = OracleError::OutOfBudget { p, n };
    let per_row = p.checked_pow(n as u32).ok_or(too_big.clone())?;
    let total = per_row.checked_pow(n as u32).ok_or(too_big.clone())?;
    if total > ORACLE_BUDGET {
        return Err(too_big);
    }
    if n == 0 {
        return Ok(OracleOutcome::Basis(Matrix::identity(field, 0)));
    }
    let grams: Vec<Vec<Vec<u64>>> = family
        .members()
        .iter()
        .map(|m| (0..n).map(|i| m.gram().row(i).iter().map(residue).collect()).collect())
        .collect();
    let rest = per_row.pow(n as u32 - 1);
    let found = (1..per_row).into_par_iter().find_map_first(|first| {
        let mut rows = vec![decode_row(first, n, p)];
        (0..rest).find_map(|tail| {
            rows.truncate(1);
            let mut t = tail;
            for _ in 1..n {
                rows.push(decode_row(t % per_row, n, p));
                t /= per_row;
            }
            // `tail` counts with row 1 least significant; reverse to keep row order.
            rows[1..].reverse();
            (is_invertible(&rows, p) && diagonalizes(&rows, &grams, p)).then(|| rows.clone())
        })
    });
    Ok(match found {
        Some(rows) => {
            let data = rows.into_iter().flatten().map(|v| field.from_i64(v as i64)).collect();
            OracleOutcome::Basis(Matrix::new(field, n, n, data).unwrap())
        }
        None => OracleOutcome::Nonexistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    /// `PᵀD_iP` with diagonal `D_i`; over a finite field one member covers the joint support.
    KnownOrthogonalizable,
    NondegenerateMember,
    /// A shared radical line, which is the whole radical of one member.
    CommonRadical,
    IncomparableRadicals,
    /// Nonzero alternating forms over GF(2) in dimension 2 or 4.
    Char2Alternating,
    Unconstrained,
}

impl Stratum {
    pub const ALL: [Stratum; 6] = [
        Stratum::KnownOrthogonalizable,
        Stratum::NondegenerateMember,
        Stratum::CommonRadical,
        Stratum::IncomparableRadicals,
        Stratum::Char2Alternating,
        Stratum::Unconstrained,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stratum::KnownOrthogonalizable => "known-orthogonalizable",
            Stratum::NondegenerateMember => "nondegenerate-member",
            Stratum::CommonRadical => "common-radical",
            Stratum::IncomparableRadicals => "incomparable-radicals",
            Stratum::Char2Alternating => "char2-alternating",
            Stratum::Unconstrained => "unconstrained",
        }
    }

    pub fn from_name(s: &str) -> Option<Stratum> {
        Stratum::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub stratum: Stratum,
    pub family: FamilyFile,
}

const CORPUS_PRIMES: [u64; 4] = [2, 3, 5, 7];
const MAX_DIM: usize = 5;
const MAX_MEMBERS: usize = 4;

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn field(&mut self) -> Field {
        match self.rng.gen_range(0..=CORPUS_PRIMES.len()) {
            0 => Field::Rationals,
            k => Field::prime(CORPUS_PRIMES[k - 1]).unwrap(),
        }
    }

    fn scalar(&mut self, f: Field) -> Scalar {
        match f {
            Field::Prime(p) => f.from_i64(self.rng.gen_range(0..p.get()) as i64),
            _ => {
                let v = f.from_i64(self.rng.gen_range(-3..=3));
                if self.rng.gen_bool(0.2) {
                    &v / &f.from_i64(self.rng.gen_range(2..=3))
                } else {
                    v
                }
            }
        }
    }

    fn nonzero(&mut self, f: Field) -> Scalar {
        loop {
            let s = self.scalar(f);
            if !s.is_zero() {
                return s;
            }
        }
    }

    fn symmetric(&mut self, f: Field, n: usize, alternating: bool) -> Matrix {
        let mut g = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in i..n {
                if i == j && alternating {
                    continue;
                }
                let v = self.scalar(f);
                g.set(i, j, v.clone());
                g.set(j, i, v);
            }
        }
        g
    }

    fn invertible(&mut self, f: Field, n: usize) -> Matrix {
        loop {
            let m = Matrix::from_fn(f, n, n, |_, _| self.scalar(f));
            if !m.det().is_zero() {
                return m;
            }
        }
    }

    fn congruent(p: &Matrix, d: &Matrix) -> BilinearForm {
        BilinearForm::new(p.transpose().matmul(d).matmul(p)).unwrap()
    }

    fn members(&mut self) -> usize {
        self.rng.gen_range(1..=MAX_MEMBERS)
    }

    fn family(&mut self, stratum: Stratum) -> FormFamily {
        let forms = match stratum {
            Stratum::KnownOrthogonalizable => {
                let f = self.field();
                let n = self.rng.gen_range(1..=MAX_DIM);
                let m = self.members();
                let p = self.invertible(f, n);
                let mut diags: Vec<Vec<Scalar>> = (0..m).map(|_| (0..n).map(|_| self.scalar(f)).collect()).collect();
                if f.order().is_some() {
                    // A finite field may admit no nondegenerate combination; make one member cover the support.
                    let k = self.rng.gen_range(0..m);
                    for j in 0..n {
                        if diags.iter().any(|d| !d[j].is_zero()) && diags[k][j].is_zero() {
                            diags[k][j] = self.nonzero(f);
                        }
                    }
                }
                diags.iter().map(|d| Self::congruent(&p, &Matrix::diagonal(f, d))).collect()
            }
            Stratum::NondegenerateMember => {
                let f = self.field();
                let n = self.rng.gen_range(1..=MAX_DIM);
                let m = self.members();
                let k = self.rng.gen_range(0..m);
                (0..m)
                    .map(|i| loop {
                        let g = BilinearForm::new(self.symmetric(f, n, false)).unwrap();
                        if i != k || g.is_nondegenerate() {
                            break g;
                        }
                    })
                    .collect()
            }
            Stratum::CommonRadical => {
                let f = self.field();
                let n = self.rng.gen_range(2..=MAX_DIM);
                let m = self.members();
                let p = self.invertible(f, n);
                let k = self.rng.gen_range(0..m);
                (0..m)
                    .map(|i| loop {
                        let mut g = self.symmetric(f, n, false);
                        for i in 0..n {
                            g.set(n - 1, i, f.zero());
                            g.set(i, n - 1, f.zero());
                        }
                        // Member k has exactly the common radical.
                        if i != k || g.rank() == n - 1 {
                            break Self::congruent(&p, &g);
                        }
                    })
                    .collect()
            }
            Stratum::IncomparableRadicals => {
                let f = self.field();
                let n = self.rng.gen_range(2..=MAX_DIM);
                let p = self.invertible(f, n);
                let mut forms: Vec<BilinearForm> = (0..2)
                    .map(|k| {
                        let d: Vec<Scalar> = (0..n).map(|j| if j == k { f.zero() } else { self.nonzero(f) }).collect();
                        Self::congruent(&p, &Matrix::diagonal(f, &d))
                    })
                    .collect();
                if self.rng.gen_bool(0.5) {
                    forms.push(BilinearForm::new(self.symmetric(f, n, false)).unwrap());
                }
                forms.shuffle(&mut self.rng);
                forms
            }
            Stratum::Char2Alternating => {
                let f = Field::prime(2).unwrap();
                let n = if self.rng.gen_bool(0.5) { 2 } else { 4 };
                let m = self.members();
                let p = self.invertible(f, n);
                let h = Matrix::from_fn(f, n, n, |i, j| f.from_i64((i / 2 == j / 2 && i != j) as i64));
                let mut forms = vec![Self::congruent(&p, &h)];
                forms.extend((1..m).map(|_| BilinearForm::new(self.symmetric(f, n, true)).unwrap()));
                forms
            }
            Stratum::Unconstrained => {
                let f = self.field();
                let n = self.rng.gen_range(1..=MAX_DIM);
                let m = self.members();
                (0..m).map(|_| BilinearForm::new(self.symmetric(f, n, false)).unwrap()).collect()
            }
        };
        FormFamily::new(forms).expect("generated members share field and dimension")
    }
}

/// `count` families cycling through every stratum.
pub fn generate_corpus(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    (0..count)
        .map(|k| {
            let stratum = Stratum::ALL[k % Stratum::ALL.len()];
            entry(stratum, g.family(stratum))
        })
        .collect()
}

pub fn generate_stratum(seed: u64, stratum: Stratum, count: usize) -> Vec<CorpusEntry> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    (0..count).map(|_| entry(stratum, g.family(stratum))).collect()
}

fn entry(stratum: Stratum, family: FormFamily) -> CorpusEntry {
    CorpusEntry {
        stratum,
        family: family_file(&ParsedFamily::Finite(family)),
    }
}
