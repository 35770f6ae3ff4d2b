use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::{Field, Scalar};

use super::LinalgError;

/// Above this modulus roots are found by gcd with `x^p − x` and splitting
/// instead of trying every residue.
const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

/// Univariate polynomial over a [`Field`], coefficients lowest degree first, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        assert!(coeffs.iter().all(|c| c.field() == field), "coefficient from another field");
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_i64(field: Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: Field) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(c.field(), vec![c])
    }

    pub fn x(field: Field) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    /// `x − c`.
    pub fn linear_root(field: Field, c: Scalar) -> Self {
        Self::new(field, vec![-c, field.one()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        assert_eq!(self.field, other.field);
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = self.field.zero();
        let coeffs = (0..n)
            .map(|i| f(self.coeffs.get(i).unwrap_or(&z), other.coeffs.get(i).unwrap_or(&z)))
            .collect();
        Self::new(self.field, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(self.field, out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert_eq!(self.field, divisor.field);
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv_lead = divisor.lead().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(self.field), self.clone());
        }
        let mut quot = vec![self.field.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv_lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(self.field, quot), Self::new(self.field, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &self.field.from_i64(i as i64))
            .collect();
        Self::new(self.field, coeffs)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Roots lying in the coefficient field with their multiplicities, ascending
    /// (numerically over ℚ, by residue over GF(p)).
    pub fn roots_in_field(&self) -> Result<Vec<(Scalar, usize)>, LinalgError> {
        if self.is_zero() {
            return Err(LinalgError::ZeroPolynomial);
        }
        let candidates = match self.field {
            Field::RationalFunctions => return Err(LinalgError::UnsupportedField(self.field)),
            Field::Rationals => rational_roots(self),
            Field::Prime(m) if m.get() <= EXHAUSTIVE_LIMIT => {
                (0..m.get()).map(|v| self.field.from_i64(v as i64)).filter(|x| self.eval(x).is_zero()).collect()
            }
            Field::Prime(m) => large_prime_roots(self, m.get()),
        };
        Ok(candidates
            .into_iter()
            .map(|r| {
                let mult = self.multiplicity(&r);
                (r, mult)
            })
            .collect())
    }

    fn multiplicity(&self, r: &Scalar) -> usize {
        let lin = Self::linear_root(self.field, r.clone());
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (q, rem) = f.div_rem(&lin);
            if !rem.is_zero() {
                return k;
            }
            f = q;
            k += 1;
        }
    }
}

fn rat(s: &Scalar) -> &BigRational {
    s.as_rational().expect("rational coefficient")
}

/// Number of sign changes of the Sturm chain at `x`.
fn sign_changes(chain: &[Poly], x: &Scalar) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = p.eval(x);
            let r = rat(&v);
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct rational roots, ascending.
fn rational_roots(f: &Poly) -> Vec<Scalar> {
    let q = Field::Rationals;
    let g = f.div_rem(&f.gcd(&f.derivative())).0;
    let d = g.degree().unwrap();
    if d == 0 {
        return Vec::new();
    }
    // Primitive integer form c_0..c_d of the square-free part.
    let lcm = g.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(rat(c).denom()));
    let ints: Vec<BigInt> = g.coeffs.iter().map(|c| (rat(c) * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let ints: Vec<BigInt> = ints.iter().map(|c| c / &content).collect();
    let a = ints[d].clone();
    // h(y) = a^{d−1} g(y/a) is monic with integer coefficients; its rational roots are integers.
    let h_ints: Vec<BigInt> = ints
        .iter()
        .enumerate()
        .map(|(i, c)| if i == d { BigInt::one() } else { c * a.pow((d - 1 - i) as u32) })
        .collect();
    let h = Poly::new(q, h_ints.iter().map(|c| Scalar::Rational(BigRational::from_integer(c.clone()))).collect());

    let mut chain = vec![h.clone(), h.derivative()];
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&q.from_i64(-1)));
    }

    let bound: BigInt = h_ints[..d].iter().map(|c| c.abs()).max().unwrap_or_default() + BigInt::one();
    let two_b: BigInt = &bound * 2 + 1;
    let half = |twice: &BigInt| Scalar::Rational(BigRational::new(twice.clone(), BigInt::from(2)));
    // Endpoints are stored doubled and odd, so they are never integer roots.
    let mut stack = vec![(-two_b.clone(), two_b)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&chain, &half(&lo)) - sign_changes(&chain, &half(&hi));
        if count == 0 {
            continue;
        }
        if &hi - &lo == BigInt::from(2) {
            let m: BigInt = (&lo + 1) / 2;
            let y = q.from_rational(&BigRational::from_integer(m.clone())).unwrap();
            if h.eval(&y).is_zero() {
                out.push(Scalar::Rational(BigRational::new(m, a.clone())));
            }
            continue;
        }
        // Midpoint rounded to an odd doubled value.
        let steps: BigInt = (&hi - &lo) / 2;
        let mid: BigInt = &lo + (&steps / 2) * 2;
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| rat(x).cmp(rat(y)));
    out
}

/// Distinct roots over a large prime field: split `gcd(f, x^p − x)` into linear factors.
fn large_prime_roots(f: &Poly, p: u64) -> Vec<Scalar> {
    let field = f.field;
    let x = Poly::x(field);
    let fm = f.monic();
    let split = x.pow_mod(p, &fm).sub(&x.rem(&fm)).gcd(&fm);
    let mut pending = vec![split];
    let mut roots = Vec::new();
    let mut delta: i64 = 0;
    while let Some(g) = pending.pop() {
        match g.degree() {
            Some(0) | None => continue,
            Some(1) => {
                roots.push(-&g.coeffs[0]);
                continue;
            }
            _ => {}
        }
        // gcd(g, (x+δ)^((p−1)/2) − 1) separates roots by quadratic character of r+δ.
        loop {
            delta += 1;
            let shifted = x.add(&Poly::constant(field.from_i64(delta)));
            let h = shifted.pow_mod((p - 1) / 2, &g).sub(&Poly::one(field)).gcd(&g);
            let dh = h.degree().unwrap_or(0);
            if dh > 0 && dh < g.degree().unwrap() {
                let other = g.div_rem(&h).0.monic();
                pending.push(h);
                pending.push(other);
                break;
            }
        }
    }
    roots.sort_by_key(|r| match r {
        Scalar::Modular { value, .. } => *value,
        _ => unreachable!(),
    });
    roots
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ if c.is_one() => {}
                _ => write!(f, "({c})*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}
