//! Exact fields: ℚ, GF(p) and ℚ(t), behind a single runtime-tagged scalar type.
//!
//! A [`Field`] names the field; a [`Scalar`] is an element of one. Arithmetic
//! between scalars of different fields is rejected by [`field_op`] and panics
//! through the operator traits (matrices validate their entries up front, so
//! the operators are only used where the fields are already known to agree).

mod parse;
mod ratfunc;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use parse::ParseScalarError;
pub use ratfunc::{QPoly, RatFunc};

/// Largest accepted prime modulus; products of residues fit in `u128`, and
/// exhaustive searches over the field stay meaningful.
pub const MAX_PRIME: u64 = (1 << 32) - 1;

/// A prime modulus, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Modulus(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for Modulus {
    type Error = FieldError;
    fn try_from(p: u64) -> Result<Self, FieldError> {
        Modulus::new(p)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(Modulus),
    /// ℚ(t); its order at +∞ lives in [`crate::hyperreal`].
    RationalFunctions,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Ok(Field::Prime(Modulus::new(p)?))
    }

    /// 0 for the characteristic-zero fields.
    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => p.get(),
            _ => 0,
        }
    }

    /// Number of elements, `None` if infinite.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(p.get()),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(n.into())),
            Field::Prime(p) => {
                let p = p.get();
                Scalar::Modular {
                    value: n.rem_euclid(p as i64) as u64,
                    modulus: p,
                }
            }
            Field::RationalFunctions => Scalar::Function(RatFunc::constant(BigRational::from_integer(n.into()))),
        }
    }

    /// Canonical image of a rational; `None` in GF(p) when p divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Option<Scalar> {
        match self {
            Field::Rationals => Some(Scalar::Rational(q.clone())),
            Field::RationalFunctions => Some(Scalar::Function(RatFunc::constant(q.clone()))),
            Field::Prime(p) => {
                let p = BigInt::from(p.get());
                let reduce = |x: &BigInt| {
                    let r = ((x % &p) + &p) % &p;
                    self.from_i64(i64::try_from(r).expect("residue fits"))
                };
                reduce(q.numer()).checked_div(&reduce(q.denom()))
            }
        }
    }

    /// Candidate scalars: the whole of GF(p), or the constants `0, 1, …, limit-1`
    /// of an infinite field.
    pub fn enumerate_elements(&self, limit: usize) -> Vec<Scalar> {
        match self {
            Field::Prime(p) => (0..p.get()).map(|v| self.from_i64(v as i64)).collect(),
            _ => (0..limit as i64).map(|v| self.from_i64(v)).collect(),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, ParseScalarError> {
        match self {
            Field::Rationals => parse::parse_rational(s).map(Scalar::Rational),
            Field::Prime(p) => parse::parse_residue(s, p.get()).map(|value| Scalar::Modular {
                value,
                modulus: p.get(),
            }),
            Field::RationalFunctions => parse::parse_ratfunc(s).map(Scalar::Function),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({})", p.get()),
            Field::RationalFunctions => write!(f, "Q(t)"),
        }
    }
}

/// An exact field element in canonical form; derived equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
    Function(RatFunc),
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Modular { modulus, .. } => Field::Prime(Modulus(*modulus)),
            Scalar::Function(_) => Field::RationalFunctions,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
            Scalar::Function(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
            Scalar::Function(r) => *r == RatFunc::one(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        match self {
            Scalar::Function(r) => Some(r),
            _ => None,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(q) => Scalar::Rational(q.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: mod_pow(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Function(r) => Scalar::Function(r.inv()?),
        })
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar, FieldError> {
        field_op(self, o, FieldOp::Add)
    }

    pub fn checked_sub(&self, o: &Scalar) -> Result<Scalar, FieldError> {
        field_op(self, o, FieldOp::Sub)
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar, FieldError> {
        field_op(self, o, FieldOp::Mul)
    }

    /// `None` on a zero divisor.
    pub fn checked_div(&self, o: &Scalar) -> Option<Scalar> {
        field_op(self, o, FieldOp::Div).ok()
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

/// Exact field arithmetic on two scalars of the same field.
pub fn field_op(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar, FieldError> {
    use Scalar::*;
    match (a, b) {
        (Rational(x), Rational(y)) => Ok(Rational(match op {
            FieldOp::Add => x + y,
            FieldOp::Sub => x - y,
            FieldOp::Mul => x * y,
            FieldOp::Div => {
                if y.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                x / y
            }
        })),
        (Modular { value: x, modulus: p }, Modular { value: y, modulus: q }) if p == q => {
            let (x, y, p) = (*x as u128, *y as u128, *p);
            let value = match op {
                FieldOp::Add => (x + y) % p as u128,
                FieldOp::Sub => (x + p as u128 - y) % p as u128,
                FieldOp::Mul => (x * y) % p as u128,
                FieldOp::Div => {
                    if y == 0 {
                        return Err(FieldError::DivisionByZero);
                    }
                    (x * mod_pow(y as u64, p - 2, p) as u128) % p as u128
                }
            } as u64;
            Ok(Modular { value, modulus: p })
        }
        (Function(x), Function(y)) => Ok(Function(match op {
            FieldOp::Add => x.add(y),
            FieldOp::Sub => x.sub(y),
            FieldOp::Mul => x.mul(y),
            FieldOp::Div => x.div(y).ok_or(FieldError::DivisionByZero)?,
        })),
        _ => Err(FieldError::FieldMismatch(a.field(), b.field())),
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match field_op(self, rhs, $op) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, FieldOp::Add);
scalar_binop!(Sub, sub, FieldOp::Sub);
scalar_binop!(Mul, mul, FieldOp::Mul);
scalar_binop!(Div, div, FieldOp::Div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            Scalar::Function(r) => Scalar::Function(r.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Modular { value, .. } => write!(f, "{value}"),
            Scalar::Function(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn field_op_examples() {
        assert_eq!(field_op(&q(1, 3), &q(1, 6), FieldOp::Add).unwrap(), q(1, 2));
        let gf5 = Field::prime(5).unwrap();
        assert_eq!(
            field_op(&gf5.from_i64(3), &gf5.from_i64(4), FieldOp::Mul).unwrap(),
            gf5.from_i64(2)
        );
        let qt = Field::RationalFunctions;
        let t = qt.parse("t").unwrap();
        let inv_t = qt.parse("1/t").unwrap();
        assert_eq!(field_op(&inv_t, &t, FieldOp::Mul).unwrap(), qt.one());
    }

    #[test]
    fn field_op_errors() {
        let gf5 = Field::prime(5).unwrap();
        assert_eq!(
            field_op(&q(1, 1), &gf5.one(), FieldOp::Add),
            Err(FieldError::FieldMismatch(Field::Rationals, gf5))
        );
        assert_eq!(
            field_op(&gf5.one(), &gf5.zero(), FieldOp::Div),
            Err(FieldError::DivisionByZero)
        );
        let gf7 = Field::prime(7).unwrap();
        assert!(field_op(&gf5.one(), &gf7.one(), FieldOp::Mul).is_err());
    }

    #[test]
    fn prime_check() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(4_294_967_291).is_ok());
    }

    #[test]
    fn enumerate_examples() {
        let gf3 = Field::prime(3).unwrap();
        let els: Vec<String> = gf3.enumerate_elements(100).iter().map(|s| s.to_string()).collect();
        assert_eq!(els, ["0", "1", "2"]);
        let els: Vec<String> = Field::Rationals.enumerate_elements(4).iter().map(|s| s.to_string()).collect();
        assert_eq!(els, ["0", "1", "2", "3"]);
        let els = Field::RationalFunctions.enumerate_elements(2);
        assert_eq!(els, vec![Field::RationalFunctions.zero(), Field::RationalFunctions.one()]);
    }

    #[test]
    fn fermat_little_theorem() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let f = Field::prime(p).unwrap();
            for a in f.enumerate_elements(0) {
                assert_eq!(a.pow(p), a);
            }
        }
    }

    #[test]
    fn from_rational_in_prime_field() {
        let gf5 = Field::prime(5).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(gf5.from_rational(&half), Some(gf5.from_i64(3)));
        let fifth = BigRational::new(1.into(), 5.into());
        assert_eq!(gf5.from_rational(&fifth), None);
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Field::Rationals),
            Just(Field::RationalFunctions),
            prop::sample::select(vec![2u64, 3, 5, 7, 31, 65_521]).prop_map(|p| Field::prime(p).unwrap()),
        ]
    }

    fn arb_scalar(field: Field) -> BoxedStrategy<Scalar> {
        match field {
            Field::Rationals => (-50i64..50, 1i64..20)
                .prop_map(|(n, d)| q(n, d))
                .boxed(),
            Field::Prime(p) => (0..p.get()).prop_map(move |v| Field::Prime(p).from_i64(v as i64)).boxed(),
            Field::RationalFunctions => (
                prop::collection::vec(-5i64..5, 0..3),
                prop::collection::vec(-5i64..5, 0..3),
            )
                .prop_map(|(n, mut d)| {
                    d.push(1);
                    let r = RatFunc::new(QPoly::from_ints(&n), QPoly::from_ints(&d)).unwrap();
                    Scalar::Function(r)
                })
                .boxed(),
        }
    }

    fn arb_triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        arb_field().prop_flat_map(|f| (arb_scalar(f), arb_scalar(f), arb_scalar(f)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(3000))]

        #[test]
        fn ring_axioms((a, b, c) in arb_triple()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn canonical_strings_reparse((a, _b, _c) in arb_triple()) {
            let f = a.field();
            let s = a.to_string();
            let back = f.parse(&s).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
