#![allow(dead_code)]

use num_rational::BigRational;
use orthoform::field::{Field, QPoly, RatFunc, Scalar};
use orthoform::forms::BilinearForm;
use orthoform::hyperreal::HyperFamily;
use orthoform::io::{parse_family, to_pretty};
use orthoform::linalg::Matrix;
use orthoform::oracle::CorpusEntry;
use orthoform::family::FormFamily;
use orthoform::ultrafilter::StableTailFamily;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const Q: Field = Field::Rationals;

pub fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

pub fn family_of(e: &CorpusEntry) -> FormFamily {
    parse_family(&to_pretty(&e.family)).unwrap().as_finite()
}

pub fn random_field(rng: &mut ChaCha8Rng) -> Field {
    match rng.gen_range(0..4) {
        0 | 1 => Q,
        2 => gf(2),
        _ => gf([3, 5, 7][rng.gen_range(0..3)]),
    }
}

pub fn small(rng: &mut ChaCha8Rng, f: Field) -> Scalar {
    f.from_i64(rng.gen_range(-3..=3))
}

pub fn symmetric(rng: &mut ChaCha8Rng, f: Field, n: usize) -> Matrix {
    let mut g = Matrix::zeros(f, n, n);
    for i in 0..n {
        for j in i..n {
            let v = small(rng, f);
            g.set(i, j, v.clone());
            g.set(j, i, v);
        }
    }
    g
}

pub fn invertible(rng: &mut ChaCha8Rng, f: Field, n: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(f, n, n, |_, _| small(rng, f));
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Either `PᵀD_iP` members sharing one `P`, or unconstrained members; diagonal
/// entries are zero with probability 1/4.
pub fn random_members(rng: &mut ChaCha8Rng, f: Field, n: usize, count: usize) -> Vec<BilinearForm> {
    if rng.gen_bool(0.5) {
        let p = invertible(rng, f, n);
        (0..count)
            .map(|_| {
                let d: Vec<Scalar> = (0..n).map(|_| if rng.gen_bool(0.25) { f.zero() } else { small(rng, f) }).collect();
                BilinearForm::new(p.transpose().matmul(&Matrix::diagonal(f, &d)).matmul(&p)).unwrap()
            })
            .collect()
    } else {
        (0..count).map(|_| BilinearForm::new(symmetric(rng, f, n)).unwrap()).collect()
    }
}

pub fn random_stable_tail(rng: &mut ChaCha8Rng) -> StableTailFamily {
    let f = random_field(rng);
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(0..=3);
    let mut members = random_members(rng, f, n, k + 1);
    let tail = members.pop().unwrap();
    StableTailFamily::new(members, tail).unwrap()
}

fn poly(rng: &mut ChaCha8Rng, deg: usize, monic: bool) -> QPoly {
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-4..=4)).collect();
    if monic {
        c[deg] = 1;
    } else if c[deg] == 0 {
        c[deg] = rng.gen_range(1..=4);
    }
    QPoly::from_ints(&c)
}

/// Finite when `infinitesimal` is false, infinitesimal otherwise; degrees at most 3.
pub fn random_bounded(rng: &mut ChaCha8Rng, infinitesimal: bool) -> RatFunc {
    if !infinitesimal && rng.gen_bool(0.3) {
        return RatFunc::constant(BigRational::from_integer(rng.gen_range(-3..=3).into()));
    }
    let dd = rng.gen_range(usize::from(infinitesimal)..=3);
    let den = poly(rng, dd, true);
    let dn = if infinitesimal { rng.gen_range(0..dd) } else { rng.gen_range(0..=dd) };
    RatFunc::new(poly(rng, dn, false), den).unwrap()
}

/// Symmetric `CᵀSC + E` with a constant `S` of random rank, constant `C`, and infinitesimal `E`.
pub fn random_hyper(rng: &mut ChaCha8Rng) -> HyperFamily {
    let n = rng.gen_range(1..=4);
    let qt = Field::RationalFunctions;
    let gram = if rng.gen_bool(0.3) {
        let mut g = Matrix::zeros(qt, n, n);
        for i in 0..n {
            for j in i..n {
                let inf = rng.gen_bool(0.3);
                let v = Scalar::Function(random_bounded(rng, inf));
                g.set(i, j, v.clone());
                g.set(j, i, v);
            }
        }
        g
    } else {
        let rank = rng.gen_range(0..=n);
        let d: Vec<Scalar> = (0..n)
            .map(|i| if i < rank { qt.from_i64([1, -1, 2, 3][rng.gen_range(0..4)]) } else { qt.zero() })
            .collect();
        let c = invertible(rng, Q, n).try_map(qt, |s| Ok::<_, ()>(Scalar::Function(RatFunc::constant(s.as_rational().unwrap().clone())))).unwrap();
        let mut g = c.transpose().matmul(&Matrix::diagonal(qt, &d)).matmul(&c);
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.5) {
                    let e = Scalar::Function(random_bounded(rng, true));
                    let v = g.get(i, j) + &e;
                    g.set(i, j, v.clone());
                    g.set(j, i, v);
                }
            }
        }
        g
    };
    HyperFamily::new(BilinearForm::new(gram).unwrap()).unwrap()
}
