//! Division-ring plugins and their scalars.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::gf::FiniteField;
use super::quaternion::{fmt_rational, Quaternion};
use crate::error::{Error, Result};

/// One of the supported division rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DivisionRing {
    Finite(FiniteField),
    Rationals,
    Quaternions,
}

/// An exact element of a [`DivisionRing`], always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Residue(u64),
    Rational(BigRational),
    Quaternion(Quaternion),
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Stern's diatomic sequence; `fusc(n)/fusc(n+1)` walks the Calkin-Wilf
/// (breadth-first Stern-Brocot) enumeration of the positive rationals.
fn fusc(mut n: u64) -> u64 {
    let (mut a, mut b) = (1u64, 0u64);
    while n > 0 {
        if n & 1 == 1 {
            b += a;
        } else {
            a += b;
        }
        n >>= 1;
    }
    b
}

impl DivisionRing {
    pub fn finite_field(p: u64, e: u32) -> Result<Self> {
        FiniteField::new(p, e)
            .map(DivisionRing::Finite)
            .ok_or_else(|| Error::Shape(format!("GF({p}^{e}) is not a supported finite field")))
    }

    pub fn gf(p: u64) -> Self {
        Self::finite_field(p, 1).expect("prime characteristic")
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DivisionRing::Finite(_))
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(self, DivisionRing::Quaternions)
    }

    /// `Some(|R|)` for finite fields, `None` for countably infinite rings.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            DivisionRing::Finite(f) => Some(f.size()),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            DivisionRing::Finite(f) if f.degree() == 1 => format!("GF({})", f.characteristic()),
            DivisionRing::Finite(f) => format!("GF({}^{})", f.characteristic(), f.degree()),
            DivisionRing::Rationals => "QQ".to_string(),
            DivisionRing::Quaternions => "HQ".to_string(),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            DivisionRing::Finite(_) => Scalar::Residue(0),
            DivisionRing::Rationals => Scalar::Rational(BigRational::zero()),
            DivisionRing::Quaternions => Scalar::Quaternion(Quaternion::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        match self {
            DivisionRing::Finite(f) => Scalar::Residue(f.from_int(v)),
            DivisionRing::Rationals => Scalar::Rational(rational(v, 1)),
            DivisionRing::Quaternions => {
                Scalar::Quaternion(Quaternion::from_rational(rational(v, 1)))
            }
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Option<Scalar> {
        match self {
            DivisionRing::Finite(f) => {
                let p = BigInt::from(f.characteristic());
                let n = r.numer().mod_floor(&p);
                let d = r.denom().mod_floor(&p);
                let to_u64 = |x: &BigInt| -> u64 { x.to_string().parse().unwrap() };
                let inv = f.inv(f.from_int(to_u64(&d) as i64))?;
                Some(Scalar::Residue(f.mul(f.from_int(to_u64(&n) as i64), inv)))
            }
            DivisionRing::Rationals => Some(Scalar::Rational(r.clone())),
            DivisionRing::Quaternions => Some(Scalar::Quaternion(Quaternion::from_rational(r.clone()))),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Residue(v) => *v == 0,
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Quaternion(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (DivisionRing::Finite(f), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(f.add(*x, *y))
            }
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (_, Scalar::Quaternion(x), Scalar::Quaternion(y)) => Scalar::Quaternion(x.add(y)),
            _ => panic!("scalar plugin mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (DivisionRing::Finite(f), Scalar::Residue(x)) => Scalar::Residue(f.neg(*x)),
            (_, Scalar::Rational(x)) => Scalar::Rational(-x),
            (_, Scalar::Quaternion(x)) => Scalar::Quaternion(x.neg()),
            _ => panic!("scalar plugin mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (DivisionRing::Finite(f), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(f.mul(*x, *y))
            }
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (_, Scalar::Quaternion(x), Scalar::Quaternion(y)) => Scalar::Quaternion(x.mul(y)),
            _ => panic!("scalar plugin mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (DivisionRing::Finite(f), Scalar::Residue(x)) => f.inv(*x).map(Scalar::Residue),
            (_, Scalar::Rational(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::Rational(x.recip()))
                }
            }
            (_, Scalar::Quaternion(x)) => x.inv().map(Scalar::Quaternion),
            _ => panic!("scalar plugin mismatch"),
        }
    }

    /// The `k`-th scalar in the fixed enumeration order: residue order for
    /// finite fields, `0` then the Calkin-Wilf order with alternating signs
    /// for the rationals; quaternions enumerate their rational subfield.
    pub fn enumerate(&self, k: u64) -> Scalar {
        match self {
            DivisionRing::Finite(f) => Scalar::Residue(k % f.size()),
            DivisionRing::Rationals | DivisionRing::Quaternions => {
                let r = if k == 0 {
                    BigRational::zero()
                } else {
                    let idx = (k - 1) / 2 + 1;
                    let pos = BigRational::new(BigInt::from(fusc(idx)), BigInt::from(fusc(idx + 1)));
                    if (k - 1).is_multiple_of(2) {
                        pos
                    } else {
                        -pos
                    }
                };
                self.from_rational(&r).unwrap()
            }
        }
    }

    /// A small random scalar (uniform for finite fields).
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        let small = |rng: &mut R| rational(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        match self {
            DivisionRing::Finite(f) => Scalar::Residue(rng.gen_range(0..f.size())),
            DivisionRing::Rationals => Scalar::Rational(small(rng)),
            DivisionRing::Quaternions => {
                let mut coords = [small(rng), small(rng), small(rng), small(rng)];
                // keep most entries sparse so products stay readable
                for c in coords.iter_mut().skip(1) {
                    if rng.gen_ratio(1, 2) {
                        *c = BigRational::zero();
                    }
                }
                let [a, b, c, d] = coords;
                Scalar::Quaternion(Quaternion::new(a, b, c, d))
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.random(rng);
            if !self.is_zero(&s) {
                return s;
            }
        }
    }

    pub fn format(&self, a: &Scalar) -> String {
        match (self, a) {
            (DivisionRing::Finite(f), Scalar::Residue(x)) => {
                if f.degree() == 1 {
                    x.to_string()
                } else {
                    let c: Vec<String> = f.coeffs(*x).iter().map(|c| c.to_string()).collect();
                    format!("<{}>", c.join(","))
                }
            }
            (_, Scalar::Rational(r)) => fmt_rational(r),
            (_, Scalar::Quaternion(q)) => q.to_string(),
            _ => panic!("scalar plugin mismatch"),
        }
    }

    /// Parses a scalar literal: `3` or `-1` (finite fields, reduced),
    /// `<1,0,2>` (GF(p^e) coefficients, low degree first), `-7/2`
    /// (rationals), `(1, 0, -1/2, 3)` (quaternions).
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let t = text.trim();
        let bad = || Error::Shape(format!("invalid {} scalar literal '{}'", self.name(), t));
        match self {
            DivisionRing::Finite(f) => {
                if let Some(inner) = t.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
                    let coeffs: std::result::Result<Vec<i64>, _> =
                        inner.split(',').map(|c| c.trim().parse::<i64>()).collect();
                    let coeffs: Vec<u64> = coeffs
                        .map_err(|_| bad())?
                        .iter()
                        .map(|c| f.from_int(*c))
                        .collect();
                    if coeffs.len() > f.degree() as usize {
                        return Err(bad());
                    }
                    return Ok(Scalar::Residue(f.from_coeffs(&coeffs)));
                }
                let r = parse_rational(t).ok_or_else(bad)?;
                self.from_rational(&r).ok_or_else(bad)
            }
            DivisionRing::Rationals => parse_rational(t).map(Scalar::Rational).ok_or_else(bad),
            DivisionRing::Quaternions => {
                if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                    let parts: Option<Vec<BigRational>> =
                        inner.split(',').map(parse_rational).collect();
                    let parts = parts.ok_or_else(bad)?;
                    if parts.len() != 4 {
                        return Err(bad());
                    }
                    let mut it = parts.into_iter();
                    let (a, b, c, d) = (
                        it.next().unwrap(),
                        it.next().unwrap(),
                        it.next().unwrap(),
                        it.next().unwrap(),
                    );
                    return Ok(Scalar::Quaternion(Quaternion::new(a, b, c, d)));
                }
                let r = parse_rational(t).ok_or_else(bad)?;
                Ok(Scalar::Quaternion(Quaternion::from_rational(r)))
            }
        }
    }

    /// Whether `1` is a sum of two units; fails only for GF(2).
    pub fn one_is_sum_of_two_units(&self) -> bool {
        self.cardinality() != Some(2)
    }
}

pub(crate) fn parse_rational(t: &str) -> Option<BigRational> {
    let t = t.trim().replace('\u{2212}', "-");
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim().to_string(), d.trim().to_string()),
        None => (t.to_string(), "1".to_string()),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Integer value of a rational scalar, if it is one.
pub fn scalar_as_integer(a: &Scalar) -> Option<BigInt> {
    match a {
        Scalar::Residue(v) => Some(BigInt::from(*v)),
        Scalar::Rational(r) if r.denom().is_one() => Some(r.numer().clone()),
        _ => None,
    }
}

pub fn is_negative_rational(a: &Scalar) -> bool {
    matches!(a, Scalar::Rational(r) if r.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_literals() {
        let q = DivisionRing::Rationals;
        assert_eq!(q.parse("-7/2").unwrap(), Scalar::Rational(rational(-7, 2)));
        assert_eq!(q.parse("\u{2212}7/2").unwrap(), Scalar::Rational(rational(-7, 2)));
        let f5 = DivisionRing::gf(5);
        assert_eq!(f5.parse("-1").unwrap(), Scalar::Residue(4));
        assert_eq!(f5.parse("3").unwrap(), Scalar::Residue(3));
        let h = DivisionRing::Quaternions;
        let x = h.parse("(1, 0, -1/2, 3)").unwrap();
        assert_eq!(h.format(&x), "(1, 0, -1/2, 3)");
        assert!(q.parse("1/0").is_err());
    }

    #[test]
    fn rational_enumeration_is_injective_prefix() {
        let q = DivisionRing::Rationals;
        let seen: std::collections::BTreeSet<Scalar> = (0..200).map(|k| q.enumerate(k)).collect();
        assert_eq!(seen.len(), 200);
        assert_eq!(q.enumerate(0), q.zero());
        assert_eq!(q.enumerate(1), q.one());
        assert_eq!(q.enumerate(2), q.from_int(-1));
    }
}
