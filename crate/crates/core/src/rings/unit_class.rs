//! Classes in `R^× / [R^×, R^×]` and the Dieudonné determinant.

use num_rational::BigRational;
use num_traits::One;

use super::field::{DivisionRing, Scalar};
use super::matrix::Mat;
use super::quaternion::{fmt_rational, is_positive};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassValue {
    /// Commutative plugins: the unit itself.
    Unit(Scalar),
    /// Quaternions: the reduced norm, a positive rational.
    Norm(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitClass {
    ring: DivisionRing,
    value: ClassValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassOp {
    Combine,
    Equals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassOpResult {
    Class(UnitClass),
    Bool(bool),
}

impl UnitClass {
    pub fn trivial(ring: &DivisionRing) -> Self {
        let value = match ring {
            DivisionRing::Quaternions => ClassValue::Norm(BigRational::one()),
            _ => ClassValue::Unit(ring.one()),
        };
        UnitClass { ring: ring.clone(), value }
    }

    /// Class of a nonzero scalar.
    pub fn of(ring: &DivisionRing, u: &Scalar) -> Result<Self> {
        if ring.is_zero(u) {
            return Err(Error::Singular);
        }
        let value = match u {
            Scalar::Quaternion(q) => ClassValue::Norm(q.reduced_norm()),
            other => ClassValue::Unit(other.clone()),
        };
        Ok(UnitClass { ring: ring.clone(), value })
    }

    /// Class with a given quaternion reduced norm.
    pub fn from_norm(n: BigRational) -> Result<Self> {
        if !is_positive(&n) {
            return Err(Error::Shape("reduced norms are positive".into()));
        }
        Ok(UnitClass { ring: DivisionRing::Quaternions, value: ClassValue::Norm(n) })
    }

    pub fn ring(&self) -> &DivisionRing {
        &self.ring
    }

    pub fn value(&self) -> &ClassValue {
        &self.value
    }

    pub fn is_trivial(&self) -> bool {
        *self == UnitClass::trivial(&self.ring)
    }

    pub fn combine(&self, o: &UnitClass) -> Result<UnitClass> {
        if self.ring != o.ring {
            return Err(Error::Mismatch(format!(
                "unit classes over {} and {}",
                self.ring.name(),
                o.ring.name()
            )));
        }
        let value = match (&self.value, &o.value) {
            (ClassValue::Unit(a), ClassValue::Unit(b)) => ClassValue::Unit(self.ring.mul(a, b)),
            (ClassValue::Norm(a), ClassValue::Norm(b)) => ClassValue::Norm(a * b),
            _ => unreachable!("class kind follows the ring"),
        };
        Ok(UnitClass { ring: self.ring.clone(), value })
    }

    pub fn inverse(&self) -> UnitClass {
        let value = match &self.value {
            ClassValue::Unit(a) => ClassValue::Unit(self.ring.inv(a).expect("units are invertible")),
            ClassValue::Norm(n) => ClassValue::Norm(n.recip()),
        };
        UnitClass { ring: self.ring.clone(), value }
    }

    /// `unit_class_op`: combine or compare two classes.
    pub fn op(&self, o: &UnitClass, op: ClassOp) -> Result<ClassOpResult> {
        if self.ring != o.ring {
            return Err(Error::Mismatch("unit classes over different rings".into()));
        }
        Ok(match op {
            ClassOp::Combine => ClassOpResult::Class(self.combine(o)?),
            ClassOp::Equals => ClassOpResult::Bool(self == o),
        })
    }

    /// Normal form as text: the scalar, or the reduced norm for quaternions.
    pub fn normal_form(&self) -> String {
        match &self.value {
            ClassValue::Unit(a) => self.ring.format(a),
            ClassValue::Norm(n) => fmt_rational(n),
        }
    }
}

impl std::fmt::Display for UnitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.value {
            ClassValue::Unit(_) => write!(f, "[{}]", self.normal_form()),
            ClassValue::Norm(_) => write!(f, "[nrd {}]", self.normal_form()),
        }
    }
}

/// Dieudonné determinant by row reduction: the class is the product of the
/// pivots times the class of `-1` for every row swap.
pub fn dieudonne_det(r: &DivisionRing, a: &Mat) -> Result<UnitClass> {
    if !a.is_square() {
        return Err(Error::Shape("determinant of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.to_rows();
    let mut class = UnitClass::trivial(r);
    let minus_one = UnitClass::of(r, &r.from_int(-1))?;
    for col in 0..n {
        let pr = (col..n).find(|&i| !r.is_zero(&m[i][col])).ok_or(Error::Singular)?;
        if pr != col {
            m.swap(pr, col);
            class = class.combine(&minus_one)?;
        }
        let piv = m[col][col].clone();
        class = class.combine(&UnitClass::of(r, &piv)?)?;
        let pinv = r.inv(&piv).unwrap();
        for i in col + 1..n {
            let c = r.mul(&m[i][col], &pinv);
            if r.is_zero(&c) {
                continue;
            }
            for j in col..n {
                let t = r.mul(&c, &m[col][j]);
                m[i][j] = r.sub(&m[i][j], &t);
            }
        }
    }
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::quaternion::Quaternion;

    #[test]
    fn spec_examples() {
        let q = DivisionRing::Rationals;
        let d = Mat::diag(&q, &[q.from_int(2), q.from_int(3)]);
        assert_eq!(dieudonne_det(&q, &d).unwrap(), UnitClass::of(&q, &q.from_int(6)).unwrap());
        let f5 = DivisionRing::gf(5);
        let p = Mat::from_rows(vec![vec![f5.zero(), f5.one()], vec![f5.one(), f5.zero()]], 2).unwrap();
        assert_eq!(dieudonne_det(&f5, &p).unwrap().normal_form(), "4");
        let ones = Mat::from_rows(vec![vec![q.one(), q.one()], vec![q.one(), q.one()]], 2).unwrap();
        assert_eq!(dieudonne_det(&q, &ones), Err(Error::Singular));
    }

    #[test]
    fn quaternion_classes() {
        let h = DivisionRing::Quaternions;
        let r = |x: i64| super::super::field::rational(x, 1);
        let i = Scalar::Quaternion(Quaternion::new(r(0), r(1), r(0), r(0)));
        let j = Scalar::Quaternion(Quaternion::new(r(0), r(0), r(1), r(0)));
        let d = Mat::diag(&h, &[i.clone(), j]);
        assert!(dieudonne_det(&h, &d).unwrap().is_trivial());
        let ci = UnitClass::of(&h, &i).unwrap();
        assert!(ci.combine(&ci).unwrap().is_trivial());
    }
}
