//! Hamilton quaternions over the rationals, `i^2 = j^2 = -1`, `ij = k`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Quaternion {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn from_rational(a: BigRational) -> Self {
        Quaternion::new(a, BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn zero() -> Self {
        Quaternion::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Quaternion::from_rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Quaternion::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }

    pub fn neg(&self) -> Self {
        Quaternion::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&o.a, &o.b, &o.c, &o.d);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.a.clone(), -&self.b, -&self.c, -&self.d)
    }

    /// Reduced norm `a^2 + b^2 + c^2 + d^2`.
    pub fn reduced_norm(&self) -> BigRational {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.reduced_norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Quaternion::new(&c.a / &n, &c.b / &n, &c.c / &n, &c.d / &n))
    }

    pub fn is_real(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            fmt_rational(&self.c),
            fmt_rational(&self.d)
        )
    }
}

/// Positive rationals only; used for reduced-norm normal forms.
pub(crate) fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}
