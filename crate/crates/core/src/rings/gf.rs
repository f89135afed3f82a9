//! Arithmetic in GF(p^e).
//!
//! Elements are stored as a single residue code `Σ c_i p^i` where `c_i` are
//! the coefficients (low degree first) of the reduced polynomial residue.
//! For `e = 1` the code is just the residue modulo `p`.


#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteField {
    p: u64,
    e: u32,
    /// Monic modulus of degree `e`, low degree first, leading 1 omitted.
    modulus: Vec<u64>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `m` (both low degree first,
/// `m` includes its leading coefficient).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn has_factor_of_degree(m: &[u64], d: usize, p: u64) -> bool {
    // Enumerate all monic polynomials of degree d.
    let count = p.pow(d as u32);
    for code in 0..count {
        let mut f = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if poly_rem(m, &f, p).is_empty() {
            return true;
        }
    }
    false
}

impl FiniteField {
    /// GF(p^e) with the lexicographically least irreducible monic modulus,
    /// comparing coefficient vectors from degree e-1 down to 0.
    pub fn new(p: u64, e: u32) -> Option<Self> {
        if !is_prime(p) || e == 0 {
            return None;
        }
        let size = (p as u128).checked_pow(e)?;
        if size > (1u128 << 31) {
            return None;
        }
        if e == 1 {
            return Some(FiniteField { p, e, modulus: vec![] });
        }
        let e_us = e as usize;
        let total = p.pow(e);
        for code in 0..total {
            // code enumerates (c_{e-1}, ..., c_0) lexicographically.
            let mut coeffs_high_first = Vec::with_capacity(e_us);
            let mut c = code;
            for _ in 0..e_us {
                coeffs_high_first.push(c % p);
                c /= p;
            }
            coeffs_high_first.reverse();
            let mut low_first: Vec<u64> = coeffs_high_first.iter().rev().copied().collect();
            low_first.push(1);
            let irreducible = (1..=e_us / 2).all(|d| !has_factor_of_degree(&low_first, d, p));
            if irreducible {
                low_first.pop();
                return Some(FiniteField { p, e, modulus: low_first });
            }
        }
        None
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn coeffs(&self, code: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut c = code;
        for _ in 0..self.e {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> u64 {
        let full: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        let mut m = self.modulus.clone();
        m.push(1);
        let r = if full.len() > self.e as usize {
            poly_rem(&full, &m, self.p)
        } else {
            full
        };
        r.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn from_int(&self, v: i64) -> u64 {
        (v.rem_euclid(self.p as i64)) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let s: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.from_coeffs(&s)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.e == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let s: Vec<u64> = self
            .coeffs(a)
            .iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        self.from_coeffs(&s)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as u64;
        }
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; ca.len() + cb.len()];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.from_coeffs(&prod)
    }

    pub fn pow(&self, a: u64, mut n: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        // a^(q-2) in the cyclic unit group of order q-1.
        Some(self.pow(a, self.size() - 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = FiniteField::new(5, 1).unwrap();
        assert_eq!(f.inv(2), Some(3));
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn gf4_uses_x2_x_1() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1]);
        // x * x = x + 1 ; code(x) = 2, code(x+1) = 3
        assert_eq!(f.mul(2, 2), 3);
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn gf9_modulus_is_least() {
        let f = FiniteField::new(3, 2).unwrap();
        // x^2 + 1 is irreducible over F3 and lexicographically least.
        assert_eq!(f.modulus(), &[1, 0]);
        for a in 1..9 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn rejects_non_prime() {
        assert!(FiniteField::new(4, 1).is_none());
        assert!(FiniteField::new(1, 1).is_none());
    }
}
