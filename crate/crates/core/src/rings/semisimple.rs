//! Semisimple rings `S = M_{q_1}(R_1) × ... × M_{q_k}(R_k)`.


use super::field::DivisionRing;
use super::matrix::Mat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub q: usize,
    pub ring: DivisionRing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingDescriptor {
    components: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    pub parts: Vec<Mat>,
}

impl RingDescriptor {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape("a ring needs at least one component".into()));
        }
        if components.iter().any(|c| c.q == 0) {
            return Err(Error::Shape("matrix size q must be at least 1".into()));
        }
        Ok(RingDescriptor { components })
    }

    /// `M_q(R)` as a single-component ring.
    pub fn simple(q: usize, ring: DivisionRing) -> Self {
        RingDescriptor::new(vec![Component { q, ring }]).expect("q >= 1")
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.components[i]
    }

    pub fn q(&self, i: usize) -> usize {
        self.components[i].q
    }

    pub fn ring(&self, i: usize) -> &DivisionRing {
        &self.components[i].ring
    }

    /// The sub-ring consisting of component `i` alone.
    pub fn restrict(&self, i: usize) -> RingDescriptor {
        RingDescriptor { components: vec![self.components[i].clone()] }
    }

    pub fn zero(&self) -> RingElement {
        RingElement { parts: self.components.iter().map(|c| Mat::zeros(&c.ring, c.q, c.q)).collect() }
    }

    pub fn one(&self) -> RingElement {
        RingElement { parts: self.components.iter().map(|c| Mat::identity(&c.ring, c.q)).collect() }
    }

    /// The central idempotent `e_i`.
    pub fn idempotent(&self, i: usize) -> RingElement {
        let mut e = self.zero();
        let c = &self.components[i];
        e.parts[i] = Mat::identity(&c.ring, c.q);
        e
    }

    pub fn check(&self, x: &RingElement) -> Result<()> {
        if x.parts.len() != self.k()
            || x.parts.iter().zip(&self.components).any(|(m, c)| m.rows() != c.q || m.cols() != c.q)
        {
            return Err(Error::Mismatch("ring element does not belong to the ring".into()));
        }
        Ok(())
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        let parts = self
            .components
            .iter()
            .zip(x.parts.iter().zip(&y.parts))
            .map(|(c, (a, b))| a.mul(&c.ring, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(RingElement { parts })
    }

    pub fn add(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        let parts = self
            .components
            .iter()
            .zip(x.parts.iter().zip(&y.parts))
            .map(|(c, (a, b))| a.add(&c.ring, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(RingElement { parts })
    }

    pub fn is_unit(&self, x: &RingElement) -> bool {
        self.check(x).is_ok() && x.parts.iter().zip(&self.components).all(|(m, c)| m.is_invertible(&c.ring))
    }

    pub fn inverse(&self, x: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        let parts = x
            .parts
            .iter()
            .zip(&self.components)
            .map(|(m, c)| m.inverse(&c.ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(RingElement { parts })
    }

    pub fn name(&self) -> String {
        self.components
            .iter()
            .map(|c| format!("M({}, {})", c.q, c.ring.name()))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// Splits `x` into its components `x·e_i`; the parts sum back to `x`.
pub fn ring_decompose(s: &RingDescriptor, x: &RingElement) -> Result<Vec<RingElement>> {
    s.check(x)?;
    (0..s.k()).map(|i| s.mul(x, &s.idempotent(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_and_reassemble() {
        let s = RingDescriptor::new(vec![
            Component { q: 2, ring: DivisionRing::gf(5) },
            Component { q: 1, ring: DivisionRing::Rationals },
        ])
        .unwrap();
        let f5 = DivisionRing::gf(5);
        let q = DivisionRing::Rationals;
        let a = Mat::from_rows(vec![vec![f5.from_int(1), f5.from_int(2)], vec![f5.zero(), f5.from_int(3)]], 2).unwrap();
        let b = Mat::diag(&q, &[q.from_int(7)]);
        let x = RingElement { parts: vec![a.clone(), b.clone()] };
        let parts = ring_decompose(&s, &x).unwrap();
        assert_eq!(parts[0].parts[0], a);
        assert_eq!(parts[0].parts[1], Mat::zeros(&q, 1, 1));
        assert_eq!(parts[1].parts[1], b);
        let back = s.add(&parts[0], &parts[1]).unwrap();
        assert_eq!(back, x);
        assert!(s.is_unit(&x));
        assert!(!s.is_unit(&parts[0]));
    }
}
