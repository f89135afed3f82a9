//! Elements of `M = ∏ M_i` and of its powers.
//!
//! Component `i` of `M` is a direct sum of copies of `M_{1×q_i}(R_i)`
//! indexed by `ℕ` (rank ω) or by `0..r`. An element of `M^n` is stored per
//! component as a finitely supported map from basis index to a row of
//! `n·q_i` scalars: the `n` coordinates laid side by side.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rings::matrix::{row_add, row_is_zero, row_neg, row_sub, row_times, zero_row};
use crate::rings::{DivisionRing, Mat, RingDescriptor, RingElement, Row, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Finite(usize),
    Omega,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleDescriptor {
    ring: RingDescriptor,
    ranks: Vec<Rank>,
}

impl ModuleDescriptor {
    pub fn new(ring: RingDescriptor, ranks: Vec<Rank>) -> Result<Self> {
        if ranks.len() != ring.k() {
            return Err(Error::Shape(format!(
                "{} ranks given for a ring with {} components",
                ranks.len(),
                ring.k()
            )));
        }
        Ok(ModuleDescriptor { ring, ranks })
    }

    /// Every component with the same rank.
    pub fn uniform(ring: RingDescriptor, rank: Rank) -> Self {
        let ranks = vec![rank; ring.k()];
        ModuleDescriptor { ring, ranks }
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn k(&self) -> usize {
        self.ring.k()
    }

    pub fn q(&self, i: usize) -> usize {
        self.ring.q(i)
    }

    pub fn field(&self, i: usize) -> &DivisionRing {
        self.ring.ring(i)
    }

    pub fn rank(&self, i: usize) -> Rank {
        self.ranks[i]
    }

    pub fn ranks(&self) -> &[Rank] {
        &self.ranks
    }

    /// Row width of component `i` in `M^n`.
    pub fn width(&self, i: usize, n: usize) -> usize {
        n * self.q(i)
    }

    /// Underlying `R_i`-rank of `M_i` (rank times `q_i`), `None` for ω.
    pub fn underlying_rank(&self, i: usize) -> Option<usize> {
        match self.ranks[i] {
            Rank::Finite(r) => Some(r * self.q(i)),
            Rank::Omega => None,
        }
    }

    pub fn is_infinite(&self, i: usize) -> bool {
        match self.ranks[i] {
            Rank::Omega => true,
            Rank::Finite(r) => r >= 1 && !self.field(i).is_finite(),
        }
    }

    pub fn all_infinite(&self) -> bool {
        (0..self.k()).all(|i| self.is_infinite(i))
    }

    /// Whether basis index `b` exists in component `i`.
    pub fn has_index(&self, i: usize, b: usize) -> bool {
        match self.ranks[i] {
            Rank::Omega => true,
            Rank::Finite(r) => b < r,
        }
    }

    /// Component `i` as a module over `M_{q_i}(R_i)` alone.
    pub fn restrict(&self, i: usize) -> ModuleDescriptor {
        ModuleDescriptor { ring: self.ring.restrict(i), ranks: vec![self.ranks[i]] }
    }

    pub fn require_infinite(&self, what: &str) -> Result<()> {
        if self.all_infinite() {
            Ok(())
        } else {
            Err(Error::PreconditionFailed(format!("{what} needs every component module to be infinite")))
        }
    }
}

/// Finitely supported map `index → row`; zero rows are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sparse {
    width: usize,
    rows: BTreeMap<usize, Row>,
}

impl Sparse {
    pub fn zero(width: usize) -> Self {
        Sparse { width, rows: BTreeMap::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &BTreeMap<usize, Row> {
        &self.rows
    }

    pub fn get(&self, b: usize) -> Option<&Row> {
        self.rows.get(&b)
    }

    pub fn row_or_zero(&self, r: &DivisionRing, b: usize) -> Row {
        self.rows.get(&b).cloned().unwrap_or_else(|| zero_row(r, self.width))
    }

    pub fn set(&mut self, r: &DivisionRing, b: usize, row: Row) {
        assert_eq!(row.len(), self.width, "row width");
        if row_is_zero(r, &row) {
            self.rows.remove(&b);
        } else {
            self.rows.insert(b, row);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.rows.keys().next_back().copied()
    }

    fn zip_with(&self, r: &DivisionRing, o: &Sparse, f: impl Fn(&[Scalar], &[Scalar]) -> Row) -> Sparse {
        assert_eq!(self.width, o.width, "row width");
        let mut out = Sparse::zero(self.width);
        let z = zero_row(r, self.width);
        let keys: std::collections::BTreeSet<usize> = self.support().chain(o.support()).collect();
        for b in keys {
            let x = self.rows.get(&b).unwrap_or(&z);
            let y = o.rows.get(&b).unwrap_or(&z);
            out.set(r, b, f(x, y));
        }
        out
    }

    pub fn add(&self, r: &DivisionRing, o: &Sparse) -> Sparse {
        self.zip_with(r, o, |x, y| row_add(r, x, y))
    }

    pub fn sub(&self, r: &DivisionRing, o: &Sparse) -> Sparse {
        self.zip_with(r, o, |x, y| row_sub(r, x, y))
    }

    pub fn neg(&self, r: &DivisionRing) -> Sparse {
        Sparse { width: self.width, rows: self.rows.iter().map(|(b, x)| (*b, row_neg(r, x))).collect() }
    }

    /// Pointwise `x_b ↦ x_b·A`.
    pub fn times(&self, r: &DivisionRing, a: &Mat) -> Sparse {
        let mut out = Sparse::zero(a.cols());
        for (b, x) in &self.rows {
            out.set(r, *b, row_times(r, x, a));
        }
        out
    }

    /// Rows `[x_b, y_b]`.
    pub fn concat(&self, r: &DivisionRing, o: &Sparse) -> Sparse {
        let mut out = Sparse::zero(self.width + o.width);
        let keys: std::collections::BTreeSet<usize> = self.support().chain(o.support()).collect();
        for b in keys {
            let mut row = self.row_or_zero(r, b);
            row.extend(o.row_or_zero(r, b));
            out.set(r, b, row);
        }
        out
    }

    /// Columns `lo..hi` of every row.
    pub fn columns(&self, r: &DivisionRing, lo: usize, hi: usize) -> Sparse {
        let mut out = Sparse::zero(hi - lo);
        for (b, x) in &self.rows {
            out.set(r, *b, x[lo..hi].to_vec());
        }
        out
    }

    pub fn from_rows(r: &DivisionRing, width: usize, rows: impl IntoIterator<Item = (usize, Row)>) -> Result<Self> {
        let mut out = Sparse::zero(width);
        for (b, row) in rows {
            if row.len() != width {
                return Err(Error::Shape(format!("expected rows of {width} entries, got {}", row.len())));
            }
            out.set(r, b, row);
        }
        Ok(out)
    }
}

/// An element of `M^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    power: usize,
    parts: Vec<Sparse>,
}

/// An element of `M` itself.
pub type ModuleElement = Vector;

impl Vector {
    pub fn zero(m: &ModuleDescriptor, n: usize) -> Self {
        Vector { power: n, parts: (0..m.k()).map(|i| Sparse::zero(m.width(i, n))).collect() }
    }

    pub fn from_parts(m: &ModuleDescriptor, n: usize, parts: Vec<Sparse>) -> Result<Self> {
        if parts.len() != m.k() {
            return Err(Error::Shape("one part per ring component expected".into()));
        }
        for (i, p) in parts.iter().enumerate() {
            if p.width() != m.width(i, n) {
                return Err(Error::Shape(format!(
                    "component {i} rows must have {} entries, got {}",
                    m.width(i, n),
                    p.width()
                )));
            }
            if let Some(b) = p.max_index() {
                if !m.has_index(i, b) {
                    return Err(Error::Shape(format!("basis index {b} exceeds the rank of component {i}")));
                }
            }
        }
        Ok(Vector { power: n, parts })
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn parts(&self) -> &[Sparse] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &Sparse {
        &self.parts[i]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Sparse::is_zero)
    }

    pub fn add(&self, m: &ModuleDescriptor, o: &Vector) -> Vector {
        assert_eq!(self.power, o.power, "vector powers differ");
        let parts = (0..m.k()).map(|i| self.parts[i].add(m.field(i), &o.parts[i])).collect();
        Vector { power: self.power, parts }
    }

    pub fn sub(&self, m: &ModuleDescriptor, o: &Vector) -> Vector {
        assert_eq!(self.power, o.power, "vector powers differ");
        let parts = (0..m.k()).map(|i| self.parts[i].sub(m.field(i), &o.parts[i])).collect();
        Vector { power: self.power, parts }
    }

    pub fn neg(&self, m: &ModuleDescriptor) -> Vector {
        let parts = (0..m.k()).map(|i| self.parts[i].neg(m.field(i))).collect();
        Vector { power: self.power, parts }
    }

    /// `(x, y) ∈ M^{n+n'}`.
    pub fn concat(&self, m: &ModuleDescriptor, o: &Vector) -> Vector {
        let parts = (0..m.k()).map(|i| self.parts[i].concat(m.field(i), &o.parts[i])).collect();
        Vector { power: self.power + o.power, parts }
    }

    /// `(x, 0) ∈ M^{n'}`.
    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> Vector {
        assert!(n >= self.power, "cannot pad to a smaller power");
        self.concat(m, &Vector::zero(m, n - self.power))
    }

    /// Coordinates `lo..hi` as an element of `M^{hi-lo}`.
    pub fn slice(&self, m: &ModuleDescriptor, lo: usize, hi: usize) -> Vector {
        let parts = (0..m.k())
            .map(|i| self.parts[i].columns(m.field(i), lo * m.q(i), hi * m.q(i)))
            .collect();
        Vector { power: hi - lo, parts }
    }

    /// The `n` coordinates of an element of `M^n`.
    pub fn coordinates(&self, m: &ModuleDescriptor) -> Vec<ModuleElement> {
        (0..self.power).map(|j| self.slice(m, j, j + 1)).collect()
    }

    pub fn from_coordinates(m: &ModuleDescriptor, xs: &[ModuleElement]) -> Vector {
        xs.iter().fold(Vector::zero(m, 0), |acc, x| acc.concat(m, x))
    }

    /// Component `i` alone, as an element over the restricted module.
    pub fn component(&self, i: usize) -> Vector {
        Vector { power: self.power, parts: vec![self.parts[i].clone()] }
    }

    /// Reassembles per-component vectors into one.
    pub fn from_components(comps: &[Vector]) -> Vector {
        let power = comps.first().map_or(0, |v| v.power);
        Vector { power, parts: comps.iter().map(|v| v.parts[0].clone()).collect() }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.parts.iter().filter_map(Sparse::max_index).max()
    }

    /// Same data read with another power (Morita reblocking).
    pub(crate) fn with_power(&self, n: usize) -> Vector {
        Vector { power: n, parts: self.parts.clone() }
    }
}

/// `x·s`: right action of `S` on `M^n`, coordinatewise.
pub fn scalar_act(m: &ModuleDescriptor, x: &Vector, s: &RingElement) -> Result<Vector> {
    m.ring().check(s)?;
    let parts = (0..m.k())
        .map(|i| {
            let r = m.field(i);
            let q = m.q(i);
            let mut out = Sparse::zero(x.parts[i].width());
            for (b, row) in x.parts[i].rows() {
                let mut nr = Vec::with_capacity(row.len());
                for chunk in row.chunks(q) {
                    nr.extend(row_times(r, chunk, &s.parts[i]));
                }
                out.set(r, *b, nr);
            }
            out
        })
        .collect();
    Ok(Vector { power: x.power, parts })
}

/// The module over `M_{q'}(R)` obtained by reading `q` consecutive
/// coordinates as one, where `q' = q·q_src`. Ranks are unchanged, so the
/// underlying `R`-rank is multiplied by `q`.
pub fn morita_module(m: &ModuleDescriptor, q: usize) -> Result<ModuleDescriptor> {
    if m.k() != 1 {
        return Err(Error::Shape("Morita translation needs a single ring component".into()));
    }
    if q == 0 {
        return Err(Error::Shape("q must be at least 1".into()));
    }
    let ring = RingDescriptor::simple(m.q(0) * q, m.field(0).clone());
    ModuleDescriptor::new(ring, m.ranks.clone())
}

/// Target power when `n` coordinates are blocked `q` at a time.
pub(crate) fn morita_power(m: &ModuleDescriptor, n: usize, q: usize) -> Result<usize> {
    if m.k() != 1 {
        return Err(Error::Shape("Morita translation needs a single ring component".into()));
    }
    if q == 0 || !n.is_multiple_of(q) {
        return Err(Error::Shape(format!("{n} coordinates cannot be blocked into groups of {q}")));
    }
    Ok(n / q)
}

/// `morita_translate` for vectors.
pub fn morita_vector(m: &ModuleDescriptor, v: &Vector, q: usize) -> Result<(ModuleDescriptor, Vector)> {
    let n = morita_power(m, v.power(), q)?;
    Ok((morita_module(m, q)?, v.with_power(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5_row(xs: &[i64]) -> Row {
        let f = DivisionRing::gf(5);
        xs.iter().map(|&x| f.from_int(x)).collect()
    }

    #[test]
    fn act_by_swap_matrix() {
        let f = DivisionRing::gf(5);
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(2, f.clone()), Rank::Omega);
        let x = Vector::from_parts(&m, 1, vec![Sparse::from_rows(&f, 2, [(0, f5_row(&[1, 2]))]).unwrap()]).unwrap();
        let s = RingElement { parts: vec![Mat::from_rows(vec![f5_row(&[0, 1]), f5_row(&[1, 0])], 2).unwrap()] };
        let y = scalar_act(&m, &x, &s).unwrap();
        assert_eq!(y.part(0).get(0).unwrap(), &f5_row(&[2, 1]));
        assert_eq!(scalar_act(&m, &x, &m.ring().one()).unwrap(), x);
        assert!(scalar_act(&m, &x, &m.ring().zero()).unwrap().is_zero());
    }

    #[test]
    fn morita_blocks_coordinates() {
        let f = DivisionRing::gf(5);
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, f.clone()), Rank::Omega);
        let v = Vector::from_parts(&m, 4, vec![Sparse::from_rows(&f, 4, [(0, f5_row(&[1, 2, 3, 4]))]).unwrap()]).unwrap();
        let (m2, w) = morita_vector(&m, &v, 2).unwrap();
        let coords = w.coordinates(&m2);
        assert_eq!(coords.len(), 2);
        assert_eq!(coords[0].part(0).get(0).unwrap(), &f5_row(&[1, 2]));
        assert_eq!(coords[1].part(0).get(0).unwrap(), &f5_row(&[3, 4]));
        let free = ModuleDescriptor::uniform(RingDescriptor::simple(1, f), Rank::Finite(3));
        assert_eq!(morita_module(&free, 2).unwrap().underlying_rank(0), Some(6));
        assert!(morita_vector(&m, &v, 3).is_err());
    }
}
