//! Blocks (a coset minus finitely many proper subcosets), definable sets
//! as finite disjoint unions of blocks, and their K₀ classes.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::modules::{ModuleDescriptor, Rank, Sparse, Vector};
use crate::ppsets::{AffineMap, Colour, Coset};
use crate::rings::matrix::{row_add, row_scale};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    ambient: Coset,
    holes: Vec<Coset>,
}

impl Block {
    /// Canonical block, or `None` when the holes exhaust the ambient coset.
    pub fn new(m: &ModuleDescriptor, ambient: Coset, holes: Vec<Coset>) -> Option<Block> {
        let mut kept = Vec::new();
        for h in holes {
            match ambient.intersect(m, &h) {
                None => continue,
                Some(x) if x == ambient => return None,
                Some(x) => kept.push(x),
            }
        }
        Some(Block { holes: maximal_cosets(m, kept), ambient })
    }

    pub fn from_coset(c: Coset) -> Block {
        Block { ambient: c, holes: vec![] }
    }

    pub fn ambient(&self) -> &Coset {
        &self.ambient
    }

    pub fn holes(&self) -> &[Coset] {
        &self.holes
    }

    pub fn power(&self) -> usize {
        self.ambient.power()
    }

    pub fn colour(&self) -> Colour {
        self.ambient.colour()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.ambient.dims()
    }

    pub fn contains_point(&self, m: &ModuleDescriptor, x: &Vector) -> bool {
        self.ambient.contains_point(m, x) && !self.holes.iter().any(|h| h.contains_point(m, x))
    }

    pub fn intersect_coset(&self, m: &ModuleDescriptor, c: &Coset) -> Option<Block> {
        let a = self.ambient.intersect(m, c)?;
        Block::new(m, a, self.holes.clone())
    }

    pub fn minus_coset(&self, m: &ModuleDescriptor, c: &Coset) -> Option<Block> {
        let mut holes = self.holes.clone();
        holes.push(c.clone());
        Block::new(m, self.ambient.clone(), holes)
    }

    pub fn intersect(&self, m: &ModuleDescriptor, o: &Block) -> Option<Block> {
        let a = self.ambient.intersect(m, &o.ambient)?;
        let mut holes = self.holes.clone();
        holes.extend(o.holes.iter().cloned());
        Block::new(m, a, holes)
    }

    /// `self ∖ o` as disjoint blocks.
    pub fn minus(&self, m: &ModuleDescriptor, o: &Block) -> Vec<Block> {
        let mut out = Vec::new();
        if self.ambient.intersect(m, &o.ambient).is_none() {
            return vec![self.clone()];
        }
        if let Some(b) = self.minus_coset(m, &o.ambient) {
            out.push(b);
        }
        for (j, h) in o.holes.iter().enumerate() {
            let mut piece = self.intersect_coset(m, h);
            for prev in &o.holes[..j] {
                piece = piece.and_then(|p| p.minus_coset(m, prev));
            }
            if let Some(p) = piece {
                out.push(p);
            }
        }
        out
    }

    pub fn image(&self, m: &ModuleDescriptor, f: &AffineMap) -> Block {
        let ambient = self.ambient.image(m, f);
        let holes = self.holes.iter().map(|h| h.image(m, f)).collect();
        Block::new(m, ambient, holes).expect("affine images of blocks are blocks")
    }

    /// `(A × A') ∖ (H × A' ∪ A × H')`.
    pub fn product(&self, m: &ModuleDescriptor, o: &Block) -> Block {
        let ambient = self.ambient.product(m, &o.ambient);
        let mut holes: Vec<Coset> = self.holes.iter().map(|h| h.product(m, &o.ambient)).collect();
        holes.extend(o.holes.iter().map(|h| self.ambient.product(m, h)));
        Block::new(m, ambient, holes).expect("products of non-empty blocks are non-empty")
    }

    /// `B × {0}` inside `M^n`.
    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> Block {
        let z = Vector::zero(m, n - self.power());
        self.product(m, &Block::from_coset(Coset::point(m, &z)))
    }

    pub fn translate(&self, m: &ModuleDescriptor, v: &Vector) -> Block {
        Block {
            ambient: self.ambient.translate(m, v),
            holes: self.holes.iter().map(|h| h.translate(m, v)).collect(),
        }
    }

    pub fn k0(&self, m: &ModuleDescriptor) -> K0Class {
        let mut memo = HashMap::new();
        K0Class::monomial(self.dims()).sub(&k0_union(m, self.holes.clone(), &mut memo))
    }

    pub fn max_index(&self) -> Option<usize> {
        std::iter::once(&self.ambient).chain(&self.holes).filter_map(Coset::max_index).max()
    }

    pub(crate) fn with_power(&self, n: usize) -> Block {
        Block {
            ambient: self.ambient.with_power(n),
            holes: self.holes.iter().map(|h| h.with_power(n)).collect(),
        }
    }

    /// A member of the block: the representative, then single steps along
    /// basis directions in basis-index-major order, then a point built on
    /// fresh basis indices (rank ω) or a generic curve (finite rank).
    pub fn find_point(&self, m: &ModuleDescriptor) -> Result<Vector> {
        let amb = &self.ambient;
        let n = amb.power();
        let rep = amb.rep();
        let ok = |x: &Vector| !self.holes.iter().any(|h| h.contains_point(m, x));
        if ok(rep) {
            return Ok(rep.clone());
        }
        let top = self.max_index().map_or(0, |b| b + 1);
        for b in 0..=top {
            for i in 0..m.k() {
                if !m.has_index(i, b) {
                    continue;
                }
                let r = m.field(i);
                for u in amb.subspace(i).basis() {
                    for t in 1..=3u64 {
                        let s = r.enumerate(t);
                        if r.is_zero(&s) {
                            continue;
                        }
                        let x = rep.add(m, &crate::ppsets::unit_vector(m, n, i, b, row_scale(r, &s, u)));
                        if ok(&x) {
                            return Ok(x);
                        }
                    }
                }
            }
        }
        // fresh indices work in every rank-ω component
        let fresh = |t: u64| -> Vector {
            let parts = (0..m.k())
                .map(|i| {
                    let r = m.field(i);
                    let basis = amb.subspace(i).basis();
                    let mut s = rep.part(i).clone();
                    match m.rank(i) {
                        Rank::Omega => {
                            for (j, u) in basis.iter().enumerate() {
                                s.set(r, top + 1 + j, u.clone());
                            }
                        }
                        Rank::Finite(rk) => {
                            let d = basis.len();
                            for b in 0..rk {
                                let mut row = s.row_or_zero(r, b);
                                for (j, u) in basis.iter().enumerate() {
                                    let c = curve_coefficient(r, t, b * d + j);
                                    row = row_add(r, &row, &row_scale(r, &c, u));
                                }
                                s.set(r, b, row);
                            }
                        }
                    }
                    s
                })
                .collect::<Vec<Sparse>>();
            Vector::from_parts(m, n, parts).expect("shape")
        };
        let finite_rank = (0..m.k()).any(|i| matches!(m.rank(i), Rank::Finite(_)) && amb.subspace(i).dim() > 0);
        let limit: u64 = if finite_rank { 200_000 } else { 1 };
        for t in 1..=limit {
            let x = fresh(t);
            if ok(&x) {
                return Ok(x);
            }
        }
        Err(Error::EmptySet)
    }
}

/// Coefficient number `idx` of the search curve at parameter `t`: `t^idx`
/// over infinite rings, the base-`|R|` digit `idx` of `t` over finite fields.
fn curve_coefficient(r: &crate::rings::DivisionRing, t: u64, idx: usize) -> crate::rings::Scalar {
    match r.cardinality() {
        Some(q) => {
            let mut rest = t;
            for _ in 0..idx {
                rest /= q;
            }
            r.enumerate(rest % q)
        }
        None => {
            let v = BigInt::from(t).pow(idx as u32);
            r.from_rational(&num_rational::BigRational::from_integer(v)).unwrap()
        }
    }
}

/// Drops duplicates and cosets contained in another one; sorted.
fn maximal_cosets(m: &ModuleDescriptor, mut cs: Vec<Coset>) -> Vec<Coset> {
    cs.sort();
    cs.dedup();
    let keep: Vec<bool> = (0..cs.len())
        .map(|i| !(0..cs.len()).any(|j| j != i && cs[j].contains(m, &cs[i]) && (cs[i] != cs[j])))
        .collect();
    cs.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect()
}

/// K₀ class of a finite union of cosets by inclusion–exclusion on the
/// first member.
fn k0_union(m: &ModuleDescriptor, cs: Vec<Coset>, memo: &mut HashMap<Vec<Coset>, K0Class>) -> K0Class {
    let cs = maximal_cosets(m, cs);
    if cs.is_empty() {
        return K0Class::zero();
    }
    if let Some(v) = memo.get(&cs) {
        return v.clone();
    }
    let first = cs[0].clone();
    let rest: Vec<Coset> = cs[1..].to_vec();
    let meets: Vec<Coset> = rest.iter().filter_map(|c| c.intersect(m, &first)).collect();
    let v = K0Class::monomial(first.dims())
        .add(&k0_union(m, rest, memo))
        .sub(&k0_union(m, meets, memo));
    memo.insert(cs, v.clone());
    v
}

/// Integer polynomial in `X_1..X_k`, one monomial `X^d̄` per colour `d̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct K0Class {
    terms: BTreeMap<Vec<usize>, BigInt>,
}

impl K0Class {
    pub fn zero() -> Self {
        K0Class::default()
    }

    pub fn monomial(d: Vec<usize>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(d, BigInt::one());
        K0Class { terms }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, d: &[usize]) -> BigInt {
        self.terms.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, d: Vec<usize>, c: BigInt) {
        let e = self.terms.entry(d.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn add(&self, o: &K0Class) -> K0Class {
        let mut out = self.clone();
        for (d, c) in &o.terms {
            out.insert(d.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> K0Class {
        K0Class { terms: self.terms.iter().map(|(d, c)| (d.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &K0Class) -> K0Class {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &K0Class) -> K0Class {
        let mut out = K0Class::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &o.terms {
                let d: Vec<usize> = d1.iter().zip(d2).map(|(a, b)| a + b).collect();
                out.insert(d, c1 * c2);
            }
        }
        out
    }

    /// Componentwise maximum exponent over the monomials, bottom for 0.
    pub fn degree(&self) -> Colour {
        self.terms.keys().fold(Colour::Bottom, |acc, d| acc.join(&Colour::Dim(d.clone())))
    }

    /// Value at `X_i = x_i`.
    pub fn eval(&self, xs: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|(d, c)| {
                d.iter().zip(xs).fold(c.clone(), |acc, (e, x)| acc * Pow::pow(x, *e as u32))
            })
            .sum()
    }
}

impl std::fmt::Display for K0Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms.iter().rev() {
            let mono = monomial_text(d);
            let neg = c < &BigInt::zero();
            let abs = if neg { -c } else { c.clone() };
            let body = match (mono.is_empty(), abs.is_one()) {
                (true, _) => abs.to_string(),
                (false, true) => mono,
                (false, false) => format!("{abs}*{mono}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

fn monomial_text(d: &[usize]) -> String {
    let var = |i: usize| if d.len() == 1 { "X".to_string() } else { format!("X{}", i + 1) };
    d.iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, e)| if *e == 1 { var(i) } else { format!("{}^{}", var(i), e) })
        .collect::<Vec<_>>()
        .join("*")
}

/// A finite disjoint union of blocks in `M^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefinableSet {
    power: usize,
    blocks: Vec<Block>,
}

impl DefinableSet {
    pub fn empty(n: usize) -> Self {
        DefinableSet { power: n, blocks: vec![] }
    }

    pub fn full(m: &ModuleDescriptor, n: usize) -> Self {
        DefinableSet { power: n, blocks: vec![Block::from_coset(Coset::full(m, n))] }
    }

    pub fn from_block(b: Block) -> Self {
        DefinableSet { power: b.power(), blocks: vec![b] }
    }

    pub fn from_coset(c: Coset) -> Self {
        DefinableSet::from_block(Block::from_coset(c))
    }

    /// Blocks already known to be pairwise disjoint.
    pub(crate) fn from_disjoint(n: usize, blocks: Vec<Block>) -> Self {
        DefinableSet { power: n, blocks }
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains_point(&self, m: &ModuleDescriptor, x: &Vector) -> bool {
        self.blocks.iter().any(|b| b.contains_point(m, x))
    }

    pub fn union(&self, m: &ModuleDescriptor, o: &DefinableSet) -> DefinableSet {
        let mut blocks = self.blocks.clone();
        blocks.extend(o.minus(m, self).blocks);
        DefinableSet { power: self.power, blocks }
    }

    pub fn intersect(&self, m: &ModuleDescriptor, o: &DefinableSet) -> DefinableSet {
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &o.blocks {
                if let Some(c) = a.intersect(m, b) {
                    blocks.push(c);
                }
            }
        }
        DefinableSet { power: self.power, blocks }
    }

    pub fn intersect_block(&self, m: &ModuleDescriptor, b: &Block) -> DefinableSet {
        DefinableSet { power: self.power, blocks: self.blocks.iter().filter_map(|a| a.intersect(m, b)).collect() }
    }

    pub fn minus_block(&self, m: &ModuleDescriptor, b: &Block) -> DefinableSet {
        DefinableSet { power: self.power, blocks: self.blocks.iter().flat_map(|a| a.minus(m, b)).collect() }
    }

    pub fn minus(&self, m: &ModuleDescriptor, o: &DefinableSet) -> DefinableSet {
        o.blocks.iter().fold(self.clone(), |acc, b| acc.minus_block(m, b))
    }

    pub fn is_subset(&self, m: &ModuleDescriptor, o: &DefinableSet) -> bool {
        self.minus(m, o).is_empty()
    }

    pub fn same_set(&self, m: &ModuleDescriptor, o: &DefinableSet) -> bool {
        self.power == o.power && self.is_subset(m, o) && o.is_subset(m, self)
    }

    pub fn product(&self, m: &ModuleDescriptor, o: &DefinableSet) -> DefinableSet {
        let mut blocks = Vec::new();
        for a in &self.blocks {
            for b in &o.blocks {
                blocks.push(a.product(m, b));
            }
        }
        DefinableSet { power: self.power + o.power, blocks }
    }

    pub fn image(&self, m: &ModuleDescriptor, f: &AffineMap) -> DefinableSet {
        DefinableSet { power: self.power, blocks: self.blocks.iter().map(|b| b.image(m, f)).collect() }
    }

    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> DefinableSet {
        DefinableSet { power: n, blocks: self.blocks.iter().map(|b| b.pad(m, n)).collect() }
    }

    pub fn dim(&self) -> Colour {
        dim_of(self)
    }

    pub fn k0(&self, m: &ModuleDescriptor) -> Result<K0Class> {
        k0_class(m, self)
    }

    pub fn find_point(&self, m: &ModuleDescriptor) -> Result<Vector> {
        find_point(m, self)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.blocks.iter().filter_map(Block::max_index).max()
    }

    pub(crate) fn with_power(&self, n: usize) -> DefinableSet {
        DefinableSet { power: n, blocks: self.blocks.iter().map(|b| b.with_power(n)).collect() }
    }
}

/// Disjoint decomposition of a union of blocks.
pub fn normalize(m: &ModuleDescriptor, n: usize, blocks: &[Block]) -> Result<DefinableSet> {
    let mut out: Vec<Block> = Vec::new();
    for b in blocks {
        if b.power() != n {
            return Err(Error::Mismatch("blocks live in different powers".into()));
        }
        let mut pieces = vec![b.clone()];
        for prev in &out {
            pieces = pieces.iter().flat_map(|p| p.minus(m, prev)).collect();
        }
        out.extend(pieces);
    }
    Ok(DefinableSet { power: n, blocks: out })
}

pub fn dim_of(d: &DefinableSet) -> Colour {
    d.blocks.iter().fold(Colour::Bottom, |acc, b| acc.join(&b.colour()))
}

pub fn k0_class(m: &ModuleDescriptor, d: &DefinableSet) -> Result<K0Class> {
    m.require_infinite("k0_class")?;
    Ok(d.blocks.iter().fold(K0Class::zero(), |acc, b| acc.add(&b.k0(m))))
}

pub fn find_point(m: &ModuleDescriptor, d: &DefinableSet) -> Result<Vector> {
    d.blocks.first().ok_or(Error::EmptySet)?.find_point(m)
}

/// Morita reblocking of a definable set over a one-component ring.
pub fn morita_set(m: &ModuleDescriptor, d: &DefinableSet, q: usize) -> Result<(ModuleDescriptor, DefinableSet)> {
    let n = crate::modules::morita_power(m, d.power(), q)?;
    Ok((crate::modules::morita_module(m, q)?, d.with_power(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppsets::{unit_vector, Subspace};
    use crate::rings::{DivisionRing, RingDescriptor, Row};

    fn setup(r: DivisionRing) -> ModuleDescriptor {
        ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega)
    }

    fn row(r: &DivisionRing, xs: &[i64]) -> Row {
        xs.iter().map(|&x| r.from_int(x)).collect()
    }

    #[test]
    fn punctured_line() {
        let r = DivisionRing::gf(5);
        let m = setup(r.clone());
        let origin = Coset::point(&m, &Vector::zero(&m, 1));
        let b = Block::new(&m, Coset::full(&m, 1), vec![origin]).unwrap();
        let d = DefinableSet::from_block(b);
        assert_eq!(d.k0(&m).unwrap().to_string(), "X - 1");
        let p = d.find_point(&m).unwrap();
        assert_eq!(p, unit_vector(&m, 1, 0, 0, row(&r, &[1])));
        assert_eq!(DefinableSet::full(&m, 2).k0(&m).unwrap().to_string(), "X^2");
        assert!(DefinableSet::empty(1).k0(&m).unwrap().is_zero());
        assert_eq!(DefinableSet::empty(1).dim(), Colour::Bottom);
        assert_eq!(DefinableSet::empty(1).find_point(&m), Err(Error::EmptySet));
    }

    #[test]
    fn overlapping_cosets_normalize() {
        let r = DivisionRing::Rationals;
        let m = setup(r.clone());
        let l1 = Coset::new(&m, vec![Subspace::span(&r, 2, &[row(&r, &[1, 0])]).unwrap()], Vector::zero(&m, 2)).unwrap();
        let l2 = Coset::new(&m, vec![Subspace::span(&r, 2, &[row(&r, &[0, 1])]).unwrap()], Vector::zero(&m, 2)).unwrap();
        let d = normalize(&m, 2, &[Block::from_coset(l1.clone()), Block::from_coset(l2.clone())]).unwrap();
        assert_eq!(d.blocks().len(), 2);
        assert_eq!(d.k0(&m).unwrap().to_string(), "2*X - 1");
        let x = unit_vector(&m, 2, 0, 4, row(&r, &[0, 7]));
        assert!(d.contains_point(&m, &x));
        assert_eq!(d.dim(), Colour::Dim(vec![1]));
    }

    #[test]
    fn finite_rank_search() {
        let r = DivisionRing::Rationals;
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, r.clone()), Rank::Finite(2));
        let holes: Vec<Coset> = (0..4)
            .map(|t| Coset::point(&m, &unit_vector(&m, 1, 0, 0, row(&r, &[t]))))
            .collect();
        let b = Block::new(&m, Coset::full(&m, 1), holes).unwrap();
        let p = b.find_point(&m).unwrap();
        assert!(b.contains_point(&m, &p));
    }
}
