//! Definable bijections as finitely many affine pieces on blocks.

use crate::defsets::{normalize, Block, DefinableSet};
use crate::error::{Error, Result};
use crate::modules::{ModuleDescriptor, Vector};
use crate::ppsets::{AffineMap, Colour, Coset};
use crate::rings::matrix::unit_row;
use crate::rings::{Mat, Row};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    domain: Block,
    map: AffineMap,
    image: Block,
}

impl Piece {
    pub fn new(m: &ModuleDescriptor, domain: Block, map: AffineMap) -> Result<Piece> {
        if domain.power() != map.power() {
            return Err(Error::Shape("piece domain and map live in different powers".into()));
        }
        let image = domain.image(m, &map);
        Ok(Piece { domain, map, image })
    }

    pub fn domain(&self) -> &Block {
        &self.domain
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn image(&self) -> &Block {
        &self.image
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseBijection {
    power: usize,
    source: DefinableSet,
    target: DefinableSet,
    pieces: Vec<Piece>,
}

impl PiecewiseBijection {
    /// A map with source and target read off the pieces.
    pub fn from_pieces(n: usize, pieces: Vec<Piece>) -> PiecewiseBijection {
        let source = DefinableSet::from_disjoint(n, pieces.iter().map(|p| p.domain.clone()).collect());
        let target = DefinableSet::from_disjoint(n, pieces.iter().map(|p| p.image.clone()).collect());
        PiecewiseBijection { power: n, source, target, pieces }
    }

    /// A map with declared source and target; run [`validate`] to check it.
    pub fn with_boundary(source: DefinableSet, target: DefinableSet, pieces: Vec<Piece>) -> Result<Self> {
        let n = source.power();
        if target.power() != n || pieces.iter().any(|p| p.domain.power() != n) {
            return Err(Error::Shape("source, target and pieces must share one power".into()));
        }
        Ok(PiecewiseBijection { power: n, source, target, pieces })
    }

    pub fn identity(d: &DefinableSet, m: &ModuleDescriptor) -> PiecewiseBijection {
        let id = AffineMap::identity(m, d.power());
        let pieces = d.blocks().iter().map(|b| Piece { domain: b.clone(), map: id.clone(), image: b.clone() }).collect();
        PiecewiseBijection { power: d.power(), source: d.clone(), target: d.clone(), pieces }
    }

    /// One affine map restricted to a set.
    pub fn affine_on(m: &ModuleDescriptor, d: &DefinableSet, f: &AffineMap) -> PiecewiseBijection {
        let pieces: Vec<Piece> = d.blocks().iter().map(|b| Piece::new(m, b.clone(), f.clone()).unwrap()).collect();
        let mut g = PiecewiseBijection::from_pieces(d.power(), pieces);
        g.source = d.clone();
        g
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn source(&self) -> &DefinableSet {
        &self.source
    }

    pub fn target(&self) -> &DefinableSet {
        &self.target
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn eval(&self, m: &ModuleDescriptor, x: &Vector) -> Option<Vector> {
        self.pieces.iter().find(|p| p.domain.contains_point(m, x)).map(|p| p.map.apply(m, x))
    }

    /// All violations of the bijection contract; empty when valid.
    pub fn validate(&self, m: &ModuleDescriptor) -> Vec<String> {
        let mut v = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for k in 0..m.k() {
                if !p.map.matrix(k).is_invertible(m.field(k)) {
                    v.push(format!("piece {i}: matrix of component {k} is not invertible"));
                }
            }
        }
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                if self.pieces[i].domain.intersect(m, &self.pieces[j].domain).is_some() {
                    v.push(format!("domains overlap: pieces {i} and {j}"));
                }
                if self.pieces[i].image.intersect(m, &self.pieces[j].image).is_some() {
                    v.push(format!("images overlap: pieces {i} and {j}"));
                }
            }
        }
        let doms = DefinableSet::from_disjoint(self.power, self.pieces.iter().map(|p| p.domain.clone()).collect());
        let imgs = DefinableSet::from_disjoint(self.power, self.pieces.iter().map(|p| p.image.clone()).collect());
        if !doms.same_set(m, &self.source) {
            v.push("domains do not cover exactly the source".into());
        }
        if !imgs.same_set(m, &self.target) {
            v.push("images do not cover exactly the target".into());
        }
        v
    }

    pub fn check(&self, m: &ModuleDescriptor) -> Result<()> {
        let v = self.validate(m);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMap(v))
        }
    }

    pub fn is_automorphism(&self, m: &ModuleDescriptor) -> bool {
        self.source.same_set(m, &self.target)
    }

    /// `self ∘ g`, assuming `target(g) = source(self)`.
    pub(crate) fn after(&self, m: &ModuleDescriptor, g: &PiecewiseBijection) -> PiecewiseBijection {
        let mut pieces = Vec::new();
        for p in &g.pieces {
            let pinv = p.map.inverse(m);
            for r in &self.pieces {
                let Some(mid) = p.image.intersect(m, &r.domain) else { continue };
                let domain = mid.image(m, &pinv);
                let map = p.map.then(m, &r.map);
                let image = mid.image(m, &r.map);
                pieces.push(Piece { domain, map, image });
            }
        }
        PiecewiseBijection { power: self.power, source: g.source.clone(), target: self.target.clone(), pieces }
    }

    pub fn inverse(&self, m: &ModuleDescriptor) -> PiecewiseBijection {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { domain: p.image.clone(), map: p.map.inverse(m), image: p.domain.clone() })
            .collect();
        PiecewiseBijection { power: self.power, source: self.target.clone(), target: self.source.clone(), pieces }
    }

    /// Pieces cut down to the points they move.
    pub fn restrict_to_support(&self, m: &ModuleDescriptor) -> PiecewiseBijection {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let moved = match p.map.fixed_points(m) {
                None => Some(p.domain.clone()),
                Some(fix) => p.domain.minus_coset(m, &fix),
            };
            if let Some(d) = moved {
                let image = d.image(m, &p.map);
                pieces.push(Piece { domain: d, map: p.map.clone(), image });
            }
        }
        PiecewiseBijection::from_pieces(self.power, pieces)
    }

    /// `f × id_{0}` on `M^{n'}` via `x ↦ (x, 0)`.
    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> PiecewiseBijection {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { domain: p.domain.pad(m, n), map: p.map.pad(m, n), image: p.image.pad(m, n) })
            .collect();
        PiecewiseBijection { power: n, source: self.source.pad(m, n), target: self.target.pad(m, n), pieces }
    }

    /// `f × g` on the product of the sources.
    pub fn product(&self, m: &ModuleDescriptor, g: &PiecewiseBijection) -> PiecewiseBijection {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for r in &g.pieces {
                pieces.push(Piece {
                    domain: p.domain.product(m, &r.domain),
                    map: p.map.product(m, &r.map),
                    image: p.image.product(m, &r.image),
                });
            }
        }
        PiecewiseBijection {
            power: self.power + g.power,
            source: self.source.product(m, &g.source),
            target: self.target.product(m, &g.target),
            pieces,
        }
    }

    /// Extension by the identity to all of `M^n`.
    pub fn globalized(&self, m: &ModuleDescriptor) -> PiecewiseBijection {
        globalize(m, self)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.pieces
            .iter()
            .flat_map(|p| [p.domain.max_index(), p.image.max_index(), p.map.max_index()])
            .flatten()
            .max()
    }

    pub(crate) fn with_power(&self, n: usize) -> PiecewiseBijection {
        PiecewiseBijection {
            power: n,
            source: self.source.with_power(n),
            target: self.target.with_power(n),
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { domain: p.domain.with_power(n), map: p.map.with_power(n), image: p.image.with_power(n) })
                .collect(),
        }
    }

    pub(crate) fn from_parts_unchecked(n: usize, source: DefinableSet, target: DefinableSet, pieces: Vec<Piece>) -> Self {
        PiecewiseBijection { power: n, source, target, pieces }
    }
}

/// `f ∘ g`.
pub fn compose(m: &ModuleDescriptor, f: &PiecewiseBijection, g: &PiecewiseBijection) -> Result<PiecewiseBijection> {
    if f.power != g.power || !g.target.same_set(m, &f.source) {
        return Err(Error::Mismatch("target of the inner map differs from the source of the outer map".into()));
    }
    Ok(f.after(m, g))
}

pub fn invert(m: &ModuleDescriptor, f: &PiecewiseBijection) -> PiecewiseBijection {
    f.inverse(m)
}

/// Points moved by an automorphism.
pub fn support(m: &ModuleDescriptor, f: &PiecewiseBijection) -> Result<DefinableSet> {
    if !f.is_automorphism(m) {
        return Err(Error::PreconditionFailed("support is defined for automorphisms".into()));
    }
    let r = f.restrict_to_support(m);
    Ok(DefinableSet::from_disjoint(f.power, r.pieces.into_iter().map(|p| p.domain).collect()))
}

pub fn dim_of_map(m: &ModuleDescriptor, f: &PiecewiseBijection) -> Result<Colour> {
    Ok(support(m, f)?.dim())
}

/// The automorphism of `ambient` agreeing with `f` on `source(f)` and
/// fixing everything else.
pub fn extend_by_identity(m: &ModuleDescriptor, f: &PiecewiseBijection, ambient: &DefinableSet) -> Result<PiecewiseBijection> {
    if ambient.power() != f.power {
        return Err(Error::Mismatch("ambient lives in another power".into()));
    }
    if !f.is_automorphism(m) {
        return Err(Error::PreconditionFailed("only automorphisms extend by the identity".into()));
    }
    if !f.source.is_subset(m, ambient) {
        return Err(Error::PreconditionFailed("the set is not contained in the ambient set".into()));
    }
    Ok(extend_unchecked(m, f, ambient))
}

pub(crate) fn extend_unchecked(m: &ModuleDescriptor, f: &PiecewiseBijection, ambient: &DefinableSet) -> PiecewiseBijection {
    let rest = ambient.minus(m, &f.source);
    let id = AffineMap::identity(m, f.power);
    let mut pieces = f.pieces.clone();
    pieces.extend(rest.blocks().iter().map(|b| Piece { domain: b.clone(), map: id.clone(), image: b.clone() }));
    PiecewiseBijection { power: f.power, source: ambient.clone(), target: ambient.clone(), pieces }
}

/// Extension of an automorphism to all of `M^n`.
pub fn globalize(m: &ModuleDescriptor, f: &PiecewiseBijection) -> PiecewiseBijection {
    extend_unchecked(m, f, &DefinableSet::full(m, f.power))
}

/// An automorphism of `M^n` that applies `maps[j]` on the coset `cosets[j]`
/// (pairwise disjoint) and fixes everything else.
pub(crate) fn coset_permutation(m: &ModuleDescriptor, n: usize, cosets: &[Coset], maps: &[AffineMap]) -> PiecewiseBijection {
    let mut pieces = Vec::new();
    for (c, f) in cosets.iter().zip(maps) {
        pieces.push(Piece::new(m, Block::from_coset(c.clone()), f.clone()).unwrap());
    }
    let moved = DefinableSet::from_disjoint(n, cosets.iter().map(|c| Block::from_coset(c.clone())).collect());
    let f = PiecewiseBijection::from_parts_unchecked(n, moved.clone(), moved, pieces);
    globalize(m, &f)
}

/// Invertible matrix sending the rows of `s` to the rows of `t` (both
/// linearly independent and of equal length), by basis completion.
pub(crate) fn extend_to_gl(m: &ModuleDescriptor, i: usize, w: usize, s: &[Row], t: &[Row]) -> Mat {
    let r = m.field(i);
    let complete = |rows: &[Row]| -> Mat {
        let (_, piv) = crate::rings::matrix::rref_rows(r, rows, w);
        let mut all = rows.to_vec();
        all.extend((0..w).filter(|c| !piv.contains(c)).map(|c| unit_row(r, w, c)));
        Mat::from_rows(all, w).unwrap()
    };
    let sm = complete(s);
    let tm = complete(t);
    sm.inverse(r).expect("completed basis").mul(r, &tm).unwrap()
}

/// `common_chunk`: a set `D` in bijection with `D2` through `g: D → D2`
/// such that `dim(D1 ∩ D) ≥ m̄ + 1̄`. Both sets are first placed in the
/// larger of the two powers by `x ↦ (x, 0)`.
pub fn common_chunk(
    m: &ModuleDescriptor,
    d1: &DefinableSet,
    d2: &DefinableSet,
    mbar: &[usize],
) -> Result<(DefinableSet, PiecewiseBijection)> {
    if mbar.len() != m.k() {
        return Err(Error::Shape("m̄ needs one entry per ring component".into()));
    }
    if !d1.dim().exceeds(mbar) || !d2.dim().exceeds(mbar) {
        return Err(Error::PreconditionFailed("both sets need dimension at least m̄ + 1̄".into()));
    }
    let n = d1.power().max(d2.power());
    let d1 = d1.pad(m, n);
    let d2 = d2.pad(m, n);
    if d1.intersect(m, &d2).dim().exceeds(mbar) {
        return Ok((d2.clone(), PiecewiseBijection::identity(&d2, m)));
    }
    let pick = |d: &DefinableSet| -> Result<Block> {
        d.blocks()
            .iter()
            .filter(|b| b.colour().exceeds(mbar))
            .max_by_key(|b| b.dims())
            .cloned()
            .ok_or_else(|| Error::UnsupportedDecomposition("no single block has dimension at least m̄ + 1̄".into()))
    };
    let b1 = pick(&d1)?;
    let b2 = pick(&d2)?;
    let p1 = b1.find_point(m)?;
    let p2 = b2.find_point(m)?;
    let mut mats = Vec::with_capacity(m.k());
    for i in 0..m.k() {
        let e = b1.dims()[i].min(b2.dims()[i]);
        let s = &b2.ambient().subspace(i).basis()[..e];
        let t = &b1.ambient().subspace(i).basis()[..e];
        mats.push(extend_to_gl(m, i, m.width(i, n), s, t));
    }
    let phi = AffineMap::from_data(m, &p2, mats, &p1)?;
    let d = d2.image(m, &phi);
    let g = PiecewiseBijection::affine_on(m, &d, &phi.inverse(m));
    Ok((d, g))
}

/// Normalized union of the piece domains.
pub fn domain_set(m: &ModuleDescriptor, f: &PiecewiseBijection) -> Result<DefinableSet> {
    let blocks: Vec<Block> = f.pieces.iter().map(|p| p.domain.clone()).collect();
    normalize(m, f.power, &blocks)
}

/// Morita reblocking of a map over a one-component ring.
pub fn morita_map(m: &ModuleDescriptor, f: &PiecewiseBijection, q: usize) -> Result<(ModuleDescriptor, PiecewiseBijection)> {
    let n = crate::modules::morita_power(m, f.power(), q)?;
    Ok((crate::modules::morita_module(m, q)?, f.with_power(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::Rank;
    use crate::ppsets::{unit_vector, Subspace};
    use crate::rings::{DivisionRing, RingDescriptor};

    fn setup() -> (DivisionRing, ModuleDescriptor) {
        let r = DivisionRing::gf(5);
        (r.clone(), ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega))
    }

    fn swap_points(m: &ModuleDescriptor, a: &Vector, b: &Vector) -> PiecewiseBijection {
        let pa = Block::from_coset(Coset::point(m, a));
        let pb = Block::from_coset(Coset::point(m, b));
        let t = AffineMap::translation(m, &b.sub(m, a));
        let pieces = vec![Piece::new(m, pa, t.clone()).unwrap(), Piece::new(m, pb, t.inverse(m)).unwrap()];
        PiecewiseBijection::from_pieces(a.power(), pieces)
    }

    #[test]
    fn identity_is_valid_and_fixes_everything() {
        let (_, m) = setup();
        let id = PiecewiseBijection::identity(&DefinableSet::full(&m, 2), &m);
        assert!(id.validate(&m).is_empty());
        assert!(support(&m, &id).unwrap().is_empty());
        assert_eq!(dim_of_map(&m, &id).unwrap(), Colour::Bottom);
    }

    #[test]
    fn overlapping_domains_are_reported() {
        let (_, m) = setup();
        let full = Block::from_coset(Coset::full(&m, 1));
        let id = AffineMap::identity(&m, 1);
        let f = PiecewiseBijection::from_pieces(1, vec![Piece::new(&m, full.clone(), id.clone()).unwrap(), Piece::new(&m, full, id).unwrap()]);
        assert!(f.validate(&m).iter().any(|v| v.starts_with("domains overlap")));
    }

    #[test]
    fn coset_swap_and_translation_support() {
        let (r, m) = setup();
        let line = Coset::new(&m, vec![Subspace::span(&r, 2, &[vec![r.one(), r.zero()]]).unwrap()], Vector::zero(&m, 2)).unwrap();
        let v = unit_vector(&m, 2, 0, 0, vec![r.zero(), r.one()]);
        let other = line.translate(&m, &v);
        let t = AffineMap::translation(&m, &v);
        let f = PiecewiseBijection::from_pieces(
            2,
            vec![
                Piece::new(&m, Block::from_coset(line.clone()), t.clone()).unwrap(),
                Piece::new(&m, Block::from_coset(other), t.inverse(&m)).unwrap(),
            ],
        );
        assert!(f.validate(&m).is_empty());
        let ff = compose(&m, &f, &f).unwrap();
        assert!(support(&m, &ff).unwrap().is_empty());
        let shift = PiecewiseBijection::affine_on(&m, &DefinableSet::full(&m, 1), &AffineMap::translation(&m, &unit_vector(&m, 1, 0, 0, vec![r.one()])));
        assert_eq!(dim_of_map(&m, &shift).unwrap(), Colour::Dim(vec![1]));
    }

    #[test]
    fn point_swap_extends() {
        let (r, m) = setup();
        let a = unit_vector(&m, 1, 0, 0, vec![r.one()]);
        let b = unit_vector(&m, 1, 0, 1, vec![r.one()]);
        let f = swap_points(&m, &a, &b);
        assert_eq!(dim_of_map(&m, &f).unwrap(), Colour::Dim(vec![0]));
        let g = extend_by_identity(&m, &f, &DefinableSet::full(&m, 1)).unwrap();
        assert!(g.validate(&m).is_empty());
        assert!(support(&m, &g).unwrap().same_set(&m, &support(&m, &f).unwrap()));
        let h = g.pad(&m, 2);
        let h = globalize(&m, &h);
        assert!(h.validate(&m).is_empty());
        assert_eq!(support(&m, &h).unwrap().blocks().len(), 2);
        assert_eq!(h.eval(&m, &a.pad(&m, 2)).unwrap(), b.pad(&m, 2));
        let inv = f.inverse(&m);
        assert!(support(&m, &compose(&m, &f, &inv).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn action_order_of_composition() {
        let r = DivisionRing::Rationals;
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, r.clone()), Rank::Omega);
        let a1 = Mat::from_rows(vec![vec![r.from_int(1), r.from_int(2)], vec![r.from_int(0), r.from_int(1)]], 2).unwrap();
        let a2 = Mat::from_rows(vec![vec![r.from_int(0), r.from_int(1)], vec![r.from_int(1), r.from_int(0)]], 2).unwrap();
        let full = DefinableSet::full(&m, 2);
        let z = Vector::zero(&m, 2);
        let f1 = PiecewiseBijection::affine_on(&m, &full, &AffineMap::new(&m, vec![a1.clone()], z.clone()).unwrap());
        let f2 = PiecewiseBijection::affine_on(&m, &full, &AffineMap::new(&m, vec![a2.clone()], z).unwrap());
        let c = compose(&m, &f1, &f2).unwrap();
        assert_eq!(c.pieces()[0].map().matrix(0), &a2.mul(&r, &a1).unwrap());
        let x = unit_vector(&m, 2, 0, 3, vec![r.from_int(3), r.from_int(-1)]);
        assert_eq!(c.eval(&m, &x).unwrap(), f1.eval(&m, &f2.eval(&m, &x).unwrap()).unwrap());
    }

    #[test]
    fn common_chunk_meets_d1() {
        let r = DivisionRing::Rationals;
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, r.clone()), Rank::Omega);
        let d1 = DefinableSet::full(&m, 2);
        let (d, g) = common_chunk(&m, &d1, &d1, &[1]).unwrap();
        assert!(d.same_set(&m, &d1));
        assert!(g.pieces().iter().all(|p| p.map().is_identity(&m)));
        // a plane in M^3 that misses M^2 × {0} generically
        let v = unit_vector(&m, 3, 0, 0, vec![r.zero(), r.zero(), r.one()]);
        let plane = Coset::new(&m, vec![Subspace::span(&r, 3, &[vec![r.one(), r.zero(), r.zero()], vec![r.zero(), r.one(), r.zero()]]).unwrap()], v).unwrap();
        let d2 = DefinableSet::from_coset(plane);
        let (d, g) = common_chunk(&m, &d1, &d2, &[1]).unwrap();
        assert!(d.intersect(&m, &d1.pad(&m, 3)).dim().exceeds(&[1]));
        assert!(g.validate(&m).is_empty());
        assert!(g.target().same_set(&m, &d2));
        assert_eq!(common_chunk(&m, &d1, &d2, &[2]).unwrap_err().code(), "PreconditionFailed");
    }
}
