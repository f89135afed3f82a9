//! Random test data: invertible matrices, cosets, blocks, definable sets and
//! definable automorphisms. All data lives on basis indices below
//! [`INDEX_BOUND`], so truncations to that many indices are preserved.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::defmaps::{globalize, Piece, PiecewiseBijection};
use crate::defsets::{normalize, Block, DefinableSet};
use crate::k1::componentwise;
use crate::modules::{ModuleDescriptor, Rank, Sparse, Vector};
use crate::ppsets::{pp_iso_standard, AffineMap, Coset, Subspace};
use crate::rings::matrix::{row_add, row_scale};
use crate::rings::{DivisionRing, Mat, Row};

pub const INDEX_BOUND: usize = 3;

fn indices(m: &ModuleDescriptor, i: usize) -> usize {
    match m.rank(i) {
        Rank::Omega => INDEX_BOUND,
        Rank::Finite(r) => r.min(INDEX_BOUND),
    }
}

pub fn random_row<R: Rng + ?Sized>(r: &DivisionRing, w: usize, rng: &mut R) -> Row {
    (0..w).map(|_| r.random(rng)).collect()
}

pub fn random_matrix<R: Rng + ?Sized>(r: &DivisionRing, w: usize, rng: &mut R) -> Mat {
    Mat::from_rows((0..w).map(|_| random_row(r, w, rng)).collect(), w).expect("square")
}

pub fn random_invertible<R: Rng + ?Sized>(r: &DivisionRing, w: usize, rng: &mut R) -> Mat {
    loop {
        let a = random_matrix(r, w, rng);
        if a.is_invertible(r) {
            return a;
        }
    }
}

/// An elementary transvection `I + c·E_{ij}` with `i ≠ j`.
pub fn random_elementary<R: Rng + ?Sized>(r: &DivisionRing, w: usize, rng: &mut R) -> Mat {
    let mut a = Mat::identity(r, w);
    let i = rng.gen_range(0..w);
    let j = (i + rng.gen_range(1..w)) % w;
    a.set(i, j, r.random(rng));
    a
}

/// A random vector of `M^n` supported on low indices; each index carries a
/// row with chance `tenths / 10`.
pub fn random_vector<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, tenths: u32, rng: &mut R) -> Vector {
    let parts = (0..m.k())
        .map(|i| {
            let r = m.field(i);
            let mut s = Sparse::zero(m.width(i, n));
            for b in 0..indices(m, i) {
                if rng.gen_ratio(tenths, 10) {
                    s.set(r, b, random_row(r, m.width(i, n), rng));
                }
            }
            s
        })
        .collect();
    Vector::from_parts(m, n, parts).expect("shape")
}

fn random_subspace<R: Rng + ?Sized>(r: &DivisionRing, w: usize, d: usize, rng: &mut R) -> Subspace {
    loop {
        let s = Subspace::span(r, w, &(0..d).map(|_| random_row(r, w, rng)).collect::<Vec<_>>()).unwrap();
        if s.dim() == d {
            return s;
        }
    }
}

fn random_subspace_of<R: Rng + ?Sized>(r: &DivisionRing, w: &Subspace, d: usize, rng: &mut R) -> Subspace {
    loop {
        let rows: Vec<Row> = (0..d).map(|_| random_combination(r, w.basis(), w.width(), rng)).collect();
        let s = Subspace::span(r, w.width(), &rows).unwrap();
        if s.dim() == d {
            return s;
        }
    }
}

fn random_combination<R: Rng + ?Sized>(r: &DivisionRing, basis: &[Row], width: usize, rng: &mut R) -> Row {
    basis.iter().fold(vec![r.zero(); width], |acc, b| row_add(r, &acc, &row_scale(r, &r.random(rng), b)))
}

/// A random element of the direction of `c`, on low indices.
fn random_direction<R: Rng + ?Sized>(m: &ModuleDescriptor, c: &Coset, rng: &mut R) -> Vector {
    let n = c.power();
    let parts = (0..m.k())
        .map(|i| {
            let r = m.field(i);
            let mut s = Sparse::zero(m.width(i, n));
            for b in 0..indices(m, i) {
                if rng.gen_ratio(3, 5) {
                    s.set(r, b, random_combination(r, c.subspace(i).basis(), m.width(i, n), rng));
                }
            }
            s
        })
        .collect();
    Vector::from_parts(m, n, parts).expect("shape")
}

/// A coset with the given raw dimensions.
pub fn random_coset_of_dims<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, dims: &[usize], rng: &mut R) -> Coset {
    let subs = (0..m.k()).map(|i| random_subspace(m.field(i), m.width(i, n), dims[i], rng)).collect();
    Coset::new(m, subs, random_vector(m, n, 5, rng)).expect("shape")
}

pub fn random_coset<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> Coset {
    let dims: Vec<usize> = (0..m.k()).map(|i| rng.gen_range(0..=m.width(i, n))).collect();
    random_coset_of_dims(m, n, &dims, rng)
}

/// A proper subcoset of `c`, or `None` when `c` is a point.
pub fn random_subcoset<R: Rng + ?Sized>(m: &ModuleDescriptor, c: &Coset, rng: &mut R) -> Option<Coset> {
    let dims = c.dims();
    if dims.iter().all(|&d| d == 0) {
        return None;
    }
    let shrink: Vec<usize> = (0..m.k()).filter(|&i| dims[i] > 0).collect();
    let j = *shrink.choose(rng).unwrap();
    let subs = (0..m.k())
        .map(|i| {
            let d = if i == j { rng.gen_range(0..dims[i]) } else { rng.gen_range(0..=dims[i]) };
            random_subspace_of(m.field(i), c.subspace(i), d, rng)
        })
        .collect();
    let rep = c.rep().add(m, &random_direction(m, c, rng));
    Some(Coset::new(m, subs, rep).expect("shape"))
}

pub fn random_block<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> Block {
    let c = random_coset(m, n, rng);
    let holes: Vec<Coset> = (0..rng.gen_range(0..=2)).filter_map(|_| random_subcoset(m, &c, rng)).collect();
    Block::new(m, c, holes).expect("proper holes never exhaust a coset")
}

/// A normalized union of one to three random blocks.
pub fn random_set<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> DefinableSet {
    let blocks: Vec<Block> = (0..rng.gen_range(1..=3)).map(|_| random_block(m, n, rng)).collect();
    normalize(m, n, &blocks).expect("one power")
}

pub fn random_global_affine<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> AffineMap {
    let mats = (0..m.k()).map(|i| random_invertible(m.field(i), m.width(i, n), rng)).collect();
    AffineMap::new(m, mats, random_vector(m, n, 4, rng)).expect("invertible")
}

fn from_pieces_global(m: &ModuleDescriptor, n: usize, pieces: Vec<Piece>) -> PiecewiseBijection {
    globalize(m, &PiecewiseBijection::from_pieces(n, pieces))
}

/// Swap of a random coset with a disjoint translate.
pub fn random_coset_swap<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> PiecewiseBijection {
    loop {
        let dims: Vec<usize> = (0..m.k()).map(|i| rng.gen_range(0..m.width(i, n))).collect();
        let c = random_coset_of_dims(m, n, &dims, rng);
        let v = random_vector(m, n, 6, rng);
        let d = c.translate(m, &v);
        if c.intersect(m, &d).is_some() {
            continue;
        }
        let t = AffineMap::translation(m, &v);
        let pieces = vec![
            Piece::new(m, Block::from_coset(c), t.clone()).unwrap(),
            Piece::new(m, Block::from_coset(d), t.inverse(m)).unwrap(),
        ];
        return from_pieces_global(m, n, pieces);
    }
}

/// A transposition or 3-cycle of random points.
pub fn random_point_cycle<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> PiecewiseBijection {
    let len = rng.gen_range(2..=3);
    let mut pts: Vec<Vector> = Vec::new();
    while pts.len() < len {
        let p = random_vector(m, n, 6, rng);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let pieces = (0..len)
        .map(|j| {
            let t = AffineMap::translation(m, &pts[(j + 1) % len].sub(m, &pts[j]));
            Piece::new(m, Block::from_coset(Coset::point(m, &pts[j])), t).unwrap()
        })
        .collect();
    from_pieces_global(m, n, pieces)
}

/// An affine automorphism of one random coset, identity elsewhere.
pub fn random_coset_automorphism<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> PiecewiseBijection {
    let c = random_coset(m, n, rng);
    let frame = pp_iso_standard(m, &c);
    let mats = (0..m.k())
        .map(|i| {
            let r = m.field(i);
            let w = m.width(i, n);
            let d = c.subspace(i).dim();
            let l = random_invertible(r, d, rng).direct_sum(r, &Mat::identity(r, w - d));
            let p = frame.matrix(i);
            p.mul(r, &l).unwrap().mul(r, &p.inverse(r).unwrap()).unwrap()
        })
        .collect();
    let shift = c.rep().add(m, &random_direction(m, &c, rng));
    let f = AffineMap::from_data(m, c.rep(), mats, &shift).expect("invertible");
    from_pieces_global(m, n, vec![Piece::new(m, Block::from_coset(c), f).unwrap()])
}

fn random_generator<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> PiecewiseBijection {
    match rng.gen_range(0..4) {
        0 => PiecewiseBijection::affine_on(m, &DefinableSet::full(m, n), &random_global_affine(m, n, rng)),
        1 => random_coset_swap(m, n, rng),
        2 => random_point_cycle(m, n, rng),
        _ => random_coset_automorphism(m, n, rng),
    }
}

/// A random automorphism of `M^n`: a generator, a product of two, or a
/// conjugate of one generator by another.
pub fn random_automorphism<R: Rng + ?Sized>(m: &ModuleDescriptor, n: usize, rng: &mut R) -> PiecewiseBijection {
    if m.k() > 1 {
        let fs: Vec<PiecewiseBijection> = (0..m.k()).map(|i| random_automorphism(&m.restrict(i), n, rng)).collect();
        return componentwise(m, &fs).expect("componentwise maps");
    }
    let f = random_generator(m, n, rng);
    match rng.gen_range(0..3) {
        0 => f,
        1 => random_generator(m, n, rng).after(m, &f).restrict_to_support(m).globalized(m),
        _ => {
            let g = random_generator(m, n, rng);
            g.after(m, &f.after(m, &g.inverse(m))).restrict_to_support(m).globalized(m)
        }
    }
}
