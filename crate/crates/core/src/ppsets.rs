//! pp-definable subgroups and cosets of `M^n`, colours, and affine maps.
//!
//! A pp-subgroup of `M^n` is `⊕_b W` where `W_i ⊆ R_i^{n q_i}` is a left
//! subspace applied at every basis index `b`; a coset adds a finitely
//! supported representative. Subspaces are kept in reduced row echelon
//! form and representatives reduced modulo them, so equal sets have equal
//! data.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::modules::{morita_module, morita_power, ModuleDescriptor, Sparse, Vector};
use crate::rings::matrix::{
    in_span, left_nullspace_rows, reduce_mod, rref_rows, row_add, row_is_zero, row_neg, row_times,
    solve_left_rows, unit_row,
};
use crate::rings::{DivisionRing, Mat, Row};

/// A left subspace of `R^width` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    width: usize,
    basis: Vec<Row>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(r: &DivisionRing, width: usize, rows: &[Row]) -> Result<Self> {
        if rows.iter().any(|x| x.len() != width) {
            return Err(Error::Shape(format!("generators must have {width} entries")));
        }
        let (basis, pivots) = rref_rows(r, rows, width);
        Ok(Subspace { width, basis, pivots })
    }

    /// `{ x : x·H = 0 }` where `H` has `width` rows.
    pub fn annihilated_by(r: &DivisionRing, width: usize, h: &[Row]) -> Result<Self> {
        if h.len() != width {
            return Err(Error::Shape(format!("annihilator needs {width} rows, got {}", h.len())));
        }
        let cols = h.first().map_or(0, |x| x.len());
        if h.iter().any(|x| x.len() != cols) {
            return Err(Error::Shape("annihilator rows have different lengths".into()));
        }
        Subspace::span(r, width, &left_nullspace_rows(r, h, cols))
    }

    pub fn full(r: &DivisionRing, width: usize) -> Self {
        Subspace { width, basis: (0..width).map(|i| unit_row(r, width, i)).collect(), pivots: (0..width).collect() }
    }

    pub fn zero(width: usize) -> Self {
        Subspace { width, basis: vec![], pivots: vec![] }
    }

    /// Span of the first `d` unit vectors.
    pub fn standard(r: &DivisionRing, width: usize, d: usize) -> Self {
        Subspace { width, basis: (0..d).map(|i| unit_row(r, width, i)).collect(), pivots: (0..d).collect() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Row] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduce(&self, r: &DivisionRing, v: &[crate::rings::Scalar]) -> Row {
        reduce_mod(r, v, &self.basis, &self.pivots)
    }

    pub fn contains_row(&self, r: &DivisionRing, v: &[crate::rings::Scalar]) -> bool {
        in_span(r, v, &self.basis, &self.pivots)
    }

    pub fn contains(&self, r: &DivisionRing, o: &Subspace) -> bool {
        o.basis.iter().all(|v| self.contains_row(r, v))
    }

    pub fn intersect(&self, r: &DivisionRing, o: &Subspace) -> Subspace {
        if self.dim() == self.width {
            return o.clone();
        }
        if o.dim() == o.width {
            return self.clone();
        }
        let mut rows = self.basis.clone();
        rows.extend(o.basis.iter().map(|v| row_neg(r, v)));
        let ns = left_nullspace_rows(r, &rows, self.width);
        let d = self.dim();
        let gens: Vec<Row> = ns
            .iter()
            .map(|a| {
                let mut acc = vec![r.zero(); self.width];
                for (c, b) in a[..d].iter().zip(&self.basis) {
                    if !r.is_zero(c) {
                        acc = row_add(r, &acc, &crate::rings::matrix::row_scale(r, c, b));
                    }
                }
                acc
            })
            .collect();
        Subspace::span(r, self.width, &gens).expect("widths agree")
    }

    pub fn sum(&self, r: &DivisionRing, o: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(o.basis.iter().cloned());
        Subspace::span(r, self.width, &rows).expect("widths agree")
    }

    pub fn image(&self, r: &DivisionRing, a: &Mat) -> Subspace {
        let rows: Vec<Row> = self.basis.iter().map(|v| row_times(r, v, a)).collect();
        Subspace::span(r, a.cols(), &rows).expect("widths agree")
    }

    /// `W ⊕ W'` inside `R^{width + width'}`.
    pub fn direct_sum(&self, r: &DivisionRing, o: &Subspace) -> Subspace {
        let w = self.width + o.width;
        let mut rows: Vec<Row> = self
            .basis
            .iter()
            .map(|v| {
                let mut x = v.clone();
                x.extend(vec![r.zero(); o.width]);
                x
            })
            .collect();
        rows.extend(o.basis.iter().map(|v| {
            let mut x = vec![r.zero(); self.width];
            x.extend(v.iter().cloned());
            x
        }));
        Subspace::span(r, w, &rows).expect("widths agree")
    }

    /// Columns of an annihilator `H` with `W = { x : x·H = 0 }`, written as rows.
    pub fn annihilator(&self, r: &DivisionRing) -> Vec<Row> {
        crate::rings::matrix::right_nullspace_rref(r, &self.basis, &self.pivots, self.width)
    }

    /// A solution of `x = p + w₁ = p' + w₂` with `w₁ ∈ self`, `w₂ ∈ o`.
    fn meet_point(&self, r: &DivisionRing, o: &Subspace, p: &[crate::rings::Scalar], p2: &[crate::rings::Scalar]) -> Option<Row> {
        let diff = crate::rings::matrix::row_sub(r, p2, p);
        if row_is_zero(r, &diff) {
            return Some(p.to_vec());
        }
        let mut rows = self.basis.clone();
        rows.extend(o.basis.iter().map(|v| row_neg(r, v)));
        let a = solve_left_rows(r, &rows, self.width, &diff)?;
        let mut x = p.to_vec();
        for (c, b) in a[..self.dim()].iter().zip(&self.basis) {
            if !r.is_zero(c) {
                x = row_add(r, &x, &crate::rings::matrix::row_scale(r, c, b));
            }
        }
        Some(x)
    }
}

/// `canonicalize` from annihilator data.
pub fn canonicalize_annihilator(r: &DivisionRing, width: usize, h: &[Row]) -> Result<Subspace> {
    Subspace::annihilated_by(r, width, h)
}

/// `canonicalize` from generators.
pub fn canonicalize_generators(r: &DivisionRing, width: usize, rows: &[Row]) -> Result<Subspace> {
    Subspace::span(r, width, rows)
}

/// Dimension vector of a pp-set, or bottom for the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    Bottom,
    Dim(Vec<usize>),
}

impl Colour {
    pub fn dims(&self) -> Option<&[usize]> {
        match self {
            Colour::Bottom => None,
            Colour::Dim(d) => Some(d),
        }
    }

    /// Componentwise maximum.
    pub fn join(&self, o: &Colour) -> Colour {
        match (self, o) {
            (Colour::Bottom, x) | (x, Colour::Bottom) => x.clone(),
            (Colour::Dim(a), Colour::Dim(b)) => Colour::Dim(a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()),
        }
    }

    /// Colour of a Cartesian product.
    pub fn add(&self, o: &Colour) -> Colour {
        match (self, o) {
            (Colour::Dim(a), Colour::Dim(b)) => Colour::Dim(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => Colour::Bottom,
        }
    }

    /// Componentwise `≤`; bottom is below everything.
    pub fn le(&self, o: &Colour) -> bool {
        match (self, o) {
            (Colour::Bottom, _) => true,
            (_, Colour::Bottom) => false,
            (Colour::Dim(a), Colour::Dim(b)) => a.iter().zip(b).all(|(x, y)| x <= y),
        }
    }

    /// `m̄ + 1̄ ≤ self`.
    pub fn exceeds(&self, m: &[usize]) -> bool {
        match self {
            Colour::Bottom => false,
            Colour::Dim(a) => a.iter().zip(m).all(|(x, y)| *x > *y),
        }
    }
}

impl std::fmt::Display for Colour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Colour::Bottom => write!(f, "-inf"),
            Colour::Dim(d) if d.len() == 1 => write!(f, "{}", d[0]),
            Colour::Dim(d) => {
                let s: Vec<String> = d.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", s.join(", "))
            }
        }
    }
}

/// A non-empty coset `rep + ⊕_b W` in `M^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    power: usize,
    subs: Vec<Subspace>,
    rep: Vector,
}

impl Coset {
    pub fn new(m: &ModuleDescriptor, subs: Vec<Subspace>, rep: Vector) -> Result<Self> {
        if subs.len() != m.k() {
            return Err(Error::Shape("one subspace per ring component expected".into()));
        }
        let n = rep.power();
        for (i, s) in subs.iter().enumerate() {
            if s.width() != m.width(i, n) {
                return Err(Error::Shape(format!(
                    "component {i} subspace must live in width {}",
                    m.width(i, n)
                )));
            }
        }
        Ok(Coset::canonical(m, subs, rep))
    }

    fn canonical(m: &ModuleDescriptor, subs: Vec<Subspace>, rep: Vector) -> Self {
        let n = rep.power();
        let parts = (0..m.k())
            .map(|i| {
                let r = m.field(i);
                let mut s = Sparse::zero(m.width(i, n));
                for (b, row) in rep.part(i).rows() {
                    s.set(r, *b, subs[i].reduce(r, row));
                }
                s
            })
            .collect();
        let rep = Vector::from_parts(m, n, parts).expect("shape preserved");
        Coset { power: n, subs, rep }
    }

    pub fn full(m: &ModuleDescriptor, n: usize) -> Self {
        let subs = (0..m.k()).map(|i| Subspace::full(m.field(i), m.width(i, n))).collect();
        Coset { power: n, subs, rep: Vector::zero(m, n) }
    }

    pub fn point(m: &ModuleDescriptor, v: &Vector) -> Self {
        let subs = (0..m.k()).map(|i| Subspace::zero(m.width(i, v.power()))).collect();
        Coset { power: v.power(), subs, rep: v.clone() }
    }

    /// The standard subgroup of a colour: leading unit vectors per component.
    pub fn standard(m: &ModuleDescriptor, n: usize, dims: &[usize]) -> Self {
        let subs = (0..m.k()).map(|i| Subspace::standard(m.field(i), m.width(i, n), dims[i])).collect();
        Coset { power: n, subs, rep: Vector::zero(m, n) }
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subs
    }

    pub fn subspace(&self, i: usize) -> &Subspace {
        &self.subs[i]
    }

    pub fn rep(&self) -> &Vector {
        &self.rep
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subs.iter().map(Subspace::dim).collect()
    }

    pub fn colour(&self) -> Colour {
        Colour::Dim(self.dims())
    }

    pub fn is_point(&self) -> bool {
        self.subs.iter().all(|s| s.dim() == 0)
    }

    pub fn is_full(&self) -> bool {
        self.subs.iter().all(|s| s.dim() == s.width()) && self.rep.is_zero()
    }

    pub fn contains_point(&self, m: &ModuleDescriptor, x: &Vector) -> bool {
        if x.power() != self.power {
            return false;
        }
        (0..m.k()).all(|i| {
            let r = m.field(i);
            let d = x.part(i).sub(r, self.rep.part(i));
            d.rows().values().all(|row| self.subs[i].contains_row(r, row))
        })
    }

    pub fn contains(&self, m: &ModuleDescriptor, o: &Coset) -> bool {
        (0..m.k()).all(|i| self.subs[i].contains(m.field(i), &o.subs[i])) && self.contains_point(m, &o.rep)
    }

    pub fn intersect(&self, m: &ModuleDescriptor, o: &Coset) -> Option<Coset> {
        assert_eq!(self.power, o.power, "ambient powers differ");
        if self == o {
            return Some(self.clone());
        }
        let n = self.power;
        let mut subs = Vec::with_capacity(m.k());
        let mut parts = Vec::with_capacity(m.k());
        for i in 0..m.k() {
            let r = m.field(i);
            let (w1, w2) = (&self.subs[i], &o.subs[i]);
            let (p1, p2) = (self.rep.part(i), o.rep.part(i));
            let mut rep = Sparse::zero(m.width(i, n));
            let keys: BTreeSet<usize> = p1.support().chain(p2.support()).collect();
            for b in keys {
                let x = w1.meet_point(r, w2, &p1.row_or_zero(r, b), &p2.row_or_zero(r, b))?;
                rep.set(r, b, x);
            }
            subs.push(w1.intersect(r, w2));
            parts.push(rep);
        }
        let rep = Vector::from_parts(m, n, parts).expect("shape preserved");
        Some(Coset::canonical(m, subs, rep))
    }

    pub fn image(&self, m: &ModuleDescriptor, f: &AffineMap) -> Coset {
        let subs = (0..m.k()).map(|i| self.subs[i].image(m.field(i), &f.parts[i].a)).collect();
        let rep = f.apply(m, &self.rep);
        Coset::canonical(m, subs, rep)
    }

    pub fn product(&self, m: &ModuleDescriptor, o: &Coset) -> Coset {
        let subs = (0..m.k()).map(|i| self.subs[i].direct_sum(m.field(i), &o.subs[i])).collect();
        let rep = self.rep.concat(m, &o.rep);
        Coset::canonical(m, subs, rep)
    }

    /// Translate by `v`.
    pub fn translate(&self, m: &ModuleDescriptor, v: &Vector) -> Coset {
        Coset::canonical(m, self.subs.clone(), self.rep.add(m, v))
    }

    /// `C × {0}` inside `M^{n'}`.
    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> Coset {
        self.product(m, &Coset::point(m, &Vector::zero(m, n - self.power)))
    }

    /// Component `i` alone.
    pub fn component(&self, i: usize) -> Coset {
        Coset { power: self.power, subs: vec![self.subs[i].clone()], rep: self.rep.component(i) }
    }

    pub fn from_components(cs: &[Coset]) -> Coset {
        let reps: Vec<Vector> = cs.iter().map(|c| c.rep.clone()).collect();
        Coset {
            power: cs[0].power,
            subs: cs.iter().map(|c| c.subs[0].clone()).collect(),
            rep: Vector::from_components(&reps),
        }
    }

    pub(crate) fn with_power(&self, n: usize) -> Coset {
        Coset { power: n, subs: self.subs.clone(), rep: self.rep.with_power(n) }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.rep.max_index()
    }
}

/// A pp-definable set: empty or a coset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PPSet {
    Empty,
    Coset(Coset),
}

impl PPSet {
    pub fn colour(&self) -> Colour {
        match self {
            PPSet::Empty => Colour::Bottom,
            PPSet::Coset(c) => c.colour(),
        }
    }
}

pub fn pp_intersect(m: &ModuleDescriptor, a: &PPSet, b: &PPSet) -> Result<PPSet> {
    match (a, b) {
        (PPSet::Coset(x), PPSet::Coset(y)) => {
            if x.power() != y.power() {
                return Err(Error::Mismatch("ambient powers differ".into()));
            }
            Ok(x.intersect(m, y).map_or(PPSet::Empty, PPSet::Coset))
        }
        _ => Ok(PPSet::Empty),
    }
}

pub fn colour_of(p: &PPSet) -> Colour {
    p.colour()
}

/// `x ↦ x·A_i + c_i` in every component, pointwise over basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePart {
    pub a: Mat,
    pub c: Sparse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    power: usize,
    parts: Vec<AffinePart>,
}

impl AffineMap {
    pub fn new(m: &ModuleDescriptor, mats: Vec<Mat>, c: Vector) -> Result<Self> {
        let n = c.power();
        if mats.len() != m.k() {
            return Err(Error::Shape("one matrix per ring component expected".into()));
        }
        for (i, a) in mats.iter().enumerate() {
            let w = m.width(i, n);
            if a.rows() != w || a.cols() != w {
                return Err(Error::Shape(format!("component {i} matrix must be {w}x{w}")));
            }
            if !a.is_invertible(m.field(i)) {
                return Err(Error::Singular);
            }
        }
        let parts = mats.into_iter().zip(c.parts().iter().cloned()).map(|(a, c)| AffinePart { a, c }).collect();
        Ok(AffineMap { power: n, parts })
    }

    /// `x ↦ (x − d₁)A + d₂`.
    pub fn from_data(m: &ModuleDescriptor, d1: &Vector, mats: Vec<Mat>, d2: &Vector) -> Result<Self> {
        let lin = AffineMap::new(m, mats, Vector::zero(m, d1.power()))?;
        let c = d2.sub(m, &lin.apply(m, d1));
        AffineMap::new(m, lin.parts.into_iter().map(|p| p.a).collect(), c)
    }

    pub fn identity(m: &ModuleDescriptor, n: usize) -> Self {
        let parts = (0..m.k())
            .map(|i| AffinePart { a: Mat::identity(m.field(i), m.width(i, n)), c: Sparse::zero(m.width(i, n)) })
            .collect();
        AffineMap { power: n, parts }
    }

    pub fn translation(m: &ModuleDescriptor, v: &Vector) -> Self {
        let mut f = AffineMap::identity(m, v.power());
        for (p, c) in f.parts.iter_mut().zip(v.parts()) {
            p.c = c.clone();
        }
        f
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn parts(&self) -> &[AffinePart] {
        &self.parts
    }

    pub fn matrix(&self, i: usize) -> &Mat {
        &self.parts[i].a
    }

    pub fn offset(&self, m: &ModuleDescriptor) -> Vector {
        Vector::from_parts(m, self.power, self.parts.iter().map(|p| p.c.clone()).collect()).expect("shape")
    }

    pub fn apply(&self, m: &ModuleDescriptor, x: &Vector) -> Vector {
        let parts = (0..m.k())
            .map(|i| {
                let r = m.field(i);
                x.part(i).times(r, &self.parts[i].a).add(r, &self.parts[i].c)
            })
            .collect();
        Vector::from_parts(m, self.power, parts).expect("shape preserved")
    }

    /// `self` followed by `g`: `x ↦ g(self(x))`.
    pub fn then(&self, m: &ModuleDescriptor, g: &AffineMap) -> AffineMap {
        let parts = (0..m.k())
            .map(|i| {
                let r = m.field(i);
                let a = self.parts[i].a.mul(r, &g.parts[i].a).expect("square");
                let c = self.parts[i].c.times(r, &g.parts[i].a).add(r, &g.parts[i].c);
                AffinePart { a, c }
            })
            .collect();
        AffineMap { power: self.power, parts }
    }

    pub fn inverse(&self, m: &ModuleDescriptor) -> AffineMap {
        let parts = (0..m.k())
            .map(|i| {
                let r = m.field(i);
                let a = self.parts[i].a.inverse(r).expect("invertible by construction");
                let c = self.parts[i].c.times(r, &a).neg(r);
                AffinePart { a, c }
            })
            .collect();
        AffineMap { power: self.power, parts }
    }

    pub fn is_identity(&self, m: &ModuleDescriptor) -> bool {
        (0..m.k()).all(|i| self.parts[i].c.is_zero() && self.parts[i].a.is_identity(m.field(i)))
    }

    /// Whether two maps agree on every point of a coset.
    pub fn agrees_on(&self, m: &ModuleDescriptor, o: &AffineMap, c: &Coset) -> bool {
        if self.apply(m, c.rep()) != o.apply(m, c.rep()) {
            return false;
        }
        (0..m.k()).all(|i| {
            let r = m.field(i);
            c.subspace(i)
                .basis()
                .iter()
                .all(|v| row_times(r, v, &self.parts[i].a) == row_times(r, v, &o.parts[i].a))
        })
    }

    /// The coset of fixed points, if any.
    pub fn fixed_points(&self, m: &ModuleDescriptor) -> Option<Coset> {
        let n = self.power;
        let mut subs = Vec::with_capacity(m.k());
        let mut parts = Vec::with_capacity(m.k());
        for i in 0..m.k() {
            let r = m.field(i);
            let w = m.width(i, n);
            let am = self.parts[i].a.sub(r, &Mat::identity(r, w)).expect("square");
            let rows = am.to_rows();
            let ker = Subspace::span(r, w, &left_nullspace_rows(r, &rows, w)).expect("width");
            let mut rep = Sparse::zero(w);
            for (b, c) in self.parts[i].c.rows() {
                // x(A − I) = −c
                let x = solve_left_rows(r, &rows, w, &row_neg(r, c))?;
                rep.set(r, *b, x);
            }
            subs.push(ker);
            parts.push(rep);
        }
        let rep = Vector::from_parts(m, n, parts).expect("shape");
        Some(Coset::canonical(m, subs, rep))
    }

    /// `f ⊕ g` acting on `M^{n+n'}`.
    pub fn product(&self, m: &ModuleDescriptor, o: &AffineMap) -> AffineMap {
        let parts = (0..m.k())
            .map(|i| {
                let r = m.field(i);
                AffinePart { a: self.parts[i].a.direct_sum(r, &o.parts[i].a), c: self.parts[i].c.concat(r, &o.parts[i].c) }
            })
            .collect();
        AffineMap { power: self.power + o.power, parts }
    }

    /// `f ⊕ id` on `M^{n'}`.
    pub fn pad(&self, m: &ModuleDescriptor, n: usize) -> AffineMap {
        self.product(m, &AffineMap::identity(m, n - self.power))
    }

    pub fn component(&self, i: usize) -> AffineMap {
        AffineMap { power: self.power, parts: vec![self.parts[i].clone()] }
    }

    pub fn from_components(fs: &[AffineMap]) -> AffineMap {
        AffineMap { power: fs[0].power, parts: fs.iter().map(|f| f.parts[0].clone()).collect() }
    }

    pub(crate) fn with_power(&self, n: usize) -> AffineMap {
        AffineMap { power: n, parts: self.parts.clone() }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.parts.iter().filter_map(|p| p.c.max_index()).max()
    }
}

/// Affine bijection `x ↦ (x − d₁)A` carrying a non-empty pp-set onto the
/// standard subgroup of the same colour; returns `(d₁, A, d₂ = 0)` as a map.
pub fn pp_iso_standard(m: &ModuleDescriptor, p: &Coset) -> AffineMap {
    let n = p.power();
    let mats = (0..m.k())
        .map(|i| {
            let r = m.field(i);
            let w = m.width(i, n);
            let s = p.subspace(i);
            let mut rows = s.basis().to_vec();
            rows.extend((0..w).filter(|c| !s.pivots().contains(c)).map(|c| unit_row(r, w, c)));
            Mat::from_rows(rows, w).unwrap().inverse(r).expect("basis completion is invertible")
        })
        .collect();
    AffineMap::from_data(m, p.rep(), mats, &Vector::zero(m, n)).expect("invertible")
}

/// Morita reblocking of a coset over a one-component ring.
pub fn morita_coset(m: &ModuleDescriptor, c: &Coset, q: usize) -> Result<(ModuleDescriptor, Coset)> {
    let n = morita_power(m, c.power(), q)?;
    Ok((morita_module(m, q)?, c.with_power(n)))
}

/// Morita reblocking of an affine map over a one-component ring.
pub fn morita_affine(m: &ModuleDescriptor, f: &AffineMap, q: usize) -> Result<(ModuleDescriptor, AffineMap)> {
    let n = morita_power(m, f.power(), q)?;
    Ok((morita_module(m, q)?, f.with_power(n)))
}

/// A row with `v` at index `b` of component `i`.
pub(crate) fn unit_vector(m: &ModuleDescriptor, n: usize, i: usize, b: usize, row: Row) -> Vector {
    let mut parts: Vec<Sparse> = (0..m.k()).map(|j| Sparse::zero(m.width(j, n))).collect();
    parts[i].set(m.field(i), b, row);
    Vector::from_parts(m, n, parts).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::Rank;
    use crate::rings::RingDescriptor;

    fn f5() -> (DivisionRing, ModuleDescriptor) {
        let r = DivisionRing::gf(5);
        (r.clone(), ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega))
    }

    fn row(r: &DivisionRing, xs: &[i64]) -> Row {
        xs.iter().map(|&x| r.from_int(x)).collect()
    }

    #[test]
    fn canonical_annihilator() {
        let (r, _) = f5();
        let s = canonicalize_annihilator(&r, 2, &[row(&r, &[2]), row(&r, &[1])]).unwrap();
        assert_eq!(s.basis(), &[row(&r, &[1, 3])]);
        let again = canonicalize_generators(&r, 2, s.basis()).unwrap();
        assert_eq!(again, s);
        let full = canonicalize_annihilator(&r, 2, &[vec![], vec![]]).unwrap();
        assert_eq!(full.dim(), 2);
        let zero = canonicalize_annihilator(&r, 2, &[row(&r, &[1, 0]), row(&r, &[0, 1])]).unwrap();
        assert_eq!(zero.dim(), 0);
    }

    #[test]
    fn intersections() {
        let (r, m) = f5();
        let a = Subspace::annihilated_by(&r, 2, &[row(&r, &[1]), row(&r, &[3])]).unwrap();
        let b = Subspace::annihilated_by(&r, 2, &[row(&r, &[1]), row(&r, &[1])]).unwrap();
        let ca = Coset::new(&m, vec![a.clone()], Vector::zero(&m, 2)).unwrap();
        let cb = Coset::new(&m, vec![b], Vector::zero(&m, 2)).unwrap();
        let i = ca.intersect(&m, &cb).unwrap();
        assert_eq!(i.dims(), vec![0]);
        assert_eq!(ca.intersect(&m, &ca).unwrap(), ca);
        let shifted = ca.translate(&m, &unit_vector(&m, 2, 0, 0, row(&r, &[1, 0])));
        assert!(ca.intersect(&m, &shifted).is_none());
    }

    #[test]
    fn standard_iso_of_diagonal() {
        let r = DivisionRing::Rationals;
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, r.clone()), Rank::Omega);
        let diag = Coset::new(&m, vec![Subspace::span(&r, 2, &[row(&r, &[1, 1])]).unwrap()], Vector::zero(&m, 2)).unwrap();
        let f = pp_iso_standard(&m, &diag);
        let img = diag.image(&m, &f);
        assert_eq!(img, Coset::standard(&m, 2, &[1]));
        let p = Coset::point(&m, &unit_vector(&m, 1, 0, 3, row(&r, &[5])));
        let g = pp_iso_standard(&m, &p);
        assert!(g.matrix(0).is_identity(&r));
        assert_eq!(p.image(&m, &g), Coset::point(&m, &Vector::zero(&m, 1)));
    }

    #[test]
    fn fixed_points_of_translation() {
        let (r, m) = f5();
        let t = AffineMap::translation(&m, &unit_vector(&m, 1, 0, 0, row(&r, &[1])));
        assert!(t.fixed_points(&m).is_none());
        let id = AffineMap::identity(&m, 2);
        assert!(id.fixed_points(&m).unwrap().is_full());
    }
}
