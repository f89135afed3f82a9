//! K₁ classes of definable automorphisms.
//!
//! An automorphism of `M^n` is peeled one dimension at a time. At the top
//! dimension `d` of its support the pieces permute finitely many
//! `d`-dimensional cosets; the sign of that permutation and the Dieudonné
//! class of the induced linear maps are recorded at level `d`, the top part
//! is divided out, and the residual (of strictly smaller support dimension)
//! is peeled again. What is left at dimension 0 is a permutation of finitely
//! many points, whose sign is `sign₀`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::defmaps::{
    coset_permutation, extend_to_gl, extend_unchecked, globalize, common_chunk, PiecewiseBijection, Piece,
};
use crate::defsets::{Block, DefinableSet};
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::modules::{ModuleDescriptor, Rank, Vector};
use crate::ppsets::{unit_vector, AffineMap, Colour, Coset};
use crate::rings::matrix::{row_scale, row_times, unit_row};
use crate::rings::{dieudonne_det, DivisionRing, Mat, RingDescriptor, UnitClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelClass {
    pub det: UnitClass,
    pub sign: bool,
}

impl LevelClass {
    fn is_trivial(&self) -> bool {
        !self.sign && self.det.is_trivial()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentClass {
    ring: DivisionRing,
    pub sign0: bool,
    levels: BTreeMap<usize, LevelClass>,
}

impl ComponentClass {
    pub fn zero(ring: &DivisionRing) -> Self {
        ComponentClass { ring: ring.clone(), sign0: false, levels: BTreeMap::new() }
    }

    pub fn ring(&self) -> &DivisionRing {
        &self.ring
    }

    /// Non-trivial levels only.
    pub fn levels(&self) -> &BTreeMap<usize, LevelClass> {
        &self.levels
    }

    pub fn level(&self, d: usize) -> LevelClass {
        self.levels
            .get(&d)
            .cloned()
            .unwrap_or_else(|| LevelClass { det: UnitClass::trivial(&self.ring), sign: false })
    }

    pub fn add_level(&mut self, d: usize, det: &UnitClass, sign: bool) -> Result<()> {
        let cur = self.level(d);
        let next = LevelClass { det: cur.det.combine(det)?, sign: cur.sign ^ sign };
        if next.is_trivial() {
            self.levels.remove(&d);
        } else {
            self.levels.insert(d, next);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        !self.sign0 && self.levels.is_empty()
    }

    fn add(&self, o: &ComponentClass) -> Result<ComponentClass> {
        if self.ring != o.ring {
            return Err(Error::Mismatch("K1 classes over different rings".into()));
        }
        let mut out = self.clone();
        out.sign0 ^= o.sign0;
        for (d, l) in &o.levels {
            out.add_level(*d, &l.det, l.sign)?;
        }
        Ok(out)
    }
}

/// A K₁ class: one graded record of signs and determinant classes per ring
/// component. Levels are raw dimensions over the division ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K1Class {
    components: Vec<ComponentClass>,
}

impl K1Class {
    pub fn zero(s: &RingDescriptor) -> Self {
        K1Class { components: s.components().iter().map(|c| ComponentClass::zero(&c.ring)).collect() }
    }

    pub fn from_components(components: Vec<ComponentClass>) -> Self {
        K1Class { components }
    }

    pub fn components(&self) -> &[ComponentClass] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ComponentClass {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ComponentClass {
        &mut self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ComponentClass::is_zero)
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| {
                let levels: Vec<Value> = c
                    .levels
                    .iter()
                    .map(|(d, l)| json!({"level": d, "det": l.det.normal_form(), "sign": u8::from(l.sign)}))
                    .collect();
                json!({"sign0": u8::from(c.sign0), "levels": levels})
            })
            .collect();
        json!({ "components": comps })
    }
}

impl std::fmt::Display for K1Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let mut s = vec![format!("sign0 {}", u8::from(c.sign0))];
                for (d, l) in &c.levels {
                    s.push(format!("level {d}: det {} sign {}", l.det, u8::from(l.sign)));
                }
                s.join(", ")
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

pub fn k1_add(a: &K1Class, b: &K1Class) -> Result<K1Class> {
    if a.components.len() != b.components.len() {
        return Err(Error::Mismatch("K1 classes over different rings".into()));
    }
    let components = a.components.iter().zip(&b.components).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
    Ok(K1Class { components })
}

pub fn k1_eq(a: &K1Class, b: &K1Class) -> Result<bool> {
    if a.components.len() != b.components.len()
        || a.components.iter().zip(&b.components).any(|(x, y)| x.ring != y.ring)
    {
        return Err(Error::Mismatch("K1 classes over different rings".into()));
    }
    Ok(a == b)
}

/// The image of `[A] ∈ K₁(S)`: the Dieudonné class of each component block
/// at level `n·qᵢ`, all signs zero.
pub fn k1_of_gl(m: &ModuleDescriptor, mats: &[Mat]) -> Result<K1Class> {
    if mats.len() != m.k() {
        return Err(Error::Shape("one matrix per ring component expected".into()));
    }
    let mut c = K1Class::zero(m.ring());
    for (i, a) in mats.iter().enumerate() {
        if !a.is_square() || a.rows() % m.q(i) != 0 {
            return Err(Error::Shape(format!("component {i} matrix must be square of size n·q")));
        }
        let det = dieudonne_det(m.field(i), a)?;
        c.components[i].add_level(a.rows(), &det, false)?;
    }
    Ok(c)
}

fn check_supported(m: &ModuleDescriptor) -> Result<()> {
    for i in 0..m.k() {
        if m.field(i).cardinality() == Some(2) {
            return Err(Error::UnsupportedRing(format!(
                "component {i} is over GF(2), where 1 is not a sum of two units"
            )));
        }
    }
    m.require_infinite("k1_invariant")
}

/// K₁ class of a definable automorphism.
pub fn k1_invariant(m: &ModuleDescriptor, f: &PiecewiseBijection) -> Result<K1Class> {
    check_supported(m)?;
    f.check(m)?;
    if !f.is_automorphism(m) {
        return Err(Error::InvalidMap(vec!["source and target differ".into()]));
    }
    let h = globalize(m, f);
    if m.k() == 1 {
        let mut c = ComponentClass::zero(m.field(0));
        peel(m, &h, &mut c)?;
        return Ok(K1Class { components: vec![c] });
    }
    let parts = split_components(m, &h)?;
    let mut components = Vec::with_capacity(m.k());
    for (i, hi) in parts.iter().enumerate() {
        let mi = m.restrict(i);
        let mut c = ComponentClass::zero(m.field(i));
        peel(&mi, hi, &mut c)?;
        components.push(c);
    }
    Ok(K1Class { components })
}

fn parity(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        odd ^= len % 2 == 0;
    }
    odd
}

/// Matrix of the linear part of `f` from the direction of `src` to the
/// direction of `dst`, in their echelon bases.
fn induced_linear(m: &ModuleDescriptor, src: &Coset, dst: &Coset, f: &AffineMap) -> Result<Mat> {
    let r = m.field(0);
    let ws = src.subspace(0);
    let wd = dst.subspace(0);
    let rows = ws
        .basis()
        .iter()
        .map(|b| {
            let v = row_times(r, b, f.matrix(0));
            wd.pivots().iter().map(|&c| v[c].clone()).collect()
        })
        .collect();
    Mat::from_rows(rows, wd.dim())
}

/// Peels a global automorphism of `M^n` over a one-component ring.
fn peel(m: &ModuleDescriptor, h: &PiecewiseBijection, acc: &mut ComponentClass) -> Result<()> {
    let r = m.field(0).clone();
    let mut h = h.clone();
    let mut bound = usize::MAX;
    loop {
        let s = h.restrict_to_support(m);
        let Some(level) = s.pieces().iter().map(|p| p.domain().dims()[0]).max() else {
            return Ok(());
        };
        if level >= bound {
            return Err(Error::UnsupportedDecomposition(format!("peeling stalled at level {level}")));
        }
        bound = level;
        if level == 0 {
            acc.sign0 ^= point_parity(m, &s)?;
            return Ok(());
        }
        let top: Vec<&Piece> = s.pieces().iter().filter(|p| p.domain().dims()[0] == level).collect();
        let cosets: Vec<Coset> = top.iter().map(|p| p.domain().ambient().clone()).collect();
        let mut sigma = Vec::with_capacity(top.len());
        for p in &top {
            let img = p.domain().ambient().image(m, p.map());
            let j = cosets.iter().position(|c| *c == img).ok_or_else(|| {
                Error::InvalidMap(vec!["a top-dimensional piece leaves the support".into()])
            })?;
            sigma.push(j);
        }
        let mut det = UnitClass::trivial(&r);
        for (idx, p) in top.iter().enumerate() {
            let l = induced_linear(m, &cosets[idx], &cosets[sigma[idx]], p.map())?;
            det = det.combine(&dieudonne_det(&r, &l)?)?;
        }
        acc.add_level(level, &det, parity(&sigma))?;

        let disjoint = (0..cosets.len())
            .all(|a| (a + 1..cosets.len()).all(|b| cosets[a].intersect(m, &cosets[b]).is_none()));
        h = if disjoint {
            let maps: Vec<AffineMap> = top.iter().map(|p| p.map().clone()).collect();
            let w = coset_permutation(m, h.power(), &cosets, &maps);
            w.inverse(m).after(m, &h)
        } else {
            copy_residual(m, &h, &top, &cosets, &sigma)?
        };
    }
}

/// Residual when the top cosets overlap: move each top piece into its own
/// parallel copy `C × {a}` inside `M^{n+1}`, where the copies are disjoint.
fn copy_residual(
    m: &ModuleDescriptor,
    h: &PiecewiseBijection,
    top: &[&Piece],
    cosets: &[Coset],
    sigma: &[usize],
) -> Result<PiecewiseBijection> {
    let n = h.power();
    let n1 = n + 1;
    let r = m.field(0);
    let w = m.width(0, 1);
    let slots: Vec<Vector> = (1..=top.len())
        .map(|l| match m.rank(0) {
            Rank::Omega => unit_vector(m, 1, 0, l - 1, unit_row(r, w, 0)),
            Rank::Finite(_) => unit_vector(m, 1, 0, 0, row_scale(r, &r.enumerate(l as u64), &unit_row(r, w, 0))),
        })
        .collect();
    let lift = |a: &Vector| Vector::zero(m, n).concat(m, a);
    let hp = globalize(m, &h.pad(m, n1));
    let mut beta_pieces = Vec::new();
    for (p, a) in top.iter().zip(&slots) {
        let low = p.domain().pad(m, n1);
        let t = AffineMap::translation(m, &lift(a));
        let high = low.image(m, &t);
        beta_pieces.push(Piece::new(m, low, t.clone())?);
        beta_pieces.push(Piece::new(m, high, t.inverse(m))?);
    }
    let beta = globalize(m, &PiecewiseBijection::from_pieces(n1, beta_pieces));
    let mut copies = Vec::new();
    let mut maps = Vec::new();
    for (l, p) in top.iter().enumerate() {
        let c = cosets[l].product(m, &Coset::point(m, &slots[l]));
        let shift = lift(&slots[sigma[l]].sub(m, &slots[l]));
        maps.push(p.map().pad(m, n1).then(m, &AffineMap::translation(m, &shift)));
        copies.push(c);
    }
    let w_hat = coset_permutation(m, n1, &copies, &maps);
    let conj = beta.after(m, &hp.after(m, &beta));
    Ok(w_hat.inverse(m).after(m, &conj))
}

fn point_parity(m: &ModuleDescriptor, s: &PiecewiseBijection) -> Result<bool> {
    let pts: Vec<&Vector> = s.pieces().iter().map(|p| p.domain().ambient().rep()).collect();
    let mut perm = Vec::with_capacity(pts.len());
    for p in s.pieces() {
        let y = p.map().apply(m, p.domain().ambient().rep());
        let j = pts
            .iter()
            .position(|x| **x == y)
            .ok_or_else(|| Error::InvalidMap(vec!["a moved point leaves the support".into()]))?;
        perm.push(j);
    }
    Ok(parity(&perm))
}

/// Refines `M_i^n` by the given cosets into disjoint blocks.
fn atoms(m: &ModuleDescriptor, n: usize, cuts: &[Coset]) -> Vec<Block> {
    let mut out = vec![Block::from_coset(Coset::full(m, n))];
    for c in cuts {
        let mut next = Vec::with_capacity(out.len() * 2);
        for a in &out {
            if let Some(x) = a.intersect_coset(m, c) {
                next.push(x);
            }
            if let Some(y) = a.minus_coset(m, c) {
                next.push(y);
            }
        }
        out = next;
    }
    out
}

/// Writes a global automorphism of `M^n` over a product ring as a product
/// of automorphisms of the component modules, if it is one.
pub fn split_components(m: &ModuleDescriptor, h: &PiecewiseBijection) -> Result<Vec<PiecewiseBijection>> {
    let n = h.power();
    let k = m.k();
    let subs: Vec<ModuleDescriptor> = (0..k).map(|i| m.restrict(i)).collect();
    let mut comp_atoms = Vec::with_capacity(k);
    for i in 0..k {
        let mut cuts: Vec<Coset> = Vec::new();
        for p in h.pieces() {
            for c in std::iter::once(p.domain().ambient()).chain(p.domain().holes()) {
                let ci = c.component(i);
                if !ci.is_full() && !cuts.contains(&ci) {
                    cuts.push(ci);
                }
            }
        }
        let at = atoms(&subs[i], n, &cuts);
        let pts = at.iter().map(|a| a.find_point(&subs[i])).collect::<Result<Vec<_>>>()?;
        comp_atoms.push((at, pts));
    }
    let mut chosen: Vec<Vec<Option<AffineMap>>> = comp_atoms.iter().map(|(a, _)| vec![None; a.len()]).collect();
    let mut idx = vec![0usize; k];
    loop {
        let x = Vector::from_components(&(0..k).map(|i| comp_atoms[i].1[idx[i]].clone()).collect::<Vec<_>>());
        let p = h
            .pieces()
            .iter()
            .find(|p| p.domain().contains_point(m, &x))
            .ok_or_else(|| Error::InvalidMap(vec!["pieces do not cover the module".into()]))?;
        for i in 0..k {
            let fi = p.map().component(i);
            match &chosen[i][idx[i]] {
                None => chosen[i][idx[i]] = Some(fi),
                Some(g) => {
                    if !g.agrees_on(&subs[i], &fi, comp_atoms[i].0[idx[i]].ambient()) {
                        return Err(Error::UnsupportedDecomposition(format!(
                            "the map does not act componentwise on component {i}"
                        )));
                    }
                }
            }
        }
        let mut c = 0;
        while c < k {
            idx[c] += 1;
            if idx[c] < comp_atoms[c].0.len() {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
        if c == k {
            break;
        }
    }
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let pieces = comp_atoms[i]
            .0
            .iter()
            .zip(&chosen[i])
            .map(|(a, f)| Piece::new(&subs[i], a.clone(), f.clone().expect("every atom visited")))
            .collect::<Result<Vec<_>>>()?;
        let hi = PiecewiseBijection::from_pieces(n, pieces);
        hi.check(&subs[i]).map_err(|_| {
            Error::UnsupportedDecomposition(format!("component {i} of the map is not a bijection"))
        })?;
        out.push(hi);
    }
    Ok(out)
}

/// `f₁ × ⋯ × f_k` for automorphisms `fᵢ` of `M_iⁿ` given over the component
/// modules `m.restrict(i)`.
pub fn componentwise(m: &ModuleDescriptor, fs: &[PiecewiseBijection]) -> Result<PiecewiseBijection> {
    if fs.len() != m.k() || fs.iter().any(|f| f.power() != fs[0].power()) {
        return Err(Error::Shape("one map per component, all in one power".into()));
    }
    let n = fs[0].power();
    let full: Vec<Coset> = (0..m.k()).map(|i| Coset::full(&m.restrict(i), n)).collect();
    let embed = |i: usize, c: &Coset| -> Coset {
        let mut cs = full.clone();
        cs[i] = c.clone();
        Coset::from_components(&cs)
    };
    let mut combos: Vec<(Vec<Coset>, Vec<Coset>, Vec<AffineMap>)> = vec![(vec![], vec![], vec![])];
    for (i, f) in fs.iter().enumerate() {
        let mut next = Vec::new();
        for (amb, holes, maps) in &combos {
            for p in f.pieces() {
                let mut a = amb.clone();
                a.push(p.domain().ambient().clone());
                let mut h = holes.clone();
                h.extend(p.domain().holes().iter().map(|c| embed(i, c)));
                let mut mp = maps.clone();
                mp.push(p.map().clone());
                next.push((a, h, mp));
            }
        }
        combos = next;
    }
    let mut pieces = Vec::new();
    for (amb, holes, maps) in combos {
        let ambient = Coset::from_components(&amb);
        let Some(b) = Block::new(m, ambient, holes) else { continue };
        pieces.push(Piece::new(m, b, AffineMap::from_components(&maps))?);
    }
    let src: Vec<DefinableSet> = fs.iter().map(|f| f.source().clone()).collect();
    let mut f = PiecewiseBijection::from_pieces(n, pieces);
    if src.iter().enumerate().all(|(i, s)| s.same_set(&m.restrict(i), &DefinableSet::full(&m.restrict(i), n))) {
        f = globalize(m, &f);
    }
    Ok(f)
}

/// `expected_k1_group`: the group K₁ is predicted to be, with levels indexed
/// as multiples of the matrix size.
pub fn expected_k1_group(m: &ModuleDescriptor) -> Result<GroupDescriptor> {
    use GroupDescriptor::*;
    let k = m.k();
    let infinite: Vec<bool> = (0..k).map(|i| m.is_infinite(i)).collect();
    if infinite.iter().all(|x| !x) {
        if (0..k).all(|i| m.underlying_rank(i) == Some(0)) {
            return Err(Error::PreconditionFailed("a finite structure needs at least two elements".into()));
        }
        return Ok(Cyclic(2));
    }
    if infinite.iter().any(|x| !x) {
        return Err(Error::PreconditionFailed("components must be all finite or all infinite".into()));
    }
    let mut parts = Vec::with_capacity(k);
    for i in 0..k {
        if m.q(i) == 1 && m.field(i).cardinality() == Some(2) {
            return Err(Error::UnsupportedRing("M(1, GF(2)) with an infinite module".into()));
        }
        let per = DirectSum(vec![UnitGroupAb(m.field(i).clone()), Cyclic(2)]);
        parts.push(DirectSum(vec![Cyclic(2), CountableSum(Box::new(per))]).normalized());
    }
    Ok(if k == 1 { parts.pop().unwrap() } else { FiniteProduct(parts) })
}

/// Conjugation data carrying automorphisms of `E1` of dimension at most
/// `m̄` to automorphisms of `E2`.
#[derive(Clone, Debug)]
pub struct Transport {
    power: usize,
    mbar: Vec<usize>,
    e1: DefinableSet,
    e2: DefinableSet,
    chunk: DefinableSet,
    g: PiecewiseBijection,
}

/// `transport_automorphism_group`.
pub fn transport_automorphism_group(
    m: &ModuleDescriptor,
    e1: &DefinableSet,
    e2: &DefinableSet,
    mbar: &[usize],
) -> Result<Transport> {
    let (chunk, g) = common_chunk(m, e1, e2, mbar)?;
    let power = chunk.power();
    Ok(Transport {
        power,
        mbar: mbar.to_vec(),
        e1: e1.pad(m, power),
        e2: e2.pad(m, power),
        chunk,
        g,
    })
}

impl Transport {
    pub fn power(&self) -> usize {
        self.power
    }

    pub fn chunk(&self) -> &DefinableSet {
        &self.chunk
    }

    /// `g: chunk → E2`.
    pub fn bijection(&self) -> &PiecewiseBijection {
        &self.g
    }

    pub fn target(&self) -> &DefinableSet {
        &self.e2
    }

    /// The automorphism of `E2` conjugate to `f`.
    pub fn transport(&self, m: &ModuleDescriptor, f: &PiecewiseBijection) -> Result<PiecewiseBijection> {
        if f.power() > self.power {
            return Err(Error::Mismatch("map lives in a larger power than the transport".into()));
        }
        let f = if f.power() < self.power { f.pad(m, self.power) } else { f.clone() };
        if !f.source().same_set(m, &self.e1) || !f.is_automorphism(m) {
            return Err(Error::PreconditionFailed("the map must be an automorphism of E1".into()));
        }
        let supp = crate::defmaps::support(m, &f)?;
        if let Colour::Dim(d) = supp.dim() {
            if d.iter().zip(&self.mbar).any(|(a, b)| a > b) {
                return Err(Error::PreconditionFailed("the map has dimension above m̄".into()));
            }
        }
        let g_set = self.chunk.intersect(m, &self.e1);
        let moved = if supp.is_subset(m, &g_set) {
            f
        } else {
            if m.k() > 1 {
                return Err(Error::UnsupportedDecomposition(
                    "moving the support into the common chunk needs a single component".into(),
                ));
            }
            let theta = self.slide(m, &supp, &g_set)?;
            theta.after(m, &f.after(m, &theta))
        };
        let inner = moved.restrict_to_support(m);
        let on_chunk = extend_unchecked(m, &inner, &self.chunk);
        Ok(self.g.after(m, &on_chunk.after(m, &self.g.inverse(m))))
    }

    /// An involution of `E1` carrying `X ∖ G` into a top block of `G`.
    fn slide(&self, m: &ModuleDescriptor, x: &DefinableSet, g_set: &DefinableSet) -> Result<PiecewiseBijection> {
        let r = m.field(0);
        let bg = g_set
            .blocks()
            .iter()
            .max_by_key(|b| b.dims())
            .ok_or_else(|| Error::PreconditionFailed("the common chunk misses E1".into()))?;
        let q = bg.ambient();
        let wq = q.subspace(0);
        let mut bad: Vec<Coset> = x.blocks().iter().map(|b| b.ambient().clone()).collect();
        bad.extend(bg.holes().iter().cloned());
        let mut todo: Vec<Block> = x.minus(m, g_set).blocks().to_vec();
        let mut pieces = Vec::new();
        while let Some(z) = todo.pop() {
            let amb = z.ambient();
            let v = &wq.basis()[..z.dims()[0]];
            // t + V must not lie inside any bad coset
            let avoid: Vec<Coset> = bad
                .iter()
                .filter_map(|k| k.intersect(m, q))
                .filter(|k| v.iter().all(|row| k.subspace(0).contains_row(r, row)))
                .collect();
            let t = Block::new(m, q.clone(), avoid)
                .ok_or_else(|| Error::UnsupportedDecomposition("no room left in the common chunk".into()))?
                .find_point(m)?;
            let a = extend_to_gl(m, 0, m.width(0, self.power), amb.subspace(0).basis(), v);
            let psi = AffineMap::from_data(m, amb.rep(), vec![a], &t)?;
            let pinv = psi.inverse(m);
            let line = amb.image(m, &psi);
            let pre: Vec<Coset> = bad.iter().filter_map(|k| line.intersect(m, k)).map(|c| c.image(m, &pinv)).collect();
            for (j, c) in pre.iter().enumerate() {
                let mut rest = z.intersect_coset(m, c);
                for prev in &pre[..j] {
                    rest = rest.and_then(|b| b.minus_coset(m, prev));
                }
                todo.extend(rest);
            }
            let mut holes = z.holes().to_vec();
            holes.extend(pre);
            let Some(good) = Block::new(m, amb.clone(), holes) else { continue };
            let img = good.image(m, &psi);
            bad.push(img.ambient().clone());
            pieces.push(Piece::new(m, good, psi)?);
            pieces.push(Piece::new(m, img, pinv)?);
        }
        let moved = PiecewiseBijection::from_pieces(self.power, pieces);
        Ok(extend_unchecked(m, &moved, &self.e1))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::defmaps::compose;
    use crate::rings::RingDescriptor;

    fn omega(r: &DivisionRing) -> ModuleDescriptor {
        ModuleDescriptor::uniform(RingDescriptor::simple(1, r.clone()), Rank::Omega)
    }

    fn point(m: &ModuleDescriptor, b: usize, x: i64) -> Vector {
        let r = m.field(0);
        unit_vector(m, 1, 0, b, vec![r.from_int(x)])
    }

    #[test]
    fn identity_has_zero_class() {
        let r = DivisionRing::gf(5);
        let m = omega(&r);
        let id = PiecewiseBijection::identity(&DefinableSet::full(&m, 2), &m);
        assert!(k1_invariant(&m, &id).unwrap().is_zero());
    }

    #[test]
    fn scaling_gives_its_unit() {
        let r = DivisionRing::gf(5);
        let m = omega(&r);
        let u = Mat::diag(&r, &[r.from_int(2)]);
        let f = AffineMap::new(&m, vec![u], Vector::zero(&m, 1)).unwrap();
        let c = k1_invariant(&m, &PiecewiseBijection::affine_on(&m, &DefinableSet::full(&m, 1), &f)).unwrap();
        let l = c.component(0).level(1);
        assert_eq!(l.det, UnitClass::of(&r, &r.from_int(2)).unwrap());
        assert!(!l.sign && !c.component(0).sign0);
        assert_eq!(c.component(0).levels().len(), 1);
    }

    #[test]
    fn point_transposition_is_sign0() {
        let r = DivisionRing::gf(5);
        let m = omega(&r);
        let (a, b) = (point(&m, 0, 1), point(&m, 2, 3));
        let t = AffineMap::translation(&m, &b.sub(&m, &a));
        let f = PiecewiseBijection::from_pieces(
            1,
            vec![
                Piece::new(&m, Block::from_coset(Coset::point(&m, &a)), t.clone()).unwrap(),
                Piece::new(&m, Block::from_coset(Coset::point(&m, &b)), t.inverse(&m)).unwrap(),
            ],
        );
        let c = k1_invariant(&m, &f).unwrap();
        assert!(c.component(0).sign0);
        assert!(c.component(0).levels().is_empty());
    }

    #[test]
    fn parallel_line_swap_is_level_one_sign() {
        let r = DivisionRing::Rationals;
        let m = omega(&r);
        let line = Coset::standard(&m, 2, &[1]);
        let v = unit_vector(&m, 2, 0, 0, vec![r.zero(), r.one()]);
        let t = AffineMap::translation(&m, &v);
        let f = PiecewiseBijection::from_pieces(
            2,
            vec![
                Piece::new(&m, Block::from_coset(line.clone()), t.clone()).unwrap(),
                Piece::new(&m, Block::from_coset(line.translate(&m, &v)), t.inverse(&m)).unwrap(),
            ],
        );
        let c = k1_invariant(&m, &f).unwrap();
        let l = c.component(0).level(1);
        assert!(l.sign && l.det.is_trivial());
        assert!(!c.component(0).sign0);
        assert_eq!(c.component(0).levels().len(), 1);
    }

    #[test]
    fn gl_embedding_examples() {
        let r = DivisionRing::Rationals;
        let m = omega(&r);
        let p = Mat::from_rows(vec![vec![r.zero(), r.one()], vec![r.one(), r.zero()]], 2).unwrap();
        let c = k1_of_gl(&m, &[p]).unwrap();
        assert_eq!(c.component(0).level(2).det, UnitClass::of(&r, &r.from_int(-1)).unwrap());
        let mut e = Mat::identity(&r, 2);
        e.set(0, 1, r.from_int(7));
        assert!(k1_of_gl(&m, &[e]).unwrap().is_zero());
        assert!(k1_of_gl(&m, &[Mat::identity(&r, 3)]).unwrap().is_zero());
    }

    #[test]
    fn class_arithmetic() {
        let r = DivisionRing::Rationals;
        let s = RingDescriptor::simple(1, r.clone());
        let mut a = K1Class::zero(&s);
        a.component_mut(0).sign0 = true;
        a.component_mut(0).add_level(1, &UnitClass::of(&r, &r.from_int(2)).unwrap(), false).unwrap();
        let mut b = K1Class::zero(&s);
        b.component_mut(0).sign0 = true;
        b.component_mut(0).add_level(1, &UnitClass::of(&r, &r.from_int(3)).unwrap(), false).unwrap();
        let c = k1_add(&a, &b).unwrap();
        assert!(!c.component(0).sign0);
        assert_eq!(c.component(0).level(1).det, UnitClass::of(&r, &r.from_int(6)).unwrap());
        assert!(k1_eq(&k1_add(&a, &K1Class::zero(&s)).unwrap(), &a).unwrap());
    }

    #[test]
    fn expected_groups() {
        let f5 = DivisionRing::gf(5);
        let m1 = ModuleDescriptor::uniform(RingDescriptor::simple(1, f5.clone()), Rank::Omega);
        let m2 = ModuleDescriptor::uniform(RingDescriptor::simple(2, f5.clone()), Rank::Omega);
        let g1 = expected_k1_group(&m1).unwrap();
        assert_eq!(g1.to_string(), "Z2 + sum_i (C4 + Z2)");
        assert_eq!(g1, expected_k1_group(&m2).unwrap());
        let fin = ModuleDescriptor::uniform(RingDescriptor::simple(1, f5), Rank::Finite(2));
        assert_eq!(expected_k1_group(&fin).unwrap(), GroupDescriptor::Cyclic(2));
        let f2 = ModuleDescriptor::uniform(RingDescriptor::simple(1, DivisionRing::gf(2)), Rank::Omega);
        assert_eq!(expected_k1_group(&f2).unwrap_err().code(), "UnsupportedRing");
    }

    #[test]
    fn composition_of_swaps() {
        let r = DivisionRing::gf(5);
        let m = omega(&r);
        let (a, b, c) = (point(&m, 0, 1), point(&m, 1, 1), point(&m, 2, 1));
        let swap = |x: &Vector, y: &Vector| {
            let t = AffineMap::translation(&m, &y.sub(&m, x));
            PiecewiseBijection::from_pieces(
                1,
                vec![
                    Piece::new(&m, Block::from_coset(Coset::point(&m, x)), t.clone()).unwrap(),
                    Piece::new(&m, Block::from_coset(Coset::point(&m, y)), t.inverse(&m)).unwrap(),
                ],
            )
            .globalized(&m)
        };
        let f = compose(&m, &swap(&a, &b), &swap(&b, &c)).unwrap();
        assert!(k1_invariant(&m, &f).unwrap().is_zero());
    }
}
