//! Brute-force ground truth: abelianized symmetric groups of finite
//! structures, and exhaustive checks of the symbolic engine on truncations
//! `T_r = { x : x is supported on basis indices < r }` over finite fields.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Pow;

use crate::defmaps::{support, PiecewiseBijection};
use crate::defsets::DefinableSet;
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::k1::K1Class;
use crate::modules::{ModuleDescriptor, Rank, Sparse, Vector};
use crate::rings::{ClassValue, DivisionRing, Scalar};

/// A permutation of `0..n` in image form.
pub type Perm = Vec<usize>;

fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `a` then `b`.
fn mul(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x]).collect()
}

fn inv(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

fn is_identity(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &x)| i == x)
}

/// Parity of a permutation: `true` when odd.
pub fn is_odd(a: &Perm) -> bool {
    let mut seen = vec![false; a.len()];
    let mut odd = false;
    for s in 0..a.len() {
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = a[j];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// `trans[β]` carries the base point to `β`.
    trans: BTreeMap<usize, Perm>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        Level { base, gens: vec![], trans: BTreeMap::from([(base, identity(n))]) }
    }

    fn rebuild_orbit(&mut self, n: usize) {
        self.trans = BTreeMap::from([(self.base, identity(n))]);
        let mut queue = vec![self.base];
        while let Some(b) = queue.pop() {
            for g in &self.gens {
                let c = g[b];
                if !self.trans.contains_key(&c) {
                    let u = mul(&self.trans[&b], g);
                    self.trans.insert(c, u);
                    queue.push(c);
                }
            }
        }
    }
}

/// A base and strong generating set.
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Schreier–Sims on the group generated by `gens`.
    pub fn new(n: usize, gens: &[Perm]) -> Self {
        let mut chain = StabChain { n, levels: vec![] };
        for g in gens {
            if chain.contains(g) {
                continue;
            }
            chain.add(0, g.clone());
            chain.complete(0);
        }
        chain
    }

    fn strip(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (j, l) in self.levels.iter().enumerate().skip(from) {
            let b = h[l.base];
            match l.trans.get(&b) {
                None => return (h, j),
                Some(u) => h = mul(&h, &inv(u)),
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (h, _) = self.strip(g, 0);
        is_identity(&h)
    }

    /// Adds `h` (fixing the base points before `from`) as a strong
    /// generator on every level it belongs to, down to where it sifts out.
    fn add(&mut self, from: usize, g: Perm) -> usize {
        let (h, j) = self.strip(&g, from);
        let j = if j == self.levels.len() {
            let b = (0..self.n).find(|&x| h[x] != x).expect("non-identity residue");
            self.levels.push(Level::new(b, self.n));
            j
        } else {
            j
        };
        for l in from..=j {
            self.levels[l].gens.push(h.clone());
            self.levels[l].rebuild_orbit(self.n);
        }
        j
    }

    fn complete(&mut self, top: usize) {
        let mut i = self.levels.len() as isize - 1;
        while i >= top as isize {
            let iu = i as usize;
            let mut found = None;
            'scan: for (b, u) in &self.levels[iu].trans {
                for s in &self.levels[iu].gens {
                    let c = s[*b];
                    let t = mul(&mul(u, s), &inv(&self.levels[iu].trans[&c]));
                    let (h, _) = self.strip(&t, iu + 1);
                    if !is_identity(&h) {
                        found = Some(t);
                        break 'scan;
                    }
                }
            }
            match found {
                Some(t) => {
                    let j = self.add(iu + 1, t);
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.trans.len() as u128).product()
    }
}

/// `G / [G, G]` for a permutation group whose abelianization is cyclic
/// (as for symmetric groups), reported as `Cyclic(index)`.
pub fn abelianization(n: usize, gens: &[Perm]) -> GroupDescriptor {
    let g = StabChain::new(n, gens);
    let mut hgens: Vec<Perm> = Vec::new();
    for a in gens {
        for b in gens {
            let c = mul(&mul(&inv(a), &inv(b)), &mul(a, b));
            if !is_identity(&c) {
                hgens.push(c);
            }
        }
    }
    // normal closure: conjugate generators until the subgroup is stable
    let mut h = StabChain::new(n, &hgens);
    let mut queue = hgens.clone();
    while let Some(x) = queue.pop() {
        for s in gens {
            let y = mul(&mul(&inv(s), &x), s);
            if !h.contains(&y) {
                hgens.push(y.clone());
                queue.push(y);
                h = StabChain::new(n, &hgens);
            }
        }
    }
    GroupDescriptor::Cyclic((g.order() / h.order()) as u64)
}

/// Adjacent transpositions generating `Σ_n`.
pub fn symmetric_generators(n: usize) -> Vec<Perm> {
    (0..n.saturating_sub(1))
        .map(|i| {
            let mut p = identity(n);
            p.swap(i, i + 1);
            p
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteReport {
    pub carrier: usize,
    /// `(size of the definable set, abelianized automorphism group)`.
    pub stages: Vec<(usize, GroupDescriptor)>,
    pub descriptor: GroupDescriptor,
    pub stabilized: bool,
}

/// `brute_k1_finite`: abelianized symmetric groups of definable sets of a
/// finite module, along the chain of sizes `2, 3, …, |M|^max_power`.
pub fn brute_k1_finite(m: &ModuleDescriptor, max_power: usize) -> Result<FiniteReport> {
    let mut size: u64 = 1;
    for i in 0..m.k() {
        let (Some(c), Some(rk)) = (m.field(i).cardinality(), m.underlying_rank(i)) else {
            return Err(Error::PreconditionFailed("the oracle needs a finite module".into()));
        };
        size = size.saturating_mul(c.saturating_pow(rk as u32));
    }
    if size < 2 {
        return Err(Error::PreconditionFailed("a finite structure needs at least two elements".into()));
    }
    if size > 4 || max_power == 0 || max_power > 2 {
        return Err(Error::TooLarge(format!("carrier {size}, max power {max_power}; allowed 2..4 and 1..2")));
    }
    let top = size.pow(max_power as u32) as usize;
    let stages: Vec<(usize, GroupDescriptor)> =
        (2..=top).map(|j| (j, abelianization(j, &symmetric_generators(j)))).collect();
    let descriptor = stages.last().expect("at least one stage").1.clone();
    let stabilized = stages.len() >= 2 && stages[stages.len() - 2].1 == descriptor;
    Ok(FiniteReport { carrier: size as usize, stages, descriptor, stabilized })
}

/// Outcome of an exhaustive comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Agreement {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl Agreement {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

const ENUMERATION_LIMIT: u64 = 200_000;

/// Every vector of `M^n` supported on indices `< r`.
pub fn truncation(m: &ModuleDescriptor, n: usize, r: usize) -> Result<Vec<Vector>> {
    let mut digits: Vec<(usize, usize, usize, u64)> = Vec::new(); // (component, index, column, radix)
    let mut total: u64 = 1;
    for i in 0..m.k() {
        let Some(c) = m.field(i).cardinality() else {
            return Err(Error::PreconditionFailed("truncations need finite fields".into()));
        };
        let idx = match m.rank(i) {
            Rank::Omega => r,
            Rank::Finite(rk) => rk.min(r),
        };
        for b in 0..idx {
            for col in 0..m.width(i, n) {
                digits.push((i, b, col, c));
                total = total.saturating_mul(c);
            }
        }
    }
    if total > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!("{total} points exceed the enumeration limit")));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut counter = vec![0u64; digits.len()];
    loop {
        let mut rows: Vec<BTreeMap<usize, Vec<Scalar>>> = vec![BTreeMap::new(); m.k()];
        for (d, &(i, b, col, _)) in digits.iter().enumerate() {
            let r = m.field(i);
            let row = rows[i].entry(b).or_insert_with(|| vec![r.zero(); m.width(i, n)]);
            row[col] = r.enumerate(counter[d]);
        }
        let parts = (0..m.k())
            .map(|i| Sparse::from_rows(m.field(i), m.width(i, n), std::mem::take(&mut rows[i])))
            .collect::<Result<Vec<_>>>()?;
        out.push(Vector::from_parts(m, n, parts)?);
        let mut d = 0;
        while d < digits.len() {
            counter[d] += 1;
            if counter[d] < digits[d].3 {
                break;
            }
            counter[d] = 0;
            d += 1;
        }
        if d == digits.len() {
            break;
        }
    }
    Ok(out)
}

/// The permutation an automorphism of `M^n` induces on `T_r`.
pub fn truncated_permutation(m: &ModuleDescriptor, f: &PiecewiseBijection, r: usize) -> Result<Perm> {
    let pts = truncation(m, f.power(), r)?;
    let index: HashMap<&Vector, usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    pts.iter()
        .map(|x| {
            let y = f.eval(m, x).ok_or_else(|| Error::PreconditionFailed("the map is not defined everywhere".into()))?;
            index
                .get(&y)
                .copied()
                .ok_or_else(|| Error::PreconditionFailed(format!("the map does not preserve indices < {r}")))
        })
        .collect()
}

/// Symbolic support against the points of `T_r` that `f` moves.
pub fn check_support(m: &ModuleDescriptor, f: &PiecewiseBijection, r: usize) -> Result<Agreement> {
    let s = support(m, f)?;
    let mut rep = Agreement::default();
    for x in truncation(m, f.power(), r)? {
        let moved = f.eval(m, &x).is_some_and(|y| y != x);
        rep.checked += 1;
        if moved != s.contains_point(m, &x) {
            rep.mismatches.push(format!("support disagrees at {x:?}"));
        }
    }
    Ok(rep)
}

/// Quadratic character of a nonzero element of an odd finite field.
fn is_nonsquare(r: &DivisionRing, a: &Scalar) -> bool {
    let DivisionRing::Finite(f) = r else { return false };
    let Scalar::Residue(x) = a else { return false };
    f.pow(*x, (f.size() - 1) / 2) != 1
}

/// The parity of `f` on `T_r` predicted from its K₁ class: `sign₀`, every
/// level sign, and `r` times the quadratic character of every level
/// determinant (a linear map acts on `r` copies of its coset direction).
pub fn predicted_parity(m: &ModuleDescriptor, c: &K1Class, r: usize) -> Result<bool> {
    let mut odd = false;
    for (i, comp) in c.components().iter().enumerate() {
        let ring = m.field(i);
        match ring.cardinality() {
            Some(q) if q % 2 == 1 => {}
            _ => return Err(Error::PreconditionFailed("parity prediction needs odd finite fields".into())),
        }
        if m.rank(i) != Rank::Omega {
            return Err(Error::PreconditionFailed("parity prediction needs rank omega".into()));
        }
        odd ^= comp.sign0;
        for l in comp.levels().values() {
            odd ^= l.sign;
            if let ClassValue::Unit(u) = l.det.value() {
                odd ^= r % 2 == 1 && is_nonsquare(ring, u);
            }
        }
    }
    Ok(odd)
}

/// Enumerated parity of `f` on `T_r` against the K₁ prediction.
pub fn check_parity(m: &ModuleDescriptor, f: &PiecewiseBijection, c: &K1Class, r: usize) -> Result<Agreement> {
    let p = truncated_permutation(m, f, r)?;
    let predicted = predicted_parity(m, c, r)?;
    let found = is_odd(&p);
    let mut rep = Agreement { checked: 1, mismatches: vec![] };
    if predicted != found {
        rep.mismatches.push(format!("parity on T_{r}: predicted odd={predicted}, enumerated odd={found}"));
    }
    Ok(rep)
}

/// `|D ∩ T_r|` by enumeration.
pub fn count_truncated(m: &ModuleDescriptor, d: &DefinableSet, r: usize) -> Result<usize> {
    Ok(truncation(m, d.power(), r)?.iter().filter(|x| d.contains_point(m, x)).count())
}

/// Enumerated size of `D ∩ T_r` against the K₀ class evaluated at
/// `X_i = |R_i|^r`.
pub fn check_count(m: &ModuleDescriptor, d: &DefinableSet, r: usize) -> Result<Agreement> {
    let xs = (0..m.k())
        .map(|i| {
            m.field(i)
                .cardinality()
                .map(|c| BigInt::from(c).pow(r as u32))
                .ok_or_else(|| Error::PreconditionFailed("counting needs finite fields".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let predicted = d.k0(m)?.eval(&xs);
    let found = BigInt::from(count_truncated(m, d, r)?);
    let mut rep = Agreement { checked: 1, mismatches: vec![] };
    if predicted != found {
        rep.mismatches.push(format!("|D ∩ T_{r}|: K0 predicts {predicted}, enumeration finds {found}"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingDescriptor;

    #[test]
    fn symmetric_group_orders() {
        for n in 2..=7 {
            let c = StabChain::new(n, &symmetric_generators(n));
            assert_eq!(c.order(), (1..=n as u128).product());
        }
        assert_eq!(abelianization(3, &symmetric_generators(3)), GroupDescriptor::Cyclic(2));
        // the alternating group A4 has abelianization C3
        let a = vec![1, 2, 0, 3];
        let b = vec![1, 0, 3, 2];
        assert_eq!(StabChain::new(4, &[a.clone(), b.clone()]).order(), 12);
        assert_eq!(abelianization(4, &[a, b]), GroupDescriptor::Cyclic(3));
    }

    #[test]
    fn finite_f3() {
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, DivisionRing::gf(3)), Rank::Finite(1));
        let rep = brute_k1_finite(&m, 1).unwrap();
        assert_eq!(rep.descriptor, GroupDescriptor::Cyclic(2));
        assert!(rep.stabilized);
        let one = ModuleDescriptor::uniform(RingDescriptor::simple(1, DivisionRing::gf(3)), Rank::Finite(0));
        assert_eq!(brute_k1_finite(&one, 1).unwrap_err().code(), "PreconditionFailed");
    }

    #[test]
    fn truncation_size() {
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, DivisionRing::gf(3)), Rank::Omega);
        assert_eq!(truncation(&m, 2, 2).unwrap().len(), 81);
    }
}
