//! Symbolic abelian group expressions for the expected shape of K₁.

use std::fmt;

use crate::rings::DivisionRing;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Cyclic(u64),
    Integers,
    /// `R^× / [R^×, R^×]`, kept symbolic until [`GroupDescriptor::normalized`].
    UnitGroupAb(DivisionRing),
    /// `⊕_{i ≥ 1} G`.
    CountableSum(Box<GroupDescriptor>),
    DirectSum(Vec<GroupDescriptor>),
    FiniteProduct(Vec<GroupDescriptor>),
}

impl GroupDescriptor {
    /// Unit-group abelianizations replaced by concrete expressions:
    /// `F_q^× = C(q−1)`, `ℚ^× = Z2 ⊕ ⊕_p Z`, and positive reduced norms
    /// `ℚ_{>0}^× = ⊕_p Z` for the quaternions. Nested direct sums are
    /// flattened.
    pub fn normalized(&self) -> GroupDescriptor {
        use GroupDescriptor::*;
        match self {
            UnitGroupAb(r) => match r {
                DivisionRing::Finite(f) => Cyclic(f.size() - 1),
                DivisionRing::Rationals => DirectSum(vec![Cyclic(2), CountableSum(Box::new(Integers))]),
                DivisionRing::Quaternions => CountableSum(Box::new(Integers)),
            },
            CountableSum(g) => CountableSum(Box::new(g.normalized())),
            DirectSum(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    match g.normalized() {
                        DirectSum(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    DirectSum(out)
                }
            }
            FiniteProduct(gs) => FiniteProduct(gs.iter().map(GroupDescriptor::normalized).collect()),
            g => g.clone(),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupDescriptor::*;
        match self {
            Cyclic(1) => write!(f, "0"),
            Cyclic(2) => write!(f, "Z2"),
            Cyclic(m) => write!(f, "C{m}"),
            Integers => write!(f, "Z"),
            UnitGroupAb(r) => write!(f, "U({})", r.name()),
            CountableSum(g) => write!(f, "sum_i ({g})"),
            DirectSum(gs) => {
                let s: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", s.join(" + "))
            }
            FiniteProduct(gs) => {
                let s: Vec<String> = gs.iter().map(|g| format!("({g})")).collect();
                write!(f, "{}", s.join(" x "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupDescriptor::*;

    #[test]
    fn rendering() {
        let g = DirectSum(vec![
            Cyclic(2),
            CountableSum(Box::new(DirectSum(vec![UnitGroupAb(DivisionRing::gf(5)), Cyclic(2)]))),
        ]);
        assert_eq!(g.normalized().to_string(), "Z2 + sum_i (C4 + Z2)");
        let q = DirectSum(vec![UnitGroupAb(DivisionRing::Rationals), Cyclic(2)]).normalized();
        assert_eq!(q.to_string(), "Z2 + sum_i (Z) + Z2");
    }
}
