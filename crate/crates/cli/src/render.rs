//! Engine values written back as session text, and JSON views.

use defk::defmaps::PiecewiseBijection;
use defk::defsets::{Block, DefinableSet, K0Class};
use defk::group::GroupDescriptor;
use defk::modules::{ModuleDescriptor, Rank, Vector};
use defk::ppsets::{Colour, Coset};
use defk::rings::{DivisionRing, Row};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

fn row_text(r: &DivisionRing, row: &Row) -> String {
    format!("[{}]", row.iter().map(|x| r.format(x)).collect::<Vec<_>>().join(", "))
}

fn rows_text(r: &DivisionRing, rows: &[Row]) -> String {
    format!("[{}]", rows.iter().map(|x| row_text(r, x)).collect::<Vec<_>>().join(", "))
}

fn per_comp(parts: Vec<String>) -> String {
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("{{{}}}", parts.join("; "))
    }
}

/// A vector listed by basis index, zero rows filled in.
pub fn vector_text(m: &ModuleDescriptor, v: &Vector) -> String {
    per_comp(
        (0..m.k())
            .map(|i| {
                let r = m.field(i);
                let s = v.part(i);
                let rows: Vec<Row> = match s.max_index() {
                    None => vec![],
                    Some(top) => (0..=top).map(|b| s.row_or_zero(r, b)).collect(),
                };
                rows_text(r, &rows)
            })
            .collect(),
    )
}

pub fn coset_text(m: &ModuleDescriptor, c: &Coset) -> String {
    let n = c.power();
    let full = c.is_full();
    let zero = c.rep().is_zero();
    if full && zero {
        return format!("full({n})");
    }
    let mut s = format!("coset(n={n}");
    if !full {
        let span = per_comp((0..m.k()).map(|i| rows_text(m.field(i), c.subspace(i).basis())).collect());
        s.push_str(&format!(", span={span}"));
    }
    if !zero {
        s.push_str(&format!(", rep={}", vector_text(m, c.rep())));
    }
    s.push(')');
    s
}

pub fn block_text(m: &ModuleDescriptor, b: &Block) -> String {
    if b.holes().is_empty() {
        return format!("block({})", coset_text(m, b.ambient()));
    }
    let holes: Vec<String> = b.holes().iter().map(|h| coset_text(m, h)).collect();
    format!("block({}, holes=[{}])", coset_text(m, b.ambient()), holes.join(", "))
}

pub fn set_text(m: &ModuleDescriptor, d: &DefinableSet) -> String {
    if d.is_empty() {
        return format!("empty({})", d.power());
    }
    let parts: Vec<String> = d.blocks().iter().map(|b| block_text(m, b)).collect();
    format!("union({})", parts.join(", "))
}

/// A `map` statement reproducing `f`.
pub fn map_text(m: &ModuleDescriptor, name: &str, f: &PiecewiseBijection) -> String {
    let pieces: Vec<String> = f
        .pieces()
        .iter()
        .map(|p| {
            let a = p.map();
            let mut s = format!("piece(domain={}", block_text(m, p.domain()));
            let identity = (0..m.k()).all(|i| a.matrix(i).is_identity(m.field(i)));
            if !identity {
                let mats = (0..m.k()).map(|i| rows_text(m.field(i), &a.matrix(i).to_rows())).collect();
                s.push_str(&format!(", A={}", per_comp(mats)));
            }
            let c = a.offset(m);
            if !c.is_zero() {
                s.push_str(&format!(", d2={}", vector_text(m, &c)));
            }
            s.push(')');
            s
        })
        .collect();
    if pieces.is_empty() {
        return format!("map {name} : {} -> {} = identity", set_text(m, f.source()), set_text(m, f.target()));
    }
    format!("map {name} : {} -> {} = {}", set_text(m, f.source()), set_text(m, f.target()), pieces.join(";\n    "))
}

/// `ring` and `module` statements declaring `m`.
pub fn module_text(m: &ModuleDescriptor, ring: &str, module: &str) -> String {
    let ranks: Vec<String> = m
        .ranks()
        .iter()
        .map(|r| match r {
            Rank::Omega => "omega".to_string(),
            Rank::Finite(n) => n.to_string(),
        })
        .collect();
    let all_same = ranks.windows(2).all(|w| w[0] == w[1]);
    let ranks = if all_same { ranks[..1].to_vec() } else { ranks };
    format!("ring {ring} = {}\nmodule {module} over {ring} = rank({})", m.ring().name(), ranks.join(", "))
}

fn int_json(c: &num_bigint::BigInt) -> Value {
    match c.to_i64() {
        Some(v) => json!(v),
        None => json!(c.to_string()),
    }
}

pub fn k0_json(k: &K0Class) -> Value {
    let terms: Vec<Value> = k.terms().iter().rev().map(|(d, c)| json!({"exponent": d, "coeff": int_json(c)})).collect();
    Value::Array(terms)
}

pub fn colour_json(c: &Colour) -> Value {
    match c.dims() {
        Some(d) => json!(d),
        None => Value::Null,
    }
}

pub fn group_json(g: &GroupDescriptor) -> Value {
    use GroupDescriptor::*;
    match g {
        Cyclic(m) => json!({"cyclic": m}),
        Integers => json!("integers"),
        UnitGroupAb(r) => json!({"unit_group_ab": r.name()}),
        CountableSum(g) => json!({"countable_sum": group_json(g)}),
        DirectSum(gs) => json!({"direct_sum": gs.iter().map(group_json).collect::<Vec<_>>()}),
        FiniteProduct(gs) => json!({"finite_product": gs.iter().map(group_json).collect::<Vec<_>>()}),
    }
}
