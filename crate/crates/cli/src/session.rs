//! Evaluation of parsed sessions into engine values, and the queries.

use std::collections::BTreeMap;
use std::fmt;

use defk::defmaps::{compose, dim_of_map, invert, Piece, PiecewiseBijection};
use defk::defsets::{normalize, Block, DefinableSet};
use defk::group::GroupDescriptor;
use defk::k1::{expected_k1_group, k1_invariant, K1Class};
use defk::defsets::K0Class;
use defk::modules::{ModuleDescriptor, Rank, Sparse, Vector};
use defk::ppsets::{AffineMap, Colour, Coset, Subspace};
use defk::rings::{Component, DivisionRing, Mat, RingDescriptor, Row};
use defk::Error;

use crate::syntax::{
    parse_session, Expr, ExprKind, Field, MapBody, ObjKind, PerComp, PieceSpec, Pos, QueryKind, RankSpec, Rows, Session, Stmt, StmtKind,
    Subgroup, SyntaxError,
};

/// What went wrong while loading or querying a session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    Syntax(String),
    UnknownName(String),
    /// A name bound to something of the wrong kind, or bound twice.
    Binding(String),
    Engine(Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub problem: Problem,
}

impl Diagnostic {
    fn at(pos: Pos, problem: Problem) -> Self {
        Diagnostic { pos, problem }
    }

    pub fn code(&self) -> &'static str {
        match &self.problem {
            Problem::Syntax(_) => "Syntax",
            Problem::UnknownName(_) => "UnknownName",
            Problem::Binding(_) => "Binding",
            Problem::Engine(e) => e.code(),
        }
    }

    /// Malformed input (exit code 2) as opposed to a domain error (1).
    pub fn is_usage(&self) -> bool {
        !matches!(&self.problem, Problem::Engine(e) if !matches!(e, Error::Shape(_)))
    }

    pub fn message(&self) -> String {
        match &self.problem {
            Problem::Syntax(s) | Problem::Binding(s) => s.clone(),
            Problem::UnknownName(n) => format!("unknown name '{n}'"),
            Problem::Engine(e) => e.to_string(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pos.line > 0 {
            write!(f, "{}: ", self.pos)?;
        }
        write!(f, "error[{}]: {}", self.code(), self.message())
    }
}

impl From<SyntaxError> for Diagnostic {
    fn from(e: SyntaxError) -> Self {
        Diagnostic::at(e.pos, Problem::Syntax(e.message))
    }
}

type Res<T> = Result<T, Diagnostic>;

fn engine<T>(pos: Pos, r: defk::Result<T>) -> Res<T> {
    r.map_err(|e| Diagnostic::at(pos, Problem::Engine(e)))
}

#[derive(Clone, Debug)]
pub enum Value {
    Ring(RingDescriptor),
    Module(ModuleDescriptor),
    Ppset(Coset),
    Block(Block),
    Set(DefinableSet),
    Map(PiecewiseBijection),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Ring(_) => "ring",
            Value::Module(_) => "module",
            Value::Ppset(_) => "ppset",
            Value::Block(_) => "block",
            Value::Set(_) => "set",
            Value::Map(_) => "map",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub value: Value,
    /// The module an object lives over; `None` for rings and modules.
    pub module: Option<String>,
    pub pos: Pos,
}

/// Result of one query.
#[derive(Clone, Debug)]
pub enum Answer {
    K1(K1Class),
    K0(K0Class),
    Dim(Colour),
    Check(Vec<String>),
    Expected(GroupDescriptor),
}

/// An evaluated session.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub syntax: Session,
    pub bindings: BTreeMap<String, Binding>,
    current: Option<String>,
}

pub fn field(f: &Field) -> defk::Result<DivisionRing> {
    match f {
        Field::Gf(p, e) => DivisionRing::finite_field(*p, *e),
        Field::Rationals => Ok(DivisionRing::Rationals),
        Field::Quaternions => Ok(DivisionRing::Quaternions),
    }
}

pub fn ring(comps: &[(usize, Field)]) -> defk::Result<RingDescriptor> {
    let comps = comps.iter().map(|(q, f)| Ok(Component { q: *q, ring: field(f)? })).collect::<defk::Result<Vec<_>>>()?;
    RingDescriptor::new(comps)
}

pub fn module(s: RingDescriptor, ranks: &[RankSpec]) -> defk::Result<ModuleDescriptor> {
    let conv = |r: &RankSpec| match r {
        RankSpec::Omega => Rank::Omega,
        RankSpec::Finite(n) => Rank::Finite(*n),
    };
    let ranks: Vec<Rank> = match ranks {
        [one] => vec![conv(one); s.k()],
        many => many.iter().map(conv).collect(),
    };
    ModuleDescriptor::new(s, ranks)
}

impl Env {
    pub fn load(text: &str) -> Res<Env> {
        let syntax = parse_session(text)?;
        Env::evaluate(syntax)
    }

    /// Evaluates every binding; queries are kept for [`Env::answers`].
    pub fn evaluate(syntax: Session) -> Res<Env> {
        let mut env = Env { syntax: Session::default(), bindings: BTreeMap::new(), current: None };
        for s in &syntax.stmts {
            env.bind(s)?;
        }
        env.syntax = syntax;
        Ok(env)
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    /// The module an object lives over, or the latest module.
    pub fn module_of(&self, name: Option<&str>) -> Option<(&str, &ModuleDescriptor)> {
        let key = match name.and_then(|n| self.bindings.get(n)) {
            Some(Binding { value: Value::Module(_), .. }) => name?.to_string(),
            Some(Binding { module: Some(m), .. }) => m.clone(),
            _ => self.current.clone()?,
        };
        match self.bindings.get_key_value(&key) {
            Some((k, Binding { value: Value::Module(m), .. })) => Some((k.as_str(), m)),
            _ => None,
        }
    }

    fn define(&mut self, pos: Pos, name: &str, value: Value) -> Res<()> {
        if let Some(b) = self.bindings.get(name) {
            return Err(Diagnostic::at(pos, Problem::Binding(format!("'{name}' is already bound at {}", b.pos))));
        }
        let module = match value {
            Value::Ring(_) | Value::Module(_) => None,
            _ => self.current.clone(),
        };
        self.bindings.insert(name.to_string(), Binding { value, module, pos });
        Ok(())
    }

    fn current_module(&self, pos: Pos) -> Res<ModuleDescriptor> {
        match self.current.as_ref().and_then(|c| self.bindings.get(c)) {
            Some(Binding { value: Value::Module(m), .. }) => Ok(m.clone()),
            _ => Err(Diagnostic::at(pos, Problem::Binding("declare a module first".into()))),
        }
    }

    fn bind(&mut self, s: &Stmt) -> Res<()> {
        match &s.kind {
            StmtKind::Ring { name, comps } => {
                let r = engine(s.pos, ring(comps))?;
                self.define(s.pos, name, Value::Ring(r))
            }
            StmtKind::Module { name, ring, ranks } => {
                let r = match self.bindings.get(&ring.text) {
                    Some(Binding { value: Value::Ring(r), .. }) => r.clone(),
                    Some(b) => return Err(Diagnostic::at(ring.pos, Problem::Binding(format!("'{}' is a {}, not a ring", ring.text, b.value.kind())))),
                    None => return Err(Diagnostic::at(ring.pos, Problem::UnknownName(ring.text.clone()))),
                };
                let m = engine(s.pos, module(r, ranks))?;
                self.define(s.pos, name, Value::Module(m))?;
                self.current = Some(name.clone());
                Ok(())
            }
            StmtKind::Object { kind, name, expr } => {
                let m = self.current_module(s.pos)?;
                let v = match kind {
                    ObjKind::Ppset => Value::Ppset(self.coset(&m, expr)?),
                    ObjKind::Block => Value::Block(self.block(&m, expr)?),
                    ObjKind::Set => Value::Set(self.set(&m, expr)?),
                };
                self.define(s.pos, name, v)
            }
            StmtKind::Map { name, boundary, body } => {
                let m = self.current_module(s.pos)?;
                let f = self.map(&m, s.pos, boundary.as_ref(), body)?;
                self.define(s.pos, name, Value::Map(f))
            }
            StmtKind::Query { .. } => Ok(()),
        }
    }

    fn lookup(&self, m: &ModuleDescriptor, name: &str, pos: Pos) -> Res<&Value> {
        let b = self.bindings.get(name).ok_or_else(|| Diagnostic::at(pos, Problem::UnknownName(name.to_string())))?;
        if let Some((_, bm)) = self.module_of(Some(name)) {
            if b.module.is_some() && bm != m {
                return Err(Diagnostic::at(pos, Problem::Binding(format!("'{name}' lives over another module"))));
            }
        }
        Ok(&b.value)
    }

    fn wrong_kind<T>(pos: Pos, what: &str, v: &Value) -> Res<T> {
        Err(Diagnostic::at(pos, Problem::Binding(format!("expected {what}, found a {}", v.kind()))))
    }

    pub fn coset(&self, m: &ModuleDescriptor, e: &Expr) -> Res<Coset> {
        match &e.kind {
            ExprKind::Name(n) => match self.lookup(m, n, e.pos)? {
                Value::Ppset(c) => Ok(c.clone()),
                v => Env::wrong_kind(e.pos, "a ppset", v),
            },
            ExprKind::Coset { n, sub, rep } => {
                let subs = (0..m.k())
                    .map(|i| {
                        let r = m.field(i);
                        let w = m.width(i, *n);
                        match sub {
                            Subgroup::Full => Ok(Subspace::full(r, w)),
                            Subgroup::Ann(h) => engine(e.pos, Subspace::annihilated_by(r, w, &rows_for(m, e.pos, h, i)?)),
                            Subgroup::Span(g) => engine(e.pos, Subspace::span(r, w, &rows_for(m, e.pos, g, i)?)),
                        }
                    })
                    .collect::<Res<Vec<_>>>()?;
                let rep = match rep {
                    Some(v) => vector(m, e.pos, *n, v)?,
                    None => Vector::zero(m, *n),
                };
                engine(e.pos, Coset::new(m, subs, rep))
            }
            ExprKind::Full(n) => Ok(Coset::full(m, *n)),
            _ => Err(Diagnostic::at(e.pos, Problem::Binding(format!("expected a ppset, found '{e}'")))),
        }
    }

    pub fn block(&self, m: &ModuleDescriptor, e: &Expr) -> Res<Block> {
        match &e.kind {
            ExprKind::Name(n) => match self.lookup(m, n, e.pos)? {
                Value::Ppset(c) => Ok(Block::from_coset(c.clone())),
                Value::Block(b) => Ok(b.clone()),
                v => Env::wrong_kind(e.pos, "a block", v),
            },
            ExprKind::Block { ambient, holes } => {
                let amb = self.coset(m, ambient)?;
                let hs = holes.iter().map(|h| self.coset(m, h)).collect::<Res<Vec<_>>>()?;
                if let Some(h) = hs.iter().find(|h| h.power() != amb.power()) {
                    return Err(Diagnostic::at(e.pos, Problem::Engine(Error::Shape(format!("a hole lives in M^{}, the ambient in M^{}", h.power(), amb.power())))));
                }
                Block::new(m, amb, hs).ok_or_else(|| Diagnostic::at(e.pos, Problem::Engine(Error::EmptySet)))
            }
            _ => Ok(Block::from_coset(self.coset(m, e)?)),
        }
    }

    pub fn set(&self, m: &ModuleDescriptor, e: &Expr) -> Res<DefinableSet> {
        match &e.kind {
            ExprKind::Name(n) => match self.lookup(m, n, e.pos)? {
                Value::Ppset(c) => Ok(DefinableSet::from_coset(c.clone())),
                Value::Block(b) => Ok(DefinableSet::from_block(b.clone())),
                Value::Set(s) => Ok(s.clone()),
                v => Env::wrong_kind(e.pos, "a set", v),
            },
            ExprKind::Full(n) => Ok(DefinableSet::full(m, *n)),
            ExprKind::Empty(n) => Ok(DefinableSet::empty(*n)),
            ExprKind::Union(parts) => {
                let sets = parts.iter().map(|p| self.set(m, p)).collect::<Res<Vec<_>>>()?;
                let Some(first) = sets.first() else {
                    return Err(Diagnostic::at(e.pos, Problem::Syntax("union() needs at least one part; use empty(n)".into())));
                };
                let n = first.power();
                if sets.iter().any(|s| s.power() != n) {
                    return Err(Diagnostic::at(e.pos, Problem::Engine(Error::Shape("union of sets in different powers".into()))));
                }
                let blocks: Vec<Block> = sets.iter().flat_map(|s| s.blocks().iter().cloned()).collect();
                engine(e.pos, normalize(m, n, &blocks))
            }
            _ => Ok(DefinableSet::from_block(self.block(m, e)?)),
        }
    }

    pub fn map_value(&self, m: &ModuleDescriptor, e: &Expr) -> Res<PiecewiseBijection> {
        match &e.kind {
            ExprKind::Name(n) => match self.lookup(m, n, e.pos)? {
                Value::Map(f) => Ok(f.clone()),
                v => Env::wrong_kind(e.pos, "a map", v),
            },
            _ => Err(Diagnostic::at(e.pos, Problem::Binding(format!("expected the name of a map, found '{e}'")))),
        }
    }

    fn map(&self, m: &ModuleDescriptor, pos: Pos, boundary: Option<&(Expr, Expr)>, body: &MapBody) -> Res<PiecewiseBijection> {
        let declared = match boundary {
            Some((s, t)) => Some((self.set(m, s)?, self.set(m, t)?)),
            None => None,
        };
        let f = match body {
            MapBody::Identity => {
                let Some((s, t)) = &declared else {
                    return Err(Diagnostic::at(pos, Problem::Binding("identity needs a declared set, as in 'map f : E -> E = identity'".into())));
                };
                if !s.same_set(m, t) {
                    return Err(Diagnostic::at(pos, Problem::Engine(Error::Mismatch("identity needs equal source and target".into()))));
                }
                return Ok(PiecewiseBijection::identity(s, m));
            }
            MapBody::Compose(a, b) => engine(pos, compose(m, &self.map_value(m, a)?, &self.map_value(m, b)?))?,
            MapBody::Invert(a) => invert(m, &self.map_value(m, a)?),
            MapBody::Pieces(ps) => {
                let mut pieces = Vec::new();
                let mut power = None;
                for p in ps {
                    let dom = self.set(m, &p.domain)?;
                    let n = dom.power();
                    if *power.get_or_insert(n) != n {
                        return Err(Diagnostic::at(p.pos, Problem::Engine(Error::Shape("pieces live in different powers".into()))));
                    }
                    let aff = affine(m, p, n)?;
                    for b in dom.blocks() {
                        pieces.push(engine(p.pos, Piece::new(m, b.clone(), aff.clone()))?);
                    }
                }
                match &declared {
                    Some((s, t)) => return engine(pos, PiecewiseBijection::with_boundary(s.clone(), t.clone(), pieces)),
                    None => PiecewiseBijection::from_pieces(power.unwrap_or(0), pieces),
                }
            }
        };
        match declared {
            Some((s, t)) if !(f.source().same_set(m, &s) && f.target().same_set(m, &t)) => Err(Diagnostic::at(
                pos,
                Problem::Engine(Error::Mismatch("the declared source or target differs from the map's".into())),
            )),
            _ => Ok(f),
        }
    }

    pub fn query(&self, kind: QueryKind, target: Option<&Expr>, pos: Pos) -> Res<Answer> {
        let need = || target.ok_or_else(|| Diagnostic::at(pos, Problem::Syntax(format!("'{}' needs an argument", kind.keyword()))));
        let module_for = |e: &Expr| -> Res<ModuleDescriptor> {
            let name = match &e.kind {
                ExprKind::Name(n) => Some(n.as_str()),
                _ => None,
            };
            match self.module_of(name) {
                Some((_, m)) => Ok(m.clone()),
                None => Err(Diagnostic::at(e.pos, Problem::Binding("declare a module first".into()))),
            }
        };
        match kind {
            QueryKind::K1 => {
                let e = need()?;
                let m = module_for(e)?;
                engine(e.pos, k1_invariant(&m, &self.map_value(&m, e)?)).map(Answer::K1)
            }
            QueryKind::Check => {
                let e = need()?;
                let m = module_for(e)?;
                Ok(Answer::Check(self.map_value(&m, e)?.validate(&m)))
            }
            QueryKind::K0 => {
                let e = need()?;
                let m = module_for(e)?;
                engine(e.pos, self.set(&m, e)?.k0(&m)).map(Answer::K0)
            }
            QueryKind::Dim => {
                let e = need()?;
                let m = module_for(e)?;
                if let ExprKind::Name(n) = &e.kind {
                    if let Some(Binding { value: Value::Map(f), .. }) = self.bindings.get(n) {
                        return engine(e.pos, dim_of_map(&m, f)).map(Answer::Dim);
                    }
                }
                Ok(Answer::Dim(self.set(&m, e)?.dim()))
            }
            QueryKind::ExpectedK1 => {
                let name = match target.map(|t| &t.kind) {
                    Some(ExprKind::Name(n)) => Some(n.as_str()),
                    Some(_) => return Err(Diagnostic::at(pos, Problem::Binding("expected-k1 takes a module name".into()))),
                    None => None,
                };
                if let Some(n) = name {
                    if !matches!(self.bindings.get(n), Some(Binding { value: Value::Module(_), .. })) {
                        return Err(Diagnostic::at(target.unwrap().pos, Problem::UnknownName(n.to_string())));
                    }
                }
                let (_, m) = self.module_of(name).ok_or_else(|| Diagnostic::at(pos, Problem::Binding("declare a module first".into())))?;
                engine(pos, expected_k1_group(m)).map(|g| Answer::Expected(g.normalized()))
            }
        }
    }

    /// Answers to the queries written in the session, in order.
    pub fn answers(&self) -> Vec<(String, Res<Answer>)> {
        self.syntax
            .stmts
            .iter()
            .filter_map(|s| match &s.kind {
                StmtKind::Query { kind, target } => Some((s.to_string(), self.query(*kind, target.as_ref(), s.pos))),
                _ => None,
            })
            .collect()
    }
}

fn rows_for(m: &ModuleDescriptor, pos: Pos, p: &PerComp<Rows>, i: usize) -> Res<Vec<Row>> {
    if p.len() != m.k() {
        return Err(Diagnostic::at(pos, Problem::Engine(Error::Shape(format!("expected {} components, got {}", m.k(), p.len())))));
    }
    let r = m.field(i);
    p[i].iter()
        .map(|row| row.iter().map(|l| engine(pos, r.parse(&l.0))).collect::<Res<Row>>())
        .collect()
}

fn vector(m: &ModuleDescriptor, pos: Pos, n: usize, p: &PerComp<Rows>) -> Res<Vector> {
    let parts = (0..m.k())
        .map(|i| {
            let rows = rows_for(m, pos, p, i)?;
            engine(pos, Sparse::from_rows(m.field(i), m.width(i, n), rows.into_iter().enumerate()))
        })
        .collect::<Res<Vec<_>>>()?;
    engine(pos, Vector::from_parts(m, n, parts))
}

fn affine(m: &ModuleDescriptor, p: &PieceSpec, n: usize) -> Res<AffineMap> {
    let d1 = p.d1.as_ref().map(|v| vector(m, p.pos, n, v)).transpose()?.unwrap_or_else(|| Vector::zero(m, n));
    let d2 = p.d2.as_ref().map(|v| vector(m, p.pos, n, v)).transpose()?.unwrap_or_else(|| Vector::zero(m, n));
    let mats = (0..m.k())
        .map(|i| {
            let w = m.width(i, n);
            match &p.a {
                None => Ok(Mat::identity(m.field(i), w)),
                Some(a) => engine(p.pos, Mat::from_rows(rows_for(m, p.pos, a, i)?, w)),
            }
        })
        .collect::<Res<Vec<_>>>()?;
    engine(p.pos, AffineMap::from_data(m, &d1, mats, &d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "ring S = M(1, GF(5))\nmodule M over S = rank(omega)\nmap f : full(1) -> full(1) = piece(domain=full(1), A=[[2]])\nk1 f\n";

    #[test]
    fn sample_session() {
        let env = Env::load(SAMPLE).unwrap();
        assert_eq!((env.syntax.bindings(), env.syntax.queries()), (3, 1));
        let answers = env.answers();
        let Ok(Answer::K1(c)) = &answers[0].1 else { panic!("{:?}", answers[0].1) };
        assert_eq!(c.to_string(), "sign0 0, level 1: det [2] sign 0");
    }

    #[test]
    fn unknown_names_are_located() {
        let e = Env::load("ring S = M(1, QQ)\nmodule M over S = rank(omega)\nset E = union(full(1), F)\n").unwrap_err();
        assert_eq!(e.problem, Problem::UnknownName("F".into()));
        assert_eq!((e.pos.line, e.pos.col), (3, 24));
        let e = Env::load("ring S = M(1, QQ)\nmodule M over T = rank(omega)\n").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 15));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let e = Env::load("ring S = M(1, QQ)\nmodule M over S = rank(omega)\nppset P = coset(n=2, span=[[1]])\n").unwrap_err();
        assert_eq!(e.code(), "Shape");
        assert!(e.is_usage());
        let e = Env::load("ring S = M(1, QQ)\nmodule M over S = rank(omega)\nmap f = piece(domain=full(1), A=[[0]])\n").unwrap_err();
        assert_eq!(e.code(), "Singular");
        assert!(!e.is_usage());
    }

    #[test]
    fn rebinding_is_rejected() {
        let e = Env::load("ring S = M(1, QQ)\nring S = M(1, HQ)\n").unwrap_err();
        assert_eq!(e.code(), "Binding");
    }
}
