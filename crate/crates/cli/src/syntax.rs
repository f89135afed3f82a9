//! The `.dk` session language: lexer, syntax tree, parser and printer.
//!
//! ```text
//! # comment
//! ring S = M(1, GF(5)) x M(1, QQ)
//! module M over S = rank(omega)
//! ppset L = coset(n=2, ann={[[2], [1]]; [[1], [0]]}, rep={[[1, 0]]; []})
//! set E = union(block(full(2), holes=[L]))
//! map f : E -> E = piece(domain=E, A={[[2, 0], [0, 1]]; [[1, 0], [0, 1]]})
//! k1 f
//! ```
//!
//! A statement ends at the end of its line unless a bracket is still open
//! or the line ends with `;`.

use std::fmt;

/// Line and column, both starting at 1. Positions never take part in
/// comparisons, so reparsing printed text gives an equal tree.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Punct(&'static str),
    Newline,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(s) => write!(f, "'{s}'"),
            Tok::Punct(p) => write!(f, "'{p}'"),
            Tok::Newline => write!(f, "end of line"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const PUNCT: [&str; 16] = ["->", "(", ")", "[", "]", "{", "}", ",", ";", ":", "=", "/", "-", "<", ">", "^"];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out: Vec<(Tok, Pos)> = Vec::new();
    let mut depth = 0i64;
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: ln + 1, col: i + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() {
                    let d = chars[i];
                    let hyphen = d == '-' && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphabetic());
                    if d.is_ascii_alphanumeric() || d == '_' || hyphen {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(chars[start..i].iter().collect()), pos));
                continue;
            }
            if c == '\u{2212}' {
                out.push((Tok::Punct("-"), pos));
                i += 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) else {
                return Err(SyntaxError { pos, message: format!("unexpected character '{c}'") });
            };
            match *p {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
            out.push((Tok::Punct(p), pos));
            i += p.len();
        }
        let continues = matches!(out.last(), Some((Tok::Punct(";"), _)));
        if depth <= 0 && !continues && !matches!(out.last(), None | Some((Tok::Newline, _))) {
            out.push((Tok::Newline, Pos { line: ln + 1, col: chars.len() + 1 }));
        }
    }
    let end = Pos { line: text.lines().count().max(1), col: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    if depth > 0 {
        return Err(SyntaxError { pos: end, message: "unclosed bracket".into() });
    }
    if !matches!(out.last(), None | Some((Tok::Newline, _))) {
        out.push((Tok::Newline, end));
    }
    out.push((Tok::End, end));
    Ok(out)
}

/// A scalar literal, kept as canonical text and read by the ring plugin
/// when the session is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lit(pub String);

/// Rows of scalars: a matrix, or a vector listed by basis index.
pub type Rows = Vec<Vec<Lit>>;

/// One entry per ring component; written `{a; b}` when there are several.
pub type PerComp<T> = Vec<T>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Gf(u64, u32),
    Rationals,
    Quaternions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSpec {
    Omega,
    Finite(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    Full,
    /// `{x : x·H = 0}`, `H` given by its rows.
    Ann(PerComp<Rows>),
    /// Span of the given rows.
    Span(PerComp<Rows>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Name(String),
    Coset { n: usize, sub: Subgroup, rep: Option<PerComp<Rows>> },
    Block { ambient: Box<Expr>, holes: Vec<Expr> },
    Union(Vec<Expr>),
    Full(usize),
    Empty(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub pos: Pos,
    pub kind: ExprKind,
}

/// `x ↦ (x − d1)·A + d2` on `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceSpec {
    pub pos: Pos,
    pub domain: Expr,
    pub d1: Option<PerComp<Rows>>,
    pub a: Option<PerComp<Rows>>,
    pub d2: Option<PerComp<Rows>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapBody {
    Identity,
    /// `compose(f, g)` is `f ∘ g`.
    Compose(Expr, Expr),
    Invert(Expr),
    Pieces(Vec<PieceSpec>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryKind {
    K1,
    K0,
    Dim,
    Check,
    ExpectedK1,
}

impl QueryKind {
    pub fn keyword(self) -> &'static str {
        match self {
            QueryKind::K1 => "k1",
            QueryKind::K0 => "k0",
            QueryKind::Dim => "dim",
            QueryKind::Check => "check",
            QueryKind::ExpectedK1 => "expected-k1",
        }
    }

    fn from_keyword(s: &str) -> Option<QueryKind> {
        [QueryKind::K1, QueryKind::K0, QueryKind::Dim, QueryKind::Check, QueryKind::ExpectedK1]
            .into_iter()
            .find(|q| q.keyword() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjKind {
    Ppset,
    Block,
    Set,
}

impl ObjKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ObjKind::Ppset => "ppset",
            ObjKind::Block => "block",
            ObjKind::Set => "set",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Ring { name: String, comps: Vec<(usize, Field)> },
    Module { name: String, ring: Name, ranks: Vec<RankSpec> },
    Object { kind: ObjKind, name: String, expr: Expr },
    Map { name: String, boundary: Option<(Expr, Expr)>, body: MapBody },
    Query { kind: QueryKind, target: Option<Expr> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub pos: Pos,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Session {
    pub stmts: Vec<Stmt>,
}

impl Session {
    pub fn bindings(&self) -> usize {
        self.stmts.iter().filter(|s| !matches!(s.kind, StmtKind::Query { .. })).count()
    }

    pub fn queries(&self) -> usize {
        self.stmts.len() - self.bindings()
    }
}

pub fn parse_session(text: &str) -> Result<Session, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut stmts = Vec::new();
    while p.peek() != &Tok::End {
        stmts.push(p.stmt()?);
        p.expect_newline()?;
    }
    Ok(Session { stmts })
}

/// A ring written as in a `ring` statement, e.g. `M(2, GF(3)) x M(1, QQ)`.
pub fn parse_ring(text: &str) -> Result<Vec<(usize, Field)>, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let r = p.ring_comps()?;
    p.expect_newline()?;
    p.expect_end()?;
    Ok(r)
}

/// Ranks as in a `module` statement without the `rank(...)` wrapper,
/// e.g. `omega` or `omega, 3`.
pub fn parse_ranks(text: &str) -> Result<Vec<RankSpec>, SyntaxError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let mut ranks = vec![p.rank()?];
    while p.eat(",") {
        ranks.push(p.rank()?);
    }
    p.expect_newline()?;
    p.expect_end()?;
    Ok(ranks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, what: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.pos(), message: format!("expected {what}, found {}", self.peek()) })
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(&format!("'{p}'"))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn word(&mut self, w: &str) -> Result<(), SyntaxError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.err(&format!("'{w}'"))
        }
    }

    fn ident(&mut self) -> Result<Name, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.bump().1;
                Ok(Name { text: s, pos })
            }
            _ => self.err("a name"),
        }
    }

    fn int(&mut self) -> Result<u64, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let pos = self.pos();
                self.bump();
                s.parse().map_err(|_| SyntaxError { pos, message: format!("number {s} is too large") })
            }
            _ => self.err("a number"),
        }
    }

    fn usize(&mut self) -> Result<usize, SyntaxError> {
        Ok(self.int()? as usize)
    }

    fn expect_newline(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            _ => self.err("end of line"),
        }
    }

    fn expect_end(&mut self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.err("end of input"),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let Tok::Ident(head) = self.peek().clone() else {
            return self.err("a statement");
        };
        let declares = matches!(self.peek_at(1), Tok::Ident(_)) && matches!(self.peek_at(2), Tok::Punct("=") | Tok::Punct(":"));
        let kind = match head.as_str() {
            "ring" if declares => {
                self.bump();
                let name = self.ident()?.text;
                self.expect("=")?;
                StmtKind::Ring { name, comps: self.ring_comps()? }
            }
            "module" => {
                self.bump();
                let name = self.ident()?.text;
                self.word("over")?;
                let ring = self.ident()?;
                self.expect("=")?;
                self.word("rank")?;
                self.expect("(")?;
                let mut ranks = vec![self.rank()?];
                while self.eat(",") {
                    ranks.push(self.rank()?);
                }
                self.expect(")")?;
                StmtKind::Module { name, ring, ranks }
            }
            "ppset" | "block" | "set" if declares => {
                self.bump();
                let kind = match head.as_str() {
                    "ppset" => ObjKind::Ppset,
                    "block" => ObjKind::Block,
                    _ => ObjKind::Set,
                };
                let name = self.ident()?.text;
                self.expect("=")?;
                StmtKind::Object { kind, name, expr: self.expr()? }
            }
            "map" if declares => {
                self.bump();
                let name = self.ident()?.text;
                let boundary = if self.eat(":") {
                    let src = self.expr()?;
                    self.expect("->")?;
                    Some((src, self.expr()?))
                } else {
                    None
                };
                self.expect("=")?;
                StmtKind::Map { name, boundary, body: self.map_body()? }
            }
            _ => match QueryKind::from_keyword(&head) {
                Some(kind) => {
                    self.bump();
                    let target = if matches!(self.peek(), Tok::Newline) { None } else { Some(self.expr()?) };
                    StmtKind::Query { kind, target }
                }
                None => return self.err("a statement (ring, module, ppset, block, set, map, or a query)"),
            },
        };
        Ok(Stmt { pos, kind })
    }

    fn ring_comps(&mut self) -> Result<Vec<(usize, Field)>, SyntaxError> {
        let mut comps = vec![self.ring_comp()?];
        while self.is_word("x") {
            self.bump();
            comps.push(self.ring_comp()?);
        }
        Ok(comps)
    }

    fn ring_comp(&mut self) -> Result<(usize, Field), SyntaxError> {
        self.word("M")?;
        self.expect("(")?;
        let q = self.usize()?;
        self.expect(",")?;
        let f = self.field()?;
        self.expect(")")?;
        Ok((q, f))
    }

    fn field(&mut self) -> Result<Field, SyntaxError> {
        let pos = self.pos();
        if self.is_word("QQ") {
            self.bump();
            return Ok(Field::Rationals);
        }
        if self.is_word("HQ") {
            self.bump();
            return Ok(Field::Quaternions);
        }
        self.word("GF")?;
        self.expect("(")?;
        let n = self.int()?;
        let (p, e) = if self.eat("^") {
            (n, self.int()? as u32)
        } else {
            prime_power(n).ok_or_else(|| SyntaxError { pos, message: format!("{n} is not a prime power") })?
        };
        self.expect(")")?;
        Ok(Field::Gf(p, e))
    }

    fn rank(&mut self) -> Result<RankSpec, SyntaxError> {
        if self.is_word("omega") {
            self.bump();
            Ok(RankSpec::Omega)
        } else {
            Ok(RankSpec::Finite(self.usize()?))
        }
    }

    fn map_body(&mut self) -> Result<MapBody, SyntaxError> {
        if self.is_word("identity") {
            self.bump();
            return Ok(MapBody::Identity);
        }
        if self.is_word("compose") {
            self.bump();
            self.expect("(")?;
            let f = self.expr()?;
            self.expect(",")?;
            let g = self.expr()?;
            self.expect(")")?;
            return Ok(MapBody::Compose(f, g));
        }
        if self.is_word("invert") {
            self.bump();
            self.expect("(")?;
            let f = self.expr()?;
            self.expect(")")?;
            return Ok(MapBody::Invert(f));
        }
        let mut pieces = vec![self.piece()?];
        while self.eat(";") {
            pieces.push(self.piece()?);
        }
        Ok(MapBody::Pieces(pieces))
    }

    fn piece(&mut self) -> Result<PieceSpec, SyntaxError> {
        let pos = self.pos();
        self.word("piece")?;
        self.expect("(")?;
        self.word("domain")?;
        self.expect("=")?;
        let domain = self.expr()?;
        let (mut d1, mut a, mut d2) = (None, None, None);
        while self.eat(",") {
            let key = self.ident()?;
            self.expect("=")?;
            let slot = match key.text.as_str() {
                "d1" => &mut d1,
                "A" => &mut a,
                "d2" => &mut d2,
                other => return Err(SyntaxError { pos: key.pos, message: format!("unknown piece field '{other}'") }),
            };
            if slot.is_some() {
                return Err(SyntaxError { pos: key.pos, message: format!("field '{}' given twice", key.text) });
            }
            *slot = Some(self.per_comp_rows()?);
        }
        self.expect(")")?;
        Ok(PieceSpec { pos, domain, d1, a, d2 })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        let name = self.ident()?;
        if !matches!(self.peek(), Tok::Punct("(")) {
            return Ok(Expr { pos, kind: ExprKind::Name(name.text) });
        }
        self.bump();
        let kind = match name.text.as_str() {
            "coset" => {
                self.word("n")?;
                self.expect("=")?;
                let n = self.usize()?;
                let (mut sub, mut rep) = (Subgroup::Full, None);
                while self.eat(",") {
                    let key = self.ident()?;
                    self.expect("=")?;
                    match key.text.as_str() {
                        "ann" | "span" if sub == Subgroup::Full => {
                            let rows = self.per_comp_rows()?;
                            sub = if key.text == "ann" { Subgroup::Ann(rows) } else { Subgroup::Span(rows) };
                        }
                        "rep" if rep.is_none() => rep = Some(self.per_comp_rows()?),
                        other => return Err(SyntaxError { pos: key.pos, message: format!("unexpected coset field '{other}'") }),
                    }
                }
                ExprKind::Coset { n, sub, rep }
            }
            "block" => {
                let ambient = Box::new(self.expr()?);
                let mut holes = Vec::new();
                if self.eat(",") {
                    self.word("holes")?;
                    self.expect("=")?;
                    self.expect("[")?;
                    if !self.eat("]") {
                        holes.push(self.expr()?);
                        while self.eat(",") {
                            holes.push(self.expr()?);
                        }
                        self.expect("]")?;
                    }
                }
                ExprKind::Block { ambient, holes }
            }
            "union" => {
                let mut parts = Vec::new();
                if !matches!(self.peek(), Tok::Punct(")")) {
                    parts.push(self.expr()?);
                    while self.eat(",") {
                        parts.push(self.expr()?);
                    }
                }
                ExprKind::Union(parts)
            }
            "full" => ExprKind::Full(self.usize()?),
            "empty" => ExprKind::Empty(self.usize()?),
            other => return Err(SyntaxError { pos, message: format!("unknown constructor '{other}'") }),
        };
        self.expect(")")?;
        Ok(Expr { pos, kind })
    }

    fn per_comp_rows(&mut self) -> Result<PerComp<Rows>, SyntaxError> {
        if self.eat("{") {
            let mut out = vec![self.rows()?];
            while self.eat(";") {
                out.push(self.rows()?);
            }
            self.expect("}")?;
            Ok(out)
        } else {
            Ok(vec![self.rows()?])
        }
    }

    fn rows(&mut self) -> Result<Rows, SyntaxError> {
        self.expect("[")?;
        let mut rows = Vec::new();
        if !self.eat("]") {
            rows.push(self.row()?);
            while self.eat(",") {
                rows.push(self.row()?);
            }
            self.expect("]")?;
        }
        Ok(rows)
    }

    fn row(&mut self) -> Result<Vec<Lit>, SyntaxError> {
        self.expect("[")?;
        let mut row = Vec::new();
        if !self.eat("]") {
            row.push(self.scalar()?);
            while self.eat(",") {
                row.push(self.scalar()?);
            }
            self.expect("]")?;
        }
        Ok(row)
    }

    fn rational(&mut self) -> Result<String, SyntaxError> {
        let neg = self.eat("-");
        let n = match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                s
            }
            _ => return self.err("a number"),
        };
        let mut s = if neg { format!("-{n}") } else { n };
        if self.eat("/") {
            match self.peek().clone() {
                Tok::Int(d) => {
                    self.bump();
                    s = format!("{s}/{d}");
                }
                _ => return self.err("a denominator"),
            }
        }
        Ok(s)
    }

    fn scalar(&mut self) -> Result<Lit, SyntaxError> {
        if self.eat("(") {
            let mut parts = vec![self.rational()?];
            for _ in 0..3 {
                self.expect(",")?;
                parts.push(self.rational()?);
            }
            self.expect(")")?;
            return Ok(Lit(format!("({})", parts.join(", "))));
        }
        if self.eat("<") {
            let mut parts = vec![self.rational()?];
            while self.eat(",") {
                parts.push(self.rational()?);
            }
            self.expect(">")?;
            return Ok(Lit(format!("<{}>", parts.join(","))));
        }
        Ok(Lit(self.rational()?))
    }
}

fn prime_power(n: u64) -> Option<(u64, u32)> {
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let (mut m, mut e) = (n, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Gf(p, 1) => write!(f, "GF({p})"),
            Field::Gf(p, e) => write!(f, "GF({p}^{e})"),
            Field::Rationals => write!(f, "QQ"),
            Field::Quaternions => write!(f, "HQ"),
        }
    }
}

impl fmt::Display for RankSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankSpec::Omega => write!(f, "omega"),
            RankSpec::Finite(n) => write!(f, "{n}"),
        }
    }
}

pub fn rows_text(rows: &Rows) -> String {
    let inner: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|l| l.0.as_str()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", inner.join(", "))
}

pub fn per_comp_text(p: &PerComp<Rows>) -> String {
    if p.len() == 1 {
        rows_text(&p[0])
    } else {
        format!("{{{}}}", p.iter().map(rows_text).collect::<Vec<_>>().join("; "))
    }
}

fn list(xs: &[Expr]) -> String {
    xs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Name(s) => write!(f, "{s}"),
            ExprKind::Coset { n, sub, rep } => {
                write!(f, "coset(n={n}")?;
                match sub {
                    Subgroup::Full => {}
                    Subgroup::Ann(h) => write!(f, ", ann={}", per_comp_text(h))?,
                    Subgroup::Span(s) => write!(f, ", span={}", per_comp_text(s))?,
                }
                if let Some(r) = rep {
                    write!(f, ", rep={}", per_comp_text(r))?;
                }
                write!(f, ")")
            }
            ExprKind::Block { ambient, holes } if holes.is_empty() => write!(f, "block({ambient})"),
            ExprKind::Block { ambient, holes } => write!(f, "block({ambient}, holes=[{}])", list(holes)),
            ExprKind::Union(xs) => write!(f, "union({})", list(xs)),
            ExprKind::Full(n) => write!(f, "full({n})"),
            ExprKind::Empty(n) => write!(f, "empty({n})"),
        }
    }
}

impl fmt::Display for PieceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "piece(domain={}", self.domain)?;
        for (key, v) in [("d1", &self.d1), ("A", &self.a), ("d2", &self.d2)] {
            if let Some(v) = v {
                write!(f, ", {key}={}", per_comp_text(v))?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for MapBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapBody::Identity => write!(f, "identity"),
            MapBody::Compose(a, b) => write!(f, "compose({a}, {b})"),
            MapBody::Invert(a) => write!(f, "invert({a})"),
            MapBody::Pieces(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join(";\n    "))
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StmtKind::Ring { name, comps } => {
                let s: Vec<String> = comps.iter().map(|(q, fl)| format!("M({q}, {fl})")).collect();
                write!(f, "ring {name} = {}", s.join(" x "))
            }
            StmtKind::Module { name, ring, ranks } => {
                let s: Vec<String> = ranks.iter().map(|r| r.to_string()).collect();
                write!(f, "module {name} over {} = rank({})", ring.text, s.join(", "))
            }
            StmtKind::Object { kind, name, expr } => write!(f, "{} {name} = {expr}", kind.keyword()),
            StmtKind::Map { name, boundary, body } => {
                write!(f, "map {name}")?;
                if let Some((s, t)) = boundary {
                    write!(f, " : {s} -> {t}")?;
                }
                write!(f, " = {body}")
            }
            StmtKind::Query { kind, target: Some(t) } => write!(f, "{} {t}", kind.keyword()),
            StmtKind::Query { kind, target: None } => write!(f, "{}", kind.keyword()),
        }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_statement() {
        let s = parse_session("ring S = M(1, GF(5))\n").unwrap();
        assert_eq!(s.stmts[0].kind, StmtKind::Ring { name: "S".into(), comps: vec![(1, Field::Gf(5, 1))] });
        assert_eq!(parse_ring("M(2, GF(9)) x M(1, HQ)").unwrap(), vec![(2, Field::Gf(3, 2)), (1, Field::Quaternions)]);
    }

    #[test]
    fn positions_point_at_the_offender() {
        let e = parse_session("ring S = M(1, GF(5))\nmodule M over S = rank(omega)\nset E = full(2) )\n").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (3, 17));
        let e = parse_session("ring S = M(1, GF(6))").unwrap_err();
        assert_eq!(e.pos.line, 1);
        assert!(e.message.contains("prime power"));
    }

    #[test]
    fn scalar_literals() {
        let s = parse_session("ppset P = coset(n=1, span=[[(1, 0, -1/2, 3)]], rep=[[\u{2212}7/2], [<1,2>]])\n").unwrap();
        let StmtKind::Object { expr, .. } = &s.stmts[0].kind else { panic!() };
        assert_eq!(expr.to_string(), "coset(n=1, span=[[(1, 0, -1/2, 3)]], rep=[[-7/2], [<1,2>]])");
    }

    #[test]
    fn continuation_lines() {
        let text = "map f = piece(domain=full(1), A=[[2]]);\n    piece(domain=full(1),\n      A=[[3]])\nk1 f\n";
        let s = parse_session(text).unwrap();
        assert_eq!(s.stmts.len(), 2);
        assert_eq!(parse_session(&s.to_string()).unwrap(), s);
    }
}
