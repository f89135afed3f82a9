//! Commands run against an evaluated session, each producing text, JSON
//! and an exit code.

use defk::defmaps::{compose, invert, morita_map, PiecewiseBijection};
use defk::defsets::{morita_set, DefinableSet};
use defk::k1::{expected_k1_group, k1_add, k1_invariant};
use defk::modules::{ModuleDescriptor, Rank};
use defk::oracle::{brute_k1_finite, check_count, check_parity};
use defk::rings::{dieudonne_det, DivisionRing, RingDescriptor};
use defk::sample::{random_automorphism, random_invertible, random_set};
use defk::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::render::{colour_json, group_json, k0_json, map_text, module_text, set_text};
use crate::session::{self, Answer, Binding, Diagnostic, Env, Value as Bound};
use crate::syntax::{parse_ranks, parse_ring, Expr, ExprKind, Pos, QueryKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Output {
        Output { text: text.into(), json, code: EXIT_OK }
    }

    pub fn diagnostic(d: &Diagnostic) -> Output {
        let code = if d.is_usage() { EXIT_USAGE } else { EXIT_DOMAIN };
        let json = json!({"error": {"code": d.code(), "message": d.message(), "line": d.pos.line, "column": d.pos.col}});
        Output { text: d.to_string(), json, code }
    }

    pub fn engine(e: &Error) -> Output {
        let code = if matches!(e, Error::Shape(_)) { EXIT_USAGE } else { EXIT_DOMAIN };
        Output { text: format!("error[{}]: {e}", e.code()), json: json!({"error": {"code": e.code(), "message": e.to_string()}}), code }
    }

    pub fn usage(msg: impl Into<String>) -> Output {
        let msg = msg.into();
        Output { text: format!("error[Usage]: {msg}"), json: json!({"error": {"code": "Usage", "message": msg}}), code: EXIT_USAGE }
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    /// Answer every query written in the session.
    Run,
    /// The session in canonical form.
    Print,
    K1 { map: String },
    Check { map: String },
    K0 { set: String },
    Dim { name: String },
    /// `outer ∘ inner`.
    Compose { outer: String, inner: String, name: String },
    Invert { map: String, name: String },
    Morita { name: String, q: usize },
    ExpectedK1 { module: Option<String> },
}

fn name_expr(n: &str) -> Expr {
    Expr { pos: Pos::default(), kind: ExprKind::Name(n.to_string()) }
}

pub fn answer_output(a: &Answer) -> Output {
    match a {
        Answer::K1(c) => Output::ok(c.to_string(), c.to_json()),
        Answer::K0(k) => Output::ok(k.to_string(), k0_json(k)),
        Answer::Dim(c) => Output::ok(c.to_string(), json!({"dim": colour_json(c)})),
        Answer::Check(v) if v.is_empty() => Output::ok("valid", json!({"valid": true, "violations": []})),
        Answer::Check(v) => Output { text: v.join("\n"), json: json!({"valid": false, "violations": v}), code: EXIT_DOMAIN },
        Answer::Expected(g) => Output::ok(g.to_string(), json!({"descriptor": g.to_string(), "structure": group_json(g)})),
    }
}

fn query(env: &Env, kind: QueryKind, target: Option<&str>) -> Output {
    let e = target.map(name_expr);
    match env.query(kind, e.as_ref(), Pos::default()) {
        Ok(a) => answer_output(&a),
        Err(d) => Output::diagnostic(&d),
    }
}

fn map_of<'a>(env: &'a Env, name: &str) -> Result<(&'a ModuleDescriptor, &'a PiecewiseBijection), Output> {
    match env.get(name) {
        Some(Binding { value: Bound::Map(f), .. }) => Ok((env.module_of(Some(name)).expect("maps live over a module").1, f)),
        Some(b) => Err(Output::usage(format!("'{name}' is a {}, not a map", b.value.kind()))),
        None => Err(Output::usage(format!("unknown name '{name}'"))),
    }
}

fn dsl_output(text: String) -> Output {
    Output::ok(text.clone(), json!({"dsl": text}))
}

pub fn run_command(cmd: &Command, env: &Env) -> Output {
    match cmd {
        Command::Print => {
            let text = env.syntax.to_string();
            Output::ok(text.trim_end().to_string(), json!({"session": text}))
        }
        Command::Run => {
            let mut text = Vec::new();
            let mut results = Vec::new();
            let mut code = EXIT_OK;
            for (q, a) in env.answers() {
                let out = match a {
                    Ok(a) => answer_output(&a),
                    Err(d) => Output::diagnostic(&d),
                };
                code = code.max(out.code);
                text.push(format!("{q} => {}", out.text.replace('\n', "\n    ")));
                results.push(json!({"query": q, "result": out.json}));
            }
            Output { text: text.join("\n"), json: json!({ "results": results }), code }
        }
        Command::K1 { map } => query(env, QueryKind::K1, Some(map)),
        Command::Check { map } => query(env, QueryKind::Check, Some(map)),
        Command::K0 { set } => query(env, QueryKind::K0, Some(set)),
        Command::Dim { name } => query(env, QueryKind::Dim, Some(name)),
        Command::ExpectedK1 { module } => query(env, QueryKind::ExpectedK1, module.as_deref()),
        Command::Compose { outer, inner, name } => {
            let run = || -> Result<Output, Output> {
                let (m, f) = map_of(env, outer)?;
                let (_, g) = map_of(env, inner)?;
                let h = compose(m, f, g).map_err(|e| Output::engine(&e))?;
                Ok(dsl_output(map_text(m, name, &h)))
            };
            run().unwrap_or_else(|e| e)
        }
        Command::Invert { map, name } => match map_of(env, map) {
            Ok((m, f)) => dsl_output(map_text(m, name, &invert(m, f))),
            Err(o) => o,
        },
        Command::Morita { name, q } => morita(env, name, *q),
    }
}

fn morita(env: &Env, name: &str, q: usize) -> Output {
    let Some(b) = env.get(name) else {
        return Output::usage(format!("unknown name '{name}'"));
    };
    let Some((_, m)) = env.module_of(Some(name)) else {
        return Output::usage("declare a module first");
    };
    let new_name = format!("{name}_q{q}");
    let header = |m2: &ModuleDescriptor| module_text(m2, &format!("S_q{q}"), &format!("M_q{q}"));
    let set = |d: DefinableSet| -> Output {
        match morita_set(m, &d, q) {
            Ok((m2, d2)) => dsl_output(format!("{}\nset {new_name} = {}", header(&m2), set_text(&m2, &d2))),
            Err(e) => Output::engine(&e),
        }
    };
    match &b.value {
        Bound::Ppset(c) => set(DefinableSet::from_coset(c.clone())),
        Bound::Block(bl) => set(DefinableSet::from_block(bl.clone())),
        Bound::Set(d) => set(d.clone()),
        Bound::Map(f) => match morita_map(m, f, q) {
            Ok((m2, f2)) => dsl_output(format!("{}\n{}", header(&m2), map_text(&m2, &new_name, &f2))),
            Err(e) => Output::engine(&e),
        },
        v => Output::usage(format!("'{name}' is a {}; morita takes a ppset, block, set or map", v.kind())),
    }
}

/// `expected-k1` for a ring written inline, e.g. `M(1, GF(5))` with ranks `omega`.
pub fn expected_k1_inline(ring: &str, ranks: &str) -> Output {
    let comps = match parse_ring(ring) {
        Ok(c) => c,
        Err(e) => return Output::usage(format!("ring {e}")),
    };
    let ranks = match parse_ranks(ranks) {
        Ok(r) => r,
        Err(e) => return Output::usage(format!("rank {e}")),
    };
    let m = match session::ring(&comps).and_then(|s| session::module(s, &ranks)) {
        Ok(m) => m,
        Err(e) => return Output::engine(&e),
    };
    match expected_k1_group(&m) {
        Ok(g) => answer_output(&Answer::Expected(g.normalized())),
        Err(e) => Output::engine(&e),
    }
}

/// Brute-force K₁ of a finite module `M_{1×q}(F)^rank`.
pub fn oracle_finite(field: &str, q: usize, rank: usize, max_power: usize) -> Output {
    let comps = match parse_ring(&format!("M({q}, {field})")) {
        Ok(c) => c,
        Err(e) => return Output::usage(format!("field {e}")),
    };
    let m = match session::ring(&comps).and_then(|s| ModuleDescriptor::new(s, vec![Rank::Finite(rank)])) {
        Ok(m) => m,
        Err(e) => return Output::engine(&e),
    };
    match brute_k1_finite(&m, max_power) {
        Ok(rep) => {
            let mut text: Vec<String> = rep.stages.iter().map(|(s, g)| format!("Sym({s})^ab = {g}")).collect();
            text.push(format!("K1 = {}{}", rep.descriptor, if rep.stabilized { "" } else { " (not yet stable)" }));
            let stages: Vec<Value> = rep.stages.iter().map(|(s, g)| json!({"size": s, "group": g.to_string()})).collect();
            let json = json!({
                "carrier": rep.carrier,
                "stages": stages,
                "descriptor": rep.descriptor.to_string(),
                "stabilized": rep.stabilized,
            });
            Output::ok(text.join("\n"), json)
        }
        Err(e) => Output::engine(&e),
    }
}

fn omega(r: DivisionRing) -> ModuleDescriptor {
    ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega)
}

/// Randomized consistency checks of the engine against itself and against
/// brute-force enumeration.
pub fn selftest(seed: u64, cases: usize) -> Output {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<(&str, Result<usize, String>)> = Vec::new();

    let homomorphism = |rng: &mut ChaCha8Rng| -> Result<usize, String> {
        for r in [DivisionRing::gf(5), DivisionRing::Rationals] {
            let m = omega(r);
            for _ in 0..cases {
                let n = rng.gen_range(1..=2);
                let f = random_automorphism(&m, n, rng);
                let g = random_automorphism(&m, n, rng);
                let k = |h: &PiecewiseBijection| k1_invariant(&m, h).map_err(|e| e.to_string());
                let fg = compose(&m, &f, &g).map_err(|e| e.to_string())?;
                let sum = k1_add(&k(&f)?, &k(&g)?).map_err(|e| e.to_string())?;
                if k(&fg)? != sum {
                    return Err(format!("k1(f∘g) = {} but k1(f) + k1(g) = {sum}", k(&fg)?));
                }
            }
        }
        Ok(2 * cases)
    };
    checks.push(("k1 is a homomorphism", homomorphism(&mut rng)));

    let parity = |rng: &mut ChaCha8Rng| -> Result<usize, String> {
        let m = omega(DivisionRing::gf(3));
        for _ in 0..cases {
            let f = random_automorphism(&m, 1, rng);
            let c = k1_invariant(&m, &f).map_err(|e| e.to_string())?;
            let a = check_parity(&m, &f, &c, 3).map_err(|e| e.to_string())?;
            if !a.ok() {
                return Err(a.mismatches.join("; "));
            }
        }
        Ok(cases)
    };
    checks.push(("k1 predicts permutation parity", parity(&mut rng)));

    let counting = |rng: &mut ChaCha8Rng| -> Result<usize, String> {
        let m = omega(DivisionRing::gf(3));
        for _ in 0..cases {
            let d = random_set(&m, 2, rng);
            let a = check_count(&m, &d, 3).map_err(|e| e.to_string())?;
            if !a.ok() {
                return Err(a.mismatches.join("; "));
            }
        }
        Ok(cases)
    };
    checks.push(("k0 predicts point counts", counting(&mut rng)));

    let dieudonne = |rng: &mut ChaCha8Rng| -> Result<usize, String> {
        let h = DivisionRing::Quaternions;
        for _ in 0..cases {
            let w = rng.gen_range(1..=3);
            let (a, b) = (random_invertible(&h, w, rng), random_invertible(&h, w, rng));
            let det = |x: &defk::rings::Mat| dieudonne_det(&h, x).map_err(|e| e.to_string());
            let ab = det(&a.mul(&h, &b).map_err(|e| e.to_string())?)?;
            if ab != det(&a)?.combine(&det(&b)?).map_err(|e| e.to_string())? {
                return Err("det(AB) differs from det(A)·det(B)".into());
            }
        }
        Ok(cases)
    };
    checks.push(("Dieudonné determinant is multiplicative", dieudonne(&mut rng)));

    let finite = || -> Result<usize, String> {
        let m = ModuleDescriptor::uniform(RingDescriptor::simple(1, DivisionRing::gf(3)), Rank::Finite(1));
        let rep = brute_k1_finite(&m, 1).map_err(|e| e.to_string())?;
        let want = expected_k1_group(&m).map_err(|e| e.to_string())?;
        if rep.descriptor == want && rep.stabilized {
            Ok(1)
        } else {
            Err(format!("enumeration gives {}, expected {want}", rep.descriptor))
        }
    };
    checks.push(("finite module K1 by enumeration", finite()));

    let mut text = Vec::new();
    let mut json_checks = Vec::new();
    let mut code = EXIT_OK;
    for (name, r) in &checks {
        match r {
            Ok(n) => {
                text.push(format!("PASS {name} ({n} cases)"));
                json_checks.push(json!({"name": name, "passed": true, "cases": n}));
            }
            Err(why) => {
                code = EXIT_DOMAIN;
                text.push(format!("FAIL {name}: {why}"));
                json_checks.push(json!({"name": name, "passed": false, "detail": why}));
            }
        }
    }
    Output { text: text.join("\n"), json: json!({"seed": seed, "checks": json_checks}), code }
}
