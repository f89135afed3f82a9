use defk_cli::commands::{answer_output, Command};
use defk_cli::{parse_session, run_command, Env};

const SESSIONS: &[&str] = &["scaling.dk", "shape_error.dk", "singular.dk", "not_bijective.dk"];

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn print_is_a_fixpoint_of_parse() {
    for name in SESSIONS {
        let s = parse_session(&read(name)).unwrap();
        let printed = s.to_string();
        let again = parse_session(&printed).unwrap();
        assert_eq!(again, s, "{name}");
        assert_eq!(again.to_string(), printed, "{name}");
    }
}

#[test]
fn inline_forms_round_trip() {
    let text = "\
ring R = M(1, GF(3^2)) x M(2, QQ)
module N over R = rank(omega, 3)
set E = union(block(coset(n=1, span={[[1]]; [[1, 0]]}, rep={[[<0, 1>]]; [[1/2, 0]]}), holes=[coset(n=1, span={[]; [[1, 0]]}, rep={[[<0, 1>]]; [[1/2, 0]]})]), empty(1))
map u : full(1) -> full(1) = piece(domain=full(1), A={[[<1, 1>]]; [[0, 1], [1, 0]]},
    d2={[[1]]; [[0, -3/4]]})
map v = invert(u)
k1 v
dim u
";
    let s = parse_session(text).unwrap();
    assert_eq!(parse_session(&s.to_string()).unwrap(), s);
    let env = Env::evaluate(s).unwrap();
    for (_, a) in env.answers() {
        assert_eq!(answer_output(&a.unwrap()).code, 0);
    }
}

#[test]
fn quaternion_scalars() {
    let text = "ring H = M(1, HQ)\nmodule M over H = rank(omega)\nmap j : full(1) -> full(1) = piece(domain=full(1), A=[[(0, 1, 2, -1/3)]])\nk1 j\n";
    let s = parse_session(text).unwrap();
    assert_eq!(parse_session(&s.to_string()).unwrap(), s);
    let env = Env::evaluate(s).unwrap();
    let out = run_command(&Command::K1 { map: "j".into() }, &env);
    assert_eq!(out.code, 0);
    // reduced norm 1 + 4 + 1/9
    assert!(out.text.contains("46/9"), "{}", out.text);
}
