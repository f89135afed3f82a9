use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use defk_cli::commands::{expected_k1_inline, oracle_finite, selftest};
use defk_cli::{run_command, Command, Env, Output};

#[derive(Parser)]
#[command(name = "defk", version, about = "K-invariants of definable automorphisms of modules")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SessionArg {
    /// Session file (.dk).
    #[arg(long)]
    session: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Answer every query in a session file.
    Run { file: PathBuf },
    /// Print a session file in canonical form.
    Print { file: PathBuf },
    /// K1 class of a map.
    K1 {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        map: String,
    },
    /// Validate a map: partition, bijectivity, declared boundary.
    Check {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        map: String,
    },
    /// K0 class of a set.
    K0 {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        set: String,
    },
    /// Dimension vector of a set, or of a map's support.
    Dim {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        name: String,
    },
    /// Composite `f ∘ g` of `--map f --map g`, printed as a map statement.
    Compose {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long = "map", num_args = 1, required = true)]
        maps: Vec<String>,
        /// Name for the result.
        #[arg(long, default_value = "composite")]
        name: String,
    },
    /// Inverse of a map, printed as a map statement.
    Invert {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "inverse")]
        name: String,
    },
    /// Morita translate of a set or map over `M_q(R)`.
    Morita {
        #[command(flatten)]
        s: SessionArg,
        #[arg(long)]
        name: String,
        #[arg(long)]
        q: usize,
    },
    /// Expected shape of K1 for a module of a session or for an inline ring.
    #[command(name = "expected-k1")]
    ExpectedK1 {
        #[arg(long, conflicts_with = "ring")]
        session: Option<PathBuf>,
        #[arg(long, requires = "session")]
        module: Option<String>,
        /// Ring as in a session, e.g. "M(1, GF(5))".
        #[arg(long)]
        ring: Option<String>,
        /// Ranks, e.g. "omega" or "omega, 3".
        #[arg(long, default_value = "omega")]
        rank: String,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Randomized self-checks of the engine.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        cases: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// K1 of a finite module by enumerating symmetric groups.
    Finite {
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        max_power: usize,
    },
}

fn load(path: &PathBuf) -> Result<Env, Output> {
    let text = std::fs::read_to_string(path).map_err(|e| Output::usage(format!("{}: {e}", path.display())))?;
    Env::load(&text).map_err(|d| {
        let mut out = Output::diagnostic(&d);
        out.text = format!("{}:{}", path.display(), out.text);
        out
    })
}

fn with_session(path: &PathBuf, cmd: Command) -> Output {
    match load(path) {
        Ok(env) => run_command(&cmd, &env),
        Err(o) => o,
    }
}

fn dispatch(cmd: Cmd) -> Output {
    match cmd {
        Cmd::Run { file } => with_session(&file, Command::Run),
        Cmd::Print { file } => match std::fs::read_to_string(&file) {
            Ok(text) => match defk_cli::parse_session(&text) {
                Ok(s) => {
                    let t = s.to_string();
                    Output { text: t.trim_end().to_string(), json: serde_json::json!({ "session": t }), code: 0 }
                }
                Err(e) => Output::diagnostic(&e.into()),
            },
            Err(e) => Output::usage(format!("{}: {e}", file.display())),
        },
        Cmd::K1 { s, map } => with_session(&s.session, Command::K1 { map }),
        Cmd::Check { s, map } => with_session(&s.session, Command::Check { map }),
        Cmd::K0 { s, set } => with_session(&s.session, Command::K0 { set }),
        Cmd::Dim { s, name } => with_session(&s.session, Command::Dim { name }),
        Cmd::Compose { s, maps, name } => match <[String; 2]>::try_from(maps) {
            Ok([outer, inner]) => with_session(&s.session, Command::Compose { outer, inner, name }),
            Err(_) => Output::usage("compose takes exactly two --map arguments"),
        },
        Cmd::Invert { s, map, name } => with_session(&s.session, Command::Invert { map, name }),
        Cmd::Morita { s, name, q } => with_session(&s.session, Command::Morita { name, q }),
        Cmd::ExpectedK1 { session, module, ring, rank } => match (session, ring) {
            (Some(p), _) => with_session(&p, Command::ExpectedK1 { module }),
            (None, Some(r)) => expected_k1_inline(&r, &rank),
            (None, None) => Output::usage("expected-k1 needs --session or --ring"),
        },
        Cmd::Oracle { which: OracleCmd::Finite { field, q, rank, max_power } } => oracle_finite(&field, q, rank, max_power),
        Cmd::Selftest { seed, cases } => selftest(seed, cases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = dispatch(cli.cmd);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
    } else if out.code == 0 {
        println!("{}", out.text);
    } else {
        eprintln!("{}", out.text);
    }
    ExitCode::from(out.code as u8)
}
