use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ltlab::Error;

mod commands;
mod config;

use config::{Class, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "ltlab", version, about = "Morava stabilizer group and Lubin-Tate action calculator")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Prime, at most 13.
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Height.
    #[arg(long, global = true, default_value_t = 2)]
    n: u32,
    /// Witt precision; the default depends on the command.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Truncation of the deformation ring, E_0/m^j.
    #[arg(long, global = true, default_value_t = 3)]
    j: u32,
    /// Series truncation degree; defaults to p^n + 1.
    #[arg(long = "N", global = true)]
    big_n: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,
    /// One JSON document per line instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the formal group law and action result as JSON (t0, act).
    #[arg(long, global = true, value_name = "PATH")]
    emit_fixture: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Determinant of g, with the congruence det = a_0^r(n) mod p.
    Det { g: String },
    /// zeta(g) modulo p^(k-2).
    Zeta { g: String },
    /// The action of g on E_0: phi_g and t_0(g).
    T0 { g: String },
    /// Apply phi_g to an element of E_0.
    Act {
        g: String,
        #[arg(long)]
        x: String,
    },
    /// Check the identities on seeded random units.
    Verify,
    /// Shifts comparing the two dualities.
    Shifts,
    /// Net shift for the Moore spectrum at height 2.
    Moore {
        #[arg(long, default_value_t = 1)]
        s: u64,
    },
    /// Vanishing and torsion rules for the Adams-Novikov E_2 page.
    Anss {
        #[command(subcommand)]
        rule: AnssRule,
    },
    /// alpha and lambda in Z_n and their integer reductions.
    Zn {
        #[arg(long, allow_hyphen_values = true)]
        value: Option<i64>,
    },
}

#[derive(Subcommand, Debug, Clone)]
enum AnssRule {
    Hyp,
    Sparse {
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    Torsion {
        #[arg(long = "two-t", allow_hyphen_values = true)]
        two_t: i64,
    },
    Vline,
}

/// What a command produced: text lines, JSON documents and an exit status.
pub struct Report {
    pub lines: Vec<String>,
    pub docs: Vec<Value>,
    pub failed: bool,
}

pub enum CliError {
    Usage(String),
    Lib(Error),
}

macro_rules! lib_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(e.into())
            }
        }
    )*};
}

lib_error!(
    Error,
    ltlab::arith::ArithError,
    ltlab::parse::ParseError,
    ltlab::fgl::FglError,
    ltlab::stabilizer::StabError,
    ltlab::lubin_tate::LtError,
    ltlab::verdicts::VerdictError
);

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) if config::is_internal(e) => 3,
            CliError::Lib(_) => 2,
        }
    }
    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

fn dispatch(opts: &Opts, cmd: &Cmd) -> Result<Report, CliError> {
    let class = match cmd {
        Cmd::Det { .. } | Cmd::Zeta { .. } | Cmd::Zn { .. } => Class::Ring,
        Cmd::T0 { .. } | Cmd::Act { .. } | Cmd::Verify => Class::Solver,
        _ => Class::Rule,
    };
    if opts.emit_fixture.is_some() && !matches!(cmd, Cmd::T0 { .. } | Cmd::Act { .. }) {
        return Err(CliError::Usage("--emit-fixture applies to t0 and act".into()));
    }
    let default_k = match cmd {
        Cmd::Det { .. } | Cmd::Zn { .. } => 4,
        Cmd::Zeta { .. } => 5,
        Cmd::T0 { .. } | Cmd::Act { .. } | Cmd::Verify => opts.j + 1,
        _ => 1,
    };
    let cfg = RunConfig {
        p: opts.p,
        n: opts.n,
        k: opts.k.unwrap_or(default_k),
        j: opts.j,
        big_n: opts.big_n,
        seed: opts.seed,
        trials: opts.trials,
        emit_fixture: opts.emit_fixture.clone(),
    };
    cfg.validate(class).map_err(CliError::Usage)?;
    match cmd {
        Cmd::Det { g } => commands::det(&cfg, g),
        Cmd::Zeta { g } => commands::zeta(&cfg, g),
        Cmd::T0 { g } => commands::t0(&cfg, g),
        Cmd::Act { g, x } => commands::act(&cfg, g, x),
        Cmd::Verify => commands::verify(&cfg),
        Cmd::Shifts => commands::shifts(&cfg),
        Cmd::Moore { s } => commands::moore(&cfg, *s),
        Cmd::Anss { rule } => match rule {
            AnssRule::Hyp => commands::rule(ltlab::verdicts::hyp_check(cfg.p, cfg.n)?),
            AnssRule::Sparse { t } => commands::rule(ltlab::verdicts::sparse_zero(cfg.p, *t)?),
            AnssRule::Torsion { two_t } => commands::rule(ltlab::verdicts::torsion_exponent(cfg.p, *two_t)?),
            AnssRule::Vline => commands::rule(ltlab::verdicts::vanishing_line(cfg.p, cfg.n)?),
        },
        Cmd::Zn { value } => commands::zn(&cfg, *value),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.opts, &cli.cmd) {
        Ok(report) => {
            if cli.opts.json {
                for d in &report.docs {
                    println!("{d}");
                }
            } else {
                for l in &report.lines {
                    println!("{l}");
                }
            }
            ExitCode::from(u8::from(report.failed))
        }
        Err(e) => {
            let code = e.code();
            if cli.opts.json {
                println!("{}", json!({ "schema": ltlab::SCHEMA, "error": { "code": code, "message": e.message() } }));
            } else {
                eprintln!("error: {}", e.message());
            }
            ExitCode::from(code)
        }
    }
}
