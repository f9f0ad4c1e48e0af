//! `fairdiv` command-line front end.
//!
//! Exit codes:
//! 0 success / true / fair-sat, 1 false / not-fair-sat-on-grid,
//! 2 parse or usage error, 3 precondition violation, 4 backend spawn failure,
//! 5 backend timeout, 6 unparseable backend reply, 7 unknown (grid incomplete),
//! 8 I/O error.

mod backend;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairdiv::oracle::{fair_sat_grid_traced, CandidateGrid, TriState};
use fairdiv::peval::pevalp_formula;
use fairdiv::rewrite::{lower_implies, normalize_divs, posform, prenex, standardize_apart};
use fairdiv::syntax::{emit_qepcad_style, emit_smt2, parse_formula, print_formula};
use fairdiv::translate::{translate_atom_traced, translate_formula, ClearMode};
use fairdiv::algebra::parse_rational;
use fairdiv::{BlockStructure, Formula, FreshState, Rational, Var};

#[derive(Parser)]
#[command(name = "fairdiv", version, about = "Division-aware formula rewriting and fair-SAT checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Input {
    /// Formula file; stdin when absent and no --formula is given.
    file: Option<PathBuf>,
    /// Formula text given inline.
    #[arg(short = 'f', long, conflicts_with = "file")]
    formula: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Text,
    Smt2,
    Qepcad,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendEmit {
    Qepcad,
    Smt2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Noguard,
    Naive,
    Fair,
}

impl From<Mode> for ClearMode {
    fn from(m: Mode) -> ClearMode {
        match m {
            Mode::Noguard => ClearMode::NoGuard,
            Mode::Naive => ClearMode::Naive,
            Mode::Fair => ClearMode::Fair,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Clear denominators after prenexing.
    Clear {
        #[arg(long, value_enum, default_value = "fair")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        /// Print the guard ladder of every atom with divisions (fair mode).
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Partially evaluate at `var=rational`, applied in flag order.
    Peval {
        #[arg(long = "at", value_name = "VAR=RAT")]
        at: Vec<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Decide fair-SAT of a closed formula over a finite candidate grid.
    Check {
        /// `auto` or `x:-1,0,1;y:1/2`.
        #[arg(long, default_value = "auto")]
        grid: String,
        #[command(flatten)]
        input: Input,
    },
    /// Send the fair translation to an external decision procedure.
    Solve {
        /// Backend executable; overrides `backend.name` from the config.
        #[arg(long)]
        backend: Option<String>,
        /// key=value file with backend.name, backend.args,
        /// backend.true_pattern, backend.false_pattern.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "qepcad")]
        emit: BackendEmit,
        #[arg(long, default_value_t = 60)]
        timeout_seconds: u64,
        #[command(flatten)]
        input: Input,
    },
}

/// A failure with its exit code; the message goes to stderr.
pub struct Fail(pub u8, pub String);

impl From<fairdiv::Error> for Fail {
    fn from(e: fairdiv::Error) -> Fail {
        match e {
            fairdiv::Error::Parse(p) => Fail(2, format!("parse error: {p}")),
            e => Fail(3, e.to_string()),
        }
    }
}

fn read_formula(input: &Input) -> Result<Formula, Fail> {
    let text = match (&input.formula, &input.file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| Fail(8, format!("{}: {e}", p.display())))?,
        (None, None) => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Fail(8, format!("stdin: {e}")))?;
            s
        }
    };
    parse_formula(text.trim()).map_err(|e| Fail(2, e.to_string()))
}

fn prepare(f: &Formula) -> Result<Formula, Fail> {
    let g = posform(&standardize_apart(&normalize_divs(&lower_implies(f))));
    Ok(prenex(&g)?)
}

fn clear(f: &Formula, mode: Mode, emit: Emit, trace: bool) -> Result<String, Fail> {
    let g = prepare(f)?;
    let mut out = String::new();
    if trace {
        let (bs, matrix) = BlockStructure::of_prenex(&g)?;
        for a in matrix.atoms().into_iter().filter(|a| a.has_div()) {
            out.push_str(&format!("atom {}\n", print_formula(&Formula::Atom(a.clone()))));
            out.push_str(&translate_atom_traced(&bs, a)?.render());
        }
    }
    let t = translate_formula(&g, mode.into())?;
    out.push_str(&match emit {
        Emit::Text => format!("{}\n", print_formula(&t)),
        Emit::Smt2 => emit_smt2(&t)?,
        Emit::Qepcad => emit_qepcad_style(&t)?,
    });
    Ok(out)
}

fn parse_at(s: &str) -> Result<(Var, Rational), Fail> {
    let bad = || Fail(2, format!("--at expects VAR=RATIONAL, got `{s}`"));
    let (v, r) = s.split_once('=').ok_or_else(bad)?;
    let v = v.trim();
    if v.is_empty() {
        return Err(bad());
    }
    Ok((Var::new(v), parse_rational(r.trim()).ok_or_else(bad)?))
}

fn peval(f: &Formula, at: &[String]) -> Result<String, Fail> {
    let (xs, g): (Vec<Var>, Vec<Rational>) = at.iter().map(|s| parse_at(s)).collect::<Result<Vec<_>, _>>()?.into_iter().unzip();
    let (r, _) = pevalp_formula(f, &xs, &g, FreshState::new())?;
    Ok(format!("{}\n", print_formula(&r)))
}

fn check(f: &Formula, grid: &str) -> Result<(String, TriState), Fail> {
    let grid = if grid.trim() == "auto" {
        CandidateGrid::auto(f)
    } else {
        grid.parse::<CandidateGrid>().map_err(|e| Fail(2, format!("bad --grid: {e}")))?
    };
    let report = fair_sat_grid_traced(f, &grid, FreshState::new())?;
    Ok((report.render(), report.result))
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.cmd {
        Cmd::Clear { mode, emit, trace, input } => {
            print!("{}", clear(&read_formula(&input)?, mode, emit, trace)?);
            Ok(0)
        }
        Cmd::Peval { at, input } => {
            print!("{}", peval(&read_formula(&input)?, &at)?);
            Ok(0)
        }
        Cmd::Check { grid, input } => {
            let (text, r) = check(&read_formula(&input)?, &grid)?;
            print!("{text}");
            Ok(match r {
                TriState::FairSat => 0,
                TriState::NotFairSatOnGrid => 1,
                TriState::Unknown => 7,
            })
        }
        Cmd::Solve { backend, config, emit, timeout_seconds, input } => {
            let f = read_formula(&input)?;
            let mut cfg = match &config {
                Some(p) => backend::Config::load(p)?,
                None => backend::Config::default(),
            };
            if let Some(b) = backend {
                cfg.name = Some(b);
            }
            let t = translate_formula(&prepare(&f)?, ClearMode::Fair)?;
            let script = match emit {
                BackendEmit::Qepcad => emit_qepcad_style(&t)?,
                BackendEmit::Smt2 => emit_smt2(&t)?,
            };
            let verdict = backend::run(&cfg, &script, std::time::Duration::from_secs(timeout_seconds))?;
            println!("{verdict}");
            Ok(if verdict { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(Fail(c, msg)) => {
            eprintln!("fairdiv: {msg}");
            ExitCode::from(c)
        }
    }
}
