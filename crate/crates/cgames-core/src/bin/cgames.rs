// SPDX-License-Identifier: Apache-2.0

//! Command-line driver: parse/run/interpret/check/compare/adequacy over the
//! bundled language, plus a deterministic DOT gallery of the reference
//! arenas and strategies.
//!
//! Exit codes: 0 success, 1 comparison mismatch or condition failure,
//! 2 parse/type error, 3 budget or fuel exhaustion.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cgames_core::arena::{interpret_type, Arena, Budget, Ty};
use cgames_core::conditions;
use cgames_core::interp::{adequacy_check, cell, interpret, Adequacy, Interp};
use cgames_core::lang::{parse, parse_corpus, run, LangError, RunResult};
use cgames_core::positions::positionally_equivalent;
use cgames_core::samples;
use cgames_core::strategy::{copycat, positive_iso, Strategy};

const BUNDLED_CORPUS: &str = include_str!("../../corpus/adequacy.ia");

#[derive(Parser)]
#[command(name = "cgames", about = "Causal game semantics workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Replication width for exponentials.
    #[arg(long, default_value_t = 2)]
    width: usize,
    /// Largest representable natural number.
    #[arg(long, default_value_t = 2)]
    nat_max: usize,
    /// Fixed-point unrolling depth.
    #[arg(long, default_value_t = 3)]
    unroll: usize,
    /// Operational-semantics step budget.
    #[arg(long, default_value_t = 10_000)]
    fuel: usize,
    /// Event-count budget for constructed structures.
    #[arg(long, default_value_t = 5_000)]
    max_events: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            bang_width: self.width,
            nat_max: self.nat_max,
            unroll_depth: self.unroll,
            run_fuel: self.fuel,
            max_events: self.max_events,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFmt {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareMode {
    Positional,
    PositiveIso,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a closed term operationally and report may-convergence.
    Run {
        term: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Interpret a closed term as a causal strategy and print it.
    Interp {
        term: String,
        #[arg(long, value_enum, default_value_t = OutFmt::Text)]
        out: OutFmt,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Interpret a closed term and evaluate semantic conditions on it.
    Check {
        /// Comma-separated list: deterministic, visible, pre-innocent,
        /// innocent, sequential, wb, causally-wb, complete.
        #[arg(long)]
        conditions: String,
        term: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Compare the interpretations of two closed terms.
    Compare {
        #[arg(long, value_enum)]
        mode: CompareMode,
        term1: String,
        term2: String,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check operational/denotational agreement over a corpus file
    /// (defaults to the bundled corpus).
    Adequacy {
        file: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Write the DOT gallery of reference arenas and strategies.
    Gallery {
        #[arg(long, default_value = "gallery")]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn lang_exit(e: &LangError) -> ExitCode {
    match e {
        LangError::Parse(..) | LangError::Type(_) => ExitCode::from(2),
        LangError::Budget(_) | LangError::Fuel(_) => ExitCode::from(3),
        _ => ExitCode::from(3),
    }
}

fn parse_closed(src: &str) -> Result<(cgames_core::lang::Term, Ty), ExitCode> {
    parse(src, &[]).map_err(|e| {
        eprintln!("error: {e}");
        lang_exit(&e)
    })
}

fn interpret_closed(src: &str, budget: &Budget) -> Result<Interp, ExitCode> {
    let (term, _) = parse_closed(src)?;
    interpret(&term, &[], budget).map_err(|e| {
        eprintln!("error: {e}");
        lang_exit(&e)
    })
}

fn cmd_run(src: &str, budget: &Budget) -> ExitCode {
    let (term, _) = match parse_closed(src) {
        Ok(t) => t,
        Err(c) => return c,
    };
    match run(&term, budget) {
        Ok(RunResult::Converges(v)) => {
            println!("converges: {v}");
            ExitCode::SUCCESS
        }
        Ok(RunResult::Diverges) => {
            println!("diverges");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            lang_exit(&e)
        }
    }
}

fn cmd_interp(src: &str, out: OutFmt, budget: &Budget) -> ExitCode {
    let it = match interpret_closed(src, budget) {
        Ok(it) => it,
        Err(c) => return c,
    };
    match out {
        OutFmt::Json => {
            let v = serde_json::json!({
                "type": format!("{:?}", it.ty),
                "strategy": it.strategy.to_json(),
            });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        OutFmt::Dot => println!("{}", it.strategy.to_dot("strategy")),
        OutFmt::Text => {
            println!("type: {:?}", it.ty);
            println!("events: {}", it.strategy.es.len());
            println!("game events: {}", it.strategy.seq.game.es.len());
        }
    }
    ExitCode::SUCCESS
}

fn eval_condition(name: &str, s: &Strategy, budget: &Budget) -> Option<bool> {
    let cap = budget.max_events;
    Some(match name {
        "deterministic" => conditions::deterministic(s),
        "visible" => conditions::visible(s, cap),
        "pre-innocent" => conditions::pre_innocent(s),
        "innocent" => conditions::parallel_innocent(s, cap),
        "sequential" => conditions::sequential(s, cap, 64),
        "wb" => conditions::well_bracketed(s, cap, 64),
        "causally-wb" => conditions::causally_wb(s, cap),
        "complete" => conditions::complete_strategy(s, cap),
        _ => return None,
    })
}

fn cmd_check(list: &str, src: &str, budget: &Budget) -> ExitCode {
    let it = match interpret_closed(src, budget) {
        Ok(it) => it,
        Err(c) => return c,
    };
    let mut report = BTreeMap::new();
    let mut failed = false;
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match eval_condition(name, &it.strategy, budget) {
            Some(pass) => {
                println!("{name}: {}", if pass { "pass" } else { "fail" });
                failed |= !pass;
                report.insert(name.to_string(), pass);
            }
            None => {
                eprintln!("error: unknown condition `{name}`");
                return ExitCode::from(2);
            }
        }
    }
    println!("{}", serde_json::to_string(&report).unwrap());
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_compare(mode: CompareMode, src1: &str, src2: &str, budget: &Budget) -> ExitCode {
    let (a, b) = match (interpret_closed(src1, budget), interpret_closed(src2, budget)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(c), _) | (_, Err(c)) => return c,
    };
    let equal = match mode {
        CompareMode::Positional => {
            match positionally_equivalent(&a.strategy, &b.strategy, budget.max_events * 4) {
                Ok(e) => e,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            }
        }
        CompareMode::PositiveIso => positive_iso(&a.strategy, &b.strategy),
    };
    println!("{}", if equal { "equivalent" } else { "different" });
    if equal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_adequacy(file: Option<&PathBuf>, budget: &Budget) -> ExitCode {
    let text = match file {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => BUNDLED_CORPUS.to_string(),
    };
    let entries = parse_corpus(&text);
    let mut mismatch = false;
    let mut inconclusive = false;
    for e in &entries {
        let term = match parse(&e.source, &[]) {
            Ok((t, _)) => t,
            Err(err) => {
                println!("{:<26} parse/type error: {err}", e.name);
                mismatch = true;
                continue;
            }
        };
        let verdict = adequacy_check(&term, budget);
        let (word, ok) = match &verdict {
            Adequacy::Agree { converges } => {
                let word = if *converges { "agree (converges)" } else { "agree (diverges)" };
                let expected = match e.expect.as_str() {
                    "converge" => Some(true),
                    "diverge" => Some(false),
                    _ => None,
                };
                (word.to_string(), expected.is_none_or(|x| x == *converges))
            }
            Adequacy::Disagree { operational, denotational } => (
                format!("DISAGREE (operational {operational}, denotational {denotational})"),
                false,
            ),
            Adequacy::Inconclusive(reason) => {
                inconclusive = true;
                (format!("inconclusive: {reason}"), false)
            }
        };
        println!("{:<26} {word}{}", e.name, if ok { "" } else { "  <-- MISMATCH" });
        mismatch |= !ok && !matches!(verdict, Adequacy::Inconclusive(_));
    }
    if mismatch {
        ExitCode::from(1)
    } else if inconclusive {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

/// The gallery cases: deterministic DOT renderings of the reference arenas
/// and strategies.
fn gallery_cases(budget: &Budget) -> Result<Vec<(String, String)>, String> {
    let max = budget.max_events;
    let err = |e: &dyn std::fmt::Display| format!("{e}");
    let den = |src: &str, ctx: &[(String, Ty)]| -> Result<Strategy, String> {
        let (t, _) = parse(src, ctx).map_err(|e| err(&e))?;
        Ok(interpret(&t, ctx, budget).map_err(|e| err(&e))?.strategy)
    };
    let uu = Ty::Arrow(Box::new(Ty::Unit), Box::new(Ty::Unit));
    let mut out = Vec::new();
    out.push(("arena_unit".into(), Arena::ground_u(max).to_dot("arena_unit")));
    out.push(("arena_bool".into(), Arena::ground_b(max).to_dot("arena_bool")));
    out.push(("arena_nat".into(), Arena::ground_n(budget).to_dot("arena_nat")));
    out.push((
        "arena_replicated_unit".into(),
        Arena::ground_u(max).bang(2, max).map_err(|e| err(&e))?.to_dot("arena_replicated_unit"),
    ));
    let second_order = Ty::Arrow(Box::new(uu.clone()), Box::new(Ty::Bool));
    out.push((
        "arena_second_order".into(),
        interpret_type(&second_order, budget).map_err(|e| err(&e))?.to_dot("arena_second_order"),
    ));
    out.push((
        "copycat_bool".into(),
        copycat(&Arena::ground_b(max), max).map_err(|e| err(&e))?.to_dot("copycat_bool"),
    ));
    out.push(("identity_function".into(), den(r"\x:U. x", &[])?.to_dot("identity_function")));
    out.push(("predecessor".into(), den(r"\n:N. pred n", &[])?.to_dot("predecessor")));
    let ctx: Vec<(String, Ty)> = vec![("x".into(), Ty::Unit), ("y".into(), Ty::Unit)];
    out.push(("parallel_arguments".into(), den("x || y", &ctx)?.to_dot("parallel_arguments")));
    out.push((
        "nonvisible_function".into(),
        den(r"\f:U->U. newref r := 0 in (f (r := 1); !r)", &[])?.to_dot("nonvisible_function"),
    ));
    out.push((
        "reference_cell".into(),
        cell(0, 1, false, budget).map_err(|e| err(&e))?.to_dot("reference_cell"),
    ));
    out.push(("lock".into(), cell(0, 1, true, budget).map_err(|e| err(&e))?.to_dot("lock")));
    out.push((
        "sequential_eval".into(),
        samples::sequential_eval(max).map_err(|e| err(&e))?.to_dot("sequential_eval"),
    ));
    out.push((
        "parallel_eval".into(),
        samples::parallel_eval(max).map_err(|e| err(&e))?.to_dot("parallel_eval"),
    ));
    let fun = interpret_type(&uu, budget).map_err(|e| err(&e))?;
    out.push((
        "deadlock_tester".into(),
        samples::function_tester(&fun, budget.bang_width, false, budget)
            .map_err(|e| err(&e))?
            .to_dot("deadlock_tester"),
    ));
    Ok(out)
}

fn cmd_gallery(dir: &PathBuf, budget: &Budget) -> ExitCode {
    let cases = match gallery_cases(budget) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = std::fs::create_dir_all(dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for (name, dot) in cases {
        let path = dir.join(format!("{name}.dot"));
        if let Err(e) = std::fs::write(&path, dot) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
        println!("wrote {}", path.display());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { term, budget } => cmd_run(&term, &budget.budget()),
        Cmd::Interp { term, out, budget } => cmd_interp(&term, out, &budget.budget()),
        Cmd::Check { conditions, term, budget } => cmd_check(&conditions, &term, &budget.budget()),
        Cmd::Compare { mode, term1, term2, budget } => {
            cmd_compare(mode, &term1, &term2, &budget.budget())
        }
        Cmd::Adequacy { file, budget } => cmd_adequacy(file.as_ref(), &budget.budget()),
        Cmd::Gallery { out, budget } => cmd_gallery(&out, &budget.budget()),
    }
}
