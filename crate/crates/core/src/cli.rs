//! The `fraenkel-kit` command line.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::eval::{eval_nominal, Bounds};
use crate::logic::{parse, Assignment, Formula};
use crate::nominal::FinSuppPredicate;
use crate::oracle::{eval_finite, FiniteStructure};
use crate::partition::{enumerate_cells, representative, SupportFrame};
use crate::replay::{
    check_not_lo1, refute_linear_order, replay, resolve_formula, run_suite, ReplayOptions, SuiteOptions,
};

#[derive(Debug, Parser)]
#[command(name = "fraenkel-kit", version, about = "Evaluate and replay constructions in the basic Fraenkel model")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a closed formula in the permutation model.
    Eval {
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate a closed formula in the full finite structure of size N.
    Oracle {
        #[arg(long)]
        size: u32,
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a named batch of checks.
    Suite {
        name: String,
        #[arg(long, default_value_t = 3)]
        max_q: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build and verify a selector for a choice instance.
    Replay {
        /// Catalog key (dx, not-dx, singleton, other, dx-or-eq) or a formula H(x, D).
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Verify the empty selector instead of the constructed one.
        #[arg(long)]
        sabotage: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Refute a binary predicate as a linear order, or run the full check.
    Refute {
        /// A binary predicate as JSON; without it every predicate up to --max-q is checked.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_q: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List the cells of I^n for a frame of size q.
    Cells {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    pub formula: Option<String>,
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 1)]
    pub max_extra_fresh: usize,
    #[arg(long, default_value_t = 2)]
    pub max_support: usize,
}

impl BoundArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_extra_fresh: self.max_extra_fresh,
            max_support: self.max_support,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub json: bool,
    /// Include wall-clock times; reports are then no longer reproducible.
    #[arg(long)]
    pub timings: bool,
}

/// Exit status and the text to print on standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn new(passed: bool, report: String) -> Self {
        Outcome {
            code: if passed { 0 } else { 1 },
            report,
        }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            code: 2,
            report: msg.into(),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn atoms(t: &[crate::atoms::Atom]) -> String {
    let ids: Vec<String> = t.iter().map(|a| a.to_string()).collect();
    format!("({})", ids.join(", "))
}

fn load_formula(args: &FormulaArgs) -> Result<Formula, Outcome> {
    let text = match (&args.formula, &args.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Outcome::usage(format!("cannot read {}: {e}\n", path.display())))?,
        (None, None) => return Err(Outcome::usage("a formula is required\n")),
    };
    parse(&text).map_err(|e| Outcome::usage(format!("{e}\n")))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                report: e.render().to_string(),
            };
        }
    };
    match execute(cfg.command) {
        Ok(o) | Err(o) => o,
    }
}

fn execute(cmd: Command) -> Result<Outcome, Outcome> {
    match cmd {
        Command::Eval { formula, bounds, out } => {
            let f = load_formula(&formula)?;
            let b = bounds.bounds();
            let v = eval_nominal(&f, &Assignment::new(), b).map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let report = if out.json {
                to_json(&json!({ "formula": f.to_string(), "verdict": v, "bounds": b }))
            } else {
                format!("{v}\n")
            };
            Ok(Outcome::new(v.is_true(), report))
        }
        Command::Oracle { size, formula, out } => {
            let s = FiniteStructure::new(size).map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let f = load_formula(&formula)?;
            let v = eval_finite(&s, &f, &Assignment::new()).map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let report = if out.json {
                to_json(&json!({ "formula": f.to_string(), "size": size, "verdict": v }))
            } else {
                format!("{v}\n")
            };
            Ok(Outcome::new(v, report))
        }
        Command::Suite {
            name,
            max_q,
            seed,
            bounds,
            out,
        } => {
            let opts = SuiteOptions {
                seed,
                bounds: bounds.bounds(),
                max_q,
                timings: out.timings,
            };
            let r = run_suite(&name, opts).map_err(|e| match e {
                Error::UnknownSuite(_) => Outcome::usage(format!(
                    "{e}; known suites: {}\n",
                    crate::replay::SUITES.join(", ")
                )),
                e => Outcome::new(false, format!("{e}\n")),
            })?;
            let report = if out.json {
                to_json(&r)
            } else {
                let mut s = String::new();
                for c in &r.cases {
                    let verdict = if c.verdict == crate::replay::Verdict::Pass { "pass" } else { "FAIL" };
                    let _ = write!(s, "{verdict} {}", c.name);
                    if let Some(ms) = c.millis {
                        let _ = write!(s, " ({ms} ms)");
                    }
                    s.push('\n');
                    if c.verdict == crate::replay::Verdict::Fail {
                        if let Some(w) = &c.witness {
                            let _ = writeln!(s, "  {w}");
                        }
                    }
                }
                let _ = writeln!(s, "{}: {}", r.suite, if r.passed() { "pass" } else { "fail" });
                s
            };
            Ok(Outcome::new(r.passed(), report))
        }
        Command::Replay {
            h,
            n,
            m,
            sabotage,
            seed,
            bounds,
            out,
        } => {
            let (formula, entry) = resolve_formula(&h).map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let n = n.or(entry.map(|e| e.n)).unwrap_or(1);
            let m = m.or(entry.map(|e| e.m)).unwrap_or(1);
            let opts = ReplayOptions {
                bounds: bounds.bounds(),
                seed,
                sabotage,
                timings: out.timings,
            };
            let r = replay(&formula, &Assignment::new(), n, m, opts).map_err(|e| match e {
                Error::ReservedVariable(_) | Error::ZeroArity => Outcome::usage(format!("{e}\n")),
                e => Outcome::new(false, format!("{e}\n")),
            })?;
            let report = if out.json {
                to_json(&r)
            } else {
                let mut s = String::new();
                let _ = writeln!(s, "H = {}  (n={}, m={})", r.h, r.n, r.m);
                let _ = writeln!(s, "P = {}  mu = {}  P0 = {}", r.support, atoms(&r.mu), r.p0);
                for c in &r.cells {
                    let _ = writeln!(s, "  {}  rep {}  witness {}", c.cell, atoms(&c.representative), c.witness);
                }
                let _ = writeln!(s, "sigma0 = {}", r.sigma0);
                let _ = writeln!(s, "sigma = {}", r.sigma);
                let _ = writeln!(
                    s,
                    "antecedent {}  consequent {}  stabilizer {}",
                    r.verdicts.antecedent, r.verdicts.consequent, r.verdicts.stabilizer
                );
                let _ = writeln!(s, "{}", if r.passed { "pass" } else { "fail" });
                s
            };
            Ok(Outcome::new(r.passed, report))
        }
        Command::Refute { tau, max_q, out } => match tau {
            Some(text) => {
                let tau: FinSuppPredicate = serde_json::from_str(&text)
                    .map_err(|e| Outcome::usage(format!("bad predicate: {e}\n")))?;
                let r = refute_linear_order(&tau).map_err(|e| Outcome::usage(format!("{e}\n")))?;
                let report = if out.json {
                    to_json(&r)
                } else {
                    format!(
                        "({}, {}) related both ways: {}; {:?} fails\n",
                        r.a, r.b, r.related, r.violated
                    )
                };
                Ok(Outcome::new(true, report))
            }
            None => {
                let r = check_not_lo1(max_q).map_err(|e| Outcome::new(false, format!("{e}\n")))?;
                let report = if out.json {
                    to_json(&r)
                } else {
                    format!("{}\n", r.conclusion)
                };
                Ok(Outcome::new(r.passed, report))
            }
        },
        Command::Cells { n, q, out } => {
            let frame = SupportFrame::from_ids(&(0..q as u32).collect::<Vec<_>>());
            let mu = frame.fresh(n);
            let cells = enumerate_cells(n, q).map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let rows = cells
                .iter()
                .map(|c| Ok((c.to_string(), representative(&frame, &mu, c)?)))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(|e| Outcome::usage(format!("{e}\n")))?;
            let report = if out.json {
                to_json(&json!({
                    "n": n,
                    "frame": frame,
                    "cells": rows.iter().map(|(c, r)| json!({ "cell": c, "representative": r })).collect::<Vec<_>>(),
                }))
            } else {
                let mut s = String::new();
                for (c, r) in &rows {
                    let _ = writeln!(s, "{c}  {}", atoms(r));
                }
                let _ = writeln!(s, "{} cells", rows.len());
                s
            };
            Ok(Outcome::new(true, report))
        }
    }
}
