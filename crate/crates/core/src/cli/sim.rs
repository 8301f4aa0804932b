// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::io::Write;

use crate::bitblast::{infer_width, peel_lambdas};
use crate::oracle::{check_equiv, Mode, Outcome};
use crate::term::{desugar_let, expand_calls, sym, Defs, Goal, Symbol};

use super::{load_goal, paint, ModeArg, SimArgs, EXIT_OK, EXIT_REFUTED, GREEN, RED};

fn goal_width(goal: &Goal, defs: &Defs) -> Option<u32> {
    let t = expand_calls(&goal.lhs, defs, &goal.expand).ok()?;
    let (inner, _) = peel_lambdas(desugar_let(&t));
    infer_width(&inner).ok().and_then(|w| u32::try_from(w).ok())
}

fn parse_widths(specs: &[String]) -> Result<(BTreeMap<Symbol, u32>, Option<u32>), String> {
    let mut named = BTreeMap::new();
    let mut default = None;
    for s in specs {
        let bad = || format!("bad --var-width {s:?}; expected NAME=W or W");
        match s.split_once('=') {
            Some((name, w)) => {
                named.insert(sym(name.trim()), w.trim().parse().map_err(|_| bad())?);
            }
            None => default = Some(s.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok((named, default))
}

pub(super) fn run(args: &SimArgs, out: &mut dyn Write) -> Result<i32, String> {
    let (goal, defs) = load_goal(&args.file, args.defs.as_deref())?;
    let (named, bare) = parse_widths(&args.var_width)?;
    let mut free = goal.lhs.free_vars();
    free.extend(goal.rhs.free_vars());
    if let Some(v) = named.keys().find(|v| !free.contains(*v)) {
        return Err(format!("--var-width names {v}, which is not a variable of the goal"));
    }
    let default = match args.default_width.or(bare) {
        Some(w) => w,
        None => goal_width(&goal, &defs).ok_or("cannot infer the goal width; pass --default-width")?,
    };
    let vars: Vec<(Symbol, u32)> = free
        .iter()
        .map(|v| (v.clone(), named.get(v).copied().unwrap_or(default)))
        .collect();
    let mode = match args.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Random => Mode::Random {
            trials: args.trials,
            seed: args.seed.ok_or("random mode needs --seed")?,
        },
    };
    let outcome = check_equiv(&goal.lhs, &goal.rhs, &vars, mode, &defs).map_err(|e| e.to_string())?;
    let io = |e: std::io::Error| e.to_string();
    match outcome {
        Outcome::Equivalent { checked } => {
            writeln!(out, "{} ({checked} cases)", paint("Equivalent", GREEN)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Outcome::Refuted(cex) => {
            writeln!(out, "{}", paint("Counterexample", RED)).map_err(io)?;
            for (v, val) in &cex.env {
                writeln!(out, "  {v} = {val}").map_err(io)?;
            }
            writeln!(out, "  lhs = {}", cex.lhs).map_err(io)?;
            writeln!(out, "  rhs = {}", cex.rhs).map_err(io)?;
            Ok(EXIT_REFUTED)
        }
    }
}
