// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::thread;

use crate::bitblast::Bvfsl;
use crate::normalizer::{check_goal_with, NoObserver, Trace, Verdict};
use crate::oracle::StepChecker;
use crate::term::Goal;

use super::{load_goal, paint, VerifyArgs, EXIT_ABORT, EXIT_OK, EXIT_REFUTED, GREEN, RED, YELLOW};

/// Residual items printed per side before eliding the rest.
const RESIDUAL_ITEMS: usize = 24;

struct Report {
    code: i32,
    text: String,
    trace: Option<(String, String, Trace)>,
}

pub(super) fn run(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let jobs = args.jobs.max(1);
    let mut reports: Vec<Report> = Vec::with_capacity(args.files.len());
    for chunk in args.files.chunks(jobs) {
        let done: Vec<Report> = thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|f| s.spawn(move || verify_one(f, args))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("verifier thread panicked"))
                .collect()
        });
        reports.extend(done);
    }
    if let Some(path) = &args.trace {
        let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut w = BufWriter::new(file);
        for r in &reports {
            if let Some((goal, verdict, trace)) = &r.trace {
                trace
                    .write_jsonl(goal, verdict, &mut w)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
        }
        w.flush().map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let mut code = EXIT_OK;
    for r in &reports {
        let sink: &mut dyn Write = if r.code == EXIT_ABORT { &mut *err } else { &mut *out };
        sink.write_all(r.text.as_bytes()).map_err(|e| e.to_string())?;
        code = code.max(r.code);
    }
    Ok(code)
}

fn verify_one(path: &Path, args: &VerifyArgs) -> Report {
    let name = path.display();
    let (goal, defs) = match load_goal(path, args.defs.as_deref()) {
        Ok(g) => g,
        Err(msg) => {
            return Report {
                code: EXIT_ABORT,
                text: format!("{msg}\n"),
                trace: None,
            }
        }
    };
    let mut checker = StepChecker::new(args.envs, args.seed);
    let (verdict, trace) = if args.check_steps {
        check_goal_with(&goal, &defs, &mut checker)
    } else {
        check_goal_with(&goal, &defs, &mut NoObserver)
    };
    let mut text = String::new();
    let mut code = verdict_code(&verdict);
    describe(&mut text, &name.to_string(), &goal, &verdict);
    if args.check_steps {
        let _ = writeln!(
            text,
            "  step checks: {} steps x {} environments, {} failures",
            checker.checked,
            args.envs,
            checker.failures.len()
        );
        for f in checker.failures.iter().take(5) {
            let _ = writeln!(text, "  unsound {} step on {}: {}", f.step.kind, f.step.side, f.message);
        }
        if !checker.failures.is_empty() {
            code = EXIT_ABORT;
        }
    }
    let label = verdict.label().to_string();
    Report {
        code,
        text,
        trace: Some((goal.name.to_string(), label, trace)),
    }
}

pub(super) fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Verified => EXIT_OK,
        Verdict::MissingHyps(_) | Verdict::NotEqual { .. } => EXIT_REFUTED,
        Verdict::Aborted(_) => EXIT_ABORT,
    }
}

fn residual(text: &mut String, side: &str, l: &Bvfsl) {
    let _ = write!(text, "  {side} residual ({} items, constant {}):", l.len(), l.constant);
    for item in l.items.iter().take(RESIDUAL_ITEMS) {
        let _ = write!(text, " {item}");
    }
    if l.len() > RESIDUAL_ITEMS {
        let _ = write!(text, " ... ({} more)", l.len() - RESIDUAL_ITEMS);
    }
    text.push('\n');
}

pub(super) fn describe(text: &mut String, name: &str, goal: &Goal, verdict: &Verdict) {
    match verdict {
        Verdict::Verified => {
            let _ = writeln!(text, "{name}: {}", paint("Verified", GREEN));
        }
        Verdict::MissingHyps(vars) => {
            let _ = writeln!(text, "{name}: {}", paint(&verdict.to_string(), YELLOW));
            let mut all = goal.integer_vars();
            all.extend(vars.iter().cloned());
            let hyps: Vec<String> = all.iter().map(|v| format!("(integerp {v})")).collect();
            let _ = writeln!(text, "  supply the missing hypotheses, e.g.:");
            let _ = writeln!(text, "  (hyps {})", hyps.join(" "));
        }
        Verdict::NotEqual { lhs, rhs } => {
            let _ = writeln!(text, "{name}: {}", paint("NotEqual", RED));
            residual(text, "lhs", lhs);
            residual(text, "rhs", rhs);
        }
        Verdict::Aborted(msg) => {
            let _ = writeln!(text, "{name}: {}: {msg}", paint("Aborted", RED));
        }
    }
}
