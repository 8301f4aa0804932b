// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::io::Write;

use crate::bitblast::Bvfsl;
use crate::normalizer::{check_goal, SideSummary, StepKind};
use crate::term::print_term;

use super::verify::{describe, verdict_code};
use super::{load_goal, ExplainArgs};

fn listing(text: &mut String, l: &Bvfsl, limit: usize) {
    let _ = write!(text, "   ");
    for item in l.items.iter().take(limit) {
        let _ = write!(text, " {item}");
    }
    if l.len() > limit {
        let _ = write!(text, " ... ({} more)", l.len() - limit);
    }
    if l.constant != 0u32.into() {
        let _ = write!(text, " + {}", l.constant);
    }
    text.push('\n');
}

fn side_header(text: &mut String, label: &str, s: &SideSummary, limit: usize) {
    let mut inner = print_term(&s.inner);
    if inner.len() > 200 {
        inner.truncate(200);
        inner.push_str(" ...");
    }
    let _ = writeln!(text, "{label}: {} lambda layers, innermost term {inner}", s.layers);
    let _ = writeln!(
        text,
        "  expansion: {} addends x {} bits = {} items",
        s.addends,
        s.width,
        s.initial.len()
    );
    listing(text, &s.initial, limit);
}

pub(super) fn run(args: &ExplainArgs, out: &mut dyn Write) -> Result<i32, String> {
    let (goal, defs) = load_goal(&args.file, args.defs.as_deref())?;
    let (verdict, trace) = check_goal(&goal, &defs);
    let mut text = String::new();
    let _ = writeln!(text, "goal {}", goal.name);
    if let Some(s) = &trace.lhs {
        side_header(&mut text, "lhs", s, args.items);
    }
    if let Some(s) = &trace.rhs {
        side_header(&mut text, "rhs", s, args.items);
    }
    for (i, st) in trace.steps.iter().enumerate() {
        if st.kind == StepKind::Expand {
            continue;
        }
        let _ = writeln!(
            text,
            "{:>5} {} {:<12} {:>6} -> {:<6} depth {:<4} {}",
            i,
            st.side,
            st.kind.to_string(),
            st.size_before,
            st.size_after,
            st.depth,
            st.detail
        );
    }
    for (label, s) in [("lhs", &trace.lhs), ("rhs", &trace.rhs)] {
        if let Some(s) = s {
            let _ = writeln!(text, "{label} normal form: {} items", s.normal.len());
            listing(&mut text, &s.normal, args.items);
        }
    }
    let _ = writeln!(
        text,
        "add3 steps: {}, top-bit steps: {}, max size {}, bound {}",
        trace.count(StepKind::Add3),
        trace.count(StepKind::TopBitAdd3),
        trace.max_size(),
        trace.size_bound().map_or("-".to_string(), |b| b.to_string())
    );
    describe(&mut text, &args.file.display().to_string(), &goal, &verdict);
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(verdict_code(&verdict))
}
