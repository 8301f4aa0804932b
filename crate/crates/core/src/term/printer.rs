// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{GoalFile, HypKind, Term};

/// Print a term on one line. Right-nested chains of an associative operator
/// are printed in their variadic surface form, which the reader folds back to
/// the identical tree.
pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

pub(crate) fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Nat(n) => {
            let _ = write!(out, "'{n}");
        }
        Term::App(op, args) => match op.variadic_name() {
            Some(name) => {
                out.push('(');
                out.push_str(name);
                let mut cur = t;
                // walk the right spine iteratively; sums can be thousands deep
                while let Term::App(o, a) = cur {
                    if o != op {
                        break;
                    }
                    out.push(' ');
                    write_term(out, &a[0]);
                    cur = &a[1];
                }
                out.push(' ');
                write_term(out, cur);
                out.push(')');
            }
            None => {
                out.push('(');
                out.push_str(op.name());
                for a in args {
                    out.push(' ');
                    write_term(out, a);
                }
                out.push(')');
            }
        },
        Term::Call(name, args) => {
            out.push('(');
            out.push_str(name);
            for a in args {
                out.push(' ');
                write_term(out, a);
            }
            out.push(')');
        }
        Term::LamApp { params, body, actuals } => {
            out.push_str("((lambda (");
            push_joined(out, params.iter().map(|p| &**p));
            out.push_str(") ");
            write_term(out, body);
            out.push(')');
            for a in actuals {
                out.push(' ');
                write_term(out, a);
            }
            out.push(')');
        }
        Term::Let { bindings, body } => {
            out.push_str("(let* (");
            for (i, (v, e)) in bindings.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push('(');
                out.push_str(v);
                out.push(' ');
                write_term(out, e);
                out.push(')');
            }
            out.push_str(") ");
            write_term(out, body);
            out.push(')');
        }
    }
}

fn push_joined<'a>(out: &mut String, items: impl Iterator<Item = &'a str>) {
    for (i, s) in items.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s);
    }
}

/// Render a goal file in the layout the generators emit: one `let*` binding
/// per line inside definitions, one clause per line in the goal.
pub fn print_goal_file(file: &GoalFile) -> String {
    let mut out = String::new();
    for def in &file.defs {
        out.push_str("(define (");
        out.push_str(&def.name);
        for p in &def.params {
            out.push(' ');
            out.push_str(p);
        }
        out.push_str(")\n  ");
        match &def.body {
            Term::Let { bindings, body } if !bindings.is_empty() => {
                out.push_str("(let* (");
                for (i, (v, e)) in bindings.iter().enumerate() {
                    if i > 0 {
                        out.push_str("\n         ");
                    }
                    out.push('(');
                    out.push_str(v);
                    out.push(' ');
                    write_term(&mut out, e);
                    out.push(')');
                }
                out.push_str(")\n    ");
                write_term(&mut out, body);
                out.push(')');
            }
            body => write_term(&mut out, body),
        }
        out.push_str(")\n\n");
    }
    if let Some(goal) = &file.goal {
        let pad = "      ";
        let _ = write!(out, "(goal (name {})\n{pad}(hyps", goal.name);
        for (i, h) in goal.hyps.iter().enumerate() {
            if i > 0 && i % 8 == 0 {
                out.push('\n');
                out.push_str(pad);
                out.push_str("     ");
            }
            match h.kind {
                HypKind::Integer => {
                    let _ = write!(out, " (integerp {})", h.var);
                }
            }
        }
        out.push_str(")\n");
        let _ = writeln!(out, "{pad}(lhs {})", print_term(&goal.lhs));
        let _ = writeln!(out, "{pad}(rhs {})", print_term(&goal.rhs));
        out.push_str(pad);
        out.push_str("(expand (");
        push_joined(&mut out, goal.expand.iter().map(|e| &**e));
        out.push_str(")))\n");
    }
    out
}
