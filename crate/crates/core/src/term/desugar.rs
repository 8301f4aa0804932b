// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use super::{Symbol, Term};

/// Replace every `let*` by nested lambda applications, one per binding.
///
/// Each layer binds the new variable first, followed by pass-through
/// bindings (`v` to `v`) for every other variable free in the rest of the
/// form, so each lambda is closed. `(let* ((a x)) a)` becomes
/// `((lambda (a) a) x)`.
pub fn desugar_let(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Nat(_) => t.clone(),
        Term::App(op, args) => Term::App(*op, args.iter().map(desugar_let).collect()),
        Term::Call(name, args) => Term::Call(name.clone(), args.iter().map(desugar_let).collect()),
        Term::LamApp { params, body, actuals } => Term::LamApp {
            params: params.clone(),
            body: Box::new(desugar_let(body)),
            actuals: actuals.iter().map(desugar_let).collect(),
        },
        Term::Let { bindings, body } => {
            let mut inner = desugar_let(body);
            let mut free: BTreeSet<Symbol> = inner.free_vars();
            for (v, e) in bindings.iter().rev() {
                let bound = desugar_let(e);
                let pass: Vec<Symbol> = free.iter().filter(|x| *x != v).cloned().collect();
                let mut params = Vec::with_capacity(pass.len() + 1);
                params.push(v.clone());
                params.extend(pass.iter().cloned());
                let mut actuals = Vec::with_capacity(pass.len() + 1);
                actuals.push(bound.clone());
                actuals.extend(pass.iter().cloned().map(Term::Var));
                free = bound.free_vars();
                free.extend(pass);
                inner = Term::LamApp {
                    params,
                    body: Box::new(inner),
                    actuals,
                };
            }
            inner
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, sym};

    #[test]
    fn single_binding() {
        let t = desugar_let(&parse_term("(let* ((a x)) a)").unwrap());
        assert_eq!(
            t,
            Term::LamApp {
                params: vec![sym("a")],
                body: Box::new(Term::var("a")),
                actuals: vec![Term::var("x")],
            }
        );
    }

    #[test]
    fn inner_layer_rebinds_outer_variables_to_themselves() {
        let t = desugar_let(&parse_term("(let* ((a pp0) (b (+ a pp0))) (+ b pp0))").unwrap());
        let expected = parse_term("((lambda (a pp0) ((lambda (b pp0) (+ b pp0)) (+ a pp0) pp0)) pp0 pp0)").unwrap();
        assert_eq!(t, expected);
    }

    #[test]
    fn empty_let_is_its_body() {
        assert_eq!(desugar_let(&parse_term("(let* () x)").unwrap()), Term::var("x"));
    }

    #[test]
    fn nested_lets_inside_bindings_are_removed() {
        let t = desugar_let(&parse_term("(let* ((a (let* ((b x)) b))) (ash a 1))").unwrap());
        assert!(!t.contains_let());
    }
}
