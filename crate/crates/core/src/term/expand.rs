// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use super::{Defs, Symbol, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpandError {
    #[error("unexpandable function {0}")]
    Unexpandable(String),
    #[error("function {name} applied to {got} arguments, expected {expected}")]
    Arity { name: String, got: usize, expected: usize },
    #[error("recursive expansion of {0}")]
    Recursive(String),
}

/// Inline every call named in `expand` as a lambda application of the
/// definition's body. Any other call is an error: the verifier cannot see
/// through it.
pub fn expand_calls(t: &Term, defs: &Defs, expand: &[Symbol]) -> Result<Term, ExpandError> {
    expand_rec(t, defs, expand, &mut Vec::new())
}

fn expand_rec(t: &Term, defs: &Defs, expand: &[Symbol], active: &mut Vec<Symbol>) -> Result<Term, ExpandError> {
    let map = |ts: &[Term], active: &mut Vec<Symbol>| {
        ts.iter()
            .map(|a| expand_rec(a, defs, expand, active))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(match t {
        Term::Var(_) | Term::Nat(_) => t.clone(),
        Term::App(op, args) => Term::App(*op, map(args, active)?),
        Term::LamApp { params, body, actuals } => Term::LamApp {
            params: params.clone(),
            body: Box::new(expand_rec(body, defs, expand, active)?),
            actuals: map(actuals, active)?,
        },
        Term::Let { bindings, body } => Term::Let {
            bindings: bindings
                .iter()
                .map(|(v, e)| Ok((v.clone(), expand_rec(e, defs, expand, active)?)))
                .collect::<Result<Vec<_>, ExpandError>>()?,
            body: Box::new(expand_rec(body, defs, expand, active)?),
        },
        Term::Call(name, args) => {
            let def = match defs.get(name) {
                Some(def) if expand.contains(name) => def,
                _ => return Err(ExpandError::Unexpandable(name.to_string())),
            };
            if def.params.len() != args.len() {
                return Err(ExpandError::Arity {
                    name: name.to_string(),
                    got: args.len(),
                    expected: def.params.len(),
                });
            }
            if active.contains(name) {
                return Err(ExpandError::Recursive(name.to_string()));
            }
            let actuals = map(args, active)?;
            active.push(name.clone());
            let body = expand_rec(&def.body, defs, expand, active);
            active.pop();
            Term::LamApp {
                params: def.params.clone(),
                body: Box::new(body?),
                actuals,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_goal_file, parse_term, sym};

    fn defs(text: &str) -> Defs {
        parse_goal_file(text).unwrap().def_map()
    }

    #[test]
    fn expands_listed_calls() {
        let d = defs("(define (f a b) (logxor a b))");
        let t = expand_calls(&parse_term("(f x '1)").unwrap(), &d, &[sym("f")]).unwrap();
        assert_eq!(t, parse_term("((lambda (a b) (logxor a b)) x '1)").unwrap());
    }

    #[test]
    fn variables_are_untouched() {
        assert_eq!(
            expand_calls(&Term::var("x"), &Defs::new(), &[]).unwrap(),
            Term::var("x")
        );
    }

    #[test]
    fn unlisted_calls_are_errors() {
        let d = defs("(define (f a) a)");
        let e = expand_calls(&parse_term("(f x)").unwrap(), &d, &[]).unwrap_err();
        assert_eq!(e.to_string(), "unexpandable function f");
    }

    #[test]
    fn arity_and_recursion() {
        let d = defs("(define (f a) a) (define (g a) (g a))");
        let e = expand_calls(&parse_term("(f x y)").unwrap(), &d, &[sym("f")]).unwrap_err();
        assert!(matches!(e, ExpandError::Arity { .. }));
        let e = expand_calls(&parse_term("(g x)").unwrap(), &d, &[sym("g")]).unwrap_err();
        assert_eq!(e, ExpandError::Recursive("g".into()));
    }

    #[test]
    fn nested_definitions_expand_transitively() {
        let d = defs("(define (f a) (ash a 1)) (define (g b) (f (f b)))");
        let t = expand_calls(&parse_term("(g x)").unwrap(), &d, &[sym("f"), sym("g")]).unwrap();
        let printed = format!("{t}");
        assert!(!printed.contains("(f ") && !printed.contains("(g "), "{printed}");
    }
}
