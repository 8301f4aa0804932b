// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use crate::term::{Symbol, Term};

/// One lambda layer: parameters mapped to the actuals they were applied to.
/// Pass-through entries (`v` to `v`) are kept so the layer reads like the
/// lambda it came from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    entries: Vec<(Symbol, Term)>,
}

impl Subst {
    pub fn new(entries: Vec<(Symbol, Term)>) -> Subst {
        Subst { entries }
    }

    pub fn entries(&self) -> &[(Symbol, Term)] {
        &self.entries
    }

    pub fn get(&self, v: &Symbol) -> Option<&Term> {
        self.entries.iter().find(|(k, _)| k == v).map(|(_, t)| t)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entries that actually change something.
    pub fn non_identity(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.entries
            .iter()
            .filter(|(k, t)| t.as_var() != Some(k))
            .map(|(k, t)| (k, t))
    }
}

/// Stack of substitutions; the last element is the innermost layer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubstContext {
    pub layers: Vec<Subst>,
}

impl SubstContext {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn pop(&mut self) -> Option<Subst> {
        self.layers.pop()
    }

    /// Rebuild the lambda nest around `inner`.
    pub fn wrap(&self, inner: Term) -> Term {
        self.layers.iter().rev().fold(inner, |body, s| {
            let (params, actuals) = s.entries.iter().cloned().unzip();
            Term::LamApp {
                params,
                body: Box::new(body),
                actuals,
            }
        })
    }
}

/// Dive through nested lambda applications to the innermost term, collecting
/// one substitution per layer.
pub fn peel_lambdas(t: Term) -> (Term, SubstContext) {
    let mut ctx = SubstContext::default();
    let mut cur = t;
    loop {
        match cur {
            Term::LamApp { params, body, actuals } => {
                ctx.layers.push(Subst::new(params.into_iter().zip(actuals).collect()));
                cur = *body;
            }
            inner => return (inner, ctx),
        }
    }
}

/// Variables whose integer-ness the result depends on.
///
/// Every operator in the language yields an integer on integer inputs, so a
/// compound term is discharged by its free variables; only those are kept.
/// When a substitution replaces a variable, the variable leaves the ledger
/// and the free variables of its replacement enter it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub needed: BTreeSet<Symbol>,
}

impl Ledger {
    pub fn note_term(&mut self, t: &Term) {
        self.needed.extend(t.free_vars());
    }

    pub fn note_var(&mut self, v: &Symbol) {
        if !self.needed.contains(v) {
            self.needed.insert(v.clone());
        }
    }

    /// Record that `v` was replaced by `t`.
    pub fn substitute(&mut self, v: &Symbol, t: &Term) {
        if self.needed.remove(v) {
            self.note_term(t);
        }
    }

    /// Apply a whole layer at once. Entries are simultaneous, so a swap
    /// `(a b) := (b a)` must not be applied one entry at a time.
    pub fn apply(&mut self, s: &Subst) {
        let mut added = BTreeSet::new();
        let mut removed = Vec::new();
        for (v, t) in s.non_identity() {
            if self.needed.contains(v) {
                removed.push(v.clone());
                added.extend(t.free_vars());
            }
        }
        for v in removed {
            self.needed.remove(&v);
        }
        self.needed.extend(added);
    }

    /// Needed variables not covered by `assumed`.
    pub fn missing(&self, assumed: &BTreeSet<Symbol>) -> Vec<Symbol> {
        self.needed.difference(assumed).cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, sym};

    #[test]
    fn lambda_free_term_has_empty_context() {
        let (inner, ctx) = peel_lambdas(Term::var("x"));
        assert_eq!(inner, Term::var("x"));
        assert!(ctx.is_empty());
    }

    #[test]
    fn single_layer() {
        let (inner, ctx) = peel_lambdas(parse_term("((lambda (a) a) '3)").unwrap());
        assert_eq!(inner, Term::var("a"));
        assert_eq!(ctx.layers, vec![Subst::new(vec![(sym("a"), Term::nat(3))])]);
    }

    #[test]
    fn wrap_inverts_peel() {
        let t = parse_term("((lambda (a x) ((lambda (b) (+ a b)) x)) y y)").unwrap();
        let (inner, ctx) = peel_lambdas(t.clone());
        assert_eq!(ctx.depth(), 2);
        assert_eq!(ctx.wrap(inner), t);
    }

    #[test]
    fn identity_entries_are_filtered() {
        let s = Subst::new(vec![(sym("a"), Term::var("a")), (sym("b"), Term::var("c"))]);
        let moved: Vec<_> = s.non_identity().map(|(k, _)| k.to_string()).collect();
        assert_eq!(moved, ["b"]);
    }

    #[test]
    fn ledger_follows_substitutions() {
        let mut l = Ledger::default();
        l.note_term(&parse_term("(+ a b)").unwrap());
        l.substitute(&sym("a"), &parse_term("(logxor p q)").unwrap());
        l.substitute(&sym("z"), &parse_term("r").unwrap());
        let names: Vec<_> = l.needed.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["b", "p", "q"]);
        let assumed: BTreeSet<_> = [sym("b"), sym("p")].into_iter().collect();
        assert_eq!(l.missing(&assumed), vec![sym("q")]);
    }

    #[test]
    fn ledger_layer_is_simultaneous() {
        let mut l = Ledger::default();
        l.note_var(&sym("a"));
        l.apply(&Subst::new(vec![
            (sym("a"), Term::var("b")),
            (sym("b"), Term::var("a")),
        ]));
        let names: Vec<_> = l.needed.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["b"]);
    }
}
