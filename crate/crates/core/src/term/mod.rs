// SPDX-License-Identifier: Apache-2.0

//! The RTL-flavoured expression language: terms, user definitions and goals.
//!
//! Terms are immutable trees. Variadic surface operators (`logxor`, `logand`,
//! `logior`, `+`) are stored as right-nested binary applications, which is the
//! shape every later pass pattern-matches on.

mod desugar;
mod expand;
mod printer;
mod reader;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

pub use desugar::desugar_let;
pub use expand::{expand_calls, ExpandError};
pub use printer::{print_goal_file, print_term};
pub use reader::{parse_goal_file, parse_term, ParseError};

/// Interned-by-sharing variable or function name.
pub type Symbol = Arc<str>;

pub fn sym(name: &str) -> Symbol {
    Arc::from(name)
}

/// Built-in functions with fixed arity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Bits,
    Setbits,
    Bitn,
    Logxor,
    Logand,
    Logior,
    Plus,
    Ash,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Bits => 3,
            Op::Setbits => 5,
            Op::Bitn | Op::Ash | Op::Logxor | Op::Logand | Op::Logior | Op::Plus => 2,
        }
    }

    /// Name of the binary (translated) form.
    pub fn name(self) -> &'static str {
        match self {
            Op::Bits => "bits",
            Op::Setbits => "setbits",
            Op::Bitn => "bitn",
            Op::Logxor => "binary-logxor",
            Op::Logand => "binary-logand",
            Op::Logior => "binary-logior",
            Op::Plus => "binary-+",
            Op::Ash => "ash",
        }
    }

    /// Name of the variadic surface macro, for the associative operators.
    pub fn variadic_name(self) -> Option<&'static str> {
        match self {
            Op::Logxor => Some("logxor"),
            Op::Logand => Some("logand"),
            Op::Logior => Some("logior"),
            Op::Plus => Some("+"),
            _ => None,
        }
    }

    pub fn from_binary_name(name: &str) -> Option<Op> {
        Some(match name {
            "bits" => Op::Bits,
            "setbits" => Op::Setbits,
            "bitn" => Op::Bitn,
            "ash" => Op::Ash,
            "binary-logxor" => Op::Logxor,
            "binary-logand" => Op::Logand,
            "binary-logior" => Op::Logior,
            "binary-+" => Op::Plus,
            _ => return None,
        })
    }

    pub fn from_variadic_name(name: &str) -> Option<Op> {
        Some(match name {
            "logxor" => Op::Logxor,
            "logand" => Op::Logand,
            "logior" => Op::Logior,
            "+" => Op::Plus,
            _ => return None,
        })
    }
}

/// Names that can never be used as variables or user functions.
pub fn is_reserved(name: &str) -> bool {
    Op::from_binary_name(name).is_some()
        || Op::from_variadic_name(name).is_some()
        || matches!(name, "lambda" | "let*" | "define" | "goal")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    Nat(BigUint),
    App(Op, Vec<Term>),
    LamApp {
        params: Vec<Symbol>,
        body: Box<Term>,
        actuals: Vec<Term>,
    },
    /// Reference to a user definition; only `expand_calls` can see through it.
    Call(Symbol, Vec<Term>),
    /// Surface `let*`; removed by [`desugar_let`].
    Let {
        bindings: Vec<(Symbol, Term)>,
        body: Box<Term>,
    },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn nat(value: u64) -> Term {
        Term::Nat(BigUint::from(value))
    }

    pub fn app(op: Op, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), op.arity(), "arity of {}", op.name());
        Term::App(op, args)
    }

    pub fn bits(x: Term, hi: u64, lo: u64) -> Term {
        Term::app(Op::Bits, vec![x, Term::nat(hi), Term::nat(lo)])
    }

    pub fn bitn(x: Term, n: u64) -> Term {
        Term::app(Op::Bitn, vec![x, Term::nat(n)])
    }

    pub fn ash(x: Term, k: u64) -> Term {
        Term::app(Op::Ash, vec![x, Term::nat(k)])
    }

    pub fn setbits(base: Term, width: u64, hi: u64, lo: u64, value: Term) -> Term {
        Term::app(
            Op::Setbits,
            vec![base, Term::nat(width), Term::nat(hi), Term::nat(lo), value],
        )
    }

    /// Right-nested fold of an associative operator. Panics on fewer than
    /// two operands.
    pub fn chain(op: Op, operands: Vec<Term>) -> Term {
        assert!(operands.len() >= 2, "chain needs at least two operands");
        let mut iter = operands.into_iter().rev();
        let mut acc = iter.next().unwrap();
        for t in iter {
            acc = Term::App(op, vec![t, acc]);
        }
        acc
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Term::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Symbol> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Free variables, in name order.
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut HashMap::new(), &mut out);
        out
    }

    /// True if any `LamApp`, `Let` or `Call` node occurs anywhere.
    pub fn has_binders_or_calls(&self) -> bool {
        match self {
            Term::Var(_) | Term::Nat(_) => false,
            Term::App(_, args) => args.iter().any(Term::has_binders_or_calls),
            Term::LamApp { .. } | Term::Let { .. } | Term::Call(..) => true,
        }
    }

    pub fn contains_let(&self) -> bool {
        match self {
            Term::Var(_) | Term::Nat(_) => false,
            Term::App(_, args) | Term::Call(_, args) => args.iter().any(Term::contains_let),
            Term::LamApp { body, actuals, .. } => body.contains_let() || actuals.iter().any(Term::contains_let),
            Term::Let { .. } => true,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Nat(_) => 1,
            Term::App(_, args) | Term::Call(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::LamApp { body, actuals, .. } => 1 + body.size() + actuals.iter().map(Term::size).sum::<usize>(),
            Term::Let { bindings, body } => 1 + body.size() + bindings.iter().map(|(_, e)| e.size()).sum::<usize>(),
        }
    }
}

fn collect_free(t: &Term, bound: &mut HashMap<Symbol, usize>, out: &mut BTreeSet<Symbol>) {
    fn bind(bound: &mut HashMap<Symbol, usize>, v: &Symbol) {
        *bound.entry(v.clone()).or_insert(0) += 1;
    }
    fn unbind(bound: &mut HashMap<Symbol, usize>, v: &Symbol) {
        if let Some(n) = bound.get_mut(v) {
            *n -= 1;
            if *n == 0 {
                bound.remove(v);
            }
        }
    }
    match t {
        Term::Var(v) => {
            if !bound.contains_key(v) {
                out.insert(v.clone());
            }
        }
        Term::Nat(_) => {}
        Term::App(_, args) | Term::Call(_, args) => {
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Term::LamApp { params, body, actuals } => {
            for a in actuals {
                collect_free(a, bound, out);
            }
            params.iter().for_each(|p| bind(bound, p));
            collect_free(body, bound, out);
            params.iter().for_each(|p| unbind(bound, p));
        }
        Term::Let { bindings, body } => {
            for (v, e) in bindings {
                collect_free(e, bound, out);
                bind(bound, v);
            }
            collect_free(body, bound, out);
            bindings.iter().for_each(|(v, _)| unbind(bound, v));
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FnDef {
    pub name: Symbol,
    pub params: Vec<Symbol>,
    pub body: Term,
}

pub type Defs = BTreeMap<Symbol, FnDef>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HypKind {
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyp {
    pub kind: HypKind,
    pub var: Symbol,
}

impl Hyp {
    pub fn integer(var: Symbol) -> Hyp {
        Hyp {
            kind: HypKind::Integer,
            var,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub name: Symbol,
    pub hyps: Vec<Hyp>,
    pub lhs: Term,
    pub rhs: Term,
    pub expand: Vec<Symbol>,
}

impl Goal {
    /// Variables carrying an `integerp` hypothesis.
    pub fn integer_vars(&self) -> BTreeSet<Symbol> {
        self.hyps
            .iter()
            .filter(|h| h.kind == HypKind::Integer)
            .map(|h| h.var.clone())
            .collect()
    }

    pub fn validate(&self, defs: &Defs) -> Result<(), WellFormedError> {
        for name in &self.expand {
            if !defs.contains_key(name) {
                return Err(WellFormedError::UnknownExpand(name.to_string()));
            }
        }
        check_calls(&self.lhs, defs)?;
        check_calls(&self.rhs, defs)
    }
}

/// A parsed goal file: definitions in order plus the (optional) goal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoalFile {
    pub defs: Vec<FnDef>,
    pub goal: Option<Goal>,
}

impl GoalFile {
    pub fn def_map(&self) -> Defs {
        self.defs.iter().map(|d| (d.name.clone(), d.clone())).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WellFormedError {
    #[error("duplicate parameter {0}")]
    DuplicateParam(String),
    #[error("definition {name}: free variable {var} is not a parameter")]
    FreeVarInDef { name: String, var: String },
    #[error("expand hint names unknown function {0}")]
    UnknownExpand(String),
    #[error("call to {name} with {got} arguments, expected {expected}")]
    CallArity { name: String, got: usize, expected: usize },
    #[error("call to undefined function {0}")]
    UnknownFunction(String),
    #[error("{0} is a reserved name")]
    Reserved(String),
}

impl FnDef {
    pub fn new(name: Symbol, params: Vec<Symbol>, body: Term) -> Result<FnDef, WellFormedError> {
        if is_reserved(&name) {
            return Err(WellFormedError::Reserved(name.to_string()));
        }
        let mut seen = BTreeSet::new();
        for p in &params {
            if !seen.insert(p.clone()) {
                return Err(WellFormedError::DuplicateParam(p.to_string()));
            }
        }
        if let Some(v) = body.free_vars().into_iter().find(|v| !seen.contains(v)) {
            return Err(WellFormedError::FreeVarInDef {
                name: name.to_string(),
                var: v.to_string(),
            });
        }
        Ok(FnDef { name, params, body })
    }
}

fn check_calls(t: &Term, defs: &Defs) -> Result<(), WellFormedError> {
    match t {
        Term::Var(_) | Term::Nat(_) => Ok(()),
        Term::App(_, args) => args.iter().try_for_each(|a| check_calls(a, defs)),
        Term::Call(name, args) => {
            let def = defs
                .get(name)
                .ok_or_else(|| WellFormedError::UnknownFunction(name.to_string()))?;
            if def.params.len() != args.len() {
                return Err(WellFormedError::CallArity {
                    name: name.to_string(),
                    got: args.len(),
                    expected: def.params.len(),
                });
            }
            args.iter().try_for_each(|a| check_calls(a, defs))
        }
        Term::LamApp { body, actuals, .. } => {
            check_calls(body, defs)?;
            actuals.iter().try_for_each(|a| check_calls(a, defs))
        }
        Term::Let { bindings, body } => {
            bindings.iter().try_for_each(|(_, e)| check_calls(e, defs))?;
            check_calls(body, defs)
        }
    }
}
