// SPDX-License-Identifier: Apache-2.0

//! Concrete evaluation over unbounded integers.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::term::{Defs, Op, Symbol, Term};

pub type Env = BTreeMap<Symbol, BigInt>;

/// Bit positions above this are refused rather than allocating huge masks.
pub(super) const MAX_INDEX: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("call to {0} cannot be evaluated without its definition")]
    UnknownFunction(String),
    #[error("{name} applied to {got} arguments, expected {expected}")]
    Arity { name: String, got: usize, expected: usize },
    #[error("{0} calls itself")]
    Recursive(String),
    #[error("bit index {0} out of range")]
    BadIndex(BigInt),
}

pub fn pow2(n: u64) -> BigInt {
    BigInt::one() << n
}

/// `floor(x / 2^n) mod 2`.
pub fn bitn(x: &BigInt, n: u64) -> bool {
    x.bit(n)
}

/// `floor((x mod 2^(hi+1)) / 2^lo)`, zero when `hi < lo`.
pub fn bits(x: &BigInt, hi: u64, lo: u64) -> BigInt {
    if hi < lo {
        return BigInt::zero();
    }
    x.mod_floor(&pow2(hi + 1)) >> lo
}

/// `base` with the field `[hi:lo]` replaced by the low bits of `y`, reduced
/// modulo `2^w`.
pub fn setbits(base: &BigInt, w: u64, hi: u64, lo: u64, y: &BigInt) -> BigInt {
    set_field(base.clone(), w, hi, lo, y)
}

fn set_field(mut base: BigInt, w: u64, hi: u64, lo: u64, y: &BigInt) -> BigInt {
    // single columns dominate generated trees; skip the masks
    if hi == lo && lo < w {
        base.set_bit(lo, y.bit(0));
        if base.sign() == Sign::Minus || base.bits() > w {
            base = base.mod_floor(&pow2(w));
        }
        return base;
    }
    let kept = if hi < lo {
        base.clone()
    } else {
        let mask = pow2(hi + 1) - pow2(lo);
        let field = y.mod_floor(&pow2(hi - lo + 1)) << lo;
        (base & !mask) | field
    };
    kept.mod_floor(&pow2(w))
}

/// `floor(x * 2^k)` for any integer `k`.
pub fn ash(x: &BigInt, k: &BigInt) -> Result<BigInt, EvalError> {
    let mag = k
        .magnitude()
        .to_u64()
        .filter(|m| *m <= MAX_INDEX)
        .ok_or_else(|| EvalError::BadIndex(k.clone()))?;
    Ok(if k.sign() == Sign::Minus { x >> mag } else { x << mag })
}

/// Evaluate a term that contains no user calls.
pub fn eval_term(t: &Term, env: &Env) -> Result<BigInt, EvalError> {
    Evaluator::new(None, env).eval(t).map(Val::into_big)
}

/// Evaluate a term, resolving calls through `defs` (call-by-value).
pub fn eval_with_defs(t: &Term, env: &Env, defs: &Defs) -> Result<BigInt, EvalError> {
    Evaluator::new(Some(defs), env).eval(t).map(Val::into_big)
}

/// Bits of generated circuits are mostly tiny; keeping them off the heap is
/// what makes sampling wide trees affordable.
#[derive(Clone, Debug)]
pub(super) enum Val {
    Small(i64),
    Big(BigInt),
}

impl Val {
    pub(super) fn from_big(b: BigInt) -> Val {
        match b.to_i64() {
            Some(v) => Val::Small(v),
            None => Val::Big(b),
        }
    }

    pub(super) fn into_big(self) -> BigInt {
        match self {
            Val::Small(v) => BigInt::from(v),
            Val::Big(b) => b,
        }
    }

    pub(super) fn bit(&self, n: u64) -> bool {
        match self {
            Val::Small(v) => (v >> n.min(63)) & 1 == 1,
            Val::Big(b) => b.bit(n),
        }
    }

    pub(super) fn index(self) -> Result<u64, EvalError> {
        match self {
            Val::Small(v) if (0..=MAX_INDEX as i64).contains(&v) => Ok(v as u64),
            v => Err(EvalError::BadIndex(v.into_big())),
        }
    }

    pub(super) fn logic(op: Op, a: Val, b: Val) -> Val {
        if let (Val::Small(x), Val::Small(y)) = (&a, &b) {
            return Val::Small(match op {
                Op::Logxor => x ^ y,
                Op::Logand => x & y,
                _ => x | y,
            });
        }
        let (x, y) = (a.into_big(), b.into_big());
        Val::from_big(match op {
            Op::Logxor => x ^ y,
            Op::Logand => x & y,
            _ => x | y,
        })
    }

    pub(super) fn add(a: Val, b: Val) -> Val {
        if let (Val::Small(x), Val::Small(y)) = (&a, &b) {
            if let Some(z) = x.checked_add(*y) {
                return Val::Small(z);
            }
        }
        Val::from_big(a.into_big() + b.into_big())
    }

    pub(super) fn bits(x: Val, hi: u64, lo: u64) -> Val {
        match x {
            _ if hi < lo => Val::Small(0),
            Val::Small(v) if hi < 62 => Val::Small((v & ((1 << (hi + 1)) - 1)) >> lo),
            x => Val::from_big(bits(&x.into_big(), hi, lo)),
        }
    }

    pub(super) fn setbits(base: Val, w: u64, hi: u64, lo: u64, y: Val) -> Val {
        if hi == lo && lo < w {
            let bit = y.bit(0);
            match base {
                Val::Small(b) if b >= 0 && lo < 62 && (w >= 63 || b < 1 << w) => {
                    return Val::Small((b & !(1 << lo)) | ((bit as i64) << lo));
                }
                Val::Big(mut b) if b.sign() != Sign::Minus && b.bits() <= w => {
                    b.set_bit(lo, bit);
                    return Val::Big(b);
                }
                base => return Val::from_big(set_field(base.into_big(), w, hi, lo, &y.into_big())),
            }
        }
        Val::from_big(set_field(base.into_big(), w, hi, lo, &y.into_big()))
    }

    pub(super) fn ash(x: Val, k: Val) -> Result<Val, EvalError> {
        if let (Val::Small(v), Val::Small(k)) = (&x, &k) {
            if *k <= 0 {
                return Ok(Val::Small(v >> (-k).min(63)));
            }
            if *k < 63 && (v << k) >> k == *v {
                return Ok(Val::Small(v << k));
            }
        }
        ash(&x.into_big(), &k.into_big()).map(Val::from_big)
    }
}

/// Nested calls deeper than this can only come from a recursive define.
const MAX_CALL_DEPTH: usize = 256;

struct Evaluator<'a> {
    defs: Option<&'a Defs>,
    scope: HashMap<Symbol, Vec<Val>>,
    calls: usize,
}

impl<'a> Evaluator<'a> {
    fn new(defs: Option<&'a Defs>, env: &Env) -> Self {
        let scope = env
            .iter()
            .map(|(k, v)| (k.clone(), vec![Val::from_big(v.clone())]))
            .collect();
        Evaluator { defs, scope, calls: 0 }
    }

    fn push(&mut self, v: &Symbol, value: Val) {
        self.scope.entry(v.clone()).or_default().push(value);
    }

    fn pop(&mut self, v: &Symbol) {
        if let Some(stack) = self.scope.get_mut(v) {
            stack.pop();
        }
    }

    fn apply(&mut self, params: &[Symbol], values: Vec<Val>, body: &Term) -> Result<Val, EvalError> {
        for (p, v) in params.iter().zip(values) {
            self.push(p, v);
        }
        let out = self.eval(body);
        for p in params {
            self.pop(p);
        }
        out
    }

    fn lookup(&self, v: &Symbol) -> Result<&Val, EvalError> {
        self.scope
            .get(v)
            .and_then(|s| s.last())
            .ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    fn index(&mut self, t: &Term) -> Result<u64, EvalError> {
        self.eval(t)?.index()
    }

    fn all(&mut self, ts: &[Term]) -> Result<Vec<Val>, EvalError> {
        ts.iter().map(|a| self.eval(a)).collect()
    }

    fn eval(&mut self, t: &Term) -> Result<Val, EvalError> {
        match t {
            Term::Var(v) => self.lookup(v).cloned(),
            Term::Nat(n) => Ok(match n.to_i64() {
                Some(v) => Val::Small(v),
                None => Val::Big(BigInt::from(n.clone())),
            }),
            Term::App(Op::Plus, _) => {
                let mut acc = Val::Small(0);
                let mut cur = t;
                while let Term::App(Op::Plus, args) = cur {
                    acc = Val::add(acc, self.eval(&args[0])?);
                    cur = &args[1];
                }
                Ok(Val::add(acc, self.eval(cur)?))
            }
            Term::App(Op::Bitn, args) => {
                let n = self.index(&args[1])?;
                let bit = match &args[0] {
                    Term::Var(v) => self.lookup(v)?.bit(n),
                    x => self.eval(x)?.bit(n),
                };
                Ok(Val::Small(bit as i64))
            }
            Term::App(Op::Bits, args) => {
                let x = self.eval(&args[0])?;
                Ok(Val::bits(x, self.index(&args[1])?, self.index(&args[2])?))
            }
            Term::App(Op::Setbits, args) => {
                let base = self.eval(&args[0])?;
                let w = self.index(&args[1])?;
                let hi = self.index(&args[2])?;
                let lo = self.index(&args[3])?;
                let y = self.eval(&args[4])?;
                Ok(Val::setbits(base, w, hi, lo, y))
            }
            Term::App(Op::Ash, args) => {
                let x = self.eval(&args[0])?;
                Val::ash(x, self.eval(&args[1])?)
            }
            Term::App(op, args) => {
                let a = self.eval(&args[0])?;
                Ok(Val::logic(*op, a, self.eval(&args[1])?))
            }
            Term::LamApp { params, body, actuals } => {
                let vals = self.all(actuals)?;
                self.apply(params, vals, body)
            }
            Term::Let { bindings, body } => {
                for (v, e) in bindings {
                    let val = self.eval(e)?;
                    self.push(v, val);
                }
                let out = self.eval(body);
                for (v, _) in bindings {
                    self.pop(v);
                }
                out
            }
            Term::Call(name, args) => {
                let def = self
                    .defs
                    .and_then(|d| d.get(name))
                    .ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
                if def.params.len() != args.len() {
                    return Err(EvalError::Arity {
                        name: name.to_string(),
                        got: args.len(),
                        expected: def.params.len(),
                    });
                }
                if self.calls == MAX_CALL_DEPTH {
                    return Err(EvalError::Recursive(name.to_string()));
                }
                let vals = self.all(args)?;
                // a definition body only sees its own parameters
                let saved = std::mem::take(&mut self.scope);
                self.calls += 1;
                let out = self.apply(&def.params, vals, &def.body);
                self.calls -= 1;
                self.scope = saved;
                out
            }
        }
    }
}
