// SPDX-License-Identifier: Apache-2.0

//! Terms flattened once for repeated evaluation: variables become slots,
//! calls are inlined, literal indices are decoded up front and the tree
//! becomes straight-line postfix code. The term language has no
//! conditionals, so every instruction runs exactly once per evaluation.
//! Agrees with [`eval_with_defs`](super::eval_with_defs), which stays the
//! reference.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::eval::{EvalError, Val, MAX_INDEX};
use super::Env;
use crate::term::{Defs, Op, Symbol, Term};

/// Bound on nested call inlining; deeper nesting means a recursive define.
const MAX_INLINE: usize = 256;

#[derive(Clone, Debug)]
enum Instr {
    Load(u32),
    Const(u32),
    /// `bitn` of a slot, without copying the slot.
    BitnSlot(u32, u32),
    Bitn(u32),
    Bits(u32, u32),
    Setbits(u32, u32, u32),
    Binary(Op),
    /// An op whose index operands are computed; all operands on the stack.
    Generic(Op),
    Store(u32),
}

#[derive(Clone, Debug)]
pub struct Compiled {
    code: Vec<Instr>,
    consts: Vec<Val>,
    inputs: Vec<Symbol>,
    slots: usize,
}

struct Builder<'a> {
    defs: Option<&'a Defs>,
    scope: Vec<(Symbol, u32)>,
    slots: u32,
    inlining: usize,
    code: Vec<Instr>,
    consts: Vec<Val>,
}

/// A literal index in range; anything else is left to the generic path,
/// which reports it.
fn literal(t: &Term) -> Option<u32> {
    t.as_nat()
        .and_then(|n| n.to_u64())
        .filter(|n| *n <= MAX_INDEX)
        .map(|n| n as u32)
}

impl Builder<'_> {
    fn fresh(&mut self) -> u32 {
        self.slots += 1;
        self.slots - 1
    }

    fn lookup(&self, v: &Symbol) -> Result<u32, EvalError> {
        self.scope
            .iter()
            .rev()
            .find(|(s, _)| s == v)
            .map(|(_, i)| *i)
            .ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    fn all(&mut self, ts: &[Term]) -> Result<(), EvalError> {
        ts.iter().try_for_each(|t| self.build(t))
    }

    /// Actuals are already on the stack; pop them into fresh slots for
    /// `params` and emit `body`.
    fn bind(&mut self, params: &[Symbol], body: &Term) -> Result<(), EvalError> {
        let slots: Vec<u32> = params.iter().map(|_| self.fresh()).collect();
        self.code.extend(slots.iter().rev().map(|s| Instr::Store(*s)));
        let mark = self.scope.len();
        self.scope.extend(params.iter().cloned().zip(slots));
        let out = self.build(body);
        self.scope.truncate(mark);
        out
    }

    fn build(&mut self, t: &Term) -> Result<(), EvalError> {
        match t {
            Term::Var(v) => {
                let s = self.lookup(v)?;
                self.code.push(Instr::Load(s));
            }
            Term::Nat(n) => {
                self.consts.push(Val::from_big(BigInt::from(n.clone())));
                self.code.push(Instr::Const(self.consts.len() as u32 - 1));
            }
            Term::App(Op::Bitn, args) if literal(&args[1]).is_some() => {
                let n = literal(&args[1]).unwrap();
                match &args[0] {
                    Term::Var(v) => {
                        let s = self.lookup(v)?;
                        self.code.push(Instr::BitnSlot(s, n));
                    }
                    x => {
                        self.build(x)?;
                        self.code.push(Instr::Bitn(n));
                    }
                }
            }
            Term::App(Op::Bits, args) if literal(&args[1]).is_some() && literal(&args[2]).is_some() => {
                self.build(&args[0])?;
                self.code
                    .push(Instr::Bits(literal(&args[1]).unwrap(), literal(&args[2]).unwrap()));
            }
            Term::App(Op::Setbits, args) if args[1..4].iter().all(|a| literal(a).is_some()) => {
                self.build(&args[0])?;
                self.build(&args[4])?;
                let [w, hi, lo] = [1, 2, 3].map(|i| literal(&args[i]).unwrap());
                self.code.push(Instr::Setbits(w, hi, lo));
            }
            Term::App(op @ (Op::Logxor | Op::Logand | Op::Logior | Op::Plus | Op::Ash), args) => {
                self.all(args)?;
                self.code.push(Instr::Binary(*op));
            }
            Term::App(op, args) => {
                self.all(args)?;
                self.code.push(Instr::Generic(*op));
            }
            Term::LamApp { params, body, actuals } => {
                self.all(actuals)?;
                self.bind(params, body)?;
            }
            Term::Let { bindings, body } => {
                // sequential binding: each value sees the ones before it
                let mark = self.scope.len();
                let mut out = Ok(());
                for (v, e) in bindings {
                    out = self.build(e);
                    if out.is_err() {
                        break;
                    }
                    let s = self.fresh();
                    self.code.push(Instr::Store(s));
                    self.scope.push((v.clone(), s));
                }
                if out.is_ok() {
                    out = self.build(body);
                }
                self.scope.truncate(mark);
                out?;
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
                if self.inlining == MAX_INLINE {
                    return Err(EvalError::Recursive(name.to_string()));
                }
                self.all(args)?;
                // a definition body only sees its own parameters
                let outer = std::mem::take(&mut self.scope);
                self.inlining += 1;
                let out = self.bind(&def.params, &def.body);
                self.inlining -= 1;
                self.scope = outer;
                out?;
            }
        }
        Ok(())
    }
}

fn pop(stack: &mut Vec<Val>) -> Val {
    stack.pop().expect("compiled code is balanced")
}

impl Compiled {
    /// Resolve `t` against the variables `inputs`, inlining calls through
    /// `defs`.
    pub fn new(t: &Term, inputs: &[Symbol], defs: Option<&Defs>) -> Result<Compiled, EvalError> {
        let mut b = Builder {
            defs,
            scope: inputs.iter().cloned().zip(0..).collect(),
            slots: inputs.len() as u32,
            inlining: 0,
            code: Vec::new(),
            consts: Vec::new(),
        };
        b.build(t)?;
        Ok(Compiled {
            code: b.code,
            consts: b.consts,
            inputs: inputs.to_vec(),
            slots: b.slots as usize,
        })
    }

    /// Evaluate with the inputs taken from `env`.
    pub fn eval(&self, env: &Env) -> Result<BigInt, EvalError> {
        let mut slots = vec![Val::Small(0); self.slots];
        for (i, v) in self.inputs.iter().enumerate() {
            let value = env.get(v).ok_or_else(|| EvalError::Unbound(v.to_string()))?;
            slots[i] = Val::from_big(value.clone());
        }
        let mut stack: Vec<Val> = Vec::new();
        for ins in &self.code {
            let v = match ins {
                Instr::Load(s) => slots[*s as usize].clone(),
                Instr::Const(c) => self.consts[*c as usize].clone(),
                Instr::BitnSlot(s, n) => Val::Small(slots[*s as usize].bit(*n as u64) as i64),
                Instr::Bitn(n) => Val::Small(pop(&mut stack).bit(*n as u64) as i64),
                Instr::Bits(hi, lo) => Val::bits(pop(&mut stack), *hi as u64, *lo as u64),
                Instr::Setbits(w, hi, lo) => {
                    let y = pop(&mut stack);
                    Val::setbits(pop(&mut stack), *w as u64, *hi as u64, *lo as u64, y)
                }
                Instr::Binary(op) => {
                    let b = pop(&mut stack);
                    let a = pop(&mut stack);
                    match op {
                        Op::Ash => Val::ash(a, b)?,
                        Op::Plus => Val::add(a, b),
                        op => Val::logic(*op, a, b),
                    }
                }
                Instr::Generic(op) => {
                    let args = stack.split_off(stack.len() - op.arity());
                    let mut it = args.into_iter();
                    let mut next = || it.next().expect("operands pushed per arity");
                    match op {
                        Op::Bitn => {
                            let x = next();
                            Val::Small(x.bit(next().index()?) as i64)
                        }
                        Op::Bits => {
                            let x = next();
                            let hi = next().index()?;
                            Val::bits(x, hi, next().index()?)
                        }
                        _ => {
                            let base = next();
                            let w = next().index()?;
                            let hi = next().index()?;
                            let lo = next().index()?;
                            Val::setbits(base, w, hi, lo, next())
                        }
                    }
                }
                Instr::Store(s) => {
                    slots[*s as usize] = pop(&mut stack);
                    continue;
                }
            };
            stack.push(v);
        }
        Ok(pop(&mut stack).into_big())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::eval_with_defs;
    use crate::term::{parse_goal_file, parse_term, sym};
    use proptest::prelude::*;

    const SRC: &str = "
        (define (maj a b c) (logior (logand a b) (logand a c) (logand b c)))
        (define (f x y)
          (let* ((s (setbits '0 '12 '11 '0 (logxor x y)))
                 (c (setbits '0 '12 '11 '0 (ash (maj x y '5) '1))))
            (let* ((s (+ s c (bits x '70 '3))))
              ((lambda (s k) (setbits (bitn s k) '9 '5 '5 (bits s '8 '2))) s '4))))";

    proptest! {
        #[test]
        fn agrees_with_reference(x in any::<i128>(), y in any::<i64>()) {
            let file = parse_goal_file(SRC).unwrap();
            let defs = file.def_map();
            let t = parse_term("(+ (f x y) (f y x) (ash x '3) (bits (+ x y) '100 '60) (bitn x (bits y '5 '0)))").unwrap();
            let env: Env = [(sym("x"), BigInt::from(x)), (sym("y"), BigInt::from(y))].into();
            let c = Compiled::new(&t, &[sym("x"), sym("y")], Some(&defs)).unwrap();
            prop_assert_eq!(c.eval(&env).unwrap(), eval_with_defs(&t, &env, &defs).unwrap());
        }
    }

    #[test]
    fn errors_match_reference() {
        let t = parse_term("(+ x z)").unwrap();
        assert_eq!(
            Compiled::new(&t, &[sym("x")], None).unwrap_err(),
            EvalError::Unbound("z".into())
        );
        let file = parse_goal_file("(define (f x) (f x))").unwrap();
        let t = parse_term("(f y)").unwrap();
        assert!(matches!(
            Compiled::new(&t, &[sym("y")], Some(&file.def_map())),
            Err(EvalError::Recursive(_))
        ));
        let env: Env = [(sym("y"), BigInt::from(1))].into();
        assert!(matches!(
            eval_with_defs(&t, &env, &file.def_map()),
            Err(EvalError::Recursive(_))
        ));
        let t = parse_term("(bits x '5000000 '0)").unwrap();
        let env: Env = [(sym("x"), BigInt::from(3))].into();
        let c = Compiled::new(&t, &[sym("x")], None).unwrap();
        assert!(matches!(c.eval(&env), Err(EvalError::BadIndex(_))));
    }
}
