// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::{BlastError, Bvf, Bvfs, Bvfsl, Ledger};
use crate::term::{print_term, Op, Symbol, Term};

fn index_of(t: &Term, whole: &Term, n: u64) -> Result<u64, BlastError> {
    t.as_nat()
        .and_then(|k| k.to_u64())
        .ok_or_else(|| BlastError::unsupported(whole, n, "index argument is not a literal"))
}

/// Collect the operands of a tree of `op` applications, left to right.
fn flatten(op: Op, t: &Term) -> Vec<&Term> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(cur) = stack.pop() {
        match cur {
            Term::App(o, args) if *o == op => {
                stack.push(&args[1]);
                stack.push(&args[0]);
            }
            other => out.push(other),
        }
    }
    out
}

/// If `t` is `(logior (logand a b) (logand a c) (logand b c))` up to the
/// order of operands at both levels, return `[a, b, c]`.
fn majority_operands(t: &Term) -> Option<[&Term; 3]> {
    let ors = flatten(Op::Logior, t);
    if ors.len() != 3 {
        return None;
    }
    let mut pairs = Vec::with_capacity(3);
    for o in ors {
        match o {
            Term::App(Op::Logand, args) if args[0] != args[1] => {
                let (p, q) = if args[0] <= args[1] {
                    (&args[0], &args[1])
                } else {
                    (&args[1], &args[0])
                };
                pairs.push((p, q));
            }
            _ => return None,
        }
    }
    pairs.sort();
    pairs.dedup();
    if pairs.len() != 3 {
        return None;
    }
    let mut operands: Vec<&Term> = pairs.iter().flat_map(|(p, q)| [*p, *q]).collect();
    operands.sort();
    operands.dedup();
    // three distinct pairs over three distinct operands are all the 2-subsets
    match operands.as_slice() {
        [a, b, c] => Some([*a, *b, *c]),
        _ => None,
    }
}

fn fold_xor(mut bits: Vec<Bvf>) -> Bvf {
    match bits.len() {
        2 => {
            let b = bits.pop().unwrap();
            let a = bits.pop().unwrap();
            Bvf::fas(a, b, Bvf::ZERO)
        }
        3 => {
            let c = bits.pop().unwrap();
            let b = bits.pop().unwrap();
            let a = bits.pop().unwrap();
            Bvf::fas(a, b, c)
        }
        _ => {
            let rest = bits.split_off(2);
            let b = bits.pop().unwrap();
            let a = bits.pop().unwrap();
            Bvf::fas(a, b, fold_xor(rest))
        }
    }
}

/// A single-bit formula whose interpretation is `(bitn t n)`.
///
/// Lambda applications met on the way are handled by blasting the body and
/// substituting the actuals into the resulting formula.
pub fn get_nth_bit(t: &Term, n: u64) -> Result<Bvf, BlastError> {
    match t {
        Term::Var(v) => Ok(Bvf::bit(v.clone(), n)),
        Term::Nat(k) => Ok(Bvf::constant(k.bit(n))),
        Term::App(Op::Bits, args) => {
            let hi = index_of(&args[1], t, n)?;
            let lo = index_of(&args[2], t, n)?;
            if hi >= lo && n <= hi - lo {
                get_nth_bit(&args[0], n + lo)
            } else {
                Ok(Bvf::ZERO)
            }
        }
        Term::App(Op::Setbits, args) => {
            let w = index_of(&args[1], t, n)?;
            let hi = index_of(&args[2], t, n)?;
            let lo = index_of(&args[3], t, n)?;
            if n >= w {
                Ok(Bvf::ZERO)
            } else if lo <= n && n <= hi {
                get_nth_bit(&args[4], n - lo)
            } else {
                get_nth_bit(&args[0], n)
            }
        }
        Term::App(Op::Ash, args) => {
            let k = index_of(&args[1], t, n)?;
            if n >= k {
                get_nth_bit(&args[0], n - k)
            } else {
                Ok(Bvf::ZERO)
            }
        }
        Term::App(Op::Bitn, args) => {
            let i = index_of(&args[1], t, n)?;
            if n == 0 {
                get_nth_bit(&args[0], i)
            } else {
                Ok(Bvf::ZERO)
            }
        }
        Term::App(Op::Logxor, _) => {
            let operands = flatten(Op::Logxor, t);
            let bits = operands
                .into_iter()
                .map(|x| get_nth_bit(x, n))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(fold_xor(bits))
        }
        Term::App(Op::Logior, _) => match majority_operands(t) {
            Some([a, b, c]) => Ok(Bvf::fac(get_nth_bit(a, n)?, get_nth_bit(b, n)?, get_nth_bit(c, n)?)),
            None => Err(BlastError::unsupported(t, n, "logior is not a majority")),
        },
        Term::App(Op::Logand, args) => {
            if flatten(Op::Logand, t).len() != 2 {
                return Err(BlastError::unsupported(t, n, "logand of more than two operands"));
            }
            Ok(Bvf::fac(
                get_nth_bit(&args[0], n)?,
                get_nth_bit(&args[1], n)?,
                Bvf::ZERO,
            ))
        }
        Term::App(Op::Plus, _) => Err(BlastError::unsupported(t, n, "addition inside a bit")),
        Term::LamApp { params, body, actuals } => {
            let inner = get_nth_bit(body, n)?;
            let map: HashMap<&Symbol, &Term> = params.iter().zip(actuals).collect();
            substitute_bvf(&inner, &|v| map.get(v).copied())
        }
        Term::Call(name, _) => Err(BlastError::unsupported(
            t,
            n,
            &format!("call to {name} was not expanded"),
        )),
        Term::Let { .. } => Err(BlastError::unsupported(t, n, "let* was not desugared")),
    }
}

/// Replace every `(:bit v i)` for which `lookup(v)` gives a term by
/// `get_nth_bit(term, i)`.
pub fn substitute_bvf<'t>(f: &Bvf, lookup: &dyn Fn(&Symbol) -> Option<&'t Term>) -> Result<Bvf, BlastError> {
    match f {
        Bvf::Leaf(super::Bv::Bit { source, index }) => match lookup(source) {
            Some(t) => get_nth_bit(t, *index),
            None => Ok(f.clone()),
        },
        Bvf::Leaf(_) => Ok(f.clone()),
        Bvf::Fas(c) | Bvf::Fac(c) => {
            let a = substitute_bvf(&c[0], lookup)?;
            let b = substitute_bvf(&c[1], lookup)?;
            let d = substitute_bvf(&c[2], lookup)?;
            Ok(match f {
                Bvf::Fas(_) => Bvf::fas(a, b, d),
                _ => Bvf::fac(a, b, d),
            })
        }
    }
}

/// Width of the innermost term: `hi+1` for `(bits x hi 0)`, `w` for
/// `(setbits base w hi lo y)`.
pub fn infer_width(inner: &Term) -> Result<u64, BlastError> {
    let lit = |t: &Term| t.as_nat().and_then(|k| k.to_u64());
    match inner {
        Term::App(Op::Bits, args) => {
            let (Some(hi), Some(lo)) = (lit(&args[1]), lit(&args[2])) else {
                return Err(BlastError::Width(format!(
                    "bits indices must be literals in {}",
                    print_term(inner)
                )));
            };
            if lo != 0 {
                return Err(BlastError::Width(format!(
                    "outermost bits must have low index 0, found {lo}"
                )));
            }
            Ok(hi + 1)
        }
        Term::App(Op::Setbits, args) => match lit(&args[1]) {
            Some(w) if w > 0 => Ok(w),
            _ => Err(BlastError::Width(format!(
                "setbits width must be a positive literal in {}",
                print_term(inner)
            ))),
        },
        other => Err(BlastError::Width(format!(
            "innermost term must be bits or setbits, found {}",
            head_name(other)
        ))),
    }
}

fn head_name(t: &Term) -> String {
    match t {
        Term::Var(v) => format!("variable {v}"),
        Term::Nat(k) => format!("constant {k}"),
        Term::App(op, _) => op.name().to_string(),
        Term::Call(name, _) => format!("call to {name}"),
        Term::LamApp { .. } => "lambda application".into(),
        Term::Let { .. } => "let*".into(),
    }
}

/// The addends of the innermost term: the operands of a top-level sum under
/// `bits`, or the term itself.
pub fn addends(inner: &Term) -> Vec<&Term> {
    match inner {
        Term::App(Op::Bits, args) => match &args[0] {
            sum @ Term::App(Op::Plus, _) => flatten(Op::Plus, sum),
            x => vec![x],
        },
        other => vec![other],
    }
}

/// Expand the innermost term into shifted bits: for every addend `u` and
/// every position `n < width`, the item `(get_nth_bit u n) @ n`. The result
/// is congruent to the term modulo `2^width`.
pub fn expand_sum(inner: &Term, width: u64, ledger: &mut Ledger) -> Result<Bvfsl, BlastError> {
    let parts = match inner {
        Term::App(Op::Bits, _) | Term::App(Op::Setbits, _) => addends(inner),
        other => {
            return Err(BlastError::Width(format!(
                "cannot expand {} as a sum",
                head_name(other)
            )))
        }
    };
    let mut items = Vec::with_capacity(parts.len() * width as usize);
    for u in parts {
        ledger.note_term(u);
        for n in 0..width {
            items.push(Bvfs::new(get_nth_bit(u, n)?, n));
        }
    }
    Ok(Bvfsl::new(items))
}
