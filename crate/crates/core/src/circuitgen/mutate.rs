// SPDX-License-Identifier: Apache-2.0

//! Value-changing and value-preserving edits of a generated `compress`.

use std::fmt;

use num_traits::ToPrimitive;

use crate::term::{FnDef, Op, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Move the `site`-th carry by `delta` columns: `(ash maj 1)` gets a
    /// different shift, a single-column `setbits` placing a carry gets a
    /// different column.
    CarryShift { site: usize, delta: i64 },
    /// Read the `site`-th `(bitn x c)` from column `c+1` instead (or `c-1`
    /// at the top column).
    ColumnSwap { site: usize },
    /// Replace the `site`-th use of an input `pp_j` by `pp_(j+1)`.
    WrongOperand { site: usize },
    /// Replace the `site`-th use of an input by `'0`.
    DropInput { site: usize },
    /// Swap the operands of the `site`-th xor, and, or or plus. Equivalent.
    Reorder { site: usize },
}

impl Mutation {
    /// True if the mutation may change the value of the circuit.
    pub fn changes_value(&self) -> bool {
        !matches!(self, Mutation::Reorder { .. })
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::CarryShift { site, delta } => write!(f, "carry-shift#{site}{delta:+}"),
            Mutation::ColumnSwap { site } => write!(f, "column-swap#{site}"),
            Mutation::WrongOperand { site } => write!(f, "wrong-operand#{site}"),
            Mutation::DropInput { site } => write!(f, "drop-input#{site}"),
            Mutation::Reorder { site } => write!(f, "reorder#{site}"),
        }
    }
}

fn lit(t: &Term) -> Option<u64> {
    t.as_nat().and_then(|k| k.to_u64())
}

fn is_carry(t: &Term) -> bool {
    matches!(t, Term::App(Op::Logior | Op::Logand, _))
}

fn is_carry_site(t: &Term) -> bool {
    match t {
        Term::App(Op::Ash, args) => is_carry(&args[0]) && lit(&args[1]).is_some(),
        Term::App(Op::Setbits, args) => is_carry(&args[4]) && lit(&args[2]).is_some() && lit(&args[2]) == lit(&args[3]),
        _ => false,
    }
}

fn is_bitn(t: &Term) -> bool {
    matches!(t, Term::App(Op::Bitn, args) if lit(&args[1]).is_some())
}

fn is_commutative(t: &Term) -> bool {
    matches!(t, Term::App(Op::Logxor | Op::Logand | Op::Logior | Op::Plus, _))
}

/// Preorder walk over every subterm, bindings included.
fn walk_mut(t: &mut Term, f: &mut dyn FnMut(&mut Term) -> bool) -> bool {
    if f(t) {
        return true;
    }
    match t {
        Term::Var(_) | Term::Nat(_) => false,
        Term::App(_, args) | Term::Call(_, args) => args.iter_mut().any(|a| walk_mut(a, f)),
        Term::LamApp { body, actuals, .. } => actuals.iter_mut().any(|a| walk_mut(a, f)) || walk_mut(body, f),
        Term::Let { bindings, body } => bindings.iter_mut().any(|(_, e)| walk_mut(e, f)) || walk_mut(body, f),
    }
}

fn count(t: &Term, pred: &dyn Fn(&Term) -> bool) -> usize {
    let mut t = t.clone();
    let mut n = 0;
    walk_mut(&mut t, &mut |s| {
        n += pred(s) as usize;
        false
    });
    n
}

/// Apply `edit` to the `site`-th subterm satisfying `pred`. Returns false if
/// there is no such site or the edit declined.
fn edit_nth(t: &mut Term, site: usize, pred: &dyn Fn(&Term) -> bool, edit: &mut dyn FnMut(&mut Term) -> bool) -> bool {
    let mut seen = 0;
    let mut done = false;
    walk_mut(t, &mut |s| {
        if !pred(s) {
            return false;
        }
        seen += 1;
        if seen - 1 == site {
            done = edit(s);
            return true;
        }
        false
    });
    done
}

/// Every mutation that applies to `def`.
pub fn mutations(def: &FnDef) -> Vec<Mutation> {
    let inputs = |t: &Term| t.as_var().is_some_and(|v| def.params.contains(v));
    let mut out = Vec::new();
    for site in 0..count(&def.body, &is_carry_site) {
        out.push(Mutation::CarryShift { site, delta: 1 });
        out.push(Mutation::CarryShift { site, delta: -1 });
    }
    for site in 0..count(&def.body, &is_bitn) {
        out.push(Mutation::ColumnSwap { site });
    }
    for site in 0..count(&def.body, &inputs) {
        out.push(Mutation::WrongOperand { site });
        out.push(Mutation::DropInput { site });
    }
    for site in 0..count(&def.body, &is_commutative) {
        out.push(Mutation::Reorder { site });
    }
    out
}

/// `def` with one mutation applied, or `None` if it does not apply.
/// `out_width` bounds column moves.
pub fn apply(def: &FnDef, m: Mutation, out_width: u64) -> Option<FnDef> {
    let mut body = def.body.clone();
    let params = def.params.clone();
    let ok = match m {
        Mutation::CarryShift { site, delta } => edit_nth(&mut body, site, &is_carry_site, &mut |t| {
            let Term::App(op, args) = t else { return false };
            let at = if *op == Op::Ash { 1 } else { 2 };
            let Some(k) = lit(&args[at]).and_then(|k| k.checked_add_signed(delta)) else {
                return false;
            };
            if *op == Op::Setbits {
                if k >= out_width {
                    return false;
                }
                args[3] = Term::nat(k);
            }
            args[at] = Term::nat(k);
            true
        }),
        Mutation::ColumnSwap { site } => edit_nth(&mut body, site, &is_bitn, &mut |t| {
            let Term::App(_, args) = t else { return false };
            let c = lit(&args[1]).unwrap();
            args[1] = Term::nat(if c + 1 < out_width { c + 1 } else { c - 1 });
            true
        }),
        Mutation::WrongOperand { site } | Mutation::DropInput { site } => {
            let pred = |t: &Term| t.as_var().is_some_and(|v| params.contains(v));
            edit_nth(&mut body, site, &pred, &mut |t| {
                *t = match m {
                    Mutation::DropInput { .. } => Term::nat(0),
                    _ => {
                        let v = t.as_var().unwrap();
                        let i = params.iter().position(|p| p == v).unwrap();
                        Term::Var(params[(i + 1) % params.len()].clone())
                    }
                };
                true
            })
        }
        Mutation::Reorder { site } => edit_nth(&mut body, site, &is_commutative, &mut |t| {
            let Term::App(_, args) = t else { return false };
            args.swap(0, 1);
            true
        }),
    };
    ok.then(|| FnDef {
        name: def.name.clone(),
        params,
        body,
    })
}
