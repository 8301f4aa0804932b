// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::term::{print_term, Op, Symbol, Term};

/// A single bit: bit `index` of a variable, or a constant.
///
/// The derived order (V0 < V1 < Bit, bits by name then index) is the leaf
/// part of the canonical order on formulas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bv {
    V0,
    V1,
    Bit { source: Symbol, index: u64 },
}

/// Single-bit formula: a leaf, a full-adder sum (`:fas`, three-way xor) or a
/// full-adder carry (`:fac`, majority).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bvf {
    Leaf(Bv),
    Fas(Arc<[Bvf; 3]>),
    Fac(Arc<[Bvf; 3]>),
}

impl Bvf {
    pub const ZERO: Bvf = Bvf::Leaf(Bv::V0);
    pub const ONE: Bvf = Bvf::Leaf(Bv::V1);

    pub fn bit(source: Symbol, index: u64) -> Bvf {
        Bvf::Leaf(Bv::Bit { source, index })
    }

    pub fn constant(b: bool) -> Bvf {
        if b {
            Bvf::ONE
        } else {
            Bvf::ZERO
        }
    }

    pub fn fas(a: Bvf, b: Bvf, c: Bvf) -> Bvf {
        Bvf::Fas(Arc::new([a, b, c]))
    }

    pub fn fac(a: Bvf, b: Bvf, c: Bvf) -> Bvf {
        Bvf::Fac(Arc::new([a, b, c]))
    }

    pub fn children(&self) -> Option<&[Bvf; 3]> {
        match self {
            Bvf::Leaf(_) => None,
            Bvf::Fas(c) | Bvf::Fac(c) => Some(c),
        }
    }

    /// Visit every `Bit` leaf.
    pub fn for_each_bit(&self, f: &mut impl FnMut(&Symbol, u64)) {
        match self {
            Bvf::Leaf(Bv::Bit { source, index }) => f(source, *index),
            Bvf::Leaf(_) => {}
            Bvf::Fas(c) | Bvf::Fac(c) => c.iter().for_each(|x| x.for_each_bit(f)),
        }
    }

    pub fn mentions(&self, var: &Symbol) -> bool {
        match self {
            Bvf::Leaf(Bv::Bit { source, .. }) => source == var,
            Bvf::Leaf(_) => false,
            Bvf::Fas(c) | Bvf::Fac(c) => c.iter().any(|x| x.mentions(var)),
        }
    }

    /// Number of formula nodes.
    pub fn node_count(&self) -> usize {
        match self {
            Bvf::Leaf(_) => 1,
            Bvf::Fas(c) | Bvf::Fac(c) => 1 + c.iter().map(Bvf::node_count).sum::<usize>(),
        }
    }

    /// The term this formula denotes: `(bitn x i)`, `'0`, `'1`, a three-way
    /// xor, or a majority.
    pub fn interp(&self) -> Term {
        match self {
            Bvf::Leaf(Bv::V0) => Term::nat(0),
            Bvf::Leaf(Bv::V1) => Term::nat(1),
            Bvf::Leaf(Bv::Bit { source, index }) => Term::bitn(Term::Var(source.clone()), *index),
            Bvf::Fas(c) => Term::chain(Op::Logxor, c.iter().map(Bvf::interp).collect()),
            Bvf::Fac(c) => {
                let [a, b, c] = [c[0].interp(), c[1].interp(), c[2].interp()];
                let and = |x: &Term, y: &Term| Term::App(Op::Logand, vec![x.clone(), y.clone()]);
                Term::chain(Op::Logior, vec![and(&a, &b), and(&a, &c), and(&b, &c)])
            }
        }
    }
}

impl fmt::Display for Bv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bv::V0 => f.write_str("(:v 0)"),
            Bv::V1 => f.write_str("(:v 1)"),
            Bv::Bit { source, index } => write!(f, "(:bit {source} {index})"),
        }
    }
}

impl fmt::Display for Bvf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bvf::Leaf(bv) => bv.fmt(f),
            Bvf::Fas(c) => write!(f, "(:fas {} {} {})", c[0], c[1], c[2]),
            Bvf::Fac(c) => write!(f, "(:fac {} {} {})", c[0], c[1], c[2]),
        }
    }
}

/// A formula weighted by `2^shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bvfs {
    pub shift: u64,
    pub formula: Bvf,
}

impl Bvfs {
    pub fn new(formula: Bvf, shift: u64) -> Bvfs {
        Bvfs { shift, formula }
    }

    pub fn interp(&self) -> Term {
        Term::ash(self.formula.interp(), self.shift)
    }
}

impl fmt::Display for Bvfs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.formula, self.shift)
    }
}

/// A sum of shifted single-bit formulas plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bvfsl {
    pub items: Vec<Bvfs>,
    pub constant: BigUint,
}

impl Bvfsl {
    pub fn new(items: Vec<Bvfs>) -> Bvfsl {
        Bvfsl {
            items,
            constant: BigUint::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Variables referenced by any `Bit` leaf.
    pub fn vars(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        for item in &self.items {
            item.formula.for_each_bit(&mut |v, _| {
                if !out.contains(v) {
                    out.insert(v.clone());
                }
            });
        }
        out
    }
}

/// The term a list denotes: the sum of `(ash F k)` over its items plus the
/// constant. The empty list with constant zero is `'0`.
pub fn interp_bvfsl(l: &Bvfsl) -> Term {
    let mut parts: Vec<Term> = l.items.iter().map(Bvfs::interp).collect();
    if !l.constant.is_zero() || parts.is_empty() {
        parts.push(Term::Nat(l.constant.clone()));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Term::chain(Op::Plus, parts)
    }
}

/// Same text as `print_term(&interp_bvfsl(l))`, written without building the
/// whole sum.
pub fn write_interp(l: &Bvfsl, out: &mut String) {
    let with_const = !l.constant.is_zero() || l.items.is_empty();
    let parts = l.items.len() + with_const as usize;
    if parts > 1 {
        out.push_str("(+");
    }
    for item in &l.items {
        if parts > 1 {
            out.push(' ');
        }
        out.push_str(&print_term(&item.interp()));
    }
    if with_const {
        if parts > 1 {
            out.push(' ');
        }
        out.push('\'');
        out.push_str(&l.constant.to_string());
    }
    if parts > 1 {
        out.push(')');
    }
}

impl fmt::Display for Bvfsl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        if !self.constant.is_zero() {
            if !self.items.is_empty() {
                f.write_str(" ")?;
            }
            write!(f, "+{}", self.constant)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, sym};

    #[test]
    fn empty_list_is_zero() {
        assert_eq!(interp_bvfsl(&Bvfsl::default()), Term::nat(0));
    }

    #[test]
    fn single_item_is_one_ash() {
        let l = Bvfsl::new(vec![Bvfs::new(Bvf::bit(sym("x"), 0), 0)]);
        assert_eq!(print_term(&interp_bvfsl(&l)), "(ash (bitn x '0) '0)");
    }

    #[test]
    fn carry_interp_is_the_majority_shape() {
        let f = Bvf::fac(Bvf::bit(sym("a"), 1), Bvf::bit(sym("b"), 1), Bvf::ZERO);
        let expected =
            parse_term("(logior (logand (bitn a 1) (bitn b 1)) (logand (bitn a 1) 0) (logand (bitn b 1) 0))").unwrap();
        assert_eq!(f.interp(), expected);
        assert_eq!(f.to_string(), "(:fac (:bit a 1) (:bit b 1) (:v 0))");
    }

    #[test]
    fn streamed_interp_matches_printed_term() {
        let mut l = Bvfsl::new(vec![
            Bvfs::new(Bvf::bit(sym("x"), 0), 0),
            Bvfs::new(Bvf::fas(Bvf::bit(sym("a"), 2), Bvf::ONE, Bvf::ZERO), 2),
        ]);
        for constant in [0u32, 5] {
            l.constant = BigUint::from(constant);
            let mut s = String::new();
            write_interp(&l, &mut s);
            assert_eq!(s, print_term(&interp_bvfsl(&l)));
        }
        let only_const = Bvfsl {
            items: vec![],
            constant: BigUint::from(3u32),
        };
        let mut s = String::new();
        write_interp(&only_const, &mut s);
        assert_eq!(s, "'3");
    }

    #[test]
    fn canonical_order_ranks_constructors() {
        let mut v = [
            Bvf::fac(Bvf::ZERO, Bvf::ZERO, Bvf::ZERO),
            Bvf::fas(Bvf::ZERO, Bvf::ZERO, Bvf::ZERO),
            Bvf::bit(sym("b"), 0),
            Bvf::bit(sym("a"), 7),
            Bvf::ONE,
            Bvf::ZERO,
        ];
        v.sort();
        let shown: Vec<String> = v.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            shown,
            [
                "(:v 0)",
                "(:v 1)",
                "(:bit a 7)",
                "(:bit b 0)",
                "(:fas (:v 0) (:v 0) (:v 0))",
                "(:fac (:v 0) (:v 0) (:v 0))"
            ]
        );
    }
}
