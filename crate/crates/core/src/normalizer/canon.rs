// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::bitblast::{Bv, Bvf, Bvfs, Bvfsl};

/// Sort the children of every `:fas`/`:fac` node under the derived total
/// order (V0 < V1 < bits by name then index < fas < fac). Idempotent.
pub fn canon_bvf(f: &Bvf) -> Bvf {
    match f {
        Bvf::Leaf(_) => f.clone(),
        Bvf::Fas(c) | Bvf::Fac(c) => {
            if is_canonical(f) {
                return f.clone();
            }
            let mut kids = [canon_bvf(&c[0]), canon_bvf(&c[1]), canon_bvf(&c[2])];
            kids.sort();
            match f {
                Bvf::Fas(_) => Bvf::Fas(Arc::new(kids)),
                _ => Bvf::Fac(Arc::new(kids)),
            }
        }
    }
}

fn is_canonical(f: &Bvf) -> bool {
    match f.children() {
        None => true,
        Some(c) => c[0] <= c[1] && c[1] <= c[2] && c.iter().all(is_canonical),
    }
}

/// Canonicalize every formula and sort by (shift, formula).
pub fn sort_items(l: &Bvfsl) -> Bvfsl {
    let mut items: Vec<Bvfs> = l
        .items
        .iter()
        .map(|i| Bvfs::new(canon_bvf(&i.formula), i.shift))
        .collect();
    items.sort_unstable();
    Bvfsl {
        items,
        constant: l.constant.clone(),
    }
}

/// Drop items that are zero modulo `2^width`: shifts at or above the width,
/// and constant-zero leaves.
pub fn prune(l: &Bvfsl, width: u64) -> Bvfsl {
    Bvfsl {
        items: l
            .items
            .iter()
            .filter(|i| i.shift < width && i.formula != Bvf::ZERO)
            .cloned()
            .collect(),
        constant: l.constant.clone(),
    }
}

/// Move constant-one leaves into the constant, modulo `2^width`.
pub fn fold_constants(l: &Bvfsl, width: u64) -> Bvfsl {
    let mut constant = l.constant.clone();
    let mut items = Vec::with_capacity(l.items.len());
    for i in &l.items {
        if i.formula == Bvf::Leaf(Bv::V1) {
            constant += BigUint::one() << i.shift;
        } else {
            items.push(i.clone());
        }
    }
    Bvfsl {
        items,
        constant: constant % (BigUint::one() << width),
    }
}

/// Full canonical form: sorted, pruned, constants folded.
pub fn canon_bvfsl(l: &Bvfsl, width: u64) -> Bvfsl {
    fold_constants(&prune(&sort_items(l), width), width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitblast::interp_bvfsl;
    use crate::oracle::{eval_term, pow2, Env};
    use crate::term::sym;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn bit(v: &str, i: u64) -> Bvf {
        Bvf::bit(sym(v), i)
    }

    #[test]
    fn sorts_children() {
        let f = Bvf::fas(bit("b", 0), bit("a", 0), Bvf::ZERO);
        assert_eq!(canon_bvf(&f), Bvf::fas(Bvf::ZERO, bit("a", 0), bit("b", 0)));
        assert_eq!(canon_bvf(&bit("x", 3)), bit("x", 3));
    }

    #[test]
    fn constant_one_folds() {
        let l = Bvfsl::new(vec![Bvfs::new(Bvf::ONE, 2)]);
        let c = canon_bvfsl(&l, 16);
        assert!(c.items.is_empty());
        assert_eq!(c.constant, BigUint::from(4u32));
    }

    #[test]
    fn high_shifts_prune() {
        let l = Bvfsl::new(vec![Bvfs::new(bit("x", 0), 16)]);
        let c = canon_bvfsl(&l, 16);
        assert!(c.items.is_empty());
        assert_eq!(c.constant, BigUint::from(0u32));
    }

    #[test]
    fn constant_wraps_at_width() {
        let l = Bvfsl::new(vec![Bvfs::new(Bvf::ONE, 3), Bvfs::new(Bvf::ONE, 3)]);
        assert_eq!(canon_bvfsl(&l, 4).constant, BigUint::from(0u32));
    }

    fn arb_bvf() -> impl Strategy<Value = Bvf> {
        let leaf = prop_oneof![
            Just(Bvf::ZERO),
            Just(Bvf::ONE),
            (prop::sample::select(vec!["a", "b", "c"]), 0u64..6).prop_map(|(v, i)| bit(v, i)),
        ];
        leaf.prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, c)| Bvf::fas(a, b, c)),
                (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| Bvf::fac(a, b, c)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn canon_is_idempotent(f in arb_bvf()) {
            let once = canon_bvf(&f);
            prop_assert_eq!(canon_bvf(&once), once);
        }

        #[test]
        fn canon_list_preserves_value(
            items in prop::collection::vec((arb_bvf(), 0u64..10), 0..8),
            a in any::<i64>(), b in any::<i64>(), c in any::<i64>(),
        ) {
            let w = 8;
            let l = Bvfsl::new(items.into_iter().map(|(f, k)| Bvfs::new(f, k)).collect());
            let canon = canon_bvfsl(&l, w);
            prop_assert_eq!(canon_bvfsl(&canon, w), canon.clone());
            let env: Env = [("a", a), ("b", b), ("c", c)]
                .iter()
                .map(|(k, v)| (sym(k), BigInt::from(*v)))
                .collect();
            let before = eval_term(&interp_bvfsl(&l), &env).unwrap().mod_floor(&pow2(w));
            let after = eval_term(&interp_bvfsl(&canon), &env).unwrap().mod_floor(&pow2(w));
            prop_assert_eq!(before, after);
        }
    }
}
