// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use crate::bitblast::{substitute_bvf, BlastError, Bvf, Bvfs, Bvfsl, Ledger, Subst};
use crate::term::{Symbol, Term};

use super::canon::canon_bvfsl;

fn touches(f: &Bvf, map: &HashMap<&Symbol, &Term>) -> bool {
    let mut hit = false;
    f.for_each_bit(&mut |v, _| hit |= map.contains_key(v));
    hit
}

/// Replace the bits of every variable bound by `s` with the corresponding
/// bits of its actual. The result is not re-canonicalized.
pub fn substitute_items(l: &Bvfsl, s: &Subst) -> Result<Bvfsl, BlastError> {
    let map: HashMap<&Symbol, &Term> = s.non_identity().collect();
    if map.is_empty() {
        return Ok(l.clone());
    }
    let lookup = |v: &Symbol| map.get(v).copied();
    let items = l
        .items
        .iter()
        .map(|i| {
            if touches(&i.formula, &map) {
                Ok(Bvfs::new(substitute_bvf(&i.formula, &lookup)?, i.shift))
            } else {
                Ok(i.clone())
            }
        })
        .collect::<Result<Vec<_>, BlastError>>()?;
    Ok(Bvfsl {
        items,
        constant: l.constant.clone(),
    })
}

/// Pop one layer into the list: substitute, update the ledger, and
/// re-canonicalize.
pub fn apply_subst(l: &Bvfsl, s: &Subst, width: u64, ledger: &mut Ledger) -> Result<Bvfsl, BlastError> {
    let out = substitute_items(l, s)?;
    ledger.apply(s);
    Ok(canon_bvfsl(&out, width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, sym};

    #[test]
    fn substitutes_bits_of_actuals() {
        let l = Bvfsl::new(vec![
            Bvfs::new(Bvf::bit(sym("s"), 2), 2),
            Bvfs::new(Bvf::bit(sym("y"), 0), 0),
        ]);
        let s = Subst::new(vec![
            (sym("s"), parse_term("(setbits '0 '8 '7 '0 (logxor a b c))").unwrap()),
            (sym("y"), Term::var("y")),
        ]);
        let mut ledger = Ledger::default();
        ledger.note_var(&sym("s"));
        let out = apply_subst(&l, &s, 8, &mut ledger).unwrap();
        let abc = Bvf::fas(Bvf::bit(sym("a"), 2), Bvf::bit(sym("b"), 2), Bvf::bit(sym("c"), 2));
        assert_eq!(out.items, vec![Bvfs::new(Bvf::bit(sym("y"), 0), 0), Bvfs::new(abc, 2)]);
        let names: Vec<_> = ledger.needed.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn identity_layer_is_a_no_op() {
        let l = Bvfsl::new(vec![Bvfs::new(Bvf::bit(sym("x"), 1), 1)]);
        let s = Subst::new(vec![(sym("x"), Term::var("x"))]);
        assert_eq!(substitute_items(&l, &s).unwrap(), l);
    }
}
