// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use crate::bitblast::{Bvf, Bvfs, Bvfsl, Ledger};

use super::canon::canon_bvfsl;

/// Outcome of one sweep over a canonical list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PassCounts {
    /// `(:fas a b c)@k` and `(:fac a b c)@(k+1)` replaced by `a@k b@k c@k`.
    pub pairs: usize,
    /// Lone `(:fas a b c)@(W-1)` replaced by `a b c` at the same shift; the
    /// missing carry weighs `2^W`, which vanishes modulo `2^W`.
    pub top_bits: usize,
}

/// One sweep of the pair rule over a canonical list. Returns the list
/// re-canonicalized and the number of pairs rewritten.
pub fn pair_pass(l: &Bvfsl, width: u64, ledger: &mut Ledger) -> (Bvfsl, usize) {
    let mut carries: HashMap<(u64, &[Bvf; 3]), Vec<usize>> = HashMap::new();
    for (i, item) in l.items.iter().enumerate() {
        if let Bvf::Fac(c) = &item.formula {
            carries.entry((item.shift, &**c)).or_default().push(i);
        }
    }
    if carries.is_empty() {
        return (l.clone(), 0);
    }
    let mut removed = vec![false; l.items.len()];
    let mut added = Vec::new();
    let mut pairs = 0;
    for (i, item) in l.items.iter().enumerate() {
        let Bvf::Fas(c) = &item.formula else { continue };
        let Some(partners) = carries.get_mut(&(item.shift + 1, &**c)) else {
            continue;
        };
        let Some(j) = partners.pop() else { continue };
        removed[i] = true;
        removed[j] = true;
        pairs += 1;
        for child in c.iter() {
            child.for_each_bit(&mut |v, _| ledger.note_var(v));
            added.push(Bvfs::new(child.clone(), item.shift));
        }
    }
    if pairs == 0 {
        return (l.clone(), 0);
    }
    (rebuild(l, &removed, added, width), pairs)
}

/// Expand every `:fas` sitting in the top bit position.
pub fn top_bit_pass(l: &Bvfsl, width: u64, ledger: &mut Ledger) -> (Bvfsl, usize) {
    let mut removed = vec![false; l.items.len()];
    let mut added = Vec::new();
    let mut count = 0;
    for (i, item) in l.items.iter().enumerate() {
        if item.shift + 1 != width {
            continue;
        }
        if let Bvf::Fas(c) = &item.formula {
            removed[i] = true;
            count += 1;
            for child in c.iter() {
                child.for_each_bit(&mut |v, _| ledger.note_var(v));
                added.push(Bvfs::new(child.clone(), item.shift));
            }
        }
    }
    if count == 0 {
        return (l.clone(), 0);
    }
    (rebuild(l, &removed, added, width), count)
}

fn rebuild(l: &Bvfsl, removed: &[bool], added: Vec<Bvfs>, width: u64) -> Bvfsl {
    let mut items: Vec<Bvfs> = l
        .items
        .iter()
        .zip(removed)
        .filter(|(_, r)| !**r)
        .map(|(i, _)| i.clone())
        .collect();
    items.extend(added);
    canon_bvfsl(
        &Bvfsl {
            items,
            constant: l.constant.clone(),
        },
        width,
    )
}

/// Apply the pair rule and the top-bit rule until neither matches.
///
/// Every rewrite removes at least one `:fas` node, so this terminates.
pub(crate) fn reduce_with(
    l: &Bvfsl,
    width: u64,
    ledger: &mut Ledger,
    on_pass: &mut dyn FnMut(PassKind, usize, &Bvfsl, &Bvfsl),
) -> Bvfsl {
    let mut cur = l.clone();
    loop {
        let (next, pairs) = pair_pass(&cur, width, ledger);
        if pairs > 0 {
            on_pass(PassKind::Pairs, pairs, &cur, &next);
            cur = next;
        }
        let (next, tops) = top_bit_pass(&cur, width, ledger);
        if tops > 0 {
            on_pass(PassKind::TopBit, tops, &cur, &next);
            cur = next;
        }
        if pairs == 0 && tops == 0 {
            return cur;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PassKind {
    Pairs,
    TopBit,
}

/// Rewrite with the full-adder identity to fixpoint. `l` must be canonical.
pub fn add3_reduce(l: &Bvfsl, width: u64, ledger: &mut Ledger) -> (Bvfsl, PassCounts) {
    let mut counts = PassCounts::default();
    let out = reduce_with(l, width, ledger, &mut |kind, n, _, _| match kind {
        PassKind::Pairs => counts.pairs += n,
        PassKind::TopBit => counts.top_bits += n,
    });
    (out, counts)
}
