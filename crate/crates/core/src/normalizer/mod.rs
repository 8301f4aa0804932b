// SPDX-License-Identifier: Apache-2.0

//! Rewriting bit-blasted sums to a normal form.
//!
//! Each side of a goal is expanded at its innermost term, then alternates
//! between Add-3 reduction to fixpoint and popping one lambda layer, until no
//! layers remain. Two sides with identical normal forms are equal modulo
//! `2^W` for all integer inputs.

mod add3;
mod canon;
mod subst;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bitblast::{expand_sum, infer_width, peel_lambdas, BlastError, Bvfs, Bvfsl, Ledger};
use crate::term::{desugar_let, expand_calls, Defs, ExpandError, Goal, Symbol, Term, WellFormedError};

pub use add3::{add3_reduce, pair_pass, top_bit_pass, PassCounts};
pub use canon::{canon_bvf, canon_bvfsl, fold_constants, prune, sort_items};
pub use subst::{apply_subst, substitute_items};
pub use trace::{NoObserver, Observer, Side, SideSummary, StepKind, StepRecord, Trace};

use add3::{reduce_with, PassKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error(transparent)]
    WellFormed(#[from] WellFormedError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Blast(#[from] BlastError),
    #[error("width mismatch: lhs is {lhs} bits, rhs is {rhs} bits")]
    Width { lhs: u64, rhs: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    /// Normal forms agree, but these variables lack an `integerp` hypothesis.
    MissingHyps(Vec<Symbol>),
    /// Normal forms differ; the residuals are what remains of each side after
    /// cancelling common items.
    NotEqual {
        lhs: Bvfsl,
        rhs: Bvfsl,
    },
    Aborted(String),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::MissingHyps(_) => "missing-hyps",
            Verdict::NotEqual { .. } => "not-equal",
            Verdict::Aborted(_) => "aborted",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("verified"),
            Verdict::MissingHyps(vs) => {
                f.write_str("missing:")?;
                for v in vs {
                    write!(f, " (integerp {v})")?;
                }
                Ok(())
            }
            Verdict::NotEqual { lhs, rhs } => write!(
                f,
                "not equal: {} lhs and {} rhs residual items, constants {} and {}",
                lhs.len(),
                rhs.len(),
                lhs.constant,
                rhs.constant
            ),
            Verdict::Aborted(msg) => write!(f, "aborted: {msg}"),
        }
    }
}

struct Recorder<'a> {
    side: Side,
    steps: &'a mut Vec<StepRecord>,
    obs: &'a mut dyn Observer,
}

impl Recorder<'_> {
    fn record(
        &mut self,
        kind: StepKind,
        detail: String,
        before: &Bvfsl,
        after: &Bvfsl,
        depth_before: usize,
        depth: usize,
    ) {
        let rec = StepRecord {
            side: self.side,
            kind,
            detail,
            size_before: before.len(),
            size_after: after.len(),
            depth,
        };
        self.obs.step(&rec, before, after, depth_before);
        self.steps.push(rec);
    }

    /// Canonicalize in recorded phases; unchanged phases leave no record.
    fn canon(&mut self, l: Bvfsl, width: u64, depth: usize) -> Bvfsl {
        let sorted = sort_items(&l);
        if sorted != l {
            self.record(StepKind::Canon, "sort".into(), &l, &sorted, depth, depth);
        }
        let pruned = prune(&sorted, width);
        if pruned.len() != sorted.len() {
            let detail = format!("{} items", sorted.len() - pruned.len());
            self.record(StepKind::Prune, detail, &sorted, &pruned, depth, depth);
        }
        let folded = fold_constants(&pruned, width);
        if folded != pruned {
            let detail = format!("{} ones, constant {}", pruned.len() - folded.len(), folded.constant);
            self.record(StepKind::ConstFold, detail, &pruned, &folded, depth, depth);
        }
        folded
    }
}

/// Normalize one side. `width` is taken from the term unless given; a
/// given width must agree with the term.
pub fn normalize_side(
    t: &Term,
    defs: &Defs,
    expand: &[Symbol],
    width: Option<u64>,
    side: Side,
    steps: &mut Vec<StepRecord>,
    obs: &mut dyn Observer,
) -> Result<SideSummary, NormalizeError> {
    let expanded = expand_calls(t, defs, expand)?;
    let (inner, mut ctx) = peel_lambdas(desugar_let(&expanded));
    let w = infer_width(&inner)?;
    if let Some(expected) = width {
        if expected != w {
            return Err(NormalizeError::Width { lhs: expected, rhs: w });
        }
    }
    let layers = ctx.depth();
    obs.start(side, &ctx, &inner, w);
    let mut rec = Recorder { side, steps, obs };

    let mut ledger = Ledger::default();
    let raw = expand_sum(&inner, w, &mut ledger)?;
    let addends = raw.len() / w as usize;
    let detail = format!("{addends} addends x {w} bits");
    rec.record(StepKind::Expand, detail, &Bvfsl::default(), &raw, layers, layers);
    let initial = rec.canon(raw, w, layers);

    let mut cur = initial.clone();
    loop {
        let depth = ctx.depth();
        cur = reduce_with(&cur, w, &mut ledger, &mut |kind, n, before, after| {
            let (kind, detail) = match kind {
                PassKind::Pairs => (StepKind::Add3, format!("{n} pairs")),
                PassKind::TopBit => (StepKind::TopBitAdd3, format!("{n} sums at bit {}", w - 1)),
            };
            rec.record(kind, detail, before, after, depth, depth);
        });
        let Some(layer) = ctx.pop() else { break };
        let names: Vec<&str> = layer.non_identity().map(|(v, _)| v.as_ref()).collect();
        let popped = substitute_items(&cur, &layer)?;
        ledger.apply(&layer);
        rec.record(StepKind::SubstPop, names.join(" "), &cur, &popped, depth, depth - 1);
        cur = rec.canon(popped, w, depth - 1);
    }
    Ok(SideSummary {
        width: w,
        addends,
        layers,
        inner,
        initial,
        normal: cur,
        needed: ledger.needed.into_iter().collect(),
    })
}

/// Items present on one side and not the other, counted with multiplicity.
/// Both inputs must be canonical.
pub fn residuals(a: &Bvfsl, b: &Bvfsl) -> (Bvfsl, Bvfsl) {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb): (Vec<Bvfs>, Vec<Bvfs>) = (Vec::new(), Vec::new());
    while i < a.items.len() && j < b.items.len() {
        match a.items[i].cmp(&b.items[j]) {
            std::cmp::Ordering::Less => {
                ra.push(a.items[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rb.push(b.items[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    ra.extend_from_slice(&a.items[i..]);
    rb.extend_from_slice(&b.items[j..]);
    (
        Bvfsl {
            items: ra,
            constant: a.constant.clone(),
        },
        Bvfsl {
            items: rb,
            constant: b.constant.clone(),
        },
    )
}

/// Verify a goal, returning the verdict and the full rewrite trace.
pub fn check_goal(goal: &Goal, defs: &Defs) -> (Verdict, Trace) {
    check_goal_with(goal, defs, &mut NoObserver)
}

pub fn check_goal_with(goal: &Goal, defs: &Defs, obs: &mut dyn Observer) -> (Verdict, Trace) {
    let mut trace = Trace::default();
    let verdict = match run(goal, defs, obs, &mut trace) {
        Ok(v) => v,
        Err(e) => Verdict::Aborted(e.to_string()),
    };
    (verdict, trace)
}

fn run(goal: &Goal, defs: &Defs, obs: &mut dyn Observer, trace: &mut Trace) -> Result<Verdict, NormalizeError> {
    goal.validate(defs)?;
    let lhs = normalize_side(&goal.lhs, defs, &goal.expand, None, Side::Lhs, &mut trace.steps, obs)?;
    let w = lhs.width;
    trace.lhs = Some(lhs);
    let rhs = normalize_side(&goal.rhs, defs, &goal.expand, Some(w), Side::Rhs, &mut trace.steps, obs)?;
    trace.rhs = Some(rhs);
    let (lhs, rhs) = (trace.lhs.as_ref().unwrap(), trace.rhs.as_ref().unwrap());
    if lhs.normal != rhs.normal {
        let (l, r) = residuals(&lhs.normal, &rhs.normal);
        return Ok(Verdict::NotEqual { lhs: l, rhs: r });
    }
    let needed: BTreeSet<Symbol> = lhs.needed.iter().chain(&rhs.needed).cloned().collect();
    let assumed = goal.integer_vars();
    let missing: Vec<Symbol> = needed.difference(&assumed).cloned().collect();
    Ok(if missing.is_empty() {
        Verdict::Verified
    } else {
        Verdict::MissingHyps(missing)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_goal_file;

    fn check(src: &str) -> (Verdict, Trace) {
        let file = parse_goal_file(src).unwrap();
        check_goal(file.goal.as_ref().unwrap(), &file.def_map())
    }

    const FA: &str = r#"
(define (fa-sum a b c) (setbits '0 '4 '3 '0 (logxor a b c)))
(define (fa-carry a b c)
  (setbits '0 '4 '3 '0 (ash (logior (logand a b) (logand a c) (logand b c)) '1)))
(define (csa a b c) (bits (+ (fa-sum a b c) (fa-carry a b c)) '3 '0))
(goal
  (name csa)
  (hyps (integerp x) (integerp y) (integerp z))
  (lhs (csa x y z))
  (rhs (bits (+ x y z) '3 '0))
  (expand (csa fa-sum fa-carry)))
"#;

    #[test]
    fn carry_save_adder_verifies() {
        let (v, trace) = check(FA);
        assert_eq!(v, Verdict::Verified, "{trace:?}");
        assert!(trace.count(StepKind::Add3) > 0);
        assert!(trace.max_size() <= trace.size_bound().unwrap());
    }

    #[test]
    fn missing_hypothesis_is_named() {
        let (v, _) = check(&FA.replace("(integerp y) ", ""));
        assert_eq!(v, Verdict::MissingHyps(vec![crate::term::sym("y")]));
    }

    #[test]
    fn off_by_one_constant_is_residual() {
        let (v, _) = check(&FA.replace("(+ x y z)", "(+ x y z '1)"));
        let Verdict::NotEqual { lhs, rhs } = v else {
            panic!("{v:?}")
        };
        assert!(lhs.items.is_empty() && rhs.items.is_empty());
        assert_eq!(lhs.constant, 0u32.into());
        assert_eq!(rhs.constant, 1u32.into());
    }

    #[test]
    fn width_mismatch_aborts() {
        let (v, _) = check(&FA.replace("(+ x y z) '3 '0", "(+ x y z) '4 '0"));
        assert!(
            matches!(v, Verdict::Aborted(ref m) if m.contains("width mismatch")),
            "{v:?}"
        );
    }

    #[test]
    fn unexpanded_call_aborts() {
        let (v, _) = check(&FA.replace("(expand (csa fa-sum fa-carry))", "(expand (csa fa-sum))"));
        assert!(matches!(v, Verdict::Aborted(_)), "{v:?}");
    }

    #[test]
    fn let_layers_pop_in_order() {
        let src = r#"
(goal
  (name two-level)
  (hyps (integerp p) (integerp q) (integerp r) (integerp s))
  (lhs (let* ((s0 (setbits '0 '6 '5 '0 (logxor p q r)))
              (c0 (setbits '0 '6 '5 '0 (ash (logior (logand p q) (logand p r) (logand q r)) '1))))
         (bits (+ s0 c0 s) '5 '0)))
  (rhs (bits (+ p q r s) '5 '0)))
"#;
        let (v, trace) = check(src);
        assert_eq!(v, Verdict::Verified);
        assert_eq!(trace.count(StepKind::SubstPop), 2);
        assert_eq!(trace.lhs.as_ref().unwrap().layers, 2);
    }

    #[test]
    fn residuals_cancel_with_multiplicity() {
        use crate::bitblast::Bvf;
        let x = |i| Bvfs::new(Bvf::bit(crate::term::sym("x"), i), i);
        let a = Bvfsl::new(vec![x(0), x(0), x(1)]);
        let b = Bvfsl::new(vec![x(0), x(2)]);
        let (ra, rb) = residuals(&a, &b);
        assert_eq!(ra.items, vec![x(0), x(1)]);
        assert_eq!(rb.items, vec![x(2)]);
    }
}
