// SPDX-License-Identifier: Apache-2.0

//! Bitwise expansion of word-level terms.
//!
//! A term of width `W` is turned into a [`Bvfsl`], a sum of single-bit
//! formulas each weighted by a power of two, by asking [`get_nth_bit`] for
//! every bit of every addend. Lambda layers around the term are peeled into a
//! [`SubstContext`] first so the innermost expression can be expanded on its
//! own and the bindings applied one layer at a time later.

mod context;
mod forms;
mod nth_bit;

use thiserror::Error;

use crate::term::{print_term, Term};

pub use context::{peel_lambdas, Ledger, Subst, SubstContext};
pub use forms::{interp_bvfsl, write_interp, Bv, Bvf, Bvfs, Bvfsl};
pub use nth_bit::{addends, expand_sum, get_nth_bit, infer_width, substitute_bvf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlastError {
    #[error("cannot take bit {index} of {term}: {reason}")]
    Unsupported { term: String, index: u64, reason: String },
    #[error("{0}")]
    Width(String),
}

impl BlastError {
    pub(crate) fn unsupported(t: &Term, index: u64, reason: &str) -> BlastError {
        let mut term = print_term(t);
        if term.len() > 240 {
            term.truncate(240);
            term.push_str(" ...");
        }
        BlastError::Unsupported {
            term,
            index,
            reason: reason.to_string(),
        }
    }
}
