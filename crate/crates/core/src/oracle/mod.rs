// SPDX-License-Identifier: Apache-2.0

//! Brute-force checks that do not trust the normalizer: concrete
//! evaluation, equivalence by enumeration or sampling, and per-step
//! re-evaluation of a normalization run.

mod compile;
mod equiv;
mod eval;
mod steps;

pub use compile::Compiled;
pub use equiv::{
    check_equiv, check_product, random_signed, random_unsigned, Counterexample, Mode, OracleError, Outcome,
    EXHAUSTIVE_LIMIT,
};
pub use eval::{ash, bitn, bits, eval_term, eval_with_defs, pow2, setbits, Env, EvalError};
pub use steps::{StepChecker, StepFailure};
