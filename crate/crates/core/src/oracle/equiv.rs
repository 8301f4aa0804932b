// SPDX-License-Identifier: Apache-2.0

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::compile::Compiled;
use super::eval::{pow2, Env, EvalError};
use crate::term::{Defs, Symbol, Term};

/// Exhaustive enumeration refuses more input bits than this.
pub const EXHAUSTIVE_LIMIT: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("exhaustive search over {0} input bits exceeds the limit of {EXHAUSTIVE_LIMIT}")]
    TooLarge(u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every variable ranges over `[0, 2^w)`.
    Exhaustive,
    /// Every variable is drawn from `[-2^w, 2^w)`.
    Random { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub env: Env,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Equivalent { checked: u64 },
    Refuted(Box<Counterexample>),
}

impl Outcome {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Outcome::Equivalent { .. })
    }
}

/// Uniform in `[0, 2^bits)`.
pub fn random_unsigned(rng: &mut impl RngCore, bits: u64) -> BigInt {
    let words = bits.div_ceil(32) as usize;
    let digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    BigInt::from(BigUint::new(digits)).mod_floor(&pow2(bits))
}

/// Uniform in `[-2^bits, 2^bits)`.
pub fn random_signed(rng: &mut impl RngCore, bits: u64) -> BigInt {
    let v = random_unsigned(rng, bits);
    if rng.gen::<bool>() {
        v - pow2(bits)
    } else {
        v
    }
}

/// Compare `lhs` and `rhs` as integers over the given variable widths. The
/// first disagreement is returned.
pub fn check_equiv(
    lhs: &Term,
    rhs: &Term,
    vars: &[(Symbol, u32)],
    mode: Mode,
    defs: &Defs,
) -> Result<Outcome, OracleError> {
    let names: Vec<Symbol> = vars.iter().map(|(v, _)| v.clone()).collect();
    let (lhs, rhs) = (
        Compiled::new(lhs, &names, Some(defs))?,
        Compiled::new(rhs, &names, Some(defs))?,
    );
    let test = |env: &Env| -> Result<Option<Counterexample>, OracleError> {
        let l = lhs.eval(env)?;
        let r = rhs.eval(env)?;
        Ok((l != r).then(|| Counterexample {
            env: env.clone(),
            lhs: l,
            rhs: r,
        }))
    };
    match mode {
        Mode::Exhaustive => {
            let total: u32 = vars.iter().map(|(_, w)| *w).sum();
            if total > EXHAUSTIVE_LIMIT {
                return Err(OracleError::TooLarge(total));
            }
            let count = 1u64 << total;
            for code in 0..count {
                let mut env = Env::new();
                let mut rest = code;
                for (v, w) in vars {
                    env.insert(v.clone(), BigInt::from(rest & ((1u64 << w) - 1)));
                    rest >>= w;
                }
                if let Some(cex) = test(&env)? {
                    return Ok(Outcome::Refuted(Box::new(cex)));
                }
            }
            Ok(Outcome::Equivalent { checked: count })
        }
        Mode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let env: Env = vars
                    .iter()
                    .map(|(v, w)| (v.clone(), random_signed(&mut rng, *w as u64)))
                    .collect();
                if let Some(cex) = test(&env)? {
                    return Ok(Outcome::Refuted(Box::new(cex)));
                }
            }
            Ok(Outcome::Equivalent { checked: trials })
        }
    }
}

/// Check that `compress`, with each partial product bound to its term over
/// `a` and `b`, equals `a*b mod 2^(2n)` for every `a, b < 2^n`.
pub fn check_product(
    compress: &Term,
    pps: &[(Symbol, Term)],
    a: &Symbol,
    b: &Symbol,
    n: u32,
    defs: &Defs,
) -> Result<Outcome, OracleError> {
    if 2 * n > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooLarge(2 * n));
    }
    let modulus = pow2(2 * n as u64);
    let names: Vec<Symbol> = pps.iter().map(|(p, _)| p.clone()).collect();
    let compress = Compiled::new(compress, &names, Some(defs))?;
    let inputs = [a.clone(), b.clone()];
    let pps: Vec<(Symbol, Compiled)> = pps
        .iter()
        .map(|(p, t)| Ok((p.clone(), Compiled::new(t, &inputs, Some(defs))?)))
        .collect::<Result<_, EvalError>>()?;
    let mut checked = 0;
    for x in 0..(1u64 << n) {
        for y in 0..(1u64 << n) {
            let mut env = Env::new();
            env.insert(a.clone(), BigInt::from(x));
            env.insert(b.clone(), BigInt::from(y));
            let mut full = env.clone();
            for (p, c) in &pps {
                full.insert(p.clone(), c.eval(&env)?);
            }
            let got = compress.eval(&full)?;
            let want = BigInt::from(x * y).mod_floor(&modulus);
            if got != want {
                return Ok(Outcome::Refuted(Box::new(Counterexample {
                    env,
                    lhs: got,
                    rhs: want,
                })));
            }
            checked += 1;
        }
    }
    Ok(Outcome::Equivalent { checked })
}
