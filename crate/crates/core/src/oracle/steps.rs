// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::compile::Compiled;
use super::equiv::random_signed;
use super::eval::{eval_term, pow2, Env};
use crate::bitblast::{interp_bvfsl, Bvfsl, SubstContext};
use crate::normalizer::{Observer, Side, StepKind, StepRecord};
use crate::term::{Symbol, Term};

/// A step whose input and output disagree under some environment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFailure {
    pub step: StepRecord,
    pub env: Env,
    pub message: String,
}

/// Re-evaluates every normalizer step under random environments.
///
/// Each environment binds the free variables of a side to random integers,
/// negatives included, and then extends it layer by layer with the values
/// of the lambda actuals. A list at depth `d` is evaluated in the
/// environment that binds the parameters of the outer `d` layers.
pub struct StepChecker {
    rng: ChaCha8Rng,
    count: usize,
    width: u64,
    inner: Option<Term>,
    envs: Vec<Vec<Env>>,
    pub checked: usize,
    pub failures: Vec<StepFailure>,
}

impl StepChecker {
    pub fn new(count: usize, seed: u64) -> StepChecker {
        StepChecker {
            rng: ChaCha8Rng::seed_from_u64(seed),
            count,
            width: 0,
            inner: None,
            envs: Vec::new(),
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn values(&self, t: &Term, depth: usize) -> Result<Vec<BigInt>, String> {
        let m = pow2(self.width);
        let envs = &self.envs[depth];
        // every environment at one depth binds the same names
        let names: Vec<Symbol> = envs.first().map(|e| e.keys().cloned().collect()).unwrap_or_default();
        let code = Compiled::new(t, &names, None).map_err(|e| e.to_string())?;
        envs.iter()
            .map(|env| code.eval(env).map(|v| v.mod_floor(&m)).map_err(|e| e.to_string()))
            .collect()
    }
}

impl Observer for StepChecker {
    fn start(&mut self, _side: Side, ctx: &SubstContext, inner: &Term, width: u64) {
        self.width = width;
        self.inner = Some(inner.clone());
        let free = ctx.wrap(inner.clone()).free_vars();
        let bits = width + 2;
        let mut levels = vec![Vec::with_capacity(self.count); ctx.depth() + 1];
        for _ in 0..self.count {
            let mut env: Env = free
                .iter()
                .map(|v| (v.clone(), random_signed(&mut self.rng, bits)))
                .collect();
            levels[0].push(env.clone());
            for (d, layer) in ctx.layers.iter().enumerate() {
                let vals: Vec<_> = layer
                    .entries()
                    .iter()
                    .map(|(p, t)| (p.clone(), eval_term(t, &env).unwrap_or_default()))
                    .collect();
                env.extend(vals);
                levels[d + 1].push(env.clone());
            }
        }
        self.envs = levels;
    }

    fn step(&mut self, rec: &StepRecord, before: &Bvfsl, after: &Bvfsl, depth_before: usize) {
        let lhs = if rec.kind == StepKind::Expand {
            let inner = self.inner.clone().expect("start precedes steps");
            self.values(&inner, depth_before)
        } else {
            self.values(&interp_bvfsl(before), depth_before)
        };
        let rhs = self.values(&interp_bvfsl(after), rec.depth);
        self.checked += 1;
        let failure = match (lhs, rhs) {
            (Ok(l), Ok(r)) => l
                .iter()
                .zip(&r)
                .position(|(a, b)| a != b)
                .map(|k| (k, format!("before = {}, after = {} (mod 2^{})", l[k], r[k], self.width))),
            (Err(e), _) | (_, Err(e)) => Some((0, e)),
        };
        if let Some((k, message)) = failure {
            self.failures.push(StepFailure {
                step: rec.clone(),
                env: self.envs[depth_before][k].clone(),
                message,
            });
        }
    }
}
