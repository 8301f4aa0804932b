// SPDX-License-Identifier: Apache-2.0

//! Symbolic verification of multiplier compression trees.
//!
//! Goals equate a compression-tree function with the truncated sum of its
//! partial products. Both sides are bit-blasted into sums of shifted
//! single-bit formulas and normalized by the full-adder identity
//! `xor(x,y,z) + 2*maj(x,y,z) = x + y + z`, one lambda layer at a time,
//! until no substitutions remain. Equal normal forms prove the goal.

pub mod bitblast;
pub mod circuitgen;
pub mod cli;
pub mod normalizer;
pub mod oracle;
pub mod term;
