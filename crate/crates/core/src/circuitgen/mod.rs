// SPDX-License-Identifier: Apache-2.0

//! Goal generators for `N x N` unsigned multipliers.
//!
//! Partial products come from a plain AND array. The compression tree is
//! one of three shapes: `linear` reduces whole rows three at a time, the way
//! a hand-written `compress` does; `wallace` and `dadda` place full and half
//! adders per column. The generated `compress` is correct for arbitrary
//! integer inputs, so the goal needs nothing beyond `integerp` hypotheses.

pub mod mutate;
mod render;
mod tree;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::term::{print_goal_file, sym, FnDef, Goal, GoalFile, Hyp, Op, Symbol, Term};

pub use render::{column_heights, render_bitmatrix, row_count};
pub use tree::{dadda_heights, pp_name, Tree, TreeStats};

/// Largest supported operand width.
pub const MAX_WIDTH: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("width must be between 2 and {MAX_WIDTH}, got {0}")]
    Width(usize),
    #[error("unknown tree {0:?}; expected linear, wallace or dadda")]
    Strategy(String),
    #[error("stage {stage} out of range; the last stage is {last}")]
    Stage { stage: usize, last: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Linear,
    Wallace,
    Dadda,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Linear, Strategy::Wallace, Strategy::Dadda];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Linear => "linear",
            Strategy::Wallace => "wallace",
            Strategy::Dadda => "dadda",
        })
    }
}

impl FromStr for Strategy {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Strategy, GenError> {
        match s {
            "linear" => Ok(Strategy::Linear),
            "wallace" => Ok(Strategy::Wallace),
            "dadda" => Ok(Strategy::Dadda),
            other => Err(GenError::Strategy(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeSpec {
    pub width: usize,
    pub strategy: Strategy,
    /// Cut each input and each row to the columns it can occupy, instead of
    /// carrying every row at the full output width.
    pub tight: bool,
}

impl TreeSpec {
    pub fn new(width: usize, strategy: Strategy) -> Result<TreeSpec, GenError> {
        if !(2..=MAX_WIDTH).contains(&width) {
            return Err(GenError::Width(width));
        }
        Ok(TreeSpec {
            width,
            strategy,
            tight: false,
        })
    }

    pub fn tight(self, tight: bool) -> TreeSpec {
        TreeSpec { tight, ..self }
    }

    pub fn out_width(&self) -> usize {
        2 * self.width
    }

    pub fn goal_name(&self) -> String {
        let n = self.width;
        let mut name = match self.strategy {
            Strategy::Linear => format!("compress-lemma-{n}x{n}"),
            s => format!("compress-{s}-{n}x{n}"),
        };
        if self.tight {
            name.push_str("-tight");
        }
        name
    }
}

pub fn build_tree(spec: &TreeSpec) -> Tree {
    tree::build(spec)
}

pub fn compress_name() -> Symbol {
    sym("compress")
}

/// The `compress` define for `spec`.
pub fn gen_tree(spec: &TreeSpec) -> FnDef {
    compress_def(&build_tree(spec))
}

pub fn compress_def(tree: &Tree) -> FnDef {
    FnDef {
        name: compress_name(),
        params: (0..tree.spec.width).map(pp_name).collect(),
        body: tree.body(),
    }
}

/// `(compress pp0 ... pp{N-1})` equals the truncated sum of its inputs.
pub fn gen_goal_file(spec: &TreeSpec) -> GoalFile {
    let tree = build_tree(spec);
    goal_file_for(&tree, compress_def(&tree))
}

/// Goal file for `tree` with `def` standing in for its `compress`; used to
/// pair mutated trees with the original goal.
pub fn goal_file_for(tree: &Tree, def: FnDef) -> GoalFile {
    let spec = &tree.spec;
    let n = spec.width;
    let out = spec.out_width() as u64;
    let pps: Vec<Term> = (0..n).map(|j| Term::Var(pp_name(j))).collect();
    let addends: Vec<Term> = if spec.tight {
        (0..n)
            .map(|j| Term::bits(pps[j].clone(), (n + j - 1) as u64, 0))
            .collect()
    } else {
        pps.clone()
    };
    let rhs = Term::bits(Term::chain(Op::Plus, addends), out - 1, 0);
    let goal = Goal {
        name: sym(&spec.goal_name()),
        hyps: (0..n).map(|j| Hyp::integer(pp_name(j))).collect(),
        lhs: Term::Call(compress_name(), pps),
        rhs,
        expand: vec![compress_name()],
    };
    GoalFile {
        defs: vec![def],
        goal: Some(goal),
    }
}

pub fn gen_goal(spec: &TreeSpec) -> String {
    print_goal_file(&gen_goal_file(spec))
}

/// `genpp{j}` defines and the `pp_j := (genpp{j} a b)` bindings.
pub type PartialProducts = (Vec<FnDef>, Vec<(Symbol, Term)>);

/// AND-array partial products: `genpp{j}` places `a_i & b_j` at column
/// `i + j` of a `2N`-bit word. Returns the defines and the binding of each
/// `pp_j` to `(genpp{j} a b)`.
pub fn gen_pp(width: usize) -> Result<PartialProducts, GenError> {
    if !(2..=MAX_WIDTH).contains(&width) {
        return Err(GenError::Width(width));
    }
    let out = 2 * width as u64;
    let (a, b) = (sym("a"), sym("b"));
    let mut defs = Vec::with_capacity(width);
    let mut binds = Vec::with_capacity(width);
    for j in 0..width {
        let mut row = Term::nat(0);
        for i in 0..width {
            let dot = Term::app(
                Op::Logand,
                vec![
                    Term::bitn(Term::Var(a.clone()), i as u64),
                    Term::bitn(Term::Var(b.clone()), j as u64),
                ],
            );
            let c = (i + j) as u64;
            row = Term::setbits(row, out, c, c, dot);
        }
        let name = sym(&format!("genpp{j}"));
        defs.push(FnDef {
            name: name.clone(),
            params: vec![a.clone(), b.clone()],
            body: row,
        });
        binds.push((
            pp_name(j),
            Term::Call(name, vec![Term::Var(a.clone()), Term::Var(b.clone())]),
        ));
    }
    Ok((defs, binds))
}
