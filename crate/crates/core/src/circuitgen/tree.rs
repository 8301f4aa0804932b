// SPDX-License-Identifier: Apache-2.0

use crate::term::{sym, Op, Symbol, Term};

use super::{Strategy, TreeSpec};

/// Dadda stage heights: 2, 3, 4, 6, 9, 13, 19, 28, 42, 63, ...
pub fn dadda_heights(max: usize) -> Vec<usize> {
    let mut out = vec![2];
    while let Some(&d) = out.last() {
        let next = d * 3 / 2;
        if next >= max {
            break;
        }
        out.push(next);
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeStats {
    /// Number of reduction stages before the final adder.
    pub levels: usize,
    /// Bit-level 3:2 compressors. A row-level compressor of the linear
    /// tree counts once per bit of its sum row.
    pub full_adders: usize,
    pub half_adders: usize,
    /// Maximum column height at each stage, starting with the input matrix.
    pub stage_heights: Vec<usize>,
}

/// A generated tree: the `let*` bindings of `compress`, the rows that feed
/// the final adder, and dot liveness per stage for drawing.
#[derive(Clone, Debug)]
pub struct Tree {
    pub spec: TreeSpec,
    pub bindings: Vec<(Symbol, Term)>,
    pub final_rows: Vec<Term>,
    pub stats: TreeStats,
    /// `stages[s][r][c]`: row `r` of stage `s` has a possibly non-zero bit at
    /// column `c` when the inputs come from an AND array.
    pub stages: Vec<Vec<Vec<bool>>>,
}

impl Tree {
    /// Body of the `compress` define.
    pub fn body(&self) -> Term {
        let out = self.spec.out_width();
        let sum = match self.final_rows.as_slice() {
            [] => Term::nat(0),
            [one] => one.clone(),
            rows => Term::chain(Op::Plus, rows.to_vec()),
        };
        let last = Term::bits(sum, out as u64 - 1, 0);
        if self.bindings.is_empty() {
            last
        } else {
            Term::Let {
                bindings: self.bindings.clone(),
                body: Box::new(last),
            }
        }
    }
}

pub fn pp_name(j: usize) -> Symbol {
    sym(&format!("pp{j}"))
}

fn row_name(level: usize, r: usize) -> Symbol {
    sym(&format!("l{level}pp{r}"))
}

fn field(width: u64, value: Term) -> Term {
    Term::setbits(Term::nat(0), width, width - 1, 0, value)
}

fn majority(a: &Term, b: &Term, c: &Term) -> Term {
    Term::chain(
        Op::Logior,
        vec![
            Term::app(Op::Logand, vec![a.clone(), b.clone()]),
            Term::app(Op::Logand, vec![a.clone(), c.clone()]),
            Term::app(Op::Logand, vec![b.clone(), c.clone()]),
        ],
    )
}

/// Rows of the input matrix under AND-array liveness: `pp_j` may be
/// non-zero at columns `j..j+N`.
fn input_liveness(n: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|j| (0..2 * n).map(|c| c >= j && c < j + n).collect())
        .collect()
}

/// Input rows. With tight widths each `pp_j` is first cut to its low
/// `N+j` bits, the most an AND-array row can occupy.
fn inputs(spec: &TreeSpec, bindings: &mut Vec<(Symbol, Term)>) -> Vec<(Term, usize)> {
    let n = spec.width;
    (0..n)
        .map(|j| {
            if spec.tight {
                let name = row_name(0, j);
                let w = (n + j) as u64;
                bindings.push((name.clone(), field(w, Term::Var(pp_name(j)))));
                (Term::Var(name), n + j - 1)
            } else {
                (Term::Var(pp_name(j)), 2 * n - 1)
            }
        })
        .collect()
}

pub fn build(spec: &TreeSpec) -> Tree {
    match spec.strategy {
        Strategy::Linear => linear(spec),
        Strategy::Wallace | Strategy::Dadda => bit_level(spec),
    }
}

struct Row {
    term: Term,
    /// Highest column that may be non-zero for arbitrary integer inputs.
    top: usize,
    live: Vec<bool>,
}

/// Rows are reduced three at a time from the bottom at every level, the
/// leftover rows passed on under new names.
fn linear(spec: &TreeSpec) -> Tree {
    let out = spec.out_width();
    let mut bindings = Vec::new();
    let mut rows: Vec<Row> = inputs(spec, &mut bindings)
        .into_iter()
        .zip(input_liveness(spec.width))
        .map(|((term, top), live)| Row { term, top, live })
        .collect();
    let mut stats = TreeStats::default();
    let mut stages = vec![rows.iter().map(|r| r.live.clone()).collect::<Vec<_>>()];
    stats.stage_heights.push(max_height(&stages[0]));
    let mut level = 0;
    while rows.len() > 2 {
        level += 1;
        let mut next = Vec::new();
        let groups = rows.len() / 3;
        for g in 0..groups {
            let (a, b, c) = (&rows[3 * g], &rows[3 * g + 1], &rows[3 * g + 2]);
            // the carry row reaches one past the widest input even where the
            // majority is provably zero there: the top sum bit `x^0^0` needs
            // its `maj(x,0,0)` partner to be rewritten
            let sum_top = a.top.max(b.top).max(c.top);
            let carry_top = (sum_top + 1).min(out - 1);
            let (sw, cw) = if spec.tight {
                ((sum_top + 1) as u64, (carry_top + 1) as u64)
            } else {
                (out as u64, out as u64)
            };
            let xor = Term::chain(Op::Logxor, vec![a.term.clone(), b.term.clone(), c.term.clone()]);
            let carry = Term::ash(majority(&a.term, &b.term, &c.term), 1);
            let sum_live: Vec<bool> = (0..out).map(|i| a.live[i] || b.live[i] || c.live[i]).collect();
            let carry_live: Vec<bool> = (0..out)
                .map(|i| {
                    i > 0
                        && [a.live[i - 1], b.live[i - 1], c.live[i - 1]]
                            .iter()
                            .filter(|x| **x)
                            .count()
                            >= 2
                })
                .collect();
            stats.full_adders += sw as usize;
            for (k, (term, top, live)) in [
                (field(sw, xor), sum_top, sum_live),
                (field(cw, carry), carry_top, carry_live),
            ]
            .into_iter()
            .enumerate()
            {
                let name = row_name(level, 2 * g + k);
                bindings.push((name.clone(), term));
                next.push(Row {
                    term: Term::Var(name),
                    top,
                    live,
                });
            }
        }
        for r in rows.drain(..).skip(3 * groups) {
            let name = row_name(level, next.len());
            bindings.push((name.clone(), r.term));
            next.push(Row {
                term: Term::Var(name),
                ..r
            });
        }
        rows = next;
        let live: Vec<Vec<bool>> = rows.iter().map(|r| r.live.clone()).collect();
        stats.stage_heights.push(max_height(&live));
        stages.push(live);
    }
    stats.levels = level;
    Tree {
        spec: spec.clone(),
        bindings,
        final_rows: rows.into_iter().map(|r| r.term).collect(),
        stats,
        stages,
    }
}

fn max_height(rows: &[Vec<bool>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    (0..cols)
        .map(|c| rows.iter().filter(|r| r[c]).count())
        .max()
        .unwrap_or(0)
}

#[derive(Clone)]
struct Dot {
    term: Term,
    live: bool,
}

/// Full and half adders applied column by column over the whole
/// `N x 2N` matrix; the inputs are arbitrary integers, so every column of
/// every row takes part. Carries out of the top column are dropped.
fn bit_level(spec: &TreeSpec) -> Tree {
    let n = spec.width;
    let out = spec.out_width();
    let mut bindings = Vec::new();
    let sources = inputs(spec, &mut bindings);
    let mut cols: Vec<Vec<Dot>> = vec![Vec::new(); out];
    for (j, (src, top)) in sources.iter().enumerate() {
        for (c, col) in cols.iter_mut().enumerate().take(top + 1) {
            col.push(Dot {
                term: Term::bitn(src.clone(), c as u64),
                live: c >= j && c < j + n,
            });
        }
    }
    let mut stats = TreeStats::default();
    let mut stages = vec![input_liveness(n)];
    stats.stage_heights.push(height(&cols));
    let mut rows: Vec<Term> = sources.into_iter().map(|(t, _)| t).collect();
    let mut targets = match spec.strategy {
        Strategy::Dadda => dadda_heights(height(&cols)),
        _ => Vec::new(),
    };
    let mut level = 0;
    while height(&cols) > 2 {
        level += 1;
        let target = targets.pop();
        let mut next: Vec<Vec<Dot>> = vec![Vec::new(); out];
        for c in 0..out {
            let mut old = std::mem::take(&mut cols[c]).into_iter();
            let mut remaining = old.len();
            loop {
                let total = next[c].len() + remaining;
                let use_fa = match target {
                    Some(t) => total > t && total - t >= 2 && remaining >= 3,
                    None => remaining >= 3,
                };
                let use_ha = !use_fa
                    && remaining >= 2
                    && match target {
                        Some(t) => total > t,
                        None => remaining == 2,
                    };
                if use_fa {
                    let (x, y, z) = (old.next().unwrap(), old.next().unwrap(), old.next().unwrap());
                    remaining -= 3;
                    stats.full_adders += 1;
                    let sum = Term::chain(Op::Logxor, vec![x.term.clone(), y.term.clone(), z.term.clone()]);
                    let carry = majority(&x.term, &y.term, &z.term);
                    let live = [x.live, y.live, z.live].iter().filter(|l| **l).count();
                    next[c].push(Dot {
                        term: sum,
                        live: live > 0,
                    });
                    if c + 1 < out {
                        next[c + 1].push(Dot {
                            term: carry,
                            live: live >= 2,
                        });
                    }
                } else if use_ha {
                    let (x, y) = (old.next().unwrap(), old.next().unwrap());
                    remaining -= 2;
                    stats.half_adders += 1;
                    let sum = Term::app(Op::Logxor, vec![x.term.clone(), y.term.clone()]);
                    let carry = Term::app(Op::Logand, vec![x.term, y.term]);
                    next[c].push(Dot {
                        term: sum,
                        live: x.live || y.live,
                    });
                    if c + 1 < out {
                        next[c + 1].push(Dot {
                            term: carry,
                            live: x.live && y.live,
                        });
                    }
                } else {
                    break;
                }
            }
            next[c].extend(old);
        }
        // one row per dot rank; every dot is then re-read from its row
        let h = height(&next);
        rows.clear();
        for r in 0..h {
            let name = row_name(level, r);
            let top = (0..out).rev().find(|&c| next[c].len() > r).unwrap_or(0);
            let w = if spec.tight { top as u64 + 1 } else { out as u64 };
            let mut acc = Term::nat(0);
            for (c, col) in next.iter().enumerate() {
                if let Some(d) = col.get(r) {
                    acc = Term::setbits(acc, w, c as u64, c as u64, d.term.clone());
                }
            }
            bindings.push((name.clone(), acc));
            rows.push(Term::Var(name));
        }
        for (c, col) in next.iter_mut().enumerate() {
            for (r, d) in col.iter_mut().enumerate() {
                d.term = Term::bitn(rows[r].clone(), c as u64);
            }
        }
        cols = next;
        stats.stage_heights.push(height(&cols));
        stages.push(compact(&cols));
    }
    stats.levels = level;
    Tree {
        spec: spec.clone(),
        bindings,
        final_rows: rows,
        stats,
        stages,
    }
}

fn height(cols: &[Vec<Dot>]) -> usize {
    cols.iter().map(Vec::len).max().unwrap_or(0)
}

/// Live dots pushed to the bottom of each column, as in a dot diagram.
fn compact(cols: &[Vec<Dot>]) -> Vec<Vec<bool>> {
    let live: Vec<usize> = cols.iter().map(|c| c.iter().filter(|d| d.live).count()).collect();
    let h = live.iter().copied().max().unwrap_or(0);
    (0..h).map(|r| live.iter().map(|&l| l > r).collect()).collect()
}
