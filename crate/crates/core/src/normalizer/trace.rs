// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;

use crate::bitblast::{write_interp, Bvfsl, SubstContext};
use crate::term::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Expand,
    Canon,
    Prune,
    ConstFold,
    Add3,
    TopBitAdd3,
    SubstPop,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Expand => "expand",
            StepKind::Canon => "canon",
            StepKind::Prune => "prune",
            StepKind::ConstFold => "const-fold",
            StepKind::Add3 => "add3",
            StepKind::TopBitAdd3 => "top-bit-add3",
            StepKind::SubstPop => "subst-pop",
        })
    }
}

/// One rewrite applied to one side. `depth` is the number of lambda layers
/// still to be popped after the step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub side: Side,
    pub kind: StepKind,
    pub detail: String,
    pub size_before: usize,
    pub size_after: usize,
    pub depth: usize,
}

/// Watches the normalizer. Used by the step checker; the default methods do
/// nothing.
pub trait Observer {
    /// Before anything is rewritten on `side`.
    fn start(&mut self, _side: Side, _ctx: &SubstContext, _inner: &Term, _width: u64) {}

    /// After each recorded step. For [`StepKind::Expand`], `before` is empty
    /// and stands for the innermost term.
    fn step(&mut self, _rec: &StepRecord, _before: &Bvfsl, _after: &Bvfsl, _depth_before: usize) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl Observer for NoObserver {}

/// What one side looked like going in and coming out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideSummary {
    pub width: u64,
    pub addends: usize,
    pub layers: usize,
    pub inner: Term,
    pub initial: Bvfsl,
    pub normal: Bvfsl,
    pub needed: Vec<Symbol>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub lhs: Option<SideSummary>,
    pub rhs: Option<SideSummary>,
}

impl Trace {
    pub fn width(&self) -> Option<u64> {
        self.lhs.as_ref().map(|s| s.width)
    }

    /// `max(#addends) * W`: no intermediate list may be longer.
    pub fn size_bound(&self) -> Option<usize> {
        let w = self.width()? as usize;
        let a = [&self.lhs, &self.rhs]
            .iter()
            .filter_map(|s| s.as_ref().map(|s| s.addends))
            .max()?;
        Some(a * w)
    }

    pub fn max_size(&self) -> usize {
        self.steps
            .iter()
            .map(|s| s.size_before.max(s.size_after))
            .max()
            .unwrap_or(0)
    }

    pub fn count(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }

    /// JSON lines: a header, one record per step, the two normal forms and
    /// the verdict.
    pub fn write_jsonl(&self, goal: &str, verdict: &str, out: &mut dyn Write) -> io::Result<()> {
        let header = json!({
            "type": "header",
            "goal": goal,
            "width": self.width(),
            "size_bound": self.size_bound(),
            "lhs_layers": self.lhs.as_ref().map(|s| s.layers),
            "rhs_layers": self.rhs.as_ref().map(|s| s.layers),
        });
        writeln!(out, "{header}")?;
        for s in &self.steps {
            let mut v = serde_json::to_value(s).map_err(io::Error::other)?;
            v["type"] = json!("step");
            writeln!(out, "{v}")?;
        }
        for (side, summary) in [(Side::Lhs, &self.lhs), (Side::Rhs, &self.rhs)] {
            let Some(s) = summary else { continue };
            let mut form = String::new();
            write_interp(&s.normal, &mut form);
            let rec = json!({
                "type": "final",
                "side": side,
                "size": s.normal.len(),
                "constant": s.normal.constant.to_string(),
                "needed": s.needed.iter().map(|v| v.as_ref()).collect::<Vec<_>>(),
                "form": form,
            });
            writeln!(out, "{rec}")?;
        }
        writeln!(out, "{}", json!({"type": "verdict", "verdict": verdict}))
    }
}
