// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::fs;
use std::io::Write;

use crate::circuitgen::{
    build_tree, column_heights, compress_def, goal_file_for, render_bitmatrix, row_count, TreeSpec,
};
use crate::term::print_goal_file;

use super::{GenArgs, EXIT_OK};

pub(super) fn run(args: &GenArgs, out: &mut dyn Write) -> Result<i32, String> {
    let spec = TreeSpec::new(args.width, args.tree.into())
        .map_err(|e| e.to_string())?
        .tight(args.tight_widths);
    let tree = build_tree(&spec);
    let text = print_goal_file(&goal_file_for(&tree, compress_def(&tree)));
    let mut report = String::new();
    if args.diagram {
        let s = &tree.stats;
        let _ = writeln!(
            report,
            "; {} {}x{}: {} stages, {} full adders, {} half adders",
            spec.strategy, spec.width, spec.width, s.levels, s.full_adders, s.half_adders
        );
        for stage in 0..tree.stages.len() {
            let heights = column_heights(&tree, stage).map_err(|e| e.to_string())?;
            let rows = row_count(&tree, stage).map_err(|e| e.to_string())?;
            let hs: Vec<String> = heights.iter().rev().map(usize::to_string).collect();
            let _ = writeln!(report, "; stage {stage}: {rows} rows; heights {}", hs.join(" "));
            // comment the picture out so the output still reads as a goal file
            for line in render_bitmatrix(&tree, stage).map_err(|e| e.to_string())?.lines() {
                let _ = writeln!(report, ";   {line}");
            }
        }
    }
    let io = |e: std::io::Error| e.to_string();
    match &args.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            out.write_all(report.as_bytes()).map_err(io)?;
        }
        None => {
            out.write_all(report.as_bytes()).map_err(io)?;
            out.write_all(text.as_bytes()).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}
