// SPDX-License-Identifier: Apache-2.0

use super::tree::Tree;
use super::GenError;

fn stage_rows(tree: &Tree, stage: usize) -> Result<&[Vec<bool>], GenError> {
    tree.stages.get(stage).map(Vec::as_slice).ok_or(GenError::Stage {
        stage,
        last: tree.stages.len() - 1,
    })
}

/// Dots per column (index = bit position) at `stage`, for inputs from an
/// AND array.
pub fn column_heights(tree: &Tree, stage: usize) -> Result<Vec<usize>, GenError> {
    let rows = stage_rows(tree, stage)?;
    let cols = tree.spec.out_width();
    Ok((0..cols).map(|c| rows.iter().filter(|r| r[c]).count()).collect())
}

/// Dot diagram of one stage: a line per row that can be non-zero, most
/// significant column on the left, `*` for a dot.
pub fn render_bitmatrix(tree: &Tree, stage: usize) -> Result<String, GenError> {
    let rows = stage_rows(tree, stage)?;
    let mut out = String::new();
    for row in rows.iter().filter(|r| r.iter().any(|b| *b)) {
        let line: String = row.iter().rev().map(|&b| if b { '*' } else { ' ' }).collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    Ok(out)
}

/// Number of rows drawn at `stage`.
pub fn row_count(tree: &Tree, stage: usize) -> Result<usize, GenError> {
    Ok(stage_rows(tree, stage)?.iter().filter(|r| r.iter().any(|b| *b)).count())
}
